
import numpy as np
import pytest

from tensorbridge.backends import get_backend, get_builtin_backends
from tensorbridge.core.logger import reset_logging
from tensorbridge.core.types import BackendId
from tensorbridge.tensor import astensor

ALL_BACKENDS = [b.value for b in BackendId]
AD_BACKENDS = [BackendId.IMPERATIVE.value, BackendId.TAPE.value, BackendId.FUNCTIONAL.value]


@pytest.fixture(params=ALL_BACKENDS)
def backend(request):
    return get_backend(request.param)


@pytest.fixture(params=AD_BACKENDS)
def ad_backend(request):
    return get_backend(request.param)


@pytest.fixture
def builtin_backends():
    return get_builtin_backends()


@pytest.fixture
def make_tensor():
    """make_tensor(backend, values, dtype=None) -> TensorHandle"""

    def _make(backend, values, dtype=None):
        return astensor(get_backend(backend).from_array(np.asarray(values, dtype=np.float64), dtype=dtype))

    return _make


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for var in ("TB_SEED", "TB_MAX_RANK", "TB_MAX_EXTENT", "TB_FD_STEP", "TB_LOG_LEVEL", "TB_LOG_FORMAT"):
        monkeypatch.delenv(var, raising=False)
    yield
    reset_logging()
