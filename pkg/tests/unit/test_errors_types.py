import numpy as np
import pytest

from tensorbridge.core.errors import (
    DTypeMismatch,
    InvalidArgument,
    MixedBackends,
    ReportIOError,
    ShapeMismatch,
    TensorBridgeError,
    UnknownBackend,
)
from tensorbridge.core.types import BackendId, DType, normalize_shape


def test_error_kind_is_class_name():
    assert ShapeMismatch("x").kind == "ShapeMismatch"
    assert MixedBackends("x").kind == "MixedBackends"


@pytest.mark.parametrize(
    "cls, builtin",
    [
        (UnknownBackend, TypeError),
        (MixedBackends, ValueError),
        (DTypeMismatch, TypeError),
        (InvalidArgument, ValueError),
        (ReportIOError, OSError),
    ],
)
def test_errors_are_also_builtin_exceptions(cls, builtin):
    err = cls("boom")
    assert isinstance(err, TensorBridgeError)
    assert isinstance(err, builtin)


def test_unknown_backend_carries_index():
    assert UnknownBackend("bad", index=2).index == 2
    assert UnknownBackend("bad").index is None


def test_backend_id_parse():
    assert BackendId.parse("Tape") is BackendId.TAPE
    assert BackendId.parse(BackendId.PLAIN) is BackendId.PLAIN
    with pytest.raises(UnknownBackend):
        BackendId.parse("torch")


def test_dtype_parse_and_of():
    assert DType.parse("F32") is DType.F32
    assert DType.of(np.zeros(2, dtype=np.float64)) is DType.F64
    assert DType.F32.numpy == np.float32
    with pytest.raises(InvalidArgument):
        DType.parse("f16")
    with pytest.raises(InvalidArgument):
        DType.of(np.zeros(2, dtype=np.int32))


def test_normalize_shape():
    assert normalize_shape(3) == (3,)
    assert normalize_shape([2, 3]) == (2, 3)
    assert normalize_shape(()) == ()


@pytest.mark.parametrize("shape", [-1, (2, -3), [0, -1]])
def test_normalize_shape_rejects_negative_extents(shape):
    with pytest.raises(InvalidArgument, match="négatifs"):
        normalize_shape(shape)
