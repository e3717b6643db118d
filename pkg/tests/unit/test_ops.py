import numpy as np
import pytest

import tensorbridge as tb
from tensorbridge.backends import native_allocations
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, ShapeMismatch
from tensorbridge.core.types import DType


def test_free_functions_match_methods(backend, make_tensor):
    x = make_tensor(backend, [[1.0, -2.0], [3.0, 4.0]])
    assert np.array_equal(tb.square(x).numpy(), x.square().numpy())
    assert np.array_equal(tb.sum(x, axes=0).numpy(), x.sum(axes=0).numpy())
    assert np.array_equal(tb.maximum(x, 0.0).numpy(), x.maximum(0.0).numpy())
    assert np.array_equal(tb.transpose(x).numpy(), x.T.numpy())
    assert tb.norm(x).item() == x.norm().item()


def test_creation_functions(backend):
    assert tb.zeros(backend, (2, 2)).numpy().tolist() == [[0, 0], [0, 0]]
    assert tb.ones(backend.name, 3, dtype="f32").dtype is DType.F32
    assert tb.full(backend, (), 2.5).item() == 2.5
    assert tb.arange(backend, 3).numpy().tolist() == [0.0, 1.0, 2.0]
    out = tb.from_values(backend, [[1, 2], [3, 4]])
    assert out.shape == (2, 2)
    assert out.raw.backend is backend


@pytest.mark.parametrize("create", [tb.zeros, tb.ones, lambda b, s: tb.full(b, s, 1.0)])
def test_creation_rejects_negative_extents_before_allocating(backend, create):
    before = native_allocations()
    with pytest.raises(InvalidArgument, match="négatifs"):
        create(backend, (2, -1))
    assert native_allocations() == before


def test_from_values_dtype_detection():
    assert tb.from_values("plain", np.ones(2, dtype=np.float32)).dtype is DType.F32
    assert tb.from_values("plain", [1.0]).dtype is DType.F64
    assert tb.from_values("plain", [1.0], dtype="f32").dtype is DType.F32


def test_from_values_ragged():
    with pytest.raises(ShapeMismatch):
        tb.from_values("plain", [[1.0, 2.0], [3.0]])


def test_apply_dispatches_every_category(make_tensor):
    x = make_tensor("tape", [[1.0, 2.0], [3.0, 4.0]])
    assert tb.apply(OpDescriptor("sum", axes=(1,)), x).numpy().tolist() == [3.0, 7.0]
    assert tb.apply(OpDescriptor("add"), x, x).numpy().tolist() == [[2.0, 4.0], [6.0, 8.0]]
    assert tb.apply(OpDescriptor("norm"), x).item() == pytest.approx(np.sqrt(30.0))
    assert tb.apply(OpDescriptor("arange", stop=2), backend="tape").numpy().tolist() == [0.0, 1.0]


def test_apply_errors(make_tensor):
    with pytest.raises(InvalidArgument):
        tb.apply(OpDescriptor("zeros", shape=(1,)))
    with pytest.raises(InvalidArgument):
        tb.apply(OpDescriptor("square"))
    with pytest.raises(InvalidArgument):
        tb.apply(OpDescriptor("add"), make_tensor("plain", [1.0]), [1.0])
