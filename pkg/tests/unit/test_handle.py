import math

import numpy as np
import pytest

from tensorbridge.core.errors import InvalidArgument, MixedBackends, ShapeMismatch
from tensorbridge.core.types import BackendId, DType
from tensorbridge.tensor import TensorHandle


def test_properties(backend, make_tensor):
    x = make_tensor(backend, [[1, 2, 3], [4, 5, 6]])
    assert x.backend is backend.id
    assert x.shape == (2, 3)
    assert x.ndim == 2
    assert x.size == 6
    assert x.dtype is DType.F64
    assert x.T.shape == (3, 2)


def test_chained_norm(backend, make_tensor):
    x = make_tensor(backend, [1, 2, 3])
    assert x.square().sum().sqrt().item() == math.sqrt(14)
    assert x.norm().item() == math.sqrt(14)


def test_norm_f32(backend, make_tensor):
    x = make_tensor(backend, [1, 2, 3], dtype="f32")
    out = x.norm()
    assert out.dtype is DType.F32
    assert out.numpy() == np.float32(math.sqrt(14))


def test_result_stays_on_backend(backend, make_tensor):
    y = make_tensor(backend, [1.0]).exp()
    assert isinstance(y, TensorHandle)
    assert y.raw.backend is backend


def test_operators(backend, make_tensor):
    x = make_tensor(backend, [1.0, 2.0])
    assert (x + 1).numpy().tolist() == [2.0, 3.0]
    assert (2 - x).numpy().tolist() == [1.0, 0.0]
    assert (x * x).numpy().tolist() == [1.0, 4.0]
    assert (1 / x).numpy().tolist() == [1.0, 0.5]
    assert (x ** 2).numpy().tolist() == [1.0, 4.0]
    assert (2 ** x).numpy().tolist() == [2.0, 4.0]
    assert (-x).numpy().tolist() == [-1.0, -2.0]
    assert abs(-x).numpy().tolist() == [1.0, 2.0]


def test_numpy_scalar_on_left_delegates(make_tensor):
    x = make_tensor("plain", [1.0, 2.0])
    out = np.float64(3.0) * x
    assert isinstance(out, TensorHandle)
    assert out.numpy().tolist() == [3.0, 6.0]


def test_unsupported_operand(make_tensor):
    x = make_tensor("plain", [1.0])
    with pytest.raises(TypeError):
        x + "a"
    with pytest.raises(InvalidArgument):
        x.add("a")
    with pytest.raises(InvalidArgument):
        x.add(True)


def test_broadcasting(backend, make_tensor):
    a = make_tensor(backend, [[1.0], [2.0]])
    b = make_tensor(backend, [10.0, 20.0, 30.0])
    assert (a + b).shape == (2, 3)
    with pytest.raises(ShapeMismatch):
        make_tensor(backend, [1.0, 2.0]) + b


def test_mixed_backends(make_tensor):
    with pytest.raises(MixedBackends):
        make_tensor("plain", [1.0]) + make_tensor("tape", [1.0])


def test_reductions_and_shape_methods(backend, make_tensor):
    x = make_tensor(backend, [[1.0, 5.0, 3.0], [4.0, 2.0, 6.0]])
    assert x.sum(axes=1).numpy().tolist() == [9.0, 12.0]
    assert x.mean(axes=0, keepdims=True).shape == (1, 3)
    assert x.max().item() == 6.0
    assert x.argmax(axis=1).numpy().tolist() == [1.0, 2.0]
    assert x.argmin(axis=0).numpy().tolist() == [0.0, 1.0, 0.0]
    assert x.reshape(3, 2).shape == (3, 2)
    assert x.reshape((-1,)).shape == (6,)
    assert x.flatten().shape == (6,)
    assert x.expand_dims(0).shape == (1, 2, 3)
    assert x.expand_dims(0).squeeze().shape == (2, 3)
    assert x.clip(2.0, 4.0).numpy().tolist() == [[2.0, 4.0, 3.0], [4.0, 2.0, 4.0]]


def test_where(backend, make_tensor):
    cond = make_tensor(backend, [1.0, 0.0])
    a = make_tensor(backend, [1.0, 2.0])
    b = make_tensor(backend, [-1.0, -2.0])
    assert cond.where(a, b).numpy().tolist() == [1.0, -2.0]


def test_numpy_is_a_writable_copy(make_tensor):
    x = make_tensor("plain", [1.0, 2.0])
    out = x.numpy()
    out[0] = 42.0
    assert x.numpy().tolist() == [1.0, 2.0]


def test_item_requires_single_element(make_tensor):
    with pytest.raises(InvalidArgument):
        make_tensor("plain", [1.0, 2.0]).item()
    assert make_tensor("plain", [7.0]).item() == 7.0


def test_no_truth_value_or_iteration(make_tensor):
    x = make_tensor("plain", [1.0])
    with pytest.raises(TypeError):
        bool(x)
    with pytest.raises(TypeError):
        list(x)


def test_repr(make_tensor):
    assert repr(make_tensor("tape", [2.0, 4.0])) == "TensorHandle(tape, [2,4])"


def test_ieee_results(backend, make_tensor):
    assert math.isnan(make_tensor(backend, -1.0).sqrt().item())
    assert make_tensor(backend, 0.0).log().item() == -math.inf
    assert (make_tensor(backend, 1.0) / 0.0).item() == math.inf


def test_backend_id_of_handle(make_tensor):
    assert make_tensor("functional", [1.0]).backend is BackendId.FUNCTIONAL
