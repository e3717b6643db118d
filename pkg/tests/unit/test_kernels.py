import math

import numpy as np
import pytest

from tensorbridge.backends.kernels import broadcast_shape, compute, normalize_axes
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import EmptyReduction, InvalidArgument, InvalidAxis, ShapeMismatch


def arr(values, dtype=np.float64):
    return np.asarray(values, dtype=dtype)


def test_broadcast_shape():
    assert broadcast_shape((2, 3), (3,)) == (2, 3)
    assert broadcast_shape((2, 1), (1, 4)) == (2, 4)
    assert broadcast_shape((), (5,)) == (5,)
    with pytest.raises(ShapeMismatch):
        broadcast_shape((2, 3), (2,))


def test_normalize_axes():
    assert normalize_axes(None, 3) == (0, 1, 2)
    assert normalize_axes((2, 0), 3) == (0, 2)
    with pytest.raises(InvalidAxis):
        normalize_axes((3,), 3)
    with pytest.raises(InvalidAxis):
        normalize_axes((1, 1), 3)


def test_output_is_read_only_and_new_buffer():
    x = arr([1.0, 2.0])
    out = compute(OpDescriptor("flatten"), [x])
    assert out is not x
    assert not out.flags.writeable
    assert out.flags.c_contiguous


def test_transpose_is_contiguous():
    out = compute(OpDescriptor("transpose"), [arr([[1, 2, 3], [4, 5, 6]])])
    assert out.shape == (3, 2)
    assert out.flags.c_contiguous


def test_dtype_preserved():
    out = compute(OpDescriptor("mul", scalar=2.0), [arr([1.5], np.float32)])
    assert out.dtype == np.float32


def test_ieee_domain_violations_do_not_raise():
    assert math.isnan(compute(OpDescriptor("sqrt"), [arr(-1.0)]))
    assert compute(OpDescriptor("log"), [arr(0.0)]) == -math.inf
    assert compute(OpDescriptor("div"), [arr(1.0), arr(0.0)]) == math.inf
    assert math.isnan(compute(OpDescriptor("div"), [arr(0.0), arr(0.0)]))


def test_reflected_scalar():
    out = compute(OpDescriptor("sub", scalar=2.0, reflected=True), [arr([0.5, 3.0])])
    assert out.tolist() == [1.5, -1.0]


def test_reductions():
    x = arr([[1, 2, 3], [4, 5, 6]])
    assert compute(OpDescriptor("sum"), [x]) == 21
    assert compute(OpDescriptor("sum", axes=(1,), keepdims=True), [x]).shape == (2, 1)
    assert compute(OpDescriptor("mean", axes=(0,)), [x]).tolist() == [2.5, 3.5, 4.5]
    assert compute(OpDescriptor("prod", axes=(1,)), [x]).tolist() == [6, 120]
    assert compute(OpDescriptor("max", axes=(0, 1)), [x]) == 6


def test_empty_reductions():
    empty = np.zeros((2, 0))
    assert compute(OpDescriptor("sum", axes=(1,)), [empty]).tolist() == [0, 0]
    assert compute(OpDescriptor("prod", axes=(1,)), [empty]).tolist() == [1, 1]
    assert all(math.isnan(v) for v in compute(OpDescriptor("mean", axes=(1,)), [empty]))
    with pytest.raises(EmptyReduction):
        compute(OpDescriptor("max", axes=(1,)), [empty])
    with pytest.raises(EmptyReduction):
        compute(OpDescriptor("argmin", axis=1), [empty])


def test_argmax_first_occurrence():
    out = compute(OpDescriptor("argmax", axis=1), [arr([[1, 3, 3], [2, 2, 0]])])
    assert out.tolist() == [1, 0]
    assert out.dtype == np.float64


def test_reshape():
    x = arr(np.arange(6))
    assert compute(OpDescriptor("reshape", shape=(2, -1)), [x]).shape == (2, 3)
    with pytest.raises(ShapeMismatch):
        compute(OpDescriptor("reshape", shape=(4,)), [x])
    with pytest.raises(ShapeMismatch):
        compute(OpDescriptor("reshape", shape=(-1, -1)), [x])


def test_shape_ops():
    x = arr([[1.0], [2.0]])
    assert compute(OpDescriptor("squeeze"), [x]).shape == (2,)
    assert compute(OpDescriptor("expand_dims", axis=0), [x]).shape == (1, 2, 1)
    with pytest.raises(ShapeMismatch):
        compute(OpDescriptor("squeeze", axis=0), [x])
    with pytest.raises(ShapeMismatch):
        compute(OpDescriptor("transpose"), [arr([1.0, 2.0])])
    with pytest.raises(InvalidAxis):
        compute(OpDescriptor("expand_dims", axis=4), [x])


def test_clip_and_where():
    x = arr([-2.0, 0.5, 3.0])
    assert compute(OpDescriptor("clip", bounds=(-1, 1)), [x]).tolist() == [-1.0, 0.5, 1.0]
    cond = arr([1.0, 0.0, 1.0])
    out = compute(OpDescriptor("where"), [cond, x, arr(0.0)])
    assert out.tolist() == [-2.0, 0.0, 3.0]


def test_creation():
    assert compute(OpDescriptor("zeros", shape=(2, 2)), []).tolist() == [[0, 0], [0, 0]]
    assert compute(OpDescriptor("ones", shape=(3,), dtype="f32"), []).dtype == np.float32
    assert compute(OpDescriptor("full", shape=(), fill_value=7), []) == 7
    assert compute(OpDescriptor("arange", stop=4), []).tolist() == [0, 1, 2, 3]
    out = compute(OpDescriptor("from_values", values=(1, 2, 3, 4), shape=(2, 2)), [])
    assert out.tolist() == [[1, 2], [3, 4]]
    with pytest.raises(ShapeMismatch):
        compute(OpDescriptor("from_values", values=(1, 2, 3), shape=(2, 2)), [])
    with pytest.raises(InvalidArgument):
        compute(OpDescriptor("arange", stop=-1), [])


def test_wrong_operand_count():
    with pytest.raises(InvalidArgument):
        compute(OpDescriptor("add"), [arr(1.0)])


def test_injected_kernel_table():
    table = {"square": lambda op, x: x + 100}
    assert compute(OpDescriptor("square"), [arr(1.0)], table=table) == 101
    with pytest.raises(InvalidArgument):
        compute(OpDescriptor("exp"), [arr(1.0)], table=table)
