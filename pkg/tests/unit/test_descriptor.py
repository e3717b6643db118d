import pytest

from tensorbridge.core.descriptor import OP_TABLE, OpDescriptor, get_op_spec, list_op_specs
from tensorbridge.core.errors import InvalidArgument
from tensorbridge.core.types import DType


def test_op_table_contents():
    kinds = [spec.kind for spec in list_op_specs()]
    assert kinds[:3] == ["square", "sqrt", "exp"]
    assert "norm" in kinds
    assert len(kinds) == len(set(kinds)) == len(OP_TABLE)


def test_argreduce_and_creation_are_not_differentiable():
    assert get_op_spec("argmax").differentiable is False
    assert get_op_spec("zeros").differentiable is False
    assert get_op_spec("where").differentiable is True


def test_unknown_op():
    with pytest.raises(InvalidArgument):
        OpDescriptor("matmul")


def test_param_present_iff_accepted():
    with pytest.raises(InvalidArgument):
        OpDescriptor("square", axes=(0,))
    with pytest.raises(InvalidArgument):
        OpDescriptor("sum", bounds=(0, 1))
    with pytest.raises(InvalidArgument):
        OpDescriptor("clip")
    with pytest.raises(InvalidArgument):
        OpDescriptor("argmax")


def test_reflected_requires_scalar():
    with pytest.raises(InvalidArgument):
        OpDescriptor("sub", reflected=True)
    op = OpDescriptor("sub", scalar=2, reflected=True)
    assert op.scalar == 2.0
    assert op.n_inputs == 1


def test_normalisation_makes_descriptor_hashable():
    op = OpDescriptor("sum", axes=[1, 0], keepdims=True)
    assert op.axes == (1, 0)
    assert hash(op) == hash(OpDescriptor("sum", axes=(1, 0), keepdims=True))
    assert OpDescriptor("sum", axes=1).axes == (1,)


def test_n_inputs():
    assert OpDescriptor("add").n_inputs == 2
    assert OpDescriptor("where").n_inputs == 3
    assert OpDescriptor("zeros", shape=(2,)).n_inputs == 0


def test_to_dict():
    op = OpDescriptor("full", shape=[2, 2], fill_value=3, dtype="f32")
    assert op.to_dict() == {"kind": "full", "shape": [2, 2], "fill_value": 3.0, "dtype": "f32"}
    assert op.dtype is DType.F32
    assert OpDescriptor("sum").to_dict() == {"kind": "sum"}
