import numpy as np
import pytest

from tensorbridge.backends import get_backend
from tensorbridge.backends.builtin.imperative import imperative_backward, mark_requires_grad, read_grad, zero_grad
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import MixedBackends, NotScalarLoss


@pytest.fixture
def imp():
    return get_backend("imperative")


def sum_square(backend, x):
    return backend.run_kernel(OpDescriptor("sum"), [backend.run_kernel(OpDescriptor("square"), [x])])


def test_backward_populates_grad(imp):
    x = imp.from_array([1.0, 2.0, 3.0]).requires_grad_()
    assert x.grad is None
    sum_square(imp, x).backward()
    assert x.grad.data.tolist() == [2.0, 4.0, 6.0]
    assert x.grad.shape == x.shape


def test_grad_accumulates_until_zeroed(imp):
    x = mark_requires_grad(imp.from_array([1.0, 2.0]))
    imperative_backward(sum_square(imp, x))
    imperative_backward(sum_square(imp, x))
    assert read_grad(x).data.tolist() == [4.0, 8.0]
    zero_grad(x)
    assert read_grad(x) is None


def test_grad_view_is_read_only(imp):
    x = imp.from_array([1.0]).requires_grad_()
    sum_square(imp, x).backward()
    assert not x.grad.data.flags.writeable


def test_untracked_inputs_build_no_graph(imp):
    x = imp.from_array([1.0, 2.0])
    out = sum_square(imp, x)
    assert out.node.is_leaf
    assert not out.node.tracked


def test_shared_subexpression(imp):
    x = imp.from_array([3.0]).requires_grad_()
    y = imp.run_kernel(OpDescriptor("square"), [x])
    z = imp.run_kernel(OpDescriptor("mul"), [y, y])
    imp.run_kernel(OpDescriptor("sum"), [z]).backward()
    # d(x^4)/dx = 4x^3
    assert x.grad.data.tolist() == [108.0]


def test_non_scalar_loss(imp):
    x = imp.from_array([1.0, 2.0]).requires_grad_()
    with pytest.raises(NotScalarLoss):
        imp.run_kernel(OpDescriptor("square"), [x]).backward()


def test_detach_shares_buffer_and_cuts_graph(imp):
    x = imp.from_array([2.0]).requires_grad_()
    y = imp.run_kernel(OpDescriptor("square"), [x])
    d = y.detach()
    assert d.data is y.data
    assert d.node.is_leaf and not d.requires_grad


def test_argmax_is_a_constant(imp):
    x = imp.from_array([[1.0, 5.0]]).requires_grad_()
    idx = imp.run_kernel(OpDescriptor("argmax", axis=1), [x])
    assert not idx.node.tracked


def test_foreign_tensor_rejected(imp):
    with pytest.raises(MixedBackends):
        mark_requires_grad(get_backend("tape").from_array([1.0]))
    with pytest.raises(MixedBackends):
        imp.backward(get_backend("plain").from_array(1.0))


def test_deep_chain_does_not_recurse(imp):
    x = imp.from_array(1.0).requires_grad_()
    y = x
    for _ in range(3000):
        y = imp.run_kernel(OpDescriptor("mul", scalar=1.0), [y])
    y.backward()
    assert x.grad.data == np.float64(1.0)
