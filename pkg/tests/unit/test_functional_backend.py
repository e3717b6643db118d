import numpy as np
import pytest

from tensorbridge.backends import get_backend
from tensorbridge.backends.builtin.functional import functional_grad
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, MixedBackends, NonScalarOutput, UntraceableOp
from tensorbridge.tensor import astensor


@pytest.fixture
def fn():
    return get_backend("functional")


def square_sum(backend, x):
    return backend.run_kernel(OpDescriptor("sum"), [backend.run_kernel(OpDescriptor("square"), [x])])


def test_value_and_grad(fn):
    x = fn.from_array([1.0, 2.0, 3.0])
    value, grad = fn.value_and_grad(lambda t: square_sum(fn, t))(x)
    assert value.data == 14.0
    assert grad.data.tolist() == [2.0, 4.0, 6.0]
    assert value.trace_id is None and grad.trace_id is None


def test_grad_second_argument(fn):
    a = fn.from_array([2.0])
    b = fn.from_array([5.0])

    def f(u, v):
        return fn.run_kernel(OpDescriptor("sum"), [fn.run_kernel(OpDescriptor("mul"), [u, v])])

    assert fn.grad(f, argnum=1)(a, b).data.tolist() == [2.0]
    assert functional_grad(f, argnum=0)(a, b).data.tolist() == [5.0]


def test_has_aux(fn):
    x = fn.from_array([1.0, 2.0])

    def f(t):
        sq = fn.run_kernel(OpDescriptor("square"), [t])
        return fn.run_kernel(OpDescriptor("sum"), [sq]), sq

    value, aux, grad = fn.value_and_grad(f, has_aux=True)(x)
    assert aux.data.tolist() == [1.0, 4.0]
    assert aux.trace_id is None
    assert grad.data.tolist() == [2.0, 4.0]


def test_bad_aux_shape(fn):
    x = fn.from_array([1.0])
    with pytest.raises(UntraceableOp):
        fn.value_and_grad(lambda t: square_sum(fn, t), has_aux=True)(x)


def test_constant_output_gives_zero_grad(fn):
    x = fn.from_array([1.0, 2.0])
    c = fn.from_array(3.0)
    value, grad = fn.value_and_grad(lambda t: c)(x)
    assert value.data == 3.0
    assert grad.data.tolist() == [0.0, 0.0]


def test_non_scalar_output(fn):
    x = fn.from_array([1.0, 2.0])
    with pytest.raises(NonScalarOutput):
        fn.value_and_grad(lambda t: fn.run_kernel(OpDescriptor("square"), [t]))(x)


def test_non_tensor_output(fn):
    with pytest.raises(UntraceableOp):
        fn.value_and_grad(lambda t: 1.0)(fn.from_array([1.0]))


def test_reading_traced_values_is_refused(fn):
    def f(t):
        astensor(t).numpy()
        return square_sum(fn, t)

    with pytest.raises(UntraceableOp):
        fn.value_and_grad(f)(fn.from_array([1.0]))


def test_trace_and_evaluate(fn):
    x = fn.from_array([1.0, 2.0])
    out, expr = fn.trace(lambda t: square_sum(fn, t), x)
    assert out.data == 5.0
    assert fn.evaluate_trace(expr, [np.array([3.0, 4.0])]) == 25.0


def test_retrace_on_every_call(fn):
    calls = []

    def f(t):
        calls.append(1)
        return square_sum(fn, t)

    vg = fn.value_and_grad(f)
    vg(fn.from_array([1.0]))
    vg(fn.from_array([2.0]))
    assert len(calls) == 2


def test_argument_validation(fn):
    with pytest.raises(InvalidArgument):
        fn.value_and_grad(lambda t: t, argnum=2)(fn.from_array(1.0))
    with pytest.raises(MixedBackends):
        fn.value_and_grad(lambda t: t)(get_backend("tape").from_array(1.0))
