"""
tensorbridge.
API de tenseurs eager unique au-dessus de quatre backends interchangeables
(plain, imperative, tape, functional), plus un harnais de conformité.
"""

from tensorbridge.__version__ import __version__
from tensorbridge.autodiff import value_and_grad, value_and_grad_fn, value_aux_and_grad
from tensorbridge.backends import get_backend, get_builtin_backends, native_allocations
from tensorbridge.core.descriptor import OpDescriptor, list_op_specs
from tensorbridge.core.errors import TensorBridgeError
from tensorbridge.core.types import BackendId, DType
from tensorbridge.tensor import RestoreFn, TensorHandle, astensor, astensor_, astensors, astensors_, raw
from tensorbridge.tensor.ops import (
    abs,
    add,
    apply,
    arange,
    argmax,
    argmin,
    clip,
    div,
    exp,
    expand_dims,
    flatten,
    from_values,
    full,
    log,
    max,
    maximum,
    mean,
    min,
    minimum,
    mul,
    neg,
    norm,
    ones,
    pow,
    prod,
    reciprocal,
    reshape,
    sign,
    sqrt,
    square,
    squeeze,
    sub,
    sum,
    transpose,
    where,
    zeros,
)

__all__ = [
    "__version__",
    "BackendId",
    "DType",
    "OpDescriptor",
    "RestoreFn",
    "TensorBridgeError",
    "TensorHandle",
    "abs",
    "add",
    "apply",
    "arange",
    "argmax",
    "argmin",
    "astensor",
    "astensor_",
    "astensors",
    "astensors_",
    "clip",
    "div",
    "exp",
    "expand_dims",
    "flatten",
    "from_values",
    "full",
    "get_backend",
    "get_builtin_backends",
    "list_op_specs",
    "log",
    "max",
    "maximum",
    "mean",
    "min",
    "minimum",
    "mul",
    "native_allocations",
    "neg",
    "norm",
    "ones",
    "pow",
    "prod",
    "raw",
    "reciprocal",
    "reshape",
    "sign",
    "sqrt",
    "square",
    "squeeze",
    "sub",
    "sum",
    "transpose",
    "value_and_grad",
    "value_and_grad_fn",
    "value_aux_and_grad",
    "where",
    "zeros",
]
