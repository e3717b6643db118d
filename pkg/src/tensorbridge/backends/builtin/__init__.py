from tensorbridge.backends.builtin.functional import FunctionalBackend, FunctionalTensor, TraceExpr
from tensorbridge.backends.builtin.imperative import GradNode, ImperativeBackend, ImperativeTensor
from tensorbridge.backends.builtin.plain import PlainBackend, PlainTensor
from tensorbridge.backends.builtin.tape import GradientTape, TapeBackend, TapeTensor

__all__ = [
    "FunctionalBackend",
    "FunctionalTensor",
    "GradNode",
    "GradientTape",
    "ImperativeBackend",
    "ImperativeTensor",
    "PlainBackend",
    "PlainTensor",
    "TapeBackend",
    "TapeTensor",
    "TraceExpr",
]
