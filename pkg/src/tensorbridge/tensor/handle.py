"""tensor/handle.py

TensorHandle : façade chaînable au-dessus d'un tenseur natif.

    x.square().sum().sqrt()

La façade ne calcule rien : chaque méthode construit un OpDescriptor et le
confie au backend propriétaire du tenseur natif.
"""

from __future__ import annotations

import numbers
from typing import Optional, Sequence, Union

import numpy as np

from tensorbridge.backends.native import NativeTensor
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument
from tensorbridge.core.literal import format_value
from tensorbridge.core.types import BackendId, DType, Shape

Axes = Optional[Union[int, Sequence[int]]]
Operand = Union["TensorHandle", float, int]


def _is_scalar(value: object) -> bool:
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


class TensorHandle:
    """
    Référence vers un tenseur natif (aucune copie des éléments).

    Immuable : aucune opération ne modifie un handle existant, toutes renvoient
    un nouveau handle sur le même backend.
    """

    __slots__ = ("_raw",)

    # numpy doit déléguer aux opérateurs réfléchis (np.float64(2) * x)
    __array_ufunc__ = None

    def __init__(self, raw: NativeTensor) -> None:
        self._raw = raw

    # ---- Propriétés ----

    @property
    def raw(self) -> NativeTensor:
        return self._raw

    @property
    def backend(self) -> BackendId:
        return self._raw.backend_id

    @property
    def shape(self) -> Shape:
        return self._raw.shape

    @property
    def ndim(self) -> int:
        return self._raw.ndim

    @property
    def size(self) -> int:
        return self._raw.size

    @property
    def dtype(self) -> DType:
        return self._raw.dtype

    @property
    def T(self) -> "TensorHandle":
        return self.transpose()

    def __repr__(self) -> str:
        return f"TensorHandle({self._raw.backend.name}, {format_value(self._raw.data)})"

    # ---- Dispatch ----

    def apply(self, op: OpDescriptor, *others: "TensorHandle") -> "TensorHandle":
        """Exécute `op` avec ce handle comme premier opérande."""
        natives = [self._raw]
        for other in others:
            if not isinstance(other, TensorHandle):
                raise InvalidArgument(f"Opérande de '{op.kind}' non convertie en TensorHandle : {type(other).__name__}")
            natives.append(other._raw)
        return TensorHandle(self._raw.backend.run_kernel(op, natives))

    def _binary(self, kind: str, other: Operand, reflected: bool = False) -> "TensorHandle":
        if isinstance(other, TensorHandle):
            if reflected:
                return other.apply(OpDescriptor(kind), self)
            return self.apply(OpDescriptor(kind), other)
        if _is_scalar(other):
            return self.apply(OpDescriptor(kind, scalar=float(other), reflected=reflected))
        raise InvalidArgument(f"Opérande de '{kind}' non supportée : {type(other).__name__}")

    # ---- Unaires ----

    def square(self) -> "TensorHandle":
        return self.apply(OpDescriptor("square"))

    def sqrt(self) -> "TensorHandle":
        return self.apply(OpDescriptor("sqrt"))

    def exp(self) -> "TensorHandle":
        return self.apply(OpDescriptor("exp"))

    def log(self) -> "TensorHandle":
        return self.apply(OpDescriptor("log"))

    def abs(self) -> "TensorHandle":
        return self.apply(OpDescriptor("abs"))

    def neg(self) -> "TensorHandle":
        return self.apply(OpDescriptor("neg"))

    def sign(self) -> "TensorHandle":
        return self.apply(OpDescriptor("sign"))

    def reciprocal(self) -> "TensorHandle":
        return self.apply(OpDescriptor("reciprocal"))

    # ---- Binaires ----

    def add(self, other: Operand) -> "TensorHandle":
        return self._binary("add", other)

    def sub(self, other: Operand) -> "TensorHandle":
        return self._binary("sub", other)

    def mul(self, other: Operand) -> "TensorHandle":
        return self._binary("mul", other)

    def div(self, other: Operand) -> "TensorHandle":
        return self._binary("div", other)

    def pow(self, other: Operand) -> "TensorHandle":
        return self._binary("pow", other)

    def minimum(self, other: Operand) -> "TensorHandle":
        return self._binary("minimum", other)

    def maximum(self, other: Operand) -> "TensorHandle":
        return self._binary("maximum", other)

    # ---- Réductions ----

    def sum(self, axes: Axes = None, keepdims: bool = False) -> "TensorHandle":
        return self.apply(OpDescriptor("sum", axes=axes, keepdims=keepdims))

    def mean(self, axes: Axes = None, keepdims: bool = False) -> "TensorHandle":
        return self.apply(OpDescriptor("mean", axes=axes, keepdims=keepdims))

    def prod(self, axes: Axes = None, keepdims: bool = False) -> "TensorHandle":
        return self.apply(OpDescriptor("prod", axes=axes, keepdims=keepdims))

    def min(self, axes: Axes = None, keepdims: bool = False) -> "TensorHandle":
        return self.apply(OpDescriptor("min", axes=axes, keepdims=keepdims))

    def max(self, axes: Axes = None, keepdims: bool = False) -> "TensorHandle":
        return self.apply(OpDescriptor("max", axes=axes, keepdims=keepdims))

    def argmax(self, axis: int) -> "TensorHandle":
        return self.apply(OpDescriptor("argmax", axis=axis))

    def argmin(self, axis: int) -> "TensorHandle":
        return self.apply(OpDescriptor("argmin", axis=axis))

    # ---- Forme ----

    def reshape(self, *shape: Union[int, Sequence[int]]) -> "TensorHandle":
        """reshape(2, 3) ou reshape((2, 3)) ; un extent -1 est déduit."""
        if len(shape) == 1 and not isinstance(shape[0], numbers.Integral):
            shape = tuple(shape[0])
        return self.apply(OpDescriptor("reshape", shape=shape))

    def flatten(self) -> "TensorHandle":
        return self.apply(OpDescriptor("flatten"))

    def transpose(self) -> "TensorHandle":
        return self.apply(OpDescriptor("transpose"))

    def expand_dims(self, axis: int) -> "TensorHandle":
        return self.apply(OpDescriptor("expand_dims", axis=axis))

    def squeeze(self, axis: Optional[int] = None) -> "TensorHandle":
        return self.apply(OpDescriptor("squeeze", axis=axis))

    # ---- Divers ----

    def clip(self, lo: float, hi: float) -> "TensorHandle":
        return self.apply(OpDescriptor("clip", bounds=(lo, hi)))

    def where(self, a: "TensorHandle", b: "TensorHandle") -> "TensorHandle":
        """Ce handle sert de condition (non nul = vrai)."""
        return self.apply(OpDescriptor("where"), a, b)

    def norm(self) -> "TensorHandle":
        return self.square().sum().sqrt()

    # ---- Export ----

    def numpy(self) -> np.ndarray:
        """Copie modifiable des éléments."""
        self._raw.backend.ensure_concrete(self._raw)
        return np.array(self._raw.data, copy=True)

    def item(self) -> float:
        self._raw.backend.ensure_concrete(self._raw)
        if self.size != 1:
            raise InvalidArgument(f"item() attend un seul élément, forme {self.shape} reçue")
        return float(self._raw.data.reshape(-1)[0])

    # ---- Opérateurs ----

    def _operator(self, kind: str, other: object, reflected: bool = False):
        if not isinstance(other, TensorHandle) and not _is_scalar(other):
            return NotImplemented
        return self._binary(kind, other, reflected=reflected)

    def __add__(self, other):
        return self._operator("add", other)

    def __radd__(self, other):
        return self._operator("add", other, reflected=True)

    def __sub__(self, other):
        return self._operator("sub", other)

    def __rsub__(self, other):
        return self._operator("sub", other, reflected=True)

    def __mul__(self, other):
        return self._operator("mul", other)

    def __rmul__(self, other):
        return self._operator("mul", other, reflected=True)

    def __truediv__(self, other):
        return self._operator("div", other)

    def __rtruediv__(self, other):
        return self._operator("div", other, reflected=True)

    def __pow__(self, other):
        return self._operator("pow", other)

    def __rpow__(self, other):
        return self._operator("pow", other, reflected=True)

    def __neg__(self) -> "TensorHandle":
        return self.neg()

    def __abs__(self) -> "TensorHandle":
        return self.abs()

    def __iter__(self):
        raise TypeError("TensorHandle n'est pas itérable ; utiliser numpy()")

    def __bool__(self) -> bool:
        raise TypeError("Valeur de vérité d'un TensorHandle ambiguë ; utiliser item()")
