"""tensor/ops.py

Forme fonctionnelle de la table des opérations : chaque fonction libre
délègue à la méthode homonyme de TensorHandle, les fonctions de création
prennent un backend (identifiant, nom ou instance).

    import tensorbridge as tb
    tb.sqrt(tb.sum(tb.square(x)))  ==  x.square().sum().sqrt()
"""

from __future__ import annotations

from typing import Any, Optional, Sequence, Union

import numpy as np

from tensorbridge.backends.loader import BackendLike, get_backend
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, ShapeMismatch
from tensorbridge.core.types import DType, normalize_shape
from tensorbridge.tensor.handle import Axes, Operand, TensorHandle

# ---- Unaires ----


def square(x: TensorHandle) -> TensorHandle:
    return x.square()


def sqrt(x: TensorHandle) -> TensorHandle:
    return x.sqrt()


def exp(x: TensorHandle) -> TensorHandle:
    return x.exp()


def log(x: TensorHandle) -> TensorHandle:
    return x.log()


def abs(x: TensorHandle) -> TensorHandle:
    return x.abs()


def neg(x: TensorHandle) -> TensorHandle:
    return x.neg()


def sign(x: TensorHandle) -> TensorHandle:
    return x.sign()


def reciprocal(x: TensorHandle) -> TensorHandle:
    return x.reciprocal()


# ---- Binaires ----


def add(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.add(b)


def sub(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.sub(b)


def mul(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.mul(b)


def div(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.div(b)


def pow(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.pow(b)


def minimum(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.minimum(b)


def maximum(a: TensorHandle, b: Operand) -> TensorHandle:
    return a.maximum(b)


# ---- Réductions ----


def sum(x: TensorHandle, axes: Axes = None, keepdims: bool = False) -> TensorHandle:
    return x.sum(axes=axes, keepdims=keepdims)


def mean(x: TensorHandle, axes: Axes = None, keepdims: bool = False) -> TensorHandle:
    return x.mean(axes=axes, keepdims=keepdims)


def prod(x: TensorHandle, axes: Axes = None, keepdims: bool = False) -> TensorHandle:
    return x.prod(axes=axes, keepdims=keepdims)


def min(x: TensorHandle, axes: Axes = None, keepdims: bool = False) -> TensorHandle:
    return x.min(axes=axes, keepdims=keepdims)


def max(x: TensorHandle, axes: Axes = None, keepdims: bool = False) -> TensorHandle:
    return x.max(axes=axes, keepdims=keepdims)


def argmax(x: TensorHandle, axis: int) -> TensorHandle:
    return x.argmax(axis)


def argmin(x: TensorHandle, axis: int) -> TensorHandle:
    return x.argmin(axis)


# ---- Forme ----


def reshape(x: TensorHandle, shape: Sequence[int]) -> TensorHandle:
    return x.reshape(tuple(shape))


def flatten(x: TensorHandle) -> TensorHandle:
    return x.flatten()


def transpose(x: TensorHandle) -> TensorHandle:
    return x.transpose()


def expand_dims(x: TensorHandle, axis: int) -> TensorHandle:
    return x.expand_dims(axis)


def squeeze(x: TensorHandle, axis: Optional[int] = None) -> TensorHandle:
    return x.squeeze(axis)


# ---- Divers ----


def clip(x: TensorHandle, lo: float, hi: float) -> TensorHandle:
    return x.clip(lo, hi)


def where(cond: TensorHandle, a: TensorHandle, b: TensorHandle) -> TensorHandle:
    return cond.where(a, b)


def norm(x: TensorHandle) -> TensorHandle:
    """Norme L2 : x.square().sum().sqrt()."""
    return x.norm()


# ---- Création ----


def _create(backend: BackendLike, op: OpDescriptor) -> TensorHandle:
    return TensorHandle(get_backend(backend).run_kernel(op, []))


def zeros(backend: BackendLike, shape: Union[int, Sequence[int]], dtype: DType = DType.F64) -> TensorHandle:
    return _create(backend, OpDescriptor("zeros", shape=normalize_shape(shape), dtype=dtype))


def ones(backend: BackendLike, shape: Union[int, Sequence[int]], dtype: DType = DType.F64) -> TensorHandle:
    return _create(backend, OpDescriptor("ones", shape=normalize_shape(shape), dtype=dtype))


def full(backend: BackendLike, shape: Union[int, Sequence[int]], value: float, dtype: DType = DType.F64) -> TensorHandle:
    return _create(backend, OpDescriptor("full", shape=normalize_shape(shape), fill_value=value, dtype=dtype))


def arange(backend: BackendLike, n: int, dtype: DType = DType.F64) -> TensorHandle:
    return _create(backend, OpDescriptor("arange", stop=int(n), dtype=dtype))


def from_values(backend: BackendLike, values: Any, dtype: Optional[DType] = None) -> TensorHandle:
    """
    Tenseur à partir de listes imbriquées (ou d'un ndarray).

    Sans dtype explicite : f32 pour un ndarray float32, f64 sinon.
    """
    try:
        array = np.asarray(values, dtype=np.float32 if dtype is None and _is_f32(values) else np.float64)
    except (TypeError, ValueError) as exc:
        raise ShapeMismatch(f"Valeurs irrégulières ou non numériques : {exc}") from exc
    if dtype is None:
        dtype = DType.of(array)
    return _create(
        backend,
        OpDescriptor("from_values", values=tuple(array.reshape(-1).tolist()), shape=array.shape, dtype=dtype),
    )


def _is_f32(values: Any) -> bool:
    return isinstance(values, np.ndarray) and values.dtype == np.float32


# ---- Dispatch générique ----


def apply(op: OpDescriptor, *operands: TensorHandle, backend: Optional[BackendLike] = None) -> TensorHandle:
    """
    Exécute n'importe quel descripteur à travers la façade.

    Les créations exigent `backend` ; les autres opérations prennent le backend
    du premier opérande.
    """
    if op.category == "creation":
        if backend is None:
            raise InvalidArgument(f"'{op.kind}' : backend requis pour une opération de création")
        return _create(backend, op)
    if not operands or not isinstance(operands[0], TensorHandle):
        raise InvalidArgument(f"'{op.kind}' attend au moins un TensorHandle")
    if op.category == "derived":
        return operands[0].norm()
    return operands[0].apply(op, *operands[1:])
