"""backends/kernels.py

Table des kernels partagée par les quatre backends.

Un kernel reçoit le descripteur et les buffers numpy d'entrée, et renvoie un
nouveau buffer. Les violations de domaine (sqrt(-1), 1/0) suivent IEEE-754 :
aucune exception, uniquement NaN/±inf.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import EmptyReduction, InvalidArgument, InvalidAxis, ShapeMismatch
from tensorbridge.core.types import DType, Shape

Kernel = Callable[..., np.ndarray]
KernelTable = Dict[str, Kernel]


# ---------------------------------------------------------------------------
# Helpers de forme
# ---------------------------------------------------------------------------


def broadcast_shape(*shapes: Shape) -> Shape:
    """
    Forme résultante du broadcasting NumPy (alignement sur les dimensions de fin,
    extents égaux ou égaux à 1). Lève ShapeMismatch sinon.
    """
    ndim = max((len(s) for s in shapes), default=0)
    result = []
    for pos in range(ndim):
        extent = 1
        for shape in shapes:
            idx = len(shape) - ndim + pos
            if idx < 0:
                continue
            dim = shape[idx]
            if dim == 1:
                continue
            if extent != 1 and dim != extent:
                raise ShapeMismatch(f"Formes non broadcastables : {' / '.join(str(tuple(s)) for s in shapes)}")
            extent = dim
        result.append(extent)
    return tuple(result)


def normalize_axes(axes: Optional[Tuple[int, ...]], ndim: int) -> Tuple[int, ...]:
    """Axes de réduction validés : chacun dans [0, ndim), sans doublon. None = tous."""
    if axes is None:
        return tuple(range(ndim))
    for axis in axes:
        if not 0 <= axis < ndim:
            raise InvalidAxis(f"Axe {axis} hors limites pour un tenseur de rang {ndim}")
    if len(set(axes)) != len(axes):
        raise InvalidAxis(f"Axes dupliqués : {list(axes)}")
    return tuple(sorted(axes))


def _check_axis(axis: int, upper: int, ndim: int) -> None:
    if not 0 <= axis < upper:
        raise InvalidAxis(f"Axe {axis} hors limites pour un tenseur de rang {ndim}")


def reduced_count(shape: Shape, axes: Tuple[int, ...]) -> int:
    return math.prod(shape[a] for a in axes)


def _check_shape(shape: Shape) -> Shape:
    if any(d < 0 for d in shape):
        raise InvalidArgument(f"Extents négatifs interdits : {shape}")
    return shape


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------


def _unary(fn: Callable[[np.ndarray], np.ndarray]) -> Kernel:
    def kernel(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
        return fn(x)

    return kernel


def _binary(fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Kernel:
    def kernel(op: OpDescriptor, a: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
        if op.scalar is not None:
            s = np.asarray(op.scalar, dtype=a.dtype)
            return fn(s, a) if op.reflected else fn(a, s)
        broadcast_shape(a.shape, b.shape)
        return fn(a, b)

    return kernel


def _reduce(fn: Callable[..., np.ndarray], needs_elements: bool = False) -> Kernel:
    def kernel(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
        axes = normalize_axes(op.axes, x.ndim)
        if needs_elements and reduced_count(x.shape, axes) == 0:
            raise EmptyReduction(f"'{op.kind}' sur zéro élément (forme {x.shape}, axes {list(axes)})")
        return fn(x, axis=axes, keepdims=op.keepdims)

    return kernel


def _mean(x: np.ndarray, axis: Tuple[int, ...], keepdims: bool) -> np.ndarray:
    # somme / effectif : 0/0 donne NaN sans avertissement numpy
    total = np.sum(x, axis=axis, keepdims=keepdims)
    return total / x.dtype.type(reduced_count(x.shape, axis))


def _argreduce(fn: Callable[..., np.ndarray]) -> Kernel:
    def kernel(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
        _check_axis(op.axis, x.ndim, x.ndim)
        if x.shape[op.axis] == 0:
            raise EmptyReduction(f"'{op.kind}' sur un axe vide (forme {x.shape}, axe {op.axis})")
        # numpy renvoie la première occurrence en cas d'égalité
        return fn(x, axis=op.axis).astype(x.dtype)

    return kernel


def _reshape(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
    target = list(op.shape)
    if target.count(-1) > 1 or any(d < -1 for d in target):
        raise ShapeMismatch(f"Forme cible invalide : {tuple(target)}")
    if -1 in target:
        known = math.prod(d for d in target if d != -1)
        if known == 0 or x.size % known != 0:
            raise ShapeMismatch(f"Impossible de déduire -1 pour {x.shape} -> {tuple(target)}")
        target[target.index(-1)] = x.size // known
    if math.prod(target) != x.size:
        raise ShapeMismatch(f"reshape {x.shape} -> {tuple(target)} : nombre d'éléments différent")
    return x.reshape(target)


def _transpose(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
    if x.ndim != 2:
        raise ShapeMismatch(f"transpose attend un tenseur de rang 2, rang {x.ndim} reçu")
    return x.T


def _expand_dims(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
    _check_axis(op.axis, x.ndim + 1, x.ndim)
    return np.expand_dims(x, op.axis)


def _squeeze(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
    if op.axis is None:
        return np.squeeze(x)
    _check_axis(op.axis, x.ndim, x.ndim)
    if x.shape[op.axis] != 1:
        raise ShapeMismatch(f"squeeze : l'axe {op.axis} a un extent {x.shape[op.axis]} (1 attendu)")
    return np.squeeze(x, axis=op.axis)


def _clip(op: OpDescriptor, x: np.ndarray) -> np.ndarray:
    lo, hi = op.bounds
    return np.clip(x, x.dtype.type(lo), x.dtype.type(hi))


def _where(op: OpDescriptor, cond: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    broadcast_shape(cond.shape, a.shape, b.shape)
    return np.where(cond != 0, a, b)


def _creation_dtype(op: OpDescriptor) -> np.dtype:
    return (op.dtype or DType.F64).numpy


def _zeros(op: OpDescriptor) -> np.ndarray:
    return np.zeros(_check_shape(op.shape), dtype=_creation_dtype(op))


def _ones(op: OpDescriptor) -> np.ndarray:
    return np.ones(_check_shape(op.shape), dtype=_creation_dtype(op))


def _full(op: OpDescriptor) -> np.ndarray:
    return np.full(_check_shape(op.shape), op.fill_value, dtype=_creation_dtype(op))


def _arange(op: OpDescriptor) -> np.ndarray:
    if op.stop < 0:
        raise InvalidArgument(f"arange(n) attend n >= 0, reçu {op.stop}")
    return np.arange(op.stop, dtype=_creation_dtype(op))


def _from_values(op: OpDescriptor) -> np.ndarray:
    shape = _check_shape(op.shape)
    if math.prod(shape) != len(op.values):
        raise ShapeMismatch(f"{len(op.values)} valeurs pour une forme {shape}")
    return np.array(op.values, dtype=_creation_dtype(op)).reshape(shape)


KERNELS: KernelTable = {
    "square": _unary(np.square),
    "sqrt": _unary(np.sqrt),
    "exp": _unary(np.exp),
    "log": _unary(np.log),
    "abs": _unary(np.abs),
    "neg": _unary(np.negative),
    "sign": _unary(np.sign),
    "reciprocal": _unary(np.reciprocal),
    "add": _binary(np.add),
    "sub": _binary(np.subtract),
    "mul": _binary(np.multiply),
    "div": _binary(np.true_divide),
    "pow": _binary(np.power),
    "minimum": _binary(np.minimum),
    "maximum": _binary(np.maximum),
    "sum": _reduce(np.sum),
    "mean": _reduce(_mean),
    "prod": _reduce(np.prod),
    "min": _reduce(np.min, needs_elements=True),
    "max": _reduce(np.max, needs_elements=True),
    "argmax": _argreduce(np.argmax),
    "argmin": _argreduce(np.argmin),
    "reshape": _reshape,
    "flatten": lambda op, x: x.reshape(x.size),
    "transpose": _transpose,
    "expand_dims": _expand_dims,
    "squeeze": _squeeze,
    "clip": _clip,
    "where": _where,
    "zeros": _zeros,
    "ones": _ones,
    "full": _full,
    "arange": _arange,
    "from_values": _from_values,
}


def compute(op: OpDescriptor, arrays: Sequence[np.ndarray], table: Optional[KernelTable] = None) -> np.ndarray:
    """
    Exécute le kernel de `op` sur des buffers numpy.

    Retour : buffer C-contigu en lecture seule, du dtype des entrées (ou du
    dtype demandé pour les créations), jamais l'un des buffers d'entrée.
    """
    table = KERNELS if table is None else table
    if len(arrays) != op.n_inputs:
        raise InvalidArgument(f"'{op.kind}' attend {op.n_inputs} opérande(s), {len(arrays)} reçu(s)")
    kernel = table.get(op.kind)
    if kernel is None:
        raise InvalidArgument(f"Aucun kernel pour l'opération '{op.kind}'")

    with np.errstate(all="ignore"):
        result = kernel(op, *arrays)

    dtype = arrays[-1].dtype if arrays else _creation_dtype(op)
    out = np.asarray(result, dtype=dtype)
    if not out.flags.c_contiguous:
        out = out.copy(order="C")
    if any(out is a for a in arrays):
        out = out.view()
    out.flags.writeable = False
    return out
