"""backends/vjp.py

Règles VJP partagées par les trois backends différentiables.

Une règle reçoit (op, entrées, sortie, cotangente de sortie) et renvoie une
cotangente par opérande tensoriel, de la forme de cet opérande : les
dimensions broadcastées sont sommées (unbroadcast).

Conventions aux points non lisses :
  - abs'(0) = 0, sign' = 0 partout
  - égalité min/max : la cotangente va au premier opérande (ou à la première
    occurrence, en ordre row-major, pour les réductions)
  - where : cotangente nulle pour la condition
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tensorbridge.backends.kernels import normalize_axes, reduced_count
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import NonDifferentiableOp
from tensorbridge.core.types import Shape

Cotangents = List[np.ndarray]
VjpRule = Callable[[OpDescriptor, Sequence[np.ndarray], np.ndarray, np.ndarray], Cotangents]
VjpTable = Dict[str, VjpRule]


def unbroadcast(grad: np.ndarray, shape: Shape) -> np.ndarray:
    """Somme `grad` sur les dimensions ajoutées ou étendues par le broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    stretched = tuple(i for i, dim in enumerate(shape) if dim == 1 and grad.shape[i] != 1)
    if stretched:
        grad = grad.sum(axis=stretched, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# Unaires
# ---------------------------------------------------------------------------

_UNARY_RULES: Dict[str, Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]] = {
    "square": lambda x, y, g: 2 * x * g,
    "sqrt": lambda x, y, g: g * 0.5 / y,
    "exp": lambda x, y, g: g * y,
    "log": lambda x, y, g: g / x,
    "abs": lambda x, y, g: g * np.sign(x),
    "neg": lambda x, y, g: -g,
    "sign": lambda x, y, g: np.zeros_like(x),
    "reciprocal": lambda x, y, g: -g * y * y,
}


def _unary_rule(op, inputs, output, cot):
    (x,) = inputs
    return [_UNARY_RULES[op.kind](x, output, cot)]


# ---------------------------------------------------------------------------
# Binaires (tenseur/tenseur et variantes scalaires)
# ---------------------------------------------------------------------------


def _safe_log(a: np.ndarray) -> np.ndarray:
    # d(a**b)/db en a == 0 : 0 par convention
    return np.where(a == 0, 0, np.log(np.where(a == 0, 1, a)))


def _binary_partials(kind: str, a: np.ndarray, b: np.ndarray, out: np.ndarray, g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if kind == "add":
        return g, g
    if kind == "sub":
        return g, -g
    if kind == "mul":
        return g * b, g * a
    if kind == "div":
        return g / b, -g * a / (b * b)
    if kind == "pow":
        return g * b * np.power(a, b - 1), g * out * _safe_log(a)
    if kind == "minimum":
        first = a <= b
        return g * first, g * ~first
    if kind == "maximum":
        first = a >= b
        return g * first, g * ~first
    raise NonDifferentiableOp(f"Aucune règle VJP binaire pour '{kind}'")


def _binary_rule(op, inputs, output, cot):
    if op.scalar is not None:
        (x,) = inputs
        s = np.asarray(op.scalar, dtype=x.dtype)
        if op.reflected:
            _, gx = _binary_partials(op.kind, s, x, output, cot)
        else:
            gx, _ = _binary_partials(op.kind, x, s, output, cot)
        return [unbroadcast(np.broadcast_to(gx, output.shape), x.shape)]

    a, b = inputs
    ga, gb = _binary_partials(op.kind, a, b, output, cot)
    return [
        unbroadcast(np.broadcast_to(ga, output.shape), a.shape),
        unbroadcast(np.broadcast_to(gb, output.shape), b.shape),
    ]


# ---------------------------------------------------------------------------
# Réductions
# ---------------------------------------------------------------------------


def _expand_to_input(cot: np.ndarray, x: np.ndarray, axes: Tuple[int, ...], keepdims: bool) -> np.ndarray:
    if not keepdims and axes:
        cot = np.expand_dims(cot, axes)
    return np.broadcast_to(cot, x.shape)


def _first_hit_mask(x: np.ndarray, out_kept: np.ndarray, axes: Tuple[int, ...]) -> np.ndarray:
    """Masque 0/1 marquant, pour chaque sortie, la première position (row-major) atteignant l'extremum."""
    kept = [i for i in range(x.ndim) if i not in axes]
    perm = kept + list(axes)
    xt = np.transpose(x, perm)
    hits = np.transpose(x == out_kept, perm)
    lead = xt.shape[: len(kept)]
    flat = hits.reshape(lead + (-1,))
    first = np.argmax(flat, axis=-1)
    onehot = np.zeros(flat.shape, dtype=x.dtype)
    np.put_along_axis(onehot, first[..., None], 1, axis=-1)
    return np.transpose(onehot.reshape(xt.shape), np.argsort(perm))


def _exclusive_products(x: np.ndarray, axes: Tuple[int, ...]) -> np.ndarray:
    """Produit de tous les autres éléments du groupe réduit (robuste aux zéros)."""
    kept = [i for i in range(x.ndim) if i not in axes]
    perm = kept + list(axes)
    xt = np.transpose(x, perm)
    lead = xt.shape[: len(kept)]
    flat = xt.reshape(lead + (-1,))
    ones = np.ones(lead + (1,), dtype=x.dtype)
    left = np.cumprod(np.concatenate([ones, flat[..., :-1]], axis=-1), axis=-1)
    right = np.flip(np.cumprod(np.concatenate([ones, np.flip(flat, axis=-1)[..., :-1]], axis=-1), axis=-1), axis=-1)
    return np.transpose((left * right).reshape(xt.shape), np.argsort(perm))


def _reduce_rule(op, inputs, output, cot):
    (x,) = inputs
    axes = normalize_axes(op.axes, x.ndim)
    g = _expand_to_input(cot, x, axes, op.keepdims)

    if op.kind == "sum":
        return [g]
    if op.kind == "mean":
        return [g / x.dtype.type(max(reduced_count(x.shape, axes), 1))]
    if op.kind == "prod":
        if x.size == 0:
            return [np.zeros_like(x)]
        return [g * _exclusive_products(x, axes)]
    if op.kind in ("min", "max"):
        out_kept = _expand_to_input(output, x, axes, op.keepdims)
        return [g * _first_hit_mask(x, out_kept, axes)]
    raise NonDifferentiableOp(f"Aucune règle VJP de réduction pour '{op.kind}'")


# ---------------------------------------------------------------------------
# Forme et divers
# ---------------------------------------------------------------------------


def _reshape_rule(op, inputs, output, cot):
    (x,) = inputs
    return [np.reshape(cot, x.shape)]


def _transpose_rule(op, inputs, output, cot):
    return [np.transpose(cot)]


def _clip_rule(op, inputs, output, cot):
    (x,) = inputs
    lo, hi = op.bounds
    inside = (x >= x.dtype.type(lo)) & (x <= x.dtype.type(hi))
    return [cot * inside]


def _where_rule(op, inputs, output, cot):
    cond, a, b = inputs
    take_a = np.broadcast_to(cond != 0, output.shape)
    return [
        np.zeros_like(cond),
        unbroadcast(cot * take_a, a.shape),
        unbroadcast(cot * ~take_a, b.shape),
    ]


VJP_RULES: VjpTable = {
    **{kind: _unary_rule for kind in _UNARY_RULES},
    **{kind: _binary_rule for kind in ("add", "sub", "mul", "div", "pow", "minimum", "maximum")},
    **{kind: _reduce_rule for kind in ("sum", "mean", "prod", "min", "max")},
    "reshape": _reshape_rule,
    "flatten": _reshape_rule,
    "expand_dims": _reshape_rule,
    "squeeze": _reshape_rule,
    "transpose": _transpose_rule,
    "clip": _clip_rule,
    "where": _where_rule,
}


def vjp(
    op: OpDescriptor,
    inputs: Sequence[np.ndarray],
    output: np.ndarray,
    cotangent: np.ndarray,
    rules: Optional[VjpTable] = None,
) -> Cotangents:
    """
    Applique la règle VJP de `op` : une cotangente par entrée, au dtype de l'entrée.

    Lève NonDifferentiableOp si l'opération n'a pas de règle (argmax, créations...).
    """
    rules = VJP_RULES if rules is None else rules
    rule = rules.get(op.kind)
    if rule is None:
        raise NonDifferentiableOp(f"L'opération '{op.kind}' n'est pas différentiable")

    with np.errstate(all="ignore"):
        grads = rule(op, inputs, output, cotangent)

    return [np.asarray(g, dtype=x.dtype) for g, x in zip(grads, inputs)]
