"""conformance/corpus.py

Corpus de fonctions différentiables pour la suite de gradients.

Pour chaque opération différentiable : sum(op(x, ...) * w) avec un poids w
fixe, afin que chaque élément de la sortie contribue différemment. Les
variantes "broadcast" différencient l'opérande qui est étendu. Le corpus
contient aussi des compositions (norme, log-sum-exp, ...).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Tuple

import numpy as np

from tensorbridge.conformance.generator import MASK, POSITIVE, UNIFORM, InputSpec, stable_id
from tensorbridge.conformance.prng import MASK64, SplitMix64, case_seed
from tensorbridge.core.descriptor import BINARY_KINDS, REDUCE_KINDS, UNARY_KINDS, OpDescriptor
from tensorbridge.core.types import DType, Shape
from tensorbridge.tensor import ops
from tensorbridge.tensor.handle import TensorHandle

GradFn = Callable[[TensorHandle], TensorHandle]

COMPOSITE = "composite"
_CORPUS_OFFSET = 1 << 32
_BASE_SHAPE: Shape = (2, 3)


@dataclass(frozen=True)
class GradientCase:
    name: str
    kind: str
    fn: GradFn = field(compare=False)
    x: InputSpec
    dtype: DType
    seed: int
    case_id: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.case_id:
            payload = {"gradient": self.name, "x": self.x.to_dict(), "dtype": self.dtype.value, "seed": self.seed}
            object.__setattr__(self, "case_id", stable_id(payload))

    def x_array(self) -> np.ndarray:
        return self.x.draw(SplitMix64(self.seed), self.dtype)


def _const(x: TensorHandle, array: np.ndarray) -> TensorHandle:
    return ops.from_values(x.raw.backend, array, dtype=x.dtype)


def weights(shape: Shape) -> np.ndarray:
    size = int(np.prod(shape)) if shape else 1
    if size <= 1:
        return np.full(shape, 0.75)
    return np.linspace(0.5, 1.5, size).reshape(shape)


def weighted_sum(y: TensorHandle) -> TensorHandle:
    return (y * _const(y, weights(y.shape))).sum()


def _draw(rng: SplitMix64, shape: Shape, domain: str = UNIFORM) -> np.ndarray:
    return InputSpec(shape, domain).draw(rng, DType.F64)


# ---------------------------------------------------------------------------
# Entrées du corpus : (nom, kind, fonction, forme de x, domaine de x)
# ---------------------------------------------------------------------------

Entry = Tuple[str, str, GradFn, Shape, str]


def _unary_entries() -> List[Entry]:
    entries = []
    for kind in UNARY_KINDS:
        domain = POSITIVE if kind in ("sqrt", "log") else UNIFORM
        entries.append((kind, kind, lambda x, k=kind: weighted_sum(getattr(x, k)()), _BASE_SHAPE, domain))
    return entries


def _binary_entries(rng: SplitMix64) -> List[Entry]:
    entries = []
    for kind in BINARY_KINDS:
        is_pow = kind == "pow"
        base = POSITIVE if is_pow else UNIFORM
        c_same = _draw(rng, _BASE_SHAPE)
        c_pos = _draw(rng, _BASE_SHAPE, POSITIVE if is_pow else UNIFORM)
        c_wide = _draw(rng, (2, 3))

        def call(a, b, k=kind):
            return getattr(a, k)(b)

        entries += [
            (f"{kind}/tensor", kind, lambda x, c=c_same, call=call: weighted_sum(call(x, _const(x, c))), _BASE_SHAPE, base),
            (f"{kind}/tensor-reflected", kind, lambda x, c=c_pos, call=call: weighted_sum(call(_const(x, c), x)), _BASE_SHAPE, UNIFORM),
            (f"{kind}/broadcast", kind, lambda x, c=c_wide, call=call: weighted_sum(call(x, _const(x, c))), (3,), base),
            (f"{kind}/scalar", kind, lambda x, call=call: weighted_sum(call(x, 1.5)), _BASE_SHAPE, base),
            (f"{kind}/scalar-reflected", kind, lambda x, k=kind: weighted_sum(x.apply(OpDescriptor(k, scalar=1.5, reflected=True))), _BASE_SHAPE, UNIFORM),
        ]
    return entries


def _reduce_entries() -> List[Entry]:
    entries = []
    for kind in REDUCE_KINDS:
        entries += [
            (f"{kind}/all", kind, lambda x, k=kind: getattr(x, k)() * 1.25, _BASE_SHAPE, UNIFORM),
            (f"{kind}/axes", kind, lambda x, k=kind: weighted_sum(getattr(x, k)(axes=1, keepdims=True)), _BASE_SHAPE, UNIFORM),
            (f"{kind}/axis0", kind, lambda x, k=kind: weighted_sum(getattr(x, k)(axes=0)), _BASE_SHAPE, UNIFORM),
        ]
    return entries


def _shape_entries(rng: SplitMix64) -> List[Entry]:
    cond = _draw(rng, _BASE_SHAPE, MASK)
    other = _draw(rng, _BASE_SHAPE)
    return [
        ("reshape", "reshape", lambda x: weighted_sum(x.reshape(3, 2)), _BASE_SHAPE, UNIFORM),
        ("reshape/inferred", "reshape", lambda x: weighted_sum(x.reshape(-1, 2)), _BASE_SHAPE, UNIFORM),
        ("flatten", "flatten", lambda x: weighted_sum(x.flatten()), _BASE_SHAPE, UNIFORM),
        ("transpose", "transpose", lambda x: weighted_sum(x.transpose()), _BASE_SHAPE, UNIFORM),
        ("expand_dims", "expand_dims", lambda x: weighted_sum(x.expand_dims(1)), _BASE_SHAPE, UNIFORM),
        ("squeeze", "squeeze", lambda x: weighted_sum(x.squeeze(1)), (2, 1, 3), UNIFORM),
        ("clip", "clip", lambda x: weighted_sum(x.clip(-1.0, 1.0)), _BASE_SHAPE, UNIFORM),
        ("where/branch-a", "where", lambda x: weighted_sum(_const(x, cond).where(x, _const(x, other))), _BASE_SHAPE, UNIFORM),
        ("where/branch-b", "where", lambda x: weighted_sum(_const(x, cond).where(_const(x, other), x)), _BASE_SHAPE, UNIFORM),
    ]


def _composite_entries() -> List[Entry]:
    return [
        ("sum-square", COMPOSITE, lambda x: x.square().sum(), (3,), UNIFORM),
        ("norm", "norm", lambda x: x.norm(), (3,), UNIFORM),
        ("mean-exp", COMPOSITE, lambda x: x.exp().mean(), _BASE_SHAPE, UNIFORM),
        ("logsumexp", COMPOSITE, lambda x: x.exp().sum().log(), _BASE_SHAPE, UNIFORM),
        ("rational", COMPOSITE, lambda x: (x * x / (x * x + 1)).sum(), _BASE_SHAPE, UNIFORM),
        ("softplus", COMPOSITE, lambda x: (x.exp() + 1).log().sum(), _BASE_SHAPE, UNIFORM),
        ("shared-subexpression", COMPOSITE, lambda x: (x.square() * x.square()).sum() + x.sum(), _BASE_SHAPE, UNIFORM),
        ("scaled-norm", COMPOSITE, lambda x: x.norm() * 3.0, (3,), UNIFORM),
    ]


def build_gradient_corpus(
    seed: int,
    dtype: DType = DType.F64,
    kinds: Optional[Iterable[str]] = None,
) -> List[GradientCase]:
    """
    Corpus déterministe. Avec `kinds`, seules les entrées de ces opérations
    sont gardées (les compositions exigent alors "composite" dans la liste).
    """
    dtype = DType.parse(dtype)
    const_rng = SplitMix64(~case_seed(seed, _CORPUS_OFFSET) & MASK64)
    entries: List[Entry] = (
        _unary_entries()
        + _binary_entries(const_rng)
        + _reduce_entries()
        + _shape_entries(const_rng)
        + _composite_entries()
    )
    wanted = set(kinds) if kinds is not None else None

    cases: List[GradientCase] = []
    for index, (name, kind, fn, shape, domain) in enumerate(entries):
        if wanted is not None and kind not in wanted:
            continue
        cases.append(
            GradientCase(
                name=name,
                kind=kind,
                fn=fn,
                x=InputSpec(shape, domain),
                dtype=dtype,
                seed=case_seed(seed, _CORPUS_OFFSET + index),
            )
        )
    return cases
