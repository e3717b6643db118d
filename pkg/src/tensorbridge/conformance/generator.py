"""conformance/generator.py

Génération déterministe des cas de conformité.

Pour chaque opération de la table et chaque rang du budget, `cases_per_rank`
cas sont produits ; le cas numéro i utilise la graine (seed XOR i). Les
paramètres (formes, axes, scalaires) et les valeurs d'entrée sont tirés de
deux flux splitmix64 distincts dérivés de cette graine, si bien qu'un cas se
régénère seul, sans rejouer les précédents.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from tensorbridge.conformance.prng import MASK64, SplitMix64, case_seed
from tensorbridge.core.descriptor import OpDescriptor, OpSpec, get_op_spec, list_op_specs
from tensorbridge.core.logger import get_logger
from tensorbridge.core.types import DType, Shape

logger = get_logger(__name__)

UNIFORM = "uniform"
POSITIVE = "positive"
MASK = "mask"
FIXED = "fixed"

SMOOTH_MIN_ABS = 0.1


def stable_id(payload: Dict) -> str:
    """16 premiers caractères hexadécimaux du sha256 du JSON canonique."""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class ShapeBudget:
    max_rank: int = 3
    max_extent: int = 8
    min_rank: int = 0

    def ranks(self) -> range:
        return range(self.min_rank, self.max_rank + 1)


@dataclass(frozen=True)
class InputSpec:
    """
    Description d'une entrée : forme + domaine de tirage.

    - uniform  : [-2, 2), écarté de 0 (|x| >= 0.1)
    - positive : |uniform|, donc [0.1, 2)
    - mask     : 0.0 / 1.0 (condition de where)
    - fixed    : `values` littérales (cas limites)
    """

    shape: Shape
    domain: str = UNIFORM
    values: Optional[Tuple[float, ...]] = None

    def draw(self, rng: SplitMix64, dtype: DType) -> np.ndarray:
        if self.domain == FIXED:
            return np.array(self.values, dtype=dtype.numpy).reshape(self.shape)
        raw = rng.array(self.shape, DType.F64, min_abs=SMOOTH_MIN_ABS)
        if self.domain == POSITIVE:
            raw = np.abs(raw)
        elif self.domain == MASK:
            raw = (raw > 0).astype(np.float64)
        return raw.astype(dtype.numpy)

    def to_dict(self) -> Dict:
        out: Dict = {"shape": list(self.shape), "domain": self.domain}
        if self.values is not None:
            out["values"] = list(self.values)
        return out


@dataclass(frozen=True)
class ConformanceCase:
    op: OpDescriptor
    inputs: Tuple[InputSpec, ...]
    dtype: DType
    seed: int
    label: str = ""
    case_id: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if not self.case_id:
            payload = {
                "op": self.op.to_dict(),
                "inputs": [spec.to_dict() for spec in self.inputs],
                "dtype": self.dtype.value,
                "seed": self.seed,
            }
            object.__setattr__(self, "case_id", stable_id(payload))

    @property
    def kind(self) -> str:
        return self.op.kind

    def arrays(self) -> List[np.ndarray]:
        """Entrées concrètes, identiques bit pour bit à chaque appel."""
        rng = SplitMix64(self.seed)
        return [spec.draw(rng, self.dtype) for spec in self.inputs]


# ---------------------------------------------------------------------------
# Construction des cas par catégorie
# ---------------------------------------------------------------------------

Built = Tuple[OpDescriptor, Tuple[InputSpec, ...]]
Builder = Callable[[OpSpec, Shape, int, SplitMix64, DType], Built]


def _random_shape(rank: int, rng: SplitMix64, budget: ShapeBudget) -> Shape:
    return tuple(1 + rng.randint(budget.max_extent) for _ in range(rank))


def _broadcast_partner(shape: Shape, rng: SplitMix64) -> Shape:
    """Forme compatible : dimensions de tête retirées et/ou extents ramenés à 1."""
    drop = rng.randint(len(shape) + 1) if shape else 0
    kept = shape[drop:]
    return tuple(1 if rng.coin() else d for d in kept)


def _unary(spec, shape, variant, rng, dtype) -> Built:
    domain = POSITIVE if spec.kind in ("sqrt", "log") else UNIFORM
    return OpDescriptor(spec.kind), (InputSpec(shape, domain),)


def _binary(spec, shape, variant, rng, dtype) -> Built:
    base = POSITIVE if spec.kind == "pow" else UNIFORM
    if variant % 2 == 0:
        other = _broadcast_partner(shape, rng)
        if rng.coin():
            return OpDescriptor(spec.kind), (InputSpec(shape, base), InputSpec(other))
        return OpDescriptor(spec.kind), (InputSpec(other, base), InputSpec(shape))
    reflected = rng.coin()
    scalar = rng.uniform(min_abs=SMOOTH_MIN_ABS)
    if spec.kind == "pow" and reflected:
        return OpDescriptor(spec.kind, scalar=abs(scalar), reflected=True), (InputSpec(shape),)
    return OpDescriptor(spec.kind, scalar=scalar, reflected=reflected), (InputSpec(shape, base),)


def _reduce(spec, shape, variant, rng, dtype) -> Built:
    if variant % 2 == 0 or not shape:
        return OpDescriptor(spec.kind, keepdims=rng.coin()), (InputSpec(shape),)
    axes = tuple(a for a in range(len(shape)) if rng.coin()) or (rng.randint(len(shape)),)
    return OpDescriptor(spec.kind, axes=axes, keepdims=rng.coin()), (InputSpec(shape),)


def _argreduce(spec, shape, variant, rng, dtype) -> Built:
    axis = rng.randint(len(shape)) if shape else 0
    return OpDescriptor(spec.kind, axis=axis), (InputSpec(shape),)


def _shape_op(spec, shape, variant, rng, dtype) -> Built:
    if spec.kind == "reshape":
        size = int(np.prod(shape)) if shape else 1
        if variant % 2 == 0 or not shape:
            target: Tuple[int, ...] = (size,) if shape else ()
        else:
            target = (-1,) + tuple(reversed(shape))[1:]
        return OpDescriptor("reshape", shape=target), (InputSpec(shape),)
    if spec.kind == "expand_dims":
        return OpDescriptor("expand_dims", axis=rng.randint(len(shape) + 1)), (InputSpec(shape),)
    if spec.kind == "squeeze":
        if not shape:
            return OpDescriptor("squeeze"), (InputSpec(shape),)
        axis = rng.randint(len(shape))
        squeezable = shape[:axis] + (1,) + shape[axis + 1 :]
        if variant % 2 == 0:
            return OpDescriptor("squeeze", axis=axis), (InputSpec(squeezable),)
        return OpDescriptor("squeeze"), (InputSpec(squeezable),)
    return OpDescriptor(spec.kind), (InputSpec(shape),)


def _misc(spec, shape, variant, rng, dtype) -> Built:
    if spec.kind == "clip":
        bounds = (-1.0, 1.0) if variant % 2 == 0 else (-0.5, 1.5)
        return OpDescriptor("clip", bounds=bounds), (InputSpec(shape),)
    other = _broadcast_partner(shape, rng)
    return OpDescriptor("where"), (InputSpec(shape, MASK), InputSpec(shape), InputSpec(other))


def _creation(spec, shape, variant, rng, dtype) -> Built:
    if spec.kind == "full":
        return OpDescriptor("full", shape=shape, fill_value=rng.uniform(), dtype=dtype), ()
    if spec.kind == "arange":
        return OpDescriptor("arange", stop=rng.randint(9), dtype=dtype), ()
    if spec.kind == "from_values":
        values = rng.array(shape, dtype)
        return OpDescriptor("from_values", values=tuple(values.reshape(-1).tolist()), shape=shape, dtype=dtype), ()
    return OpDescriptor(spec.kind, shape=shape, dtype=dtype), ()


_BUILDERS: Dict[str, Builder] = {
    "unary": _unary,
    "binary": _binary,
    "reduce": _reduce,
    "argreduce": _argreduce,
    "shape": _shape_op,
    "misc": _misc,
    "creation": _creation,
    "derived": _unary,
}


def generate_cases(
    seed: int,
    op_table: Optional[Iterable[OpSpec]] = None,
    shape_budget: Optional[ShapeBudget] = None,
    dtype: DType = DType.F64,
    cases_per_rank: int = 2,
) -> List[ConformanceCase]:
    """
    Liste déterministe de cas : chaque opération de `op_table` apparaît
    `cases_per_rank` fois pour chaque rang du budget.
    """
    specs = list(op_table) if op_table is not None else list_op_specs()
    budget = shape_budget or ShapeBudget()
    dtype = DType.parse(dtype)

    cases: List[ConformanceCase] = []
    index = 0
    for spec in specs:
        builder = _BUILDERS[spec.category]
        for rank in budget.ranks():
            for variant in range(cases_per_rank):
                seed_i = case_seed(seed, index)
                index += 1
                params_rng = SplitMix64(~seed_i & MASK64)
                shape = _random_shape(rank, params_rng, budget)
                op, inputs = builder(spec, shape, variant, params_rng, dtype)
                cases.append(ConformanceCase(op=op, inputs=inputs, dtype=dtype, seed=seed_i, label=f"{spec.kind}/rank{rank}"))

    logger.debug("%d cas générés (seed=%d, %d opération(s))", len(cases), seed, len(specs))
    return cases


def _fixed(shape: Shape, values: Sequence[float]) -> InputSpec:
    return InputSpec(shape=shape, domain=FIXED, values=tuple(float(v) for v in values))


def edge_cases(seed: int, dtype: DType = DType.F64, kinds: Optional[Iterable[str]] = None) -> List[ConformanceCase]:
    """
    Cas limites fixes : domaines IEEE (NaN / ±inf attendus partout) et erreurs
    attendues unanimes (EmptyReduction, ShapeMismatch).
    """
    dtype = DType.parse(dtype)
    table = [
        ("sqrt-negative", OpDescriptor("sqrt"), (_fixed((1,), [-1.0]),)),
        ("log-zero", OpDescriptor("log"), (_fixed((1,), [0.0]),)),
        ("div-by-zero", OpDescriptor("div"), (_fixed((1,), [1.0]), _fixed((1,), [0.0]))),
        ("zero-over-zero", OpDescriptor("div"), (_fixed((1,), [0.0]), _fixed((1,), [0.0]))),
        ("max-empty-axis", OpDescriptor("max", axes=(1,)), (_fixed((2, 0), []),)),
        ("reshape-incompatible", OpDescriptor("reshape", shape=(2, 2)), (_fixed((3,), [1.0, 2.0, 3.0]),)),
    ]
    wanted = set(kinds) if kinds is not None else None
    return [
        ConformanceCase(op=op, inputs=inputs, dtype=dtype, seed=seed & MASK64, label=label)
        for label, op, inputs in table
        if wanted is None or op.kind in wanted
    ]


def select_op_specs(kinds: Optional[Iterable[str]]) -> List[OpSpec]:
    """Sous-ensemble de la table, dans l'ordre de la table (noms inconnus : InvalidArgument)."""
    if kinds is None:
        return list_op_specs()
    wanted = {get_op_spec(k).kind for k in kinds}
    return [spec for spec in list_op_specs() if spec.kind in wanted]
