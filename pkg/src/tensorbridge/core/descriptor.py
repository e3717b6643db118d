"""core/descriptor.py

Table fermée des opérations et descripteur symbolique d'une opération.

Le même OpDescriptor est consommé par les kernels, les règles VJP, le
dispatcher de la façade et le générateur de cas de conformité.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

from tensorbridge.core.errors import InvalidArgument
from tensorbridge.core.types import DType, Shape

# Paramètres optionnels d'un descripteur (tous les champs sauf `kind`).
_PARAM_NAMES = ("axes", "keepdims", "scalar", "reflected", "bounds", "axis", "shape", "stop", "fill_value", "values", "dtype")


@dataclass(frozen=True)
class OpSpec:
    """
    Entrée de la table des opérations.

    - kind           : nom de l'opération ("square", "sum", ...)
    - category       : unary | binary | reduce | argreduce | shape | misc | creation | derived
    - arity          : nombre d'opérandes tensoriels (forme tenseur/tenseur pour binary)
    - differentiable : une règle VJP existe (ou l'op est composée d'ops différentiables)
    - params         : paramètres acceptés
    - required       : paramètres obligatoires
    """

    kind: str
    category: str
    arity: int
    differentiable: bool
    params: Tuple[str, ...] = ()
    required: Tuple[str, ...] = ()


def _specs(category: str, kinds: Tuple[str, ...], arity: int, differentiable: bool, params=(), required=()):
    return [OpSpec(k, category, arity, differentiable, tuple(params), tuple(required)) for k in kinds]


UNARY_KINDS = ("square", "sqrt", "exp", "log", "abs", "neg", "sign", "reciprocal")
BINARY_KINDS = ("add", "sub", "mul", "div", "pow", "minimum", "maximum")
REDUCE_KINDS = ("sum", "mean", "prod", "min", "max")
ARGREDUCE_KINDS = ("argmax", "argmin")
CREATION_KINDS = ("zeros", "ones", "full", "arange", "from_values")

_SPEC_LIST: List[OpSpec] = [
    *_specs("unary", UNARY_KINDS, 1, True),
    *_specs("binary", BINARY_KINDS, 2, True, params=("scalar", "reflected")),
    *_specs("reduce", REDUCE_KINDS, 1, True, params=("axes", "keepdims")),
    *_specs("argreduce", ARGREDUCE_KINDS, 1, False, params=("axis",), required=("axis",)),
    OpSpec("reshape", "shape", 1, True, ("shape",), ("shape",)),
    OpSpec("flatten", "shape", 1, True),
    OpSpec("transpose", "shape", 1, True),
    OpSpec("expand_dims", "shape", 1, True, ("axis",), ("axis",)),
    OpSpec("squeeze", "shape", 1, True, ("axis",)),
    OpSpec("clip", "misc", 1, True, ("bounds",), ("bounds",)),
    OpSpec("where", "misc", 3, True),
    OpSpec("zeros", "creation", 0, False, ("shape", "dtype"), ("shape",)),
    OpSpec("ones", "creation", 0, False, ("shape", "dtype"), ("shape",)),
    OpSpec("full", "creation", 0, False, ("shape", "fill_value", "dtype"), ("shape", "fill_value")),
    OpSpec("arange", "creation", 0, False, ("stop", "dtype"), ("stop",)),
    OpSpec("from_values", "creation", 0, False, ("values", "shape", "dtype"), ("values", "shape")),
    OpSpec("norm", "derived", 1, True),
]

OP_TABLE: Dict[str, OpSpec] = {spec.kind: spec for spec in _SPEC_LIST}


def get_op_spec(kind: str) -> OpSpec:
    try:
        return OP_TABLE[kind]
    except KeyError:
        raise InvalidArgument(f"Opération inconnue : {kind!r}") from None


def list_op_specs() -> List[OpSpec]:
    """Table des opérations dans l'ordre de déclaration (ordre déterministe)."""
    return list(_SPEC_LIST)


@dataclass(frozen=True)
class OpDescriptor:
    """
    Description symbolique d'une opération primitive.

    Un paramètre est présent (non None / non False) si et seulement si
    l'opération l'accepte ; la validation est faite à la construction.
    """

    kind: str
    axes: Optional[Tuple[int, ...]] = None
    keepdims: bool = False
    scalar: Optional[float] = None
    reflected: bool = False
    bounds: Optional[Tuple[float, float]] = None
    axis: Optional[int] = None
    shape: Optional[Shape] = None
    stop: Optional[int] = None
    fill_value: Optional[float] = None
    values: Optional[Tuple[float, ...]] = None
    dtype: Optional[DType] = None
    _spec: OpSpec = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        spec = get_op_spec(self.kind)
        object.__setattr__(self, "_spec", spec)

        # Normalisation des conteneurs en tuples (descripteur hashable)
        if self.axes is not None:
            axes = (self.axes,) if isinstance(self.axes, int) else self.axes
            object.__setattr__(self, "axes", tuple(int(a) for a in axes))
        if self.shape is not None:
            object.__setattr__(self, "shape", tuple(int(d) for d in self.shape))
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.bounds is not None:
            lo, hi = self.bounds
            object.__setattr__(self, "bounds", (float(lo), float(hi)))
        if self.scalar is not None:
            object.__setattr__(self, "scalar", float(self.scalar))
        if self.fill_value is not None:
            object.__setattr__(self, "fill_value", float(self.fill_value))
        if self.dtype is not None:
            object.__setattr__(self, "dtype", DType.parse(self.dtype))

        present = self.present_params()
        unexpected = [name for name in present if name not in spec.params]
        if unexpected:
            raise InvalidArgument(f"Paramètre(s) {unexpected} non accepté(s) par l'opération '{self.kind}'.")
        missing = [name for name in spec.required if name not in present]
        if missing:
            raise InvalidArgument(f"Paramètre(s) obligatoire(s) {missing} manquant(s) pour '{self.kind}'.")
        if self.reflected and self.scalar is None:
            raise InvalidArgument("'reflected' n'a de sens qu'avec un opérande scalaire.")

    @property
    def spec(self) -> OpSpec:
        return self._spec

    @property
    def category(self) -> str:
        return self._spec.category

    @property
    def n_inputs(self) -> int:
        """Nombre d'opérandes tensoriels effectifs (1 pour la variante scalaire d'un binaire)."""
        if self.category == "binary" and self.scalar is not None:
            return 1
        return self._spec.arity

    def present_params(self) -> Dict[str, Any]:
        """Paramètres renseignés (False et None valent absence)."""
        result: Dict[str, Any] = {}
        for f in fields(self):
            if f.name not in _PARAM_NAMES:
                continue
            value = getattr(self, f.name)
            if value is None or value is False:
                continue
            result[f.name] = value
        return result

    def to_dict(self) -> Dict[str, Any]:
        """Forme sérialisable JSON (utilisée pour l'identifiant de cas et les logs)."""
        out: Dict[str, Any] = {"kind": self.kind}
        for name, value in self.present_params().items():
            if isinstance(value, DType):
                value = value.value
            elif isinstance(value, tuple):
                value = list(value)
            out[name] = value
        return out
