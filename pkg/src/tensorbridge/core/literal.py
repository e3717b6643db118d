"""core/literal.py

Format texte des tenseurs partagé avec la CLI.

  - `[[1,2],[3,4]]` : crochets imbriqués, flottants décimaux
  - le rang est déduit de l'imbrication, un scalaire nu est de rang 0
  - une imbrication irrégulière est une erreur de parsing
"""

from __future__ import annotations

import json
import math
from typing import Any, List

import numpy as np

from tensorbridge.core.errors import LiteralParseError
from tensorbridge.core.types import DType, Shape


def parse_literal(text: str, dtype: DType = DType.F64) -> np.ndarray:
    """
    Parse un littéral de tenseur et retourne un ndarray du dtype demandé.

    Lève LiteralParseError si le texte est illisible, irrégulier ou contient
    autre chose que des nombres.
    """
    try:
        data = json.loads(text)
    except (TypeError, ValueError) as exc:
        raise LiteralParseError(f"Littéral de tenseur illisible {text!r} : {exc}") from exc

    shape = _infer_shape(data, path="$")
    flat: List[float] = []
    _flatten_into(data, flat)
    return np.array(flat, dtype=DType.parse(dtype).numpy).reshape(shape)


def _infer_shape(node: Any, path: str) -> Shape:
    if isinstance(node, bool) or node is None:
        raise LiteralParseError(f"Valeur non numérique en {path} : {node!r}")
    if isinstance(node, (int, float)):
        return ()
    if not isinstance(node, list):
        raise LiteralParseError(f"Valeur non numérique en {path} : {node!r}")
    if not node:
        return (0,)

    child_shapes = [_infer_shape(child, f"{path}[{i}]") for i, child in enumerate(node)]
    first = child_shapes[0]
    for i, child_shape in enumerate(child_shapes[1:], start=1):
        if child_shape != first:
            raise LiteralParseError(f"Imbrication irrégulière en {path}[{i}] : forme {child_shape} au lieu de {first}")
    return (len(node),) + first


def _flatten_into(node: Any, out: List[float]) -> None:
    if isinstance(node, list):
        for child in node:
            _flatten_into(child, out)
    else:
        out.append(float(node))


# ---------------------------------------------------------------------------
# Affichage
# ---------------------------------------------------------------------------


def format_scalar(value: float, dtype: DType = DType.F64) -> str:
    """
    Représentation décimale la plus courte qui relit exactement la valeur
    dans son dtype ("14" et non "14.0", "3.7416575" en f32).
    """
    scalar = DType.parse(dtype).numpy.type(value)
    if math.isnan(scalar):
        return "nan"
    if math.isinf(scalar):
        return "inf" if scalar > 0 else "-inf"
    magnitude = abs(float(scalar))
    if magnitude != 0.0 and (magnitude >= 1e16 or magnitude < 1e-5):
        return np.format_float_scientific(scalar, unique=True, trim="-")
    return np.format_float_positional(scalar, unique=True, trim="-")


def format_value(array: np.ndarray) -> str:
    """Formate un ndarray en littéral compact : `[2,4,6]`, `14`."""
    dtype = DType.of(array)
    return _format_node(array.tolist(), dtype)


def _format_node(node: Any, dtype: DType) -> str:
    if isinstance(node, list):
        return "[" + ",".join(_format_node(child, dtype) for child in node) + "]"
    return format_scalar(node, dtype)

