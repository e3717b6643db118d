from __future__ import annotations

from enum import Enum
from typing import Tuple, Union

import numpy as np

from tensorbridge.core.errors import InvalidArgument, UnknownBackend

Shape = Tuple[int, ...]


class BackendId(str, Enum):
    """Identifiant stable d'un backend (nom utilisé par la CLI et le rapport)."""

    PLAIN = "plain"
    IMPERATIVE = "imperative"
    TAPE = "tape"
    FUNCTIONAL = "functional"

    @classmethod
    def parse(cls, value: Union[str, "BackendId"]) -> "BackendId":
        if isinstance(value, BackendId):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise UnknownBackend(
                f"Backend inconnu : {value!r} (attendus : {', '.join(b.value for b in cls)})"
            ) from None


class DType(str, Enum):
    F32 = "f32"
    F64 = "f64"

    @property
    def numpy(self) -> np.dtype:
        return np.dtype(np.float32) if self is DType.F32 else np.dtype(np.float64)

    @classmethod
    def parse(cls, value: Union[str, "DType"]) -> "DType":
        if isinstance(value, DType):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidArgument(f"dtype non supporté : {value!r} (attendus : f32, f64)") from None

    @classmethod
    def of(cls, array: np.ndarray) -> "DType":
        if array.dtype == np.float32:
            return cls.F32
        if array.dtype == np.float64:
            return cls.F64
        raise InvalidArgument(f"dtype numpy non supporté : {array.dtype}")


def normalize_shape(shape) -> Shape:
    """Convertit un int ou une séquence d'entiers en tuple d'extents."""
    if isinstance(shape, (int, np.integer)):
        shape = (int(shape),)
    try:
        dims = tuple(int(d) for d in shape)
    except TypeError:
        raise InvalidArgument(f"Forme invalide : {shape!r}") from None
    if any(d < 0 for d in dims):
        raise InvalidArgument(f"Extents négatifs interdits : {dims}")
    return dims
