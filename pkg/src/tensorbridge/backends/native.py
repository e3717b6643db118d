from __future__ import annotations

import threading
from typing import TYPE_CHECKING

import numpy as np

from tensorbridge.core.types import BackendId, DType, Shape

if TYPE_CHECKING:
    from tensorbridge.backends.base_backend import BaseBackend

_alloc_lock = threading.Lock()
_alloc_count = 0


def _record_allocation() -> None:
    global _alloc_count
    with _alloc_lock:
        _alloc_count += 1


def native_allocations() -> int:
    """Nombre de NativeTensor construits depuis le démarrage (compteur instrumenté)."""
    return _alloc_count


class NativeTensor:
    """
    Tenseur concret d'un backend : buffer numpy C-contigu en lecture seule,
    plus une référence vers le backend propriétaire.

    Chaque backend dérive cette classe pour y ajouter son état d'autodiff.
    """

    __slots__ = ("data", "backend", "__weakref__")

    def __init__(self, data: np.ndarray, backend: "BaseBackend") -> None:
        self.data = data
        self.backend = backend
        _record_allocation()

    @property
    def backend_id(self) -> BackendId:
        return self.backend.id

    @property
    def shape(self) -> Shape:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def dtype(self) -> DType:
        return DType.of(self.data)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(backend={self.backend.name!r}, shape={self.shape}, dtype={self.dtype.value})"
