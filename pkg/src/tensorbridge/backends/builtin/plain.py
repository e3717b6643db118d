from __future__ import annotations

from typing import List

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.native import NativeTensor
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.types import BackendId


class PlainTensor(NativeTensor):
    """Tenseur sans état d'autodiff."""

    __slots__ = ()


class PlainBackend(BaseBackend):
    """
    Backend de calcul pur, sans différentiation automatique (idiome NumPy).

    Sans état : utilisable depuis plusieurs threads.
    """

    id = BackendId.PLAIN
    native_cls = PlainTensor
    supports_autodiff = False

    def _record(self, op: OpDescriptor, inputs: List[NativeTensor], output: NativeTensor) -> None:
        return None
