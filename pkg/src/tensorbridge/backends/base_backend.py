from __future__ import annotations

from abc import ABC, abstractmethod
from typing import ClassVar, List, Optional, Sequence, Type

import numpy as np

from tensorbridge.backends.kernels import KERNELS, KernelTable, compute
from tensorbridge.backends.native import NativeTensor
from tensorbridge.backends.vjp import VJP_RULES, Cotangents, VjpTable, vjp
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import DTypeMismatch, MixedBackends
from tensorbridge.core.logger import get_logger
from tensorbridge.core.types import BackendId, DType

logger = get_logger(__name__)


class BaseBackend(ABC):
    """
    Classe de base de tous les backends. Elle porte l'identifiant, le nom et
    les tables (kernels, VJP) partagées ; les sous-classes ne diffèrent que par
    leur orchestration de l'autodiff.

    Contrat :
      - run_kernel() : méthode publique, valide les opérandes, calcule via la
        table de kernels puis délègue l'enregistrement autodiff à _record()
      - _record() : à implémenter, mémorise (ou non) l'opération pour l'autodiff
    """

    id: ClassVar[BackendId]
    native_cls: ClassVar[Type[NativeTensor]] = NativeTensor
    supports_autodiff: ClassVar[bool] = False

    def __init__(
        self,
        kernels: Optional[KernelTable] = None,
        vjp_rules: Optional[VjpTable] = None,
        name: Optional[str] = None,
    ) -> None:
        self.kernels = KERNELS if kernels is None else kernels
        self.vjp_rules = VJP_RULES if vjp_rules is None else vjp_rules
        self.name = name or self.id.value

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"

    # ---- Construction ----

    def from_array(self, data, dtype: Optional[DType] = None) -> NativeTensor:
        """
        Copie `data` dans un nouveau buffer en lecture seule détenu par ce backend.

        Sans dtype explicite, float32 est conservé et tout le reste devient float64.
        """
        np_dtype = DType.parse(dtype).numpy if dtype is not None else None
        array = np.array(data, dtype=np_dtype, order="C", copy=True)
        if array.dtype not in (np.float32, np.float64):
            array = array.astype(np.float64)
        array.flags.writeable = False
        return self._wrap(array)

    def _wrap(self, data: np.ndarray) -> NativeTensor:
        return self.native_cls(data, self)

    # ---- Exécution ----

    def run_kernel(self, op: OpDescriptor, inputs: Sequence[NativeTensor]) -> NativeTensor:
        """
        Point d'entrée standard d'une opération sur ce backend.

        Lève MixedBackends / DTypeMismatch avant tout calcul, puis les erreurs
        de forme/axe du kernel.
        """
        self._check_operands(op, inputs)
        data = compute(op, [t.data for t in inputs], table=self.kernels)
        out = self._wrap(data)
        self._record(op, list(inputs), out)
        return out

    def vjp(self, op: OpDescriptor, inputs: Sequence[NativeTensor], output: NativeTensor, cotangent: np.ndarray) -> Cotangents:
        return vjp(op, [t.data for t in inputs], output.data, cotangent, rules=self.vjp_rules)

    @abstractmethod
    def _record(self, op: OpDescriptor, inputs: List[NativeTensor], output: NativeTensor) -> None:
        """Mémorise l'opération pour l'autodiff propre au backend (no-op possible)."""
        raise NotImplementedError

    def ensure_concrete(self, tensor: NativeTensor) -> None:
        """Vérifie qu'on peut lire les valeurs du tenseur hors du mécanisme d'autodiff."""

    # ---- Helpers ----

    def _check_operands(self, op: OpDescriptor, inputs: Sequence[NativeTensor]) -> None:
        for t in inputs:
            if not isinstance(t, NativeTensor) or t.backend is not self:
                owner = getattr(getattr(t, "backend", None), "name", type(t).__name__)
                raise MixedBackends(f"'{op.kind}' sur le backend '{self.name}' avec un opérande de '{owner}'")
        dtypes = {t.data.dtype for t in inputs}
        if len(dtypes) > 1:
            raise DTypeMismatch(f"'{op.kind}' : dtypes différents {sorted(str(d) for d in dtypes)}")
