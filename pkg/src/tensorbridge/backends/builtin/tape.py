"""backends/builtin/tape.py

Backend à bande, idiome TensorFlow :

    with GradientTape() as tape:
        tape.watch(x)
        loss = ...
    (gx,) = tape.gradient(loss, [x])

Les bandes actives sont propres à chaque thread ; les bandes imbriquées
enregistrent toutes. Une opération exécutée hors de toute bande active
n'en modifie aucune.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Set, Tuple, Union

import numpy as np

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.native import NativeTensor
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, MixedBackends, NotWatched, TapeConsumed
from tensorbridge.core.logger import get_logger
from tensorbridge.core.types import BackendId

logger = get_logger(__name__)

_tensor_ids = itertools.count(1)
_local = threading.local()


def _active_tapes() -> List["GradientTape"]:
    stack = getattr(_local, "tapes", None)
    if stack is None:
        stack = _local.tapes = []
    return stack


class TapeTensor(NativeTensor):
    """Tenseur identifié par un id unique ; son historique vit dans les bandes."""

    __slots__ = ("tensor_id",)

    def __init__(self, data: np.ndarray, backend: "TapeBackend") -> None:
        super().__init__(data, backend)
        self.tensor_id = next(_tensor_ids)


@dataclass(frozen=True)
class TapeRecord:
    op: OpDescriptor
    inputs: Tuple[TapeTensor, ...]
    output: TapeTensor

    @property
    def input_ids(self) -> Tuple[int, ...]:
        return tuple(t.tensor_id for t in self.inputs)

    @property
    def output_id(self) -> int:
        return self.output.tensor_id


class GradientTape:
    """
    Enregistre, tant qu'elle est active, les opérations dont au moins une
    entrée est surveillée (watch) ou produite par une opération enregistrée.

    Une bande non persistante n'accepte qu'une seule requête gradient().
    """

    def __init__(self, persistent: bool = False) -> None:
        self.persistent = persistent
        self.records: List[TapeRecord] = []
        self.watched: Set[int] = set()
        self.active = False
        self._tracked: Set[int] = set()
        self._consumed = False

    def __enter__(self) -> "GradientTape":
        _active_tapes().append(self)
        self.active = True
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        stack = _active_tapes()
        if self in stack:
            stack.remove(self)
        self.active = False

    def watch(self, *tensors: TapeTensor) -> None:
        for t in tensors:
            if not isinstance(t, TapeTensor):
                raise MixedBackends(f"watch() attend des tenseurs du backend 'tape', reçu {t!r}")
            self.watched.add(t.tensor_id)
            self._tracked.add(t.tensor_id)

    def record(self, op: OpDescriptor, inputs: Sequence[TapeTensor], output: TapeTensor) -> None:
        if not self.active:
            return
        if not any(t.tensor_id in self._tracked for t in inputs):
            return
        self.records.append(TapeRecord(op=op, inputs=tuple(inputs), output=output))
        self._tracked.add(output.tensor_id)

    def gradient(
        self,
        target: TapeTensor,
        sources: Union[TapeTensor, Sequence[TapeTensor]],
    ) -> Union[TapeTensor, List[TapeTensor]]:
        """
        Gradient de `target` par rapport à chaque source surveillée.

        Une source surveillée mais non reliée à `target` reçoit un gradient nul.
        """
        if self._consumed:
            raise TapeConsumed("Bande non persistante déjà consommée par un appel à gradient()")

        if not isinstance(target, TapeTensor):
            raise MixedBackends(f"gradient() attend une cible du backend 'tape', reçu {target!r}")
        single = isinstance(sources, NativeTensor)
        source_list = [sources] if single else list(sources)
        for s in source_list:
            if not isinstance(s, TapeTensor) or s.tensor_id not in self.watched:
                raise NotWatched(f"Gradient demandé pour un tenseur non surveillé : {s!r}")
        if not self.persistent:
            self._consumed = True

        backend = target.backend
        logger.debug("Relecture de la bande : %d enregistrement(s)", len(self.records))

        cotangents: Dict[int, np.ndarray] = {target.tensor_id: np.ones(target.shape, dtype=target.data.dtype)}
        for rec in reversed(self.records):
            cot = cotangents.get(rec.output_id)
            if cot is None:
                continue
            grads = backend.vjp(rec.op, rec.inputs, rec.output, cot)
            for tid, g in zip(rec.input_ids, grads):
                prev = cotangents.get(tid)
                cotangents[tid] = g if prev is None else prev + g

        results = []
        for s in source_list:
            g = cotangents.get(s.tensor_id)
            if g is None:
                g = np.zeros(s.shape, dtype=s.data.dtype)
            g = np.ascontiguousarray(g)
            g.flags.writeable = False
            results.append(backend._wrap(g))
        return results[0] if single else results


class TapeBackend(BaseBackend):
    id = BackendId.TAPE
    native_cls = TapeTensor
    supports_autodiff = True

    def _record(self, op: OpDescriptor, inputs: List[NativeTensor], output: NativeTensor) -> None:
        if not op.spec.differentiable or not inputs:
            return
        for tape in list(_active_tapes()):
            tape.record(op, inputs, output)

    def detach(self, tensor: TapeTensor) -> TapeTensor:
        """Nouveau tenseur (identité de bande neuve) partageant le même buffer."""
        if not isinstance(tensor, TapeTensor) or tensor.backend is not self:
            raise MixedBackends(f"Tenseur étranger au backend '{self.name}' : {tensor!r}")
        return self._wrap(tensor.data)

    def tape_scope(
        self,
        f: Callable[..., Any],
        sources: Sequence[TapeTensor],
        persistent: bool = False,
    ) -> Tuple[Any, GradientTape]:
        """Exécute f(*sources) sous une nouvelle bande surveillant `sources`."""
        for s in sources:
            if not isinstance(s, TapeTensor) or s.backend is not self:
                raise MixedBackends(f"Tenseur étranger au backend '{self.name}' : {s!r}")
        with GradientTape(persistent=persistent) as tape:
            tape.watch(*sources)
            outputs = f(*sources)
        return outputs, tape

    def tape_gradient(self, tape: GradientTape, output: TapeTensor, inputs: Sequence[TapeTensor]) -> List[TapeTensor]:
        return tape.gradient(output, list(inputs))


def tape_scope(
    f: Callable[..., Any],
    sources: Sequence[TapeTensor],
    persistent: bool = False,
) -> Tuple[Any, GradientTape]:
    """Version libre de TapeBackend.tape_scope (backend déduit de la première source)."""
    if not sources:
        raise InvalidArgument("tape_scope() attend au moins une source")
    backend = getattr(sources[0], "backend", None)
    if not isinstance(backend, TapeBackend):
        raise MixedBackends(f"tape_scope attend des tenseurs du backend 'tape', reçu {sources[0]!r}")
    return backend.tape_scope(f, sources, persistent=persistent)


def tape_gradient(tape: GradientTape, output: TapeTensor, inputs: Sequence[TapeTensor]) -> List[TapeTensor]:
    return tape.gradient(output, list(inputs))
