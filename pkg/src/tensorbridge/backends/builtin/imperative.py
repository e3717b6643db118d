"""backends/builtin/imperative.py

Backend impératif, idiome "define-by-run" à la PyTorch :

    x = backend.from_array([1., 2., 3.]).requires_grad_()
    loss = ...            # chaque opération construit le graphe au passage
    loss.backward()       # accumule (+=) dans x.grad
    x.zero_grad()

Un graphe de GradNode est confiné à un seul thread ; des graphes distincts
peuvent vivre en parallèle.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Tuple

import numpy as np

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.native import NativeTensor
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import MixedBackends, NotScalarLoss
from tensorbridge.core.logger import get_logger
from tensorbridge.core.types import BackendId

logger = get_logger(__name__)

VjpClosure = Callable[[np.ndarray], np.ndarray]


class GradNode:
    """
    Nœud du graphe de rétropropagation.

    - requires_grad : le gradient doit être conservé dans `grad`
    - grad          : gradient accumulé (None tant que backward ne l'a pas atteint)
    - parents       : (nœud parent, closure cotangente -> cotangente du parent)
    - op            : opération ayant produit ce nœud (None pour une feuille)
    """

    __slots__ = ("requires_grad", "grad", "parents", "op")

    def __init__(
        self,
        op: Optional[OpDescriptor] = None,
        parents: Optional[List[Tuple["GradNode", VjpClosure]]] = None,
        requires_grad: bool = False,
    ) -> None:
        self.op = op
        self.parents = parents or []
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None

    @property
    def is_leaf(self) -> bool:
        return not self.parents

    @property
    def tracked(self) -> bool:
        return self.requires_grad or bool(self.parents)


class ImperativeTensor(NativeTensor):
    __slots__ = ("node",)

    def __init__(self, data: np.ndarray, backend: "ImperativeBackend") -> None:
        super().__init__(data, backend)
        self.node = GradNode()

    @property
    def requires_grad(self) -> bool:
        return self.node.requires_grad

    def requires_grad_(self, flag: bool = True) -> "ImperativeTensor":
        self.node.requires_grad = flag
        return self

    @property
    def grad(self) -> Optional["ImperativeTensor"]:
        return self.backend.read_grad(self)

    def backward(self) -> None:
        self.backend.backward(self)

    def zero_grad(self) -> None:
        self.backend.zero_grad(self)

    def detach(self) -> "ImperativeTensor":
        return self.backend.detach(self)


class ImperativeBackend(BaseBackend):
    id = BackendId.IMPERATIVE
    native_cls = ImperativeTensor
    supports_autodiff = True

    def _record(self, op: OpDescriptor, inputs: List[NativeTensor], output: NativeTensor) -> None:
        if not op.spec.differentiable:
            return
        parents = [
            (t.node, self._make_closure(op, inputs, output, index))
            for index, t in enumerate(inputs)
            if t.node.tracked
        ]
        if parents:
            output.node = GradNode(op=op, parents=parents)

    def _make_closure(self, op: OpDescriptor, inputs: List[NativeTensor], output: NativeTensor, index: int) -> VjpClosure:
        def closure(cotangent: np.ndarray) -> np.ndarray:
            return self.vjp(op, inputs, output, cotangent)[index]

        return closure

    # ---- API autodiff ----

    def mark_requires_grad(self, tensor: ImperativeTensor) -> ImperativeTensor:
        self._check_owned(tensor)
        return tensor.requires_grad_()

    def read_grad(self, tensor: ImperativeTensor) -> Optional[ImperativeTensor]:
        self._check_owned(tensor)
        grad = tensor.node.grad
        if grad is None:
            return None
        view = grad.view()
        view.flags.writeable = False
        return self._wrap(view)

    def zero_grad(self, tensor: ImperativeTensor) -> None:
        self._check_owned(tensor)
        tensor.node.grad = None

    def detach(self, tensor: ImperativeTensor) -> ImperativeTensor:
        """Nouveau tenseur feuille partageant le même buffer (aucune copie d'éléments)."""
        self._check_owned(tensor)
        return self._wrap(tensor.data)

    def backward(self, loss: ImperativeTensor) -> None:
        """
        Rétropropage depuis `loss` (rang 0) et ACCUMULE d loss / d nœud dans
        chaque nœud atteint ayant requires_grad.
        """
        self._check_owned(loss)
        if loss.ndim != 0:
            raise NotScalarLoss(f"backward() attend une perte de rang 0, forme {loss.shape} reçue")

        order = _topological_order(loss.node)
        logger.debug("Rétropropagation impérative sur %d nœud(s)", len(order))

        cotangents = {id(loss.node): np.ones((), dtype=loss.data.dtype)}
        for node in reversed(order):
            cot = cotangents.pop(id(node), None)
            if cot is None:
                continue
            if node.requires_grad:
                node.grad = cot if node.grad is None else node.grad + cot
            for parent, closure in node.parents:
                g = closure(cot)
                prev = cotangents.get(id(parent))
                cotangents[id(parent)] = g if prev is None else prev + g

    def _check_owned(self, tensor: NativeTensor) -> None:
        if not isinstance(tensor, ImperativeTensor) or tensor.backend is not self:
            raise MixedBackends(f"Tenseur étranger au backend '{self.name}' : {tensor!r}")


def _topological_order(root: GradNode) -> List[GradNode]:
    """Ordre topologique (parents avant enfants), parcours itératif."""
    order: List[GradNode] = []
    visited = set()
    stack: List[Tuple[GradNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent, _ in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


# ---- Fonctions libres (dispatch sur le backend du tenseur) ----


def _owner(tensor: NativeTensor) -> ImperativeBackend:
    backend = getattr(tensor, "backend", None)
    if not isinstance(backend, ImperativeBackend):
        raise MixedBackends(f"Tenseur attendu sur le backend 'imperative', reçu {tensor!r}")
    return backend


def mark_requires_grad(tensor: ImperativeTensor) -> ImperativeTensor:
    return _owner(tensor).mark_requires_grad(tensor)


def read_grad(tensor: ImperativeTensor) -> Optional[ImperativeTensor]:
    return _owner(tensor).read_grad(tensor)


def zero_grad(tensor: ImperativeTensor) -> None:
    _owner(tensor).zero_grad(tensor)


def imperative_backward(loss: ImperativeTensor) -> None:
    _owner(loss).backward(loss)
