"""backends/builtin/functional.py

Backend fonctionnel, idiome JAX : on différencie des fonctions, pas des tenseurs.

    grad_fn = backend.grad(lambda x: x.square().sum())   # via les natifs
    g = grad_fn(x)

Chaque appel trace la fonction (aucun cache) : l'argument différencié est
remplacé par un tenseur porteur d'un identifiant de trace, et chaque
opération atteinte construit un TraceExpr. Les VJP partagées sont ensuite
appliquées sur cette expression.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.kernels import compute
from tensorbridge.backends.native import NativeTensor
from tensorbridge.backends.vjp import vjp
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, MixedBackends, NonScalarOutput, UntraceableOp
from tensorbridge.core.logger import get_logger
from tensorbridge.core.types import BackendId

logger = get_logger(__name__)

_trace_ids = itertools.count(1)
_local = threading.local()


def _trace_stack() -> List[int]:
    stack = getattr(_local, "traces", None)
    if stack is None:
        stack = _local.traces = []
    return stack


def _current_trace() -> Optional[int]:
    stack = _trace_stack()
    return stack[-1] if stack else None


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class TraceExpr:
    """Nœud d'expression ; `value` est la valeur concrète calculée pendant la trace."""

    value: np.ndarray

    @property
    def children(self) -> Tuple["TraceExpr", ...]:
        return ()


@dataclass(eq=False)
class InputSlot(TraceExpr):
    slot: int = 0


@dataclass(eq=False)
class Constant(TraceExpr):
    pass


@dataclass(eq=False)
class OpNode(TraceExpr):
    op: Optional[OpDescriptor] = None
    args: Tuple[TraceExpr, ...] = field(default_factory=tuple)

    @property
    def children(self) -> Tuple[TraceExpr, ...]:
        return self.args


def _topological_order(root: TraceExpr) -> List[TraceExpr]:
    """Enfants avant parents ; les sous-expressions partagées n'apparaissent qu'une fois."""
    order: List[TraceExpr] = []
    visited = set()
    stack: List[Tuple[TraceExpr, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for child in node.children:
            if id(child) not in visited:
                stack.append((child, False))
    return order


# ---------------------------------------------------------------------------
# Backend
# ---------------------------------------------------------------------------


class FunctionalTensor(NativeTensor):
    __slots__ = ("trace_id", "expr")

    def __init__(self, data: np.ndarray, backend: "FunctionalBackend") -> None:
        super().__init__(data, backend)
        self.trace_id: Optional[int] = None
        self.expr: Optional[TraceExpr] = None


class FunctionalBackend(BaseBackend):
    id = BackendId.FUNCTIONAL
    native_cls = FunctionalTensor
    supports_autodiff = True

    def _record(self, op: OpDescriptor, inputs: List[NativeTensor], output: NativeTensor) -> None:
        trace_id = _current_trace()
        if trace_id is None or not op.spec.differentiable:
            return
        if not any(t.trace_id == trace_id for t in inputs):
            return
        args = tuple(t.expr if t.trace_id == trace_id else Constant(value=t.data) for t in inputs)
        output.trace_id = trace_id
        output.expr = OpNode(value=output.data, op=op, args=args)

    def ensure_concrete(self, tensor: NativeTensor) -> None:
        trace_id = getattr(tensor, "trace_id", None)
        if trace_id is not None and trace_id in _trace_stack():
            raise UntraceableOp("Lecture des valeurs d'un tenseur en cours de trace (numpy()/item() interdits)")

    # ---- Trace ----

    def _run_traced(self, f: Callable[..., Any], args: Sequence[NativeTensor], argnum: int) -> Tuple[Any, int]:
        if not 0 <= argnum < len(args):
            raise InvalidArgument(f"argnum={argnum} hors limites pour {len(args)} argument(s)")
        x = args[argnum]
        if not isinstance(x, FunctionalTensor) or x.backend is not self:
            raise MixedBackends(f"Argument différencié étranger au backend '{self.name}' : {x!r}")

        trace_id = next(_trace_ids)
        placeholder = self._wrap(x.data)
        placeholder.trace_id = trace_id
        placeholder.expr = InputSlot(value=x.data, slot=argnum)
        traced = list(args)
        traced[argnum] = placeholder

        stack = _trace_stack()
        stack.append(trace_id)
        try:
            result = f(*traced)
        finally:
            stack.remove(trace_id)
        logger.debug("Trace %d construite", trace_id)
        return result, trace_id

    def trace(self, f: Callable[..., Any], *args: NativeTensor, argnum: int = 0) -> Tuple[FunctionalTensor, TraceExpr]:
        """Trace f et renvoie (sortie concrète, expression de la sortie)."""
        out, trace_id = self._run_traced(f, args, argnum)
        out = self._check_output(out)
        expr = out.expr if out.trace_id == trace_id else Constant(value=out.data)
        return self._concrete(out), expr

    def evaluate_trace(self, expr: TraceExpr, args: Sequence[Any]) -> np.ndarray:
        """Réévalue `expr` avec les kernels du backend ; args indexés par slot."""
        values = [a.data if isinstance(a, NativeTensor) else np.asarray(a) for a in args]
        memo: Dict[int, np.ndarray] = {}
        for node in _topological_order(expr):
            if isinstance(node, InputSlot):
                memo[id(node)] = values[node.slot]
            elif isinstance(node, OpNode):
                memo[id(node)] = compute(node.op, [memo[id(c)] for c in node.args], table=self.kernels)
            else:
                memo[id(node)] = node.value
        return memo[id(expr)]

    # ---- Différentiation ----

    def value_and_grad(
        self,
        f: Callable[..., Any],
        argnum: int = 0,
        has_aux: bool = False,
    ) -> Callable[..., Tuple[Any, ...]]:
        """
        Renvoie une fonction calculant (valeur, grad), ou (valeur, aux, grad)
        avec has_aux. Aucun gradient ne traverse aux.
        """

        def value_and_grad_fn(*args: NativeTensor) -> Tuple[Any, ...]:
            result, trace_id = self._run_traced(f, args, argnum)
            aux = None
            if has_aux:
                if not isinstance(result, tuple) or len(result) != 2:
                    raise UntraceableOp("has_aux=True attend une fonction renvoyant (valeur, aux)")
                result, aux = result
            out = self._check_output(result)
            if out.ndim != 0:
                raise NonScalarOutput(f"La fonction différenciée doit renvoyer un scalaire, forme {out.shape} reçue")

            x = args[argnum]
            g = None
            if out.trace_id == trace_id:
                g = self._backprop(out.expr, np.ones((), dtype=out.data.dtype)).get(argnum)
            if g is None:
                g = np.zeros(x.shape, dtype=x.data.dtype)
            g = np.ascontiguousarray(g)
            g.flags.writeable = False

            value = self._concrete(out)
            if has_aux:
                return value, self._strip(aux), self._wrap(g)
            return value, self._wrap(g)

        return value_and_grad_fn

    def grad(self, f: Callable[..., Any], argnum: int = 0) -> Callable[..., FunctionalTensor]:
        value_and_grad_fn = self.value_and_grad(f, argnum=argnum)

        def grad_fn(*args: NativeTensor) -> FunctionalTensor:
            return value_and_grad_fn(*args)[1]

        return grad_fn

    def _backprop(self, root: TraceExpr, seed: np.ndarray) -> Dict[int, np.ndarray]:
        cotangents: Dict[int, np.ndarray] = {id(root): seed}
        slot_grads: Dict[int, np.ndarray] = {}
        for node in reversed(_topological_order(root)):
            cot = cotangents.pop(id(node), None)
            if cot is None:
                continue
            if isinstance(node, InputSlot):
                prev = slot_grads.get(node.slot)
                slot_grads[node.slot] = cot if prev is None else prev + cot
                continue
            if not isinstance(node, OpNode):
                continue
            grads = vjp(node.op, [c.value for c in node.args], node.value, cot, rules=self.vjp_rules)
            for child, g in zip(node.args, grads):
                if isinstance(child, Constant):
                    continue
                prev = cotangents.get(id(child))
                cotangents[id(child)] = g if prev is None else prev + g
        return slot_grads

    # ---- Helpers ----

    def _check_output(self, out: Any) -> FunctionalTensor:
        if not isinstance(out, FunctionalTensor) or out.backend is not self:
            raise UntraceableOp(f"La fonction tracée doit renvoyer un tenseur du backend '{self.name}', reçu {type(out).__name__}")
        return out

    def _concrete(self, tensor: FunctionalTensor) -> FunctionalTensor:
        if tensor.trace_id is None:
            return tensor
        return self._wrap(tensor.data)

    def _strip(self, value: Any) -> Any:
        if isinstance(value, FunctionalTensor) and value.backend is self:
            return self._concrete(value)
        if isinstance(value, (tuple, list)):
            return type(value)(self._strip(v) for v in value)
        return value


def functional_grad(f: Callable[..., Any], argnum: int = 0) -> Callable[..., FunctionalTensor]:
    """Version libre de FunctionalBackend.grad : le backend est celui de l'argument différencié."""

    def grad_fn(*args: NativeTensor) -> FunctionalTensor:
        if not 0 <= argnum < len(args):
            raise InvalidArgument(f"argnum={argnum} hors limites pour {len(args)} argument(s)")
        backend = getattr(args[argnum], "backend", None)
        if not isinstance(backend, FunctionalBackend):
            raise MixedBackends(f"functional_grad attend un tenseur du backend 'functional', reçu {args[argnum]!r}")
        return backend.grad(f, argnum=argnum)(*args)

    return grad_fn
