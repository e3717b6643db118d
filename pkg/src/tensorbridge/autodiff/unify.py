"""autodiff/unify.py

API fonctionnelle unique de différentiation, quelle que soit l'idiome du
backend de l'argument :

    value, grad = value_and_grad(lambda x: x.square().sum(), x)

  - imperative : graphe neuf (detach + requires_grad_) puis backward()
  - tape       : nouvelle GradientTape surveillant une copie détachée de x
  - functional : backend.value_and_grad() (trace refaite à chaque appel)

Chaque appel utilise un état d'autodiff isolé : aucun .grad résiduel sur x.
"""

from __future__ import annotations

from typing import Any, Callable, Optional, Tuple

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.builtin.functional import FunctionalBackend
from tensorbridge.backends.builtin.imperative import ImperativeBackend
from tensorbridge.backends.builtin.tape import TapeBackend
from tensorbridge.backends.native import NativeTensor
from tensorbridge.core.descriptor import OpDescriptor
from tensorbridge.core.errors import InvalidArgument, MixedBackends, NoAutodiffCapability, NonScalarOutput
from tensorbridge.core.logger import get_logger
from tensorbridge.tensor.conversion import astensor
from tensorbridge.tensor.handle import TensorHandle

logger = get_logger(__name__)

DifferentiableFunction = Callable[[TensorHandle], Any]


def _split(result: Any, has_aux: bool) -> Tuple[Any, Any]:
    if not has_aux:
        return result, None
    if not isinstance(result, tuple) or len(result) != 2:
        raise InvalidArgument("has_aux=True : la fonction doit renvoyer (valeur, aux)")
    return result


def _unwrap(value: Any) -> Any:
    return value.raw if isinstance(value, TensorHandle) else value


def _rewrap(value: Any) -> Any:
    if isinstance(value, NativeTensor):
        return TensorHandle(value)
    if isinstance(value, tuple):
        return tuple(_rewrap(v) for v in value)
    return value


def _scalar_output(value: Any, backend: BaseBackend) -> NativeTensor:
    native = _unwrap(value)
    if not isinstance(native, NativeTensor):
        raise InvalidArgument(f"La fonction doit renvoyer un tenseur, reçu {type(value).__name__}")
    if native.backend is not backend:
        raise MixedBackends(f"Sortie sur le backend '{native.backend.name}', argument sur '{backend.name}'")
    if native.ndim != 0:
        raise NonScalarOutput(f"La fonction différenciée doit renvoyer un scalaire, forme {native.shape} reçue")
    return native


def _zeros_like(backend: BaseBackend, x: NativeTensor) -> NativeTensor:
    return backend.run_kernel(OpDescriptor("zeros", shape=x.shape, dtype=x.dtype), [])


# ---------------------------------------------------------------------------
# Orchestration par idiome
# ---------------------------------------------------------------------------


def _imperative(backend: ImperativeBackend, f: DifferentiableFunction, x: NativeTensor, has_aux: bool):
    leaf = backend.mark_requires_grad(backend.detach(x))
    value, aux = _split(f(TensorHandle(leaf)), has_aux)
    out = _scalar_output(value, backend)
    backend.backward(out)
    grad = backend.read_grad(leaf)
    if grad is None:
        grad = _zeros_like(backend, x)
    if isinstance(_unwrap(aux), NativeTensor) and _unwrap(aux).backend is backend:
        aux = backend.detach(_unwrap(aux))
    return backend.detach(out), aux, grad


def _tape(backend: TapeBackend, f: DifferentiableFunction, x: NativeTensor, has_aux: bool):
    source = backend.detach(x)
    result, tape = backend.tape_scope(lambda src: f(TensorHandle(src)), [source])
    value, aux = _split(result, has_aux)
    out = _scalar_output(value, backend)
    (grad,) = backend.tape_gradient(tape, out, [source])
    return out, aux, grad


def _functional(backend: FunctionalBackend, f: DifferentiableFunction, x: NativeTensor, has_aux: bool):
    def native_f(traced: NativeTensor):
        value, aux = _split(f(TensorHandle(traced)), has_aux)
        out = _scalar_output(value, backend)
        if has_aux:
            return out, _unwrap(aux)
        return out

    result = backend.value_and_grad(native_f, argnum=0, has_aux=has_aux)(x)
    if has_aux:
        return result
    value, grad = result
    return value, None, grad


_ORCHESTRATORS = (
    (ImperativeBackend, _imperative),
    (TapeBackend, _tape),
    (FunctionalBackend, _functional),
)


def value_and_grad_fn(f: DifferentiableFunction, has_aux: bool = False) -> Callable[[Any], Tuple[Any, ...]]:
    """
    Renvoie une fonction x -> (valeur, grad), ou (valeur, aux, grad) avec has_aux.

    Lève NoAutodiffCapability si x est sur un backend sans autodiff (plain).
    """

    def fn(x: Any) -> Tuple[Any, ...]:
        handle = astensor(x)
        backend = handle.raw.backend
        if not backend.supports_autodiff:
            raise NoAutodiffCapability(f"Le backend '{backend.name}' ne supporte pas la différentiation automatique")

        orchestrate: Optional[Callable[..., Any]] = None
        for backend_cls, candidate in _ORCHESTRATORS:
            if isinstance(backend, backend_cls):
                orchestrate = candidate
                break
        if orchestrate is None:
            raise NoAutodiffCapability(f"Aucun idiome d'autodiff connu pour le backend '{backend.name}'")

        logger.debug("value_and_grad sur le backend '%s' (has_aux=%s)", backend.name, has_aux)
        value, aux, grad = orchestrate(backend, f, handle.raw, has_aux)
        if has_aux:
            return TensorHandle(value), _rewrap(aux), TensorHandle(grad)
        return TensorHandle(value), TensorHandle(grad)

    return fn


def value_and_grad(f: DifferentiableFunction, x: Any) -> Tuple[TensorHandle, TensorHandle]:
    return value_and_grad_fn(f, has_aux=False)(x)


def value_aux_and_grad(f: DifferentiableFunction, x: Any) -> Tuple[TensorHandle, Any, TensorHandle]:
    return value_and_grad_fn(f, has_aux=True)(x)
