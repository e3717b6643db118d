"""tensor/conversion.py

Conversion natif <-> façade, sans copie.

    x = astensor(native)          # handle
    x, restore = astensor_(arg)   # + fonction qui rend le type d'entrée
    return restore(x.square())    # natif si arg était natif, handle sinon
"""

from __future__ import annotations

from typing import Any, Tuple

from tensorbridge.backends.native import NativeTensor
from tensorbridge.core.errors import InvalidArgument, MixedBackends, UnknownBackend
from tensorbridge.tensor.handle import TensorHandle

NATIVE = "native"
HANDLE = "handle"


def astensor(x: Any) -> TensorHandle:
    if isinstance(x, TensorHandle):
        return x
    if isinstance(x, NativeTensor):
        return TensorHandle(x)
    raise UnknownBackend(f"Objet non reconnu comme tenseur d'un backend : {type(x).__name__}")


def astensors(*xs: Any) -> Tuple[TensorHandle, ...]:
    handles = []
    for index, x in enumerate(xs):
        try:
            handles.append(astensor(x))
        except UnknownBackend as exc:
            raise UnknownBackend(f"Argument {index} : {exc}", index=index) from None
    return tuple(handles)


class RestoreFn:
    """Rend un handle sous la forme de l'entrée d'origine (natif ou handle)."""

    __slots__ = ("kinds",)

    def __init__(self, kinds: Tuple[str, ...]) -> None:
        self.kinds = kinds

    @property
    def restores_native(self) -> bool:
        return self.kinds[0] == NATIVE

    def __call__(self, handle: TensorHandle) -> Any:
        if not isinstance(handle, TensorHandle):
            raise InvalidArgument(f"RestoreFn attend un TensorHandle, reçu {type(handle).__name__}")
        return handle.raw if self.restores_native else handle

    def __repr__(self) -> str:
        return f"RestoreFn({', '.join(self.kinds)})"


def _kind_of(x: Any) -> str:
    return HANDLE if isinstance(x, TensorHandle) else NATIVE


def astensor_(x: Any) -> Tuple[TensorHandle, RestoreFn]:
    return astensor(x), RestoreFn((_kind_of(x),))


def astensors_(*xs: Any) -> Tuple[Tuple[TensorHandle, ...], RestoreFn]:
    """La forme restituée est celle de la PREMIÈRE entrée."""
    if not xs:
        raise InvalidArgument("astensors_() attend au moins une entrée")
    handles = astensors(*xs)
    owner = handles[0].raw.backend
    for index, h in enumerate(handles[1:], start=1):
        if h.raw.backend is not owner:
            raise MixedBackends(
                f"Entrée {index} sur le backend '{h.raw.backend.name}', entrée 0 sur '{owner.name}'"
            )
    return handles, RestoreFn(tuple(_kind_of(x) for x in xs))


def raw(handle: TensorHandle) -> NativeTensor:
    if not isinstance(handle, TensorHandle):
        raise InvalidArgument(f"raw() attend un TensorHandle, reçu {type(handle).__name__}")
    return handle.raw
