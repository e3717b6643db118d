"""backends/loader.py

Registre des backends builtin.

Une seule instance par backend et par processus : l'appartenance d'un tenseur
se teste par identité de l'instance (voir BaseBackend._check_operands).
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Union

from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.builtin.functional import FunctionalBackend
from tensorbridge.backends.builtin.imperative import ImperativeBackend
from tensorbridge.backends.builtin.plain import PlainBackend
from tensorbridge.backends.builtin.tape import TapeBackend
from tensorbridge.core.errors import UnknownBackend
from tensorbridge.core.logger import get_logger
from tensorbridge.core.types import BackendId

logger = get_logger(__name__)

BackendLike = Union[BaseBackend, BackendId, str]

_REGISTRY: Dict[BackendId, BaseBackend] = {
    BackendId.PLAIN: PlainBackend(),
    BackendId.IMPERATIVE: ImperativeBackend(),
    BackendId.TAPE: TapeBackend(),
    BackendId.FUNCTIONAL: FunctionalBackend(),
}


def get_builtin_backends() -> List[BaseBackend]:
    """Les quatre backends, dans l'ordre de BackendId (ordre du rapport)."""
    return [_REGISTRY[backend_id] for backend_id in BackendId]


def get_backend(backend: BackendLike) -> BaseBackend:
    """Résout un identifiant (ou nom) en instance ; une instance est renvoyée telle quelle."""
    if isinstance(backend, BaseBackend):
        return backend
    return _REGISTRY[BackendId.parse(backend)]


def is_registered(backend: BaseBackend) -> bool:
    return any(backend is b for b in _REGISTRY.values())


def parse_backend_names(names: Iterable[str]) -> List[BaseBackend]:
    """
    "plain,tape" -> [PlainBackend, TapeBackend] (doublons retirés, ordre conservé).

    Lève UnknownBackend sur le premier nom inconnu.
    """
    resolved: List[BaseBackend] = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        backend = get_backend(name)
        if backend not in resolved:
            resolved.append(backend)
    if not resolved:
        raise UnknownBackend("Aucun backend sélectionné")
    logger.debug("Backends sélectionnés : %s", ", ".join(b.name for b in resolved))
    return resolved


def autodiff_backends(backends: Iterable[BaseBackend]) -> List[BaseBackend]:
    return [b for b in backends if b.supports_autodiff]
