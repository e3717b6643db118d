from tensorbridge.backends.base_backend import BaseBackend
from tensorbridge.backends.loader import get_backend, get_builtin_backends, parse_backend_names
from tensorbridge.backends.native import NativeTensor, native_allocations

__all__ = [
    "BaseBackend",
    "NativeTensor",
    "get_backend",
    "get_builtin_backends",
    "native_allocations",
    "parse_backend_names",
]
