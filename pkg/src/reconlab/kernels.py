"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled backend (``reconlab._ckernels``) and the fallback
(``reconlab._pykernels``) implement identical semantics; selection happens
at import time and can be forced with the ``RECONLAB_KERNELS`` environment
variable ("c", "py", or "auto").
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BY_NAME = {"py": _pykernels}
if _ckernels is not None:
    _BY_NAME["c"] = _ckernels

_DEFAULT = _ckernels if _ckernels is not None else _pykernels


def available_backends() -> dict:
    """Name -> module for every importable backend."""
    return dict(_BY_NAME)


def get_backend(name: str | None = None):
    """Resolve a backend by name, env var, or automatic preference."""
    if name is None:
        name = os.environ.get("RECONLAB_KERNELS", "auto")
    name = name.lower()
    if name == "auto":
        return _DEFAULT
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {sorted(_BY_NAME)} or 'auto'"
        ) from None


def backend_name(mod) -> str:
    return getattr(mod, "BACKEND", "?")
