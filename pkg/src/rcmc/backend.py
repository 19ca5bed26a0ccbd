"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled module :mod:`rcmc._native` implements the hot inner loops; it
is optional and the package works without it (slowly).  Selection happens
at import, may be forced with the RCMC_BACKEND environment variable, and
can be overridden per run via :func:`use`.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _native
except ImportError:  # extension not built; pure-Python fallback
    _native = None

_env = os.environ.get("RCMC_BACKEND", "auto").strip().lower()
_override: str | None = None


def available() -> tuple[str, ...]:
    return ("python", "native") if _native is not None else ("python",)


def current() -> str:
    """Name of the backend that kernels() will return."""
    choice = _override or _env
    if choice in ("", "auto"):
        return "native" if _native is not None else "python"
    if choice == "native" and _native is None:
        raise RuntimeError("native backend requested but rcmc._native is not built")
    if choice not in ("native", "python"):
        raise ValueError(f"unknown backend {choice!r}")
    return choice


def kernels():
    """The active kernel module (rcmc._native or rcmc._pykernels)."""
    return _native if current() == "native" else _pykernels


def use(name: str | None) -> None:
    """Force a backend ('python' / 'native' / None to restore auto)."""
    global _override
    if name is not None and name not in ("python", "native", "auto"):
        raise ValueError(f"unknown backend {name!r}")
    _override = None if name in (None, "auto") else name
