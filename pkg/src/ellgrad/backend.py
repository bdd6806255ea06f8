"""Backend selection: compiled kernels when available, pure Python otherwise.

The hot kernels (expression VM, rational grid scan, radial integrator) have
two interchangeable implementations: ``ellgrad._core`` (Cython) and
``ellgrad._pure``. At import time the compiled one is picked when it can be
loaded; set ``ELLGRAD_BACKEND=pure`` or ``ELLGRAD_BACKEND=compiled`` to force
a choice. ``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

from . import _pure

_COMPILED = None
try:
    from . import _core as _COMPILED  # type: ignore[no-redef]
except ImportError:
    _COMPILED = None

_FORCED = os.environ.get("ELLGRAD_BACKEND", "").strip().lower()


def available_backends() -> dict:
    """Name -> module map of importable backends."""
    out = {"pure": _pure}
    if _COMPILED is not None:
        out["compiled"] = _COMPILED
    return out

def get_backend(name: str | None = None):
    """Return a backend module by name, or the active default."""
    if name is None:
        return _ACTIVE
    avail = available_backends()
    if name not in avail:
        raise ValueError(
            f"backend {name!r} not available (have: {', '.join(sorted(avail))})"
        )
    return avail[name]


def _select_default():
    if _FORCED:
        return get_backend(_FORCED)
    return _COMPILED if _COMPILED is not None else _pure


if _FORCED and _FORCED not in ("pure", "compiled"):
    raise ValueError(f"ELLGRAD_BACKEND must be 'pure' or 'compiled', got {_FORCED!r}")
if _FORCED == "compiled" and _COMPILED is None:
    raise ImportError("ELLGRAD_BACKEND=compiled but ellgrad._core is not built")

_ACTIVE = _select_default()


def active_backend():
    """The backend used when callers do not pass one explicitly."""
    return _ACTIVE
