"""Backend selection for the hot numeric kernels.

Two interchangeable implementations exist: `numba_backend` (JIT-compiled,
default when numba imports) and `numpy_backend` (pure vectorized numpy).
`PYREWATCH_BACKEND=numba|numpy` picks one process-wide; library calls can also
pass `backend=` explicitly.  `PYREWATCH_THREADS` caps the worker threads used
by the parallel Monte Carlo kernel and the planner's cell pool; requests are
clamped to what the numba runtime was started with.
"""

from __future__ import annotations

import importlib
import os

from ..errors import ScenarioError

__all__ = ["BACKENDS", "numba_available", "resolve_backend", "get_backend", "resolve_threads"]

BACKENDS = ("numba", "numpy")

_modules: dict[str, object] = {}


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def resolve_backend(name: str | None = None) -> str:
    chosen = name or os.environ.get("PYREWATCH_BACKEND") or ""
    chosen = chosen.strip().lower()
    if not chosen:
        chosen = "numba" if numba_available() else "numpy"
    if chosen not in BACKENDS:
        raise ScenarioError(
            f"unknown backend {chosen!r}; valid choices: {', '.join(BACKENDS)}"
        )
    if chosen == "numba" and not numba_available():
        raise ScenarioError("numba backend requested but numba is not importable")
    return chosen


def get_backend(name: str | None = None):
    chosen = resolve_backend(name)
    if chosen not in _modules:
        _modules[chosen] = importlib.import_module(f".{chosen}_backend", __package__)
    return _modules[chosen]


def resolve_threads() -> int:
    """Worker thread budget: PYREWATCH_THREADS clamped to the runtime maximum."""
    raw = os.environ.get("PYREWATCH_THREADS", "").strip()
    want = 0
    if raw:
        try:
            want = int(raw)
        except ValueError as exc:
            raise ScenarioError(f"PYREWATCH_THREADS must be an integer, got {raw!r}") from exc
        if want < 1:
            raise ScenarioError(f"PYREWATCH_THREADS must be >= 1, got {want}")
    if numba_available():
        import numba

        cap = int(numba.config.NUMBA_NUM_THREADS)
    else:
        cap = os.cpu_count() or 1
    return min(want, cap) if want else cap
