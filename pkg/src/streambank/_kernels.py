"""Hot-kernel dispatch: the compiled extension when built, the numpy
fallback otherwise. Selection happens once, at import."""
from __future__ import annotations

try:
    from streambank import _native as _impl

    BACKEND = "native"
except ImportError:  # extension not built
    from streambank import _kernels_py as _impl

    BACKEND = "python"

greedy_select = _impl.greedy_select
nearest_neighbors = _impl.nearest_neighbors


def backend() -> str:
    """Name of the active kernel implementation: "native" or "python"."""
    return BACKEND
