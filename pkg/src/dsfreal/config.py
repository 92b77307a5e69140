"""Global numerical tolerances.

All modules read tolerances through :func:`get_tolerances`, so a single
``with tolerances(...)`` block changes behaviour consistently.
"""

from __future__ import annotations

import contextlib
import dataclasses
import threading


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    Attributes
    ----------
    tol_cluster : float
        Two roots are treated as equal when ``|r1 - r2| <= tol_cluster * max(1, |r1|)``.
    tol_rank : float
        Singular values below ``tol_rank * sigma_max`` count as zero.
    tol_bool : float
        Entries below ``tol_bool * max|v|`` are zero for the Boolean map.
    tol_multiple : float
        Roots of one polynomial closer than this (relative) are merged into
        a multiple root and replaced by their mean.
    tol_pole_merge : float
        Poles taken from different matrix entries closer than this (relative)
        are one pole location.
    seed : int
        Seed for probe points (normal rank, projections).
    """

    tol_cluster: float = 1e-8
    tol_rank: float = 1e-8
    tol_bool: float = 1e-7
    tol_multiple: float = 1e-5
    tol_pole_merge: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name != "seed" and not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be positive")


_state = threading.local()


def get_tolerances() -> Tolerances:
    tol = getattr(_state, "tol", None)
    if tol is None:
        tol = _state.tol = Tolerances()
    return tol


def set_tolerances(**overrides) -> Tolerances:
    """Replace the active tolerances for the current thread; returns the old ones."""
    old = get_tolerances()
    _state.tol = dataclasses.replace(old, **overrides)
    return old


@contextlib.contextmanager
def tolerances(**overrides):
    old = set_tolerances(**overrides)
    try:
        yield get_tolerances()
    finally:
        _state.tol = old
