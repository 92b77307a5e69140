"""Exact solvers for the row-selection problem.

``max |S|`` subject to ``sum_{i in S} T[i, :] <= psi``, with rows optionally
tied into groups that are taken or dropped together. The hot loops live in
a compiled extension when it is built; set ``DSFREAL_PURE_PYTHON=1`` to
force the pure-Python kernels.
"""

from __future__ import annotations

import dataclasses
import os
from typing import Sequence

import numpy as np

from . import _kernels_py

if os.environ.get("DSFREAL_PURE_PYTHON"):
    _fast = None
else:
    try:
        from . import _kernels as _fast
    except ImportError:  # extension not built
        _fast = None

BACKEND = "compiled" if _fast is not None else "python"

#: groups up to this count are solved by full enumeration
EXHAUSTIVE_LIMIT = 20

__all__ = [
    "BACKEND",
    "EXHAUSTIVE_LIMIT",
    "SelectionProblem",
    "solve_selection",
    "max_clique",
    "compatibility_graph",
    "is_feasible",
]


@dataclasses.dataclass(frozen=True)
class SelectionProblem:
    """Boolean ``table`` (l x p), integer ``capacity`` (p,) and optional ``groups``.

    ``groups`` partitions ``range(l)``; a group costs the sum of its rows in
    every column and counts as its size in the objective. Without groups
    each row is its own group.
    """

    table: np.ndarray
    capacity: np.ndarray
    groups: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        t = np.asarray(self.table)
        t = t.reshape(t.shape[0] if t.size else len(t), -1) if t.ndim != 2 else t
        cap = np.asarray(self.capacity, dtype=np.int64).ravel()
        if t.size and not np.isin(t, (0, 1)).all():
            raise ValueError("table entries must be 0 or 1")
        t = t.astype(np.int64)
        if t.shape[0] and t.shape[1] != cap.size:
            raise ValueError(f"table has {t.shape[1]} columns, capacity has {cap.size}")
        if (cap < 1).any():
            raise ValueError("capacity entries must be at least 1")
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "capacity", cap)
        if self.groups is not None:
            groups = tuple(tuple(sorted(int(i) for i in g)) for g in self.groups)
            flat = sorted(i for g in groups for i in g)
            if flat != list(range(t.shape[0])) or any(not g for g in groups):
                raise ValueError("groups must partition the table rows")
            object.__setattr__(self, "groups", tuple(sorted(groups)))

    @property
    def n_rows(self) -> int:
        return self.table.shape[0]

    def group_list(self) -> tuple[tuple[int, ...], ...]:
        if self.groups is None:
            return tuple((i,) for i in range(self.n_rows))
        return self.groups


def is_feasible(table, capacity, selection: Sequence[int]) -> bool:
    """Whether the selected rows respect the column capacities."""
    t = np.asarray(table, dtype=np.int64)
    sel = list(selection)
    if not sel:
        return True
    return bool((t[sel].sum(axis=0) <= np.asarray(capacity)).all())


def solve_selection(prob: SelectionProblem, method: str = "auto") -> list[int]:
    """Maximum-cardinality feasible row set, lexicographically smallest among optima.

    Parameters
    ----------
    prob : SelectionProblem
    method : {"auto", "exhaustive", "branch_bound"}
        ``auto`` enumerates when there are at most ``EXHAUSTIVE_LIMIT``
        groups and branches otherwise.

    Returns
    -------
    list of int
        Sorted row indices. With groups, ties are broken on the group index
        sequence (groups ordered by their smallest row).
    """
    groups = prob.group_list()
    if not groups:
        return []
    costs = [[int(v) for v in prob.table[list(g)].sum(axis=0)] for g in groups]
    weights = [len(g) for g in groups]
    cap = [int(v) for v in prob.capacity]
    if method == "auto":
        method = "exhaustive" if len(groups) <= EXHAUSTIVE_LIMIT else "branch_bound"
    if method not in ("exhaustive", "branch_bound"):
        raise ValueError(f"unknown method {method!r}")
    kernels = _fast if _fast is not None and len(groups) <= 63 else _kernels_py
    picked, _ = getattr(kernels, method)(costs, weights, cap)
    return sorted(i for gi in picked for i in groups[gi])


def compatibility_graph(table) -> np.ndarray:
    """Adjacency with an edge between rows whose Boolean supports are disjoint."""
    t = np.asarray(table, dtype=np.int64)
    adj = (t @ t.T) == 0
    np.fill_diagonal(adj, False)
    return adj


def max_clique(adjacency) -> list[int]:
    """Maximum clique of a symmetric hollow Boolean adjacency matrix.

    Branch-and-bound with a greedy-colouring bound, branching in vertex
    order; the lexicographically smallest maximum clique is returned.
    """
    adj = np.asarray(adjacency, dtype=bool)
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ValueError("adjacency must be square")
    if n == 0:
        return []
    if (adj != adj.T).any() or adj.diagonal().any():
        raise ValueError("adjacency must be symmetric and hollow")
    rows = [sum(1 << int(j) for j in np.flatnonzero(adj[i])) for i in range(n)]
    kernels = _fast if _fast is not None and n <= 64 else _kernels_py
    return kernels.max_clique(rows)
