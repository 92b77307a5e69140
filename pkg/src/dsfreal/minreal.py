"""Minimal state-space realisation of a dynamical structure function.

The pipeline cascades a diagonal ``N`` in front of ``[I - Q, P]`` so that the
zeros of ``N`` cancel as many poles of ``[I - Q, P]`` as the capacity of each
measured place allows:

1. poles (rank-1 residue modes) and transmission zeros of ``[I - Q, P]``;
2. capacity ``psi`` and Boolean cancellation table ``T``;
3. maximum feasible row selection (``dsfreal.bip``);
4. ``N*`` and ``R* = s (I - N*)``;
5. ``[W, V]`` from ``R*`` and its partitioned realisation.
"""

from __future__ import annotations

import dataclasses
import warnings
from typing import NamedTuple, Sequence

import numpy as np

from . import bip
from .config import get_tolerances
from .dsf import DiagonalRational, Dsf, WvPair, realize_wv
from .errors import DsfError, RankDeficiencyError, SelectionError
from .polymat import RationalFunction
from .sslib import StateSpace
from .tfmat import (PoleMode, TransferMatrix, ZeroMode, normal_rank, poles_with_residues,
                    transmission_zeros)

__all__ = [
    "CancellationPlan",
    "RealizationResult",
    "SpecialCaseResult",
    "capacity_vector",
    "zero_supports",
    "cancellation_table",
    "conjugate_groups",
    "build_n_star",
    "minimal_dsf_realization",
    "special_case_constant_r",
    "plan_report",
]


@dataclasses.dataclass
class CancellationPlan:
    """Everything needed to build ``N*`` for one DSF."""

    zeros: list
    modes: list
    psi: np.ndarray
    table: np.ndarray
    selection: list
    p: int
    n_star: DiagonalRational | None = None

    @property
    def l(self) -> int:
        return len(self.modes)

    @property
    def k(self) -> int:
        return len(self.selection)

    @property
    def predicted_order(self) -> int:
        return self.p + self.l - self.k

    def feasible(self) -> bool:
        return bip.is_feasible(self.table, self.psi, self.selection)


class RealizationResult(NamedTuple):
    system: StateSpace
    plan: CancellationPlan
    r_star: DiagonalRational


class SpecialCaseResult(NamedTuple):
    system: StateSpace
    r_star: DiagonalRational
    plan: CancellationPlan
    fast_path: bool
    notice: str | None


def zero_supports(zeros: Sequence[ZeroMode], p: int) -> list[tuple[complex, np.ndarray]]:
    """Distinct zero locations with the union of their directions' Boolean patterns.

    A location where the rank drops by more than one carries several
    directions; ``N*`` needs one pole there at every place any of them
    touches, never a repeated one.
    """
    out: list[tuple[complex, np.ndarray]] = []
    for z in zeros:
        pattern = np.asarray(z.boolean_v, dtype=bool).reshape(p)
        for t, (loc, sup) in enumerate(out):
            if _same_location(loc, z.location):
                out[t] = (loc, sup | pattern)
                break
        else:
            out.append((z.location, pattern.copy()))
    return out


def capacity_vector(zeros: Sequence[ZeroMode], p: int) -> np.ndarray:
    """``psi[j]`` = number of zero locations whose directions touch place ``j``, plus one."""
    psi = np.ones(p, dtype=np.int64)
    for _, sup in zero_supports(zeros, p):
        psi += sup.astype(np.int64)
    return psi


def cancellation_table(modes: Sequence[PoleMode], p: int | None = None) -> np.ndarray:
    """Boolean table whose row ``i`` is the pattern of ``E_i``."""
    if not modes:
        return np.zeros((0, p or 0), dtype=np.int64)
    table = np.array([np.asarray(m.boolean_e, dtype=np.int64) for m in modes])
    empty = np.flatnonzero(table.sum(axis=1) == 0)
    if empty.size:
        raise DsfError(f"mode {int(empty[0])} has an empty residue direction")
    return table


def _same_location(a: complex, b: complex) -> bool:
    return abs(a - b) <= get_tolerances().tol_pole_merge * max(1.0, abs(a))


def conjugate_groups(modes: Sequence[PoleMode]) -> tuple[tuple[int, ...], ...]:
    """Pair each complex mode with its conjugate; real modes stand alone."""
    taken: set[int] = set()
    groups = []
    for i, m in enumerate(modes):
        if i in taken:
            continue
        taken.add(i)
        if not m.is_complex:
            groups.append((i,))
            continue
        for j in range(i + 1, len(modes)):
            o = modes[j]
            if j not in taken and o.mode_index == m.mode_index and _same_location(o.lam, np.conj(m.lam)):
                taken.add(j)
                groups.append((i, j))
                break
        else:
            raise SelectionError(f"complex mode {i} at {m.lam} has no conjugate partner")
    return tuple(groups)


def _check_selection(plan: CancellationPlan, groups) -> None:
    sel = set(plan.selection)
    if not sel <= set(range(plan.l)):
        raise SelectionError("selection refers to rows outside the table")
    for g in groups:
        if 0 < len(sel.intersection(g)) < len(g):
            raise SelectionError(f"selection splits the conjugate pair {g}")
    if not plan.feasible():
        raise SelectionError("selection exceeds the capacity vector")


def _filler_roots(count: int, j: int, avoid: Sequence[complex]) -> list[float]:
    """Distinct negative reals ``-1 - j - t`` clear of every location in ``avoid``."""
    tol = get_tolerances().tol_pole_merge
    out: list[float] = []
    t = 0.0
    while len(out) < count:
        c = -1.0 - j - t
        if any(abs(c - a) <= tol * max(1.0, abs(a)) for a in list(avoid) + out):
            t += 0.5
            continue
        out.append(c)
        t += 1.0
    return out


def _unique_roots(values: Sequence[complex]) -> list[complex]:
    out: list[complex] = []
    for v in values:
        if not any(_same_location(v, u) for u in out):
            out.append(v)
    return out


def _n_star_factors(plan: CancellationPlan):
    """Per place: ``(n_hat roots, d roots)`` with ``N*[j, j] = n_hat / (s d)``."""
    forbidden = [m.lam for m in plan.modes] + [z.location for z in plan.zeros] + [0.0]
    factors = []
    supports = zero_supports(plan.zeros, plan.p)
    for j in range(plan.p):
        d_roots = [loc for loc, sup in supports if sup[j]]
        wanted = _unique_roots([plan.modes[i].lam for i in plan.selection if plan.table[i, j]])
        spare = len(d_roots) + 1 - len(wanted)
        if spare < 0:
            raise SelectionError(f"place {j} needs {len(wanted)} zeros but has capacity {plan.psi[j]}")
        roots = wanted + _filler_roots(spare, j, forbidden + wanted)
        factors.append((roots, d_roots))
    return factors


def build_n_star(plan: CancellationPlan) -> DiagonalRational:
    """Diagonal ``N*`` with ``N*[j, j] = n_hat_j / (s d_j)`` and unit gains.

    ``d_j`` collects the zeros whose direction touches place ``j``;
    ``n_hat_j`` is monic with the selected poles touching ``j`` as roots,
    topped up with negative real filler roots to degree ``deg d_j + 1``.
    """
    entries = []
    for roots, d_roots in _n_star_factors(plan):
        entries.append(RationalFunction.from_zpk(roots, list(d_roots) + [0.0], 1.0))
    return DiagonalRational(entries)


def _s_times_n(plan: CancellationPlan) -> list[RationalFunction]:
    return [RationalFunction.from_zpk(roots, d_roots, 1.0) for roots, d_roots in _n_star_factors(plan)]


def _make_plan(d: Dsf) -> tuple[CancellationPlan, TransferMatrix, tuple]:
    M = d.iqp()
    p = d.n_measured
    rank = normal_rank(M)
    if rank < p:
        raise RankDeficiencyError(
            f"[I - Q, P] has normal rank {rank} < {p}; the minimal-order construction "
            "requires full normal row rank")
    modes = poles_with_residues(M)
    zeros = transmission_zeros(M)
    table = cancellation_table(modes, p)
    plan = CancellationPlan(zeros=zeros, modes=modes, psi=capacity_vector(zeros, p),
                            table=table, selection=[], p=p)
    return plan, M, conjugate_groups(modes)


def _realise_plan(d: Dsf, plan: CancellationPlan) -> RealizationResult:
    plan.n_star = build_n_star(plan)
    sn = _s_times_n(plan)
    s = RationalFunction.s()
    p = plan.p
    r_star = DiagonalRational([s - f for f in sn])
    w = TransferMatrix.zeros(p, p)
    v = TransferMatrix.zeros(p, d.n_inputs)
    for i in range(p):
        for j in range(p):
            w[i, j] = r_star[i] if i == j else sn[i] * d.q[i, j]
        for k in range(d.n_inputs):
            v[i, k] = sn[i] * d.p_mat[i, k]
    system = realize_wv(WvPair(w, v))
    return RealizationResult(system, plan, r_star)


def minimal_dsf_realization(d: Dsf, selection: Sequence[int] | None = None) -> RealizationResult:
    """Minimal-order partitioned realisation of ``d``.

    Parameters
    ----------
    d : Dsf
    selection : sequence of int, optional
        Rows of the cancellation table to cancel. Defaults to the
        lexicographically smallest optimum of the selection problem.

    Returns
    -------
    RealizationResult
        ``(system, plan, r_star)``; the order of ``system`` is
        ``p + l - k``.

    Raises
    ------
    RankDeficiencyError
        ``[I - Q, P]`` lacks full normal row rank.
    AssumptionViolation
        A repeated pole, or a pole that is also a zero.
    SelectionError
        An explicit selection is infeasible or splits a conjugate pair.
    """
    plan, _, groups = _make_plan(d)
    if selection is None:
        prob = bip.SelectionProblem(plan.table.reshape(plan.l, plan.p), plan.psi, groups)
        plan.selection = bip.solve_selection(prob) if plan.l else []
    else:
        plan.selection = sorted(int(i) for i in selection)
        _check_selection(plan, groups)
    return _realise_plan(d, plan)


def special_case_constant_r(d: Dsf) -> SpecialCaseResult:
    """Zero-free path: constant ``R*`` from a maximum clique.

    Rows are adjacent when their Boolean supports are disjoint. A conjugate
    pair shares one support, so it cannot be cancelled under unit capacity
    and complex modes are left out of the graph. If ``[I - Q, P]`` has
    transmission zeros the general pipeline runs instead and ``notice``
    says so.
    """
    plan, _, groups = _make_plan(d)
    if plan.zeros:
        msg = (f"[I - Q, P] has {len(plan.zeros)} transmission zero(s); "
               "constant R* is not available, used the general construction")
        warnings.warn(msg, stacklevel=2)
        res = minimal_dsf_realization(d)
        return SpecialCaseResult(res.system, res.r_star, res.plan, False, msg)
    real_rows = [i for i, m in enumerate(plan.modes) if not m.is_complex]
    if real_rows:
        adj = bip.compatibility_graph(plan.table[real_rows])
        plan.selection = sorted(real_rows[i] for i in bip.max_clique(adj))
    res = _realise_plan(d, plan)
    return SpecialCaseResult(res.system, res.r_star, plan, True, None)


def _cplx(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def plan_report(result: RealizationResult | SpecialCaseResult, notice: str | None = None) -> dict:
    """JSON-ready summary of a realisation run (numbers not yet rounded)."""
    plan = result.plan
    sys = result.system
    out = {
        "zeros": [{"location": _cplx(z.location), "direction": [_cplx(c) for c in z.left_dir],
                   "boolean": [int(b) for b in z.boolean_v]} for z in plan.zeros],
        "psi": [int(x) for x in plan.psi],
        "table": [{"pole": _cplx(m.lam), "row": [int(b) for b in plan.table[i]]}
                  for i, m in enumerate(plan.modes)],
        "selection": list(plan.selection),
        "k": plan.k,
        "l": plan.l,
        "N_star": plan.n_star.to_json() if plan.n_star is not None else None,
        "R_star": result.r_star.to_json(),
        "order": sys.n,
        "A": sys.a.tolist(),
        "B": sys.b.tolist(),
    }
    if notice:
        out["notice"] = notice
    return out
