"""Dynamical structure functions ``[Q, P]``.

``Y = Q Y + P U`` with ``Q`` hollow. Going from a partitioned state-space
model to ``[Q, P]`` loses the diagonal ``R``; going back needs a choice of
``R`` (:func:`wv_from_r`) and a realisation of the resulting ``[W, V]``
(:func:`realize_wv`).
"""

from __future__ import annotations

import dataclasses
from typing import Sequence

import numpy as np

from .errors import AssumptionViolation, ContractError, DimensionError
from .polymat import RationalFunction
from .sslib import StateSpace, gilbert_realize, realize_transfer_matrix, siso_transfer
from .tfmat import TransferMatrix, cascade

__all__ = [
    "Dsf",
    "WvPair",
    "DiagonalRational",
    "dsf_from_ss",
    "final_value_checks",
    "tf_from_dsf",
    "wv_from_r",
    "realize_wv",
    "rational_inverse",
]


@dataclasses.dataclass
class DiagonalRational:
    """Diagonal of ``R`` or ``N`` as a list of scalar rational functions."""

    entries: list

    def __post_init__(self):
        self.entries = [e if isinstance(e, RationalFunction) else RationalFunction.constant(e)
                        for e in self.entries]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, j):
        return self.entries[j]

    def as_matrix(self) -> TransferMatrix:
        return TransferMatrix.diag(self.entries)

    def is_proper(self) -> bool:
        """Membership in the proper diagonal class used for ``R``."""
        return all(e.is_proper() for e in self.entries)

    def is_constant(self) -> bool:
        return all(e.is_zero() or e.den.degree == 0 and e.num.degree <= 0 for e in self.entries)

    def is_n_form(self, rtol: float = 1e-9) -> bool:
        """Whether ``N = I - R/s`` for some proper diagonal ``R``."""
        s = RationalFunction.s()
        return all((s * (1 - e)).is_proper() and abs(e.constant_part() - 1) <= rtol
                   for e in self.entries)

    def n_from_r(self) -> "DiagonalRational":
        s = RationalFunction.s()
        return DiagonalRational([1 - e / s for e in self.entries])

    def r_from_n(self) -> "DiagonalRational":
        s = RationalFunction.s()
        return DiagonalRational([s * (1 - e) for e in self.entries])

    def constant_values(self) -> np.ndarray:
        return np.array([e.constant_part() for e in self.entries])

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]


@dataclasses.dataclass
class Dsf:
    """Dynamical structure function: hollow ``q`` (p x p) and ``p_mat`` (p x m).

    ``r`` optionally records the diagonal ``R`` used to build the pair; it is
    not part of the DSF itself.
    """

    q: TransferMatrix
    p_mat: TransferMatrix
    r: DiagonalRational | None = None

    def __post_init__(self):
        q, pm = self.q, self.p_mat
        if q.rows != q.cols:
            raise DimensionError("Q must be square")
        if pm.rows != q.rows:
            raise DimensionError("Q and P must have the same number of rows")
        for i in range(q.rows):
            if not q[i, i].is_zero():
                raise ContractError(f"Q[{i},{i}] must be identically zero")
        for name, mat in (("Q", q), ("P", pm)):
            for i in range(mat.rows):
                for j in range(mat.cols):
                    e = mat[i, j]
                    if not e.is_zero() and not e.is_strictly_proper():
                        raise ContractError(f"{name}[{i},{j}] is not strictly proper")

    @property
    def n_measured(self) -> int:
        return self.q.rows

    @property
    def n_inputs(self) -> int:
        return self.p_mat.cols

    def iqp(self) -> TransferMatrix:
        """``[I - Q, P]``."""
        return (TransferMatrix.identity(self.n_measured) - self.q).hstack(self.p_mat)

    def __call__(self, s):
        return self.q(s), self.p_mat(s)

    def to_json(self) -> dict:
        return {"Q": self.q.to_json(), "P": self.p_mat.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Dsf":
        if not isinstance(obj, dict) or "Q" not in obj or "P" not in obj:
            raise ContractError("DSF record needs 'Q' and 'P'")
        return cls(TransferMatrix.from_json(obj["Q"]), TransferMatrix.from_json(obj["P"]))


@dataclasses.dataclass
class WvPair:
    """``[W, V]`` with proper entries: ``s Y = W Y + V U``."""

    w: TransferMatrix
    v: TransferMatrix

    def __post_init__(self):
        if not (self.w.is_proper() and self.v.is_proper()):
            raise ContractError("W and V must be proper")

    def stacked(self) -> TransferMatrix:
        return self.w.hstack(self.v)


def _divide_rows(mat: TransferMatrix, denoms: Sequence[RationalFunction]) -> TransferMatrix:
    out = mat.copy()
    for i, dnm in enumerate(denoms):
        inv = dnm.inverse()
        for j in range(mat.cols):
            if not mat[i, j].is_zero():
                out[i, j] = mat[i, j] * inv
    return out


def dsf_from_ss(sys: StateSpace) -> Dsf:
    """``[Q, P]`` of a partitioned system.

    ``W = A11 + A12 (sI - A22)^-1 A21``, ``V = B1 + A12 (sI - A22)^-1 B2``,
    ``R = diag W``, ``Q = (sI - R)^-1 (W - R)``, ``P = (sI - R)^-1 V``.
    """
    p, m = sys.p, sys.m
    a22, a12, a21, b2 = sys.a22, sys.a12, sys.a21, sys.b2
    w = TransferMatrix([[siso_transfer(a22, a21[:, [j]], a12[[i], :], sys.a11[i, j]) for j in range(p)]
                        for i in range(p)], rows=p, cols=p)
    v = TransferMatrix([[siso_transfer(a22, b2[:, [k]], a12[[i], :], sys.b1[i, k]) for k in range(m)]
                        for i in range(p)], rows=p, cols=m)
    r = DiagonalRational([w[i, i] for i in range(p)])
    s = RationalFunction.s()
    denoms = [s - r[i] for i in range(p)]
    off = w.copy()
    for i in range(p):
        off[i, i] = RationalFunction.zero()
    return Dsf(_divide_rows(off, denoms), _divide_rows(v, denoms), r=r)


def _fv_limit(e: RationalFunction, where: str) -> float:
    if e.is_zero():
        return 0.0
    rd = e.relative_degree
    if rd < 1:
        raise ContractError(f"{where} is not strictly proper")
    return float(np.real(e.gain)) if rd == 1 else 0.0


def final_value_checks(d: Dsf, r: DiagonalRational | None = None):
    """Limits read off leading coefficients.

    Returns ``(lim R, lim sQ, lim sP)``. ``lim R`` needs the diagonal ``R``
    that produced ``d`` (argument ``r`` or ``d.r``); a DSF alone does not
    determine it, so ``None`` is returned in that case.
    """
    p, m = d.n_measured, d.n_inputs
    sq = np.array([[_fv_limit(d.q[i, j], f"Q[{i},{j}]") for j in range(p)] for i in range(p)]).reshape(p, p)
    sp = np.array([[_fv_limit(d.p_mat[i, k], f"P[{i},{k}]") for k in range(m)] for i in range(p)]).reshape(p, m)
    r = r if r is not None else d.r
    diag = None
    if r is not None:
        if not r.is_proper():
            raise ContractError("R must be proper")
        diag = np.real(r.constant_values())
    return diag, sq, sp


def _det(mat: list[list[RationalFunction]]) -> RationalFunction:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    acc = RationalFunction.zero()
    for j in range(n):
        if mat[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def rational_inverse(M: TransferMatrix) -> TransferMatrix:
    """Inverse of a square rational matrix.

    Cofactor expansion up to 4x4, Gauss-Jordan elimination above that.

    Raises
    ------
    ContractError
        If ``M`` is singular as a rational matrix.
    """
    n = M.rows
    if M.cols != n:
        raise DimensionError("inverse of a non-square matrix")
    grid = [list(row) for row in M.entries]
    if n <= 4:
        det = _det(grid)
        if det.is_zero():
            raise ContractError("matrix is singular as a rational matrix")
        inv_det = det.inverse()
        out = TransferMatrix.zeros(n, n)
        for i in range(n):
            for j in range(n):
                minor = [row[:i] + row[i + 1:] for k, row in enumerate(grid) if k != j]
                c = _det(minor) if n > 1 else RationalFunction.one()
                if not c.is_zero():
                    out[i, j] = c * inv_det if (i + j) % 2 == 0 else -(c * inv_det)
        return out
    aug = [row + [RationalFunction.constant(float(i == k)) for k in range(n)] for i, row in enumerate(grid)]
    rng = np.random.default_rng(3)
    probe = complex(rng.normal(), 1 + rng.random()) * (1 + M.max_pole_magnitude())
    for col in range(n):
        best, best_val = None, 0.0
        for r in range(col, n):
            if aug[r][col].is_zero():
                continue
            val = abs(aug[r][col](probe))
            if val > best_val:
                best, best_val = r, val
        if best is None:
            raise ContractError("matrix is singular as a rational matrix")
        aug[col], aug[best] = aug[best], aug[col]
        piv_inv = aug[col][col].inverse()
        aug[col] = [e * piv_inv if not e.is_zero() else e for e in aug[col]]
        for r in range(n):
            if r == col or aug[r][col].is_zero():
                continue
            f = aug[r][col]
            aug[r] = [a - f * b if not b.is_zero() else a for a, b in zip(aug[r], aug[col])]
    return TransferMatrix([row[n:] for row in aug], rows=n, cols=n)


def tf_from_dsf(d: Dsf) -> TransferMatrix:
    """Transfer matrix ``G = (I - Q)^-1 P``."""
    iq = TransferMatrix.identity(d.n_measured) - d.q
    return cascade(rational_inverse(iq), d.p_mat)


def wv_from_r(d: Dsf, r: DiagonalRational) -> WvPair:
    """``[W, V] = [(sI - R) Q + R, (sI - R) P]`` for a proper diagonal ``R``."""
    p = d.n_measured
    if len(r) != p:
        raise DimensionError(f"R has {len(r)} entries, expected {p}")
    if not r.is_proper():
        raise ContractError("R must be proper")
    s = RationalFunction.s()
    w = TransferMatrix.zeros(p, p)
    v = TransferMatrix.zeros(p, d.n_inputs)
    for i in range(p):
        f = s - r[i]
        for j in range(p):
            w[i, j] = r[i] if i == j else (f * d.q[i, j] if not d.q[i, j].is_zero() else d.q[i, j])
        for k in range(d.n_inputs):
            v[i, k] = f * d.p_mat[i, k] if not d.p_mat[i, k].is_zero() else d.p_mat[i, k]
    return WvPair(w, v)


def realize_wv(wv: WvPair) -> StateSpace:
    """Partitioned realisation of ``[W, V]``.

    ``A11``, ``B1`` are the values at infinity; the strictly proper part is
    realised minimally as ``A12 (sI - A22)^-1 [A21 B2]``.
    """
    p = wv.w.rows
    m = wv.v.cols
    stacked = wv.stacked()
    if not stacked.is_real():
        raise ContractError("[W, V] must have real coefficients")
    const = stacked.constant_part().real
    sp = stacked.strictly_proper_part()
    try:
        ah, bh, ch, _ = gilbert_realize(sp, real=True)
    except AssumptionViolation:
        ah, bh, ch, _ = realize_transfer_matrix(sp, minimal=True)
    h = ah.shape[0]
    n = p + h
    a = np.zeros((n, n))
    b = np.zeros((n, m))
    a[:p, :p] = const[:, :p]
    b[:p] = const[:, p:]
    if h:
        a[:p, p:] = ch
        a[p:, p:] = ah
        a[p:, :p] = bh[:, :p]
        b[p:] = bh[:, p:]
    return StateSpace(a, b, p)
