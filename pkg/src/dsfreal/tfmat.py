"""Transfer-function matrices and their pole/zero structure."""

from __future__ import annotations

import dataclasses
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg as sla

from .config import get_tolerances
from .errors import (
    AssumptionViolation,
    DimensionError,
    DomainError,
    PoleHitError,
    ProbingError,
    RankDeficiencyError,
)
from .polymat import Polynomial, RationalFunction, _cluster, root_multiplicities

__all__ = [
    "TransferMatrix",
    "PoleMode",
    "ZeroMode",
    "boolean_pattern",
    "normal_rank",
    "poles_with_residues",
    "transmission_zeros",
    "mcmillan_degree",
    "cascade",
]

# a candidate zero is confirmed when sigma_min / sigma_max of M(z) is below this
ZERO_CONFIRM_TOL = 1e-6


def boolean_pattern(vec, tol_bool: float | None = None) -> np.ndarray:
    """Boolean map of a vector: nonzero where ``|v_k| > tol_bool * max|v|``."""
    v = np.abs(np.asarray(vec))
    if tol_bool is None:
        tol_bool = get_tolerances().tol_bool
    top = v.max() if v.size else 0.0
    if top == 0:
        return np.zeros(v.shape, dtype=bool)
    return v > tol_bool * top


class TransferMatrix:
    """Dense grid of :class:`RationalFunction` entries."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries: Sequence[Sequence[RationalFunction]], *, rows: int | None = None,
                 cols: int | None = None):
        grid = [[e if isinstance(e, RationalFunction) else RationalFunction.constant(e) for e in row]
                for row in entries]
        if rows is None:
            rows = len(grid)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        if len(grid) != rows or any(len(r) != cols for r in grid):
            raise DimensionError(f"grid does not match declared shape {rows}x{cols}")
        self.entries = grid
        self.rows = rows
        self.cols = cols

    # constructors ---------------------------------------------------------
    @classmethod
    def from_constant(cls, mat) -> "TransferMatrix":
        mat = np.atleast_2d(np.asarray(mat))
        return cls([[RationalFunction.constant(x) for x in row] for row in mat],
                   rows=mat.shape[0], cols=mat.shape[1])

    @classmethod
    def identity(cls, n: int) -> "TransferMatrix":
        return cls.from_constant(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "TransferMatrix":
        return cls([[RationalFunction.zero() for _ in range(cols)] for _ in range(rows)],
                   rows=rows, cols=cols)

    @classmethod
    def diag(cls, items: Sequence[RationalFunction]) -> "TransferMatrix":
        n = len(items)
        out = cls.zeros(n, n)
        for i, f in enumerate(items):
            out.entries[i][i] = f if isinstance(f, RationalFunction) else RationalFunction.constant(f)
        return out

    @classmethod
    def from_state_space(cls, a, b, c, d=None) -> "TransferMatrix":
        """``C (sI - A)^-1 B + D`` with every entry reduced."""
        from .sslib import siso_transfer

        a, b, c = (np.atleast_2d(np.asarray(x, dtype=float)) for x in (a, b, c))
        p, m = c.shape[0], b.shape[1]
        if a.size == 0:
            a = np.zeros((0, 0))
        d = np.zeros((p, m)) if d is None else np.atleast_2d(np.asarray(d, dtype=float))
        return cls([[siso_transfer(a, b[:, [j]], c[[i], :], d[i, j]) for j in range(m)] for i in range(p)],
                   rows=p, cols=m)

    # basic ops ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __setitem__(self, idx, value):
        i, j = idx
        self.entries[i][j] = value

    def map(self, fn: Callable[[RationalFunction], RationalFunction]) -> "TransferMatrix":
        return TransferMatrix([[fn(e) for e in row] for row in self.entries], rows=self.rows, cols=self.cols)

    def copy(self) -> "TransferMatrix":
        return self.map(lambda e: e)

    def is_real(self) -> bool:
        return all(e.real for row in self.entries for e in row)

    def is_proper(self) -> bool:
        return all(e.is_proper() for row in self.entries for e in row)

    def is_strictly_proper(self) -> bool:
        return all(e.is_zero() or e.is_strictly_proper() for row in self.entries for e in row)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def __call__(self, s: complex) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                if not e.is_zero():
                    out[i, j] = e(s)
        return out

    def constant_part(self) -> np.ndarray:
        """``lim_{s->inf} M(s)``; raises for improper entries."""
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                out[i, j] = e.constant_part()
        return out

    def split(self) -> tuple[list[list[Polynomial]], "TransferMatrix"]:
        """Polynomial part (as a grid of polynomials) and strictly proper part."""
        polys, rest = [], []
        for row in self.entries:
            pr, rr = [], []
            for e in row:
                q, r = e.split()
                pr.append(q)
                rr.append(r)
            polys.append(pr)
            rest.append(rr)
        return polys, TransferMatrix(rest, rows=self.rows, cols=self.cols)

    def strictly_proper_part(self) -> "TransferMatrix":
        return self.split()[1]

    def hstack(self, other: "TransferMatrix") -> "TransferMatrix":
        if self.rows != other.rows:
            raise DimensionError("row counts differ")
        return TransferMatrix([a + b for a, b in zip(self.entries, other.entries)],
                              rows=self.rows, cols=self.cols + other.cols)

    def columns(self, idx: Iterable[int]) -> "TransferMatrix":
        idx = list(idx)
        return TransferMatrix([[row[j] for j in idx] for row in self.entries], rows=self.rows, cols=len(idx))

    def __add__(self, other: "TransferMatrix") -> "TransferMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return TransferMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
                              rows=self.rows, cols=self.cols)

    def __neg__(self):
        return self.map(lambda e: -e)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f: RationalFunction) -> "TransferMatrix":
        return self.map(lambda e: e * f)

    def __matmul__(self, other):
        return cascade(self, other)

    def poles(self) -> np.ndarray:
        """Distinct pole locations over all entries."""
        return np.array([loc for loc, _ in _pole_locations(self)], dtype=complex)

    def max_pole_magnitude(self) -> float:
        pls = [abs(p) for row in self.entries for e in row if not e.is_zero() for p in e.poles()]
        return max(pls, default=0.0)

    def isclose(self, other: "TransferMatrix", rtol: float = 1e-8) -> bool:
        return self.shape == other.shape and all(
            a.isclose(b, rtol) for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb))

    def __repr__(self):
        return f"TransferMatrix({self.rows}x{self.cols})"

    # serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[e.to_json() for e in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj) -> "TransferMatrix":
        try:
            rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
        except (TypeError, KeyError, ValueError) as exc:
            raise DomainError(f"bad transfer matrix record: {exc}") from exc
        return cls([[RationalFunction.from_json(e) for e in row] for row in entries], rows=rows, cols=cols)


@dataclasses.dataclass(frozen=True)
class PoleMode:
    """One rank-1 term ``e_dir f_row / (s - lam)`` of a residue decomposition.

    ``mode_index`` numbers the rank-1 terms split off one pole location.
    """

    lam: complex
    residue: np.ndarray
    e_dir: np.ndarray
    f_row: np.ndarray
    boolean_e: np.ndarray
    mode_index: int = 0

    @property
    def is_complex(self) -> bool:
        return abs(self.lam.imag) > 0


@dataclasses.dataclass(frozen=True)
class ZeroMode:
    """Transmission zero with a unit-norm left direction (``left_dir @ M(location) ~ 0``)."""

    location: complex
    left_dir: np.ndarray
    boolean_v: np.ndarray


# ---------------------------------------------------------------------------
# normal rank


def _rank(mat: np.ndarray, tol: float | None = None) -> int:
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[0] == 0:
        return 0
    if tol is None:
        tol = get_tolerances().tol_rank
    return int(np.sum(sv > tol * sv[0]))


def probe_points(M: TransferMatrix, k: int, seed: int | None = None) -> Iterable[complex]:
    """Endless stream of probe points on a circle enclosing every pole."""
    tol = get_tolerances()
    rng = np.random.default_rng(tol.seed if seed is None else seed)
    radius = 1.0 + M.max_pole_magnitude()
    while True:
        yield radius * np.exp(2j * np.pi * rng.random())


def normal_rank(M: TransferMatrix, k: int = 5, seed: int | None = None, max_tries: int = 50) -> int:
    """Rank of ``M(s)`` at generic ``s`` (max over ``k`` probe points)."""
    if M.rows == 0 or M.cols == 0:
        raise DimensionError("normal rank of an empty matrix")
    ranks = []
    tries = 0
    for s in probe_points(M, k, seed):
        if len(ranks) == k:
            break
        tries += 1
        if tries > max_tries:
            raise ProbingError("every probe point hit a pole")
        try:
            val = M(s)
        except PoleHitError:
            continue
        ranks.append(_rank(val))
    if not ranks:
        raise ProbingError("every probe point hit a pole")
    return max(ranks)


# ---------------------------------------------------------------------------
# poles and residues


def _pole_locations(M: TransferMatrix, check_simple: bool = False):
    """Distinct pole locations and, for each, the per-entry roots near it.

    Returns a list of ``(location, {(i, j): entry_root})``.
    """
    tol = get_tolerances()
    recs = []
    for i, row in enumerate(M.entries):
        for j, e in enumerate(row):
            if e.is_zero() or e.den.degree == 0:
                continue
            if check_simple:
                for loc, mult in root_multiplicities(e.poles()):
                    if mult > 1:
                        raise AssumptionViolation(
                            f"entry ({i},{j}) has a pole of multiplicity {mult} at {loc:.6g}", location=loc)
            for r in e.poles():
                recs.append((complex(r), (i, j)))
    if not recs:
        return []
    vals = np.array([r for r, _ in recs])
    out = []
    for grp in _cluster(vals, tol.tol_pole_merge):
        loc = complex(np.mean(vals[grp]))
        members = {}
        for g in grp:
            members.setdefault(recs[g][1], recs[g][0])
        out.append((loc, members))
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


def _entry_residue(e: RationalFunction, root: complex) -> complex:
    """Residue of ``e`` at its simple pole ``root`` via denominator deflation."""
    rest = e.den.deflate(root)
    return complex(e.num(root) / rest(root))


def _rank_one_split(K: np.ndarray, tol: float):
    """``K = sum_t e_t f_t`` using a greedy set of independent rows as ``f_t``.

    Returns lists of unit-norm ``e_t`` and matching ``f_t``.
    """
    scale = np.linalg.norm(K)
    if scale == 0:
        return [], []
    chosen: list[int] = []
    for i in range(K.shape[0]):
        row = K[i]
        if np.linalg.norm(row) <= tol * scale:
            continue
        if chosen:
            basis = K[chosen]
            coef, *_ = np.linalg.lstsq(basis.T, row, rcond=None)
            resid = np.linalg.norm(row - coef @ basis)
            if resid <= tol * scale:
                continue
        chosen.append(i)
    F = K[chosen]
    E, *_ = np.linalg.lstsq(F.T, K.T, rcond=None)
    E = E.T  # p x r
    es, fs = [], []
    for t in range(len(chosen)):
        e = E[:, t].copy()
        e[chosen[t]] = 1.0
        nrm = np.linalg.norm(e)
        es.append(e / nrm)
        fs.append(F[t] * nrm)
    return es, fs


def _make_mode(lam, e, f, t) -> PoleMode:
    return PoleMode(lam=complex(lam), residue=np.outer(e, f), e_dir=e, f_row=f,
                    boolean_e=boolean_pattern(e), mode_index=t)


def poles_with_residues(M: TransferMatrix, *, check_zeros: bool = True) -> list[PoleMode]:
    """Rank-1 residue modes of ``M`` ordered by (real, imag, mode index).

    Each distinct pole ``lam`` contributes ``rank(K)`` modes, where
    ``K = lim (s - lam) M(s)``. For real ``M`` the modes at a conjugate
    location are the exact conjugates of each other.

    Raises
    ------
    AssumptionViolation
        An entry has a repeated pole, or (with ``check_zeros``) a pole
        location is also a transmission zero.
    """
    tol = get_tolerances()
    locs = _pole_locations(M, check_simple=True)
    real = M.is_real()
    modes: list[PoleMode] = []
    for loc, members in locs:
        if real and loc.imag < -tol.tol_pole_merge * max(1.0, abs(loc)):
            continue  # filled from the conjugate
        if real and abs(loc.imag) <= tol.tol_pole_merge * max(1.0, abs(loc)):
            loc = complex(loc.real)
        K = np.zeros(M.shape, dtype=complex)
        for (i, j), r in members.items():
            K[i, j] = _entry_residue(M.entries[i][j], r)
        if real and loc.imag == 0:
            K = K.real.astype(complex)
        es, fs = _rank_one_split(K, tol.tol_rank)
        for t, (e, f) in enumerate(zip(es, fs)):
            if real and loc.imag == 0:
                e, f = e.real.astype(complex), f.real.astype(complex)
            modes.append(_make_mode(loc, e, f, t))
            if real and loc.imag > 0:
                modes.append(_make_mode(np.conj(loc), np.conj(e), np.conj(f), t))
    modes.sort(key=lambda m: (round(m.lam.real, 9), round(m.lam.imag, 9), m.mode_index))
    if check_zeros and modes and M.is_proper() and normal_rank(M) == M.rows:
        _check_no_zero_at_poles(M, modes)
    return modes


def _gilbert_arrays(modes: Sequence[PoleMode], D: np.ndarray):
    """Complex diagonal realisation with balanced ``B``/``C`` scaling."""
    n = len(modes)
    p, q = D.shape
    A = np.diag([m.lam for m in modes]).astype(complex) if n else np.zeros((0, 0), dtype=complex)
    B = np.zeros((n, q), dtype=complex)
    C = np.zeros((p, n), dtype=complex)
    for k, m in enumerate(modes):
        w = np.sqrt(np.linalg.norm(m.f_row))
        C[:, k] = m.e_dir * w
        B[k] = m.f_row / w
    return A, B, C, D.astype(complex)


def _pencil(A, B, C, D, z):
    n = A.shape[0]
    top = np.hstack([A - z * np.eye(n), B])
    bot = np.hstack([C, D])
    return np.vstack([top, bot])


def _check_no_zero_at_poles(M: TransferMatrix, modes: Sequence[PoleMode]) -> None:
    A, B, C, D = _gilbert_arrays(modes, M.constant_part())
    n, p = A.shape[0], M.rows
    seen = []
    for m in modes:
        if any(abs(m.lam - x) <= 1e-12 * max(1.0, abs(x)) for x in seen):
            continue
        seen.append(m.lam)
        sv = np.linalg.svd(_pencil(A, B, C, D, m.lam), compute_uv=False)
        if sv[n + p - 1] <= ZERO_CONFIRM_TOL * sv[0]:
            raise AssumptionViolation(f"s={m.lam:.6g} is both a pole and a zero", location=m.lam)


# ---------------------------------------------------------------------------
# zeros


def _phase_normalise(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    small = np.abs(v.imag) <= 1e-12
    v[small] = v[small].real
    return v


def _proper_scaling(M: TransferMatrix):
    """For improper ``M`` return ``M / (s - a)^d`` (proper) and ``a``."""
    d = max((-e.relative_degree for row in M.entries for e in row if not e.is_zero()), default=0)
    if d <= 0:
        return M, None
    rng = np.random.default_rng(get_tolerances().seed + 7)
    a = -(2.0 + M.max_pole_magnitude()) * (1.0 + rng.random())
    f = RationalFunction.from_zpk([], [a] * d, 1.0)
    return M.scale(f), a


def _realisation_for_zeros(M: TransferMatrix):
    try:
        modes = poles_with_residues(M, check_zeros=False)
        return _gilbert_arrays(modes, M.constant_part())
    except AssumptionViolation:
        from .sslib import realize_transfer_matrix

        A, B, C, D = realize_transfer_matrix(M, minimal=True)
        return (A.astype(complex), B.astype(complex), C.astype(complex), D.astype(complex))


def transmission_zeros(M: TransferMatrix) -> list[ZeroMode]:
    """Finite transmission zeros of a full-row-rank ``M`` with left directions.

    Candidates are the finite generalised eigenvalues of the square
    Rosenbrock pencil of ``(A, B Xi, C, D Xi)``, where ``(A, B, C, D)`` is a
    minimal realisation of ``M`` and ``Xi`` a fixed random column
    compression. Each candidate is kept only if ``M(z)`` (or the full system
    pencil, at a pole) genuinely loses rank there. A rank drop of ``r`` at one
    location yields ``r`` zero modes with orthonormal directions.
    """
    p = M.rows
    if normal_rank(M) < p:
        raise RankDeficiencyError(f"normal rank {normal_rank(M)} < {p} rows")
    work, shift = _proper_scaling(M)
    A, B, C, D = _realisation_for_zeros(work)
    n = A.shape[0]
    if n == 0:
        return []
    q = M.cols
    rng = np.random.default_rng(get_tolerances().seed + 1)
    xi = rng.standard_normal((q, p)) + 1j * rng.standard_normal((q, p))
    xi, _ = np.linalg.qr(xi)
    big = np.block([[A, B @ xi], [C, D @ xi]])
    ee = np.zeros((n + p, n + p))
    ee[:n, :n] = np.eye(n)
    alpha, beta = sla.eig(big, ee, right=False, homogeneous_eigvals=True)
    scale = max(1.0, np.linalg.norm(big))
    cand = [alpha[k] / beta[k] for k in range(len(alpha)) if abs(beta[k]) > 1e-10 * abs(alpha[k]) + 1e-300
            and abs(alpha[k] / beta[k]) < 1e8 * scale]
    if not cand:
        return []
    cand = np.array(cand, dtype=complex)
    tol = get_tolerances()
    locs = [complex(np.mean(cand[g])) for g in _cluster(cand, tol.tol_multiple)]
    real = M.is_real()
    pole_locs = list(work.poles())
    out: list[ZeroMode] = []
    for z in sorted(locs, key=lambda c: (round(c.real, 9), round(c.imag, 9))):
        if shift is not None and abs(z - shift) <= 1e-6 * max(1.0, abs(shift)):
            continue
        if real and z.imag < -1e-9 * max(1.0, abs(z)):
            continue
        if real and abs(z.imag) <= 1e-9 * max(1.0, abs(z)):
            z = complex(z.real)
        at_pole = any(abs(z - pl) <= tol.tol_pole_merge * max(1.0, abs(pl)) for pl in pole_locs)
        dirs = _zero_directions(M, (A, B, C, D), z, at_pole)
        for v in dirs:
            out.append(ZeroMode(location=z, left_dir=v, boolean_v=boolean_pattern(v)))
            if real and z.imag > 0:
                vc = np.conj(v)
                out.append(ZeroMode(location=np.conj(z), left_dir=vc, boolean_v=boolean_pattern(vc)))
    out.sort(key=lambda zm: (round(zm.location.real, 9), round(zm.location.imag, 9)))
    return out


def _local_scale(M, z) -> float:
    """Largest singular value of ``M`` at a few points around ``z``."""
    r = 0.5 * max(1.0, abs(z))
    best = 0.0
    for k in range(3):
        w = z + r * np.exp(1j * (0.4 + 2.1 * k))
        try:
            best = max(best, float(np.linalg.svd(M(w), compute_uv=False)[0]))
        except PoleHitError:
            continue
    return best


def _zero_directions(M, realisation, z, at_pole) -> list[np.ndarray]:
    p = M.rows
    if not at_pole:
        val = M(z)
        U, sv, _ = np.linalg.svd(val)
        # M(z) may vanish outright, so the scale comes from nearby points too
        ref = max(sv[0], _local_scale(M, z))
        if ref == 0:
            return []
        sv_full = np.concatenate([sv, np.zeros(p - len(sv))])
        idx = [k for k in range(p) if sv_full[k] <= ZERO_CONFIRM_TOL * ref]
        vecs = [np.conj(U[:, k]) for k in idx]
    else:
        A, B, C, D = realisation
        n = A.shape[0]
        P = _pencil(A, B, C, D, z)
        U, sv, _ = np.linalg.svd(P)
        idx = [k for k in range(n + p) if sv[k] <= ZERO_CONFIRM_TOL * sv[0]]
        vecs = [np.conj(U[n:, k]) for k in idx if np.linalg.norm(U[n:, k]) > 1e-12]
    if len(vecs) > 1:
        Qm, _ = np.linalg.qr(np.array(vecs).T)
        vecs = [Qm[:, k] for k in range(Qm.shape[1])]
    return [_phase_normalise(v) for v in vecs]


# ---------------------------------------------------------------------------
# degree


def _polynomial_part_degree(polys: list[list[Polynomial]]) -> int:
    """McMillan degree of the pole at infinity (block-Hankel rank)."""
    top = max((q.degree for row in polys for q in row), default=0)
    if top < 1:
        return 0
    p, m = len(polys), len(polys[0])
    coef = np.zeros((top + 1, p, m), dtype=complex)
    for i, row in enumerate(polys):
        for j, q in enumerate(row):
            if not q.is_zero():
                coef[: q.degree + 1, i, j] = q.coeffs
    blocks = [[coef[i + j + 1] if i + j + 1 <= top else np.zeros((p, m)) for j in range(top)] for i in range(top)]
    return _rank(np.block(blocks))


def mcmillan_degree(M: TransferMatrix) -> int:
    """Order of a minimal realisation of ``M`` (polynomial part included)."""
    polys, sp = M.split()
    deg = _polynomial_part_degree(polys)
    if sp.is_zero():
        return deg
    try:
        modes = poles_with_residues(sp, check_zeros=False)
        return deg + len(modes)
    except AssumptionViolation:
        from .sslib import realize_transfer_matrix

        A, *_ = realize_transfer_matrix(sp, minimal=True)
        return deg + A.shape[0]


def cascade(N: TransferMatrix, M: TransferMatrix) -> TransferMatrix:
    """Reduced product ``N M``."""
    if N.cols != M.rows:
        raise DimensionError(f"cannot multiply {N.shape} by {M.shape}")
    out = []
    for i in range(N.rows):
        row = []
        for j in range(M.cols):
            acc = RationalFunction.zero()
            for k in range(N.cols):
                a, b = N.entries[i][k], M.entries[k][j]
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            row.append(acc)
        out.append(row)
    return TransferMatrix(out, rows=N.rows, cols=M.cols)
