"""Partitioned state-space systems ``(A, B, C = [I_p 0])`` and realisation tools."""

from __future__ import annotations

import dataclasses

import numpy as np

from .config import get_tolerances
from .errors import ContractError, DimensionError, DomainError
from .polymat import Polynomial, RationalFunction, _cluster, match_roots, root_multiplicities
from .tfmat import TransferMatrix, poles_with_residues

__all__ = [
    "StateSpace",
    "pbh_observable",
    "pbh_controllable",
    "hidden_observable",
    "hidden_controllable",
    "hidden_transform",
    "gilbert_realize",
    "realize_transfer_matrix",
    "minimal_reduce",
    "siso_transfer",
]


@dataclasses.dataclass(frozen=True)
class StateSpace:
    """``x' = A x + B u``, ``y = [I_p 0] x``.

    The first ``p`` states are measured; the remaining ``h = n - p`` are hidden.
    """

    a: np.ndarray
    b: np.ndarray
    p: int

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError(f"A must be square, got {a.shape}")
        if b.shape[0] != n:
            raise DimensionError(f"B has {b.shape[0]} rows, A has {n}")
        if not 0 < self.p <= n:
            raise DimensionError(f"need 0 < p <= n, got p={self.p}, n={n}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise DomainError("non-finite system matrix")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]

    @property
    def h(self) -> int:
        return self.n - self.p

    @property
    def c(self) -> np.ndarray:
        return np.eye(self.p, self.n)

    @property
    def a11(self):
        return self.a[: self.p, : self.p]

    @property
    def a12(self):
        return self.a[: self.p, self.p:]

    @property
    def a21(self):
        return self.a[self.p:, : self.p]

    @property
    def a22(self):
        return self.a[self.p:, self.p:]

    @property
    def b1(self):
        return self.b[: self.p]

    @property
    def b2(self):
        return self.b[self.p:]

    def transfer_matrix(self) -> TransferMatrix:
        """``G = [I 0] (sI - A)^-1 B``."""
        return TransferMatrix.from_state_space(self.a, self.b, self.c)

    def to_json(self) -> dict:
        return {"A": self.a.tolist(), "B": self.b.tolist(), "p": int(self.p)}

    @classmethod
    def from_json(cls, obj) -> "StateSpace":
        if not isinstance(obj, dict):
            raise ContractError("state-space record must be a JSON object")
        if "C" in obj:
            raise ContractError("explicit 'C' is not accepted: outputs are always C = [I_p 0]")
        missing = [k for k in ("A", "B", "p") if k not in obj]
        if missing:
            raise ContractError(f"state-space record lacks field(s) {missing}")
        try:
            return cls(np.array(obj["A"], dtype=float), np.array(obj["B"], dtype=float), int(obj["p"]))
        except (ValueError, TypeError) as exc:
            raise ContractError(f"malformed state-space record: {exc}") from exc


# ---------------------------------------------------------------------------
# PBH tests


def _eig_clusters(a: np.ndarray) -> list[complex]:
    ev = np.linalg.eigvals(a)
    tol = get_tolerances()
    return [complex(np.mean(ev[g])) for g in _cluster(ev, tol.tol_multiple)]


def _full_rank(mat: np.ndarray, need: int) -> bool:
    sv = np.linalg.svd(mat, compute_uv=False)
    if need == 0:
        return True
    if sv.size < need or sv[0] == 0:
        return False
    return bool(sv[need - 1] > get_tolerances().tol_rank * sv[0])


def pbh_observable(a, c) -> bool:
    """PBH: ``[sI - A; C]`` has full column rank at every eigenvalue of ``A``."""
    a = np.atleast_2d(np.asarray(a))
    n = a.shape[0]
    if n == 0:
        return True
    c = np.asarray(c).reshape(-1, n)
    return all(_full_rank(np.vstack([lam * np.eye(n) - a, c]), n) for lam in _eig_clusters(a))


def pbh_controllable(a, b) -> bool:
    """PBH: ``[sI - A, B]`` has full row rank at every eigenvalue of ``A``."""
    a = np.atleast_2d(np.asarray(a))
    n = a.shape[0]
    if n == 0:
        return True
    b = np.asarray(b).reshape(n, -1)
    return all(_full_rank(np.hstack([lam * np.eye(n) - a, b]), n) for lam in _eig_clusters(a))


def hidden_observable(sys: StateSpace) -> bool:
    """Observability of ``(A22, A12)``; vacuously true without hidden states."""
    if sys.h == 0:
        return True
    return pbh_observable(sys.a22, sys.a12)


def hidden_controllable(sys: StateSpace) -> bool:
    """Controllability of ``(A22, [A21 B2])``."""
    if sys.h == 0:
        return True
    return pbh_controllable(sys.a22, np.hstack([sys.a21, sys.b2]))


def hidden_transform(sys: StateSpace, t2) -> StateSpace:
    """Change of hidden coordinates ``T = blkdiag(I_p, t2)``."""
    t2 = np.atleast_2d(np.asarray(t2, dtype=float))
    if t2.shape != (sys.h, sys.h):
        raise DimensionError(f"t2 must be {sys.h}x{sys.h}")
    if sys.h and np.linalg.cond(t2) > 1e12:
        raise DomainError("hidden transformation is singular")
    T = np.eye(sys.n)
    T[sys.p:, sys.p:] = t2
    Ti = np.linalg.inv(T)
    return StateSpace(Ti @ sys.a @ T, Ti @ sys.b, sys.p)


# ---------------------------------------------------------------------------
# staircase reduction


def _staircase(a, b, tol):
    """Orthogonal controllability staircase.

    Returns ``(A~, B~, Z, nc)`` with ``A~ = Z^H A Z``, ``B~ = Z^H B`` and the
    leading ``nc`` states spanning the controllable subspace.
    """
    n = a.shape[0]
    a = a.copy()
    b = b.copy()
    z = np.eye(n, dtype=a.dtype)
    scale = max(1.0, np.linalg.norm(a), np.linalg.norm(b))
    nc = 0
    cur = b
    while nc < n and cur.size:
        u, sv, _ = np.linalg.svd(cur)
        r = int(np.sum(sv > tol * scale))
        if r == 0:
            break
        t = np.eye(n, dtype=np.result_type(a, u))
        t[nc:, nc:] = u
        a = t.conj().T @ a @ t
        b = t.conj().T @ b
        z = z @ t
        cur = a[nc + r:, nc:nc + r]
        nc += r
    return a, b, z, nc


def minimal_reduce(a, b, c, d=None, tol: float | None = None):
    """Drop uncontrollable then unobservable states (staircase, no gramians).

    Returns the quadruple ``(A, B, C, D)`` of a minimal realisation of the
    same transfer function.
    """
    a = np.atleast_2d(np.asarray(a))
    n = a.shape[0]
    b = np.asarray(b).reshape(n, -1)
    c = np.asarray(c).reshape(-1, n)
    if d is None:
        d = np.zeros((c.shape[0], b.shape[1]))
    if tol is None:
        tol = get_tolerances().tol_rank
    if n == 0:
        return a, b, c, d
    at, bt, z, nc = _staircase(a, b, tol)
    a1, b1, c1 = at[:nc, :nc], bt[:nc], (c @ z)[:, :nc]
    if nc == 0:
        return a1, b1, c1, d
    ao, co, zo, no = _staircase(a1.conj().T, c1.conj().T, tol)
    a2 = ao[:no, :no].conj().T
    c2 = co[:no].conj().T
    b2 = (zo.conj().T @ b1)[:no]
    if np.isrealobj(a) and np.isrealobj(b) and np.isrealobj(c):
        a2, b2, c2 = a2.real, b2.real, c2.real
    return a2, b2, c2, d


# ---------------------------------------------------------------------------
# transfer functions from state space


def siso_transfer(a, b, c, d: float = 0.0) -> RationalFunction:
    """``c (sI - A)^-1 b + d`` as a reduced rational function.

    The triple is made minimal first, so numerator and denominator come out
    coprime up to rounding. The denominator is built from the eigenvalues,
    the numerator from Markov parameters.
    """
    d = float(np.real(d))
    if a.shape[0] == 0:
        return RationalFunction.constant(d)
    am, bm, cm, _ = minimal_reduce(a, b, c)
    k = am.shape[0]
    if k == 0:
        return RationalFunction.constant(d)
    bm, cm = bm.reshape(k), cm.reshape(k)
    poles = np.linalg.eigvals(am)
    den = Polynomial.from_roots(poles)
    den_desc = den.coeffs[::-1].real
    anorm = max(np.linalg.norm(am), 1.0)
    h = []
    v = bm.copy()
    for i in range(k):
        h.append(float(cm @ v))
        v = am @ v
    ref = np.linalg.norm(cm) * np.linalg.norm(bm)
    # Markov parameters at rounding level are structural zeros
    for i in range(k):
        if abs(h[i]) <= 1e-12 * ref * anorm**i:
            h[i] = 0.0
        else:
            break
    num_desc = np.zeros(k)
    for j in range(k):
        num_desc[j] = sum(den_desc[j - i] * h[i] for i in range(j + 1))
    num = Polynomial(num_desc[::-1]) + d * den
    return RationalFunction(num, den).reduced()


# ---------------------------------------------------------------------------
# realisations of transfer matrices


def _column_lcm(col: list[RationalFunction]) -> np.ndarray:
    roots = []
    for e in col:
        if e.is_zero() or e.den.degree == 0:
            continue
        for loc, mult in root_multiplicities(e.poles()):
            roots.append((loc, mult))
    tol = get_tolerances()
    if not roots:
        return np.zeros(0, dtype=complex)
    locs = np.array([r for r, _ in roots])
    out = []
    for grp in _cluster(locs, tol.tol_pole_merge):
        loc = complex(np.mean(locs[grp]))
        mult = max(roots[g][1] for g in grp)
        out.extend([loc] * mult)
    return np.array(out, dtype=complex)


def realize_transfer_matrix(M: TransferMatrix, minimal: bool = True):
    """Real realisation ``(A, B, C, D)`` of a proper ``M`` built column-wise.

    Each column gets a controllable companion form over the least common
    denominator of its entries; ``minimal=True`` then strips unobservable
    states. Works for repeated poles, unlike :func:`gilbert_realize`.
    """
    if not M.is_proper():
        raise ContractError("cannot realise an improper transfer matrix")
    D = M.constant_part()
    sp = M.strictly_proper_part()
    blocks = []
    for j in range(M.cols):
        col = [sp.entries[i][j] for i in range(M.rows)]
        lcm = _column_lcm(col)
        k = len(lcm)
        if k == 0:
            continue
        den = Polynomial.from_roots(lcm)
        dc = den.coeffs
        A = np.zeros((k, k), dtype=complex)
        if k > 1:
            A[:-1, 1:] = np.eye(k - 1)
        A[-1, :] = -dc[:k]
        B = np.zeros((k, M.cols), dtype=complex)
        B[-1, j] = 1.0
        C = np.zeros((M.rows, k), dtype=complex)
        for i, e in enumerate(col):
            if e.is_zero():
                continue
            ip, il = match_roots(e.poles(), lcm, get_tolerances().tol_pole_merge)
            rest = np.delete(lcm, il)
            numer = e.num * Polynomial.from_roots(rest)
            C[i, : numer.degree + 1] = numer.coeffs
        blocks.append((A, B, C))
    if not blocks:
        n = 0
        A = np.zeros((0, 0))
        B = np.zeros((0, M.cols))
        C = np.zeros((M.rows, 0))
    else:
        n = sum(bl[0].shape[0] for bl in blocks)
        A = np.zeros((n, n), dtype=complex)
        B = np.zeros((n, M.cols), dtype=complex)
        C = np.zeros((M.rows, n), dtype=complex)
        off = 0
        for a_, b_, c_ in blocks:
            k = a_.shape[0]
            A[off:off + k, off:off + k] = a_
            B[off:off + k] = b_
            C[:, off:off + k] = c_
            off += k
    real = M.is_real()
    if real:
        A, B, C, D = A.real, B.real, C.real, D.real
    if minimal and n:
        A, B, C, D = minimal_reduce(A, B, C, D)
    return A, B, C, D


def gilbert_realize(M: TransferMatrix, real: bool = True):
    """Gilbert realisation of a proper ``M`` with simple poles.

    ``A = diag(lam_i)``, the columns of ``C`` are the residue directions
    ``E_i`` and the rows of ``B`` the factors ``F_i``; ``D = M(inf)``. With
    ``real=True`` each conjugate pair becomes a ``[[sig, w], [-w, sig]]``
    block so the result is real.
    """
    if not M.is_proper():
        raise ContractError("Gilbert realisation needs a proper transfer matrix")
    D = M.constant_part()
    modes = poles_with_residues(M, check_zeros=False)
    n, p, q = len(modes), M.rows, M.cols
    if not real:
        A = np.diag([m.lam for m in modes]) if n else np.zeros((0, 0), dtype=complex)
        B = np.array([m.f_row for m in modes]).reshape(n, q)
        C = np.array([m.e_dir for m in modes]).T.reshape(p, n)
        return A, B, C, D
    if not M.is_real():
        raise ContractError("a real realisation needs a real transfer matrix")
    A = np.zeros((n, n))
    B = np.zeros((n, q))
    C = np.zeros((p, n))
    k = 0
    for m in modes:
        if m.lam.imag < 0:
            continue
        if m.lam.imag == 0:
            A[k, k] = m.lam.real
            B[k] = m.f_row.real
            C[:, k] = m.e_dir.real
            k += 1
        else:
            sig, w = m.lam.real, m.lam.imag
            A[k:k + 2, k:k + 2] = [[sig, w], [-w, sig]]
            C[:, k] = 2 * m.e_dir.real
            C[:, k + 1] = 2 * m.e_dir.imag
            B[k] = m.f_row.real
            B[k + 1] = -m.f_row.imag
            k += 2
    return A, B, C, D.real
