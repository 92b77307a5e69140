"""Polynomials and scalar rational functions.

Coefficients are stored in ascending order (``c[k]`` multiplies ``s**k``).
Roots come from companion-matrix eigenvalues, and coprime reduction works by
matching root sets rather than by a Euclidean GCD, which is unstable in
floating point.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
import numpy.polynomial.polynomial as npp

from .config import get_tolerances
from .errors import DomainError, PoleHitError

__all__ = [
    "Polynomial",
    "RationalFunction",
    "poly_roots",
    "root_multiplicities",
    "reduce",
    "evaluate",
    "match_roots",
]

# relative size below which a leading coefficient produced by cancellation
# in an addition is treated as rounding noise
_ADD_TRIM = 1e-13
# imaginary parts this small (relative) are dropped for real polynomials
_REAL_SNAP = 1e-10


def _sort_roots(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=complex)
    if r.size == 0:
        return r
    order = np.lexsort((np.round(r.imag, 12), np.round(r.real, 12)))
    return r[order]


def _cluster(values: np.ndarray, rtol: float) -> list[list[int]]:
    """Single-linkage clusters of complex values (relative distance)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) <= rtol * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


class Polynomial:
    """Polynomial with complex coefficients in ascending order.

    The zero polynomial is stored as ``[0]`` and has degree ``-1``.
    """

    __slots__ = ("coeffs", "real", "_roots")

    def __init__(self, coeffs: Iterable[complex] | complex, *, real: bool | None = None):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if c.ndim != 1:
            raise DomainError("coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise DomainError("non-finite polynomial coefficient")
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex)
        if real is None:
            scale = np.max(np.abs(c))
            real = bool(np.all(np.abs(c.imag) <= 1e-12 * max(scale, 1e-300)))
        if real:
            c = c.real.astype(complex)
        self.coeffs = c
        self.real = real
        self._roots = None

    @classmethod
    def from_roots(cls, roots: Sequence[complex], gain: complex = 1.0) -> "Polynomial":
        roots = _sort_roots(np.asarray(roots, dtype=complex))
        c = np.array([1.0 + 0j])
        for r in roots:
            c = npp.polymul(c, [-r, 1.0])
        c = c * gain
        real = _is_conjugate_closed(roots) and abs(complex(gain).imag) <= 1e-14 * max(abs(gain), 1e-300)
        p = cls(c, real=real)
        if p.degree == len(roots):
            p._roots = roots
        return p

    @classmethod
    def monomial(cls, k: int = 1) -> "Polynomial":
        c = np.zeros(k + 1)
        c[k] = 1.0
        return cls(c)

    # basic properties -----------------------------------------------------
    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, s):
        return npp.polyval(s, self.coeffs)

    def __repr__(self):
        c = self.coeffs.real if self.real else self.coeffs
        return f"Polynomial({np.array2string(c, precision=6)})"

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    __hash__ = None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        return Polynomial(npp.polyadd(self.coeffs, other.coeffs), real=self.real and other.real or None)

    __radd__ = __add__

    def __neg__(self):
        p = Polynomial(-self.coeffs, real=self.real)
        if self._roots is not None:
            p._roots = self._roots
        return p

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return Polynomial(npp.polymul(self.coeffs, other.coeffs), real=self.real and other.real or None)

    __rmul__ = __mul__

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise DomainError("division by the zero polynomial")
        if self.degree < other.degree:
            return Polynomial(0), self
        q, r = npp.polydiv(self.coeffs, other.coeffs)
        return Polynomial(q), Polynomial(r)

    def derivative(self) -> "Polynomial":
        if self.degree < 1:
            return Polynomial(0)
        return Polynomial(npp.polyder(self.coeffs), real=self.real)

    def deflate(self, root: complex) -> "Polynomial":
        """Exact division by ``(s - root)`` via synthetic division (remainder dropped)."""
        c = self.coeffs
        n = len(c) - 1
        if n < 1:
            raise DomainError("cannot deflate a constant")
        out = np.zeros(n, dtype=complex)
        acc = c[n]
        for k in range(n - 1, -1, -1):
            out[k] = acc
            acc = c[k] + acc * root
        return Polynomial(out)

    def roots(self) -> np.ndarray:
        if self._roots is None:
            self._roots = poly_roots(self)
        return self._roots

    def to_real_list(self) -> list[float]:
        scale = max(float(np.max(np.abs(self.coeffs))), 1e-300)
        if np.any(np.abs(self.coeffs.imag) > 1e-9 * scale):
            raise DomainError("complex coefficients cannot be written as real data")
        return [float(x) for x in self.coeffs.real]


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial(x)


def _is_conjugate_closed(roots: np.ndarray) -> bool:
    if roots.size == 0:
        return True
    remaining = list(roots)
    while remaining:
        r = remaining.pop()
        tol = 1e-9 * max(1.0, abs(r))
        if abs(r.imag) <= tol:
            continue
        dist = [abs(x - np.conj(r)) for x in remaining]
        if not dist or min(dist) > tol:
            return False
        remaining.pop(int(np.argmin(dist)))
    return True


_LOOSE_MULTIPLE = 1e-3


def _is_multiple_root(c: np.ndarray, z: complex, k: int) -> bool:
    """Whether ``z`` annihilates the first ``k`` derivatives (orders 0..k-1)."""
    c = np.asarray(c, dtype=complex)
    az = max(1.0, abs(z))
    for _ in range(k):
        powers = az ** np.arange(len(c))
        if abs(np.polyval(c[::-1], z)) > 1e-10 * float(np.sum(np.abs(c) * powers)):
            return False
        c = c[1:] * np.arange(1, len(c))
    return True


def poly_roots(p: Polynomial) -> np.ndarray:
    """Roots of ``p`` with multiplicity, sorted by (real, imag).

    Eigenvalues of the companion matrix; exact zero roots are split off
    first, and roots closer than ``tol_multiple`` (relative) are merged to
    their mean so multiple roots come back as repeated equal values.

    Raises
    ------
    DomainError
        If ``p`` is the zero polynomial.
    """
    if p.is_zero():
        raise DomainError("the zero polynomial has no finite root set")
    c = p.coeffs
    lead_zeros = int(np.argmax(c != 0))
    c = c[lead_zeros:]
    n = len(c) - 1
    if n == 0:
        found = np.zeros(0, dtype=complex)
    else:
        comp = np.zeros((n, n), dtype=complex)
        if n > 1:
            comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = -c[:-1] / c[-1]
        if p.real:
            comp = comp.real
        found = np.linalg.eigvals(comp).astype(complex)
        tol = get_tolerances()
        for grp in _cluster(found, tol.tol_multiple):
            if len(grp) > 1:
                found[grp] = np.mean(found[grp])
        # a k-fold root splits by ~eps**(1/k), which can exceed tol_multiple;
        # merge looser clusters whose mean is a genuine k-fold root
        for grp in _cluster(found, _LOOSE_MULTIPLE):
            if len(grp) > 1 and np.ptp(found[grp]) > 0 and _is_multiple_root(c, np.mean(found[grp]), len(grp)):
                found[grp] = np.mean(found[grp])
        if p.real:
            snap = np.abs(found.imag) <= _REAL_SNAP * np.maximum(1.0, np.abs(found))
            found[snap] = found[snap].real
    out = np.concatenate([np.zeros(lead_zeros, dtype=complex), found])
    return _sort_roots(out)


def root_multiplicities(roots: Sequence[complex]) -> list[tuple[complex, int]]:
    """Collapse a root list into ``(location, multiplicity)`` pairs."""
    roots = np.asarray(roots, dtype=complex)
    tol = get_tolerances()
    out = []
    for grp in _cluster(roots, tol.tol_multiple):
        out.append((complex(np.mean(roots[grp])), len(grp)))
    out.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    return out


def match_roots(a: Sequence[complex], b: Sequence[complex], rtol: float | None = None):
    """Pair up equal roots of ``a`` and ``b`` one-to-one (closest first).

    Returns the index lists ``(ia, ib)`` of matched entries.
    """
    if rtol is None:
        rtol = get_tolerances().tol_cluster
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cand = []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            d = abs(x - y)
            if d <= rtol * max(1.0, abs(x)):
                cand.append((d, i, j))
    cand.sort()
    used_a, used_b = set(), set()
    ia, ib = [], []
    for _, i, j in cand:
        if i not in used_a and j not in used_b:
            used_a.add(i)
            used_b.add(j)
            ia.append(i)
            ib.append(j)
    return ia, ib


def _without(values: np.ndarray, idx) -> np.ndarray:
    mask = np.ones(len(values), dtype=bool)
    mask[list(idx)] = False
    return values[mask]


class RationalFunction:
    """``num(s) / den(s)`` with a monic denominator.

    Arithmetic results are reduced. Construction does not reduce; call
    :func:`reduce` (or :meth:`reduced`) for that.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1.0):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise DomainError("zero denominator")
        lead = den.leading
        if lead != 1:
            roots_n, roots_d = num._roots, den._roots
            num = Polynomial(num.coeffs / lead, real=num.real and abs(lead.imag) == 0 or None)
            den = Polynomial(den.coeffs / lead, real=den.real and abs(lead.imag) == 0 or None)
            num._roots, den._roots = roots_n, roots_d
        if num.is_zero():
            den = Polynomial(1.0)
        self.num = num
        self.den = den

    # constructors ---------------------------------------------------------
    @classmethod
    def from_coeffs(cls, num: Sequence[float], den: Sequence[float] = (1.0,)) -> "RationalFunction":
        return cls(Polynomial(num), Polynomial(den))

    @classmethod
    def from_zpk(cls, zeros, poles, gain=1.0) -> "RationalFunction":
        if gain == 0:
            return cls.zero()
        return cls(Polynomial.from_roots(zeros, gain), Polynomial.from_roots(poles))

    @classmethod
    def constant(cls, c: complex) -> "RationalFunction":
        return cls(Polynomial(c), Polynomial(1.0))

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls.constant(0.0)

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls.constant(1.0)

    @classmethod
    def s(cls) -> "RationalFunction":
        return cls(Polynomial([0.0, 1.0]), Polynomial(1.0))

    # properties -----------------------------------------------------------
    @property
    def real(self) -> bool:
        return self.num.real and self.den.real

    @property
    def gain(self) -> complex:
        return self.num.leading

    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def relative_degree(self) -> int:
        """``deg den - deg num`` (``math.inf``-like large value for zero)."""
        if self.is_zero():
            return 10**9
        return self.den.degree - self.num.degree

    def is_proper(self) -> bool:
        return self.relative_degree >= 0

    def is_strictly_proper(self) -> bool:
        return self.relative_degree >= 1

    def zeros(self) -> np.ndarray:
        return np.zeros(0, dtype=complex) if self.is_zero() else self.num.roots()

    def poles(self) -> np.ndarray:
        return self.den.roots()

    def constant_part(self) -> complex:
        """Value at infinity of a proper function."""
        rd = self.relative_degree
        if rd < 0:
            raise DomainError("improper rational function has no finite value at infinity")
        return self.gain if rd == 0 else 0.0

    def split(self) -> tuple[Polynomial, "RationalFunction"]:
        """``(polynomial part, strictly proper remainder)``."""
        if self.is_zero() or self.num.degree < self.den.degree:
            return Polynomial(0), self
        q, r = self.num.divmod(self.den)
        rest = RationalFunction(r, self.den)
        if self.num._roots is not None and not r.is_zero():
            rest = reduce(rest)
        return q, rest

    def strictly_proper_part(self) -> "RationalFunction":
        return self.split()[1]

    def reduced(self) -> "RationalFunction":
        return reduce(self)

    # evaluation -----------------------------------------------------------
    def __call__(self, s):
        return evaluate(self, s)

    # arithmetic -----------------------------------------------------------
    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __add__(self, other):
        other = _as_rf(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        pa, pb = self.den.roots(), other.den.roots()
        ia, ib = match_roots(pa, pb)
        mul_a = Polynomial.from_roots(_without(pb, ib))
        mul_b = Polynomial.from_roots(_without(pa, ia))
        ta = self.num * mul_a
        tb = other.num * mul_b
        num = ta + tb
        scale = max(float(np.max(np.abs(ta.coeffs))), float(np.max(np.abs(tb.coeffs))))
        c = num.coeffs.copy()
        while len(c) > 1 and abs(c[-1]) <= _ADD_TRIM * scale:
            c = c[:-1]
        if len(c) == 1 and abs(c[0]) <= _ADD_TRIM * scale:
            return RationalFunction.zero()
        num = Polynomial(c, real=self.real and other.real or None)
        den = Polynomial.from_roots(np.concatenate([pa, _without(pb, ib)]))
        return reduce(RationalFunction(num, den))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_rf(other))

    def __rsub__(self, other):
        return _as_rf(other) - self

    def __mul__(self, other):
        other = _as_rf(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction.zero()
        zeros = np.concatenate([self.num.roots(), other.num.roots()])
        poles = np.concatenate([self.den.roots(), other.den.roots()])
        return _from_root_lists(zeros, poles, self.gain * other.gain)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DomainError("inverse of the zero rational function")
        return _from_root_lists(self.den.roots(), self.num.roots(), 1.0 / self.gain)

    def __truediv__(self, other):
        return self * _as_rf(other).inverse()

    def __rtruediv__(self, other):
        return _as_rf(other) * self.inverse()

    def __repr__(self):
        return f"RationalFunction(num={self.num.coeffs.real.tolist() if self.num.real else self.num.coeffs.tolist()}, " \
               f"den={self.den.coeffs.real.tolist() if self.den.real else self.den.coeffs.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    __hash__ = None

    def isclose(self, other, rtol: float = 1e-8) -> bool:
        """Coefficient-wise equality of the reduced forms."""
        a, b = reduce(self), reduce(_as_rf(other))
        if a.is_zero() or b.is_zero():
            return a.is_zero() and b.is_zero()
        if a.num.degree != b.num.degree or a.den.degree != b.den.degree:
            return False
        sn = max(np.max(np.abs(a.num.coeffs)), np.max(np.abs(b.num.coeffs)))
        sd = max(np.max(np.abs(a.den.coeffs)), np.max(np.abs(b.den.coeffs)))
        return bool(np.all(np.abs(a.num.coeffs - b.num.coeffs) <= rtol * sn)
                    and np.all(np.abs(a.den.coeffs - b.den.coeffs) <= rtol * sd))

    # serialisation --------------------------------------------------------
    def to_json(self) -> dict:
        return {"num": self.num.to_real_list(), "den": self.den.to_real_list()}

    @classmethod
    def from_json(cls, obj) -> "RationalFunction":
        if isinstance(obj, (int, float)):
            return cls.constant(float(obj))
        try:
            num, den = obj["num"], obj.get("den", [1.0])
        except (TypeError, KeyError, AttributeError) as exc:
            raise DomainError(f"bad rational function record: {obj!r}") from exc
        if not num:
            num = [0.0]
        return cls.from_coeffs([float(x) for x in num], [float(x) for x in den])


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x, 1.0)
    return RationalFunction.constant(x)


def _from_root_lists(zeros, poles, gain) -> RationalFunction:
    zeros = np.asarray(zeros, dtype=complex)
    poles = np.asarray(poles, dtype=complex)
    iz, ip = match_roots(zeros, poles)
    return RationalFunction(
        Polynomial.from_roots(_without(zeros, iz), gain),
        Polynomial.from_roots(_without(poles, ip)),
    )


def reduce(r: RationalFunction) -> RationalFunction:
    """Cancel common roots of numerator and denominator.

    Returns ``r`` itself when nothing cancels, so ``reduce`` is idempotent.
    """
    if r.is_zero():
        return RationalFunction.zero() if r.den.degree > 0 else r
    if r.num.degree == 0 or r.den.degree == 0:
        return r
    zeros, poles = r.num.roots(), r.den.roots()
    iz, ip = match_roots(zeros, poles)
    if not iz:
        return r
    return RationalFunction(
        Polynomial.from_roots(_without(zeros, iz), r.gain),
        Polynomial.from_roots(_without(poles, ip)),
    )


def evaluate(r: RationalFunction, s: complex) -> complex:
    """Value of ``r`` at ``s``; ``s = inf`` gives the limit at infinity.

    Raises
    ------
    PoleHitError
        If ``s`` is within ``tol_cluster`` of a pole (or ``r`` is improper
        and ``s`` is infinite).
    """
    if isinstance(s, float) and math.isinf(s) or s is math.inf:
        if r.relative_degree < 0:
            raise PoleHitError(math.inf)
        return complex(r.constant_part())
    if r.den.degree > 0:
        tol = get_tolerances().tol_cluster
        for p in r.den.roots():
            if abs(s - p) <= tol * max(1.0, abs(p)):
                raise PoleHitError(complex(p))
    return complex(r.num(s) / r.den(s))
