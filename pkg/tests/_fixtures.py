"""Hand-entered fixtures shared by the unit and acceptance tests."""

from __future__ import annotations

import numpy as np

from dsfreal import Dsf, RationalFunction, StateSpace, TransferMatrix

RF = RationalFunction

# (s + 1)^3 + 1 = (s + 2)(s^2 + s + 1), ascending coefficients
CUBIC = [2.0, 3.0, 3.0, 1.0]


def _tm(grid) -> TransferMatrix:
    return TransferMatrix([[e if isinstance(e, RF) else RF.constant(float(e)) for e in row] for row in grid])


def three_node_dsf() -> Dsf:
    """Three measured nodes in a ring, two inputs, as printed in the worked example."""
    q = _tm([[0, 0, RF.from_coeffs([-1.0], [3.0, 1.0])],
             [RF.from_coeffs([1.0, 1.0], CUBIC), 0, 0],
             [0, RF.from_zpk([], [-4.0, -2.0]), 0]])
    p = _tm([[RF.from_coeffs([1.0], [3.0, 1.0]), 0],
             [0, RF.from_coeffs([1.0, 2.0, 1.0], CUBIC)],
             [0, 0]])
    return Dsf(q, p)


def three_node_effective_iqp() -> TransferMatrix:
    """``[I - Q, P]`` whose (2, 2) entry is ``(s + 1)^3 / ((s + 1)^3 + 1)``.

    This is the matrix the worked example's printed ``N* [I - Q, P]`` is
    consistent with; it has a zero at -1 in direction ``e_2``.
    """
    m = three_node_dsf().iqp()
    m[1, 1] = RF.from_coeffs([1.0, 3.0, 3.0, 1.0], CUBIC)
    return m


# printed minimal realisation of the worked example
THREE_NODE_PRINTED_A = np.array([
    [-3, 0, 0, 0, 0],
    [0, 0, 0, 1, 0],
    [0, 0, -4, 0, 1],
    [1, -1, 0, -2, 0],
    [0, -1, -1, 0, -2],
], dtype=float)
THREE_NODE_PRINTED_B = np.array([[1, 0], [0, 1], [0, 0], [0, -1], [0, 0]], dtype=float)

# printed [W, V] for the selection {1, 3, 4, 5} (1-based, printed table order)
THREE_NODE_PRINTED_WV = [
    [RF.constant(-3.0), RF.zero(), RF.zero(), RF.one(), RF.zero()],
    [RF.from_coeffs([1.0], [2.0, 1.0]), RF.from_coeffs([-1.0], [2.0, 1.0]), RF.zero(), RF.zero(),
     RF.from_coeffs([1.0, 1.0], [2.0, 1.0])],
    [RF.zero(), RF.from_coeffs([-1.0], [2.0, 1.0]), RF.constant(-4.0), RF.zero(), RF.zero()],
]

# printed table rows (location, pattern) in printed order
THREE_NODE_PRINTED_TABLE = [
    (-3.0, (1, 0, 0)),
    (-2.0, (0, 1, 0)),
    (complex(-0.5, 0.866), (0, 1, 0)),
    (complex(-0.5, -0.866), (0, 1, 0)),
    (-4.0, (0, 0, 1)),
    (-2.0, (0, 0, 1)),
]


def printed_to_internal(modes, printed_rows=(1, 3, 4, 5)) -> list[int]:
    """Map 1-based printed table rows onto indices of ``modes`` by location and pattern."""
    out = []
    for r in printed_rows:
        loc, pattern = THREE_NODE_PRINTED_TABLE[r - 1]
        for i, m in enumerate(modes):
            if abs(m.lam - loc) < 1e-3 and tuple(int(b) for b in m.boolean_e) == pattern and i not in out:
                out.append(i)
                break
        else:
            raise LookupError(f"no mode matches printed row {r}")
    return sorted(out)


def ring_system() -> StateSpace:
    """Five-state ring with two hidden states and two inputs (numeric values)."""
    a = np.zeros((5, 5))
    entries = {(1, 1): -1, (1, 3): 1, (2, 2): -2, (2, 4): 1, (3, 2): 1, (3, 3): -3, (3, 5): 1,
               (4, 1): 1, (4, 4): -4, (5, 2): 1, (5, 5): -5}
    for (i, j), v in entries.items():
        a[i - 1, j - 1] = v
    b = np.zeros((5, 2))
    b[0, 0] = b[1, 1] = 1
    return StateSpace(a, b, 3)


def sample_points(count: int, seed: int = 11, radius: float = 3.0) -> list[complex]:
    """Random points off the real axis, well away from real and lightly damped poles."""
    rng = np.random.default_rng(seed)
    pts = radius * (rng.random(count) + 1j * (0.5 + rng.random(count)))
    return list(pts * np.where(rng.random(count) < 0.5, 1, -1))


def max_rel_diff(f, g, points) -> float:
    worst = 0.0
    for z in points:
        a, b = np.asarray(f(z)), np.asarray(g(z))
        worst = max(worst, float(np.abs(a - b).max() / max(1.0, np.abs(b).max())))
    return worst
