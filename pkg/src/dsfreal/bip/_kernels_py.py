"""Pure-Python selection kernels.

Same signatures as the compiled ``_kernels`` module; used when the
extension is not built. Index sets are returned as sorted lists.
"""

from __future__ import annotations


def exhaustive(costs, weights, cap):
    """Best feasible subset over all ``2**g`` subsets, Gray-code order.

    ``costs[i][j]`` is the capacity group ``i`` uses in column ``j``.
    Ties on total weight go to the lexicographically smallest index set.
    """
    g = len(costs)
    p = len(cap)
    used = [0] * p
    over = 0
    weight = 0
    mask = 0
    best_mask, best_weight = 0, 0
    for k in range(1, 1 << g):
        i = (k & -k).bit_length() - 1
        bit = 1 << i
        row = costs[i]
        if mask & bit:
            mask ^= bit
            weight -= weights[i]
            for j in range(p):
                c = row[j]
                if c:
                    if used[j] > cap[j] and used[j] - c <= cap[j]:
                        over -= 1
                    used[j] -= c
        else:
            mask |= bit
            weight += weights[i]
            for j in range(p):
                c = row[j]
                if c:
                    if used[j] <= cap[j] < used[j] + c:
                        over += 1
                    used[j] += c
        if over:
            continue
        if weight > best_weight:
            best_mask, best_weight = mask, weight
        elif weight == best_weight:
            diff = mask ^ best_mask
            if mask & diff & -diff:
                best_mask = mask
    return [i for i in range(g) if best_mask >> i & 1], best_weight


def branch_bound(costs, weights, cap):
    """Depth-first branch-and-bound, include-first in index order.

    Include-first order visits equal-weight sets lexicographically, so only
    strict improvements replace the incumbent and pruning may use ``<=``.
    """
    g = len(costs)
    p = len(cap)
    slack = list(cap)
    suffix = [0] * (g + 1)
    for i in range(g - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[i]
    # weight per unit of capacity, for the slack bound
    ratio = max((weights[i] / max(sum(costs[i]), 1) for i in range(g)), default=0.0)
    free = sum(weights[i] for i in range(g) if not any(costs[i]))

    best = [0, []]
    chosen: list[int] = []

    def bound(i, cur):
        by_count = suffix[i]
        by_slack = free + ratio * sum(slack)
        return cur + min(by_count, by_slack)

    def visit(i, cur):
        if cur > best[0]:
            best[0], best[1] = cur, list(chosen)
        if i == g or bound(i, cur) <= best[0]:
            return
        row = costs[i]
        if all(row[j] <= slack[j] for j in range(p)):
            for j in range(p):
                slack[j] -= row[j]
            chosen.append(i)
            visit(i + 1, cur + weights[i])
            chosen.pop()
            for j in range(p):
                slack[j] += row[j]
        visit(i + 1, cur)

    visit(0, 0)
    return best[1], best[0]


def _colour_bound(cand, adj):
    """Greedy colouring of ``cand`` (a bitmask); colour count bounds the clique."""
    colours = 0
    rest = cand
    while rest:
        colours += 1
        avail = rest
        while avail:
            v = (avail & -avail).bit_length() - 1
            rest &= ~(1 << v)
            avail &= ~(1 << v) & ~adj[v]
    return colours


def max_clique(adj):
    """Lexicographically smallest maximum clique; ``adj[v]`` is a neighbour bitmask."""
    n = len(adj)
    best = [0, 0]

    def visit(clique, size, cand):
        if size > best[0]:
            best[0], best[1] = size, clique
        if not cand or size + _colour_bound(cand, adj) <= best[0]:
            return
        while cand:
            v = (cand & -cand).bit_length() - 1
            visit(clique | 1 << v, size + 1, cand & adj[v])
            cand &= ~(1 << v)
            if size + bin(cand).count("1") <= best[0]:
                return

    visit(0, 0, (1 << n) - 1)
    return [v for v in range(n) if best[1] >> v & 1]
