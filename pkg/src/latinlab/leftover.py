"""Leftover graph of a partial square: density, triangles, codegrees,
typicality and quasirandomness predicates, exact completion counting, and
closed-form concentration-bound evaluators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import OrderedPartialLatinSquare, PartialLatinSquare
from .errors import OrderTooLargeError, ValidationError

__all__ = [
    "LeftoverGraph",
    "leftover_graph",
    "density",
    "triangle_count",
    "codegree",
    "is_triangle_typical",
    "is_quasirandom",
    "completions_count",
    "freedman_bound",
    "chernoff_bound",
]

COMPLETIONS_MAX_N = 6


@dataclass(frozen=True)
class LeftoverGraph:
    """Cross-part pairs of K_{n,n,n} not covered by the source entries.

    Pair matrices are indexed 0-based; a True bit means the pair is covered
    (i.e. absent from the graph).
    """

    n: int
    covered_rc: tuple
    covered_rs: tuple
    covered_cs: tuple

    def edge_count(self) -> int:
        covered = sum(sum(row) for mat in (self.covered_rc, self.covered_rs, self.covered_cs) for row in mat)
        return 3 * self.n * self.n - covered


def leftover_graph(partial: PartialLatinSquare) -> LeftoverGraph:
    n = partial.n
    rc = [[False] * n for _ in range(n)]
    rs = [[False] * n for _ in range(n)]
    cs = [[False] * n for _ in range(n)]
    for r, c, s in partial.entries:
        rc[r - 1][c - 1] = True
        rs[r - 1][s - 1] = True
        cs[c - 1][s - 1] = True
    freeze = lambda m: tuple(tuple(row) for row in m)
    return LeftoverGraph(n, freeze(rc), freeze(rs), freeze(cs))


def density(graph: LeftoverGraph) -> float:
    """e(G) / (3 n^2); equals 1 - m/n^2 for an m-entry source."""
    return graph.edge_count() / (3 * graph.n * graph.n)


def triangle_count(graph: LeftoverGraph) -> int:
    n = graph.n
    total = 0
    for r in range(n):
        rc_row = graph.covered_rc[r]
        rs_row = graph.covered_rs[r]
        for c in range(n):
            if rc_row[c]:
                continue
            cs_row = graph.covered_cs[c]
            total += sum(
                1 for s in range(n) if not rs_row[s] and not cs_row[s]
            )
    return total


def codegree(graph: LeftoverGraph, u: tuple, v: tuple) -> int:
    """Common neighbours of two vertices in different parts.

    Vertices are ('row'|'col'|'sym', index).
    """
    (pu, iu), (pv, iv) = u, v
    if pu == pv:
        raise ValidationError("out-of-range", "codegree needs a cross-part pair")
    n = graph.n
    pair = frozenset((pu, pv))
    if pair == frozenset(("row", "col")):
        r, c = (iu, iv) if pu == "row" else (iv, iu)
        return sum(
            1
            for s in range(n)
            if not graph.covered_rs[r - 1][s] and not graph.covered_cs[c - 1][s]
        )
    if pair == frozenset(("row", "sym")):
        r, s = (iu, iv) if pu == "row" else (iv, iu)
        return sum(
            1
            for c in range(n)
            if not graph.covered_rc[r - 1][c] and not graph.covered_cs[c][s - 1]
        )
    r_of = (iu, iv) if pu == "col" else (iv, iu)
    c, s = r_of
    return sum(
        1
        for r in range(n)
        if not graph.covered_rc[r][c - 1] and not graph.covered_rs[r][s - 1]
    )


def _typical(n: int, m: int, triangles: int, eps: float) -> tuple:
    dens = 1 - m / (n * n)
    expected = n ** 3 * dens ** 3
    if expected == 0:
        return triangles == 0, expected
    return abs(triangles - expected) <= eps * expected, expected


def is_triangle_typical(partial, eps: float):
    """Triangle count within (1 +- eps) of n^3 dens^3.

    For an ordered square, every prefix must be typical; the return value is
    then ``(verdict, report)`` with one record per prefix.
    """
    if eps < 0:
        raise ValidationError("out-of-range", "eps must be >= 0")
    if isinstance(partial, OrderedPartialLatinSquare):
        report = []
        verdict = True
        running: set = set()
        for i, e in enumerate(partial.entries, start=1):
            running.add(e)
            sub = PartialLatinSquare(partial.n, frozenset(running))
            tri = triangle_count(leftover_graph(sub))
            ok, expected = _typical(partial.n, i, tri, eps)
            verdict = verdict and ok
            report.append(
                {
                    "prefix_index": i,
                    "triangles": tri,
                    "expected": expected,
                    "typical": ok,
                }
            )
        return verdict, report
    tri = triangle_count(leftover_graph(partial))
    ok, _ = _typical(partial.n, len(partial.entries), tri, eps)
    return ok


def is_quasirandom(partial: PartialLatinSquare, gamma: float) -> bool:
    """All cross-part codegrees within (1 +- gamma) of n dens^2."""
    if gamma < 0:
        raise ValidationError("out-of-range", "gamma must be >= 0")
    graph = leftover_graph(partial)
    n = partial.n
    dens = density(graph)
    target = n * dens * dens
    for kind_a, kind_b in (("row", "col"), ("row", "sym"), ("col", "sym")):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                deg = codegree(graph, (kind_a, a), (kind_b, b))
                if target == 0:
                    if deg != 0:
                        return False
                elif abs(deg - target) > gamma * target:
                    return False
    return True


def completions_count(partial: PartialLatinSquare) -> int:
    """Exact number of full squares extending P, by most-constrained-cell
    backtracking.  Guarded at n <= 6 (the empty square at n = 6 has ~8.1e8
    completions and is flagged slow, not refused)."""
    n = partial.n
    if n > COMPLETIONS_MAX_N:
        raise OrderTooLargeError(f"completion counting guard: n={n} > {COMPLETIONS_MAX_N}")
    full = (1 << n) - 1
    row_used = [0] * n
    col_used = [0] * n
    grid = [[0] * n for _ in range(n)]
    for r, c, s in partial.entries:
        grid[r - 1][c - 1] = s
        row_used[r - 1] |= 1 << (s - 1)
        col_used[c - 1] |= 1 << (s - 1)
    empties = [(r, c) for r in range(n) for c in range(n) if grid[r][c] == 0]

    def rec(remaining: list) -> int:
        if not remaining:
            return 1
        best_i = -1
        best_mask = 0
        best_count = n + 1
        for i, (r, c) in enumerate(remaining):
            mask = full & ~(row_used[r] | col_used[c])
            count = mask.bit_count()
            if count == 0:
                return 0
            if count < best_count:
                best_i, best_mask, best_count = i, mask, count
                if count == 1:
                    break
        r, c = remaining[best_i]
        rest = remaining[:best_i] + remaining[best_i + 1 :]
        total = 0
        mask = best_mask
        while mask:
            bit = mask & -mask
            mask ^= bit
            row_used[r] |= bit
            col_used[c] |= bit
            total += rec(rest)
            row_used[r] ^= bit
            col_used[c] ^= bit
        return total

    return rec(empties)


def freedman_bound(
    t: float,
    probs: Sequence[float],
    lipschitz: Sequence[float],
    k_max: float,
    cap: bool = True,
) -> float:
    """Martingale concentration bound 2 exp(-t^2 / (2 sum p_i K_i^2 + 2 K t / 3)).

    With ``cap`` the value is clipped to 1 (it is a probability bound).
    """
    if t < 0 or k_max < 0 or any(p < 0 for p in probs) or any(k < 0 for k in lipschitz):
        raise ValidationError("out-of-range", "freedman_bound needs nonnegative inputs")
    if len(probs) != len(lipschitz):
        raise ValidationError("shape", "probability and Lipschitz vectors differ in length")
    if any(k > k_max for k in lipschitz):
        raise ValidationError("out-of-range", "some K_i exceeds Kmax")
    denom = 2 * sum(p * k * k for p, k in zip(probs, lipschitz)) + 2 * k_max * t / 3
    value = 2.0 if denom == 0 and t == 0 else (0.0 if denom == 0 else 2 * math.exp(-t * t / denom))
    return min(value, 1.0) if cap else value


def chernoff_bound(mean: float, delta_cap: float, rel_dev: float, cap: bool = True) -> float:
    """Weighted-sum Chernoff bound 2 exp(-d^2 mu / ((2 + 2d/3) Delta))."""
    if mean < 0 or delta_cap <= 0 or rel_dev < 0:
        raise ValidationError("out-of-range", "chernoff_bound needs nonnegative inputs")
    value = 2 * math.exp(-(rel_dev ** 2) * mean / ((2 + 2 * rel_dev / 3) * delta_cap))
    return min(value, 1.0) if cap else value
