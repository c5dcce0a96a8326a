"""Reference masses and re-summations used by the report.

Everything here is plain re-summation of counts against closed-form
binomial masses; no new combinatorics is computed.
"""

from __future__ import annotations

import math
from collections import Counter


def total_parity_bit(n: int) -> int:
    return 0 if n % 4 in (0, 1) else 1


def binom_mass(n: int, k: int) -> float:
    if not 0 <= k <= n:
        return 0.0
    return math.comb(n, k) / 2 ** n


def mu_star_mass(n: int, triple: tuple) -> float:
    if sum(triple) % 2 != total_parity_bit(n):
        return 0.0
    out = 2.0
    for x in triple:
        out *= binom_mass(n, x)
    return out


def recompute_tv_row(rows, n: int) -> float:
    counts = Counter(r[1] for r in rows)
    total = len(rows)
    return 0.5 * sum(
        abs(counts.get(k, 0) / total - binom_mass(n, k)) for k in range(n + 1)
    )


def recompute_tv_triple(rows, n: int) -> float:
    counts = Counter((r[1], r[2], r[3]) for r in rows)
    total = len(rows)
    l1 = 0.0
    seen_reference = 0.0
    for triple, count in sorted(counts.items()):
        mass = mu_star_mass(n, triple)
        l1 += abs(count / total - mass)
        seen_reference += mass
    return 0.5 * (l1 + (1.0 - seen_reference))


def joint_row_col_reference(n: int) -> list:
    """mu* marginal over (n_row, n_col): the parity constraint integrates
    out, leaving the product of two symmetric binomials."""
    return [
        [binom_mass(n, a) * binom_mass(n, b) for b in range(n + 1)]
        for a in range(n + 1)
    ]


def mod2_cell_counts(rows) -> dict:
    table = {(b1, b2, b3): 0 for b1 in (0, 1) for b2 in (0, 1) for b3 in (0, 1)}
    for _, n_row, n_col, n_sym in rows:
        table[(n_row % 2, n_col % 2, n_sym % 2)] += 1
    return table
