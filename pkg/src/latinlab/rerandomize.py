"""Template-stable intercalates, the uniformity-preserving random-switch
walk, F2 incidence matrices with rank/kernel analysis, line selection by
stable-intercalate support, and the exhaustive component audit."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import LatinSquare, PartialLatinSquare, Template, enumerate_all, line_parities, template_intersect
from .errors import OrderTooLargeError, ValidationError
from .intercalates import stable_intercalates, switch_many

__all__ = [
    "IncidenceMatrixF2",
    "KernelBasis",
    "RcsSelection",
    "t_stable_intercalates",
    "rerandomize",
    "rerandomize_with_record",
    "exact_component_audit",
    "incidence_matrix",
    "f2_rank_kernel",
    "kernel_report_json",
    "block_constant_vectors",
    "external_disjoint_count",
    "find_rcs",
    "parity_bit_vector",
    "predict_parity_vector",
]

AUDIT_MAX_N = 4


def t_stable_intercalates(square: LatinSquare, template: Template) -> list:
    """Intercalates of the square that are present and stable in T n L."""
    return stable_intercalates(template_intersect(template, square))


def rerandomize(square: LatinSquare, template: Template, rng) -> LatinSquare:
    """Switch each template-stable intercalate independently with
    probability 1/2; preserves the uniform distribution exactly."""
    return rerandomize_with_record(square, template, rng)[0]


def rerandomize_with_record(square: LatinSquare, template: Template, rng) -> tuple:
    stable = t_stable_intercalates(square, template)
    chosen = [a for a in stable if rng.random() < 0.5]
    if not chosen:
        return square, stable, chosen
    return switch_many(square, chosen), stable, chosen


# ---------------------------------------------------------------------------
# F2 incidence matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IncidenceMatrixF2:
    """Stacked {0,1} matrix over (rows ++ cols ++ syms) x intercalates.

    ``bits[i]`` packs matrix row i with bit j = column j.
    """

    row_labels: tuple  # (("row", r) ...), then cols, then syms
    col_labels: tuple  # intercalate-like objects
    bits: tuple
    n_cols: int

    def column_weight(self, j: int) -> int:
        return sum(b >> j & 1 for b in self.bits)


@dataclass(frozen=True)
class KernelBasis:
    """Left-kernel basis over F2; each vector packs one bit per matrix row."""

    rank: int
    n_rows: int
    basis: tuple

    @property
    def kernel_dim(self) -> int:
        return len(self.basis)

    def bitstrings(self) -> list:
        return [format(v, f"0{self.n_rows}b")[::-1] for v in self.basis]


def incidence_matrix(rows, cols, syms, intercalates) -> IncidenceMatrixF2:
    """Participation matrix of lines in intercalates.

    Accepts intercalates or sigma keys; every line used must be in the
    given sets.
    """
    rows = sorted(rows)
    cols = sorted(cols)
    syms = sorted(syms)
    labels = (
        tuple(("row", r) for r in rows)
        + tuple(("col", c) for c in cols)
        + tuple(("sym", s) for s in syms)
    )
    index = {lab: i for i, lab in enumerate(labels)}
    bits = [0] * len(labels)
    for j, a in enumerate(intercalates):
        for kind, pair in (("row", a.rows), ("col", a.cols), ("sym", a.syms)):
            for x in pair:
                if (kind, x) not in index:
                    raise ValidationError(
                        "out-of-range", f"intercalate {kind} {x} outside (R,C,S)"
                    )
                bits[index[(kind, x)]] |= 1 << j
    return IncidenceMatrixF2(labels, tuple(intercalates), tuple(bits), len(intercalates))


def f2_rank_kernel(matrix: IncidenceMatrixF2) -> KernelBasis:
    """Rank and left-kernel basis by word-packed elimination.

    Each matrix row is reduced against the pivots found so far while the
    combination of original rows is tracked; rows that vanish contribute
    their combinations as kernel vectors.
    """
    pivots: list = []  # (reduced_vector, combination, pivot_bit)
    kernel = []
    for i, vec in enumerate(matrix.bits):
        combo = 1 << i
        for p_vec, p_combo, p_bit in pivots:
            if vec >> p_bit & 1:
                vec ^= p_vec
                combo ^= p_combo
        if vec == 0:
            kernel.append(combo)
        else:
            pivots.append((vec, combo, (vec & -vec).bit_length() - 1))
    return KernelBasis(len(pivots), len(matrix.bits), tuple(kernel))


def kernel_report_json(matrix: IncidenceMatrixF2, basis: KernelBasis) -> dict:
    """The documented kernel report: rank, kernel dimension, basis
    bitstrings (matrix-row order) and the line blocks."""
    blocks: dict = {"R": [], "C": [], "S": []}
    for kind, line in matrix.row_labels:
        blocks[{"row": "R", "col": "C", "sym": "S"}[kind]].append(line)
    return {
        "rank": basis.rank,
        "kernel_dim": basis.kernel_dim,
        "kernel_basis": basis.bitstrings(),
        "blocks": blocks,
    }


def block_constant_vectors(sizes: tuple) -> set:
    """The 8 vectors that are all-0 or all-1 on each of three blocks."""
    out = set()
    offsets = [0, sizes[0], sizes[0] + sizes[1]]
    for pattern in range(8):
        v = 0
        for b in range(3):
            if pattern >> b & 1:
                v |= ((1 << sizes[b]) - 1) << offsets[b]
        out.add(v)
    return out


# ---------------------------------------------------------------------------
# Line selection by stable-intercalate support
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RcsSelection:
    rows: frozenset
    cols: frozenset
    syms: frozenset
    support_counts: dict
    threshold: int
    success: bool


def external_disjoint_count(intercalates: list, kind: str, line: int) -> int:
    """Greedy size of a family through the given line whose members are
    otherwise pairwise line-disjoint.  Greedy is a 2-approximation of the
    true maximum."""
    axis = {"row": "rows", "col": "cols", "sym": "syms"}[kind]
    used: set = set()
    count = 0
    for a in intercalates:
        if line not in getattr(a, axis):
            continue
        lines_a = (
            {("row", r) for r in a.rows}
            | {("col", c) for c in a.cols}
            | {("sym", s) for s in a.syms}
        ) - {(kind, line)}
        if not (lines_a & used):
            used |= lines_a
            count += 1
    return count


def find_rcs(partial: PartialLatinSquare, ell: int) -> RcsSelection:
    """Collect lines through >= 6*ell externally-disjoint stable
    intercalates; succeeds when all three sets have size >= n - ell.

    External disjointness is computed greedily in canonical order, which is
    within a factor 2 of the true maximum matching size.
    """
    n = partial.n
    stable = stable_intercalates(partial)
    support: dict = {}
    for kind in ("row", "col", "sym"):
        for line in range(1, n + 1):
            support[(kind, line)] = external_disjoint_count(stable, kind, line)
    need = 6 * ell
    rows = frozenset(r for r in range(1, n + 1) if support[("row", r)] >= need)
    cols = frozenset(c for c in range(1, n + 1) if support[("col", c)] >= need)
    syms = frozenset(s for s in range(1, n + 1) if support[("sym", s)] >= need)
    ok = min(len(rows), len(cols), len(syms)) >= n - ell
    return RcsSelection(rows, cols, syms, support, need, ok)


# ---------------------------------------------------------------------------
# Parity-vector arithmetic and the exhaustive walk audit
# ---------------------------------------------------------------------------

def parity_bit_vector(square: LatinSquare) -> int:
    """Row, column and symbol parity bits packed as one integer
    (bit i = line i of the stacked [n]+[n]+[n] labeling)."""
    rows, cols, syms = line_parities(square)
    v = 0
    for i, bit in enumerate(rows + cols + syms):
        v |= bit << i
    return v


def predict_parity_vector(square: LatinSquare, stable: list, chosen: list) -> int:
    """Original parity vector plus M r over F2, for the full-line incidence
    matrix of the stable family and the switch indicator r."""
    n = square.n
    lines = range(1, n + 1)
    matrix = incidence_matrix(lines, lines, lines, stable)
    rmask = 0
    for j, a in enumerate(stable):
        if a in chosen:
            rmask |= 1 << j
    v = parity_bit_vector(square)
    for i, row_bits in enumerate(matrix.bits):
        v ^= ((row_bits & rmask).bit_count() & 1) << i
    return v


def exact_component_audit(n: int, template: Template) -> dict:
    """Build the switch multigraph over all order-n squares and check that
    every component is a clique of size 2^,S, with a constant sigma set, that
    degrees include the loop, and that the uniform distribution is exactly
    stationary in rational arithmetic."""
    if n > AUDIT_MAX_N:
        raise OrderTooLargeError(f"component audit guarded to n <= {AUDIT_MAX_N}")
    squares = list(enumerate_all(n))
    index = {sq.grid: i for i, sq in enumerate(squares)}
    total = len(squares)
    sigma_sets: list = []
    neighbor_sets: list = []
    incoming = [Fraction(0)] * total
    violations: list = []
    parent = list(range(total))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for i, sq in enumerate(squares):
        stable = t_stable_intercalates(sq, template)
        sigma_sets.append(frozenset(a.sigma() for a in stable))
        k = len(stable)
        targets = set()
        weight = Fraction(1, 2 ** k)
        for mask in range(1 << k):
            chosen = [stable[j] for j in range(k) if mask >> j & 1]
            target = switch_many(sq, chosen) if chosen else sq
            ti = index[target.grid]
            targets.add(ti)
            incoming[ti] += weight
            union(i, ti)
        if len(targets) != 1 << k:
            violations.append({"square": i, "issue": "switch images collide"})
        neighbor_sets.append(targets)

    components: dict = {}
    for i in range(total):
        components.setdefault(find(i), []).append(i)
    sizes = []
    for members in components.values():
        sizes.append(len(members))
        sig = sigma_sets[members[0]]
        expected = 1 << len(sig)
        if any(sigma_sets[m] != sig for m in members):
            violations.append({"component": sorted(members), "issue": "sigma varies"})
        if len(members) != expected:
            violations.append(
                {
                    "component": sorted(members),
                    "issue": f"size {len(members)} != 2^|S| = {expected}",
                }
            )
        member_set = set(members)
        for m in members:
            if m not in neighbor_sets[m]:
                violations.append({"square": m, "issue": "missing loop edge"})
            if neighbor_sets[m] != member_set:
                violations.append({"square": m, "issue": "component not a clique"})
    for i in range(total):
        if incoming[i] != 1:
            violations.append(
                {"square": i, "issue": f"stationarity mass {incoming[i]} != 1"}
            )
    return {
        "n": n,
        "squares": total,
        "components": len(components),
        "component_sizes": sorted(sizes, reverse=True)[:32],
        "violations": violations,
        "passed": not violations,
    }
