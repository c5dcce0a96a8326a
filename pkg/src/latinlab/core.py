"""Latin-square and partial-square representations, parities, switching.

Indexing is 1-based at every public surface (rows, columns and symbols all
live in ``1..n``); grids are stored as immutable tuples of symbol rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import OrderTooLargeError, ValidationError

__all__ = [
    "Entry",
    "LatinSquare",
    "PartialLatinSquare",
    "OrderedPartialLatinSquare",
    "ParityTriple",
    "Template",
    "validate_square",
    "slice_permutation",
    "perm_is_odd",
    "line_parities",
    "parity_counts",
    "f_of_n",
    "cycle_switch",
    "enumerate_all",
    "count_all",
    "exact_uniform_sample",
    "template_sample",
    "template_intersect",
    "block_slice",
    "random_ordered_subset",
    "cyclic_square",
    "square_to_json",
    "square_from_json",
    "partial_to_json",
    "partial_from_json",
    "ordered_to_json",
    "ordered_from_json",
    "template_to_json",
    "template_from_json",
]

ENUMERATION_MAX_N = 5

# |L_n| for n = 1..5; frozen reference values, re-derived by the test suite.
KNOWN_COUNTS = {1: 1, 2: 2, 3: 12, 4: 576, 5: 161280}


class Entry(NamedTuple):
    """One (row, column, symbol) triple; a hyperedge of the tripartite view."""

    row: int
    col: int
    sym: int


@dataclass(frozen=True)
class LatinSquare:
    """An n x n Latin square.  Construction does not re-validate; use
    :func:`validate_square` for untrusted grids."""

    n: int
    grid: tuple  # tuple of n rows, each a tuple of n symbols in 1..n

    def cell(self, row: int, col: int) -> int:
        return self.grid[row - 1][col - 1]

    def entries(self) -> list[Entry]:
        n = self.n
        return [
            Entry(r + 1, c + 1, self.grid[r][c]) for r in range(n) for c in range(n)
        ]

    def entry_set(self) -> frozenset:
        return frozenset(self.entries())

    def is_valid(self) -> bool:
        try:
            validate_square(self.grid)
        except ValidationError:
            return False
        return True

    def conjugate_sym_row(self) -> "LatinSquare":
        """Swap the roles of rows and symbols: entry (r,c,s) becomes (s,c,r)."""
        n = self.n
        grid = [[0] * n for _ in range(n)]
        for r in range(n):
            for c in range(n):
                grid[self.grid[r][c] - 1][c] = r + 1
        return LatinSquare(n, tuple(tuple(row) for row in grid))

    def transpose(self) -> "LatinSquare":
        return LatinSquare(self.n, tuple(zip(*self.grid)))


@dataclass(frozen=True)
class PartialLatinSquare:
    """A conflict-free set of entries: no two share two coordinates."""

    n: int
    entries: frozenset

    def __post_init__(self):
        _check_conflict_free(self.n, self.entries)

    @cached_property
    def by_row_col(self) -> dict:
        return {(e.row, e.col): e.sym for e in self.entries}

    @cached_property
    def by_row_sym(self) -> dict:
        return {(e.row, e.sym): e.col for e in self.entries}

    @cached_property
    def by_col_sym(self) -> dict:
        return {(e.col, e.sym): e.row for e in self.entries}

    @cached_property
    def rows_to_entries(self) -> dict:
        out: dict = {}
        for e in sorted(self.entries):
            out.setdefault(e.row, []).append(e)
        return out

    def cell(self, row: int, col: int):
        return self.by_row_col.get((row, col))

    def with_entries(self, extra: Iterable[Entry]) -> "PartialLatinSquare":
        return PartialLatinSquare(self.n, self.entries | frozenset(extra))


@dataclass(frozen=True)
class OrderedPartialLatinSquare:
    """A partial square whose entries carry a significant order."""

    n: int
    entries: tuple

    def __post_init__(self):
        _check_conflict_free(self.n, self.entries)
        if len(set(self.entries)) != len(self.entries):
            raise ValidationError("conflict", "repeated entry in ordered square")

    def unordered(self) -> PartialLatinSquare:
        return PartialLatinSquare(self.n, frozenset(self.entries))

    def prefix(self, k: int) -> "OrderedPartialLatinSquare":
        return OrderedPartialLatinSquare(self.n, self.entries[:k])


@dataclass(frozen=True)
class ParityTriple:
    """Counts of odd row, column and symbol permutations of a square."""

    n_row: int
    n_col: int
    n_sym: int

    def total_parity(self) -> int:
        return (self.n_row + self.n_col + self.n_sym) % 2

    def mod2_cell(self) -> tuple:
        return (self.n_row % 2, self.n_col % 2, self.n_sym % 2)


@dataclass(frozen=True)
class Template:
    """A set of (row, col) positions used to sparsify a square."""

    n: int
    pairs: frozenset

    def __post_init__(self):
        for r, c in self.pairs:
            if not (1 <= r <= self.n and 1 <= c <= self.n):
                raise ValidationError("out-of-range", f"template pair ({r},{c})")


def _check_conflict_free(n: int, entries: Iterable[Entry]) -> None:
    seen_rc: set = set()
    seen_rs: set = set()
    seen_cs: set = set()
    for e in entries:
        r, c, s = e
        if not (1 <= r <= n and 1 <= c <= n and 1 <= s <= n):
            raise ValidationError("out-of-range", f"entry {tuple(e)} out of range")
        if (r, c) in seen_rc or (r, s) in seen_rs or (c, s) in seen_cs:
            raise ValidationError(
                "conflict", f"entry {tuple(e)} conflicts with an earlier entry"
            )
        seen_rc.add((r, c))
        seen_rs.add((r, s))
        seen_cs.add((c, s))


def validate_square(grid: Sequence[Sequence[int]]) -> LatinSquare:
    """Validate a grid and return it as a :class:`LatinSquare`.

    Scans cells row-major and reports the first violated cell.
    """
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        raise ValidationError("shape", "grid is not square")
    col_seen = [set() for _ in range(n)]
    for r in range(n):
        row_seen: set = set()
        for c in range(n):
            s = grid[r][c]
            if not isinstance(s, int) or not 1 <= s <= n:
                raise ValidationError(
                    "out-of-range",
                    f"symbol {s!r} out of range at ({r + 1},{c + 1})",
                    cell=(r + 1, c + 1),
                )
            if s in row_seen:
                raise ValidationError(
                    "duplicate-in-row",
                    f"symbol {s} repeated in row {r + 1} at ({r + 1},{c + 1})",
                    cell=(r + 1, c + 1),
                )
            if s in col_seen[c]:
                raise ValidationError(
                    "duplicate-in-column",
                    f"symbol {s} repeated in column {c + 1} at ({r + 1},{c + 1})",
                    cell=(r + 1, c + 1),
                )
            row_seen.add(s)
            col_seen[c].add(s)
    return LatinSquare(n, tuple(tuple(row) for row in grid))


def f_of_n(n: int) -> int:
    """0 when n = 0,1 (mod 4); 1 when n = 2,3 (mod 4)."""
    if n < 1:
        raise ValidationError("out-of-range", "order must be >= 1")
    return 0 if n % 4 in (0, 1) else 1


def slice_permutation(square: LatinSquare, axis: str, index: int) -> tuple:
    """The permutation read off one line of the square.

    axis='row' r: c -> L(r,c); axis='col' c: r -> L(r,c);
    axis='sym' s: r -> the unique c with L(r,c) = s.
    """
    n = square.n
    if not 1 <= index <= n:
        raise ValidationError("out-of-range", f"line index {index}")
    g = square.grid
    if axis == "row":
        return g[index - 1]
    if axis == "col":
        return tuple(g[r][index - 1] for r in range(n))
    if axis == "sym":
        perm = [0] * n
        for r in range(n):
            perm[r] = g[r].index(index) + 1
        return tuple(perm)
    raise ValidationError("out-of-range", f"unknown axis {axis!r}")


def perm_is_odd(perm: Sequence[int]) -> bool:
    """Parity via cycle decomposition; perm maps i -> perm[i-1], values 1..n."""
    n = len(perm)
    seen = [False] * n
    transpositions = 0
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            length += 1
        transpositions += length - 1
    return transpositions % 2 == 1


def line_parities(square: LatinSquare) -> tuple:
    """Per-line parity bits (1 = odd) for rows, columns and symbols."""
    n = square.n
    g = square.grid
    rows = tuple(int(perm_is_odd(g[r])) for r in range(n))
    cols = tuple(
        int(perm_is_odd(tuple(g[r][c] for r in range(n)))) for c in range(n)
    )
    # inverse of each row: inv[r][s-1] = column of s in row r
    inv = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            inv[r][g[r][c] - 1] = c + 1
    syms = tuple(
        int(perm_is_odd(tuple(inv[r][s] for r in range(n)))) for s in range(n)
    )
    return rows, cols, syms


def parity_counts(square: LatinSquare) -> ParityTriple:
    rows, cols, syms = line_parities(square)
    return ParityTriple(sum(rows), sum(cols), sum(syms))


def cycle_switch(
    square: LatinSquare, axis: str, pair: tuple, start: Entry
) -> tuple:
    """Perform the full cycle switching on a pair of lines.

    Returns ``(switched_square, cycle_length)`` where the cycle length is the
    number of positions exchanged per line (2 for an intercalate switch).
    """
    i, j = pair
    if i == j:
        raise ValidationError("out-of-range", "switch lines must differ")
    if axis == "row":
        if start.row != i or square.cell(start.row, start.col) != start.sym:
            raise ValidationError("conflict", f"start {tuple(start)} not in row {i}")
        return _row_switch(square, i, j, start.col)
    if axis == "col":
        if start.col != i or square.cell(start.row, start.col) != start.sym:
            raise ValidationError("conflict", f"start {tuple(start)} not in column {i}")
        switched, length = _row_switch(square.transpose(), i, j, start.row)
        return switched.transpose(), length
    if axis == "sym":
        if start.sym != i or square.cell(start.row, start.col) != start.sym:
            raise ValidationError("conflict", f"start {tuple(start)} not on symbol {i}")
        conj = square.conjugate_sym_row()
        switched, length = _row_switch(conj, i, j, start.col)
        return switched.conjugate_sym_row(), length
    raise ValidationError("out-of-range", f"unknown axis {axis!r}")


def _row_switch(square: LatinSquare, r1: int, r2: int, c0: int) -> tuple:
    n = square.n
    grid = [list(row) for row in square.grid]
    top, bot = grid[r1 - 1], grid[r2 - 1]
    col_of_bot = {bot[c]: c for c in range(n)}
    cycle = []
    c = c0 - 1
    while True:
        cycle.append(c)
        c = col_of_bot[top[c]]
        if c == c0 - 1:
            break
    for c in cycle:
        top[c], bot[c] = bot[c], top[c]
    return LatinSquare(n, tuple(tuple(row) for row in grid)), len(cycle)


# ---------------------------------------------------------------------------
# Exhaustive enumeration (row-major lexicographic order)
# ---------------------------------------------------------------------------

def enumerate_all(n: int) -> Iterator[LatinSquare]:
    """Every Latin square of order n exactly once, lexicographic by grid.

    Guarded at n <= 5: order 6 already has ~8.1e8 squares.
    """
    if n > ENUMERATION_MAX_N:
        raise OrderTooLargeError(f"enumeration guard: n={n} > {ENUMERATION_MAX_N}")
    if n < 1:
        raise ValidationError("out-of-range", "order must be >= 1")
    for grid in _enumerate_grids(n):
        yield LatinSquare(n, grid)


def _enumerate_grids(n: int) -> Iterator[tuple]:
    import itertools

    # Rows are chosen among all permutations (lexicographic), constrained by
    # packed per-column symbol masks, so the stream is grid-lexicographic.
    perms = list(itertools.permutations(range(1, n + 1)))
    masks = [
        sum(1 << (c * n + p[c] - 1) for c in range(n)) for p in perms
    ]
    chosen: list = []

    def rec(colmask: int) -> Iterator[tuple]:
        if len(chosen) == n:
            yield tuple(chosen)
            return
        for p, m in zip(perms, masks):
            if colmask & m == 0:
                chosen.append(p)
                yield from rec(colmask | m)
                chosen.pop()

    yield from rec(0)


def count_all(n: int) -> int:
    """|L_n| by direct enumeration."""
    return sum(1 for _ in _enumerate_grids(n))


_ENUM_CACHE: dict = {}


def _packed_enumeration(n: int) -> list:
    if n not in _ENUM_CACHE:
        _ENUM_CACHE[n] = [
            bytes(s for row in grid for s in row) for grid in _enumerate_grids(n)
        ]
    return _ENUM_CACHE[n]


def exact_uniform_sample(n: int, rng) -> LatinSquare:
    """Uniform over all order-n squares by indexing into the enumeration."""
    if n > ENUMERATION_MAX_N:
        raise OrderTooLargeError(f"exact sampling guard: n={n} > {ENUMERATION_MAX_N}")
    packed = _packed_enumeration(n)
    flat = packed[rng.randrange(len(packed))]
    return LatinSquare(n, tuple(tuple(flat[r * n : (r + 1) * n]) for r in range(n)))


def cyclic_square(n: int) -> LatinSquare:
    """The addition table of Z_n; canonical chain start."""
    return LatinSquare(
        n, tuple(tuple((r + c) % n + 1 for c in range(n)) for r in range(n))
    )


# ---------------------------------------------------------------------------
# Templates, block slices, random subsets
# ---------------------------------------------------------------------------

def template_sample(n: int, density: float, rng) -> Template:
    """Include each (row, col) pair independently with the given probability."""
    if not 0 <= density <= 1:
        raise ValidationError("out-of-range", f"density {density}")
    pairs = frozenset(
        (r, c)
        for r in range(1, n + 1)
        for c in range(1, n + 1)
        if rng.random() < density
    )
    return Template(n, pairs)


def template_intersect(template: Template, square: LatinSquare) -> PartialLatinSquare:
    """Keep exactly the entries of the square at the template's positions."""
    entries = frozenset(
        Entry(r, c, square.cell(r, c)) for (r, c) in template.pairs
    )
    return PartialLatinSquare(square.n, entries)


def _scaled_floor(x, m: int) -> int:
    if isinstance(x, Fraction):
        return int(x * m) if (x * m).denominator == 1 else math.floor(x * m)
    # snap float products like (1/5)*15 to the intended integer
    return math.floor(x * m + 1e-9)


def block_slice(ordered: OrderedPartialLatinSquare, iota, kappa) -> PartialLatinSquare:
    """Entries e_i with iota*m < i <= kappa*m (1-based index window)."""
    if not (0 <= iota <= kappa <= 1):
        raise ValidationError("out-of-range", f"window ({iota},{kappa})")
    m = len(ordered.entries)
    lo = _scaled_floor(iota, m)
    hi = _scaled_floor(kappa, m)
    return PartialLatinSquare(ordered.n, frozenset(ordered.entries[lo:hi]))


def random_ordered_subset(square: LatinSquare, m: int, rng) -> OrderedPartialLatinSquare:
    """Uniform m-subset of the square's entries in uniform random order."""
    n2 = square.n * square.n
    if not 0 <= m <= n2:
        raise ValidationError("out-of-range", f"m={m} not in 0..{n2}")
    picked = rng.sample(square.entries(), m)
    return OrderedPartialLatinSquare(square.n, tuple(picked))


# ---------------------------------------------------------------------------
# JSON wire formats
# ---------------------------------------------------------------------------

def square_to_json(square: LatinSquare) -> dict:
    return {"n": square.n, "grid": [list(row) for row in square.grid]}


def square_from_json(obj: dict) -> LatinSquare:
    return validate_square(obj["grid"])


def partial_to_json(partial: PartialLatinSquare) -> dict:
    return {"n": partial.n, "entries": [list(e) for e in sorted(partial.entries)]}


def partial_from_json(obj: dict) -> PartialLatinSquare:
    entries = frozenset(Entry(*map(int, e)) for e in obj["entries"])
    return PartialLatinSquare(int(obj["n"]), entries)


def ordered_to_json(ordered: OrderedPartialLatinSquare) -> dict:
    return {"n": ordered.n, "entries": [list(e) for e in ordered.entries]}


def ordered_from_json(obj: dict) -> OrderedPartialLatinSquare:
    entries = tuple(Entry(*map(int, e)) for e in obj["entries"])
    return OrderedPartialLatinSquare(int(obj["n"]), entries)


def template_to_json(template: Template) -> dict:
    return {"n": template.n, "pairs": [list(p) for p in sorted(template.pairs)]}


def template_from_json(obj: dict) -> Template:
    return Template(int(obj["n"]), frozenset((int(r), int(c)) for r, c in obj["pairs"]))
