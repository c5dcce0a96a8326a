"""Triangle removal process, binomial hypergraph model, switching chain.

The triangle removal process keeps an index-addressable triangle store with
swap-remove so each step is O(n); outcomes are ordered partial squares, with
running out of triangles reported as the Bottom value (never retried here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Entry, LatinSquare, OrderedPartialLatinSquare, PartialLatinSquare, cyclic_square
from .errors import ValidationError

__all__ = [
    "TrpOutcome",
    "HypergraphSample",
    "TriangleStore",
    "trp_sample",
    "trp_from_partial",
    "trp_log_probability",
    "trp_outcome_tree",
    "binomial_hypergraph",
    "strip_conflicts",
    "chain_sample",
    "MixingChain",
]


@dataclass(frozen=True)
class TrpOutcome:
    """Result of m steps of triangle removal; ``result is None`` means Bottom."""

    n: int
    result: OrderedPartialLatinSquare | None
    steps_taken: int

    @property
    def bottom(self) -> bool:
        return self.result is None

    def to_json(self) -> dict:
        entries = [] if self.result is None else [list(e) for e in self.result.entries]
        return {
            "n": self.n,
            "entries": entries,
            "bottom": self.result is None,
            "steps_taken": self.steps_taken,
        }


@dataclass(frozen=True)
class HypergraphSample:
    """A set of (row, col, sym) triples; conflicts permitted."""

    n: int
    hyperedges: frozenset

    def __post_init__(self):
        for r, c, s in self.hyperedges:
            if not (1 <= r <= self.n and 1 <= c <= self.n and 1 <= s <= self.n):
                raise ValidationError("out-of-range", f"hyperedge ({r},{c},{s})")


class TriangleStore:
    """Triangles of a leftover graph with O(n) removal updates.

    A triangle is an addable entry (r,c,s): all of the pairs (r,c), (r,s),
    (c,s) uncovered.  Removing a triangle invalidates the triangles through
    its three pairs.  Insertion order is fixed, so draws are reproducible.
    """

    def __init__(self, partial: PartialLatinSquare | None, n: int):
        self.n = n
        nn = n * n
        self.rc = bytearray(nn)
        self.rs = bytearray(nn)
        self.cs = bytearray(nn)
        if partial is not None:
            for r, c, s in partial.entries:
                self.rc[(r - 1) * n + (c - 1)] = 1
                self.rs[(r - 1) * n + (s - 1)] = 1
                self.cs[(c - 1) * n + (s - 1)] = 1
        self.items: list = []
        self.pos: dict = {}
        for r in range(n):
            for c in range(n):
                if self.rc[r * n + c]:
                    continue
                for s in range(n):
                    if not self.rs[r * n + s] and not self.cs[c * n + s]:
                        t = (r * n + c) * n + s
                        self.pos[t] = len(self.items)
                        self.items.append(t)

    def __len__(self) -> int:
        return len(self.items)

    def _discard(self, t: int) -> None:
        i = self.pos.pop(t, None)
        if i is None:
            return
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def is_triangle(self, entry: Entry) -> bool:
        n = self.n
        t = ((entry.row - 1) * n + (entry.col - 1)) * n + (entry.sym - 1)
        return t in self.pos

    def remove_entry(self, entry: Entry) -> None:
        """Cover the entry's three pairs and drop dead triangles."""
        n = self.n
        r, c, s = entry.row - 1, entry.col - 1, entry.sym - 1
        self.rc[r * n + c] = 1
        self.rs[r * n + s] = 1
        self.cs[c * n + s] = 1
        for x in range(n):
            self._discard((r * n + c) * n + x)
            self._discard((r * n + x) * n + s)
            self._discard((x * n + c) * n + s)

    def draw(self, rng) -> Entry:
        t = self.items[rng.randrange(len(self.items))]
        s = t % self.n
        rc = t // self.n
        return Entry(rc // self.n + 1, rc % self.n + 1, s + 1)


def trp_sample(n: int, m: int, rng) -> TrpOutcome:
    """m uniform triangle-removal steps on the complete tripartite graph."""
    if m > n * n:
        raise ValidationError("out-of-range", f"m={m} exceeds n^2")
    return _run_trp(TriangleStore(None, n), n, m, rng)


def trp_from_partial(partial: PartialLatinSquare, m: int, rng) -> TrpOutcome:
    """As trp_sample, but triangles come from the leftover graph of P."""
    return _run_trp(TriangleStore(partial, partial.n), partial.n, m, rng)


def _run_trp(store: TriangleStore, n: int, m: int, rng) -> TrpOutcome:
    picked: list = []
    for step in range(m):
        if len(store) == 0:
            return TrpOutcome(n, None, step)
        e = store.draw(rng)
        picked.append(e)
        store.remove_entry(e)
    return TrpOutcome(n, OrderedPartialLatinSquare(n, tuple(picked)), m)


def trp_log_probability(ordered: OrderedPartialLatinSquare) -> float:
    """log P[TRP(n,m) = this exact ordered outcome]; -inf if unreachable.

    The probability is the product over steps of 1 / (triangle count of the
    leftover graph before the step).
    """
    store = TriangleStore(None, ordered.n)
    total = 0.0
    for e in ordered.entries:
        if not store.is_triangle(e):
            return float("-inf")
        total -= math.log(len(store))
        store.remove_entry(e)
    return total


def trp_outcome_tree(n: int, m: int, base: tuple = ()) -> tuple:
    """Exhaustive execution tree of TRP(n, m) in exact rationals.

    Returns ``(outcomes, bottom_prob)`` where outcomes maps each reachable
    ordered entry tuple (``base`` excluded) to its exact probability.  This
    is a brute-force oracle: it recomputes the triangle set from scratch at
    every node and shares no code with TriangleStore.
    """
    outcomes: dict = {}
    bottom = [Fraction(0)]
    base = tuple(base)

    def triangles(chosen: tuple) -> list:
        rc = {(e.row, e.col) for e in base + chosen}
        rs = {(e.row, e.sym) for e in base + chosen}
        cs = {(e.col, e.sym) for e in base + chosen}
        out = []
        for r in range(1, n + 1):
            for c in range(1, n + 1):
                if (r, c) in rc:
                    continue
                for s in range(1, n + 1):
                    if (r, s) not in rs and (c, s) not in cs:
                        out.append(Entry(r, c, s))
        return out

    def walk(chosen: tuple, prob: Fraction) -> None:
        if len(chosen) == m:
            outcomes[chosen] = prob
            return
        tris = triangles(chosen)
        if not tris:
            bottom[0] += prob
            return
        step = prob / len(tris)
        for t in tris:
            walk(chosen + (t,), step)

    walk((), Fraction(1))
    return outcomes, bottom[0]


def binomial_hypergraph(n: int, p: float, rng) -> HypergraphSample:
    """Include each of the n^3 possible triples independently."""
    if not 0 <= p <= 1:
        raise ValidationError("out-of-range", f"p={p}")
    edges = frozenset(
        (r, c, s)
        for r in range(1, n + 1)
        for c in range(1, n + 1)
        for s in range(1, n + 1)
        if rng.random() < p
    )
    return HypergraphSample(n, edges)


def strip_conflicts(sample: HypergraphSample) -> PartialLatinSquare:
    """Delete every hyperedge sharing two vertices with another hyperedge."""
    from collections import Counter

    rc: Counter = Counter()
    rs: Counter = Counter()
    cs: Counter = Counter()
    for r, c, s in sample.hyperedges:
        rc[(r, c)] += 1
        rs[(r, s)] += 1
        cs[(c, s)] += 1
    kept = frozenset(
        Entry(r, c, s)
        for r, c, s in sample.hyperedges
        if rc[(r, c)] == 1 and rs[(r, s)] == 1 and cs[(c, s)] == 1
    )
    return PartialLatinSquare(sample.n, kept)


class MixingChain:
    """Proper/improper switching chain over order-n Latin squares.

    The state is the 0/1 incidence cube of a square, temporarily allowed one
    -1 cell between proper states.  Starts from the cyclic table.  Steps are
    counted in proper states visited: the walk watched at proper states has
    the uniform distribution as its exact stationary law, whereas stopping
    at a fixed raw-move count would be length-biased by the improper
    excursions.  Ergodic but with no proven mixing rate; samples are
    approximately uniform only.  Default burn-in n^3 and thinning n^2
    proper visits are heuristics, not guarantees.
    """

    def __init__(self, n: int, rng, burn_in: int | None = None, thin: int | None = None):
        self.n = n
        self.rng = rng
        self.thin = n * n if thin is None else thin
        self.x = [0] * (n * n * n)
        self._improper: tuple | None = None
        for r in range(n):
            for c in range(n):
                self.x[(r * n + c) * n + (r + c) % n] = 1
        self.advance(n * n * n if burn_in is None else burn_in)

    def _move(self) -> None:
        n, x, rng = self.n, self.x, self.rng
        if self._improper is None:
            r = rng.randrange(n)
            c = rng.randrange(n)
            while True:
                s = rng.randrange(n)
                if x[(r * n + c) * n + s] == 0:
                    break
        else:
            r, c, s = self._improper
        r2 = rng.choice([a for a in range(n) if x[(a * n + c) * n + s] == 1])
        c2 = rng.choice([a for a in range(n) if x[(r * n + a) * n + s] == 1])
        s2 = rng.choice([a for a in range(n) if x[(r * n + c) * n + a] == 1])
        for rr, cc, ss in ((r, c, s), (r, c2, s2), (r2, c, s2), (r2, c2, s)):
            x[(rr * n + cc) * n + ss] += 1
        for rr, cc, ss in ((r2, c, s), (r, c2, s), (r, c, s2), (r2, c2, s2)):
            x[(rr * n + cc) * n + ss] -= 1
        self._improper = (r2, c2, s2) if x[(r2 * n + c2) * n + s2] < 0 else None

    def advance(self, visits: int) -> None:
        """Walk until the given number of proper states have been visited."""
        seen = 0
        while seen < visits:
            self._move()
            if self._improper is None:
                seen += 1

    def current(self) -> LatinSquare:
        n = self.n
        grid = [[0] * n for _ in range(n)]
        for r in range(n):
            for c in range(n):
                base = (r * n + c) * n
                for s in range(n):
                    if self.x[base + s] == 1:
                        grid[r][c] = s + 1
                        break
        return LatinSquare(n, tuple(tuple(row) for row in grid))

    def sample(self) -> LatinSquare:
        self.advance(self.thin)
        return self.current()


def chain_sample(n: int, steps: int, rng, burn_in: int = 0, thin: int | None = None) -> LatinSquare:
    """Run the switching chain for the given number of proper-visit steps
    and return the current square (the cyclic table when steps = 0)."""
    if steps < 0:
        raise ValidationError("out-of-range", "steps must be >= 0")
    if steps == 0 and burn_in == 0:
        return cyclic_square(n)
    chain = MixingChain(n, rng, burn_in=burn_in, thin=thin or n * n)
    chain.advance(steps)
    return chain.current()
