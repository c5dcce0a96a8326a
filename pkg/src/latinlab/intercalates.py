"""Intercalates: enumeration, switching, the isolated/critical/stable
classification, sigma abstraction, canonicity, and max-disjoint counting.

A critical set is a set of (up to four) isolated intercalates such that
switching some subset of them creates a new intercalate meeting all of them;
stable intercalates are the isolated ones in no critical set.  The word
"new" is read as: distinct from every (possibly switched) member.  A
strictness flag additionally excludes intercalates already present in the
source square and untouched by the switches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .core import Entry, LatinSquare, PartialLatinSquare
from .errors import ValidationError

__all__ = [
    "Intercalate",
    "SigmaKey",
    "CriticalSet",
    "DisjointFamilyResult",
    "enumerate_intercalates",
    "switch_intercalate",
    "switch_many",
    "isolated_intercalates",
    "find_critical_sets",
    "stable_intercalates",
    "stable_intercalates_reference",
    "sigma_set",
    "verify_canonicity",
    "count_disjoint_intercalates_max",
    "max_disjoint_family",
    "intercalate_to_json",
    "intercalate_from_json",
]


@dataclass(frozen=True, order=True)
class SigmaKey:
    """Unordered (row pair, column pair, symbol pair) of an intercalate;
    identical for an intercalate and its switch."""

    rows: tuple
    cols: tuple
    syms: tuple


@dataclass(frozen=True, order=True)
class Intercalate:
    """A 2x2 Latin subsquare.  ``top_left`` is the symbol in the cell
    (rows[0], cols[0]), which distinguishes the two states sharing a key."""

    rows: tuple
    cols: tuple
    syms: tuple
    top_left: int

    @property
    def entries(self) -> tuple:
        r1, r2 = self.rows
        c1, c2 = self.cols
        a = self.top_left
        b = self.syms[0] if a == self.syms[1] else self.syms[1]
        return (Entry(r1, c1, a), Entry(r1, c2, b), Entry(r2, c1, b), Entry(r2, c2, a))

    def switched(self) -> "Intercalate":
        a = self.top_left
        b = self.syms[0] if a == self.syms[1] else self.syms[1]
        return Intercalate(self.rows, self.cols, self.syms, b)

    def sigma(self) -> SigmaKey:
        return SigmaKey(self.rows, self.cols, self.syms)


@dataclass(frozen=True)
class CriticalSet:
    """Members, a witness switch subset, and the intercalate it creates."""

    members: tuple
    witness_switch_subset: tuple
    witness_new_intercalate: Intercalate


@dataclass(frozen=True)
class DisjointFamilyResult:
    """Size of a maximum entry-disjoint family; ``exact`` is False when the
    branch-and-bound budget ran out and a greedy lower bound is reported."""

    size: int
    exact: bool


def _as_partial(square) -> PartialLatinSquare:
    if isinstance(square, LatinSquare):
        return PartialLatinSquare(square.n, square.entry_set())
    return square


def enumerate_intercalates(square) -> list:
    """All intercalates (4 entries present), in canonical order."""
    partial = _as_partial(square)
    row_maps: dict = {}
    for e in partial.entries:
        row_maps.setdefault(e.row, {})[e.col] = e.sym
    out = []
    rows = sorted(row_maps)
    for i, r1 in enumerate(rows):
        d1 = row_maps[r1]
        for r2 in rows[i + 1 :]:
            d2 = row_maps[r2]
            common = sorted(set(d1) & set(d2))
            for j, c1 in enumerate(common):
                a = d1[c1]
                for c2 in common[j + 1 :]:
                    b = d1[c2]
                    if a != b and d2[c1] == b and d2[c2] == a:
                        syms = (a, b) if a < b else (b, a)
                        out.append(Intercalate((r1, r2), (c1, c2), syms, a))
    out.sort()
    return out


def switch_intercalate(square, intercalate: Intercalate):
    """Swap the two symbols of one intercalate; returns the same kind of
    square that was passed in."""
    return switch_many(square, [intercalate])


def switch_many(square, intercalates: Iterable[Intercalate]):
    """Switch several entry-disjoint intercalates at once."""
    partial = _as_partial(square)
    old: set = set()
    new: set = set()
    for a in intercalates:
        ents = a.entries
        if not all(e in partial.entries for e in ents):
            raise ValidationError("conflict", f"intercalate {a} not present")
        old.update(ents)
        new.update(a.switched().entries)
    result = PartialLatinSquare(partial.n, (partial.entries - old) | new)
    if isinstance(square, LatinSquare):
        grid = [[0] * square.n for _ in range(square.n)]
        for r, c, s in result.entries:
            grid[r - 1][c - 1] = s
        return LatinSquare(square.n, tuple(tuple(row) for row in grid))
    return result


def isolated_intercalates(square) -> list:
    """Intercalates sharing no entry with any other intercalate."""
    found = enumerate_intercalates(square)
    usage: dict = {}
    for a in found:
        for e in a.entries:
            usage[e] = usage.get(e, 0) + 1
    return [a for a in found if all(usage[e] == 1 for e in a.entries)]


def find_critical_sets(
    square, max_size: int = 4, strict_new: bool = False
) -> list:
    """All critical sets, by the anchored search.

    Any new intercalate created by switching lives on a 2x2 cell rectangle
    that is fully occupied, and every member must own one of those four
    cells, so it suffices to scan occupied rectangles touching isolated
    intercalates and try the 2^k switch patterns of the owners.
    """
    partial = _as_partial(square)
    iso = isolated_intercalates(partial)
    if not iso:
        return []
    owner: dict = {}
    for idx, a in enumerate(iso):
        for e in a.entries:
            owner[(e.row, e.col)] = idx
    row_maps: dict = {}
    for e in partial.entries:
        row_maps.setdefault(e.row, {})[e.col] = e.sym
    entry_set = partial.entries
    other_sym = [
        {a.syms[0]: a.syms[1], a.syms[1]: a.syms[0]} for a in iso
    ]
    results = []
    seen = set()
    rows = sorted(row_maps)
    for i, r1 in enumerate(rows):
        d1 = row_maps[r1]
        for r2 in rows[i + 1 :]:
            d2 = row_maps[r2]
            common = sorted(set(d1) & set(d2))
            for j, c1 in enumerate(common):
                for c2 in common[j + 1 :]:
                    cells = ((r1, c1), (r1, c2), (r2, c1), (r2, c2))
                    owners = sorted({owner[x] for x in cells if x in owner})
                    if not owners:
                        continue
                    base = (d1[c1], d1[c2], d2[c1], d2[c2])
                    cell_owner = tuple(owner.get(x, -1) for x in cells)
                    for bits in range(1 << len(owners)):
                        flipped = {
                            owners[k] for k in range(len(owners)) if bits >> k & 1
                        }
                        syms = tuple(
                            other_sym[o][s] if o in flipped else s
                            for s, o in zip(base, cell_owner)
                        )
                        a, b, c, d = syms
                        if not (a == d and b == c and a != b):
                            continue
                        cand = Intercalate(
                            (r1, r2), (c1, c2), (a, b) if a < b else (b, a), a
                        )
                        if strict_new and all(e in entry_set for e in cand.entries):
                            continue
                        state = {
                            o: (iso[o].switched() if o in flipped else iso[o])
                            for o in owners
                        }
                        bad = {o for o in owners if state[o] == cand}
                        if flipped & bad:
                            continue
                        members = frozenset(owners) - bad
                        if not members or len(members) > max_size:
                            continue
                        key = (members, frozenset(flipped), cand)
                        if key in seen:
                            continue
                        seen.add(key)
                        results.append(
                            CriticalSet(
                                members=tuple(iso[o] for o in sorted(members)),
                                witness_switch_subset=tuple(
                                    iso[o] for o in sorted(flipped)
                                ),
                                witness_new_intercalate=cand,
                            )
                        )
    return results


def stable_intercalates(square) -> list:
    """Isolated intercalates contained in no critical set."""
    partial = _as_partial(square)
    iso = isolated_intercalates(partial)
    unstable: set = set()
    for crit in find_critical_sets(partial):
        unstable.update(crit.members)
    return [a for a in iso if a not in unstable]


def stable_intercalates_reference(
    square, max_size: int = 4, strict_new: bool = False
) -> list:
    """Definitional brute force: try every subset of isolated intercalates
    of size <= max_size and every switch pattern, re-enumerating the switched
    square in full.  Equivalence oracle for the anchored search."""
    partial = _as_partial(square)
    iso = isolated_intercalates(partial)
    entry_set = partial.entries
    unstable: set = set()
    for t in range(1, max_size + 1):
        for members in itertools.combinations(iso, t):
            if all(a in unstable for a in members):
                continue
            for k in range(t + 1):
                for sub in itertools.combinations(members, k):
                    switched = switch_many(partial, sub)
                    states = [a.switched() if a in sub else a for a in members]
                    state_entries = [set(s.entries) for s in states]
                    for cand in enumerate_intercalates(switched):
                        if cand in states:
                            continue
                        if strict_new and all(
                            e in entry_set for e in cand.entries
                        ):
                            continue
                        cand_entries = set(cand.entries)
                        if all(cand_entries & se for se in state_entries):
                            unstable.update(members)
                            break
    return [a for a in iso if a not in unstable]


def sigma_set(square) -> frozenset:
    """Keys of the stable intercalates; invariant under stable switches."""
    return frozenset(a.sigma() for a in stable_intercalates(square))


def verify_canonicity(square, intercalate: Intercalate) -> bool:
    """True iff the sigma set is unchanged by switching the given stable
    intercalate."""
    stable = stable_intercalates(square)
    if intercalate not in stable:
        raise ValidationError("conflict", "intercalate is not stable here")
    before = frozenset(a.sigma() for a in stable)
    return before == sigma_set(switch_intercalate(square, intercalate))


def max_disjoint_family(
    intercalates: list, node_budget: int = 200_000
) -> DisjointFamilyResult:
    """Maximum entry-disjoint subfamily size by branch and bound."""
    k = len(intercalates)
    if k == 0:
        return DisjointFamilyResult(0, True)
    ents = [frozenset(a.entries) for a in intercalates]
    neigh = [0] * k
    for i in range(k):
        for j in range(i + 1, k):
            if ents[i] & ents[j]:
                neigh[i] |= 1 << j
                neigh[j] |= 1 << i
    # greedy pass (canonical order) for the initial bound / fallback
    greedy = 0
    taken: set = set()
    for i in range(k):
        if all(not (ents[i] & ents[j]) for j in taken):
            taken.add(i)
            greedy += 1
    best = greedy
    nodes = 0
    exhausted = False

    def rec(avail: int, count: int) -> None:
        nonlocal best, nodes, exhausted
        if exhausted:
            return
        nodes += 1
        if nodes > node_budget:
            exhausted = True
            return
        if count + avail.bit_count() <= best:
            return
        if avail == 0:
            best = max(best, count)
            return
        v = (avail & -avail).bit_length() - 1
        if count + 1 > best:
            best = count + 1  # including v is always feasible
        rec(avail & ~((1 << v) | neigh[v]), count + 1)
        rec(avail & ~(1 << v), count)

    rec((1 << k) - 1, 0)
    return DisjointFamilyResult(best, not exhausted)


def count_disjoint_intercalates_max(square) -> DisjointFamilyResult:
    """Max entry-disjoint intercalate family size (exact at desk scale)."""
    return max_disjoint_family(enumerate_intercalates(square))


def intercalate_to_json(intercalate: Intercalate) -> dict:
    return {
        "rows": list(intercalate.rows),
        "cols": list(intercalate.cols),
        "syms": list(intercalate.syms),
        "top_left": intercalate.top_left,
    }


def intercalate_from_json(obj: dict) -> Intercalate:
    rows = tuple(sorted(int(x) for x in obj["rows"]))
    cols = tuple(sorted(int(x) for x in obj["cols"]))
    syms = tuple(sorted(int(x) for x in obj["syms"]))
    top_left = int(obj.get("top_left", syms[0]))
    if top_left not in syms:
        raise ValidationError("out-of-range", "top_left symbol not in syms")
    return Intercalate(rows, cols, syms, top_left)
