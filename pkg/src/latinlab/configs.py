"""Split intercalates, bad/critical configurations, threatened pairs,
the four basic threat types with their entry orderings, and expander audits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Entry, OrderedPartialLatinSquare, PartialLatinSquare, block_slice
from .errors import InstanceTooLargeError, OrderTooLargeError, ValidationError
from .intercalates import (
    DisjointFamilyResult,
    Intercalate,
    enumerate_intercalates,
    find_critical_sets,
    max_disjoint_family,
    stable_intercalates,
)

__all__ = [
    "PermissibleTuple",
    "BadConfiguration",
    "ThreatRecord",
    "BasicTypeId",
    "Embedding",
    "Q_PATTERNS",
    "PI_DEFAULT",
    "SPECIAL_PAIRS",
    "basic_type",
    "full_tuple",
    "is_permissible",
    "is_split",
    "max_disjoint_split_intercalates",
    "bad_configurations",
    "covered_entry_count",
    "threatened_pairs",
    "basic_threat_embeddings",
    "embedding_special_pair",
    "pi_consistent_count",
    "expander_audit",
    "is_expander_exact",
]


@dataclass(frozen=True)
class PermissibleTuple:
    """Six line sets (R, R*, C, C*, S, S*); R* is the short one."""

    rows: frozenset
    rows_star: frozenset
    cols: frozenset
    cols_star: frozenset
    syms: frozenset
    syms_star: frozenset

    def to_json(self) -> dict:
        return {
            "R": sorted(self.rows),
            "R*": sorted(self.rows_star),
            "C": sorted(self.cols),
            "C*": sorted(self.cols_star),
            "S": sorted(self.syms),
            "S*": sorted(self.syms_star),
        }


def full_tuple(n: int, rows_star) -> PermissibleTuple:
    """The trivial tuple: R* as given, the other five sets all of [n]."""
    everything = frozenset(range(1, n + 1))
    return PermissibleTuple(
        everything, frozenset(rows_star), everything, everything, everything, everything
    )


def is_permissible(tup: PermissibleTuple, ell: int, beta: float, n: int) -> bool:
    bound = beta * n
    return len(tup.rows_star) == ell and all(
        len(s) >= bound
        for s in (tup.rows, tup.cols, tup.cols_star, tup.syms, tup.syms_star)
    )


def _axis_split(pair: tuple, plain: frozenset, star: frozenset) -> bool:
    a, b = pair
    return (a in plain and b in star) or (b in plain and a in star)


def is_split(intercalate: Intercalate, tup: PermissibleTuple) -> bool:
    """One line of each axis assignable to the plain set, the other to the
    starred set; the sets may overlap."""
    return (
        _axis_split(intercalate.rows, tup.rows, tup.rows_star)
        and _axis_split(intercalate.cols, tup.cols, tup.cols_star)
        and _axis_split(intercalate.syms, tup.syms, tup.syms_star)
    )


def max_disjoint_split_intercalates(square, tup: PermissibleTuple) -> DisjointFamilyResult:
    return max_disjoint_family(
        [a for a in enumerate_intercalates(square) if is_split(a, tup)]
    )


# ---------------------------------------------------------------------------
# Bad configurations and threatened pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BadConfiguration:
    """Either two intercalates meeting in one entry, or a critical set plus
    the present part of its creatable intercalate."""

    kind: str  # "intersecting-pair" | "critical"
    entries: frozenset
    intercalates: tuple
    special_entries: tuple | None = None
    witness_new: Intercalate | None = None


@dataclass(frozen=True)
class ThreatRecord:
    pair: tuple
    threat_entries: frozenset
    witness: BadConfiguration


def bad_configurations(square) -> list:
    """All bad configurations of a partial square."""
    out = []
    found = enumerate_intercalates(square)
    for i, a in enumerate(found):
        ea = set(a.entries)
        for b in found[i + 1 :]:
            shared = ea & set(b.entries)
            if len(shared) == 1:
                out.append(
                    BadConfiguration(
                        kind="intersecting-pair",
                        entries=frozenset(a.entries) | frozenset(b.entries),
                        intercalates=(a, b),
                    )
                )
    partial = square if isinstance(square, PartialLatinSquare) else None
    entry_set = (
        partial.entries if partial is not None else frozenset(square.entry_set())
    )
    for crit in find_critical_sets(square):
        present = frozenset(
            e for e in crit.witness_new_intercalate.entries if e in entry_set
        )
        entries: frozenset = present
        for m in crit.members:
            entries |= frozenset(m.entries)
        out.append(
            BadConfiguration(
                kind="critical",
                entries=entries,
                intercalates=crit.members,
                witness_new=crit.witness_new_intercalate,
            )
        )
    return out


def covered_entry_count(square, rows_star, tuple_family=None) -> int:
    """Entries in rows of R* lying in a split intercalate of some bad
    configuration; each entry counts once no matter how often it is covered."""
    partial = square if isinstance(square, PartialLatinSquare) else None
    n = partial.n if partial is not None else square.n
    family = tuple_family or (full_tuple(n, rows_star),)
    covered: set = set()
    for config in bad_configurations(square):
        for member in config.intercalates:
            if any(is_split(member, t) for t in family):
                covered.update(e for e in member.entries if e.row in rows_star)
    return len(covered)


def threatened_pairs(square, rows_star) -> list:
    """All addable same-row pairs in rows of R* whose addition completes a
    split bad configuration with them as special entries.

    The two added entries complete an intercalate A* whose other two entries
    already sit in some row r'; the pair is threatened exactly when A* is
    not stable in the extended square.  One record is emitted per completing
    row r' (per copy), so a pair may appear several times.
    """
    partial = square if isinstance(square, PartialLatinSquare) else PartialLatinSquare(
        square.n, square.entry_set()
    )
    n = partial.n
    rows_star = frozenset(rows_star)
    records = []
    row_syms = {}
    col_syms = {}
    for e in partial.entries:
        row_syms.setdefault(e.row, set()).add(e.sym)
        col_syms.setdefault(e.col, set()).add(e.sym)
    by_rc = partial.by_row_col
    for r_host, entries in sorted(partial.rows_to_entries.items()):
        for e_a, e_b in itertools.combinations(entries, 2):
            if e_a.sym == e_b.sym:
                continue
            c1, c2 = e_a.col, e_b.col
            x, y = e_b.sym, e_a.sym  # symbols the new row must place at c1, c2
            for r_star in sorted(rows_star):
                if r_star == r_host:
                    continue
                if (r_star, c1) in by_rc or (r_star, c2) in by_rc:
                    continue
                taken = row_syms.get(r_star, ())
                if x in taken or y in taken:
                    continue
                if x in col_syms.get(c1, ()) or y in col_syms.get(c2, ()):
                    continue
                e1, e2 = Entry(r_star, c1, x), Entry(r_star, c2, y)
                extended = partial.with_entries((e1, e2))
                rows = (r_star, r_host) if r_star < r_host else (r_host, r_star)
                top_left = x if rows[0] == r_star else y
                syms = (x, y) if x < y else (y, x)
                a_star = Intercalate(rows, (c1, c2), syms, top_left)
                witness = _unstable_witness(extended, a_star)
                if witness is not None:
                    witness = BadConfiguration(
                        kind=witness.kind,
                        entries=witness.entries,
                        intercalates=witness.intercalates,
                        special_entries=(e1, e2),
                        witness_new=witness.witness_new,
                    )
                    records.append(
                        ThreatRecord(
                            pair=(e1, e2),
                            threat_entries=witness.entries - {e1, e2},
                            witness=witness,
                        )
                    )
    return records


def _unstable_witness(extended: PartialLatinSquare, a_star: Intercalate):
    """A bad configuration of the extended square that contains a_star, or
    None when a_star is stable there."""
    ents = set(a_star.entries)
    for other in enumerate_intercalates(extended):
        if other != a_star and ents & set(other.entries):
            return BadConfiguration(
                kind="intersecting-pair",
                entries=frozenset(a_star.entries) | frozenset(other.entries),
                intercalates=(a_star, other),
            )
    for crit in find_critical_sets(extended):
        if a_star in crit.members:
            entries = frozenset(
                e for e in crit.witness_new_intercalate.entries if e in extended.entries
            )
            for m in crit.members:
                entries |= frozenset(m.entries)
            return BadConfiguration(
                kind="critical",
                entries=entries,
                intercalates=crit.members,
                witness_new=crit.witness_new_intercalate,
            )
    return None


# ---------------------------------------------------------------------------
# Basic threat types
# ---------------------------------------------------------------------------

# Role-indexed 3x3 patterns; row role 1 is the starred row.  Types 1 and 2
# leave the starred row empty; types 3 and 4 put symbol role 3 at (1, c3).
Q_PATTERNS = {
    1: ((2, 1, 2), (2, 2, 1), (2, 3, 3), (3, 2, 3), (3, 3, 2)),
    2: ((2, 1, 1), (2, 2, 2), (2, 3, 3), (3, 2, 3), (3, 3, 2)),
    3: ((1, 3, 3), (2, 1, 1), (2, 2, 2), (3, 2, 3), (3, 3, 2)),
    4: ((1, 3, 3), (2, 1, 2), (2, 2, 1), (3, 2, 3), (3, 3, 2)),
}

# Default entry orderings used by the fifths-consistency counters.
PI_DEFAULT = {
    1: ((3, 3, 2), (2, 3, 3), (3, 2, 3), (2, 2, 1), (2, 1, 2)),
    2: ((3, 3, 2), (2, 3, 3), (3, 2, 3), (2, 2, 2), (2, 1, 1)),
    3: ((3, 3, 2), (1, 3, 3), (3, 2, 3), (2, 2, 2), (2, 1, 1)),
    4: ((3, 3, 2), (1, 3, 3), (3, 2, 3), (2, 2, 1), (2, 1, 2)),
}

# The two missing entries that complete each pattern to a 7-entry basic bad
# configuration, as (row role, col role, sym role).
SPECIAL_PAIRS = {
    1: ((1, 1, 1), (1, 2, 2)),
    2: ((1, 1, 2), (1, 2, 1)),
    3: ((1, 1, 2), (1, 2, 1)),
    4: ((1, 1, 1), (1, 2, 2)),
}


@dataclass(frozen=True)
class BasicTypeId:
    t: int
    pattern: tuple
    order: tuple


def basic_type(t: int, order: tuple | None = None) -> BasicTypeId:
    if t not in Q_PATTERNS:
        raise ValidationError("out-of-range", f"basic type {t}")
    return BasicTypeId(t, Q_PATTERNS[t], order or PI_DEFAULT[t])


@dataclass(frozen=True)
class Embedding:
    """Part-preserving injective images of the three rows, columns and
    symbols of a pattern (index = role - 1)."""

    rows: tuple
    cols: tuple
    syms: tuple


def _match_embeddings(partial, order, rows_star, pools=None) -> list:
    """Backtracking unification of a role pattern against a partial square.

    ``order`` lists the pattern entries in processing order; ``pools[k]``
    optionally restricts which entries of P may realise position k.
    """
    all_entries = sorted(partial.entries)
    rows_star = frozenset(rows_star)
    rmap: dict = {}
    cmap: dict = {}
    smap: dict = {}
    used_r: set = set()
    used_c: set = set()
    used_s: set = set()
    results = []

    def rec(k: int) -> None:
        if k == len(order):
            if 1 in rmap:
                results.append(
                    Embedding(
                        tuple(rmap[i] for i in (1, 2, 3)),
                        tuple(cmap[i] for i in (1, 2, 3)),
                        tuple(smap[i] for i in (1, 2, 3)),
                    )
                )
                return
            for free in sorted(rows_star - used_r):
                results.append(
                    Embedding(
                        (free, rmap[2], rmap[3]),
                        tuple(cmap[i] for i in (1, 2, 3)),
                        tuple(smap[i] for i in (1, 2, 3)),
                    )
                )
            return
        pr, pc, ps = order[k]
        for e in pools[k] if pools is not None else all_entries:
            if pr in rmap:
                if e.row != rmap[pr]:
                    continue
            elif e.row in used_r or (pr == 1 and e.row not in rows_star):
                continue
            if pc in cmap:
                if e.col != cmap[pc]:
                    continue
            elif e.col in used_c:
                continue
            if ps in smap:
                if e.sym != smap[ps]:
                    continue
            elif e.sym in used_s:
                continue
            added = []
            if pr not in rmap:
                rmap[pr] = e.row
                used_r.add(e.row)
                added.append(("r", pr, e.row))
            if pc not in cmap:
                cmap[pc] = e.col
                used_c.add(e.col)
                added.append(("c", pc, e.col))
            if ps not in smap:
                smap[ps] = e.sym
                used_s.add(e.sym)
                added.append(("s", ps, e.sym))
            rec(k + 1)
            for kind, role, val in added:
                if kind == "r":
                    del rmap[role]
                    used_r.discard(val)
                elif kind == "c":
                    del cmap[role]
                    used_c.discard(val)
                else:
                    del smap[role]
                    used_s.discard(val)

    rec(0)
    return results


def basic_threat_embeddings(square, rows_star, type_id) -> list:
    """All embeddings of the given basic pattern with the starred row role
    landing in R*."""
    partial = square if isinstance(square, PartialLatinSquare) else PartialLatinSquare(
        square.n, square.entry_set()
    )
    tid = basic_type(type_id) if isinstance(type_id, int) else type_id
    return _match_embeddings(partial, tid.pattern, rows_star)


def embedding_special_pair(emb: Embedding, type_id) -> tuple:
    """The two entries whose addition completes the embedded pattern to a
    7-entry basic bad configuration."""
    t = type_id.t if isinstance(type_id, BasicTypeId) else type_id
    out = []
    for pr, pc, ps in SPECIAL_PAIRS[t]:
        out.append(Entry(emb.rows[pr - 1], emb.cols[pc - 1], emb.syms[ps - 1]))
    return tuple(out)


def pi_consistent_count(
    ordered: OrderedPartialLatinSquare, rows_star, type_id, order: tuple | None = None
) -> int:
    """Embeddings whose i-th ordered pattern entry lies in the i-th fifth."""
    tid = basic_type(type_id, order) if isinstance(type_id, int) else type_id
    pools = []
    for i in range(1, 6):
        block = block_slice(ordered, Fraction(i - 1, 5), Fraction(i, 5))
        pools.append(sorted(block.entries))
    embeddings = _match_embeddings(
        ordered.unordered(), tid.order, rows_star, pools=pools
    )
    return len(embeddings)


# ---------------------------------------------------------------------------
# Expander checks
# ---------------------------------------------------------------------------

def expander_audit(square, ell: int, beta: float, tuples: int, rng) -> dict:
    """Sample permissible 6-tuples (five sets of size ceil(beta n), the
    starred row set of size ell -- the hardest permissible sizes) and report
    how many lack a split stable intercalate."""
    partial = square if isinstance(square, PartialLatinSquare) else PartialLatinSquare(
        square.n, square.entry_set()
    )
    n = partial.n
    b = math.ceil(beta * n)
    if ell > n or b > n:
        raise ValidationError("out-of-range", "set sizes exceed the order")
    stable = stable_intercalates(partial)
    lines = list(range(1, n + 1))
    failures = 0
    witnesses = []
    for _ in range(tuples):
        tup = PermissibleTuple(
            frozenset(rng.sample(lines, b)),
            frozenset(rng.sample(lines, ell)),
            frozenset(rng.sample(lines, b)),
            frozenset(rng.sample(lines, b)),
            frozenset(rng.sample(lines, b)),
            frozenset(rng.sample(lines, b)),
        )
        if not any(is_split(a, tup) for a in stable):
            failures += 1
            if len(witnesses) < 32:
                witnesses.append(tup.to_json())
    return {
        "n": n,
        "ell": ell,
        "beta": beta,
        "stable_count": len(stable),
        "tuples_tested": tuples,
        "failures": failures,
        "witness_tuples": witnesses,
        "stable_found_fraction": 1.0 if tuples == 0 else 1 - failures / tuples,
    }


def is_expander_exact(square, ell: int, beta: float):
    """Quantify over all permissible 6-tuples (guarded to toy sizes).

    Returns ``(verdict, witness_tuple_or_None)``.  Shrinking any set of a
    tuple with no split stable intercalate preserves the failure, so only
    minimal sizes (five sets of ceil(beta n), the starred set of ell) need
    to be searched; lines outside every stable intercalate are
    interchangeable, which reduces the search to traces on relevant lines.
    """
    partial = square if isinstance(square, PartialLatinSquare) else PartialLatinSquare(
        square.n, square.entry_set()
    )
    n = partial.n
    b = math.ceil(beta * n)
    if n > 8 or b > 3:
        raise OrderTooLargeError("exact expander check guarded to n <= 8, beta*n <= 3")
    if ell > n or b > n:
        return True, None  # no permissible tuples at all
    stable = stable_intercalates(partial)
    if len(stable) > 12:
        raise InstanceTooLargeError("too many stable intercalates for the exact check")
    if not stable:
        witness = PermissibleTuple(
            *(frozenset(range(1, sz + 1)) for sz in (b, ell, b, b, b, b))
        )
        return False, witness
    full_mask = (1 << len(stable)) - 1
    axes = []
    for axis, star_size in (("rows", ell), ("cols", b), ("syms", b)):
        pairs = [getattr(a, axis) for a in stable]
        relevant = sorted({x for p in pairs for x in p})
        masks: dict = {}
        for t_plain in _traces(relevant, b, n):
            for t_star in _traces(relevant, star_size, n):
                mask = 0
                for i, p in enumerate(pairs):
                    if not _axis_split(p, t_plain, t_star):
                        mask |= 1 << i
                masks.setdefault(mask, (t_plain, t_star))
        kept: list = []  # maximal masks only, strongest first
        for m in sorted(masks, key=lambda v: -bin(v).count("1")):
            if not any(m | m2 == m2 for m2, _ in kept):
                kept.append((m, masks[m]))
        axes.append((kept, relevant, star_size))
    (rk, rrel, _), (ck, crel, _), (sk, srel, _) = axes
    for mr, trr in rk:
        for mc, trc in ck:
            mrc = mr | mc
            for ms, trs in sk:
                if mrc | ms == full_mask:
                    witness = PermissibleTuple(
                        _fill(trr[0], b, rrel, n),
                        _fill(trr[1], ell, rrel, n),
                        _fill(trc[0], b, crel, n),
                        _fill(trc[1], b, crel, n),
                        _fill(trs[0], b, srel, n),
                        _fill(trs[1], b, srel, n),
                    )
                    return False, witness
    return True, None


def _traces(relevant: list, size: int, n: int):
    """Subsets of the relevant lines extendable to a set of the given size
    using only interchangeable (irrelevant) lines as filler."""
    spare = n - len(relevant)
    for k in range(min(size, len(relevant)) + 1):
        if size - k > spare:
            continue
        yield from (frozenset(c) for c in itertools.combinations(relevant, k))


def _fill(trace: frozenset, size: int, relevant, n: int) -> frozenset:
    out = set(trace)
    for x in range(1, n + 1):
        if len(out) >= size:
            break
        if x not in out and x not in relevant:
            out.add(x)
    return frozenset(out)
