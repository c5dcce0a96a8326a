"""Reference parity distributions and comparison statistics.

Exact rational arithmetic is used through order 64; beyond that masses are
floats and large sums use compensated summation.  Triple pmfs are stored
sparsely over the admissible parity lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import ParityTriple, f_of_n
from .errors import InvariantBreachError, OrderTooLargeError, ValidationError

__all__ = [
    "Pmf",
    "NearBinomialSpec",
    "MixtureSpec",
    "binom_pmf",
    "binom_half_pmf",
    "mu_star_pmf",
    "mu_star_mass",
    "mu_star_total",
    "near_binomial_pmf",
    "two_near_binomial_pmf",
    "mixture_sample",
    "tv_distance",
    "local_clt_density",
    "entropy_h2",
    "rate_I",
    "parity_mod2_counts",
    "empirical_pmf",
]

EXACT_MAX_N = 64
TRIPLE_MATERIALIZE_MAX_N = 80


@dataclass(frozen=True)
class Pmf:
    """Sparse probability mass function over integers or integer triples."""

    masses: tuple  # ((key, mass), ...) sorted by key

    @classmethod
    def from_dict(cls, d: dict) -> "Pmf":
        return cls(tuple(sorted(d.items())))

    def as_dict(self) -> dict:
        return dict(self.masses)

    def mass(self, key):
        return self.as_dict().get(key, 0)

    def total(self):
        values = [m for _, m in self.masses]
        if values and isinstance(values[0], Fraction):
            return sum(values)
        return _kahan_sum(values)

    def to_json(self) -> dict:
        support = [list(k) if isinstance(k, tuple) else k for k, _ in self.masses]
        return {"support": support, "mass": [float(m) for _, m in self.masses]}

    @classmethod
    def from_json(cls, obj: dict) -> "Pmf":
        keys = [tuple(k) if isinstance(k, list) else k for k in obj["support"]]
        return cls(tuple(zip(keys, obj["mass"])))

    def csv_rows(self) -> list:
        out = []
        for k, m in self.masses:
            key = " ".join(map(str, k)) if isinstance(k, tuple) else str(k)
            out.append((key, float(m)))
        return out


def _kahan_sum(values: Iterable[float]) -> float:
    total = 0.0
    carry = 0.0
    for v in values:
        y = float(v) - carry
        t = total + y
        carry = (t - total) - y
        total = t
    return total


def binom_pmf(n: int, k: int, exact: bool | None = None):
    """P[Bin(n, 1/2) = k]."""
    if n < 0 or not 0 <= k <= n:
        return Fraction(0) if (exact or (exact is None and n <= EXACT_MAX_N)) else 0.0
    if exact is None:
        exact = n <= EXACT_MAX_N
    value = Fraction(math.comb(n, k), 1 << n)
    return value if exact else float(value)


def binom_half_pmf(n: int, exact: bool | None = None) -> Pmf:
    return Pmf.from_dict({k: binom_pmf(n, k, exact) for k in range(n + 1)})


def mu_star_mass(n: int, triple: tuple, exact: bool | None = None):
    """Mass of the triple-binomial law conditioned on total parity f(n).

    The parity event has probability exactly 1/2, so admissible triples get
    twice the product mass.
    """
    x1, x2, x3 = triple
    if (x1 + x2 + x3) % 2 != f_of_n(n):
        return Fraction(0) if (exact or (exact is None and n <= EXACT_MAX_N)) else 0.0
    value = 2 * binom_pmf(n, x1, True) * binom_pmf(n, x2, True) * binom_pmf(n, x3, True)
    if exact is None:
        exact = n <= EXACT_MAX_N
    return value if exact else float(value)


def mu_star_pmf(n: int, exact: bool | None = None) -> Pmf:
    """Materialized mu* over the admissible parity lattice."""
    if n > TRIPLE_MATERIALIZE_MAX_N:
        raise OrderTooLargeError(
            f"mu* materialization guarded to n <= {TRIPLE_MATERIALIZE_MAX_N}; "
            "use mu_star_mass for point evaluations"
        )
    if exact is None:
        exact = n <= EXACT_MAX_N
    parity = f_of_n(n)
    uni = [binom_pmf(n, k, exact) for k in range(n + 1)]
    masses = {}
    for x1 in range(n + 1):
        for x2 in range(n + 1):
            base = uni[x1] * uni[x2]
            for x3 in range((parity + x1 + x2) % 2, n + 1, 2):
                masses[(x1, x2, x3)] = 2 * base * uni[x3]
    return Pmf.from_dict(masses)


def mu_star_total(n: int) -> float:
    """Float normalization check over parity classes (no materialization):
    sums the per-coordinate parity-class masses and combines the admissible
    sign patterns."""
    even = _kahan_sum(binom_pmf(n, k, False) for k in range(0, n + 1, 2))
    odd = _kahan_sum(binom_pmf(n, k, False) for k in range(1, n + 1, 2))
    target = f_of_n(n)
    total = 0.0
    for b1 in (0, 1):
        for b2 in (0, 1):
            b3 = (target + b1 + b2) % 2
            total += (
                (even if b1 == 0 else odd)
                * (even if b2 == 0 else odd)
                * (even if b3 == 0 else odd)
            )
    return 2 * total


@dataclass(frozen=True)
class NearBinomialSpec:
    """Shifted triple binomial: coordinate i is offsets[i] + Bin(sizes[i], 1/2),
    with sizes in [n-d, n] and offsets at most d.  ``parity_condition`` adds
    a per-coordinate parity constraint (the 2-near-binomial case)."""

    n: int
    d: int
    offsets: tuple
    sizes: tuple
    parity_condition: tuple | None = None

    def __post_init__(self):
        if len(self.offsets) != 3 or len(self.sizes) != 3:
            raise ValidationError("shape", "three offsets and three sizes required")
        for c in self.offsets:
            if not 0 <= c <= self.d:
                raise ValidationError("out-of-range", f"offset {c} exceeds defect {self.d}")
        for m in self.sizes:
            if not self.n - self.d <= m <= self.n:
                raise ValidationError("out-of-range", f"size {m} outside [n-d, n]")
        if self.parity_condition is not None and len(self.parity_condition) != 3:
            raise ValidationError("shape", "parity condition needs three bits")


def _coordinate_pmf(size: int, offset: int, parity_bit, exact: bool) -> dict:
    out = {}
    if parity_bit is None:
        for k in range(size + 1):
            out[offset + k] = binom_pmf(size, k, exact)
        return out
    want = (parity_bit - offset) % 2
    if size == 0:
        if want != 0:
            raise ValidationError("out-of-range", "empty conditioning support")
        out[offset] = Fraction(1) if exact else 1.0
        return out
    two = Fraction(2) if exact else 2.0
    for k in range(want, size + 1, 2):
        out[offset + k] = two * binom_pmf(size, k, exact)
    return out


def _product_pmf(coords: list, exact: bool) -> Pmf:
    masses = {}
    c1, c2, c3 = coords
    for x1, m1 in c1.items():
        for x2, m2 in c2.items():
            base = m1 * m2
            for x3, m3 in c3.items():
                masses[(x1, x2, x3)] = base * m3
    return Pmf.from_dict(masses)


def near_binomial_pmf(spec: NearBinomialSpec, exact: bool | None = None) -> Pmf:
    """Exact pmf of the shifted triple binomial (no parity conditioning)."""
    if max(spec.sizes) > TRIPLE_MATERIALIZE_MAX_N:
        raise OrderTooLargeError("triple materialization guard")
    if exact is None:
        exact = spec.n <= EXACT_MAX_N
    coords = [
        _coordinate_pmf(spec.sizes[i], spec.offsets[i], None, exact) for i in range(3)
    ]
    return _product_pmf(coords, exact)


def two_near_binomial_pmf(spec: NearBinomialSpec, exact: bool | None = None) -> Pmf:
    """As near_binomial_pmf but conditioned per coordinate on the spec's
    parity bits (each parity event has probability exactly 1/2)."""
    if spec.parity_condition is None:
        raise ValidationError("shape", "spec carries no parity condition")
    if max(spec.sizes) > TRIPLE_MATERIALIZE_MAX_N:
        raise OrderTooLargeError("triple materialization guard")
    if exact is None:
        exact = spec.n <= EXACT_MAX_N
    coords = [
        _coordinate_pmf(spec.sizes[i], spec.offsets[i], spec.parity_condition[i], exact)
        for i in range(3)
    ]
    return _product_pmf(coords, exact)


@dataclass(frozen=True)
class MixtureSpec:
    """Weighted 2-near-binomial components plus an exceptional event."""

    components: tuple  # ((weight, NearBinomialSpec), ...)
    exceptional_mass: float = 0.0
    exceptional_pmf: Pmf | None = None

    def __post_init__(self):
        total = sum(w for w, _ in self.components) + self.exceptional_mass
        if abs(float(total) - 1.0) > 1e-12:
            raise ValidationError("out-of-range", f"mixture weights sum to {total}")


def _sample_coordinate(size: int, offset: int, parity_bit, rng) -> int:
    while True:
        k = sum(rng.getrandbits(1) for _ in range(size))
        if parity_bit is None or (offset + k) % 2 == parity_bit:
            return offset + k


def mixture_sample(mix: MixtureSpec, rng) -> tuple:
    u = rng.random()
    acc = 0.0
    for weight, spec in mix.components:
        acc += float(weight)
        if u < acc:
            bits = spec.parity_condition or (None, None, None)
            return tuple(
                _sample_coordinate(spec.sizes[i], spec.offsets[i], bits[i], rng)
                for i in range(3)
            )
    if mix.exceptional_pmf is None:
        raise ValidationError("shape", "exceptional event drawn but no pmf supplied")
    r = rng.random() * float(mix.exceptional_pmf.total())
    acc = 0.0
    for key, mass in mix.exceptional_pmf.masses:
        acc += float(mass)
        if r < acc:
            return key
    return mix.exceptional_pmf.masses[-1][0]


def tv_distance(p: Pmf, q: Pmf) -> float:
    """(1/2) sum |p - q| over the union of supports."""
    pd, qd = p.as_dict(), q.as_dict()
    keys = set(pd) | set(qd)
    diffs = [abs(float(pd.get(k, 0)) - float(qd.get(k, 0))) for k in sorted(keys)]
    return _kahan_sum(diffs) / 2


def entropy_h2(alpha: float) -> float:
    """Base-2 binary entropy with the 0 log 0 = 0 convention."""
    if not 0 <= alpha <= 1:
        raise ValidationError("out-of-range", f"entropy argument {alpha}")
    if alpha in (0, 1):
        return 0.0
    return -alpha * math.log2(alpha) - (1 - alpha) * math.log2(1 - alpha)


def rate_I(x1: float, x2: float, x3: float) -> float:
    """Large-deviation rate 3 - H2(x1) - H2(x2) - H2(x3)."""
    return 3 - entropy_h2(x1) - entropy_h2(x2) - entropy_h2(x3)


def local_clt_density(x: tuple, n: int, factor: int) -> float:
    """Gaussian local-limit density for the parity triple around n/2.

    factor 2 corresponds to conditioning on the total parity (probability
    1/2); factor 8 to conditioning on all three parities (probability 1/8).
    """
    if factor not in (2, 8):
        raise ValidationError("out-of-range", "factor must be 2 or 8")
    var = n / 4
    quad = sum((xi - n / 2) ** 2 for xi in x) / (2 * var)
    return factor / (2 * math.pi * var) ** 1.5 * math.exp(-quad)


def empirical_pmf(values: Iterable) -> Pmf:
    from collections import Counter

    counts = Counter(values)
    total = sum(counts.values())
    return Pmf.from_dict({k: Fraction(v, total) for k, v in counts.items()})


def parity_mod2_counts(samples: list, n: int) -> tuple:
    """Counts over the 8 parity cells plus the uniformity chi-square over
    the 4 admissible ones.  An occupied inadmissible cell is an invariant
    breach, not a statistic."""
    if not samples:
        raise ValidationError("shape", "empty sample")
    target = f_of_n(n)
    table = {
        (b1, b2, b3): 0 for b1 in (0, 1) for b2 in (0, 1) for b3 in (0, 1)
    }
    for pt in samples:
        cell = pt.mod2_cell() if isinstance(pt, ParityTriple) else tuple(v % 2 for v in pt)
        if sum(cell) % 2 != target:
            raise InvariantBreachError(
                f"sample parity cell {cell} violates the mod-2 identity for n={n}"
            )
        table[cell] += 1
    total = sum(table.values())
    expect = total / 4
    chi2 = sum(
        (count - expect) ** 2 / expect
        for cell, count in table.items()
        if sum(cell) % 2 == target
    )
    return table, chi2
