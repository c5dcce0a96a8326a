"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  Criterion 11 (the report component) lives in the report
package's own suite (report/tests).
"""

import math
import time
from collections import Counter
from fractions import Fraction

from latinlab.configs import basic_threat_embeddings, embedding_special_pair, threatened_pairs
from latinlab.core import (
    OrderedPartialLatinSquare,
    PartialLatinSquare,
    enumerate_all,
    exact_uniform_sample,
    f_of_n,
    line_parities,
    parity_counts,
    template_intersect,
    template_sample,
)
from latinlab.distributions import local_clt_density, mu_star_mass
from latinlab.fixtures import (
    basic_fixture,
    switch_example_left,
    switch_example_pair,
    switch_example_right,
    switch_example_switches,
)
from latinlab.intercalates import (
    SigmaKey,
    enumerate_intercalates,
    sigma_set,
    stable_intercalates,
    switch_intercalate,
    switch_many,
)
from latinlab.leftover import completions_count
from latinlab.rerandomize import (
    IncidenceMatrixF2,
    block_constant_vectors,
    exact_component_audit,
    f2_rank_kernel,
    incidence_matrix,
)
from latinlab.rng import make_rng, substream
from latinlab.samplers import MixingChain, trp_log_probability, trp_outcome_tree, trp_sample


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_01_janssen_zappa_exhaustive(n5_scan):
    start = time.time()
    violations4 = sum(
        1 for sq in enumerate_all(4) if parity_counts(sq).total_parity() != f_of_n(4)
    )
    violations5 = n5_scan["violations"]
    elapsed = time.time() - start + n5_scan["elapsed"]
    ok = (
        violations4 == 0
        and violations5 == 0
        and n5_scan["total"] == 161280
        and elapsed < 120
    )
    report(
        "criterion 1: Janssen-Zappa over all orders 4 and 5",
        ok,
        f"violations={violations4 + violations5} squares={576 + n5_scan['total']} time={elapsed:.1f}s",
    )


def test_criterion_02_enumeration_two_ways(n5_scan):
    by_enumeration = [sum(1 for _ in enumerate_all(n)) for n in (1, 2, 3, 4)]
    by_enumeration.append(n5_scan["total"])
    by_completion = [
        completions_count(PartialLatinSquare(n, frozenset())) for n in (1, 2, 3, 4, 5)
    ]
    expected = [1, 2, 12, 576, 161280]
    ok = by_enumeration == expected == by_completion
    report(
        "criterion 2: |L_n| two independent ways",
        ok,
        f"enumeration={by_enumeration} completion={by_completion}",
    )


def test_criterion_03_rerandomization_uniformity():
    start = time.time()
    rng = make_rng(2024)
    densities = [0.3, 0.5, 0.7, 0.85, 1.0]
    failures = 0
    nontrivial = 0
    for i in range(20):
        template = template_sample(4, densities[i % len(densities)], rng)
        audit = exact_component_audit(4, template)
        if not audit["passed"]:
            failures += 1
        if audit["component_sizes"] and audit["component_sizes"][0] > 1:
            nontrivial += 1
    elapsed = time.time() - start
    ok = failures == 0 and elapsed < 300
    report(
        "criterion 3: exact component audit, 20 random templates at n=4",
        ok,
        f"failures={failures} templates_with_nontrivial_components={nontrivial} time={elapsed:.1f}s",
    )


def test_criterion_04_canonicity_sweep():
    start = time.time()
    rng = make_rng(777)
    orders = [4, 5, 6, 7, 8]
    densities = [0.3, 0.5, 0.7, 0.9, 1.0]
    chains = {}
    instances = 10_000
    switches = 0
    violations = 0
    for i in range(instances):
        n = orders[i % len(orders)]
        if n <= 5:
            sq = exact_uniform_sample(n, rng)
        else:
            if n not in chains:
                chains[n] = MixingChain(n, make_rng(1000 + n), burn_in=n ** 3, thin=n * n)
            sq = chains[n].sample()
        template = template_sample(n, densities[(i // len(orders)) % len(densities)], rng)
        partial = template_intersect(template, sq)
        stable = stable_intercalates(partial)
        if not stable:
            continue
        before = frozenset(a.sigma() for a in stable)
        for a in stable:
            switches += 1
            if sigma_set(switch_intercalate(partial, a)) != before:
                violations += 1
    elapsed = time.time() - start
    ok = violations == 0 and instances == 10_000
    report(
        "criterion 4: sigma-set canonicity over 10^4 instances at n=4..8",
        ok,
        f"stable_switches={switches} violations={violations} time={elapsed:.1f}s",
    )


def test_criterion_05_trp_exactness():
    worst_norm = Fraction(0)
    worst_logp = 0.0
    worst_sigma = 0.0
    for m in range(1, 5):
        outcomes, bottom = trp_outcome_tree(2, m)
        worst_norm = max(worst_norm, abs(sum(outcomes.values()) + bottom - 1))
        for entries, prob in outcomes.items():
            logp = trp_log_probability(OrderedPartialLatinSquare(2, entries))
            worst_logp = max(worst_logp, abs(logp - math.log(float(prob))))
        runs = 100_000
        rng = substream(0, m)
        counts = Counter()
        for _ in range(runs):
            outcome = trp_sample(2, m, rng)
            counts[None if outcome.bottom else outcome.result.entries] += 1
        for key, prob in list(outcomes.items()) + [(None, bottom)]:
            p = float(prob)
            sigma = math.sqrt(p * (1 - p) / runs)
            if sigma:
                worst_sigma = max(worst_sigma, abs(counts[key] / runs - p) / sigma)
    ok = float(worst_norm) <= 1e-12 and worst_logp <= 1e-12 and worst_sigma <= 3
    report(
        "criterion 5: TRP tree exactness and simulation agreement (n=2, m<=4)",
        ok,
        f"norm_err={float(worst_norm):.2e} logp_err={worst_logp:.2e} worst_dev={worst_sigma:.2f}sigma",
    )


def test_criterion_06_parity_flip_law():
    start = time.time()
    rng = make_rng(31337)
    orders = [4, 5, 6, 7, 8, 9]
    chains = {}
    switches = 0
    exceptions = 0
    while switches < 10_000:
        n = orders[switches % len(orders)]
        if n <= 5:
            sq = exact_uniform_sample(n, rng)
        else:
            if n not in chains:
                chains[n] = MixingChain(n, make_rng(500 + n), burn_in=n * n * n, thin=25)
            sq = chains[n].sample()
        found = enumerate_intercalates(sq)
        if not found:
            continue
        a = found[rng.randrange(len(found))]
        switched = switch_intercalate(sq, a)
        before, after = line_parities(sq), line_parities(switched)
        rows = {r for r in range(1, n + 1) if before[0][r - 1] != after[0][r - 1]}
        cols = {c for c in range(1, n + 1) if before[1][c - 1] != after[1][c - 1]}
        syms = {s for s in range(1, n + 1) if before[2][s - 1] != after[2][s - 1]}
        if rows != set(a.rows) or cols != set(a.cols) or syms != set(a.syms):
            exceptions += 1
        switches += 1
    elapsed = time.time() - start
    ok = exceptions == 0 and switches == 10_000
    report(
        "criterion 6: parity-flip law over 10^4 intercalate switches (n<=9)",
        ok,
        f"switches={switches} exceptions={exceptions} time={elapsed:.1f}s",
    )


def test_criterion_07_figure_fixtures():
    left = switch_example_left()
    right = switch_example_right()
    pair = set(switch_example_pair())
    exact = switch_many(left, switch_example_switches()).entries == right.entries
    threatened_before = any(
        set(rec.pair) == pair for rec in threatened_pairs(left, {1})
    )
    basic_after = any(
        set(embedding_special_pair(emb, 2)) == pair
        for emb in basic_threat_embeddings(right, {1}, 2)
    )
    matrix = [
        [len(basic_threat_embeddings(basic_fixture(t), {1}, u)) for u in range(1, 5)]
        for t in range(1, 5)
    ]
    labels_ok = all(
        (matrix[t - 1][u - 1] > 0) == (t == u) for t in range(1, 5) for u in range(1, 5)
    )
    ok = exact and threatened_before and basic_after and labels_ok
    report(
        "criterion 7: figure fixtures reproduce bit-exactly",
        ok,
        f"switch={exact} threat_before={threatened_before} basic_after={basic_after} types={matrix}",
    )


def test_criterion_08_f2_kernel():
    rng = make_rng(4242)
    mismatches = 0
    for _ in range(100):
        n_rows = rng.randint(1, 20)
        n_cols = rng.randint(1, 24)
        bits = tuple(rng.getrandbits(n_cols) for _ in range(n_rows))
        matrix = IncidenceMatrixF2(
            tuple(("row", i) for i in range(n_rows)), tuple(range(n_cols)), bits, n_cols
        )
        basis = f2_rank_kernel(matrix)
        if basis.rank + basis.kernel_dim != n_rows:
            mismatches += 1
            continue
        cur = 0
        prev = 0
        zeros = 0
        for g in range(1 << n_rows):  # Gray-code brute force over row combos
            gray = g ^ (g >> 1)
            diff = gray ^ prev
            if diff:
                cur ^= bits[diff.bit_length() - 1]
            prev = gray
            if cur == 0:
                zeros += 1
        if zeros != 1 << basis.kernel_dim:
            mismatches += 1
        for vec in basis.basis:
            acc = 0
            for i in range(n_rows):
                if vec >> i & 1:
                    acc ^= bits[i]
            if acc != 0:
                mismatches += 1
    m = 6
    keys = [SigmaKey((i, i + 1), (1, 2), (1, 2)) for i in range(1, m)]
    keys.append(SigmaKey((1, 3), (1, 2), (1, 2)))
    keys += [SigmaKey((1, 2), (j, j + 1), (1, 2)) for j in range(1, m)]
    keys.append(SigmaKey((1, 2), (1, 3), (1, 2)))
    keys += [SigmaKey((1, 2), (1, 2), (k, k + 1)) for k in range(1, m)]
    keys.append(SigmaKey((1, 2), (1, 2), (1, 3)))
    lines = range(1, m + 1)
    planted = f2_rank_kernel(incidence_matrix(lines, lines, lines, keys))
    span = {0}
    for b in planted.basis:
        span |= {v ^ b for v in span}
    planted_ok = planted.rank == 3 * m - 3 and span == block_constant_vectors((m, m, m))
    ok = mismatches == 0 and planted_ok
    report(
        "criterion 8: F2 kernel vs brute force and planted instance",
        ok,
        f"mismatches={mismatches} planted_rank={planted.rank} (want {3 * m - 3})",
    )


def test_criterion_09_local_clt():
    n = 100
    exact = float(mu_star_mass(n, (50, 50, 50)))
    approx = local_clt_density((50, 50, 50), n, 2)
    rel = abs(approx - exact) / exact
    ok = rel <= 0.05
    report(
        "criterion 9: local-CLT density at the n=100 lattice center",
        ok,
        f"exact={exact:.6e} approx={approx:.6e} rel_err={rel:.4%}",
    )


# exact order-5 row-parity distribution, frozen from the enumeration oracle
N5_ROW_DISTRIBUTION = {0: 8640, 1: 72000, 4: 72000, 5: 8640}
N5_TV = Fraction(5, 8)


def test_criterion_10_n5_regression_fixture(n5_scan):
    distribution = n5_scan["nrow"]
    total = n5_scan["total"]
    tv = Fraction(0)
    for k in range(6):
        tv += abs(Fraction(distribution.get(k, 0), total) - Fraction(math.comb(5, k), 32))
    tv /= 2
    ok = distribution == N5_ROW_DISTRIBUTION and tv == N5_TV and tv > 0
    report(
        "criterion 10: exact n=5 N_row distribution and its TV fixture",
        ok,
        f"distribution={distribution} tv={tv}={float(tv)}",
    )
