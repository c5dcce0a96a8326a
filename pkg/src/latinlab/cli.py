"""Command-line surface: sample generation, parity statistics, verification
suites, expander audits, distribution exports and counting utilities.

Every run is reproducible from (arguments, seed): replica i draws from the
substream (seed, i).  Exit codes: 0 success, 1 verification failure or
invariant breach, 2 invalid input.  LATINLAB_THREADS caps generation
parallelism (default 1); outputs are written in replica order either way.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import core, distributions as dist, samplers
from .configs import expander_audit, threatened_pairs, covered_entry_count
from .errors import InvariantBreachError, LatinError
from .intercalates import (
    count_disjoint_intercalates_max,
    enumerate_intercalates,
    stable_intercalates,
    switch_many,
)
from .fixtures import (
    basic_fixture,
    switch_example_left,
    switch_example_pair,
    switch_example_right,
    switch_example_switches,
)
from .configs import basic_threat_embeddings, embedding_special_pair
from .rerandomize import (
    IncidenceMatrixF2,
    block_constant_vectors,
    exact_component_audit,
    f2_rank_kernel,
    incidence_matrix,
    kernel_report_json,
)
from .intercalates import SigmaKey, sigma_set, switch_intercalate
from .rng import make_rng, substream


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LATINLAB_THREADS", "1")))
    except ValueError:
        return 1


def _open_out(path: str):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def _emit(lines, path: str) -> None:
    out = _open_out(path)
    try:
        for line in lines:
            out.write(line + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def _gen_one(model: str, n: int, m: int, p: float, seed: int, index: int) -> dict:
    rng = substream(seed, index)
    if model == "exact":
        sq = core.exact_uniform_sample(n, rng)
        return {"kind": "square", "seed": index, **core.square_to_json(sq)}
    if model == "chain":
        chain = samplers.MixingChain(n, rng)
        return {"kind": "square", "seed": index, **core.square_to_json(chain.current())}
    if model == "trp":
        outcome = samplers.trp_sample(n, m, rng)
        return {"kind": "trp", "seed": index, **outcome.to_json()}
    if model == "binomial":
        sample = samplers.binomial_hypergraph(n, p, rng)
        return {
            "kind": "hypergraph",
            "seed": index,
            "n": n,
            "hyperedges": [list(e) for e in sorted(sample.hyperedges)],
        }
    raise LatinError(f"unknown model {model}")


def cmd_gen(args) -> int:
    n = args.n
    if args.model == "trp" and args.m is None:
        raise LatinError("--m is required for the trp model")
    if args.model == "binomial" and args.p is None:
        raise LatinError("--p is required for the binomial model")
    header = {
        "kind": "header",
        "model": args.model,
        "n": n,
        "m": args.m,
        "p": args.p,
        "count": args.count,
        "seed": args.seed,
    }
    lines = [json.dumps(header, sort_keys=True)]
    if args.model == "all":
        for i, sq in enumerate(core.enumerate_all(n)):
            lines.append(
                json.dumps(
                    {"kind": "square", "seed": i, **core.square_to_json(sq)},
                    sort_keys=True,
                )
            )
    else:
        indices = range(args.count)
        workers = _threads()
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(
                    pool.map(
                        lambda i: _gen_one(args.model, n, args.m, args.p, args.seed, i),
                        indices,
                    )
                )
        else:
            records = [
                _gen_one(args.model, n, args.m, args.p, args.seed, i) for i in indices
            ]
        lines.extend(json.dumps(r, sort_keys=True) for r in records)
    _emit(lines, args.out)
    return 0


# ---------------------------------------------------------------------------
# parity-stats
# ---------------------------------------------------------------------------

def _tv_triple_vs_mu_star(triples: list, n: int) -> float:
    emp = dist.empirical_pmf(triples)
    if n <= dist.TRIPLE_MATERIALIZE_MAX_N:
        return dist.tv_distance(emp, dist.mu_star_pmf(n))
    # half the L1 difference on the empirical support plus the reference
    # mass left outside it
    inside = 0.0
    l1 = 0.0
    for key, mass in emp.masses:
        mu = dist.mu_star_mass(n, key, exact=False)
        inside += mu
        l1 += abs(float(mass) - mu)
    return (l1 + (1.0 - inside)) / 2


def cmd_parity_stats(args) -> int:
    rows = []
    n_seen = None
    with open(args.infile, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            kind = record.get("kind")
            if kind == "header":
                continue
            if kind != "square" or "grid" not in record:
                raise LatinError("parity-stats needs full squares (model exact/chain/all)")
            sq = core.square_from_json(record)
            if n_seen is None:
                n_seen = sq.n
            elif sq.n != n_seen:
                raise LatinError("mixed orders in sample file")
            pt = core.parity_counts(sq)
            if pt.total_parity() != core.f_of_n(sq.n):
                raise InvariantBreachError(
                    f"sample seed={record.get('seed')} violates the parity identity"
                )
            rows.append((record.get("seed", len(rows)), sq.n, pt.n_row, pt.n_col, pt.n_sym))
    if not rows:
        raise LatinError("no squares in input")
    n = n_seen
    tv_row = dist.tv_distance(
        dist.empirical_pmf([r[2] for r in rows]), dist.binom_half_pmf(n)
    )
    tv_triple = _tv_triple_vs_mu_star([(r[2], r[3], r[4]) for r in rows], n)
    out = _open_out(args.out)
    try:
        writer = csv.writer(out)
        writer.writerow(["seed", "n", "n_row", "n_col", "n_sym"])
        writer.writerows(rows)
        writer.writerow(["tv", n, f"{tv_row:.12g}", f"{tv_triple:.12g}", ""])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------

def _suite_jz(args) -> dict:
    n = args.n or 4
    checked = 0
    violations = 0
    for sq in core.enumerate_all(n):
        pt = core.parity_counts(sq)
        if pt.total_parity() != core.f_of_n(n):
            violations += 1
        checked += 1
    return {"n": n, "checked": checked, "violations": violations, "passed": violations == 0}


def _suite_canonicity(args) -> dict:
    rng = make_rng(args.seed)
    orders = [4, 5, 6, 7, 8]
    densities = [0.3, 0.5, 0.7, 0.9, 1.0]
    instances = args.instances or 400
    chains = {}
    switches = 0
    violations = 0
    for i in range(instances):
        n = orders[i % len(orders)]
        if n <= core.ENUMERATION_MAX_N:
            sq = core.exact_uniform_sample(n, rng)
        else:
            if n not in chains:
                chains[n] = samplers.MixingChain(n, make_rng(args.seed * 31 + n), thin=3 * n * n)
            sq = chains[n].sample()
        template = core.template_sample(n, densities[(i // len(orders)) % len(densities)], rng)
        partial = core.template_intersect(template, sq)
        for a in stable_intercalates(partial):
            switches += 1
            if sigma_set(partial) != sigma_set(switch_intercalate(partial, a)):
                violations += 1
    return {
        "instances": instances,
        "stable_switches": switches,
        "violations": violations,
        "passed": violations == 0,
    }


def _suite_uniformity(args) -> dict:
    n = args.n or 4
    rng = make_rng(args.seed)
    templates = args.templates or 20
    densities = [0.3, 0.5, 0.7, 0.85, 1.0]
    reports = []
    for i in range(templates):
        template = core.template_sample(n, densities[i % len(densities)], rng)
        reports.append(exact_component_audit(n, template))
    failures = [r for r in reports if not r["passed"]]
    return {
        "n": n,
        "templates": templates,
        "nontrivial_components": sum(
            1 for r in reports if r["component_sizes"] and r["component_sizes"][0] > 1
        ),
        "failures": len(failures),
        "passed": not failures,
    }


def _suite_kernel(args) -> dict:
    rng = make_rng(args.seed)
    matrices = args.matrices or 100
    mismatches = 0
    for _ in range(matrices):
        n_rows = rng.randint(1, args.max_rows or 20)
        n_cols = rng.randint(1, 20)
        bits = tuple(rng.getrandbits(n_cols) for _ in range(n_rows))
        matrix = IncidenceMatrixF2(
            tuple(("row", i) for i in range(n_rows)), tuple(range(n_cols)), bits, n_cols
        )
        basis = f2_rank_kernel(matrix)
        if basis.rank + basis.kernel_dim != n_rows:
            mismatches += 1
            continue
        # brute force: Gray-code walk over all row combinations
        cur = 0
        prev = 0
        zeros = 0
        for g in range(1 << n_rows):
            gray = g ^ (g >> 1)
            diff = gray ^ prev
            if diff:
                cur ^= bits[diff.bit_length() - 1]
            prev = gray
            if cur == 0:
                zeros += 1
        if zeros != 1 << basis.kernel_dim:
            mismatches += 1
    # planted instance: rank |R|+|C|+|S|-3 and the 8 block-constant kernel
    m = 5
    keys = [SigmaKey((i, i + 1), (1, 2), (1, 2)) for i in range(1, m)]
    keys.append(SigmaKey((1, 3), (1, 2), (1, 2)))
    keys += [SigmaKey((1, 2), (j, j + 1), (1, 2)) for j in range(1, m)]
    keys.append(SigmaKey((1, 2), (1, 3), (1, 2)))
    keys += [SigmaKey((1, 2), (1, 2), (k, k + 1)) for k in range(1, m)]
    keys.append(SigmaKey((1, 2), (1, 2), (1, 3)))
    lines = range(1, m + 1)
    planted_matrix = incidence_matrix(lines, lines, lines, keys)
    planted = f2_rank_kernel(planted_matrix)
    span = {0}
    for b in planted.basis:
        span |= {v ^ b for v in span}
    planted_ok = planted.rank == 3 * m - 3 and span == block_constant_vectors((m, m, m))
    return {
        "matrices": matrices,
        "mismatches": mismatches,
        "planted_ok": planted_ok,
        "planted_kernel": kernel_report_json(planted_matrix, planted),
        "passed": mismatches == 0 and planted_ok,
    }


def _suite_trp_prob(args) -> dict:
    n = args.n or 2
    m_max = args.m or 4
    worst_norm = 0.0
    worst_logp = 0.0
    for m in range(1, m_max + 1):
        outcomes, bottom = samplers.trp_outcome_tree(n, m)
        norm_err = abs(float(sum(outcomes.values()) + bottom) - 1.0)
        worst_norm = max(worst_norm, norm_err)
        for entries, prob in outcomes.items():
            logp = samplers.trp_log_probability(
                core.OrderedPartialLatinSquare(n, entries)
            )
            worst_logp = max(worst_logp, abs(logp - math.log(float(prob))))
    passed = worst_norm <= 1e-12 and worst_logp <= 1e-12
    return {
        "n": n,
        "m_max": m_max,
        "normalization_error": worst_norm,
        "log_probability_error": worst_logp,
        "passed": passed,
    }


def _suite_figures(args) -> dict:
    left = switch_example_left()
    right = switch_example_right()
    pair = switch_example_pair()
    switched = switch_many(left, switch_example_switches())
    exact = switched.entries == right.entries
    threat_before = any(
        set(rec.pair) == set(pair) for rec in threatened_pairs(left, {1})
    )
    basic_after = any(
        set(embedding_special_pair(emb, 2)) == set(pair)
        for emb in basic_threat_embeddings(right, {1}, 2)
    )
    type_matrix = [
        [len(basic_threat_embeddings(basic_fixture(t), {1}, u)) for u in range(1, 5)]
        for t in range(1, 5)
    ]
    labels_ok = all(
        (type_matrix[t - 1][u - 1] > 0) == (t == u) for t in range(1, 5) for u in range(1, 5)
    )
    passed = exact and threat_before and basic_after and labels_ok
    return {
        "switch_maps_left_to_right": exact,
        "pair_threatened_before": threat_before,
        "pair_basic_after": basic_after,
        "type_detection_matrix": type_matrix,
        "passed": passed,
    }


_SUITES = {
    "jz": _suite_jz,
    "canonicity": _suite_canonicity,
    "uniformity": _suite_uniformity,
    "kernel": _suite_kernel,
    "trp-prob": _suite_trp_prob,
    "figures": _suite_figures,
}


def cmd_verify(args) -> int:
    report = _SUITES[args.suite](args)
    report["suite"] = args.suite
    _emit([json.dumps(report, sort_keys=True)], args.out)
    return 0 if report["passed"] else 1


# ---------------------------------------------------------------------------
# audit-expander / dist / count
# ---------------------------------------------------------------------------

def _default_eps(n: int) -> float:
    # eta / log n with eta = 1 / log log n; meaningless asymptotics at fixed
    # n, so the resolved number is always echoed in the report header.
    if n < 3:
        return 0.5
    return min(1.0, 1.0 / (math.log(n) * max(math.log(math.log(n)), 0.1)))


def _default_ell(n: int) -> int:
    return max(1, min(n, round(math.log(n) ** 11)))


def cmd_audit_expander(args) -> int:
    n = args.n
    eps = args.eps if args.eps is not None else _default_eps(n)
    ell = args.ell if args.ell is not None else _default_ell(n)
    beta = args.beta if args.beta is not None else 0.1
    rng = make_rng(args.seed)
    if n <= core.ENUMERATION_MAX_N:
        sq = core.exact_uniform_sample(n, rng)
    else:
        sq = samplers.MixingChain(n, rng).current()
    template = core.template_sample(n, eps, rng)
    partial = core.template_intersect(template, sq)
    report = expander_audit(partial, ell, beta, args.tuples, rng)
    report["resolved"] = {
        "n": n,
        "eps": eps,
        "ell": ell,
        "beta": beta,
        "template_size": len(template.pairs),
        "entries": len(partial.entries),
        "seed": args.seed,
        "tuples": args.tuples,
    }
    _emit([json.dumps(report, sort_keys=True)], args.out)
    return 0


def cmd_dist(args) -> int:
    if args.dist_cmd == "tv":
        with open(args.a, "r", encoding="utf-8") as fh:
            p = dist.Pmf.from_json(json.load(fh))
        with open(args.b, "r", encoding="utf-8") as fh:
            q = dist.Pmf.from_json(json.load(fh))
        _emit([json.dumps({"tv": dist.tv_distance(p, q)})], args.out)
        return 0
    if args.dist_cmd == "binom":
        pmf = dist.binom_half_pmf(args.n)
    else:
        pmf = dist.mu_star_pmf(args.n)
    base = args.out
    if base in (None, "-"):
        _emit([json.dumps(pmf.to_json())], "-")
        return 0
    with open(base + ".json", "w", encoding="utf-8") as fh:
        json.dump(pmf.to_json(), fh)
    with open(base + ".csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "mass"])
        writer.writerows(pmf.csv_rows())
    return 0


def _load_square_or_partial(path: str):
    """First square/partial object of a JSON or JSON-lines file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read().strip()
    try:
        first = json.loads(text)
    except json.JSONDecodeError:
        first = None
    if first is None or first.get("kind") == "header":
        for line in text.splitlines():
            record = json.loads(line)
            if record.get("kind") != "header":
                first = record
                break
        else:
            raise LatinError("no square or partial square in input")
    if "grid" in first:
        return core.square_from_json(first)
    return core.partial_from_json(first)


def cmd_count(args) -> int:
    target = _load_square_or_partial(args.infile)
    if args.what == "intercalates":
        result = {"count": len(enumerate_intercalates(target))}
    elif args.what == "stable":
        result = {"count": len(stable_intercalates(target))}
    elif args.what == "disjoint-max":
        out = count_disjoint_intercalates_max(target)
        result = {"count": out.size, "exact": out.exact}
    elif args.what == "threatened-pairs":
        rstar = _parse_rows(args.rstar)
        records = threatened_pairs(target, rstar)
        result = {
            "records": len(records),
            "distinct_pairs": len({frozenset(r.pair) for r in records}),
        }
    else:  # bad-entries
        rstar = _parse_rows(args.rstar)
        result = {"count": covered_entry_count(target, rstar)}
    _emit([json.dumps(result, sort_keys=True)], args.out)
    return 0


def _parse_rows(spec: str) -> frozenset:
    if not spec:
        raise LatinError("--rstar is required for this counter")
    return frozenset(int(x) for x in spec.split(","))


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latinlab")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample squares / processes to JSON lines")
    p.add_argument("--model", required=True, choices=["exact", "chain", "trp", "binomial", "all"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("parity-stats", help="per-sample parity counts to CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_parity_stats)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", required=True, choices=sorted(_SUITES))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--templates", type=int, default=None)
    p.add_argument("--matrices", type=int, default=None)
    p.add_argument("--max-rows", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("audit-expander", help="sampled intercalate-expander audit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, default=None, help="template density")
    p.add_argument("--ell", type=int, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--tuples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_audit_expander)

    p = sub.add_parser("dist", help="reference pmfs and total variation")
    dsub = p.add_subparsers(dest="dist_cmd", required=True)
    d = dsub.add_parser("binom")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_dist)
    d = dsub.add_parser("mustar")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_dist)
    d = dsub.add_parser("tv")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--out", default="-")
    d.set_defaults(func=cmd_dist)

    p = sub.add_parser("count", help="counting surfaces")
    p.add_argument(
        "what",
        choices=["intercalates", "stable", "disjoint-max", "threatened-pairs", "bad-entries"],
    )
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--rstar", default="")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_count)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantBreachError as exc:
        print(f"invariant breach: {exc}", file=sys.stderr)
        return 1
    except (LatinError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
