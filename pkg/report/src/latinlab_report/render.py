"""Matplotlib figure rendering and the Markdown summary."""

from __future__ import annotations

import os
from collections import Counter

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .schema import ParityStats
from .stats import (
    binom_mass,
    joint_row_col_reference,
    mod2_cell_counts,
    mu_star_mass,
    recompute_tv_row,
    recompute_tv_triple,
    total_parity_bit,
)

TV_AGREEMENT_TOL = 1e-9


def _stem(stats: ParityStats) -> str:
    return os.path.splitext(os.path.basename(stats.path))[0]


def render_parity_histogram(stats: ParityStats, out_dir: str, fmt: str) -> str:
    n = stats.n
    counts = Counter(r[1] for r in stats.rows)
    total = stats.count
    xs = list(range(n + 1))
    empirical = [counts.get(k, 0) / total for k in xs]
    reference = [binom_mass(n, k) for k in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(xs, empirical, width=0.8, color="#5b8dbf", label=f"samples ({total})")
    ax.plot(xs, reference, "ko-", markersize=4, label="Bin(n, 1/2)")
    ax.set_xlabel("odd row permutations")
    ax.set_ylabel("probability")
    ax.set_title(f"Row-parity distribution, n = {n}")
    ax.legend()
    path = os.path.join(out_dir, f"{_stem(stats)}_parity_hist.{fmt}")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_triple_heatmap(stats: ParityStats, out_dir: str, fmt: str) -> str:
    n = stats.n
    total = stats.count
    joint = [[0.0] * (n + 1) for _ in range(n + 1)]
    for _, n_row, n_col, _ in stats.rows:
        joint[n_row][n_col] += 1 / total
    reference = joint_row_col_reference(n)
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    vmax = max(max(max(row) for row in joint), max(max(row) for row in reference))
    for ax, data, title in (
        (axes[0], joint, "empirical (rows x cols)"),
        (axes[1], reference, "independent-binomial reference"),
    ):
        im = ax.imshow(data, origin="lower", cmap="viridis", vmin=0, vmax=vmax)
        ax.set_title(title)
        ax.set_xlabel("odd column permutations")
        ax.set_ylabel("odd row permutations")
    fig.colorbar(im, ax=axes, shrink=0.85)
    path = os.path.join(out_dir, f"{_stem(stats)}_triple_heatmap.{fmt}")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_tv_curve(stats_list: list, out_dir: str, fmt: str) -> str:
    pairs = sorted((s.n, s.tv_row_binomial) for s in stats_list)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([p[0] for p in pairs], [p[1] for p in pairs], "o-")
    ax.set_xlabel("order n")
    ax.set_ylabel("TV(N_row, Bin(n,1/2))")
    ax.set_title("Total variation against the coin-flip model")
    ax.set_ylim(bottom=0)
    path = os.path.join(out_dir, f"tv_vs_n.{fmt}")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def render_audit_summary(audits: list, out_dir: str, fmt: str) -> str:
    labels = [os.path.splitext(os.path.basename(a.path))[0] for a in audits]
    fractions = [a.stable_found_fraction for a in audits]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(audits)), fractions, color="#74a57f")
    ax.set_xticks(range(len(audits)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction of tuples with a split stable intercalate")
    ax.set_title("Expander audit summaries")
    path = os.path.join(out_dir, f"audit_summary.{fmt}")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def build_summary(stats_list: list, audits: list, figures: list) -> str:
    lines = ["# latinlab report", ""]
    for stats in stats_list:
        n = stats.n
        tv_row = recompute_tv_row(stats.rows, n)
        tv_triple = recompute_tv_triple(stats.rows, n)
        row_ok = abs(tv_row - stats.tv_row_binomial) <= TV_AGREEMENT_TOL
        triple_ok = abs(tv_triple - stats.tv_triple_mu_star) <= TV_AGREEMENT_TOL
        lines += [
            f"## {os.path.basename(stats.path)} (n = {n}, {stats.count} samples)",
            "",
            "| quantity | generator value | recomputed | agreement |",
            "|---|---|---|---|",
            f"| TV(N_row, Bin) | {stats.tv_row_binomial:.12g} | {tv_row:.12g} | "
            f"{'ok' if row_ok else 'MISMATCH'} |",
            f"| TV(triple, mu*) | {stats.tv_triple_mu_star:.12g} | {tv_triple:.12g} | "
            f"{'ok' if triple_ok else 'MISMATCH'} |",
            "",
        ]
        reference_total = sum(
            mu_star_mass(n, (a, b, c))
            for a in range(n + 1)
            for b in range(n + 1)
            for c in range(n + 1)
        )
        lines += [
            f"Reference triple masses sum to {reference_total:.12f} "
            f"(total-parity bit {total_parity_bit(n)}).",
            "",
            "Parity cells mod 2 (row, col, sym):",
            "",
            "| cell | count |",
            "|---|---|",
        ]
        table = mod2_cell_counts(stats.rows)
        for cell in sorted(table):
            lines.append(f"| {cell} | {table[cell]} |")
        lines.append("")
    if audits:
        lines += ["## Expander audits", ""]
        lines += [
            "| file | n | ell | beta | tuples | failures | found fraction |",
            "|---|---|---|---|---|---|---|",
        ]
        for a in audits:
            lines.append(
                f"| {os.path.basename(a.path)} | {a.n} | {a.ell} | {a.beta} | "
                f"{a.tuples_tested} | {a.failures} | {a.stable_found_fraction:.4f} |"
            )
        lines.append("")
    lines += ["## Figures", ""]
    lines += [f"- {os.path.basename(f)}" for f in figures]
    lines.append("")
    return "\n".join(lines)


def tv_agreement(stats: ParityStats) -> tuple:
    """(recomputed_row, recomputed_triple, both_within_tolerance)."""
    tv_row = recompute_tv_row(stats.rows, stats.n)
    tv_triple = recompute_tv_triple(stats.rows, stats.n)
    ok = (
        abs(tv_row - stats.tv_row_binomial) <= TV_AGREEMENT_TOL
        and abs(tv_triple - stats.tv_triple_mu_star) <= TV_AGREEMENT_TOL
    )
    return tv_row, tv_triple, ok
