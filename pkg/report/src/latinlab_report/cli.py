"""latinlab-report: render figures and a Markdown summary from latinlab
parity-stats CSVs and expander-audit JSON reports.

All inputs are validated and parsed before anything is written, so a schema
violation produces no partial outputs.
"""

from __future__ import annotations

import argparse
import os
import sys

from .render import (
    build_summary,
    render_audit_summary,
    render_parity_histogram,
    render_triple_heatmap,
    render_tv_curve,
    tv_agreement,
)
from .schema import SchemaError, load_audit, load_parity_stats


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="latinlab-report")
    parser.add_argument("--stats", action="append", default=[],
                        help="parity-stats CSV (repeatable)")
    parser.add_argument("--audit", action="append", default=[],
                        help="expander-audit JSON (repeatable)")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--format", choices=["svg", "png"], default="svg")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not args.stats and not args.audit:
            raise SchemaError("no inputs given (need --stats and/or --audit)")
        stats_list = [load_parity_stats(p) for p in args.stats]
        audits = [load_audit(p) for p in args.audit]
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(args.out_dir, exist_ok=True)
    figures = []
    mismatched = []
    for stats in stats_list:
        figures.append(render_parity_histogram(stats, args.out_dir, args.format))
        figures.append(render_triple_heatmap(stats, args.out_dir, args.format))
        _, _, ok = tv_agreement(stats)
        if not ok:
            mismatched.append(stats.path)
    if len({s.n for s in stats_list}) > 1:
        figures.append(render_tv_curve(stats_list, args.out_dir, args.format))
    if audits:
        figures.append(render_audit_summary(audits, args.out_dir, args.format))
    summary = build_summary(stats_list, audits, figures)
    summary_path = os.path.join(args.out_dir, "report.md")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write(summary)
    print(summary_path)
    if mismatched:
        print(
            "error: recomputed TV disagrees with the generator for: "
            + ", ".join(mismatched),
            file=sys.stderr,
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
