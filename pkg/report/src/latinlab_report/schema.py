"""Parsers for the latinlab file formats consumed by the report tool.

Only the documented CSV/JSON schemas are read here; the generator package is
never imported.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass


class SchemaError(ValueError):
    """Input file does not conform to the documented schema."""


@dataclass(frozen=True)
class ParityStats:
    """Contents of a parity-stats CSV: sample rows plus the TV footer."""

    path: str
    n: int
    rows: tuple  # (seed, n_row, n_col, n_sym)
    tv_row_binomial: float
    tv_triple_mu_star: float

    @property
    def count(self) -> int:
        return len(self.rows)


def load_parity_stats(path: str) -> ParityStats:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file")
        if header != ["seed", "n", "n_row", "n_col", "n_sym"]:
            raise SchemaError(f"{path}: unexpected header {header}")
        rows = []
        footer = None
        for line in reader:
            if not line:
                continue
            if line[0] == "tv":
                footer = line
                continue
            if footer is not None:
                raise SchemaError(f"{path}: sample row after the tv footer")
            try:
                seed, n, n_row, n_col, n_sym = (int(x) for x in line[:5])
            except ValueError as exc:
                raise SchemaError(f"{path}: bad sample row {line}") from exc
            rows.append((seed, n, n_row, n_col, n_sym))
    if not rows:
        raise SchemaError(f"{path}: no sample rows")
    if footer is None or len(footer) < 4:
        raise SchemaError(f"{path}: missing tv footer")
    orders = {r[1] for r in rows}
    if len(orders) != 1:
        raise SchemaError(f"{path}: mixed orders {sorted(orders)}")
    n = orders.pop()
    for _, _, n_row, n_col, n_sym in rows:
        if not all(0 <= v <= n for v in (n_row, n_col, n_sym)):
            raise SchemaError(f"{path}: parity count out of range")
    try:
        tv_row = float(footer[2])
        tv_triple = float(footer[3])
    except ValueError as exc:
        raise SchemaError(f"{path}: bad tv footer {footer}") from exc
    return ParityStats(
        path=path,
        n=n,
        rows=tuple((r[0], r[2], r[3], r[4]) for r in rows),
        tv_row_binomial=tv_row,
        tv_triple_mu_star=tv_triple,
    )


@dataclass(frozen=True)
class AuditReport:
    path: str
    n: int
    ell: int
    beta: float
    tuples_tested: int
    failures: int
    stable_found_fraction: float


def load_audit(path: str) -> AuditReport:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not JSON") from exc
    required = {"tuples_tested", "failures", "stable_found_fraction"}
    if not required <= set(obj):
        raise SchemaError(f"{path}: missing audit keys {required - set(obj)}")
    return AuditReport(
        path=path,
        n=int(obj.get("n", 0)),
        ell=int(obj.get("ell", 0)),
        beta=float(obj.get("beta", 0.0)),
        tuples_tested=int(obj["tuples_tested"]),
        failures=int(obj["failures"]),
        stable_found_fraction=float(obj["stable_found_fraction"]),
    )
