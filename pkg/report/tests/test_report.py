import json
import math
import os
import pytest

from latinlab_report import cli
from latinlab_report.schema import SchemaError, load_audit, load_parity_stats
from latinlab_report.stats import (
    binom_mass,
    mu_star_mass,
    recompute_tv_row,
    total_parity_bit,
)


def write_stats(path, n, rows, tv_row=0.0, tv_triple=0.0):
    lines = ["seed,n,n_row,n_col,n_sym"]
    for i, (a, b, c) in enumerate(rows):
        lines.append(f"{i},{n},{a},{b},{c}")
    lines.append(f"tv,{n},{tv_row},{tv_triple},")
    path.write_text("\n".join(lines) + "\n")


class TestSchema:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "stats.csv"
        write_stats(path, 4, [(0, 4, 4), (2, 2, 2)], 0.5, 0.9)
        stats = load_parity_stats(str(path))
        assert stats.n == 4 and stats.count == 2
        assert stats.tv_row_binomial == 0.5

    def test_bad_header(self, tmp_path):
        path = tmp_path / "stats.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError):
            load_parity_stats(str(path))

    def test_missing_footer(self, tmp_path):
        path = tmp_path / "stats.csv"
        path.write_text("seed,n,n_row,n_col,n_sym\n0,4,0,0,0\n")
        with pytest.raises(SchemaError):
            load_parity_stats(str(path))

    def test_out_of_range(self, tmp_path):
        path = tmp_path / "stats.csv"
        write_stats(path, 4, [(9, 0, 0)])
        with pytest.raises(SchemaError):
            load_parity_stats(str(path))

    def test_audit_schema(self, tmp_path):
        path = tmp_path / "audit.json"
        path.write_text(json.dumps({"tuples_tested": 5, "failures": 1,
                                    "stable_found_fraction": 0.8, "n": 8,
                                    "ell": 1, "beta": 0.1}))
        audit = load_audit(str(path))
        assert audit.failures == 1

    def test_audit_missing_keys(self, tmp_path):
        path = tmp_path / "audit.json"
        path.write_text("{}")
        with pytest.raises(SchemaError):
            load_audit(str(path))


class TestStats:
    def test_binom_mass(self):
        assert binom_mass(4, 2) == 6 / 16
        assert binom_mass(4, 9) == 0.0

    def test_parity_bit(self):
        assert [total_parity_bit(n) for n in (1, 2, 3, 4, 5, 6)] == [0, 1, 1, 0, 0, 1]

    def test_mu_star_mass_parity(self):
        assert mu_star_mass(4, (1, 1, 1)) == 0.0
        expected = 2 * (1 / 16) ** 3
        assert math.isclose(mu_star_mass(4, (0, 0, 0)), expected, rel_tol=1e-12)

    def test_tv_row_of_exact_binomial_counts(self):
        # a synthetic sample exactly matching Bin(4,1/2) has TV 0
        rows = []
        for k in range(5):
            rows.extend([(0, k, 0, 0)] * math.comb(4, k))
        rows = [(i, r[1], 0, 0) for i, r in enumerate(rows)]
        assert recompute_tv_row(rows, 4) <= 1e-15


class TestCli:
    def test_no_inputs_is_error(self, tmp_path):
        assert cli.main(["--out-dir", str(tmp_path / "out")]) == 2
        assert not (tmp_path / "out").exists()

    def test_schema_violation_no_partial_outputs(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n")
        out = tmp_path / "out"
        assert cli.main(["--stats", str(bad), "--out-dir", str(out)]) == 2
        assert not out.exists()

    def test_renders_synthetic_stats(self, tmp_path):
        path = tmp_path / "stats.csv"
        rows = [(0, 2, 2), (2, 0, 2), (2, 2, 0), (4, 4, 4)] * 10
        n = 4
        # footer values must match the recomputation for exit code 0
        from latinlab_report.stats import recompute_tv_triple

        counted = [(i, a, b, c) for i, (a, b, c) in enumerate(rows)]
        tv_row = recompute_tv_row(counted, n)
        tv_triple = recompute_tv_triple(counted, n)
        write_stats(path, n, rows, tv_row, tv_triple)
        out = tmp_path / "out"
        assert cli.main(["--stats", str(path), "--out-dir", str(out),
                         "--format", "png"]) == 0
        files = sorted(os.listdir(out))
        assert "report.md" in files
        assert any(f.endswith("_parity_hist.png") for f in files)
        assert any(f.endswith("_triple_heatmap.png") for f in files)
        text = (out / "report.md").read_text()
        assert "ok" in text and "MISMATCH" not in text

    def test_mismatched_footer_exit_1(self, tmp_path):
        path = tmp_path / "stats.csv"
        write_stats(path, 4, [(0, 0, 0)] * 4, tv_row=0.123, tv_triple=0.456)
        out = tmp_path / "out"
        assert cli.main(["--stats", str(path), "--out-dir", str(out)]) == 1

    def test_tv_curve_with_two_orders(self, tmp_path):
        from latinlab_report.stats import recompute_tv_triple

        paths = []
        for n in (3, 4):
            path = tmp_path / f"stats{n}.csv"
            rows = [(0, 0, total_parity_bit(n) % 2)] * 5
            counted = [(i, a, b, c) for i, (a, b, c) in enumerate(rows)]
            write_stats(path, n, rows, recompute_tv_row(counted, n),
                        recompute_tv_triple(counted, n))
            paths.append(str(path))
        out = tmp_path / "out"
        code = cli.main(["--stats", paths[0], "--stats", paths[1],
                         "--out-dir", str(out)])
        assert code == 0
        assert (out / "tv_vs_n.svg").exists()

    def test_audit_rendering(self, tmp_path):
        audit = tmp_path / "audit.json"
        audit.write_text(json.dumps({"tuples_tested": 10, "failures": 3,
                                     "stable_found_fraction": 0.7, "n": 8,
                                     "ell": 1, "beta": 0.1}))
        out = tmp_path / "out"
        assert cli.main(["--audit", str(audit), "--out-dir", str(out)]) == 0
        assert (out / "audit_summary.svg").exists()
        assert "Expander audits" in (out / "report.md").read_text()
