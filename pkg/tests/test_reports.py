import csv
import json
import shutil
import subprocess
import sys

import pytest

from hbspace.cli import main
from hbspace.reports import (
    SCHEMA_VERSION,
    AnalysisReport,
    ConfigError,
    RunConfig,
    emit_report,
    load_report,
    run_analyze,
    run_moments,
    run_reduce,
    run_scan,
    run_verify,
)

from helpers import CORPUS_DIR, blaschke_corpus

Z3_PATH = CORPUS_DIR / "z_cubed.json"
HALF_PATH = CORPUS_DIR / "poly_half.json"
EVEN_PATH = CORPUS_DIR / "outer_even_two_arc.json"


@pytest.fixture(scope="module")
def z3_report():
    return run_analyze(RunConfig(grid=256), Z3_PATH)


class TestRunConfig:
    @pytest.mark.parametrize("kw", [
        {"mode": "plot"}, {"grid": 1000}, {"truncation": 0}, {"cutoff": -1},
        {"tolerances": {"bogus": 1.0}},
    ])
    def test_invalid(self, kw):
        with pytest.raises(ConfigError):
            RunConfig(**kw)

    def test_tolerance_override(self):
        cfg = RunConfig(tolerances={"gram_exact": 1e-6})
        assert cfg.tol("gram_exact") == 1e-6
        assert cfg.tol("gram_truncated") == 1e-3


class TestAnalyze:
    def test_z_cubed(self, z3_report):
        red = z3_report.reducibility
        assert z3_report.exit_code == 0 and z3_report.status == "ok"
        assert red["decision"] == "reducible"
        (pair,) = red["solution_set"]["pairs"]
        assert pair["alpha"] == [0.0, 0.0] and pair["beta"] == [0.0, 0.0]

    def test_even_outer_family(self):
        rep = run_reduce(RunConfig(mode="reduce"), EVEN_PATH)
        assert rep.reducibility["decision"] == "reducible"
        assert rep.reducibility["solution_set"]["relation"] == "beta = -conj(alpha)"

    def test_nonextreme_skips_reduction(self):
        rep = run_analyze(RunConfig(truncation=1024), HALF_PATH)
        assert rep.exit_code == 0
        assert "skipped" in rep.reducibility
        assert rep.isometry == {"skipped": "requires an extreme symbol"}

    def test_malformed(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{ nope")
        rep = run_analyze(RunConfig(), bad)
        assert rep.exit_code == 2 and rep.status == "input_error"
        assert rep.errors[0]["stage"] == "parse"

    def test_deterministic(self):
        cfg = RunConfig(grid=256)
        a, b = run_analyze(cfg, Z3_PATH), run_analyze(cfg, Z3_PATH)
        assert a.canonical_json() == b.canonical_json()
        assert "timing" not in json.loads(a.canonical_json())

    def test_round_trip(self, z3_report, tmp_path):
        path = tmp_path / "r.json"
        emit_report(z3_report, path)
        again = load_report(path)
        assert again.canonical_json() == z3_report.canonical_json()
        assert json.loads(path.read_text())["schema_version"] == SCHEMA_VERSION

    def test_schema_version_checked(self, z3_report):
        doc = z3_report.to_dict()
        doc["schema_version"] = "0"
        with pytest.raises(ValueError):
            AnalysisReport.from_dict(doc)


class TestVerifyAndMoments:
    def test_blaschke_residuals(self):
        rep = run_verify(RunConfig(mode="verify", grid=256), Z3_PATH)
        assert all(r["residual"] <= 1e-10 for r in rep.defect_identities)

    def test_nonextreme_skip_reason(self):
        rep = run_verify(RunConfig(mode="verify", truncation=1024), HALF_PATH)
        names = {r["identity"]: r for r in rep.defect_identities}
        assert set(names) == {"xx*", "x*x"}
        assert names["x*x"]["residual"] is None or names["x*x"]["detail"].startswith("skipped")
        assert json.loads(rep.to_json())["defect_identities"][1]["residual"] is None

    def test_outer_refinement_table(self):
        rep = run_verify(RunConfig(mode="verify", orbit=12), EVEN_PATH)
        assert {r["quantity"] for r in rep.refinement} == {"gram_moment_formula",
                                                           "defect_identities"}
        assert "refinement" in rep.tables

    def test_moments_csv(self, tmp_path):
        rep = run_moments(RunConfig(mode="moments", grid=256), HALF_PATH)
        assert rep.moments["decay_bound_holds"] and rep.moments["parity_bridge_holds"]
        emit_report(rep, csv_dir=tmp_path)
        with (tmp_path / "moments.csv").open() as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["k", "re", "im"]
        assert float(rows[2][1]) == pytest.approx(0.25)

    def test_modulus_rows_equal_grid(self, z3_report, tmp_path):
        emit_report(z3_report, csv_dir=tmp_path)
        with (tmp_path / "modulus.csv").open() as fh:
            assert sum(1 for _ in fh) - 1 == 256


class TestScan:
    def test_empty(self, tmp_path):
        rep = run_scan(RunConfig(mode="scan"), tmp_path)
        assert rep.rows == [] and rep.exit_code == 0

    def test_blaschke_corpus_agreement(self, tmp_path):
        for i, spec in enumerate(blaschke_corpus(seed=7, per_degree=3, max_degree=5)[:20]):
            (tmp_path / f"s{i:02d}.json").write_text(json.dumps(spec.to_dict()))
        rep = run_scan(RunConfig(mode="scan", jobs=2), tmp_path)
        assert rep.summary["symbols"] == 20
        assert rep.summary["theory_agreement_rate"] == 1.0

    def test_mixed_quarantine(self, tmp_path):
        shutil.copy(Z3_PATH, tmp_path)
        (tmp_path / "bad.json").write_text('{"kind": "blaschke", "zeros": [2]}')
        rep = run_scan(RunConfig(mode="scan"), tmp_path)
        assert [r["symbol"] for r in rep.rows] == ["z_cubed.json"]
        assert rep.errors[0]["symbol"] == "bad.json"
        assert rep.exit_code == 0

    def test_missing_directory(self, tmp_path):
        with pytest.raises(ConfigError):
            run_scan(RunConfig(mode="scan"), tmp_path / "missing")


class TestCli:
    def test_exit_codes(self, tmp_path, capsys):
        assert main(["reduce", "--symbol", str(Z3_PATH), "--grid", "256"]) == 0
        assert json.loads(capsys.readouterr().out)["reducibility"]["decision"] == "reducible"
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": "blaschke", "zeros": [2]}')
        assert main(["analyze", "--symbol", str(bad), "--report", str(tmp_path / "o.json")]) == 2
        assert main(["analyze", "--symbol", str(Z3_PATH), "--grid", "100"]) == 2
        assert main(["analyze", "--symbol", str(Z3_PATH), "--tol", "nonsense"]) == 2
        assert main(["frobnicate"]) == 2

    def test_report_and_csv(self, tmp_path):
        code = main(["moments", "--symbol", str(Z3_PATH), "--grid", "256",
                     "--report", str(tmp_path / "m.json"), "--csv", str(tmp_path / "csv")])
        assert code == 0
        assert (tmp_path / "csv" / "moments.csv").exists()
        assert load_report(tmp_path / "m.json").mode == "moments"

    def test_module_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "hbspace", "reduce", "--symbol",
                              str(Z3_PATH), "--grid", "256"], capture_output=True, text=True)
        assert out.returncode == 0
        assert json.loads(out.stdout)["reducibility"]["decision"] == "reducible"
