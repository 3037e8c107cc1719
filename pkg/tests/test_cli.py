import json

import pytest

from qsusy.cli import (
    ConfigError, Report, SuiteConfig, emit_report, main, run_suite,
    _parse_bindings,
)


class TestSuiteConfig:
    def test_unknown_suite_rejected(self):
        with pytest.raises(ConfigError):
            SuiteConfig(suites=["families", "nope"])

    def test_default_selects_everything(self):
        cfg = SuiteConfig()
        assert "families" in cfg.suites and "x2" in cfg.suites


class TestBindings:
    def test_parse(self):
        assert _parse_bindings("alpha=1,nu=1/2, b0=-0.25") == {
            "alpha": 1.0, "nu": 0.5, "b0": -0.25}

    def test_bad_value(self):
        with pytest.raises(ConfigError):
            _parse_bindings("alpha=one")

    def test_missing_equals(self):
        with pytest.raises(ConfigError):
            _parse_bindings("alpha")


class TestReport:
    def _tiny_report(self):
        cfg = SuiteConfig(suites=["spectrum"], seed=3)
        checks = [
            {"id": "b", "anchor": "second", "verdict": "pass",
             "residual": 1e-12, "millis": 5.0},
            {"id": "a", "anchor": "first", "verdict": "fail",
             "residual": 0.5, "millis": 7.0},
            {"id": "c", "anchor": "third", "verdict": "skipped",
             "residual": None, "millis": 0.0},
        ]
        return Report(cfg, checks)

    def test_summary_counts(self):
        rep = self._tiny_report()
        assert rep.summary == {"pass": 1, "fail": 1, "skipped": 1, "total": 3}

    def test_json_sorted_by_id(self):
        doc = json.loads(self._tiny_report().to_json())
        assert [c["id"] for c in doc["checks"]] == ["a", "b", "c"]
        assert doc["meta"]["seed"] == 3

    def test_markdown_contains_rows(self):
        md = self._tiny_report().to_markdown()
        assert "| `a` | first | fail" in md

    def test_empty_report(self):
        rep = Report(SuiteConfig(suites=[]), [])
        assert rep.summary == {"pass": 0, "fail": 0, "skipped": 0, "total": 0}

    def test_emit_format_guard(self):
        with pytest.raises(ConfigError):
            emit_report(self._tiny_report(), "yaml")


class TestDeterminism:
    def test_identical_config_identical_json(self):
        cfg1 = SuiteConfig(suites=["lie-closure"], seed=123)
        cfg2 = SuiteConfig(suites=["lie-closure"], seed=123)
        r1 = run_suite(cfg1).to_json(include_timing=False)
        r2 = run_suite(cfg2).to_json(include_timing=False)
        assert r1 == r2


class TestMain:
    def test_catalog(self, capsys):
        assert main(["catalog", "--family", "B", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert "J1" in doc and "catalogued:minus:J3+" in doc

    def test_catalog_tex(self, capsys):
        assert main(["catalog", "--family", "A", "--format", "tex"]) == 0
        out = capsys.readouterr().out
        assert r"\frac{d^2}{dz^2}" in out

    def test_verify_invariance_exit_zero(self, capsys, tmp_path):
        out = tmp_path / "report.json"
        rc = main(["verify", "invariance", "--f", "exp(z)", "--ops", "J1,K2",
                   "--json", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["fail"] == 0

    def test_verify_degenerate_f_is_config_error(self, capsys):
        rc = main(["verify", "invariance", "--f", "z", "--ops", "J1"])
        assert rc == 2

    def test_model_report(self, capsys):
        rc = main(["model", "--example", "1", "--bind", "alpha=1,nu=1,b0=0.5",
                   "--report", "json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["residuals"]["cond2"] < 1e-8
        assert len(doc["spectrum"]["minus"]) == 3

    def test_x2_verify(self, capsys, tmp_path):
        out = tmp_path / "x2.json"
        rc = main(["x2", "verify", "--alpha", "2", "--side", "minus",
                   "--json", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["pass"] == 4

    def test_x2_skips_excluded(self, tmp_path):
        # the frame degenerates at alpha=-1, so every identity check is
        # reported skipped rather than failed
        out = tmp_path / "x2.json"
        rc = main(["x2", "verify", "--alpha", "-1", "--side", "minus",
                   "--json", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["summary"]["skipped"] == 4
        assert doc["summary"]["fail"] == 0

    def test_spectrum_potential(self, capsys):
        rc = main(["spectrum", "--potential", "q^2/2", "--grid", "2000", "--k", "2"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert abs(doc["fd"][0] - 0.5) < 1e-3

    def test_suite_markdown_and_exit(self, capsys, tmp_path):
        md = tmp_path / "out.md"
        rc = main(["suite", "--suites", "spectrum", "--md", str(md)])
        assert rc == 0
        assert "verification report" in md.read_text()

    def test_bad_binding_is_config_error(self):
        assert main(["model", "--example", "1", "--bind", "alpha=x"]) == 2

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "qsusy.cfg"
        cfg.write_text("suites = lie-closure\nseed = 11  # comment\n")
        out = tmp_path / "r.json"
        rc = main(["suite", "--config", str(cfg), "--json", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["meta"]["seed"] == 11
        assert doc["meta"]["config"]["suites"] == ["lie-closure"]

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "qsusy.cfg"
        cfg.write_text("seed = 11\nsuites = lie-closure\n")
        out = tmp_path / "r.json"
        rc = main(["suite", "--config", str(cfg), "--seed", "99",
                   "--json", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["meta"]["seed"] == 99


def test_check_ids_unique_with_anchors():
    from qsusy.invariance import SamplePlan
    from qsusy.suites import SUITES

    plan = SamplePlan()
    checks = []
    for name in ("families", "construction", "monomial", "spectrum"):
        checks.extend(SUITES[name](plan))
    ids = [c["id"] for c in checks]
    assert len(ids) == len(set(ids))
    assert all(c["anchor"] for c in checks)
