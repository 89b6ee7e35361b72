import numpy as np
import pytest

from src.config import NaqcSettings
from src.suites import SUITES, _ceiling_check, run_suite

from conftest import SEED

FAST = NaqcSettings(grid_theta=8, grid_phi=4)


class TestSuites:
    @pytest.mark.parametrize("name", ["coherence", "lhs", "sqi", "patterns", "f", "mub"])
    def test_passes(self, name):
        report = run_suite(name, 40, SEED, FAST)
        assert report.ok, [c for c in report.checks if not c.passed]

    def test_quantum(self):
        report = run_suite("quantum", 30, SEED, FAST)
        assert report.ok
        assert all(c.observed <= 6 + 1e-6 for c in report.checks)

    def test_qudit(self):
        report = run_suite("qudit", 20, SEED, FAST)
        assert report.ok
        names = [c.name for c in report.checks]
        assert any("lhs d=3" in n for n in names) and any("sqi1 d=3" in n for n in names)

    def test_model_sweeps_in_report(self):
        data = run_suite("lhs", 20, SEED, FAST).model_dump(mode="json")
        sweeps = [c["sweep"] for c in data["checks"] if c["sweep"] is not None]
        assert [s["measure"]["kind"] for s in sweeps] == ["l1", "relent"]
        for sweep in sweeps:
            assert (sweep["kind"], sweep["d"], sweep["trials"], sweep["seed"]) == ("lhs", 2, 20, SEED)
            assert sweep["max_s"] <= 4 + 1e-9
            assert sweep["invalid_trials"] == []
            assert "values" not in sweep and "ensemble" not in sweep
        assert data["checks"][0]["name"] == "lhs d=2: validation failures"

    def test_report_json(self):
        data = run_suite("mub", 1, SEED, FAST).model_dump(mode="json")
        assert data["ok"] is True
        assert len(data["checks"]) == 8

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_suite("bell", 10, SEED, FAST)

    def test_trials_positive(self):
        with pytest.raises(ValueError):
            run_suite("lhs", 0, SEED, FAST)

    def test_every_cli_suite_registered(self):
        assert set(SUITES) == {"coherence", "lhs", "sqi", "quantum", "qudit", "mub", "f", "patterns"}


class TestCeilingCheck:
    def test_reports_offending_seed(self):
        check = _ceiling_check("demo", np.array([1.0, 5.0, 3.0, 7.0]), 4.0, 100, 1e-9)
        assert not check.passed
        assert check.observed == 7.0
        assert check.offending_seed == 101

    def test_pass(self):
        check = _ceiling_check("demo", np.array([1.0, 4.0 + 1e-12]), 4.0, 0, 1e-9)
        assert check.passed and check.offending_seed is None
