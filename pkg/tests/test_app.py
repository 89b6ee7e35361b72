import json
import os

import pytest

from src.app import EXIT_ERROR, EXIT_OK, main

PRODUCT_STATE = os.path.join(os.path.dirname(__file__), "..", "src", "data", "product_state.json")
FAST = ["--grid-theta", "8", "--grid-phi", "4"]


@pytest.fixture(autouse=True)
def no_config(monkeypatch):
    monkeypatch.delenv("NAQC_CONFIG", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


class TestCompute:
    def test_werner_optimized(self, capsys):
        code, out = run(capsys, *FAST, "compute", "--werner", "0.5", "--measure", "l1", "--optimize")
        assert code == EXIT_OK
        assert json.loads(out.out)["s_value"] == pytest.approx(1.5, abs=1e-6)

    def test_singlet(self, capsys):
        code, out = run(capsys, *FAST, "compute", "--werner", "1", "--optimize")
        report = json.loads(out.out)
        assert report["s_value"] == pytest.approx(6.0, abs=1e-6)
        assert report["bounds"] == {"lhs": 4.0, "sqi": 6.0, "quantum": 6.0, "full_pattern": 18.0}

    def test_product_state_file(self, capsys):
        code, out = run(capsys, "compute", "--state", PRODUCT_STATE, "--measure", "relent")
        assert code == EXIT_OK
        report = json.loads(out.out)
        assert report["s_value"] == pytest.approx(4.0, abs=1e-9)
        assert report["patterns"]["i,j,k"] == pytest.approx(18.0, abs=1e-9)

    def test_pattern_by_name(self, capsys):
        code, out = run(capsys, "compute", "--state", PRODUCT_STATE, "--pattern", "same_setting")
        assert json.loads(out.out)["s_value"] == pytest.approx(6.0, abs=1e-9)

    def test_explicit_frame(self, capsys):
        code, out = run(capsys, "compute", "--werner", "0.9", "--theta", "0.4", "--phi", "2.0")
        report = json.loads(out.out)
        assert report["theta"] == 0.4
        assert report["s_value"] == pytest.approx(4.86, abs=1e-9)

    def test_unknown_pattern(self, capsys, caplog):
        code, _ = run(capsys, "compute", "--werner", "0.5", "--pattern", "bogus")
        assert code == EXIT_ERROR
        assert "unknown index pattern 'bogus'" in caplog.text

    def test_malformed_file(self, capsys, caplog, tmp_path):
        path = tmp_path / "state.json"
        path.write_text('{"dims": [2, 2],\n "matrix": [[')
        code, out = run(capsys, "compute", "--state", str(path))
        assert code == EXIT_ERROR
        assert out.out == ""
        assert f"{path}:2:" in caplog.text

    def test_invalid_state_names_invariant(self, capsys, caplog, tmp_path):
        path = tmp_path / "state.json"
        matrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        path.write_text(json.dumps({"dims": [1, 2], "matrix": matrix}))
        code, out = run(capsys, "compute", "--state", str(path))
        assert code == EXIT_ERROR
        assert "unit-trace" in caplog.text

    def test_needs_one_source(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["compute", "--werner", "0.5", "--state", PRODUCT_STATE])
        assert exc.value.code == 2


class TestScan:
    def test_csv(self, capsys, tmp_path):
        path = tmp_path / "scan.csv"
        code, _ = run(capsys, *FAST, "scan", "--measure", "l1", "--steps", "2", "--out", str(path))
        assert code == EXIT_OK
        content = path.read_bytes().decode()
        assert "\r" not in content
        lines = content.splitlines()
        assert lines[0] == "p_w,s_opt,theta,phi,s_full_pattern,bound_lhs,bound_sqi"
        assert len(lines) == 3
        first, last = lines[1].split(","), lines[2].split(",")
        assert first[0] == "0.000000" and first[1] == "0.000000"
        assert last[0] == "1.000000" and last[1] == "6.000000"
        assert last[5:] == ["4.000000", "6.000000"]

    def test_pattern_columns(self, capsys):
        code, out = run(capsys, *FAST, "scan", "--steps", "2", "--patterns")
        lines = out.out.splitlines()
        assert lines[0].endswith(",s_ijk_over_2,s_full_over_9")
        assert lines[2].split(",")[-2:] == ["3.000000", "1.333333"]

    def test_unwritable_path(self, capsys, tmp_path):
        code, _ = run(capsys, *FAST, "scan", "--steps", "2", "--out", str(tmp_path / "missing" / "scan.csv"))
        assert code == EXIT_ERROR

    def test_too_few_steps(self, capsys):
        code, _ = run(capsys, "scan", "--steps", "1")
        assert code == EXIT_ERROR


class TestThreshold:
    def test_no_sqi_crossing(self, capsys):
        code, out = run(capsys, *FAST, "threshold", "--measure", "l1", "--bound", "sqi")
        assert code == EXIT_OK
        assert json.loads(out.out)["p_star"] == "none"

    def test_l1_lhs(self, capsys):
        code, out = run(capsys, *FAST, "threshold", "--measure", "l1", "--bound", "lhs")
        assert json.loads(out.out)["p_star"] == pytest.approx(0.8165, abs=1e-3)


class TestVerifyAndMub:
    def test_verify_passes(self, capsys):
        code, out = run(capsys, "verify", "--suite", "lhs", "--trials", "30", "--seed", "7")
        assert code == EXIT_OK
        report = json.loads(out.out)
        assert report["ok"] is True and report["seed"] == 7

    def test_mub_qutrit(self, capsys):
        code, out = run(capsys, "mub", "--dim", "3")
        assert code == EXIT_OK
        assert len(json.loads(out.out)["bases"]) == 4

    def test_mub_qubit_frame(self, capsys):
        code, out = run(capsys, "mub", "--dim", "2", "--theta", "0", "--phi", "0")
        bases = json.loads(out.out)["bases"]
        assert bases[2] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]

    def test_mub_unsupported(self, capsys, caplog):
        code, out = run(capsys, "mub", "--dim", "6")
        assert code == EXIT_ERROR
        assert "2, 3, 4, 5, 7, 8, 9, 25" in caplog.text
