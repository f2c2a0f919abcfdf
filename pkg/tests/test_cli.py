import json

import numpy as np
import pytest

from groupbandits import RngStream, gen_random_gpsi, gen_random_lbgi, save_instance
from groupbandits.cli import main


@pytest.fixture(scope="module")
def gpsi_path(tmp_path_factory):
    inst = gen_random_gpsi(2, 2, 2, 1, 0.05, RngStream(0, 0))
    path = tmp_path_factory.mktemp("cli") / "gpsi.json"
    save_instance(inst, path)
    return str(path)


@pytest.fixture(scope="module")
def lbgi_path(tmp_path_factory):
    inst = gen_random_lbgi(2, 2, 2, np.array([1.0, 2.0]), 0.1, RngStream(0, 0))
    path = tmp_path_factory.mktemp("cli") / "lbgi.json"
    save_instance(inst, path)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_writes_instance(self, capsys, tmp_path):
        out = tmp_path / "inst.json"
        code, _, _ = run_cli(capsys, "gen", "--generator", "random-gpsi",
                             "--n-groups", "2", "--n-arms", "2", "--n-dims", "2",
                             "--pareto-count", "1", "--seed", "4",
                             "--output", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        assert np.asarray(data["means"]).shape == (2, 2, 2)

    def test_stdout_json(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "--generator", "hard-gpsi",
                               "--n-groups", "3", "--n-arms", "2",
                               "--n-dims", "3")
        assert code == 0
        assert json.loads(out)["n_groups"] == 3

    def test_generation_failure_exit_1(self, capsys):
        code, out, err = run_cli(capsys, "gen", "--generator", "random-gpsi",
                                 "--n-groups", "3", "--n-arms", "2",
                                 "--n-dims", "2", "--pareto-count", "1",
                                 "--epsilon", "0.4")
        assert code == 1
        assert json.loads(err)["error"] == "GenerationBudgetError"
        assert out == ""


class TestGaps:
    def test_pareto_report(self, capsys, gpsi_path):
        code, out, _ = run_cli(capsys, "gaps", gpsi_path)
        assert code == 0
        assert json.loads(out)["problem"] == "pareto"

    def test_linear_report(self, capsys, lbgi_path):
        code, out, _ = run_cli(capsys, "gaps", lbgi_path,
                               "--weights", "1", "2")
        assert code == 0
        assert json.loads(out)["problem"] == "linear"

    def test_missing_file_exit_1(self, capsys):
        code, _, err = run_cli(capsys, "gaps", "/nonexistent.json")
        assert code == 1
        assert "error" in json.loads(err)


class TestRun:
    def test_te_with_trace(self, capsys, gpsi_path, tmp_path):
        trace = tmp_path / "trace.jsonl"
        code, out, _ = run_cli(capsys, "run", gpsi_path, "--algo", "te",
                               "--trace", str(trace))
        assert code == 0
        body = json.loads(out)
        assert body["total_pulls"] > 0
        events = [json.loads(line) for line in trace.read_text().splitlines()]
        assert all({"round", "event", "payload"} <= set(e) for e in events)

    def test_eecb_without_weights_exit_1(self, capsys, lbgi_path):
        code, _, err = run_cli(capsys, "run", lbgi_path, "--algo", "eecb")
        assert code == 1
        assert "weights" in json.loads(err)["message"]

    def test_usage_error_exit_2(self, capsys, gpsi_path):
        with pytest.raises(SystemExit) as exc:
            main(["run", gpsi_path, "--algo", "bogus"])
        assert exc.value.code == 2


class TestSweep:
    def test_sweep_with_csv(self, capsys, gpsi_path, tmp_path):
        config = {"preset": "custom", "algorithms": ["ge"], "grid": [gpsi_path],
                  "replications": 2, "master_seed": 0}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        csv_path = tmp_path / "results.csv"
        code, out, _ = run_cli(capsys, "sweep", str(cfg_path),
                               "--csv", str(csv_path))
        assert code == 0
        assert json.loads(out)["summary"][0]["n"] == 2
        assert csv_path.read_text().startswith("grid_point,")


class TestBounds:
    def test_te_upper(self, capsys, gpsi_path):
        code, out, _ = run_cli(capsys, "bounds", gpsi_path,
                               "--kind", "te-upper", "--constant", "2.0")
        assert code == 0
        body = json.loads(out)
        assert body["kind"] == "te-upper"
        assert body["constant_used"] == 2.0

    def test_refined_eecb(self, capsys, lbgi_path):
        code, out, _ = run_cli(capsys, "bounds", lbgi_path,
                               "--kind", "eecb-upper", "--weights", "1", "2",
                               "--refined")
        assert code == 0
        assert json.loads(out)["total"] >= 0
