import json

import numpy as np

from bp_assign.cli import main
from bp_assign.instances import load_matrix


def test_generate_writes_matrix_and_sidecar(tmp_path, capsys):
    out = tmp_path / "gen"
    code = main(["generate", "--n", "4", "--dist", "exponential", "--rate", "2.0",
                 "--seed", "9", "--out", str(out)])
    assert code == 0
    cost, dist = load_matrix(out / "matrix_n4_seed9.csv")
    assert cost.n == 4 and cost.seed == 9 and not cost.rescaled
    assert dist.kind == "exponential" and dist.rate == 2.0


def test_generate_requires_size_and_seed(capsys):
    assert main(["generate", "--n", "4"]) == 2
    assert "config error" in capsys.readouterr().err


def test_bp_subcommand_writes_decision_and_messages(tmp_path):
    out = tmp_path / "bp"
    code = main(["bp", "--n", "6", "--seed", "3", "--k", "2", "--out", str(out)])
    assert code == 0
    decision_lines = (out / "decision_n6_k2.csv").read_text().strip().splitlines()
    assert decision_lines[0] == "side,index,choice"
    assert len(decision_lines) == 1 + 12
    with np.load(out / "messages_n6_k2.npz") as dump:
        assert int(dump["n"]) == 6 and int(dump["k"]) == 2
        assert dump["row_to_col"].shape == (6, 6)
        assert dump["col_to_row"].shape == (6, 6)


def test_bp_subcommand_loads_saved_matrix(tmp_path):
    gen_dir = tmp_path / "gen"
    assert main(["generate", "--n", "5", "--seed", "1", "--out", str(gen_dir)]) == 0
    out = tmp_path / "run"
    code = main(["bp", "--matrix", str(gen_dir / "matrix_n5_seed1.csv"),
                 "--k", "1", "--out", str(out)])
    assert code == 0
    assert (out / "messages_n5_k1.npz").exists()


def test_bp_subcommand_rescales_on_request(tmp_path):
    plain = tmp_path / "plain"
    scaled = tmp_path / "scaled"
    assert main(["bp", "--n", "4", "--seed", "2", "--k", "1", "--out", str(plain)]) == 0
    assert main(["bp", "--n", "4", "--seed", "2", "--k", "1", "--rescaled",
                 "--out", str(scaled)]) == 0
    with np.load(plain / "messages_n4_k1.npz") as a, \
            np.load(scaled / "messages_n4_k1.npz") as b:
        # uniform01 density at zero is 1, so rescaling multiplies messages by n
        assert np.allclose(b["row_to_col"], 4.0 * a["row_to_col"])


def test_exact_subcommand_emits_json(capsys):
    code = main(["exact", "--n", "2", "--seed", "5"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert sorted(payload) == ["permutation", "value"]
    assert sorted(payload["permutation"]) == [0, 1]


def test_experiment_subcommand_with_config_and_check(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "experiment": "zeta2", "n": [10], "distribution": "exponential",
        "seeds": {"count": 40}, "out_dir": str(tmp_path / "out"),
    }))
    code = main(["zeta2", "--config", str(config), "--check"])
    captured = capsys.readouterr().out
    assert code == 3  # the n=10 mean sits ~12% below the large-n limit
    assert "FAIL" in captured
    assert (tmp_path / "out" / "zeta2.csv").exists()
    assert (tmp_path / "out" / "zeta2_agg.csv").exists()


def test_experiment_check_passes_at_scale_appropriate_threshold(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "experiment": "argmin-diag", "n": [40], "k": [2],
        "seeds": {"count": 10}, "out_dir": str(tmp_path / "out"),
    }))
    assert main(["argmin-diag", "--config", str(config), "--check"]) == 0


def test_config_error_exit_codes(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert main(["zeta2", "--config", str(missing)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["zeta2", "--config", str(bad)]) == 2
    mismatch = tmp_path / "mismatch.json"
    mismatch.write_text(json.dumps({"experiment": "pwit"}))
    assert main(["zeta2", "--config", str(mismatch)]) == 2
    unknown_key = tmp_path / "unknown.json"
    unknown_key.write_text(json.dumps({"experiment": "zeta2", "widgets": 3}))
    assert main(["zeta2", "--config", str(unknown_key)]) == 2


def test_cli_flag_overrides(tmp_path):
    out = tmp_path / "out"
    code = main(["pwit", "--k", "1", "--seed", "4", "--out", str(out)])
    assert code == 0
    rows = (out / "pwit.csv").read_text().strip().splitlines()
    assert len(rows) == 2  # header plus the single requested seed
    assert rows[1].startswith("4,2,30,1,")


def test_error_curve_cli_check_failure_mode(tmp_path):
    # one update is far too few for a small instance: threshold check trips
    code = main(["error-curve", "--n", "40", "--k", "1", "--out",
                 str(tmp_path / "out"), "--check"])
    assert code == 3


def test_toperator_grid_flags(tmp_path):
    out = tmp_path / "out"
    code = main(["toperator", "--lo", "-30", "--hi", "30", "--step", "0.02",
                 "--double-steps", "5", "--out", str(out)])
    assert code == 0
    trace = (out / "trace_step000.csv").read_text().splitlines()
    assert trace[1].startswith("-30.0,1.0,")
    assert len(trace) == 1 + 3001  # header plus one row per grid point
    assert len(list(out.glob("trace_step*.csv"))) == 11
