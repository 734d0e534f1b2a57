import json

import pytest

from ltl2a.cli import dispatch


def run_cli(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_progress_reference_example(capsys):
    code, out, _ = run_cli(capsys, "progress", "--formula", "F (R & F G)", "R")
    assert code == 0
    assert out.strip() == "F G"


def test_progress_multiple_steps_and_empty(capsys):
    code, out, _ = run_cli(
        capsys, "progress", "--formula", "F (R & F G)", ".", "R", "G"
    )
    assert code == 0
    # residuals are simplify-normalized (conjuncts in canonical order)
    assert out.splitlines() == ["F (F G & R)", "F G", "true"]


def test_check_pass_line(capsys):
    code, out, _ = run_cli(capsys, "check", "--cases", "500", "--seed", "7")
    assert code == 0
    assert out.strip() == "500/500 pass"


def test_count_presets(capsys):
    code, out, _ = run_cli(capsys, "count", "--preset", "letterworld-avoid", "--json")
    assert code == 0
    payload = json.loads(out)
    assert 5 * 10**8 <= payload["count"] <= 5 * 10**9
    code, out, _ = run_cli(capsys, "count", "--preset", "letterworld-po", "--json")
    assert json.loads(out)["count"] >= 10**36


def test_sample_deterministic_given_seed(capsys):
    args = ("sample", "--preset", "letterworld-po", "-n", "4", "--seed", "9", "--json")
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2
    assert len(json.loads(out1)["formulas"]) == 4


def test_solve_locked_rooms(capsys):
    code, out, _ = run_cli(
        capsys,
        "solve",
        "--env", "lockedrooms",
        "--tasks", "explicit:F (B & F G);F (B & F R)",
        "--episodes", "10",
        "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["greedy_metrics"]["success_rate"] == 1.0
    assert payload["n_states"] > 0


def test_run_policies(capsys):
    for policy in ("optimal", "myopic-optimal", "random"):
        code, out, _ = run_cli(
            capsys,
            "run",
            "--env", "lockedrooms",
            "--tasks", "explicit:F (B & F G);F (B & F R)",
            "--policy", policy,
            "--episodes", "3",
            "--seed", "4",
            "--json",
        )
        assert code == 0
        assert len(json.loads(out)["episodes"]) == 3


def test_eval_csv_and_json(capsys):
    args = (
        "eval",
        "--env", "bootcamp",
        "--tasks", "explicit:F (a & F b)",
        "--policy", "optimal",
        "--episodes", "20",
        "--seed", "2",
    )
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    header, row = out.splitlines()
    assert header.startswith("env,task_dist,policy,n,")
    assert row.split(",")[4] == "1.000000"
    code, out, _ = run_cli(capsys, *args, "--json")
    assert json.loads(out)["success_rate"] == 1.0


def test_export_graph_prefix_observation(capsys):
    code, out, _ = run_cli(
        capsys, "export", "--what", "graph",
        "--formula", "! r U (j & (! p U k))",
    )
    assert code == 0
    payload = json.loads(out)
    assert len(payload["nodes"]) == 9
    code, out, _ = run_cli(
        capsys, "export", "--what", "prefix", "--formula", "! r U (j & (! p U k))"
    )
    assert json.loads(out)["tokens"] == ["U", "!", "r", "&", "j", "U", "!", "p", "k"]
    code, out, _ = run_cli(
        capsys, "export", "--what", "observation", "--env", "letterworld", "--seed", "3"
    )
    assert json.loads(out)["shape"] == [13, 7, 7]


def test_exit_codes(capsys):
    code, _, err = run_cli(capsys, "progress", "--formula", "U a")
    assert code == 1 and "error" in err
    code, _, err = run_cli(capsys, "count", "--tasks", "explicit:F a")
    assert code == 1  # counting is grammar-only
    code, _, _ = run_cli(capsys, "nonsense")
    assert code == 2
    code, _, _ = run_cli(capsys, "sample")  # no task space
    assert code == 1


def test_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("LTL2A_SEED", "33")
    _, out1, _ = run_cli(capsys, "sample", "--preset", "letterworld-po", "-n", "2")
    monkeypatch.delenv("LTL2A_SEED")
    _, out2, _ = run_cli(
        capsys, "sample", "--preset", "letterworld-po", "-n", "2", "--seed", "33"
    )
    assert out1 == out2


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "metrics.csv"
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--env", "bootcamp",
        "--tasks", "explicit:F a",
        "--policy", "random",
        "--episodes", "5",
        "--out", str(target),
    )
    assert code == 0 and out == ""
    assert target.read_text().startswith("env,task_dist,policy,n,")
