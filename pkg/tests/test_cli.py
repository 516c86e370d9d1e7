import json
import subprocess
import sys

import pytest

from radonhgf.cli import main, suite


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_capelli_passes(capsys):
    code, out, err = run(capsys, "capelli", "--r", "3")
    doc = json.loads(out)
    assert code == 0 and doc["reports"][0]["status"] == "pass"
    assert "PASS capelli" in err


def test_report_fields(capsys):
    _, out, _ = run(capsys, "gamma-contiguity", "--r", "2", "--a", "3", "--nodes", "64")
    rep = json.loads(out)["reports"][0]
    assert {"check", "params", "status", "max_rel_err", "elapsed_ms", "seed", "tol"} <= set(rep)
    assert rep["details"]["ratios"][0]["expected"] == 6


def test_symbolic_contiguity(capsys):
    code, out, _ = run(capsys, "contiguity", "--lambda", "1,1,1", "--r", "2", "--m", "3", "--i", "1", "--j", "3",
                       "--mode", "symbolic")
    assert code == 0 and json.loads(out)["reports"][0]["exact"] is True


def test_guard_exit_code(capsys):
    assert run(capsys, "capelli", "--r", "4")[0] == 2


def test_lift_guards(capsys):
    assert run(capsys, "cayley", "--r", "4", "--lift-guards")[0] == 0


def test_negative_control_exit_code(capsys):
    assert run(capsys, "cayley", "--r", "2", "--perturb", "1")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["nope"],
        ["capelli"],
        ["capelli", "--r", "two"],
        ["validate-params", "--lambda", "2,1", "--m", "2", "--alpha", "(-a-b);(a-r)"],
        ["normal-form", "--lambda", "1,1,1", "--input", "/nonexistent.json"],
        ["gamma", "--r", "2", "--a", "0.5"],
    ],
)
def test_invalid_input(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_validate_params_failure(capsys):
    code, out, _ = run(capsys, "validate-params", "--lambda", "2,1", "--m", "2", "--alpha", "1,0;-3")
    assert code == 1
    assert {v["clause"] for v in json.loads(out)["reports"][0]["details"]["violations"]} == {"i", "ii"}


def test_normal_form_from_file(tmp_path, capsys):
    from radonhgf.contiguity import normal_form_point

    path = tmp_path / "z.json"
    path.write_text(json.dumps(normal_form_point((2, 1), 1).to_json()))
    code, out, _ = run(capsys, "normal-form", "--lambda", "2,1", "--input", str(path), "--variant", "1")
    assert code == 0 and json.loads(out)["reports"][0]["details"]["g"] == [["1", "0"], ["0", "1"]]


def test_theta_from_file(tmp_path, capsys):
    path = tmp_path / "h.json"
    path.write_text(json.dumps({"r": 1, "p": 3, "coeffs": [["1"], ["2"], ["5"]]}))
    code, out, _ = run(capsys, "theta", "--input", str(path))
    assert code == 0 and json.loads(out)["reports"][0]["details"]["theta"] == [["2"], ["3"]]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    run(capsys, "beta-contiguity", "--r", "2", "--a", "3", "--b", "3", "--output", str(path), "--no-timing")
    assert json.loads(path.read_text())["reports"][0]["elapsed_ms"] is None


def test_suite_declaration_order_is_stable():
    assert suite(2, 1) == suite(2, 1)
    names = [t[0] for t in suite(2, 1)]
    assert names[0] == "weyl.capelli_check"
    assert sum(1 for t in suite(2, 1) if not t[2]) == 4


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "radonhgf.cli", "theta"], capture_output=True, text=True)
    assert out.returncode == 0


def test_verify_all_is_byte_stable(tmp_path):
    env_runs = []
    for threads in ("1", "2"):
        out = subprocess.run(
            [sys.executable, "-m", "radonhgf.cli", "verify-all", "--no-timing"],
            capture_output=True,
            text=True,
            env={**__import__("os").environ, "RADON_THREADS": threads},
        )
        assert out.returncode == 0, out.stderr[-2000:]
        env_runs.append(out.stdout)
    assert env_runs[0] == env_runs[1]


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("RADON_THREADS", "zero")
    assert run(capsys, "verify-all")[0] == 2
