import json
import subprocess
import sys

import pytest

from gjzeta import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_main_theorem_pass_and_fail(capsys):
    code, out, _ = run(["verify", "main-theorem", "--chars", "quad,triv"], capsys)
    assert code == 0 and "equal: True" in out
    code, out, _ = run(["verify", "main-theorem", "--chars", "quad,triv", "--corrupt", "--format", "json"], capsys)
    assert code == 1
    data = json.loads(out)
    assert data["status"] == "fail"
    assert data["first_mismatch"]["coefficient"] == 2


@pytest.mark.parametrize("argv,code", [
    (["verify", "main-theorem", "--p", "4"], 2),
    (["verify", "main-theorem", "--chars", "cubic,triv"], 2),
    (["verify", "main-theorem", "--chars", "quad,triv", "--strategy", "brute", "--max-cosets", "1"], 3),
    (["compute", "whittaker", "--chars", "triv,triv", "--g", "1,p^-12;0,1"], 4),
    (["compute", "newform", "--chars", "quad,triv", "--max-level", "0"], 1),
    (["compute", "beta", "--chars", "quad,triv"], 2),
    (["verify", "propagation", "--n", "3", "--alphas", "1/2,1/3,1/5"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert run(argv, capsys)[0] == code


def test_json_is_deterministic(capsys, tmp_path):
    args = ["verify", "phi-invariance", "--chars", "quad,quad", "--samples", "10", "--seed", "7", "--format", "json"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b
    assert json.loads(a)["seed"] == 7


def test_config_hash_ignores_presentation(capsys):
    base = ["verify", "gj-spherical", "--T", "2", "--format", "json"]
    _, a, _ = run(base, capsys)
    _, b, _ = run(base + ["--threads", "2"], capsys)
    assert json.loads(a)["config_hash"] == json.loads(b)["config_hash"]
    _, c, _ = run(["verify", "gj-spherical", "--T", "3", "--format", "json"], capsys)
    assert json.loads(a)["config_hash"] != json.loads(c)["config_hash"]


def test_config_file_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "session.json"
    cfg.write_text(json.dumps({"p": 2, "chars": "quad,triv", "T": 2}))
    code, out, _ = run(["verify", "main-theorem", "--config", str(cfg), "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["config"]["p"] == 2 and data["config"]["T"] == 2
    code, out, _ = run(["verify", "main-theorem", "--config", str(cfg), "--p", "3", "--format", "json"], capsys)
    assert json.loads(out)["config"]["p"] == 3


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert run(["verify", "main-theorem", "--config", str(bad)], capsys)[0] == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(["verify", "main-theorem", "--config", str(broken)], capsys)[0] == 2


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("GJZETA_THREADS", "2")
    code, out, _ = run(["verify", "conductor", "--p", "3", "--format", "json"], capsys)
    assert code == 0
    monkeypatch.setenv("GJZETA_THREADS", "many")
    assert run(["verify", "conductor", "--p", "3"], capsys)[0] == 2


def test_out_directory(capsys, tmp_path):
    code, _, _ = run(["verify", "rs-nn1", "--format", "csv", "--out", str(tmp_path)], capsys)
    assert code == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["verify-rs-nn1.csv", "verify-rs-nn1.json", "verify-rs-nn1.txt"]
    assert json.loads((tmp_path / "verify-rs-nn1.json").read_text())["status"] == "pass"


def test_timings_only_on_request(capsys):
    _, a, _ = run(["verify", "gj-spherical", "--T", "2", "--format", "json"], capsys)
    assert "runtime_ms" not in a
    _, b, _ = run(["verify", "gj-spherical", "--T", "2", "--format", "json", "--timings"], capsys)
    assert "runtime_ms" in b


def test_compute_objects(capsys):
    code, out, _ = run(["compute", "l-factor", "--chars", "triv,triv", "--T", "3", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["coefficients"][0] == "1"
    code, out, _ = run(["compute", "newform", "--chars", "quad,quad", "--format", "json", "--dump-newform"], capsys)
    data = json.loads(out)
    assert data["conductor"] == 2 and data["table"]
    code, out, _ = run(["compute", "whittaker", "--chars", "triv,triv", "--lam", "1,0", "--format", "json"], capsys)
    assert code == 0 and "a1" in json.loads(out)["value"]
    code, out, _ = run(["compute", "beta", "--chars", "triv,triv", "--g", "p,0;0,p", "--format", "json"], capsys)
    assert json.loads(out)["value"] == "a1*a2"


def test_parse_matrix():
    assert cli.parse_matrix("p^2,1;0,p^-1", 3)[0][0] == 9
    with pytest.raises(cli.ConfigError):
        cli.parse_matrix("1,2;3", 3)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "gjzeta.cli", "verify", "gj-spherical", "--T", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "equal: True" in proc.stdout
