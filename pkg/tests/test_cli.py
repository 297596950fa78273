"""CLI behavior: reports, exit codes, table rendering, determinism."""

import json
import math

import pytest

from minehunt import boxes, cli


def _run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _strip_timing(text: str) -> dict:
    report = json.loads(text)
    report.pop("timing_seconds")
    return report


def test_verify_classical_report(capsys):
    code, out, _ = _run(capsys, "verify-classical", "--game", "dmh")
    report = json.loads(out)
    assert code == 0
    assert report["command"] == "verify-classical"
    assert report["config"] == {"game": "dmh", "bits": 1}
    assert report["results"]["vertex_count_formula"] == 88
    assert report["results"]["safe_vertex_count"] == 5
    assert report["results"]["max_payoff"] == "0"
    assert report["results"]["bound_holds"] is True
    assert "version" in report


def test_verify_classical_variant_game(capsys):
    code, out, _ = _run(capsys, "verify-classical", "--game", "dmh-prime")
    report = json.loads(out)
    assert code == 0
    assert report["results"]["safe_vertex_count"] == 9
    assert "-1/4" in report["results"]["safe_payoffs"]


def test_verify_classical_two_bits(capsys):
    code, out, _ = _run(capsys, "verify-classical", "--bits", "2")
    report = json.loads(out)
    assert code == 0  # the one-bit bound claim does not apply at 2 bits
    assert report["results"]["max_payoff"] == "1/4"
    assert report["results"]["bound_holds"] is False


def test_verify_classical_table(capsys):
    code, out, _ = _run(capsys, "verify-classical", "--table")
    assert code == 0
    assert "max payoff" in out
    assert "[0, 3, 0, 3]" in out


def test_bad_bits_is_a_usage_error(capsys):
    code, _, err = _run(capsys, "verify-classical", "--bits", "7")
    assert code == 1
    assert "bits" in err


def test_bad_game_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify-classical", "--game", "chess"])
    assert exc.value.code == 1


def test_report_determinism(capsys):
    _, first, _ = _run(capsys, "verify-classical")
    _, second, _ = _run(capsys, "verify-classical")
    assert _strip_timing(first) == _strip_timing(second)


def test_sweep_shard_with_records(capsys, tmp_path):
    records = tmp_path / "rec.jsonl"
    code, out, _ = _run(
        capsys, "sweep-wirings", "--range", "3746816..3747072",
        "--out", str(records),
    )
    report = json.loads(out)
    assert code == 0
    assert report["results"]["total"] == 256
    assert report["results"]["positive"] == 32
    assert report["results"]["counterexamples"] == []
    assert report["results"]["max_payoff"] == "1/8"
    lines = records.read_text().splitlines()
    assert len(lines) == 32
    assert {json.loads(line)["game"] for line in lines} == {"dmh"}


def test_sweep_range_validation(capsys):
    code, _, err = _run(capsys, "sweep-wirings", "--range", "50..10")
    assert code == 1
    code, _, err = _run(capsys, "sweep-wirings", "--range", "10")
    assert code == 1
    assert "LO..HI" in err


def test_certify_pr_box(capsys, tmp_path):
    path = tmp_path / "pr.json"
    path.write_text(json.dumps(boxes.box_to_json(boxes.pr_box())))
    code, out, _ = _run(capsys, "certify-box", str(path))
    report = json.loads(out)
    assert code == 0
    assert report["results"]["hardy"] == "1/2"
    assert report["results"]["cabello"] == {"gain": "1/2", "loss": "0"}
    assert report["results"]["chsh"] == "4"
    assert report["results"]["local"]["inside"] is False
    assert len(report["results"]["local"]["separating_functional"]) == 16


def test_certify_uniform_box(capsys, tmp_path):
    path = tmp_path / "uniform.json"
    path.write_text(json.dumps(boxes.box_to_json(boxes.uniform_box())))
    code, out, _ = _run(capsys, "certify-box", str(path))
    report = json.loads(out)
    assert code == 0
    assert report["results"]["hardy"] is None
    assert report["results"]["local"]["inside"] is True


def test_certify_box_table(capsys, tmp_path):
    path = tmp_path / "pr.json"
    path.write_text(json.dumps(boxes.box_to_json(boxes.pr_box())))
    code, out, _ = _run(capsys, "certify-box", str(path), "--table")
    assert code == 0
    assert "hardy" in out and "local" in out


def test_certify_malformed_box(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = _run(capsys, "certify-box", str(path))
    assert code == 1
    assert "cannot read box file" in err


def test_certify_missing_box(capsys, tmp_path):
    code, _, err = _run(capsys, "certify-box", str(tmp_path / "absent.json"))
    assert code == 1


def test_certify_signaling_box(capsys, tmp_path):
    entries = [0.25] * 16
    entries[boxes.index(0, 0, 1, 0)] = 0.4
    entries[boxes.index(0, 1, 1, 0)] = 0.1
    path = tmp_path / "sig.json"
    path.write_text(json.dumps({"entries": entries, "exact": False}))
    code, _, err = _run(capsys, "certify-box", str(path))
    assert code == 1
    assert "no-signaling" in err
    assert "marginal" in err


def test_quantum_report(capsys):
    code, out, _ = _run(
        capsys, "quantum", "--theta", str(math.pi / 8),
        "--grid", "3", "--restarts", "1",
    )
    report = json.loads(out)
    assert code == 0
    res = report["results"]
    assert len(res["hardy_curve"]) == 3
    assert res["hardy_curve"][0]["h0"] == 0.0
    assert abs(res["hardy_global"]["h0"] - 0.09016994374947425) < 1e-9
    assert res["maximally_entangled"] is False
    assert abs(res["seesaw"]["best_payoff"] - res["hardy_target"]) < 1e-5
    assert res["seesaw"]["best_strategy"]["state"][0][1] == 0.0


def test_quantum_theta_validation(capsys):
    code, _, err = _run(capsys, "quantum", "--theta", "2.0", "--restarts", "1")
    assert code == 1
    assert "theta" in err


def test_quantum_table(capsys):
    code, out, _ = _run(
        capsys, "quantum", "--theta", "0.0", "--grid", "2", "--restarts", "1",
        "--table",
    )
    assert code == 0
    assert "seesaw best payoff" in out


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
