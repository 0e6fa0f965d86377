import json
from fractions import Fraction as F

import pytest

from arithvol.cli import main
from arithvol.models import PairSpec


@pytest.fixture()
def toy_spec(tmp_path):
    spec = PairSpec(degree=1, arch_scale=F(1),
                    vanishing=((F(0), F(1, 4)),))
    path = tmp_path / "toy.json"
    path.write_text(spec.to_json())
    return str(path)


@pytest.fixture()
def plain_spec(tmp_path):
    spec = PairSpec(degree=1, arch_scale=F(1))
    path = tmp_path / "plain.json"
    path.write_text(spec.to_json())
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


def test_lemmas_command(tmp_path, capsys):
    out_path = tmp_path / "lemmas.json"
    code = main(["lemmas", "--instances", "5", "--seed", "7",
                 "--out", str(out_path)])
    assert code == 0
    data = json.loads(out_path.read_text())
    assert data["all_satisfied"]
    assert len(data["entries"]) == 5 * 4
    assert all(e["satisfied"] for e in data["entries"])


def test_lemmas_deterministic_bytes(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["lemmas", "--instances", "4", "--seed", "11",
                 "--out", str(p1)]) == 0
    assert main(["lemmas", "--instances", "4", "--seed", "11",
                 "--out", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_derivative_command(toy_spec, capsys):
    code, out = run_cli(["derivative", "--spec", toy_spec,
                         "--m-lo", "8", "--m-hi", "24"], capsys)
    assert code == 0
    data = json.loads(out)
    assert "relative_gap" in data["report"]
    assert data["report"]["oracle_value"] == pytest.approx(2.0)


def test_volume_command_json_and_csv(plain_spec, capsys, tmp_path):
    code, out = run_cli(["volume", "--spec", plain_spec,
                         "--m-lo", "8", "--m-hi", "24"], capsys)
    assert code == 0
    est = json.loads(out)["estimate"]
    assert abs(est["extrapolated"] - 2.0) < 0.15
    csv_path = tmp_path / "vol.csv"
    assert main(["volume", "--spec", plain_spec, "--m-lo", "8",
                 "--m-hi", "12", "--format", "csv",
                 "--out", str(csv_path)]) == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "m,normalized"
    assert lines[-2].startswith("extrapolated,")


def test_discrepancy_exit_codes(plain_spec, capsys):
    code, out = run_cli(["discrepancy", "--spec", plain_spec,
                         "--m-lo", "2", "--m-hi", "10", "--p", "2"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["all_satisfied"]
    assert set(data["reports"][0]) >= {"m", "lhs", "rhs", "bound", "slack",
                                       "satisfied", "constants_used"}
    # a negative majorizer margin shrinks the bound below the gap
    code, out = run_cli(["discrepancy", "--spec", plain_spec,
                         "--m-lo", "2", "--m-hi", "10", "--p", "2",
                         "--margin", "-4"], capsys)
    assert code == 2
    data = json.loads(out)
    assert any(not r["satisfied"] for r in data["reports"])


def test_body_command(plain_spec, capsys):
    code, out = run_cli(["body", "--spec", plain_spec, "--variant", "YM-full",
                         "--m-lo", "1", "--m-hi", "30"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["body"]["dim"] == 2
    assert len(data["body"]["vertices"]) == 4


def test_restricted_and_homogeneity(plain_spec, capsys):
    code, out = run_cli(["restricted", "--spec", plain_spec,
                         "--m-lo", "8", "--m-hi", "24", "--variant", "CL"],
                        capsys)
    assert code == 0
    assert abs(json.loads(out)["estimate"]["extrapolated"] - 1.0) < 0.1
    code, out = run_cli(["homogeneity", "--spec", plain_spec,
                         "--m-lo", "4", "--m-hi", "12",
                         "--scale-factor", "2"], capsys)
    assert code == 0
    assert json.loads(out)["report"]["identity_exact"]


def test_fe_estimates_inclusions(plain_spec, capsys):
    code, _ = run_cli(["fe", "--spec", plain_spec, "--m-lo", "2",
                       "--m-hi", "8", "--n", "2"], capsys)
    assert code == 0
    code, out = run_cli(["estimates2", "--spec", plain_spec,
                         "--m-lo", "8", "--m-hi", "20"], capsys)
    assert code == 0
    assert json.loads(out)["slacks_stable"]
    code, out = run_cli(["inclusions", "--spec", plain_spec,
                         "--m-lo", "4", "--m-hi", "6", "--epsilon", "1/10"],
                        capsys)
    assert code == 0


def test_enumerate_command(capsys, tmp_path):
    spec = PairSpec(degree=1, arch_scale=F(0), arch_mult=F(2))
    path = tmp_path / "s.json"
    path.write_text(spec.to_json())
    code, out = run_cli(["enumerate", "--spec", str(path), "--m", "1"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["count_lo"] == data["count_hi"] == 9
    assert [0, 0] in data["vectors"]


def test_malformed_spec_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"degree": nope}')
    code = main(["volume", "--spec", str(bad)])
    err = capsys.readouterr().err
    assert code == 1
    assert "line 1" in err and "column" in err


def test_missing_spec_exit_one(capsys):
    assert main(["volume"]) == 1
    assert "needs --spec" in capsys.readouterr().err


def test_round_trip_of_emitted_reports(plain_spec, capsys):
    code, out = run_cli(["discrepancy", "--spec", plain_spec,
                         "--m-lo", "2", "--m-hi", "4"], capsys)
    assert code == 0
    parsed = json.loads(out)
    again = json.dumps(parsed, sort_keys=True, indent=2) + "\n"
    assert again == out
