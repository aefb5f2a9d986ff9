import json
import subprocess
import sys

import pytest

from leaguerank.cli import main


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def generated(tmp_path):
    out = tmp_path / "season.csv"
    assert run("generate", "--teams", 30, "--delta", 0.3, "--home-adv", 0, "--frac", 1.0, "--seed", 7, "--out", out) == 0
    return out


def test_generate_is_byte_identical(tmp_path, generated):
    again = tmp_path / "again.csv"
    assert run("generate", "--teams", 30, "--delta", 0.3, "--home-adv", 0, "--frac", 1.0, "--seed", 7, "--out", again) == 0
    assert generated.read_bytes() == again.read_bytes()
    assert (tmp_path / "season.fitness.csv").read_bytes() == (tmp_path / "again.fitness.csv").read_bytes()
    assert generated.read_text().splitlines()[0] == "order,home,away,home_won"
    assert len(generated.read_text().splitlines()) == 1 + 435


def test_rank_two_team_fixture(tmp_path, capsys):
    path = tmp_path / "pair.csv"
    path.write_text("order,home,away,home_won\n0,0,1,0\n")
    assert run("rank", "--input", path, "--method", "pagerank") == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "team,method,score,rank"
    scores = [float(r.split(",")[2]) for r in rows[1:]]
    assert scores[0] == pytest.approx(0.350877, abs=1e-6)
    assert scores[1] == pytest.approx(0.649123, abs=1e-6)


def test_round_trip(tmp_path, generated, capsys):
    scores = tmp_path / "scores.csv"
    assert run("rank", "--input", generated, "--out", scores) == 0
    assert run("evaluate", "--scores", scores, "--truth", tmp_path / "season.fitness.csv", "--format", "json") == 0
    table = json.loads(capsys.readouterr().out)
    assert set(table) == {"WinRatio", "PageRank", "BiPageRank"}
    assert all(-1 <= v["kendall"] <= 1 for v in table.values())
    assert run("evaluate", "--scores", scores, "--truth-results", generated) == 0
    fits = tmp_path / "fits.json"
    curve = tmp_path / "curve.csv"
    assert run("calibrate", "--input", generated, "--out", fits, "--curve-out", curve) == 0
    (entry,) = json.loads(fits.read_text())
    assert entry["simplified"]["n_params"] == 2 and entry["full"]["n_params"] == 32
    assert entry["selected"] in ("simplified", "full")
    assert curve.read_text().startswith("season,dw_center,rate,sem,count\n")


def test_rank_json(tmp_path, generated, capsys):
    assert run("rank", "--input", generated, "--method", "bipagerank", "--format", "json") == 0
    data = json.loads(capsys.readouterr().out)
    assert list(data) == ["BiPageRank"] and len(data["BiPageRank"]["ranks"]) == 30


SPEC = """base_seed = 1
realizations = 3
metrics = ["kendall"]
[fixed]
n_teams = 10
home_adv = 0.0
[grid]
delta = [0.1, 0.5]
frac_played = [0.5]
"""


def test_sweep_threads_identical(tmp_path):
    spec = tmp_path / "fig3.toml"
    spec.write_text(SPEC)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("sweep", "--spec", spec, "--seed", 3, "--out", a) == 0
    assert run("sweep", "--spec", spec, "--seed", 3, "--threads", 2, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "delta,frac_played,algorithm,metric,mean,sem,n"


def test_perturb_command(tmp_path):
    spec = tmp_path / "fig5.toml"
    spec.write_text('realizations = 2\n[fixed]\nn_teams = 8\ndelta = 0.25\nmode = "revert"\n[grid]\neta = [0.0, 1.0]\n')
    out = tmp_path / "p.csv"
    assert run("perturb", "--spec", spec, "--seed", 1, "--out", out) == 0
    assert out.read_text().splitlines()[0] == "eta,algorithm,metric,mean,sem,n"


def test_real_eval_command(tmp_path, capsys):
    data = tmp_path / "league.csv"
    lines = ["season,date,home,away,outcome"]
    teams = ["a", "b", "c", "d"]
    k = 0
    for season in ("2001", "2002"):
        for i in teams:
            for j in teams:
                if i != j:
                    lines.append(f"{season},{k},{i},{j},{'H' if i < j else 'A'}")
                    k += 1
    data.write_text("\n".join(lines) + "\n")
    out = tmp_path / "real.csv"
    assert run("real-eval", "--input", data, "--p-axis", "0.5,1.0", "--out", out) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "league,P,algorithm,tau_mean,n_seasons"
    assert rows[1].startswith("league,0.5,WinRatio,")
    assert "threshold_P" in capsys.readouterr().err


def test_missing_seed_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as info:
        run("generate", "--out", tmp_path / "x.csv")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run("sweep", "--spec", "x.toml")
    assert info.value.code == 2


def test_parse_failure_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("season,date,home,away,outcome\nS,1,a,b,H\nS,2,a,a,H\n")
    assert run("calibrate", "--input", bad) == 1
    err = capsys.readouterr().err.strip()
    assert err.count("\n") == 0 and ":3:" in err
    assert run("rank", "--input", tmp_path / "missing.csv") == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "leaguerank", "generate", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "--seed" in proc.stdout
