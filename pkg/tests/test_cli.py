import csv
import json

import pytest

from duelsim.cli import main
from duelsim.core import SimParams, run_cycle
from duelsim.output import TRAJECTORY_HEADER, SWEEP_HEADER, read_plot_data, read_trajectory_csv
from duelsim.tp import TpProvider, write_tp_file


def first_seed_won_by(winner):
    return next(s for s in range(1000) if run_cycle(SimParams(), TpProvider.seeded(s)).outcome.winner == winner)


def files_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.fixture
def symmetric_config(tmp_path):
    path = tmp_path / "symmetric.json"
    path.write_text(json.dumps({
        "initial_share_h": 0.5,
        "firm_m": {"tech_exponent": 1.0},
        "aggression": {"alpha_protect": 0, "alpha_attack": 0},
    }))
    return path


def test_run_writes_all_outputs(tmp_path):
    assert main(["run", "--seed", "5", "--out", str(tmp_path / "r")]) == 0
    out = tmp_path / "r"
    assert sorted(p.name for p in out.iterdir()) == ["shares.dat", "summary.json", "tp.dat", "trajectory.csv"]
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "period,tp,h_investment,m_investment,h_profit,m_profit,protect_bonus,attack_bonus,h_share,m_share"
    assert tuple(header.split(",")) == TRAJECTORY_HEADER
    rows = read_trajectory_csv(out / "trajectory.csv")
    assert [int(r["period"]) for r in rows] == list(range(1, 31))
    summary = json.loads((out / "summary.json").read_text())
    assert summary["tp_source"] == "seed:5"
    assert len(summary["config_hash"]) == 64


def test_run_twice_byte_identical(tmp_path):
    main(["run", "--seed", "123", "--out", str(tmp_path / "a")])
    main(["run", "--seed", "123", "--out", str(tmp_path / "b")])
    assert files_bytes(tmp_path / "a") == files_bytes(tmp_path / "b")


def test_replay_reproduces_trajectory(tmp_path):
    main(["run", "--seed", "77", "--out", str(tmp_path / "a")])
    with open(tmp_path / "a" / "trajectory.csv", newline="") as fh:
        tps = [float(row["tp"]) for row in csv.DictReader(fh)]
    write_tp_file(tps, tmp_path / "tp.txt")
    assert main(["replay", "--tp-file", str(tmp_path / "tp.txt"), "--out", str(tmp_path / "b")]) == 0
    for name in ("trajectory.csv", "shares.dat", "tp.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    summary = json.loads((tmp_path / "b" / "summary.json").read_text())
    assert summary["tp_source"] == f"file:{tmp_path / 'tp.txt'}"


@pytest.mark.parametrize("winner", ["H", "M"])
def test_summary_winner_field(tmp_path, winner):
    seed = first_seed_won_by(winner)
    main(["run", "--seed", str(seed), "--out", str(tmp_path)])
    assert json.loads((tmp_path / "summary.json").read_text())["winner"] == winner


def test_plot_data_files(tmp_path):
    main(["run", "--seed", "8", "--out", str(tmp_path / "o"), "--plot-data", str(tmp_path / "plots")])
    shares = read_plot_data(tmp_path / "plots" / "shares.dat")
    tps = read_plot_data(tmp_path / "plots" / "tp.dat")
    assert len(shares) == len(tps) == 30
    assert [p for p, _ in shares] == list(range(1, 31))
    assert all(0.0 <= v <= 1.0 for _, v in shares)
    assert all(1.0 <= v <= 10.0 for _, v in tps)
    assert not (tmp_path / "o" / "shares.dat").exists()


def test_periods_override(tmp_path):
    main(["run", "--seed", "1", "--periods", "100", "--out", str(tmp_path)])
    assert len(read_plot_data(tmp_path / "tp.dat")) == 100


def test_tp_source_from_config(tmp_path):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"tp": {"seed": 5}}))
    main(["run", "--config", str(config), "--out", str(tmp_path / "a")])
    main(["run", "--seed", "5", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_run_needs_a_tp_source(tmp_path, capsys):
    assert main(["run", "--out", str(tmp_path)]) == 1
    assert "TP source" in capsys.readouterr().err


def test_run_rejects_two_tp_sources(tmp_path):
    write_tp_file([2.0] * 30, tmp_path / "tp.txt")
    assert main(["run", "--seed", "1", "--tp-file", str(tmp_path / "tp.txt"), "--out", str(tmp_path / "o")]) == 1


def test_short_tp_file_reports_exhaustion(tmp_path, capsys):
    write_tp_file([2.0] * 10, tmp_path / "tp.txt")
    assert main(["replay", "--tp-file", str(tmp_path / "tp.txt"), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "10 values, 30 needed" in err and "tp.txt" in err
    assert not (tmp_path / "o").exists()


def test_bad_tp_file_names_line(tmp_path, capsys):
    (tmp_path / "tp.txt").write_text("2\n3\n12\n")
    assert main(["replay", "--tp-file", str(tmp_path / "tp.txt"), "--out", str(tmp_path / "o")]) == 1
    assert "line 3" in capsys.readouterr().err


def test_invalid_config_exit_code(tmp_path, capsys):
    config = tmp_path / "c.json"
    config.write_text(json.dumps({"periods": 0}))
    assert main(["run", "--seed", "1", "--config", str(config), "--out", str(tmp_path / "o")]) == 1
    assert "periods" in capsys.readouterr().err
    config.write_text(json.dumps({"bank": {"money_exp": 1}}))
    assert main(["run", "--seed", "1", "--config", str(config), "--out", str(tmp_path / "o")]) == 1


def test_usage_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["run", "--seed", "x", "--out", str(tmp_path)])
    assert info.value.code == 1


def test_io_error_exit_code(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--seed", "1", "--out", str(blocker / "sub")]) == 2
    assert main(["run", "--seed", "1", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2


def test_batch_single_rep(tmp_path):
    out = tmp_path / "batch.json"
    assert main(["batch", "--reps", "1", "--seed", "4", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["win_stats"]["n_reps"] == 1
    assert sum(doc["shape_census"]["crossing_histogram"].values()) == 1


def test_batch_symmetric_all_undecided(tmp_path, symmetric_config):
    out = tmp_path / "batch.json"
    main(["batch", "--config", str(symmetric_config), "--reps", "30", "--out", str(out)])
    stats = json.loads(out.read_text())["win_stats"]
    assert stats["undecided"] == 30 and stats["h_wins"] == stats["m_wins"] == 0


def test_calibrate_and_rerun_identical(tmp_path):
    args = ["calibrate", "--reps", "200", "--tolerance", "0.05"]
    assert main(args + ["--out", str(tmp_path / "a.json")]) == 0
    assert main(args + ["--out", str(tmp_path / "b.json")]) == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    doc = json.loads((tmp_path / "a.json").read_text())
    assert doc["converged"] is True
    assert doc["balanced_m_exp"] > SimParams().firm_h.tech_exponent
    assert doc["bracket_history"][0] == {"m_exp": 1.0, "m_win_rate": 0.0}
    assert set(doc["achieved_stats"]) == {"n_reps", "h_wins", "m_wins", "undecided", "m_win_rate", "standard_error"}


def test_calibrate_bad_bracket(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert main(["calibrate", "--low", "1.6", "--high", "3", "--reps", "100", "--out", str(out)]) == 1
    assert "does not straddle" in capsys.readouterr().err
    assert not out.exists()


def test_sweep_single_row(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--grid", "1.3", "--reps", "50", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SWEEP_HEADER) == "m_exp,m_win_rate,stderr,undecided_fraction"
    assert len(lines) == 2 and len(lines[1].split(",")) == 4


def test_sweep_default_grid(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--reps", "100", "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 9
    assert float(rows[0]["m_win_rate"]) <= 0.1 and float(rows[-1]["m_win_rate"]) >= 0.9


def test_sweep_unsorted_grid(tmp_path):
    assert main(["sweep", "--grid", "1.5,1.2", "--reps", "5", "--out", str(tmp_path / "s.csv")]) == 1


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "duelsim", "run", "--seed", "3", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith("winner: ")
