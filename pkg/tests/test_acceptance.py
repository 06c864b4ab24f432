"""Exit criteria, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` to get one PASS/FAIL line per
criterion in the terminal summary.
"""

import dataclasses
import json
import math
import time

import numpy as np
import pytest
from scipy.special import expit

from duelsim.cli import main
from duelsim.config import default_config
from duelsim.core import AggressionParams, BankParams, FirmParams, SimParams, bank_loan, market_shares, profit, run_cycle
from duelsim.experiments import BatchSpec, centered_grid, estimate_win_rate, exponent_sweep
from duelsim.tp import TpProvider, write_tp_file


@pytest.fixture(scope="module")
def shipped():
    return default_config().params


@pytest.fixture(scope="module")
def calibration(tmp_path_factory, shipped):
    out = tmp_path_factory.mktemp("calibrate") / "calibration.json"
    h_exp = shipped.firm_h.tech_exponent
    start = time.perf_counter()
    status = main(["calibrate", "--low", repr(h_exp), "--high", repr(h_exp + 2.0),
                   "--reps", "2000", "--tolerance", "0.03", "--out", str(out)])
    elapsed = time.perf_counter() - start
    return status, json.loads(out.read_text()) if out.exists() else None, elapsed


@pytest.mark.acceptance(1, "winner-take-all: >= 99% of 1000 default runs decided, < 5 s")
def test_winner_take_all(shipped):
    assert shipped.periods == 30
    start = time.perf_counter()
    stats = estimate_win_rate(BatchSpec(shipped, 1000, base_seed=0))
    elapsed = time.perf_counter() - start
    print(f"decided {stats.decided_fraction:.4f} (H {stats.h_wins}, M {stats.m_wins}), {elapsed:.2f} s")
    assert shipped.win_epsilon == 1e-3
    assert stats.decided_fraction >= 0.99
    assert elapsed < 5.0


@pytest.mark.acceptance(2, "balance: calibrate [H, H+2] at 2000 reps gives M_exp > H_exp, |rate - 0.5| <= 0.03, < 30 s")
def test_balance_existence(calibration, shipped):
    status, result, elapsed = calibration
    print(f"balanced M exponent {result['balanced_m_exp']}, rate {result['achieved_stats']['m_win_rate']}, {elapsed:.2f} s")
    assert status == 0
    assert result["converged"]
    assert result["achieved_stats"]["n_reps"] == 2000
    assert result["balanced_m_exp"] > shipped.firm_h.tech_exponent
    assert abs(result["achieved_stats"]["m_win_rate"] - 0.5) <= 0.03
    assert elapsed < 30.0
    # the shipped scenario records this calibration's output
    assert result["balanced_m_exp"] == shipped.firm_m.tech_exponent


@pytest.mark.acceptance(3, "monotonicity: 9-point sweep of half-width 1 around the balance rises from <= 0.1 to >= 0.9")
def test_monotonicity(calibration, shipped):
    balanced = calibration[1]["balanced_m_exp"]
    rows = exponent_sweep(shipped, centered_grid(balanced, 1.0, 9), reps=2000, base_seed=0)
    for m_exp, stats in rows:
        print(f"  M_exp {m_exp:.5f}  rate {stats.m_win_rate:.4f}  se {stats.standard_error:.4f}")
    assert len(rows) == 9
    assert rows[0][1].m_win_rate <= 0.1
    assert rows[-1][1].m_win_rate >= 0.9
    for (_, a), (_, b) in zip(rows, rows[1:]):
        assert b.m_win_rate >= a.m_win_rate - 2.0 * math.hypot(a.standard_error, b.standard_error)


@pytest.mark.acceptance(4, "symmetry: symmetric firms, alpha = 0, 0.5/0.5 start keep h_share = 0.5 for 100 seeds")
def test_symmetry():
    params = SimParams(
        initial_share_h=0.5,
        firm_h=FirmParams("H", 1.2),
        firm_m=FirmParams("M", 1.2),
        aggression=AggressionParams(0.0, 0.0),
    )
    for seed in range(100):
        for record in run_cycle(params, TpProvider.seeded(seed)).records:
            assert abs(record.h.market_share - 0.5) <= 1e-12


def _recurrence_shares(params, tps):
    r = math.log(params.initial_share_h / (1.0 - params.initial_share_h))
    d = params.firm_h.tech_exponent - params.firm_m.tech_exponent
    shares = []
    for tp in tps:
        r = params.bank.money_exponent * r + d * math.log(tp)
        shares.append(float(expit(r)))
    return shares


@pytest.mark.acceptance(5, "closed form: alpha = 0 shares match the log-ratio recurrence within 1e-9 over 100 periods")
def test_closed_form_oracle():
    rng = np.random.default_rng(20061)
    worst = 0.0
    for i in range(20):
        params = SimParams(
            periods=100,
            initial_share_h=float(rng.uniform(0.05, 0.95)),
            initial_profit_scale=float(rng.uniform(0.1, 5.0)),
            firm_h=FirmParams("H", float(rng.uniform(0.2, 2.5))),
            firm_m=FirmParams("M", float(rng.uniform(0.2, 2.5))),
            bank=BankParams(float(rng.uniform(0.2, 5.0)), (0.5, 1.0, 1.5)[i % 3]),
            aggression=AggressionParams(0.0, 0.0),
        )
        traj = run_cycle(params, TpProvider.seeded(int(rng.integers(2**63))))
        for got, want in zip(traj.h_shares, _recurrence_shares(params, traj.tp_values)):
            worst = max(worst, abs(got - want))
    print(f"max deviation {worst:.3e}")
    assert worst <= 1e-9


@pytest.mark.acceptance(6, "determinism and replay: byte-identical outputs for same seed; TP replay reproduces the CSV")
def test_determinism_and_replay(tmp_path):
    for name in ("a", "b"):
        assert main(["run", "--seed", "2006", "--out", str(tmp_path / name)]) == 0
        assert main(["batch", "--reps", "200", "--seed", "2006", "--out", str(tmp_path / name / "batch.json")]) == 0
    for name in ("trajectory.csv", "summary.json", "shares.dat", "tp.dat", "batch.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    lines = (tmp_path / "a" / "trajectory.csv").read_text().splitlines()[1:]
    write_tp_file([float(line.split(",")[1]) for line in lines], tmp_path / "tp.txt")
    assert main(["replay", "--tp-file", str(tmp_path / "tp.txt"), "--out", str(tmp_path / "replay")]) == 0
    assert (tmp_path / "replay" / "trajectory.csv").read_bytes() == (tmp_path / "a" / "trajectory.csv").read_bytes()


@pytest.mark.acceptance(7, "unit equations: profit, bank_loan, market_shares reproduce the worked examples exactly")
def test_unit_equations():
    assert profit(1.0, 7.3, 5.0) == 5.0
    assert profit(4.0, 0.5, 3.0) == 6.0
    assert profit(2.0, 2.0, 1.5) == 6.0
    assert bank_loan(9.0, BankParams(1.0, 0.5)) == 3.0
    assert bank_loan(0.0, BankParams(5.0, 1.0)) == 0.0
    assert bank_loan(4.0, BankParams(2.0, 1.0)) == 8.0
    assert market_shares(3.0, 1.0, 0.0, 0.0, (0.5, 0.5)) == (0.75, 0.25)
    assert market_shares(2.0, 1.0, 0.5, 0.5, (0.5, 0.5)) == (0.5, 0.5)
    assert market_shares(0.0, 0.0, 0.0, 0.0, (0.6, 0.4)) == (0.6, 0.4)


@pytest.mark.acceptance(8, "scale invariance: loan_scale x10 with money_exponent 1 leaves shares unchanged on 10 seeds")
def test_scale_invariance(shipped):
    base = dataclasses.replace(shipped, bank=BankParams(1.0, 1.0))
    scaled = dataclasses.replace(shipped, bank=BankParams(10.0, 1.0))
    for seed in range(10):
        a = run_cycle(base, TpProvider.seeded(seed)).records
        b = run_cycle(scaled, TpProvider.seeded(seed)).records
        for ra, rb in zip(a, b):
            assert abs(ra.h.market_share - rb.h.market_share) <= 1e-12
            assert abs(ra.m.market_share - rb.m.market_share) <= 1e-12
