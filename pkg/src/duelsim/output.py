"""Flat-file writers.

Reals in CSV and ``.dat`` files are written with 17 significant digits
(``format(x, ".17g")``), which round-trips every double exactly. JSON
documents use Python's shortest round-trip float repr. Both are
deterministic, so identical runs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

from .core import Outcome, Trajectory
from .experiments import CalibrationResult, ShapeCensus, WinStats

TRAJECTORY_HEADER = (
    "period", "tp", "h_investment", "m_investment", "h_profit", "m_profit",
    "protect_bonus", "attack_bonus", "h_share", "m_share",
)
SWEEP_HEADER = ("m_exp", "m_win_rate", "stderr", "undecided_fraction")


def fmt(x: float) -> str:
    return format(x, ".17g")


def write_trajectory_csv(trajectory: Trajectory, path: str | Path) -> None:
    lines = [",".join(TRAJECTORY_HEADER)]
    for r in trajectory.records:
        lines.append(",".join([
            str(r.period), fmt(r.tp), fmt(r.h.investment), fmt(r.m.investment),
            fmt(r.h.profit), fmt(r.m.profit), fmt(r.protect_bonus), fmt(r.attack_bonus),
            fmt(r.h.market_share), fmt(r.m.market_share),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trajectory_csv(path: str | Path) -> list[dict[str, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRAJECTORY_HEADER:
            raise ValueError(f"{path}: not a trajectory CSV (unexpected header)")
        return [{k: float(v) for k, v in row.items()} for row in reader]


def write_plot_data(trajectory: Trajectory, directory: str | Path) -> tuple[Path, Path]:
    """Write ``shares.dat`` (period, H share) and ``tp.dat`` (period, TP)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    shares = directory / "shares.dat"
    tp = directory / "tp.dat"
    shares.write_text(
        "# period h_share\n" + "".join(f"{r.period} {fmt(r.h.market_share)}\n" for r in trajectory.records),
        encoding="utf-8",
    )
    tp.write_text(
        "# period tp\n" + "".join(f"{r.period} {fmt(r.tp)}\n" for r in trajectory.records),
        encoding="utf-8",
    )
    return shares, tp


def read_plot_data(path: str | Path) -> list[tuple[int, float]]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#") or not line.strip():
            continue
        period, value = line.split()
        rows.append((int(period), float(value)))
    return rows


def outcome_dict(outcome: Outcome) -> dict[str, Any]:
    return {
        "winner": outcome.winner,
        "final_share_h": outcome.final_share_h,
        "half_crossings": outcome.half_crossings,
    }


def summary_dict(trajectory: Trajectory, config_hash: str) -> dict[str, Any]:
    last = trajectory.records[-1]
    return {
        "config_hash": config_hash,
        "tp_source": trajectory.tp_source,
        "periods": len(trajectory.records),
        "winner": trajectory.outcome.winner,
        "final_share_h": last.h.market_share,
        "final_share_m": last.m.market_share,
        "half_crossings": trajectory.outcome.half_crossings,
    }


def win_stats_dict(stats: WinStats) -> dict[str, Any]:
    return {
        "n_reps": stats.n_reps,
        "h_wins": stats.h_wins,
        "m_wins": stats.m_wins,
        "undecided": stats.undecided,
        "m_win_rate": stats.m_win_rate,
        "standard_error": stats.standard_error,
    }


def census_dict(census: ShapeCensus) -> dict[str, Any]:
    # JSON object keys are strings
    return {
        "crossing_histogram": {str(k): v for k, v in census.crossing_histogram.items()},
        "by_winner": {str(k): dict(v) for k, v in census.by_winner.items()},
    }


def calibration_dict(result: CalibrationResult) -> dict[str, Any]:
    return {
        "balanced_m_exp": result.balanced_m_exp,
        "achieved_stats": win_stats_dict(result.achieved_stats),
        "iterations_used": result.iterations_used,
        "converged": result.converged,
        "bracket_history": [{"m_exp": x, "m_win_rate": r} for x, r in result.bracket_history],
    }


def write_json(document: dict[str, Any], path: str | Path) -> None:
    Path(path).write_text(json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8")


def write_sweep_csv(rows: Sequence[tuple[float, WinStats]], path: str | Path) -> None:
    lines = [",".join(SWEEP_HEADER)]
    for m_exp, stats in rows:
        lines.append(",".join([
            fmt(m_exp), fmt(stats.m_win_rate), fmt(stats.standard_error),
            fmt(stats.undecided / stats.n_reps),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
