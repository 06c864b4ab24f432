"""Scenario configuration documents.

A scenario is a JSON object. Every key is optional; missing keys take the
defaults below and unknown keys are rejected::

    {
      "periods": 30,
      "initial_share_h": 0.75,
      "initial_profit_scale": 1.0,
      "win_epsilon": 0.001,
      "firm_h": {"tech_exponent": 1.0},
      "firm_m": {"tech_exponent": 1.34375},
      "bank": {"loan_scale": 1.0, "money_exponent": 1.5},
      "aggression": {"alpha_protect": 0.1, "alpha_attack": 0.1, "bonus_in_loan_base": false},
      "tp": {"seed": null, "file": null},
      "batch": {"reps": 1000, "base_seed": 0},
      "calibration": {"m_exp_low": null, "m_exp_high": null, "target": 0.5, "tolerance": 0.03,
                      "reps_per_eval": 2000, "max_iterations": 40, "base_seed": 0},
      "sweep": {"center": null, "half_width": 1.0, "points": 9, "reps": 2000, "base_seed": 0}
    }

A null calibration bracket means [H exponent, H exponent + 2]; a null
sweep center means the scenario's M exponent.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .core import AggressionParams, BankParams, FirmParams, ParameterError, SimParams
from .tp import check_seed


class ConfigError(ValueError):
    """Invalid scenario document. ``key`` is the dotted path of the offending entry."""

    def __init__(self, key: str | None, message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass(frozen=True)
class BatchSettings:
    reps: int = 1000
    base_seed: int = 0


@dataclass(frozen=True)
class CalibrationSettings:
    m_exp_low: float | None = None
    m_exp_high: float | None = None
    target: float = 0.5
    tolerance: float = 0.03
    reps_per_eval: int = 2000
    max_iterations: int = 40
    base_seed: int = 0


@dataclass(frozen=True)
class SweepSettings:
    center: float | None = None
    half_width: float = 1.0
    points: int = 9
    reps: int = 2000
    base_seed: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    params: SimParams = field(default_factory=SimParams)
    tp_seed: int | None = None
    tp_file: str | None = None
    batch: BatchSettings = field(default_factory=BatchSettings)
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)

    def bracket(self) -> tuple[float, float]:
        h_exp = self.params.firm_h.tech_exponent
        low = self.calibration.m_exp_low if self.calibration.m_exp_low is not None else h_exp
        high = self.calibration.m_exp_high if self.calibration.m_exp_high is not None else h_exp + 2.0
        return low, high

    def sweep_center(self) -> float:
        if self.sweep.center is not None:
            return self.sweep.center
        return self.params.firm_m.tech_exponent


def serialize_config(config: ScenarioConfig) -> dict[str, Any]:
    p = config.params
    c = config.calibration
    s = config.sweep
    return {
        "periods": p.periods,
        "initial_share_h": p.initial_share_h,
        "initial_profit_scale": p.initial_profit_scale,
        "win_epsilon": p.win_epsilon,
        "firm_h": {"tech_exponent": p.firm_h.tech_exponent},
        "firm_m": {"tech_exponent": p.firm_m.tech_exponent},
        "bank": {"loan_scale": p.bank.loan_scale, "money_exponent": p.bank.money_exponent},
        "aggression": {
            "alpha_protect": p.aggression.alpha_protect,
            "alpha_attack": p.aggression.alpha_attack,
            "bonus_in_loan_base": p.aggression.bonus_in_loan_base,
        },
        "tp": {"seed": config.tp_seed, "file": config.tp_file},
        "batch": {"reps": config.batch.reps, "base_seed": config.batch.base_seed},
        "calibration": {
            "m_exp_low": c.m_exp_low,
            "m_exp_high": c.m_exp_high,
            "target": c.target,
            "tolerance": c.tolerance,
            "reps_per_eval": c.reps_per_eval,
            "max_iterations": c.max_iterations,
            "base_seed": c.base_seed,
        },
        "sweep": {
            "center": s.center,
            "half_width": s.half_width,
            "points": s.points,
            "reps": s.reps,
            "base_seed": s.base_seed,
        },
    }


def dumps_config(config: ScenarioConfig) -> str:
    return json.dumps(serialize_config(config), indent=2) + "\n"


def config_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON form of the resolved config."""
    canonical = json.dumps(serialize_config(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


_DEFAULTS = serialize_config(ScenarioConfig())

# keys whose values may be JSON null
_NULLABLE = {"tp.seed", "tp.file", "calibration.m_exp_low", "calibration.m_exp_high", "sweep.center"}
_INTEGER = {
    "periods", "tp.seed", "batch.reps", "batch.base_seed", "calibration.reps_per_eval",
    "calibration.max_iterations", "calibration.base_seed", "sweep.points", "sweep.reps",
    "sweep.base_seed",
}
_BOOLEAN = {"aggression.bonus_in_loan_base"}
_STRING = {"tp.file"}


def _check_value(key: str, value: Any) -> Any:
    if value is None:
        if key in _NULLABLE:
            return None
        raise ConfigError(key, "may not be null")
    if key in _BOOLEAN:
        if not isinstance(value, bool):
            raise ConfigError(key, f"must be true or false, got {value!r}")
        return value
    if key in _STRING:
        if not isinstance(value, str) or not value:
            raise ConfigError(key, f"must be a non-empty string, got {value!r}")
        return value
    if isinstance(value, bool):
        raise ConfigError(key, f"must be a number, got {value!r}")
    if key in _INTEGER:
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise ConfigError(key, f"must be an integer, got {value!r}")
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(key, f"must be a number, got {value!r}")
    return float(value)


def _merge(defaults: dict, document: dict, prefix: str = "") -> dict:
    merged = copy.deepcopy(defaults)
    for key, value in document.items():
        path = f"{prefix}{key}"
        if key not in defaults:
            raise ConfigError(path, "unknown key")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(path, "must be an object")
            merged[key] = _merge(defaults[key], value, path + ".")
        else:
            merged[key] = _check_value(path, value)
    return merged


def _build(section: str | None, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ParameterError as exc:
        key = f"{section}.{exc.field}" if section else exc.field
        raise ConfigError(key, str(exc).split(": ", 1)[-1]) from None


def _positive_int(key: str, value: int) -> None:
    if value < 1:
        raise ConfigError(key, f"must be >= 1, got {value}")


def _seed(key: str, value: int | None) -> None:
    if value is None:
        return
    try:
        check_seed(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from None


def parse_config(document: str | bytes | dict | None) -> ScenarioConfig:
    """Validate a scenario document (JSON text or an already-decoded object)."""
    if document is None:
        document = {}
    if isinstance(document, (str, bytes)):
        if not document.strip():
            document = {}
        else:
            try:
                document = json.loads(document)
            except json.JSONDecodeError as exc:
                raise ConfigError(None, f"malformed JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ConfigError(None, "scenario document must be a JSON object")
    d = _merge(_DEFAULTS, document)

    firm_h = _build("firm_h", FirmParams, label="H", **d["firm_h"])
    firm_m = _build("firm_m", FirmParams, label="M", **d["firm_m"])
    bank = _build("bank", BankParams, **d["bank"])
    aggression = _build("aggression", AggressionParams, **d["aggression"])
    params = _build(
        None, SimParams,
        periods=d["periods"], initial_share_h=d["initial_share_h"],
        initial_profit_scale=d["initial_profit_scale"], win_epsilon=d["win_epsilon"],
        firm_h=firm_h, firm_m=firm_m, bank=bank, aggression=aggression,
    )

    _seed("tp.seed", d["tp"]["seed"])
    if d["tp"]["seed"] is not None and d["tp"]["file"] is not None:
        raise ConfigError("tp", "give either tp.seed or tp.file, not both")

    b = d["batch"]
    _positive_int("batch.reps", b["reps"])
    _seed("batch.base_seed", b["base_seed"])

    c = d["calibration"]
    for key in ("reps_per_eval", "max_iterations"):
        _positive_int(f"calibration.{key}", c[key])
    _seed("calibration.base_seed", c["base_seed"])
    if not 0 < c["target"] < 1:
        raise ConfigError("calibration.target", f"must lie in (0, 1), got {c['target']}")
    if not c["tolerance"] > 0:
        raise ConfigError("calibration.tolerance", f"must be > 0, got {c['tolerance']}")
    for key in ("m_exp_low", "m_exp_high"):
        if c[key] is not None and not c[key] > 0:
            raise ConfigError(f"calibration.{key}", f"must be > 0, got {c[key]}")
    if c["m_exp_low"] is not None and c["m_exp_high"] is not None and not c["m_exp_low"] < c["m_exp_high"]:
        raise ConfigError("calibration.m_exp_high", "must be greater than calibration.m_exp_low")

    s = d["sweep"]
    for key in ("points", "reps"):
        _positive_int(f"sweep.{key}", s[key])
    _seed("sweep.base_seed", s["base_seed"])
    if not s["half_width"] >= 0:
        raise ConfigError("sweep.half_width", f"must be >= 0, got {s['half_width']}")
    if s["center"] is not None and not s["center"] > 0:
        raise ConfigError("sweep.center", f"must be > 0, got {s['center']}")

    return ScenarioConfig(
        params=params,
        tp_seed=d["tp"]["seed"],
        tp_file=d["tp"]["file"],
        batch=BatchSettings(**b),
        calibration=CalibrationSettings(**c),
        sweep=SweepSettings(**s),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def default_scenario_text() -> str:
    return resources.files("duelsim").joinpath("data/default_scenario.json").read_text(encoding="utf-8")


def default_config() -> ScenarioConfig:
    """The shipped default scenario."""
    return parse_config(default_scenario_text())
