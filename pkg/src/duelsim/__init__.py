"""Seedable simulator of a defender/challenger duopoly under stochastic technical progress."""

from .core import (
    AggressionParams,
    BankParams,
    DuelState,
    FirmParams,
    FirmState,
    Outcome,
    ParameterError,
    PeriodRecord,
    SimParams,
    Trajectory,
    attack_bonus,
    bank_loan,
    classify_outcome,
    init_state,
    market_shares,
    profit,
    protect_bonus,
    run_cycle,
    step,
)
from .experiments import (
    BatchSpec,
    BracketError,
    CalibrationResult,
    CalibrationSpec,
    ShapeCensus,
    WinStats,
    estimate_win_rate,
    exponent_sweep,
    find_balanced_exponent,
    run_batch,
    shape_census,
)
from .tp import SequenceExhaustedError, TpProvider, TpValidationError, load_tp_file, tp_next

__version__ = "0.1.0"
