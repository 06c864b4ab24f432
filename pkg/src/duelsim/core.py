"""Defender (H) versus challenger (M) competition under stochastic technical progress.

Each period:

1. the banker lends each firm ``loan_scale * previous_profit ** money_exponent``
   and the loan is the firm's whole investment;
2. each firm earns ``tp ** tech_exponent * investment``;
3. M may receive two extra amounts, each a fraction of its current profit:
   "protect" when its share rose over the last two transitions, "attack"
   when H's share fell over the last transition;
4. shares are H's profit and M's profit plus bonuses, normalized to sum to one.

Profits are carried as natural logs. With a money exponent above one the
log-profits grow geometrically and the money values leave the double range
within a few dozen periods, while the log gap between the firms (which is
all the shares depend on) stays finite. Money fields in the period records
are ``exp`` of the log state and may therefore read ``0.0`` or ``inf`` on
long or strongly diverging runs; shares are always exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .tp import TP_MAX, TP_MIN, TpProvider

# Shipped scenario. The challenger exponent is the balanced value found by
# ``find_balanced_exponent`` on this scenario with bracket [1, 3],
# 2000 replications, base seed 0 and tolerance 0.03.
DEFAULT_H_EXPONENT = 1.0
DEFAULT_M_EXPONENT = 1.34375
DEFAULT_MONEY_EXPONENT = 1.5

WINNERS = ("H", "M", "none")


class ParameterError(ValueError):
    """Invalid model parameter. ``field`` names the offending parameter."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _positive(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(name, f"must be a number, got {value!r}")
    if not math.isfinite(value) or value <= 0:
        raise ParameterError(name, f"must be a finite number > 0, got {value!r}")
    return float(value)


def _nonnegative(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(name, f"must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0:
        raise ParameterError(name, f"must be a finite number >= 0, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class FirmParams:
    label: str
    tech_exponent: float

    def __post_init__(self):
        if self.label not in ("H", "M"):
            raise ParameterError("label", f"must be 'H' or 'M', got {self.label!r}")
        object.__setattr__(self, "tech_exponent", _positive("tech_exponent", self.tech_exponent))


@dataclass(frozen=True)
class BankParams:
    loan_scale: float = 1.0
    money_exponent: float = DEFAULT_MONEY_EXPONENT

    def __post_init__(self):
        object.__setattr__(self, "loan_scale", _positive("loan_scale", self.loan_scale))
        object.__setattr__(self, "money_exponent", _positive("money_exponent", self.money_exponent))


@dataclass(frozen=True)
class AggressionParams:
    """Challenger bonus coefficients.

    ``bonus_in_loan_base`` routes the bonuses into the profit the banker
    lends against next period. Off by default: the extra money comes from
    outside the bank circuit and only enters M's market-share numerator.
    """

    alpha_protect: float = 0.1
    alpha_attack: float = 0.1
    bonus_in_loan_base: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha_protect", _nonnegative("alpha_protect", self.alpha_protect))
        object.__setattr__(self, "alpha_attack", _nonnegative("alpha_attack", self.alpha_attack))
        if not isinstance(self.bonus_in_loan_base, bool):
            raise ParameterError("bonus_in_loan_base", "must be true or false")


@dataclass(frozen=True)
class SimParams:
    periods: int = 30
    initial_share_h: float = 0.75
    initial_profit_scale: float = 1.0
    firm_h: FirmParams = field(default_factory=lambda: FirmParams("H", DEFAULT_H_EXPONENT))
    firm_m: FirmParams = field(default_factory=lambda: FirmParams("M", DEFAULT_M_EXPONENT))
    bank: BankParams = field(default_factory=BankParams)
    aggression: AggressionParams = field(default_factory=AggressionParams)
    win_epsilon: float = 1e-3

    def __post_init__(self):
        if isinstance(self.periods, bool) or not isinstance(self.periods, int) or self.periods < 1:
            raise ParameterError("periods", f"must be an integer >= 1, got {self.periods!r}")
        share = self.initial_share_h
        if isinstance(share, bool) or not isinstance(share, (int, float)) or not 0 < share < 1:
            raise ParameterError("initial_share_h", f"must lie strictly between 0 and 1, got {share!r}")
        object.__setattr__(self, "initial_share_h", float(share))
        object.__setattr__(
            self, "initial_profit_scale", _positive("initial_profit_scale", self.initial_profit_scale)
        )
        eps = self.win_epsilon
        if isinstance(eps, bool) or not isinstance(eps, (int, float)) or not 0 < eps < 0.5:
            raise ParameterError("win_epsilon", f"must lie strictly between 0 and 0.5, got {eps!r}")
        object.__setattr__(self, "win_epsilon", float(eps))
        if self.firm_h.label != "H" or self.firm_m.label != "M":
            raise ParameterError("firm_h", "firm_h must be labelled 'H' and firm_m 'M'")

    def with_m_exponent(self, value: float) -> "SimParams":
        return replace(self, firm_m=FirmParams("M", value))


@dataclass(frozen=True, slots=True)
class FirmState:
    investment: float
    profit: float
    market_share: float


@dataclass(frozen=True, slots=True)
class PeriodRecord:
    period: int
    tp: float
    h: FirmState
    m: FirmState
    protect_bonus: float
    attack_bonus: float


@dataclass(frozen=True)
class Outcome:
    winner: str
    final_share_h: float
    half_crossings: int


@dataclass(frozen=True)
class Trajectory:
    params: SimParams
    tp_source: str
    records: tuple[PeriodRecord, ...]
    outcome: Outcome

    @property
    def tp_values(self) -> list[float]:
        return [r.tp for r in self.records]

    @property
    def h_shares(self) -> list[float]:
        return [r.h.market_share for r in self.records]


@dataclass(frozen=True)
class DuelState:
    """State between periods.

    ``log_profit_*`` are the previous period's log-profits the banker lends
    against. ``log_gap`` is ``log_profit_m - log_profit_h`` carried by its own
    recurrence, in which the loan scale cancels exactly; shares are computed
    from it. The share histories start with the period-0 shares.
    """

    period: int
    log_profit_h: float
    log_profit_m: float
    log_gap: float
    h_shares: tuple[float, ...]
    m_shares: tuple[float, ...]


# -- single equations, money units ------------------------------------------


def profit(tp: float, tech_exponent: float, investment: float) -> float:
    return tp**tech_exponent * investment


def bank_loan(prev_profit: float, bank: BankParams) -> float:
    """Loan (= next investment) granted against last period's profit."""
    return bank.loan_scale * prev_profit**bank.money_exponent


def _protect_fires(m_share_history: Sequence[float]) -> bool:
    if len(m_share_history) < 3:
        return False
    a, b, c = m_share_history[-3:]
    return a < b < c


def _attack_fires(h_share_history: Sequence[float]) -> bool:
    return len(h_share_history) >= 2 and h_share_history[-1] < h_share_history[-2]


def protect_bonus(m_share_history: Sequence[float], alpha_protect: float, m_profit: float) -> float:
    """Extra money for M after two consecutive strict rises of its share."""
    return alpha_protect * m_profit if _protect_fires(m_share_history) else 0.0


def attack_bonus(h_share_history: Sequence[float], alpha_attack: float, m_profit: float) -> float:
    """Extra money for M after a strict fall of H's share."""
    return alpha_attack * m_profit if _attack_fires(h_share_history) else 0.0


def market_shares(
    h_profit: float,
    m_profit: float,
    protect: float,
    attack: float,
    prev_shares: tuple[float, float],
) -> tuple[float, float]:
    """Normalize H's profit and M's profit plus bonuses into shares.

    A zero total leaves ``prev_shares`` in place.
    """
    m_total = m_profit + protect + attack
    total = h_profit + m_total
    if total > 0:
        return h_profit / total, m_total / total
    return prev_shares


# -- log-domain state transition ---------------------------------------------


def _logistic_pair(gap: float) -> tuple[float, float]:
    # shares (1/(1+e^gap), 1/(1+e^-gap)) without overflow
    if gap > 0:
        e = math.exp(-gap)
        return e / (1.0 + e), 1.0 / (1.0 + e)
    e = math.exp(gap)
    return 1.0 / (1.0 + e), e / (1.0 + e)


def _money(log_value: float) -> float:
    try:
        return math.exp(log_value)
    except OverflowError:
        return math.inf


def _log(value: float) -> float:
    return math.log(value) if value > 0 else -math.inf


def init_state(params: SimParams) -> DuelState:
    """Period-0 state: previous profits proportional to the initial shares."""
    share_h = params.initial_share_h
    share_m = 1.0 - share_h
    scale = params.initial_profit_scale
    return DuelState(
        period=0,
        log_profit_h=_log(scale * share_h),
        log_profit_m=_log(scale * share_m),
        log_gap=math.log(share_m / share_h),
        h_shares=(share_h,),
        m_shares=(share_m,),
    )


def step(state: DuelState, tp: float, params: SimParams) -> tuple[DuelState, PeriodRecord]:
    """Advance one period with technical progress ``tp``."""
    if not TP_MIN <= tp <= TP_MAX:
        raise ValueError(f"tp must lie in [1, 10], got {tp!r}")
    bank = params.bank
    agg = params.aggression
    money_exp = bank.money_exponent
    log_scale = math.log(bank.loan_scale)
    log_tp = math.log(tp)
    h_exp = params.firm_h.tech_exponent
    m_exp = params.firm_m.tech_exponent

    log_inv_h = log_scale + money_exp * state.log_profit_h
    log_inv_m = log_scale + money_exp * state.log_profit_m
    log_profit_h = h_exp * log_tp + log_inv_h
    log_profit_m = m_exp * log_tp + log_inv_m
    gap = money_exp * state.log_gap + (m_exp - h_exp) * log_tp

    # bonuses see only completed periods
    protect_on = _protect_fires(state.m_shares) and agg.alpha_protect > 0
    attack_on = _attack_fires(state.h_shares) and agg.alpha_attack > 0
    bonus_factor = (agg.alpha_protect if protect_on else 0.0) + (agg.alpha_attack if attack_on else 0.0)
    log_bonus = math.log1p(bonus_factor)
    share_gap = gap + log_bonus

    if math.isnan(share_gap):
        # both firms starved: zero total, shares stall
        share_h, share_m = state.h_shares[-1], state.m_shares[-1]
    else:
        share_h, share_m = _logistic_pair(share_gap)

    m_profit_money = _money(log_profit_m)
    record = PeriodRecord(
        period=state.period + 1,
        tp=tp,
        h=FirmState(_money(log_inv_h), _money(log_profit_h), share_h),
        m=FirmState(_money(log_inv_m), m_profit_money, share_m),
        protect_bonus=agg.alpha_protect * m_profit_money if protect_on else 0.0,
        attack_bonus=agg.alpha_attack * m_profit_money if attack_on else 0.0,
    )
    routed = agg.bonus_in_loan_base
    next_state = DuelState(
        period=state.period + 1,
        log_profit_h=log_profit_h,
        log_profit_m=log_profit_m + log_bonus if routed else log_profit_m,
        log_gap=share_gap if routed else gap,
        h_shares=state.h_shares + (share_h,),
        m_shares=state.m_shares + (share_m,),
    )
    return next_state, record


def classify_outcome(
    records: Sequence[PeriodRecord],
    win_epsilon: float,
    initial_share_h: float | None = None,
) -> Outcome:
    """Winner at the final period and number of crossings of the 0.5 line.

    When ``initial_share_h`` is given the period-0 share starts the crossing
    count, so a challenger that overtakes in period 1 still counts one.
    """
    if not records:
        raise ValueError("cannot classify an empty trajectory")
    shares = [r.h.market_share for r in records]
    if initial_share_h is not None:
        shares.insert(0, initial_share_h)
    crossings = sum(1 for a, b in zip(shares, shares[1:]) if (a - 0.5) * (b - 0.5) < 0)
    final = shares[-1]
    if final >= 1.0 - win_epsilon:
        winner = "H"
    elif final <= win_epsilon:
        winner = "M"
    else:
        winner = "none"
    return Outcome(winner=winner, final_share_h=final, half_crossings=crossings)


def run_cycle(params: SimParams, provider: TpProvider) -> Trajectory:
    """Run all ``params.periods`` periods and classify the result."""
    tps = provider.take(params.periods)
    state = init_state(params)
    records = []
    for tp in tps:
        state, record = step(state, tp, params)
        records.append(record)
    outcome = classify_outcome(records, params.win_epsilon, params.initial_share_h)
    return Trajectory(params=params, tp_source=provider.describe(), records=tuple(records), outcome=outcome)
