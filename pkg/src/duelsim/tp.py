"""Technical-progress (TP) sources.

Two modes are supported: a seeded pseudo-random stream and an exogenous,
user-supplied sequence. Seeded draws are produced by numpy's PCG64 bit
generator (seeded through ``SeedSequence``), whose raw 64-bit output stream
is stable across platforms and numpy releases. A raw word ``w`` is mapped to

    tp = 1 + 9 * ((w >> 11) * 2**-53)

which is uniform on [1, 10) and computed with exact integer shifts and two
correctly rounded float operations, so the same seed yields the same TP
sequence everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

TP_MIN = 1.0
TP_MAX = 10.0
SEED_LIMIT = 2**64

_TWO_POW_MINUS_53 = 2.0**-53


class SequenceExhaustedError(IndexError):
    """An exogenous TP sequence has fewer values than requested."""


class TpValidationError(ValueError):
    """A TP value (or TP file line) is outside [1, 10] or not a number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def _check_tp(value, line: int | None = None) -> float:
    value = float(value)
    if not math.isfinite(value) or not TP_MIN <= value <= TP_MAX:
        raise TpValidationError(f"TP value {value!r} outside [1.0, 10.0]", line)
    return value


def seeded_draws(seed: int, start: int, count: int) -> list[float]:
    """Return draws ``start, start+1, ..., start+count-1`` (0-based) of a seed's stream."""
    bitgen = np.random.PCG64(check_seed(seed))
    if start:
        bitgen.advance(start)
    raw = bitgen.random_raw(count)
    return (TP_MIN + (TP_MAX - TP_MIN) * ((raw >> np.uint64(11)) * _TWO_POW_MINUS_53)).tolist()


@dataclass(frozen=True)
class TpProvider:
    """Source of one TP value per period.

    Build instances with :meth:`seeded` or :meth:`exogenous`; both validate
    their input so every emitted value lies in [1, 10].
    """

    mode: str
    seed: int | None = None
    values: tuple[float, ...] = ()
    origin: str | None = None

    @classmethod
    def seeded(cls, seed: int) -> "TpProvider":
        return cls(mode="seeded", seed=check_seed(seed))

    @classmethod
    def exogenous(cls, values: Iterable[float], origin: str | None = None) -> "TpProvider":
        return cls(mode="exogenous", values=tuple(_check_tp(v) for v in values), origin=origin)

    def __post_init__(self):
        if self.mode not in ("seeded", "exogenous"):
            raise ValueError(f"unknown TP mode {self.mode!r}")
        if self.mode == "seeded" and self.seed is None:
            raise ValueError("seeded TP provider needs a seed")

    def take(self, count: int) -> list[float]:
        """First ``count`` TP values (periods 1..count)."""
        if self.mode == "seeded":
            return seeded_draws(self.seed, 0, count)
        if count > len(self.values):
            raise SequenceExhaustedError(
                f"exogenous TP sequence has {len(self.values)} values, {count} needed"
            )
        return list(self.values[:count])

    def describe(self) -> str:
        if self.mode == "seeded":
            return f"seed:{self.seed}"
        return f"file:{self.origin}" if self.origin else f"sequence:{len(self.values)}"


def tp_next(provider: TpProvider, index: int) -> float:
    """TP value for period ``index`` (1-based)."""
    if index < 1:
        raise ValueError(f"TP index is 1-based, got {index}")
    if provider.mode == "seeded":
        return seeded_draws(provider.seed, index - 1, 1)[0]
    if index > len(provider.values):
        raise SequenceExhaustedError(
            f"exogenous TP sequence has {len(provider.values)} values, index {index} requested"
        )
    return provider.values[index - 1]


def parse_tp_lines(lines: Sequence[str]) -> list[float]:
    """Parse one decimal TP literal per line. Line numbers in errors are 1-based."""
    values = []
    for number, raw in enumerate(lines, start=1):
        text = raw.strip()
        try:
            value = float(text)
        except ValueError:
            raise TpValidationError(f"not a decimal number: {raw.rstrip()!r}", number) from None
        values.append(_check_tp(value, number))
    return values


def load_tp_file(path: str | Path) -> TpProvider:
    """Read an exogenous TP file (one value per line, line i is period i)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    # a single trailing newline is allowed, interior blank lines are not
    while lines and not lines[-1].strip():
        lines.pop()
    return TpProvider.exogenous(parse_tp_lines(lines), origin=str(path))


def write_tp_file(values: Iterable[float], path: str | Path) -> None:
    Path(path).write_text("".join(f"{v:.17g}\n" for v in values), encoding="utf-8")
