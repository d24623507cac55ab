"""Parameter values: constants, hourly series, flags and enum text."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Union

from hubopt.errors import MalformedSeries, Unresolved


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Flag:
    value: bool


@dataclass(frozen=True)
class Enum:
    value: str


@dataclass(frozen=True)
class TimeSeries:
    """Step series; ``source`` is the ts-file name when loaded from disk."""

    times: tuple[datetime, ...]
    values: tuple[float, ...]
    source: str | None = None

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise MalformedSeries("timestamps and values differ in length")
        for a, b in zip(self.times, self.times[1:]):
            if not a < b:
                raise MalformedSeries(f"timestamps not strictly increasing at {b.isoformat()}")

    def at(self, t: datetime) -> float:
        """Previous-value hold."""
        i = bisect.bisect_right(self.times, t) - 1
        if i < 0:
            raise Unresolved(f"series starts at {self.times[0].isoformat() if self.times else '-'}, "
                             f"queried at {t.isoformat()}")
        return self.values[i]

    def window(self, start: datetime, step: timedelta, n: int) -> list[float]:
        return [self.at(start + k * step) for k in range(n)]


ParameterValue = Union[Constant, Flag, Enum, TimeSeries]

_DURATION = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*(s|min|m|h|D|d|W|w)?\s*$")
_UNIT_SECONDS = {"s": 1, "min": 60, "m": 60, "h": 3600, "D": 86400, "d": 86400, "W": 604800, "w": 604800}


def parse_duration(text: str | float | int) -> timedelta:
    """``'2h'``, ``'364D'``, ``'0h'``; bare numbers are hours."""
    if isinstance(text, (int, float)):
        return timedelta(hours=float(text))
    m = _DURATION.match(str(text))
    if not m:
        raise ValueError(f"not a duration: {text!r}")
    unit = m.group(2) or "h"
    return timedelta(seconds=float(m.group(1)) * _UNIT_SECONDS[unit])


def parse_time(text: str) -> datetime:
    return datetime.fromisoformat(text.strip())


def parse_scalar(text: str) -> ParameterValue:
    s = text.strip().strip('"').strip()
    low = s.lower()
    if low in ("true", "false"):
        return Flag(low == "true")
    try:
        return Constant(float(s))
    except ValueError:
        return Enum(s)


def format_scalar(value: ParameterValue) -> str:
    if isinstance(value, Flag):
        return "true" if value.value else "false"
    if isinstance(value, Constant):
        return repr(value.value)
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"not a scalar value: {value!r}")


def as_float(value: ParameterValue, t: datetime | None = None) -> float:
    if isinstance(value, Constant):
        return value.value
    if isinstance(value, TimeSeries):
        if t is None:
            raise Unresolved("time series queried without a timestamp")
        return value.at(t)
    if isinstance(value, Flag):
        return float(value.value)
    if isinstance(value, Enum):
        try:
            return parse_duration(value.value).total_seconds() / 3600.0
        except ValueError:
            pass
    raise Unresolved(f"value {value!r} is not numeric")


class Sense:
    """Constraint / nodal balance sense, normalised to ``'<='``, ``'>='`` or ``'=='``."""

    LE = "<="
    GE = ">="
    EQ = "=="

    _ALIASES = {"<=": "<=", "le": "<=", "l": "<=", ">=": ">=", "ge": ">=", "g": ">=",
                "==": "==", "=": "==", "eq": "==", "e": "=="}

    @classmethod
    def parse(cls, text: str) -> str:
        key = str(text).strip().lower()
        if key not in cls._ALIASES:
            raise ValueError(f"unknown sense {text!r}")
        return cls._ALIASES[key]
