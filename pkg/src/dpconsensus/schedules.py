"""Nonnegative scalar sequences and their summability verdicts.

Four parametric families cover every sequence the simulator needs: the
forgetting stepsize, the coupling weakening factor, the reference-drift
scale, and the per-round noise scale.  Verdicts about divergence and
square-summability are exact for the parametric families (p-series and
geometric-series tests on the asymptotic exponent) and reported as
``None`` ("unknown") for finite tables, never guessed.

Families and their formulas (``k`` is the round index, ``k >= 0``):

``power_law``          ``c / (shift + k) ** p``        (default ``shift = 1``)
``power_law_denom``    ``c / (1 + k ** p)``
``power_law_shifted``  ``c0 + c1 * k ** p``            (nondecreasing growth)
``geometric``          ``c * q ** k``  with ``0 < q < 1``
``table``              explicit values with a ``hold`` or ``error`` tail rule

``power_law`` and ``power_law_denom`` have identical asymptotics
(``~ c * k**-p``); both exist because published parameter choices are
quoted in either form and should be reproduced digit-for-digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ConditionVerdict",
    "Geometric",
    "PastTableEnd",
    "PowerLaw",
    "PowerLawDenom",
    "PowerLawShifted",
    "Schedule",
    "ScheduleReport",
    "Table",
    "validate_noise_compatibility",
    "validate_tracking_conditions",
]


class PastTableEnd(ValueError):
    """A table schedule with tail='error' was evaluated beyond its last entry."""


#: Asymptotic kinds for verdicts.  POWER means s_k grows/decays like
#: ``k ** exponent``; GEOMETRIC means ``ratio ** k``; UNKNOWN is undecidable.
_POWER = "power"
_GEOMETRIC = "geometric"
_UNKNOWN = "unknown"


@dataclass(frozen=True)
class Asymptote:
    kind: str
    exponent: float | None = None  # for POWER: s_k ~ k**exponent
    ratio: float | None = None  # for GEOMETRIC: s_k ~ ratio**k


class Schedule:
    """Base class: a deterministic map from round index to a nonnegative real."""

    def eval(self, k: int) -> float:
        raise NotImplementedError

    def eval_array(self, ks: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; same values as ``eval`` at each index."""
        raise NotImplementedError

    def scaled(self, factor: float) -> "Schedule":
        """The schedule multiplied pointwise by a positive constant."""
        raise NotImplementedError

    def asymptote(self) -> Asymptote:
        raise NotImplementedError

    def power_bounds(self, k0: int) -> tuple[float, float] | None:
        """Constants ``(lo, hi)`` with ``lo * k**q <= s_k <= hi * k**q`` for k >= k0.

        ``q`` is the asymptotic power exponent.  Returns ``None`` when the
        schedule has no power asymptote.  Used for integral tail bounds.
        """
        return None

    @staticmethod
    def _check_round(k: int) -> None:
        if k < 0:
            raise ValueError(f"round index must be >= 0, got {k}")


@dataclass(frozen=True)
class PowerLaw(Schedule):
    """``s_k = c / (shift + k) ** p`` with ``c > 0``, ``p >= 0``, ``shift >= 0``.

    With ``shift = 0`` and ``p > 0`` the value at ``k = 0`` is undefined;
    such schedules are only meaningful for sums that start at round 1.
    """

    c: float
    p: float
    shift: float = 1.0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"coefficient must be > 0, got {self.c}")
        if self.p < 0:
            raise ValueError(f"exponent must be >= 0, got {self.p}")
        if self.shift < 0:
            raise ValueError(f"shift must be >= 0, got {self.shift}")

    def eval(self, k: int) -> float:
        self._check_round(k)
        base = self.shift + k
        if base == 0.0 and self.p > 0:
            raise ValueError("power_law with shift=0 is undefined at k=0")
        return self.c / base**self.p

    def eval_array(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        if self.shift == 0.0 and self.p > 0 and np.any(ks == 0):
            raise ValueError("power_law with shift=0 is undefined at k=0")
        return self.c / (self.shift + ks) ** self.p

    def scaled(self, factor: float) -> "PowerLaw":
        return PowerLaw(c=self.c * factor, p=self.p, shift=self.shift)

    def asymptote(self) -> Asymptote:
        return Asymptote(_POWER, exponent=-self.p)

    def power_bounds(self, k0: int) -> tuple[float, float]:
        # (shift + k)**p is between k**p and ((shift + k0)/k0)**p * k**p for k >= k0
        if k0 < 1:
            raise ValueError("power bounds require k0 >= 1")
        hi = self.c  # (shift + k) >= k, so s_k <= c * k**-p
        lo = self.c / ((self.shift + k0) / k0) ** self.p
        return (lo, hi)


@dataclass(frozen=True)
class PowerLawDenom(Schedule):
    """``s_k = c / (1 + k ** p)`` with ``c > 0``, ``p >= 0``."""

    c: float
    p: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"coefficient must be > 0, got {self.c}")
        if self.p < 0:
            raise ValueError(f"exponent must be >= 0, got {self.p}")

    def eval(self, k: int) -> float:
        self._check_round(k)
        return self.c / (1.0 + float(k) ** self.p)

    def eval_array(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        return self.c / (1.0 + ks**self.p)

    def scaled(self, factor: float) -> "PowerLawDenom":
        return PowerLawDenom(c=self.c * factor, p=self.p)

    def asymptote(self) -> Asymptote:
        return Asymptote(_POWER, exponent=-self.p)

    def power_bounds(self, k0: int) -> tuple[float, float]:
        if k0 < 1:
            raise ValueError("power bounds require k0 >= 1")
        hi = self.c  # 1 + k**p >= k**p
        lo = self.c / (1.0 + float(k0) ** -self.p) if self.p > 0 else self.c / 2.0
        return (lo, hi)


@dataclass(frozen=True)
class PowerLawShifted(Schedule):
    """``s_k = c0 + c1 * k ** p`` with ``c0, c1, p >= 0``; nondecreasing."""

    c0: float
    c1: float
    p: float

    def __post_init__(self):
        if self.c0 < 0 or self.c1 < 0:
            raise ValueError("coefficients must be >= 0")
        if self.p < 0:
            raise ValueError(f"exponent must be >= 0, got {self.p}")
        if self.c0 == 0 and self.c1 == 0:
            raise ValueError("schedule is identically zero")

    def eval(self, k: int) -> float:
        self._check_round(k)
        return self.c0 + self.c1 * float(k) ** self.p

    def eval_array(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        return self.c0 + self.c1 * ks**self.p

    def scaled(self, factor: float) -> "PowerLawShifted":
        return PowerLawShifted(c0=self.c0 * factor, c1=self.c1 * factor, p=self.p)

    def asymptote(self) -> Asymptote:
        if self.c1 > 0 and self.p > 0:
            return Asymptote(_POWER, exponent=self.p)
        return Asymptote(_POWER, exponent=0.0)

    def power_bounds(self, k0: int) -> tuple[float, float]:
        if k0 < 1:
            raise ValueError("power bounds require k0 >= 1")
        if self.c1 > 0 and self.p > 0:
            lo = self.c1
            hi = self.c0 / float(k0) ** self.p + self.c1
        else:
            lo = hi = self.c0 + self.c1  # constant
        return (lo, hi)


@dataclass(frozen=True)
class Geometric(Schedule):
    """``s_k = c * q ** k`` with ``c > 0`` and ``0 < q < 1``."""

    c: float
    q: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError(f"coefficient must be > 0, got {self.c}")
        if not (0.0 < self.q < 1.0):
            raise ValueError(f"ratio must be in (0, 1), got {self.q}")

    def eval(self, k: int) -> float:
        self._check_round(k)
        return self.c * self.q**k

    def eval_array(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        return self.c * self.q**ks

    def scaled(self, factor: float) -> "Geometric":
        return Geometric(c=self.c * factor, q=self.q)

    def asymptote(self) -> Asymptote:
        return Asymptote(_GEOMETRIC, ratio=self.q)


@dataclass(frozen=True)
class Table(Schedule):
    """Explicit finite sequence with a tail rule.

    ``tail='hold'`` repeats the last value past the end; ``tail='error'``
    raises :class:`PastTableEnd`.
    """

    values: tuple[float, ...]
    tail: str = "hold"

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("table schedule needs at least one value")
        if self.tail not in ("hold", "error"):
            raise ValueError(f"tail rule must be 'hold' or 'error', got {self.tail!r}")
        if any(v < 0 for v in self.values):
            raise ValueError("table schedule contains a negative value")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def eval(self, k: int) -> float:
        self._check_round(k)
        if k < len(self.values):
            return self.values[k]
        if self.tail == "hold":
            return self.values[-1]
        raise PastTableEnd(f"round {k} beyond table of length {len(self.values)}")

    def eval_array(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=int)
        if self.tail == "error" and np.any(ks >= len(self.values)):
            raise PastTableEnd(f"round beyond table of length {len(self.values)}")
        idx = np.minimum(ks, len(self.values) - 1)
        return np.asarray(self.values, dtype=float)[idx]

    def scaled(self, factor: float) -> "Table":
        return Table(values=tuple(v * factor for v in self.values), tail=self.tail)

    def asymptote(self) -> Asymptote:
        return Asymptote(_UNKNOWN)


# ---------------------------------------------------------------------------
# Summability verdicts.  True/False verdicts are exact consequences of the
# p-series and geometric-series tests; None means undecidable (tables).
# ---------------------------------------------------------------------------


def sum_diverges(s: Schedule) -> bool | None:
    """Whether the series sum of the schedule is infinite."""
    a = s.asymptote()
    if a.kind == _POWER:
        return a.exponent >= -1.0
    if a.kind == _GEOMETRIC:
        return False
    return None


def square_summable(s: Schedule) -> bool | None:
    """Whether the series of squared values converges."""
    a = s.asymptote()
    if a.kind == _POWER:
        return 2.0 * a.exponent < -1.0
    if a.kind == _GEOMETRIC:
        return True
    return None


def _ratio_square_summable(num: Schedule, den: Schedule) -> bool | None:
    """Whether ``sum(num_k**2 / den_k)`` converges."""
    an, ad = num.asymptote(), den.asymptote()
    if an.kind == _UNKNOWN or ad.kind == _UNKNOWN:
        return None
    if an.kind == _GEOMETRIC and ad.kind == _GEOMETRIC:
        return an.ratio**2 < ad.ratio
    if an.kind == _GEOMETRIC:  # geometric over power: terms vanish geometrically
        return True
    if ad.kind == _GEOMETRIC:  # power over geometric: terms blow up
        return False
    return 2.0 * an.exponent - ad.exponent < -1.0


def _limit_ratio_bounded(num: Schedule, den: Schedule) -> bool | None:
    """Whether ``num_k / den_k`` stays bounded as k grows."""
    an, ad = num.asymptote(), den.asymptote()
    if an.kind == _UNKNOWN or ad.kind == _UNKNOWN:
        return None
    if an.kind == _GEOMETRIC and ad.kind == _GEOMETRIC:
        return an.ratio <= ad.ratio
    if an.kind == _GEOMETRIC:
        return True
    if ad.kind == _GEOMETRIC:
        return False
    return an.exponent <= ad.exponent


def _product_square_summable(a: Schedule, b: Schedule) -> bool | None:
    """Whether ``sum((a_k * b_k)**2)`` converges."""
    aa, ab = a.asymptote(), b.asymptote()
    if aa.kind == _UNKNOWN or ab.kind == _UNKNOWN:
        return None
    if aa.kind == _GEOMETRIC or ab.kind == _GEOMETRIC:
        # one factor decays geometrically; the other grows at most polynomially
        return True
    return 2.0 * (aa.exponent + ab.exponent) < -1.0


@dataclass(frozen=True)
class ConditionVerdict:
    """One named condition with a True/False/None verdict and explanation."""

    name: str
    passed: bool | None
    detail: str

    @property
    def status(self) -> str:
        if self.passed is None:
            return "unknown"
        return "pass" if self.passed else "fail"


@dataclass(frozen=True)
class ScheduleReport:
    """Verdicts for a set of summability conditions."""

    conditions: tuple[ConditionVerdict, ...]

    def __getitem__(self, name: str) -> ConditionVerdict:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def all_pass(self) -> bool:
        return all(c.passed is True for c in self.conditions)

    @property
    def any_fail(self) -> bool:
        return any(c.passed is False for c in self.conditions)


def _exp_str(s: Schedule) -> str:
    a = s.asymptote()
    if a.kind == _POWER:
        return f"~k^{a.exponent:g}"
    if a.kind == _GEOMETRIC:
        return f"~{a.ratio:g}^k"
    return "table (asymptote unknown)"


def validate_tracking_conditions(
    stepsize: Schedule, weakening: Schedule, drift: Schedule
) -> ScheduleReport:
    """Check the summability conditions required for exact average tracking.

    The stepsize must be non-summable yet square-summable, the weakening
    factor non-summable yet square-summable, the squared drift scale divided
    by the weakening factor must be summable, and the stepsize must not
    outgrow the drift scale.  For power-law pairs (drift ``~k^-g``,
    weakening ``~k^-c``) the ratio condition is exactly ``2g - c > 1``.
    """
    conditions = (
        ConditionVerdict(
            "stepsize_sum_diverges",
            sum_diverges(stepsize),
            f"stepsize {_exp_str(stepsize)}",
        ),
        ConditionVerdict(
            "stepsize_square_summable",
            square_summable(stepsize),
            f"stepsize {_exp_str(stepsize)}",
        ),
        ConditionVerdict(
            "weakening_sum_diverges",
            sum_diverges(weakening),
            f"weakening {_exp_str(weakening)}",
        ),
        ConditionVerdict(
            "weakening_square_summable",
            square_summable(weakening),
            f"weakening {_exp_str(weakening)}",
        ),
        ConditionVerdict(
            "drift_ratio_summable",
            _ratio_square_summable(drift, weakening),
            f"drift {_exp_str(drift)} squared over weakening {_exp_str(weakening)}",
        ),
        ConditionVerdict(
            "stepsize_drift_ratio_bounded",
            _limit_ratio_bounded(stepsize, drift),
            f"stepsize {_exp_str(stepsize)} over drift {_exp_str(drift)}",
        ),
    )
    return ScheduleReport(conditions)


def validate_noise_compatibility(weakening: Schedule, noise_std: Schedule) -> ScheduleReport:
    """Check that sum((weakening_k * noise_std_k)**2) converges.

    ``noise_std`` is the schedule of the largest per-agent noise standard
    deviation; for Laplace noise with scale ``nu_k`` that is
    ``sqrt(2) * nu_k``.  For weakening ``~k^-c`` and noise growth ``~k^n``
    the condition is exactly ``2c - 2n > 1``.
    """
    verdict = _product_square_summable(weakening, noise_std)
    return ScheduleReport(
        (
            ConditionVerdict(
                "noise_square_summable",
                verdict,
                f"weakening {_exp_str(weakening)} times noise std {_exp_str(noise_std)}",
            ),
        )
    )
