"""Privacy budget accounting and noise calibration.

Releasing an obscured state at round ``k`` can separate two problems that
differ in a single agent's reference signal by at most

    sensitivity_k = 2 * drift_scale_k * C1,

where ``C1 = sqrt(d) * C`` is the L1 form of the certified drift-bound
constant.  With per-coordinate Laplace noise of scale ``nu_k`` the
cumulative privacy budget over rounds ``1..K`` is bounded by

    epsilon(K) <= sum_{k=1..K} sensitivity_k / nu_k,

and the infinite-horizon budget is finite exactly when the ratio sequence
``drift_scale_k / nu_k`` is summable.  The reported number is an upper
bound on the privacy loss, not an exact value.

The ratio sum is estimated as a partial sum up to a large cutoff plus an
integral tail bound, so the approximation is auditable: the partial sum
is exact and the tail term is a proven upper bound on everything beyond
the cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .noise import laplace_std
from .schedules import Geometric, Schedule, validate_noise_compatibility

__all__ = [
    "DivergentShapeRatio",
    "IncompatibleNoiseGrowth",
    "PrivacyLedger",
    "RatioSumEstimate",
    "calibrate_noise_scale",
    "ratio_sum",
    "sensitivity_bound",
    "tail_bound",
]

#: Default cutoff for partial sums of ratio sequences.
RATIO_SUM_CUTOFF = 10_000_000


class DivergentShapeRatio(ValueError):
    """sum(drift_scale_k / noise_k) diverges: no finite budget exists."""


class IncompatibleNoiseGrowth(ValueError):
    """A calibrated noise schedule grows too fast for the configured weakening."""


def sensitivity_bound(k: int, drift_scale: Schedule, l1_constant: float) -> float:
    """Per-round L1 sensitivity bound ``2 * drift_scale_k * C1``."""
    if l1_constant < 0:
        raise ValueError(f"L1 drift constant must be >= 0, got {l1_constant}")
    return 2.0 * l1_constant * drift_scale.eval(k)


def _power_ratio_exponent(num: Schedule, den: Schedule) -> float | None:
    """Asymptotic exponent q with num_k/den_k ~ k**q, or None if not power/power."""
    an, ad = num.asymptote(), den.asymptote()
    if an.kind == "power" and ad.kind == "power":
        return an.exponent - ad.exponent
    return None


def tail_bound(num: Schedule, den: Schedule, after: int) -> float | None:
    """Upper bound on ``sum_{k > after} num_k / den_k``.

    Finite for power-law pairs with ratio exponent below -1 (integral
    bound) and for geometric pairs with ratio below 1 (exact geometric
    tail).  Returns ``inf`` when the ratio sum provably diverges and
    ``None`` when undecidable (table schedules).
    """
    if after < 1:
        raise ValueError(f"tail start must be >= 1, got {after}")
    q = _power_ratio_exponent(num, den)
    if q is not None:
        if q >= -1.0:
            return math.inf
        lo_n, hi_n = num.power_bounds(after)
        lo_d, hi_d = den.power_bounds(after)
        # num_k/den_k <= (hi_n/lo_d) k**q for k >= after; k**q is decreasing,
        # so the sum beyond `after` is below the integral from `after` on.
        c = hi_n / lo_d
        return c * after ** (q + 1.0) / (-q - 1.0)
    an, ad = num.asymptote(), den.asymptote()
    if an.kind == "geometric" and ad.kind == "geometric":
        rho = an.ratio / ad.ratio
        if rho >= 1.0:
            return math.inf
        c = (num.eval(0) / den.eval(0)) if den.eval(0) > 0 else math.inf
        return c * rho ** (after + 1) / (1.0 - rho)
    return None


@dataclass(frozen=True)
class RatioSumEstimate:
    """Estimate of ``sum_{k>=1} num_k / den_k`` with an auditable split."""

    partial: float
    tail: float
    cutoff: int

    @property
    def value(self) -> float:
        return self.partial + self.tail


def _partial_ratio_sum(num: Schedule, den: Schedule, upto: int, chunk: int = 1_000_000) -> float:
    total = 0.0
    for start in range(1, upto + 1, chunk):
        ks = np.arange(start, min(start + chunk, upto + 1))
        total += float(np.sum(num.eval_array(ks) / den.eval_array(ks)))
    return total


def ratio_sum(
    num: Schedule, den: Schedule, cutoff: int = RATIO_SUM_CUTOFF
) -> RatioSumEstimate:
    """Estimate ``sum_{k>=1} num_k / den_k`` (partial sum plus tail bound).

    Raises
    ------
    DivergentShapeRatio
        If the sum provably diverges or its convergence is undecidable.
    """
    q = _power_ratio_exponent(num, den)
    if q is not None:
        if q >= -1.0:
            raise DivergentShapeRatio(f"ratio sequence ~k^{q:g} is not summable")
        partial = _partial_ratio_sum(num, den, cutoff)
        return RatioSumEstimate(partial=partial, tail=tail_bound(num, den, cutoff), cutoff=cutoff)
    an, ad = num.asymptote(), den.asymptote()
    if an.kind == "geometric" and ad.kind == "geometric":
        rho = an.ratio / ad.ratio
        if rho >= 1.0:
            raise DivergentShapeRatio(f"geometric ratio {rho:g} >= 1 is not summable")
        # beyond this cutoff each term is below 1e-18 of the leading one
        needed = int(math.log(1e-18) / math.log(rho)) + 1
        upto = min(cutoff, max(needed, 1))
        partial = _partial_ratio_sum(num, den, upto)
        return RatioSumEstimate(partial=partial, tail=tail_bound(num, den, upto), cutoff=upto)
    raise DivergentShapeRatio("ratio summability is undecidable for these schedules")


class PrivacyLedger:
    """Running account of the cumulative privacy budget.

    Parameters
    ----------
    drift_scale : Schedule
        The certified drift scale sequence.
    noise_scale : Schedule
        The per-round Laplace scale actually used.
    l1_constant : float
        Certified L1 drift constant (``sqrt(d)`` times the Euclidean one).

    The ledger sums from round 1; ``accumulate`` extends it to any horizon
    and the cumulative budget is nondecreasing in the horizon.
    """

    def __init__(self, drift_scale: Schedule, noise_scale: Schedule, l1_constant: float):
        if l1_constant < 0:
            raise ValueError(f"L1 drift constant must be >= 0, got {l1_constant}")
        self.drift_scale = drift_scale
        self.noise_scale = noise_scale
        self.l1_constant = l1_constant
        self.k = np.empty(0, dtype=int)
        self.sensitivity = np.empty(0)
        self.noise = np.empty(0)
        self.increment = np.empty(0)
        self.cumulative = np.empty(0)

    def accumulate(self, up_to: int) -> "PrivacyLedger":
        """Extend the ledger so it covers rounds ``1..up_to``; returns self."""
        if up_to < 0:
            raise ValueError(f"horizon must be >= 0, got {up_to}")
        if up_to <= len(self.k):
            return self
        ks = np.arange(1, up_to + 1)
        gamma = self.drift_scale.eval_array(ks)
        nu = self.noise_scale.eval_array(ks)
        if np.any(nu <= 0):
            raise ValueError("noise scale must be strictly positive from round 1 on")
        sens = 2.0 * self.l1_constant * gamma
        inc = sens / nu
        self.k = ks
        self.sensitivity = sens
        self.noise = nu
        self.increment = inc
        self.cumulative = np.cumsum(inc)
        return self

    @property
    def epsilon(self) -> float:
        """Budget bound accumulated so far (0 for an empty ledger)."""
        return float(self.cumulative[-1]) if len(self.cumulative) else 0.0

    def epsilon_at(self, k: int) -> float:
        """Budget bound over rounds ``1..k`` (requires prior accumulate)."""
        if k == 0:
            return 0.0
        if k > len(self.k):
            raise ValueError(f"ledger only covers rounds up to {len(self.k)}")
        return float(self.cumulative[k - 1])

    def tail_bound_after(self, k: int) -> float | None:
        """Bound on the budget beyond round ``k`` (inf/None as in tail_bound)."""
        t = tail_bound(self.drift_scale, self.noise_scale, max(k, 1))
        if t is None or math.isinf(t):
            return t
        return 2.0 * self.l1_constant * t

    def epsilon_total(self, cutoff: int = RATIO_SUM_CUTOFF) -> float:
        """Infinite-horizon budget bound (partial sum plus tail bound)."""
        est = ratio_sum(self.drift_scale, self.noise_scale, cutoff)
        return 2.0 * self.l1_constant * est.value


def calibrate_noise_scale(
    target_epsilon: float,
    drift_scale: Schedule,
    noise_shape: Schedule,
    l1_constant: float,
    weakening: Schedule | None = None,
    cutoff: int = RATIO_SUM_CUTOFF,
) -> Schedule:
    """Scale a noise-shape schedule so the infinite budget equals the target.

    The returned schedule is ``(2 * C1 * S / eps) * shape_k`` where ``S`` is
    the estimated ratio sum of drift scale over shape.  Accumulating the
    full budget with the returned schedule recovers ``target_epsilon`` up
    to the ratio-sum estimation tolerance.

    When ``weakening`` is given, the calibrated schedule's compatibility
    with it (square-summability of weakening times noise std) is
    re-checked, and calibration fails loudly on violation.
    """
    if target_epsilon <= 0:
        raise ValueError(f"target budget must be > 0, got {target_epsilon}")
    if l1_constant < 0:
        raise ValueError(f"L1 drift constant must be >= 0, got {l1_constant}")
    estimate = ratio_sum(drift_scale, noise_shape, cutoff)
    factor = 2.0 * l1_constant * estimate.value / target_epsilon
    if factor <= 0:
        raise ValueError("calibration factor is nonpositive; zero drift needs no noise")
    scaled = noise_shape.scaled(factor)
    if weakening is not None:
        report = validate_noise_compatibility(weakening, laplace_std(scaled))
        if report["noise_square_summable"].passed is False:
            raise IncompatibleNoiseGrowth(
                "calibrated noise grows too fast for the weakening schedule: "
                + report["noise_square_summable"].detail
            )
    return scaled
