"""Per-round error metrics, summability diagnostics, and ensemble statistics.

Three per-round errors are tracked for every run:

``consensus_error``   sum_i ||x_i - mean(x)||     (spread around the state mean)
``tracking_error``    sum_i ||x_i - mean(r)||     (distance to the average signal)
``mean_gap``          ||mean(x) - mean(r)||

plus two running diagnostic sums whose boundedness is the finite-horizon
proxy for the algorithm's summability guarantees:

``s1(K) = sum_{k<=K} weakening_k * sum_i ||x_i - mean(x)||**2``
``s2(K) = sum_{k<=K} drift_scale_k * sum_i ||x_i - mean(x)||``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EnsembleSummary",
    "MetricStats",
    "MetricsRow",
    "MismatchedGrids",
    "RunRecord",
    "RunRecorder",
    "SummabilityDiagnostics",
    "aggregate",
    "diagnose_summability",
    "record_round",
    "ERROR_METRICS",
]

ERROR_METRICS = ("consensus_error", "tracking_error", "mean_gap")

#: A cumulative sum is "consistent with summability" when it grew by less
#: than this factor over the last doubling of the horizon.
SUMMABILITY_RATIO_THRESHOLD = 1.05


class MismatchedGrids(ValueError):
    """Runs being aggregated do not share the same round grid."""


@dataclass(frozen=True)
class MetricsRow:
    """One round's errors plus its contribution to the diagnostic sums."""

    k: int
    consensus_error: float
    tracking_error: float
    mean_gap: float
    s1_increment: float
    s2_increment: float


def record_round(state, signal, weakening, drift_scale) -> MetricsRow:
    """Compute the metrics row for a consensus state at its current round.

    ``state`` needs ``k`` and ``x``; the average signal comes from the
    signal spec, and the schedules are evaluated at the state's round.
    """
    k = int(state.k)
    x = np.asarray(state.x)
    r_bar = signal.average(k)
    x_bar = x.mean(axis=0)
    dev = np.linalg.norm(x - x_bar, axis=1)
    consensus = float(dev.sum())
    return MetricsRow(
        k=k,
        consensus_error=consensus,
        tracking_error=float(np.linalg.norm(x - r_bar, axis=1).sum()),
        mean_gap=float(np.linalg.norm(x_bar - r_bar)),
        s1_increment=weakening.eval(k) * float((dev**2).sum()),
        s2_increment=drift_scale.eval(k) * consensus,
    )


@dataclass(frozen=True)
class RunRecord:
    """Per-round metrics of one simulated run (one row per completed round)."""

    k: np.ndarray
    consensus_error: np.ndarray
    tracking_error: np.ndarray
    mean_gap: np.ndarray
    s1: np.ndarray
    s2: np.ndarray

    def metric(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def __len__(self) -> int:
        return len(self.k)


class RunRecorder:
    """Accumulates per-round rows and the running diagnostic sums.

    The sums include the initial round (k = 0) even though the emitted rows
    start at the first completed round, so ``s1``/``s2`` at row ``k`` cover
    all rounds ``0..k``.
    """

    def __init__(self):
        self._k: list[int] = []
        self._consensus: list[float] = []
        self._tracking: list[float] = []
        self._mean_gap: list[float] = []
        self._s1: list[float] = []
        self._s2: list[float] = []
        self._s1_sum = 0.0
        self._s2_sum = 0.0

    def observe(
        self,
        k: int,
        x: np.ndarray,
        r_bar: np.ndarray,
        weakening_k: float,
        drift_scale_k: float,
        emit_row: bool = True,
    ) -> None:
        x_bar = x.mean(axis=0)
        dev = np.linalg.norm(x - x_bar, axis=1)
        consensus = float(dev.sum())
        self._s1_sum += weakening_k * float((dev**2).sum())
        self._s2_sum += drift_scale_k * consensus
        if emit_row:
            self._k.append(k)
            self._consensus.append(consensus)
            self._tracking.append(float(np.linalg.norm(x - r_bar, axis=1).sum()))
            self._mean_gap.append(float(np.linalg.norm(x_bar - r_bar)))
            self._s1.append(self._s1_sum)
            self._s2.append(self._s2_sum)

    def finalize(self) -> RunRecord:
        return RunRecord(
            k=np.asarray(self._k, dtype=int),
            consensus_error=np.asarray(self._consensus),
            tracking_error=np.asarray(self._tracking),
            mean_gap=np.asarray(self._mean_gap),
            s1=np.asarray(self._s1),
            s2=np.asarray(self._s2),
        )


@dataclass(frozen=True)
class MetricStats:
    """Pointwise ensemble statistics of one metric across runs."""

    mean: np.ndarray
    var: np.ndarray
    q05: np.ndarray
    q95: np.ndarray


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-round mean/variance/quantiles of each error metric across runs."""

    k: np.ndarray
    runs: int
    stats: dict[str, MetricStats]

    def metric(self, name: str) -> MetricStats:
        return self.stats[name]


def aggregate(records: list[RunRecord]) -> EnsembleSummary:
    """Pointwise ensemble statistics over runs sharing one round grid.

    Variance is the population variance across runs (zero for a single
    run); quantiles are the 5% and 95% pointwise sample quantiles.
    """
    if not records:
        raise ValueError("no runs to aggregate")
    k = records[0].k
    for rec in records[1:]:
        if len(rec.k) != len(k) or np.any(rec.k != k):
            raise MismatchedGrids("runs cover different round grids")
    stats: dict[str, MetricStats] = {}
    for name in ERROR_METRICS:
        vals = np.stack([rec.metric(name) for rec in records])
        q05, q95 = np.quantile(vals, [0.05, 0.95], axis=0)
        stats[name] = MetricStats(
            mean=vals.mean(axis=0), var=vals.var(axis=0), q05=q05, q95=q95
        )
    return EnsembleSummary(k=k.copy(), runs=len(records), stats=stats)


@dataclass(frozen=True)
class SummabilityDiagnostics:
    """Growth of the diagnostic sums over the last doubling of the horizon."""

    horizon: int
    s1_final: float
    s2_final: float
    s1_ratio: float | None
    s2_ratio: float | None
    verdict: str

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent with summability"


def diagnose_summability(record: RunRecord, horizon: int | None = None) -> SummabilityDiagnostics:
    """Compare each diagnostic sum at the horizon against its value at half.

    A ratio below 1.05 over the last doubling is reported as "consistent
    with summability"; a horizon too short for a doubling yields the
    verdict "insufficient horizon".
    """
    if horizon is None:
        horizon = int(record.k[-1])
    if horizon < 2 or horizon // 2 < int(record.k[0]):
        return SummabilityDiagnostics(
            horizon=horizon,
            s1_final=float(record.s1[-1]) if len(record) else 0.0,
            s2_final=float(record.s2[-1]) if len(record) else 0.0,
            s1_ratio=None,
            s2_ratio=None,
            verdict="insufficient horizon",
        )
    idx_full = int(np.searchsorted(record.k, horizon))
    idx_half = int(np.searchsorted(record.k, horizon // 2))
    idx_full = min(idx_full, len(record) - 1)
    s1_full, s1_half = float(record.s1[idx_full]), float(record.s1[idx_half])
    s2_full, s2_half = float(record.s2[idx_full]), float(record.s2[idx_half])
    s1_ratio = s1_full / s1_half if s1_half > 0 else None
    s2_ratio = s2_full / s2_half if s2_half > 0 else None
    ratios = [r for r in (s1_ratio, s2_ratio) if r is not None]
    if ratios and all(r < SUMMABILITY_RATIO_THRESHOLD for r in ratios):
        verdict = "consistent with summability"
    else:
        verdict = "inconsistent with summability"
    return SummabilityDiagnostics(
        horizon=horizon,
        s1_final=s1_full,
        s2_final=s2_full,
        s1_ratio=s1_ratio,
        s2_ratio=s2_ratio,
        verdict=verdict,
    )
