"""Per-agent time-varying reference signals and drift certification.

Each agent tracks its own reference signal; the network's target is the
average of all of them.  Exact tracking is only possible when the
round-to-round variation ``||r_i(k+1) - (1 - alpha_k) * r_i(k)||`` is
dominated by ``drift_scale_k * C`` for some finite constant ``C``; the
:func:`certify_drift` routine measures the smallest such ``C`` over a
finite horizon and returns it as a certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .schedules import PastTableEnd, Schedule

__all__ = [
    "ConstantSignal",
    "DampedSinusoidSignal",
    "DriftCertificate",
    "SignalSpec",
    "TableSignal",
    "ZeroDriftScale",
    "certify_drift",
]

#: sin(0.05 k) / (10 k) -> 0.005 as k -> 0; used to extend the damped
#: sinusoid continuously to round zero.
_DAMPED_LIMIT_AT_ZERO = 0.005


class ZeroDriftScale(ValueError):
    """The drift scale is zero at a round where the signal actually moves."""


class SignalSpec:
    """Base class: deterministic per-agent reference signals."""

    m: int
    d: int

    def sample(self, agent: int, k: int) -> np.ndarray:
        """Value of agent ``agent``'s signal at round ``k`` (0-based agent)."""
        return self.sample_all(k)[agent]

    def sample_all(self, k: int) -> np.ndarray:
        """(m, d) array of every agent's signal at round ``k``."""
        raise NotImplementedError

    def sample_rounds(self, ks: np.ndarray) -> np.ndarray:
        """(len(ks), m, d) array of signals at each requested round."""
        raise NotImplementedError

    def average(self, k: int) -> np.ndarray:
        """The network-wide average signal at round ``k``."""
        return self.sample_all(k).mean(axis=0)


@dataclass(frozen=True)
class ConstantSignal(SignalSpec):
    """Time-invariant per-agent vectors."""

    values: np.ndarray  # (m, d)

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def sample_all(self, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError(f"round index must be >= 0, got {k}")
        return self.values

    def sample_rounds(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks)
        return np.broadcast_to(self.values, (len(ks),) + self.values.shape)


@dataclass(frozen=True)
class DampedSinusoidSignal(SignalSpec):
    """``r_i(k) = offset_i + (amplitude_i / (10 k)) * sin(0.05 k)`` for k >= 1.

    At ``k = 0`` the continuous extension ``offset_i + 0.005 * amplitude_i``
    is used (the envelope ``sin(0.05 k) / (10 k)`` tends to 0.005 as k -> 0).
    Every agent's signal settles to its offset as k grows.
    """

    offsets: np.ndarray  # (m, d)
    amplitudes: np.ndarray  # (m, d)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.offsets, dtype=float))
        b = np.atleast_2d(np.asarray(self.amplitudes, dtype=float))
        if a.shape != b.shape:
            raise ValueError(f"offsets {a.shape} and amplitudes {b.shape} differ in shape")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "offsets", a)
        object.__setattr__(self, "amplitudes", b)

    @classmethod
    def random(
        cls, m: int, d: int, rng: np.random.Generator, low: float = 0.0, high: float = 10.0
    ) -> "DampedSinusoidSignal":
        """Draw per-agent offsets and amplitudes uniformly from (low, high)."""
        return cls(offsets=rng.uniform(low, high, (m, d)), amplitudes=rng.uniform(low, high, (m, d)))

    @property
    def m(self) -> int:
        return self.offsets.shape[0]

    @property
    def d(self) -> int:
        return self.offsets.shape[1]

    @staticmethod
    def _envelope(ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        out = np.full(ks.shape, _DAMPED_LIMIT_AT_ZERO)
        nz = ks > 0
        out[nz] = np.sin(0.05 * ks[nz]) / (10.0 * ks[nz])
        return out

    def sample_all(self, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError(f"round index must be >= 0, got {k}")
        env = _DAMPED_LIMIT_AT_ZERO if k == 0 else np.sin(0.05 * k) / (10.0 * k)
        return self.offsets + env * self.amplitudes

    def sample_rounds(self, ks: np.ndarray) -> np.ndarray:
        env = self._envelope(ks)
        return self.offsets[None, :, :] + env[:, None, None] * self.amplitudes[None, :, :]


@dataclass(frozen=True)
class TableSignal(SignalSpec):
    """Explicit per-round signal values with a tail rule past the end."""

    values: np.ndarray  # (rounds, m, d)
    tail: str = "hold"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 3:
            raise ValueError(f"table signal needs a (rounds, m, d) array, got shape {v.shape}")
        if v.shape[0] == 0:
            raise ValueError("table signal needs at least one round")
        if self.tail not in ("hold", "error"):
            raise ValueError(f"tail rule must be 'hold' or 'error', got {self.tail!r}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def d(self) -> int:
        return self.values.shape[2]

    def sample_all(self, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError(f"round index must be >= 0, got {k}")
        if k >= self.values.shape[0]:
            if self.tail == "error":
                raise PastTableEnd(f"round {k} beyond table of {self.values.shape[0]} rounds")
            k = self.values.shape[0] - 1
        return self.values[k]

    def sample_rounds(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=int)
        if self.tail == "error" and np.any(ks >= self.values.shape[0]):
            raise PastTableEnd(f"round beyond table of {self.values.shape[0]} rounds")
        idx = np.minimum(ks, self.values.shape[0] - 1)
        return self.values[idx]


@dataclass(frozen=True)
class DriftCertificate:
    """Measured bound ``||r_i(k+1) - (1 - alpha_k) r_i(k)|| <= drift_scale_k * C``.

    Attributes
    ----------
    constant : float
        The smallest ``C`` satisfying the bound for every agent and every
        round up to ``horizon_checked``.
    drift_scale : Schedule
        The scale sequence the bound is measured against.
    horizon_checked : int
        Largest round index the bound was verified at.
    dimension : int
        Signal dimension ``d``; the L1 variant of the constant is
        ``sqrt(d) * constant``.
    """

    constant: float
    drift_scale: Schedule
    horizon_checked: int
    dimension: int

    @property
    def l1_constant(self) -> float:
        """Bound constant for the L1 norm: ``sqrt(d) * constant``."""
        return float(np.sqrt(self.dimension) * self.constant)


def drift_norms(signal: SignalSpec, stepsize: Schedule, ks: np.ndarray) -> np.ndarray:
    """(len(ks), m) array of ``||r_i(k+1) - (1 - alpha_k) r_i(k)||``."""
    ks = np.asarray(ks, dtype=int)
    r_curr = signal.sample_rounds(ks)
    r_next = signal.sample_rounds(ks + 1)
    alpha = stepsize.eval_array(ks)
    diff = r_next - (1.0 - alpha)[:, None, None] * r_curr
    return np.linalg.norm(diff, axis=2)


def certify_drift(
    signal: SignalSpec, stepsize: Schedule, drift_scale: Schedule, horizon: int
) -> DriftCertificate:
    """Measure the drift-bound constant over rounds ``0..horizon``.

    Raises
    ------
    ZeroDriftScale
        If ``drift_scale`` vanishes at a round where the signal moves, in
        which case no finite constant exists.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    ks = np.arange(horizon + 1)
    norms = drift_norms(signal, stepsize, ks)
    scale = drift_scale.eval_array(ks)

    zero_scale = scale <= 0.0
    if np.any(zero_scale):
        moving = norms[zero_scale] > 1e-15
        if np.any(moving):
            bad = int(ks[zero_scale][np.argmax(np.any(norms[zero_scale] > 1e-15, axis=1))])
            raise ZeroDriftScale(f"drift scale is zero at round {bad} but the signal moves there")

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(scale[:, None] > 0.0, norms / scale[:, None], 0.0)
    constant = float(ratios.max())

    if isinstance(signal, ConstantSignal):
        # for constant signals the drift is exactly alpha_k * ||a_i||
        alpha = stepsize.eval_array(ks)
        expected = alpha[:, None] * np.linalg.norm(signal.values, axis=1)[None, :]
        if not np.allclose(norms, expected, rtol=1e-12, atol=1e-12):
            raise RuntimeError("constant-signal drift identity violated; numerical defect")

    return DriftCertificate(
        constant=constant,
        drift_scale=drift_scale,
        horizon_checked=horizon,
        dimension=signal.d,
    )
