"""The assumption gate: resolve a configuration and check every condition.

A run is covered by the tracking and privacy guarantees only when all of
the following hold: the topology satisfies the mixing condition, the
stepsize/weakening/drift schedules satisfy the summability conditions, the
noise schedule is compatible with the weakening factor, and the reference
signals admit a finite drift-bound certificate.  Topology violations are
hard errors (such graphs are rejected, not simulated); every other failed
condition can be overridden, in which case the run proceeds with its
guarantees marked void.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .accountant import DivergentShapeRatio, calibrate_noise_scale, ratio_sum
from .config import ConfigError, ExperimentConfig, build_schedule, build_signal, build_topology_from_spec
from .noise import laplace_std
from .schedules import (
    ConditionVerdict,
    Geometric,
    Schedule,
    validate_noise_compatibility,
    validate_tracking_conditions,
)
from .signals import DriftCertificate, SignalSpec, ZeroDriftScale, certify_drift
from .topology import Topology

__all__ = [
    "ResolvedExperiment",
    "ValidationFailed",
    "ValidationReport",
    "resolve_experiment",
    "validate_experiment",
]


class ValidationFailed(RuntimeError):
    """The configuration failed validation and no override was given."""


@dataclass(frozen=True)
class ValidationReport:
    """All per-condition verdicts for one configuration."""

    rows: tuple[ConditionVerdict, ...]

    @property
    def all_pass(self) -> bool:
        return all(r.passed is True for r in self.rows)

    def failures(self) -> list[ConditionVerdict]:
        return [r for r in self.rows if r.passed is not True]

    def __getitem__(self, name: str) -> ConditionVerdict:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def lines(self) -> list[str]:
        width = max(len(r.name) for r in self.rows)
        return [f"{r.status.upper():7s} {r.name:{width}s}  {r.detail}" for r in self.rows]


@dataclass(frozen=True)
class ResolvedExperiment:
    """Everything needed to execute a validated configuration."""

    config: ExperimentConfig
    topology: Topology
    signal: SignalSpec
    stepsize: Schedule
    weakening: Schedule
    drift: Schedule
    certificate: DriftCertificate | None
    noise_scale: Schedule | None
    epsilon_target: float | None
    geometric_input: Schedule
    geometric_noise: Schedule | None
    report: ValidationReport


def _step_variation_l1_bound(signal: SignalSpec, horizon: int) -> float:
    """sqrt(d) times the largest per-step signal movement up to the horizon."""
    ks = np.arange(horizon + 1)
    r_curr = signal.sample_rounds(ks)
    r_next = signal.sample_rounds(ks + 1)
    step = float(np.linalg.norm(r_next - r_curr, axis=2).max())
    return math.sqrt(signal.d) * step


def _calibrate_geometric_noise(
    target_epsilon: float,
    variation_l1: float,
    input_weight: Geometric,
    noise_ratio: float,
    horizon: int,
) -> Geometric:
    """Noise for the geometric baseline, budget-matched over the horizon.

    The baseline's per-round sensitivity is ``2 * variation_l1`` times its
    input weight, so with noise ``c * noise_ratio**k`` its budget over
    rounds ``1..horizon`` is ``(2 * variation_l1 / c) * sum (q/ratio)**k``.
    With the default equal decay ratios that sum grows linearly in the
    horizon (the baseline has no finite infinite-horizon budget), which is
    why the match is taken at the horizon.
    """
    rho = input_weight.q / noise_ratio
    ks = np.arange(1, horizon + 1)
    weight_sum = float(np.sum(input_weight.c * rho**ks))
    c = 2.0 * variation_l1 * weight_sum / target_epsilon
    return Geometric(c=c, q=noise_ratio)


def resolve_experiment(cfg: ExperimentConfig) -> ResolvedExperiment:
    """Build every part of the experiment and collect condition verdicts.

    Raises :class:`ConfigError` or a topology error for defects that make
    the experiment unrunnable; all other findings land in the report.
    """
    rows: list[ConditionVerdict] = []

    topology = build_topology_from_spec(cfg.topology)
    gap = abs(topology.eigenvalues[-2]) if topology.m > 1 else float("nan")
    rows.append(
        ConditionVerdict(
            "topology_mixing",
            True,
            f"m={topology.m}, spectral gap {gap:.6g}, mixing norm {topology.agreement_norm:.6g} < 1",
        )
    )

    stepsize = build_schedule(cfg.schedules["stepsize"])
    weakening = build_schedule(cfg.schedules["weakening"])
    drift = build_schedule(cfg.schedules["drift"])
    tracking = validate_tracking_conditions(stepsize, weakening, drift)
    rows.extend(tracking.conditions)

    signal = build_signal(cfg.signal, cfg.master_seed)
    if signal.m != topology.m:
        raise ConfigError(f"signal has {signal.m} agents but topology has {topology.m}")

    drift_horizon = cfg.drift_horizon if cfg.drift_horizon is not None else cfg.horizon
    certificate: DriftCertificate | None = None
    try:
        certificate = certify_drift(signal, stepsize, drift, drift_horizon)
        rows.append(
            ConditionVerdict(
                "drift_bound_certified",
                True,
                f"constant {certificate.constant:.6g} (L1 {certificate.l1_constant:.6g}) "
                f"over rounds 0..{drift_horizon}",
            )
        )
    except ZeroDriftScale as exc:
        rows.append(ConditionVerdict("drift_bound_certified", False, str(exc)))

    noise_scale: Schedule | None = None
    epsilon_target: float | None = None
    if cfg.noise is not None:
        if "scale" in cfg.noise:
            noise_scale = build_schedule(cfg.noise["scale"])
        elif "target_epsilon" in cfg.noise:
            epsilon_target = float(cfg.noise["target_epsilon"])
            shape = build_schedule(cfg.noise["shape"])
            if certificate is None:
                rows.append(
                    ConditionVerdict(
                        "noise_budget_finite",
                        False,
                        "cannot calibrate noise without a drift certificate",
                    )
                )
            else:
                try:
                    noise_scale = calibrate_noise_scale(
                        epsilon_target, drift, shape, certificate.l1_constant
                    )
                    rows.append(
                        ConditionVerdict(
                            "noise_budget_finite",
                            True,
                            f"noise calibrated to total budget {epsilon_target:g}",
                        )
                    )
                except DivergentShapeRatio as exc:
                    rows.append(ConditionVerdict("noise_budget_finite", False, str(exc)))
        else:
            raise ConfigError("noise section needs either 'scale' or 'target_epsilon' + 'shape'")

    if noise_scale is not None:
        compat = validate_noise_compatibility(weakening, laplace_std(noise_scale))
        rows.extend(compat.conditions)
        positive = noise_scale.eval(0) > 0.0
        rows.append(
            ConditionVerdict(
                "noise_scale_positive",
                positive,
                f"scale at round 0 is {noise_scale.eval(0):g}",
            )
        )

    geometric_input = build_schedule(cfg.geometric_baseline["input_weight"])
    geometric_noise: Schedule | None = None
    if "geometric" in cfg.algorithms and noise_scale is not None:
        noise_ratio = float(cfg.geometric_baseline["noise_ratio"])
        variation = _step_variation_l1_bound(signal, drift_horizon)
        target = epsilon_target
        if target is None and certificate is not None:
            # match the robust algorithm's budget: its total if finite, else
            # the bound accumulated over the simulated horizon
            try:
                target = 2.0 * certificate.l1_constant * ratio_sum(drift, noise_scale).value
            except DivergentShapeRatio:
                from .accountant import PrivacyLedger

                target = (
                    PrivacyLedger(drift, noise_scale, certificate.l1_constant)
                    .accumulate(cfg.horizon)
                    .epsilon
                )
        if target is not None and target > 0 and variation > 0:
            geometric_noise = _calibrate_geometric_noise(
                target, variation, geometric_input, noise_ratio, cfg.horizon
            )

    report = ValidationReport(rows=tuple(rows))
    return ResolvedExperiment(
        config=cfg,
        topology=topology,
        signal=signal,
        stepsize=stepsize,
        weakening=weakening,
        drift=drift,
        certificate=certificate,
        noise_scale=noise_scale,
        epsilon_target=epsilon_target,
        geometric_input=geometric_input,
        geometric_noise=geometric_noise,
        report=report,
    )


def validate_experiment(cfg: ExperimentConfig) -> ValidationReport:
    """Condition verdicts only; hard construction errors become fail rows."""
    try:
        return resolve_experiment(cfg).report
    except (ConfigError, ValueError) as exc:
        return ValidationReport(rows=(ConditionVerdict("configuration", False, str(exc)),))
