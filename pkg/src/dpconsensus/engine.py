"""Synchronous round execution for the consensus algorithms.

One round proceeds in two phases.  First every agent draws one noise vector
and broadcasts its obscured state; the same obscured message from agent j
is seen by every neighbor of j (a single draw per sender per round), and
the round's messages are retained as the observation record.  Second every
agent applies its update:

robust        x_i' = (1 - a) x_i + chi * sum_j w_ij (msg_j - x_i)
                     + r_i(k+1) - (1 - a) r_i(k)
conventional  the same with a = 0, chi = 1 (classic dynamic consensus)
geometric     x_i' = x_i + sum_j w_ij (msg_j - x_i) + s_k (r_i(k+1) - r_i(k))
              with a geometrically decaying input weight s_k and
              geometrically decaying noise

The robust update weakens inter-agent coupling over time (chi decays) so
persistent noise cannot accumulate, while the stepsize a forgets stale
state so the average can still be tracked exactly.  States are never
clipped or projected; baselines that diverge are reported as they are.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .metrics import RunRecord, RunRecorder
from .schedules import Schedule
from .signals import SignalSpec
from .topology import Topology

__all__ = [
    "AlgorithmKind",
    "ConsensusState",
    "DimensionMismatch",
    "ObservationRecord",
    "SimulationResult",
    "init_state",
    "mean_state",
    "simulate",
    "step_conventional",
    "step_geometric",
    "step_robust",
]


class DimensionMismatch(ValueError):
    """State, topology, signal, or channel shapes are inconsistent."""


class AlgorithmKind(str, Enum):
    """Which update rule a run executes."""

    ROBUST = "robust"
    CONVENTIONAL = "conventional"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class ConsensusState:
    """All per-agent state at the start of round ``k``.

    ``x`` holds the agent states, ``r_curr``/``r_next`` the reference
    values at rounds ``k`` and ``k + 1`` (the next reference is sampled at
    the start of the round).  The signal spec rides along so stepping can
    advance the references.
    """

    k: int
    x: np.ndarray  # (m, d)
    r_curr: np.ndarray  # (m, d)
    r_next: np.ndarray  # (m, d)
    signal: SignalSpec

    @property
    def m(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class ObservationRecord:
    """The obscured states broadcast in one round (what an adversary sees)."""

    k: int
    messages: np.ndarray  # (m, d)


def init_state(signal: SignalSpec) -> ConsensusState:
    """Round-0 state with every agent initialized to its own reference."""
    r0 = np.array(signal.sample_all(0), dtype=float)
    r1 = np.array(signal.sample_all(1), dtype=float)
    return ConsensusState(k=0, x=r0.copy(), r_curr=r0, r_next=r1, signal=signal)


def mean_state(state: ConsensusState) -> np.ndarray:
    """The network-wide state average at the current round."""
    return state.x.mean(axis=0)


def _check_shapes(state: ConsensusState, topology: Topology, channels) -> None:
    if state.x.shape != state.r_curr.shape or state.x.shape != state.r_next.shape:
        raise DimensionMismatch("state and reference arrays differ in shape")
    if state.m != topology.m:
        raise DimensionMismatch(f"state has {state.m} agents, topology has {topology.m}")
    if len(channels) != state.m:
        raise DimensionMismatch(f"{len(channels)} channels for {state.m} agents")


def _broadcast(state: ConsensusState, channels) -> np.ndarray:
    """One obscured message per sender: ``x_j`` plus one fresh noise draw."""
    d = state.d
    k = state.k
    messages = state.x.copy()
    for j, ch in enumerate(channels):
        messages[j] += ch.draw(k, d)
    return messages


def _coupling(topology: Topology, x: np.ndarray, messages: np.ndarray) -> np.ndarray:
    """Per-agent neighbor sums ``sum_j w_ij * (msg_j - x_i)``."""
    out = np.empty_like(x)
    degrees = topology.degrees
    for i, (idx, w) in enumerate(topology.neighbor_lists):
        if len(idx) == 0:
            out[i] = 0.0
        else:
            out[i] = w @ messages[idx] - degrees[i] * x[i]
    return out


def _advance(state: ConsensusState, x_new: np.ndarray) -> ConsensusState:
    k_next = state.k + 1
    return ConsensusState(
        k=k_next,
        x=x_new,
        r_curr=state.r_next,
        r_next=np.array(state.signal.sample_all(k_next + 1), dtype=float),
        signal=state.signal,
    )


def step_robust(
    state: ConsensusState,
    topology: Topology,
    alpha: float,
    chi: float,
    channels,
    messages: np.ndarray | None = None,
) -> tuple[ConsensusState, ObservationRecord]:
    """One round of the noise-robust update with stepsize/weakening values.

    Every sender draws exactly once; every receiver uses the same obscured
    message from a given sender.  The returned observation record carries
    those messages.  Passing ``messages`` replays a recorded round (or
    forces a chosen observation) instead of drawing fresh noise.
    """
    _check_shapes(state, topology, channels)
    if messages is None:
        messages = _broadcast(state, channels)
    coupling = _coupling(topology, state.x, messages)
    x_new = (1.0 - alpha) * state.x + chi * coupling + state.r_next - (1.0 - alpha) * state.r_curr
    return _advance(state, x_new), ObservationRecord(k=state.k, messages=messages)


def step_conventional(
    state: ConsensusState, topology: Topology, channels, messages: np.ndarray | None = None
) -> tuple[ConsensusState, ObservationRecord]:
    """One round of classic dynamic consensus (no forgetting, no weakening)."""
    return step_robust(state, topology, alpha=0.0, chi=1.0, channels=channels, messages=messages)


def step_geometric(
    state: ConsensusState,
    topology: Topology,
    channels,
    input_weight: float,
    messages: np.ndarray | None = None,
) -> tuple[ConsensusState, ObservationRecord]:
    """One round of the geometrically weighted baseline.

    The reference increment enters scaled by ``input_weight`` (a
    geometrically decaying sequence), which makes the total injected input
    summable: the run stops following a moving average once the weight has
    decayed, so a steady-state offset remains.
    """
    _check_shapes(state, topology, channels)
    if messages is None:
        messages = _broadcast(state, channels)
    coupling = _coupling(topology, state.x, messages)
    x_new = state.x + coupling + input_weight * (state.r_next - state.r_curr)
    return _advance(state, x_new), ObservationRecord(k=state.k, messages=messages)


@dataclass
class SimulationResult:
    """Output of :func:`simulate`: metrics plus optional raw material."""

    record: RunRecord
    final_state: ConsensusState
    observations: list[ObservationRecord] | None = None
    state_dump: list[tuple[int, np.ndarray]] | None = None


def simulate(
    topology: Topology,
    signal: SignalSpec,
    channels,
    horizon: int,
    kind: AlgorithmKind = AlgorithmKind.ROBUST,
    *,
    stepsize: Schedule | None = None,
    weakening: Schedule | None = None,
    drift_scale: Schedule | None = None,
    input_weight: Schedule | None = None,
    keep_observations: bool = False,
    dump_every: int = 0,
) -> SimulationResult:
    """Run ``horizon`` rounds of one algorithm and record per-round metrics.

    The robust kind requires ``stepsize`` and ``weakening``; the geometric
    kind requires ``input_weight``.  ``drift_scale`` feeds the s2
    diagnostic sum and defaults to 1 at every round when omitted.  Rows are
    emitted for rounds ``1..horizon``; the diagnostic sums include the
    round-0 term.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if kind == AlgorithmKind.ROBUST and (stepsize is None or weakening is None):
        raise ValueError("robust runs need stepsize and weakening schedules")
    if kind == AlgorithmKind.GEOMETRIC and input_weight is None:
        raise ValueError("geometric runs need an input weight schedule")

    ks = np.arange(horizon + 1)
    if kind == AlgorithmKind.ROBUST:
        alphas = stepsize.eval_array(ks)
        chis = weakening.eval_array(ks)
    else:
        alphas = np.zeros(horizon + 1)
        chis = np.ones(horizon + 1)
    weights = input_weight.eval_array(ks) if input_weight is not None else None
    gammas = drift_scale.eval_array(ks) if drift_scale is not None else np.ones(horizon + 1)

    state = init_state(signal)
    _check_shapes(state, topology, channels)

    recorder = RunRecorder()
    recorder.observe(0, state.x, signal.average(0), float(chis[0]), float(gammas[0]), emit_row=False)
    observations: list[ObservationRecord] | None = [] if keep_observations else None
    dump: list[tuple[int, np.ndarray]] | None = [] if dump_every > 0 else None
    if dump is not None:
        dump.append((0, state.x.copy()))

    for k in range(horizon):
        if kind == AlgorithmKind.ROBUST:
            state, obs = step_robust(state, topology, float(alphas[k]), float(chis[k]), channels)
        elif kind == AlgorithmKind.CONVENTIONAL:
            state, obs = step_conventional(state, topology, channels)
        else:
            state, obs = step_geometric(state, topology, channels, float(weights[k]))
        if observations is not None:
            observations.append(obs)
        k_now = k + 1
        recorder.observe(
            k_now,
            state.x,
            signal.average(k_now),
            float(chis[k_now]),
            float(gammas[k_now]),
        )
        if dump is not None and k_now % dump_every == 0:
            dump.append((k_now, state.x.copy()))

    return SimulationResult(
        record=recorder.finalize(),
        final_state=state,
        observations=observations,
        state_dump=dump,
    )
