"""Independent reference implementations used only by the test suite.

The dense-matrix step below is built directly from the stacked
per-coordinate form of the round update,

    x' = (1 - a) x + chi * (W x + W0 z) + r_next - (1 - a) r_curr,

where ``W`` is the full weight matrix, ``W0`` is ``W`` with its diagonal
zeroed, and ``z`` are the noise vectors recovered from the broadcast
messages.  It shares no code with the engine's per-agent neighbor sums.
"""

from __future__ import annotations

import numpy as np


def dense_robust_step(
    weights: np.ndarray,
    x: np.ndarray,
    zeta: np.ndarray,
    alpha: float,
    chi: float,
    r_curr: np.ndarray,
    r_next: np.ndarray,
) -> np.ndarray:
    w0 = weights.copy()
    np.fill_diagonal(w0, 0.0)
    return (1.0 - alpha) * x + chi * (weights @ x + w0 @ zeta) + r_next - (1.0 - alpha) * r_curr


def dense_geometric_step(
    weights: np.ndarray,
    x: np.ndarray,
    zeta: np.ndarray,
    input_weight: float,
    r_curr: np.ndarray,
    r_next: np.ndarray,
) -> np.ndarray:
    w0 = weights.copy()
    np.fill_diagonal(w0, 0.0)
    return x + weights @ x + w0 @ zeta + input_weight * (r_next - r_curr)


def replay_dense_trajectory(
    topology,
    signal,
    observations,
    alphas: np.ndarray,
    chis: np.ndarray,
    input_weights: np.ndarray | None = None,
) -> np.ndarray:
    """Re-run a recorded run through the dense step; returns (K+1, m, d)."""
    x = np.array(signal.sample_all(0), dtype=float)
    out = [x.copy()]
    for k, obs in enumerate(observations):
        zeta = obs.messages - x
        r_curr = signal.sample_all(k)
        r_next = signal.sample_all(k + 1)
        if input_weights is None:
            x = dense_robust_step(
                topology.weights, x, zeta, float(alphas[k]), float(chis[k]), r_curr, r_next
            )
        else:
            x = dense_geometric_step(
                topology.weights, x, zeta, float(input_weights[k]), r_curr, r_next
            )
        out.append(x.copy())
    return np.stack(out)
