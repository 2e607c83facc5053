"""Inter-agent weight matrices, their spectra, and contraction bounds.

The communication structure of an ``m``-agent network is described by a
symmetric weight matrix ``L`` with nonnegative off-diagonal entries
(``L[i, j] > 0`` iff agents ``i`` and ``j`` exchange messages) and diagonal
entries fixed to minus the row's off-diagonal sum, so rows and columns sum
to zero.  A valid matrix additionally satisfies the mixing condition

    || I + L - ones/m || = max(|1 + rho_2|, |1 + rho_m|) < 1,

where ``rho_m <= ... <= rho_2 <= rho_1 = 0`` are the eigenvalues of ``L``.
This implies the induced graph is connected (``rho_2 < 0`` strictly).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "CONNECTIVITY_TOL",
    "ROW_SUM_TOL",
    "DisconnectedGraph",
    "InvalidEdge",
    "OffDiagonalTopology",
    "ParameterOutOfRange",
    "SpectralConditionViolated",
    "Topology",
    "build_topology",
    "complete_topology",
    "contraction_norm",
    "off_diagonal",
    "path_topology",
    "ring_topology",
    "spectral_gap",
]

#: Eigenvalues above -CONNECTIVITY_TOL are treated as zero: a repeated zero
#: eigenvalue means a disconnected interaction graph.
CONNECTIVITY_TOL = 1e-9

#: Per-entry tolerance for the zero row/column-sum invariant.
ROW_SUM_TOL = 1e-12


class InvalidEdge(ValueError):
    """Edge list entry with bad indices, self-loop, duplicate, or weight <= 0."""


class DisconnectedGraph(ValueError):
    """The weight matrix has a repeated zero eigenvalue (graph not connected)."""


class SpectralConditionViolated(ValueError):
    """max(|1 + rho_2|, |1 + rho_m|) >= 1: weights too large for stable mixing."""


class ParameterOutOfRange(ValueError):
    """Scalar argument outside its documented domain."""


@dataclass(frozen=True)
class Topology:
    """Validated symmetric weight matrix with cached spectrum.

    Attributes
    ----------
    m : int
        Number of agents (>= 1).
    weights : (m, m) ndarray
        Symmetric weight matrix; read-only after construction.
    eigenvalues : (m,) ndarray
        Eigenvalues sorted ascending, ``eigenvalues[-1] == 0`` up to solver
        tolerance.  Read-only.
    """

    m: int
    weights: np.ndarray
    eigenvalues: np.ndarray

    @property
    def second_largest_eigenvalue(self) -> float:
        """rho_2, strictly negative for a connected graph with m >= 2."""
        if self.m < 2:
            raise ParameterOutOfRange("single-agent network has no second eigenvalue")
        return float(self.eigenvalues[-2])

    @property
    def smallest_eigenvalue(self) -> float:
        """rho_m, the most negative eigenvalue."""
        return float(self.eigenvalues[0])

    @property
    def agreement_norm(self) -> float:
        """|| I + L - ones/m || = max(|1 + rho_2|, |1 + rho_m|); 0 for m == 1."""
        if self.m < 2:
            return 0.0
        return max(abs(1.0 + self.second_largest_eigenvalue), abs(1.0 + self.smallest_eigenvalue))

    @cached_property
    def degrees(self) -> np.ndarray:
        """Weighted degree of each agent, equal to -diag(weights)."""
        d = -np.diag(self.weights)
        d.flags.writeable = False
        return d

    @cached_property
    def neighbor_lists(self) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
        """Per-agent ``(indices, weights)`` arrays of strictly positive edges."""
        out = []
        for i in range(self.m):
            row = self.weights[i].copy()
            row[i] = 0.0
            idx = np.flatnonzero(row > 0.0)
            w = row[idx]
            idx.flags.writeable = False
            w.flags.writeable = False
            out.append((idx, w))
        return tuple(out)


@dataclass(frozen=True)
class OffDiagonalTopology:
    """The weight matrix with its diagonal zeroed, and that matrix's norm.

    This is the matrix that multiplies the stacked noise vector in the
    per-coordinate form of the update, so its spectral norm bounds how much
    injected noise can enter a round.
    """

    base: Topology
    weights0: np.ndarray
    norm0: float


def off_diagonal(topology: Topology) -> OffDiagonalTopology:
    """Zero the diagonal of a validated topology and compute the result's norm."""
    w0 = topology.weights.copy()
    np.fill_diagonal(w0, 0.0)
    # symmetric, so the spectral norm is the largest absolute eigenvalue
    norm0 = float(np.max(np.abs(np.linalg.eigvalsh(w0)))) if topology.m > 1 else 0.0
    w0.flags.writeable = False
    return OffDiagonalTopology(base=topology, weights0=w0, norm0=norm0)


def build_topology(m: int, edges: list[tuple[int, int, float]]) -> Topology:
    """Construct and validate a topology from an undirected edge list.

    Parameters
    ----------
    m : int
        Agent count, >= 1.
    edges : list of (i, j, weight)
        1-based agent indices with ``i != j`` and ``weight > 0``.  Each
        undirected pair may appear at most once.

    Raises
    ------
    InvalidEdge
        On bad indices, self-loops, nonpositive weights, or duplicates.
    DisconnectedGraph
        If the second largest eigenvalue is not strictly negative.
    SpectralConditionViolated
        If max(|1 + rho_2|, |1 + rho_m|) >= 1.
    """
    if m < 1:
        raise InvalidEdge(f"agent count must be >= 1, got {m}")
    weights = np.zeros((m, m))
    seen: set[tuple[int, int]] = set()
    for i, j, w in edges:
        if not (1 <= i <= m and 1 <= j <= m):
            raise InvalidEdge(f"edge ({i}, {j}) outside 1..{m}")
        if i == j:
            raise InvalidEdge(f"self-loop on agent {i}")
        if not w > 0.0:
            raise InvalidEdge(f"edge ({i}, {j}) has nonpositive weight {w}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise InvalidEdge(f"duplicate edge ({i}, {j})")
        seen.add(key)
        weights[i - 1, j - 1] = w
        weights[j - 1, i - 1] = w
    np.fill_diagonal(weights, 0.0)
    np.fill_diagonal(weights, -weights.sum(axis=1))

    row_sums = weights.sum(axis=1)
    if np.max(np.abs(row_sums)) > ROW_SUM_TOL:
        raise InvalidEdge(f"row sums deviate from zero by {np.max(np.abs(row_sums)):g}")

    eigenvalues = np.linalg.eigvalsh(weights)
    if abs(eigenvalues[-1]) > CONNECTIVITY_TOL:
        raise SpectralConditionViolated(
            f"largest eigenvalue {eigenvalues[-1]:g} not zero; weights are inconsistent"
        )
    if m >= 2:
        if eigenvalues[-2] >= -CONNECTIVITY_TOL:
            raise DisconnectedGraph(
                f"second largest eigenvalue {eigenvalues[-2]:g} is not strictly negative; "
                "the interaction graph is not connected"
            )
        norm = max(abs(1.0 + eigenvalues[-2]), abs(1.0 + eigenvalues[0]))
        if norm >= 1.0:
            raise SpectralConditionViolated(
                f"max(|1 + rho_2|, |1 + rho_m|) = {norm:g} >= 1; reduce edge weights"
            )

    weights.flags.writeable = False
    eigenvalues.flags.writeable = False
    return Topology(m=m, weights=weights, eigenvalues=eigenvalues)


def ring_topology(m: int, weight: float) -> Topology:
    """Ring of ``m`` agents with a uniform edge weight."""
    if m == 1:
        return build_topology(1, [])
    if m == 2:
        return build_topology(2, [(1, 2, weight)])
    edges = [(i, i % m + 1, weight) for i in range(1, m + 1)]
    return build_topology(m, edges)


def complete_topology(m: int, weight: float) -> Topology:
    """Complete graph on ``m`` agents with a uniform edge weight."""
    edges = [(i, j, weight) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
    return build_topology(m, edges)


def path_topology(m: int, weight: float) -> Topology:
    """Path graph 1-2-...-m with a uniform edge weight."""
    edges = [(i, i + 1, weight) for i in range(1, m)]
    return build_topology(m, edges)


def spectral_gap(topology: Topology) -> float:
    """|rho_2|: distance of the second largest eigenvalue from zero."""
    return abs(topology.second_largest_eigenvalue)


def contraction_norm(topology: Topology, alpha: float, chi: float) -> float:
    """Norm of the per-round mixing matrix (1 - alpha) * P + chi * L.

    ``P`` is the projector ``I - ones/m`` onto the disagreement subspace.
    On that subspace the matrix has eigenvalues ``1 - alpha + chi * rho_i``
    for ``i = 2..m``; along the all-ones direction it is zero.

    Parameters
    ----------
    alpha : float
        Forgetting stepsize, ``0 <= alpha < 1``.
    chi : float
        Coupling weight, ``chi >= 0``.
    """
    if not (0.0 <= alpha < 1.0):
        raise ParameterOutOfRange(f"stepsize must be in [0, 1), got {alpha}")
    if chi < 0.0:
        raise ParameterOutOfRange(f"coupling weight must be >= 0, got {chi}")
    if topology.m < 2:
        return 0.0
    vals = np.abs(1.0 - alpha + chi * topology.eigenvalues[:-1])
    return float(max(np.max(vals), 0.0))
