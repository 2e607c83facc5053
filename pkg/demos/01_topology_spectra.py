"""Weight matrices and what their spectra say about mixing.

Builds a few small networks, prints their eigenvalues, and shows the two
quantities every run depends on: the spectral gap |rho_2| (how fast
disagreement contracts) and the mixing norm max(|1+rho_2|, |1+rho_m|)
(which must stay below 1 for the graph to be usable at full coupling).
Also demonstrates the rejection of disconnected or overweighted graphs.
"""

import numpy as np

from dpconsensus import (
    DisconnectedGraph,
    SpectralConditionViolated,
    build_topology,
    complete_topology,
    contraction_norm,
    path_topology,
    ring_topology,
    spectral_gap,
)


def describe(name, topo):
    eigs = ", ".join(f"{v: .5f}" for v in topo.eigenvalues)
    print(f"{name:18s} eigenvalues [{eigs}]")
    print(f"{'':18s} spectral gap {spectral_gap(topo):.5f}   mixing norm {topo.agreement_norm:.5f}")


describe("ring(5, w=0.2)", ring_topology(5, 0.2))
describe("path(5, w=0.2)", path_topology(5, 0.2))
describe("complete(5, w=0.19)", complete_topology(5, 0.19))

print()
print("per-round contraction on the ring, norm of (1-a)P + chi*L;")
print("the gap bound 1 - chi*|rho_2| only kicks in once chi has decayed:")
topo = ring_topology(5, 0.2)
for k in (0, 1, 10, 100, 1000):
    chi = 2.0 / (1.0 + k**0.9)
    alpha = 0.01 / (1.0 + k)
    norm = contraction_norm(topo, alpha, chi)
    bound = 1 - chi * spectral_gap(topo)
    marker = "<" if norm < bound else ">="
    print(f"  round {k:5d}: alpha={alpha:.6f} chi={chi:.4f} -> norm {norm:.5f} "
          f"{marker} gap bound {bound:.5f}")

print()
print("rejections:")
try:
    build_topology(4, [(1, 2, 0.3), (3, 4, 0.3)])
except DisconnectedGraph as exc:
    print(f"  two components     -> {type(exc).__name__}: {exc}")
try:
    complete_topology(4, 1.0)
except SpectralConditionViolated as exc:
    print(f"  overweighted edges -> {type(exc).__name__}: {exc}")
