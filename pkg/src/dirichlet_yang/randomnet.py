"""Seeded random networks and test functions for property checks."""

import numpy as np

from .errors import DomainError
from .network import HostNetwork, TestFunction


def random_network(vertices: int, seed: int, density: float = 0.5, loops: float = 0.2) -> HostNetwork:
    """Connected random network with conductances in ``[0.1, 1]``.

    A random spanning tree guarantees connectivity; every other pair becomes
    an edge with probability ``density`` and every vertex gets a self-loop
    with probability ``loops``.  About a third of the vertices are boundary
    vertices whose ``pi`` carries a random surplus standing in for edges
    that leave the host.
    """
    if vertices < 2:
        raise DomainError("random_network needs at least two vertices")
    if not 0 < density <= 1:
        raise DomainError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    order = rng.permutation(vertices)
    pairs = set()
    for t in range(1, vertices):
        parent = order[rng.integers(t)]
        a, b = sorted((int(order[t]), int(parent)))
        pairs.add((a, b))
    for a in range(vertices):
        for b in range(a + 1, vertices):
            if (a, b) not in pairs and rng.random() < density:
                pairs.add((a, b))
    for a in range(vertices):
        if rng.random() < loops:
            pairs.add((a, a))
    pairs = sorted(pairs)
    cond = rng.uniform(0.1, 1.0, size=len(pairs))

    pi = np.zeros(vertices)
    for (a, b), c in zip(pairs, cond):
        pi[a] += c
        if a != b:
            pi[b] += c
    n_boundary = max(1, vertices // 3)
    boundary = rng.choice(vertices, size=n_boundary, replace=False)
    pi[boundary] += rng.uniform(0.1, 1.0, size=n_boundary)
    interior = sorted(set(range(vertices)) - set(int(v) for v in boundary))
    edges = [(a, b, float(c)) for (a, b), c in zip(pairs, cond)]
    return HostNetwork.from_edges(vertices, pi, edges, interior)


def random_test_function(net: HostNetwork, dim: int, seed: int) -> TestFunction:
    """Independent uniform values in ``[-1, 1]`` per vertex and coordinate."""
    if dim < 1:
        raise DomainError("dimension must be at least 1")
    rng = np.random.default_rng([seed, dim, 1])
    return TestFunction(rng.uniform(-1.0, 1.0, size=(net.n_vertices, dim)))
