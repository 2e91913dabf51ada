"""Shared helpers: seeded random graphs and vertex functions."""

from __future__ import annotations

import numpy as np

from cube_rigidity import WeightedGraph, build_graph


def random_connected_graph(
    rng: np.random.Generator,
    n: int,
    extra_edges: int | None = None,
    weight_range: tuple[float, float] = (0.5, 2.0),
    measure_range: tuple[float, float] = (0.5, 2.0),
) -> WeightedGraph:
    """Random spanning tree plus extra edges; positive random weights and measures."""
    ids = [f"v{k:02d}" for k in range(n)]
    taken: set[tuple[int, int]] = set()
    edges = []
    for k in range(1, n):
        p = int(rng.integers(0, k))
        taken.add((min(p, k), max(p, k)))
        edges.append((ids[p], ids[k], float(rng.uniform(*weight_range))))
    if extra_edges is None:
        extra_edges = n
    for _ in range(extra_edges):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        key = (min(a, b), max(a, b))
        if a != b and key not in taken:
            taken.add(key)
            edges.append((ids[a], ids[b], float(rng.uniform(*weight_range))))
    vertices = [(v, float(rng.uniform(*measure_range))) for v in ids]
    return build_graph(vertices, edges)


def distance_vector(G: WeightedGraph, x0: str) -> np.ndarray:
    return G.distances_from_index(G.index(x0)).astype(float)
