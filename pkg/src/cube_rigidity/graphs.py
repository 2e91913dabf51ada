"""Weighted-graph data model: constructors, combinatorial metrics, class membership.

A weighted graph is a triple (V, w, m): a vertex set with a symmetric
nonnegative edge weight w vanishing on the diagonal and a positive vertex
measure m.  Vertices are opaque strings kept in lexicographic order; every
array-valued quantity (measure, weight rows, vertex functions) follows that
order, which makes all outputs deterministic.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DisconnectedGraph,
    DomainMismatch,
    DuplicateEdge,
    DuplicateVertex,
    GraphTooLarge,
    InvalidParameter,
    MalformedGraph,
    NegativeWeight,
    NonpositiveMeasure,
    NonUnitMeasure,
    NotAnEdge,
    SelfLoop,
    UnknownVertex,
)

HARD_VERTEX_CAP = 4096
ENV_VERTEX_CAP = "CUBE_RIGIDITY_MAX_VERTICES"


def max_vertices() -> int:
    """Vertex cap enforced by all constructors.

    The environment variable CUBE_RIGIDITY_MAX_VERTICES may lower the
    built-in cap of 4096 but never raise it.
    """
    raw = os.environ.get(ENV_VERTEX_CAP)
    if raw is None:
        return HARD_VERTEX_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InvalidParameter(
            f"{ENV_VERTEX_CAP} must be an integer, got {raw!r}"
        ) from exc
    if cap < 1:
        raise InvalidParameter(f"{ENV_VERTEX_CAP} must be positive, got {cap}")
    return min(cap, HARD_VERTEX_CAP)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable weighted graph.

    ``measure_scale`` is the multiplier that maps the stored measure onto the
    convention that the vertex closest to unit measure has m = 1 exactly; it
    equals 1.0 when the stored measure already satisfies the convention.
    """

    vertex_ids: tuple[str, ...]
    measure: np.ndarray
    weight: np.ndarray
    measure_scale: float = 1.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    def index(self, vertex: str) -> int:
        idx = self._index_map().get(vertex)
        if idx is None:
            raise UnknownVertex(f"vertex {vertex!r} not in graph")
        return idx

    def _index_map(self) -> dict[str, int]:
        cached = self._cache.get("index_map")
        if cached is None:
            cached = {v: i for i, v in enumerate(self.vertex_ids)}
            self._cache["index_map"] = cached
        return cached

    def neighbors(self, i: int) -> np.ndarray:
        lists = self._cache.get("neighbors")
        if lists is None:
            lists = [np.flatnonzero(self.weight[k] > 0.0) for k in range(self.n)]
            self._cache["neighbors"] = lists
        return lists[i]

    def degree_vector(self) -> np.ndarray:
        cached = self._cache.get("deg")
        if cached is None:
            cached = np.array([self.neighbors(i).size for i in range(self.n)])
            cached.setflags(write=False)
            self._cache["deg"] = cached
        return cached

    def weighted_degree_vector(self) -> np.ndarray:
        """Deg(x) = (1/m(x)) * sum_y w(x,y), accumulated with fsum per row."""
        cached = self._cache.get("Deg")
        if cached is None:
            cached = np.array(
                [
                    math.fsum(self.weight[i, j] for j in self.neighbors(i))
                    / self.measure[i]
                    for i in range(self.n)
                ]
            )
            cached.setflags(write=False)
            self._cache["Deg"] = cached
        return cached

    @property
    def deg_max(self) -> int:
        return int(self.degree_vector().max()) if self.n else 0

    @property
    def Deg_max(self) -> float:
        return float(self.weighted_degree_vector().max()) if self.n else 0.0

    def normalized_measure(self) -> np.ndarray:
        return self.measure * self.measure_scale

    def min_edge_weight(self) -> float:
        positive = self.weight[self.weight > 0.0]
        return float(positive.min()) if positive.size else math.inf

    def distances_from_index(self, i: int) -> np.ndarray:
        rows = self._cache.setdefault("dist_rows", {})
        row = rows.get(i)
        if row is None:
            row = _bfs(self, i)
            row.setflags(write=False)
            rows[i] = row
        return row

    def distance_matrix(self) -> np.ndarray:
        cached = self._cache.get("dist_matrix")
        if cached is None:
            cached = np.vstack([self.distances_from_index(i) for i in range(self.n)])
            cached.setflags(write=False)
            self._cache["dist_matrix"] = cached
        return cached


def _bfs(G: WeightedGraph, source: int) -> np.ndarray:
    dist = np.full(G.n, -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in G.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(int(v))
    return dist


def _finalize(
    ids: tuple[str, ...],
    measure: np.ndarray,
    weight: np.ndarray,
    normalize_measure: bool,
) -> WeightedGraph:
    """Shared constructor tail: connectivity, cap and measure normalization."""
    n = len(ids)
    if n > max_vertices():
        raise GraphTooLarge(f"{n} vertices exceeds the cap of {max_vertices()}")
    graph = WeightedGraph(ids, measure, weight)
    reached = int(np.count_nonzero(_bfs(graph, 0) >= 0)) if n else 0
    if reached != n:
        raise DisconnectedGraph(
            f"only {reached} of {n} vertices reachable from {ids[0]!r}"
        )
    pivot = int(np.argmin(np.abs(measure - 1.0)))
    if normalize_measure:
        measure = measure / measure[pivot]
        scale = 1.0
    else:
        scale = 1.0 / measure[pivot]
    measure.setflags(write=False)
    weight.setflags(write=False)
    return WeightedGraph(ids, measure, weight, scale)


def build_graph(
    vertices: Iterable[tuple[str, float]],
    edges: Iterable[tuple[str, str, float]],
    normalize_measure: bool = False,
) -> WeightedGraph:
    """Validate vertex and edge lists and build a connected weighted graph.

    Measures must be positive, weights positive, edges listed once per
    undirected pair with no self loops.  With ``normalize_measure`` the
    measure is rescaled so the vertex of minimal index with minimal |m - 1|
    gets m = 1; otherwise measures are stored as given and the would-be
    rescaling factor is recorded in ``measure_scale``.
    """
    measures: dict[str, float] = {}
    for vid, m in vertices:
        if not isinstance(vid, str):
            raise InvalidParameter(f"vertex ids must be strings, got {vid!r}")
        if vid in measures:
            raise DuplicateVertex(f"vertex {vid!r} listed twice")
        m = float(m)
        if not math.isfinite(m) or m <= 0.0:
            raise NonpositiveMeasure(f"m({vid!r}) = {m} must be positive")
        measures[vid] = m
    if not measures:
        raise InvalidParameter("graph needs at least one vertex")
    ids = tuple(sorted(measures))
    index = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    weight = np.zeros((n, n))
    seen: set[tuple[str, str]] = set()
    for u, v, w in edges:
        if u not in index:
            raise UnknownVertex(f"edge endpoint {u!r} not in vertex list")
        if v not in index:
            raise UnknownVertex(f"edge endpoint {v!r} not in vertex list")
        if u == v:
            raise SelfLoop(f"self loop at {u!r}")
        w = float(w)
        if not math.isfinite(w) or w <= 0.0:
            raise NegativeWeight(f"w({u!r},{v!r}) = {w} must be positive")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed twice")
        seen.add(key)
        weight[index[u], index[v]] = w
        weight[index[v], index[u]] = w
    m_arr = np.array([measures[v] for v in ids])
    return _finalize(ids, m_arr, weight, normalize_measure)


def hypercube(d: int, c: float) -> WeightedGraph:
    """The weighted d-cube H_d(c): unit measure, every oriented edge degree c.

    Vertices are the d-bit strings; two vertices are adjacent exactly when
    they differ in one coordinate.
    """
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InvalidParameter(f"hypercube dimension must be a positive integer, got {d!r}")
    c = float(c)
    if not math.isfinite(c) or c <= 0.0:
        raise InvalidParameter(f"edge degree must be positive, got {c}")
    n = 1 << d
    if n > max_vertices():
        raise GraphTooLarge(f"2^{d} = {n} vertices exceeds the cap of {max_vertices()}")
    ids = tuple(format(i, f"0{d}b") for i in range(n))
    weight = np.zeros((n, n))
    for i in range(n):
        for b in range(d):
            weight[i, i ^ (1 << b)] = c
    return _finalize(ids, np.ones(n), weight, normalize_measure=False)


def cartesian_product(G1: WeightedGraph, G2: WeightedGraph) -> WeightedGraph:
    """Cartesian product of two unit-measure graphs.

    Edges connect (u1,v) ~ (u2,v) with weight w1(u1,u2) and (u,v1) ~ (u,v2)
    with weight w2(v1,v2); the product keeps unit measure.  Vertex ids of the
    factors are joined with a comma.
    """
    for G in (G1, G2):
        if np.any(G.measure != 1.0):
            raise NonUnitMeasure("cartesian product requires m = 1 on both factors")
    n1, n2 = G1.n, G2.n
    if n1 * n2 > max_vertices():
        raise GraphTooLarge(
            f"product has {n1 * n2} vertices, exceeding the cap of {max_vertices()}"
        )
    pair_ids = [f"{u},{v}" for u in G1.vertex_ids for v in G2.vertex_ids]
    if len(set(pair_ids)) != n1 * n2:
        raise DuplicateVertex("composed product vertex ids collide")
    weight = np.kron(G1.weight, np.eye(n2)) + np.kron(np.eye(n1), G2.weight)
    order = sorted(range(n1 * n2), key=lambda k: pair_ids[k])
    ids = tuple(pair_ids[k] for k in order)
    weight = weight[np.ix_(order, order)]
    return _finalize(ids, np.ones(n1 * n2), weight, normalize_measure=False)


def distances_from(G: WeightedGraph, x0: str) -> dict[str, int]:
    """Combinatorial (hop-count) distance from x0 to every vertex."""
    row = G.distances_from_index(G.index(x0))
    return {v: int(row[k]) for k, v in enumerate(G.vertex_ids)}


def sphere(G: WeightedGraph, x: str, k: int) -> list[str]:
    """S_k(x): vertices at combinatorial distance exactly k, in stable order."""
    if k < 0:
        raise InvalidParameter(f"radius must be nonnegative, got {k}")
    row = G.distances_from_index(G.index(x))
    return [G.vertex_ids[i] for i in np.flatnonzero(row == k)]


def ball(G: WeightedGraph, x: str, k: int) -> list[str]:
    """B_k(x): vertices at combinatorial distance at most k, in stable order."""
    if k < 0:
        raise InvalidParameter(f"radius must be nonnegative, got {k}")
    row = G.distances_from_index(G.index(x))
    return [G.vertex_ids[i] for i in np.flatnonzero((row >= 0) & (row <= k))]


def diameter(G: WeightedGraph) -> int:
    return int(G.distance_matrix().max())


def degrees(G: WeightedGraph, x: str) -> tuple[int, float]:
    """(combinatorial degree, weighted degree Deg) of a vertex."""
    i = G.index(x)
    return int(G.degree_vector()[i]), float(G.weighted_degree_vector()[i])


def edge_degree(G: WeightedGraph, x: str, y: str) -> float:
    """Oriented edge degree q(x,y) = w(x,y)/m(x)."""
    i, j = G.index(x), G.index(y)
    w = G.weight[i, j]
    if w <= 0.0:
        raise NotAnEdge(f"{x!r} and {y!r} are not adjacent")
    return float(w / G.measure[i])


def directional_degrees(G: WeightedGraph, x0: str, z: str) -> tuple[float, float, float]:
    """(d_plus, d_minus, d_zero): edge-degree mass of z split by the spheres about x0.

    d_plus sums q(z,y) over neighbors one step further from x0, d_zero over
    neighbors at equal distance, and d_minus is derived as
    (Deg(z) - d_plus) - d_zero, so the partition identity holds exactly in
    floating point; when every neighbor sits in one class the derived value
    is an exact 0 because the class sum shares the accumulation chain of
    Deg(z).
    """
    i0, iz = G.index(x0), G.index(z)
    dist = G.distances_from_index(i0)
    m_z = G.measure[iz]
    deg_w = float(G.weighted_degree_vector()[iz])
    class_sum = {}
    for label, offset in (("plus", 1), ("zero", 0)):
        members = [j for j in G.neighbors(iz) if dist[j] == dist[iz] + offset]
        class_sum[label] = math.fsum(G.weight[iz, j] for j in members) / m_z
    d_plus, d_zero = class_sum["plus"], class_sum["zero"]
    d_minus = (deg_w - d_plus) - d_zero
    return d_plus, d_minus, d_zero


def perturb(G: WeightedGraph, sigma_w: float, sigma_m: float, seed: int) -> WeightedGraph:
    """Multiplicative uniform noise on weights and measures, deterministic per seed.

    Each undirected edge weight is multiplied by one draw from
    [1 - sigma_w, 1 + sigma_w] (upper-triangle order), then each measure by a
    draw from [1 - sigma_m, 1 + sigma_m] (stable vertex order), and the
    measure is renormalized so one vertex has m = 1.  Multiplicative noise
    with sigma < 1 preserves the edge support.
    """
    for name, sigma in (("sigma_w", sigma_w), ("sigma_m", sigma_m)):
        if not (0.0 <= sigma < 1.0):
            raise InvalidParameter(f"{name} must lie in [0, 1), got {sigma}")
    rng = np.random.default_rng(seed)
    weight = G.weight.copy()
    rows, cols = np.triu_indices(G.n, k=1)
    on_edge = weight[rows, cols] > 0.0
    er, ec = rows[on_edge], cols[on_edge]
    weight[er, ec] *= rng.uniform(1.0 - sigma_w, 1.0 + sigma_w, size=er.size)
    weight[ec, er] = weight[er, ec]
    measure = G.measure * rng.uniform(1.0 - sigma_m, 1.0 + sigma_m, size=G.n)
    return _finalize(G.vertex_ids, measure, weight, normalize_measure=True)


@dataclass(frozen=True)
class ClassMembership:
    """Measured class quantities for the graph family G(D, d, delta)."""

    deg_max: int
    Deg_max: float
    measure_ratio_bound: float
    edge_measure_ratio: float
    min_edge_weight: float
    in_class: bool
    mode: str


def class_membership(
    G: WeightedGraph,
    D: float,
    d: int,
    delta: float,
    mode: str = "two-sided",
) -> ClassMembership:
    """Check membership in G(D, d, delta) and report all measured quantities.

    ``mode`` selects the measure condition: "two-sided" bounds m between
    1/delta and delta; "edge-ratio" bounds m(x)/m(y) <= delta on edges (the
    equivalent reformulation for normalized graphs).
    """
    if D <= 0:
        raise InvalidParameter(f"D must be positive, got {D}")
    if delta <= 1:
        raise InvalidParameter(f"delta must exceed 1, got {delta}")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InvalidParameter(f"d must be a positive integer, got {d!r}")
    if mode not in ("two-sided", "edge-ratio"):
        raise InvalidParameter(f"unknown measure-bound mode {mode!r}")
    m = G.measure
    deg_max = G.deg_max
    Deg_max = G.Deg_max
    two_sided = float(max(m.max(), 1.0 / m.min()))
    rows, cols = np.nonzero(G.weight > 0.0)
    edge_ratio = float((m[rows] / m[cols]).max()) if rows.size else 1.0
    measured = two_sided if mode == "two-sided" else edge_ratio
    in_class = deg_max == d and Deg_max <= D and measured <= delta
    return ClassMembership(
        deg_max=deg_max,
        Deg_max=Deg_max,
        measure_ratio_bound=two_sided,
        edge_measure_ratio=edge_ratio,
        min_edge_weight=G.min_edge_weight(),
        in_class=bool(in_class),
        mode=mode,
    )


def vertex_function(G: WeightedGraph, f) -> np.ndarray:
    """Coerce a mapping or array-like into an array in stable vertex order."""
    if isinstance(f, Mapping):
        missing = [v for v in G.vertex_ids if v not in f]
        if missing:
            raise DomainMismatch(f"function undefined on {missing[:3]}...")
        return np.array([float(f[v]) for v in G.vertex_ids])
    arr = np.asarray(f, dtype=float)
    if arr.shape != (G.n,):
        raise DomainMismatch(f"expected {G.n} values, got shape {arr.shape}")
    return arr


# --- graph JSON format ------------------------------------------------------
#
# {"vertices": [{"id": "000", "m": 1.0}, ...],
#  "edges":    [{"u": "000", "v": "001", "w": 1.0}, ...]}
#
# Edges are listed once per undirected pair; unknown keys are rejected.


def graph_from_json_dict(obj, normalize_measure: bool = False) -> WeightedGraph:
    if not isinstance(obj, dict) or set(obj) != {"vertices", "edges"}:
        raise MalformedGraph("top-level keys must be exactly 'vertices' and 'edges'")
    vertices = []
    for entry in obj["vertices"]:
        if not isinstance(entry, dict) or set(entry) != {"id", "m"}:
            raise MalformedGraph(f"vertex entries need exactly 'id' and 'm': {entry!r}")
        if not isinstance(entry["id"], str) or isinstance(entry["m"], (str, bool)):
            raise MalformedGraph(f"vertex entry has wrong types: {entry!r}")
        vertices.append((entry["id"], float(entry["m"])))
    edges = []
    for entry in obj["edges"]:
        if not isinstance(entry, dict) or set(entry) != {"u", "v", "w"}:
            raise MalformedGraph(f"edge entries need exactly 'u', 'v' and 'w': {entry!r}")
        if (
            not isinstance(entry["u"], str)
            or not isinstance(entry["v"], str)
            or isinstance(entry["w"], (str, bool))
        ):
            raise MalformedGraph(f"edge entry has wrong types: {entry!r}")
        edges.append((entry["u"], entry["v"], float(entry["w"])))
    return build_graph(vertices, edges, normalize_measure=normalize_measure)


def graph_to_json_dict(G: WeightedGraph) -> dict:
    vertices = [
        {"id": v, "m": float(G.measure[i])} for i, v in enumerate(G.vertex_ids)
    ]
    edges = []
    rows, cols = np.triu_indices(G.n, k=1)
    for i, j in zip(rows, cols):
        w = G.weight[i, j]
        if w > 0.0:
            edges.append(
                {"u": G.vertex_ids[i], "v": G.vertex_ids[j], "w": float(w)}
            )
    return {"vertices": vertices, "edges": edges}
