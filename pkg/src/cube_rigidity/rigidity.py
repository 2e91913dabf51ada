"""Hypercube detection, Frobenius-distance matching and the almost-rigidity report.

The Frobenius distance between two n-vertex weighted graphs is the minimum of
||A_G^pi - A_H||_F over vertex permutations pi, where A(x,y) = q(x,y) on
oriented edges and 0 elsewhere.  The exact minimum is a quadratic-assignment
problem, so brute force is only attempted through n = 8; for detected
hypercubes beyond that size the search is restricted to the combinatorial
isomorphisms and the result is labeled as such (an upper bound on the true
minimum).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .curvature import cd_check, curvature
from .errors import (
    InvalidParameter,
    NonpositiveK,
    NotAHypercube,
    TooLargeForExact,
)
from .graphs import WeightedGraph, diameter, hypercube
from .spectral import SpectralData, spectrum

EXACT_SIZE_LIMIT = 8

_PERMUTATION_CACHE: dict[int, np.ndarray] = {}


@dataclass(frozen=True)
class HypercubeLabeling:
    """A bijection of the vertex set onto d-bit strings realizing H_d:
    w(x,y) > 0 exactly when the labels differ in one bit."""

    dimension: int
    labels: dict[str, str]


def detect_hypercube(G: WeightedGraph) -> Optional[HypercubeLabeling]:
    """Detect whether the combinatorial structure is a hypercube; label it if so.

    Requires |V| = 2^d and d-regularity, then grows labels outward from a
    base vertex: the neighbors get the unit bitstrings and every later vertex
    the bitwise OR forced by two already-labeled neighbors.  The full edge
    predicate is verified at the end; any failure returns None.
    """
    n = G.n
    d = n.bit_length() - 1
    if (1 << d) != n:
        return None
    if d == 0:
        return HypercubeLabeling(dimension=0, labels={G.vertex_ids[0]: ""})
    degs = G.degree_vector()
    if degs.min() != d or degs.max() != d:
        return None

    dist = G.distances_from_index(0)
    labels = np.full(n, -1, dtype=np.int64)
    labels[0] = 0
    for bit, j in enumerate(G.neighbors(0)):
        labels[j] = 1 << bit
    used = set(int(v) for v in labels[labels >= 0])
    if len(used) != d + 1:
        return None
    max_dist = int(dist.max())
    for k in range(2, max_dist + 1):
        for z in np.flatnonzero(dist == k):
            back = [j for j in G.neighbors(z) if dist[j] == k - 1]
            if len(back) < 2:
                return None
            merged = int(labels[back[0]]) | int(labels[back[1]])
            if merged.bit_count() != k or merged in used:
                return None
            labels[z] = merged
            used.add(merged)
    if len(used) != n:
        return None

    by_label = {int(labels[i]): i for i in range(n)}
    for i in range(n):
        for bit in range(d):
            partner = by_label.get(int(labels[i]) ^ (1 << bit))
            if partner is None or G.weight[i, partner] <= 0.0:
                return None
    return HypercubeLabeling(
        dimension=d,
        labels={G.vertex_ids[i]: format(int(labels[i]), f"0{d}b") for i in range(n)},
    )


def _permute_bits(x: int, perm: tuple[int, ...]) -> int:
    y = 0
    for i, src in enumerate(perm):
        if (x >> src) & 1:
            y |= 1 << i
    return y


def enumerate_isomorphisms(
    G: WeightedGraph, labeling: HypercubeLabeling
) -> Iterator[dict[str, str]]:
    """All 2^d * d! combinatorial isomorphisms onto H_d, as vertex -> bitstring maps.

    Generated as coordinate permutations composed with bit translations of the
    base labeling; the hypercube automorphism group is exactly that product.
    """
    d = labeling.dimension
    base = {v: int(s, 2) if s else 0 for v, s in labeling.labels.items()}
    for perm in itertools.permutations(range(d)):
        for t in range(1 << d):
            yield {
                v: format(_permute_bits(x, perm) ^ t, f"0{d}b") if d else ""
                for v, x in base.items()
            }


def edge_degree_matrix(G: WeightedGraph) -> np.ndarray:
    """A_G with A[x,y] = q(x,y) on oriented edges, 0 elsewhere."""
    return G.weight / G.measure[:, None]


def _permutations_array(n: int) -> np.ndarray:
    cached = _PERMUTATION_CACHE.get(n)
    if cached is None:
        cached = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
        _PERMUTATION_CACHE[n] = cached
    return cached


def _exact_min_distance(A: np.ndarray, B: np.ndarray) -> float:
    n = A.shape[0]
    perms = _permutations_array(n)
    permuted = A[perms[:, :, None], perms[:, None, :]]
    sq = ((permuted - B[None, :, :]) ** 2).sum(axis=(1, 2))
    return math.sqrt(float(sq.min()))


def frobenius_distance_exact(G: WeightedGraph, H: WeightedGraph) -> float:
    """Exact Frobenius distance by brute force over all vertex permutations.

    Graphs of unequal size are padded with isolated unit-measure vertices;
    sizes beyond 8 are refused.
    """
    n = max(G.n, H.n)
    if n > EXACT_SIZE_LIMIT:
        raise TooLargeForExact(
            f"exact search over {n}! permutations refused (limit {EXACT_SIZE_LIMIT})"
        )
    A = np.zeros((n, n))
    B = np.zeros((n, n))
    A[: G.n, : G.n] = edge_degree_matrix(G)
    B[: H.n, : H.n] = edge_degree_matrix(H)
    return _exact_min_distance(A, B)


def _aligned_distance(G: WeightedGraph, K: float, labels: dict[str, str]) -> float:
    d = len(next(iter(labels.values())))
    n = G.n
    A = edge_degree_matrix(G)
    target = hypercube(d, K / 2.0) if d >= 1 else None
    B = np.zeros((n, n)) if target is None else edge_degree_matrix(target)
    sigma = np.empty(n, dtype=np.intp)
    for v, s in labels.items():
        sigma[int(s, 2) if s else 0] = G.index(v)
    aligned = A[np.ix_(sigma, sigma)]
    return float(np.linalg.norm(aligned - B))


def frobenius_distance_to_cube(
    G: WeightedGraph, K: float, method: str = "auto"
) -> tuple[float, str]:
    """Frobenius distance from a detected hypercube to H_d(K/2).

    With method "exact" (forced or chosen automatically for n <= 8) the
    minimum runs over all permutations; "isomorphism-restricted" aligns the
    graph through its combinatorial isomorphisms, over which the value is
    constant, and is an upper bound on the true minimum.
    """
    if K <= 0.0:
        raise NonpositiveK(f"target cube needs K > 0, got {K}")
    labeling = detect_hypercube(G)
    if labeling is None:
        raise NotAHypercube("combinatorial structure is not a hypercube")
    if method == "auto":
        method = "exact" if G.n <= EXACT_SIZE_LIMIT else "isomorphism-restricted"
    if method == "exact":
        d = labeling.dimension
        target = hypercube(d, K / 2.0) if d >= 1 else None
        if target is None:
            return 0.0, "exact"
        return frobenius_distance_exact(G, target), "exact"
    if method == "isomorphism-restricted":
        return _aligned_distance(G, K, labeling.labels), "isomorphism-restricted"
    raise InvalidParameter(f"unknown Frobenius method {method!r}")


@dataclass(frozen=True)
class BonnetMyersReport:
    passes: bool
    diameter: int
    bound: float


def bonnet_myers_check(G: WeightedGraph, K: float) -> BonnetMyersReport:
    """diam(G) <= 2 Deg_max / K, the discrete Bonnet-Myers bound.

    A relative slack of 1e-9 absorbs rounding of the bound in the sharp
    (equality) case.
    """
    if K <= 0.0:
        raise NonpositiveK(f"Bonnet-Myers needs K > 0, got {K}")
    diam = diameter(G)
    bound = 2.0 * G.Deg_max / K
    return BonnetMyersReport(
        passes=diam <= bound + 1e-9 * max(1.0, abs(bound)),
        diameter=diam,
        bound=bound,
    )


@dataclass(frozen=True, eq=False)
class RigidityReport:
    is_hypercube: bool
    labeling: Optional[HypercubeLabeling]
    K: float
    k_source: str
    d: int
    deg_max: int
    dimension_mismatch: bool
    lambda_d: float
    deficit: float
    frobenius_distance: Optional[float]
    frobenius_method: Optional[str]
    min_edge_weight: float
    diameter: int
    diameter_bound: Optional[float]
    bonnet_myers_passes: Optional[bool]
    cd_holds: bool
    exact_rigidity: bool
    ratio: Optional[float]

    def to_json_dict(self) -> dict:
        return {
            "is_hypercube": self.is_hypercube,
            "labeling": None if self.labeling is None else {
                "dimension": self.labeling.dimension,
                "labels": dict(self.labeling.labels),
            },
            "K": self.K,
            "k_source": self.k_source,
            "d": self.d,
            "deg_max": self.deg_max,
            "dimension_mismatch": self.dimension_mismatch,
            "lambda_d": self.lambda_d,
            "deficit": self.deficit,
            "frobenius_distance": self.frobenius_distance,
            "frobenius_method": self.frobenius_method,
            "min_edge_weight": self.min_edge_weight,
            "diameter": self.diameter,
            "diameter_bound": self.diameter_bound,
            "bonnet_myers_passes": self.bonnet_myers_passes,
            "cd_holds": self.cd_holds,
            "exact_rigidity": self.exact_rigidity,
            "ratio": self.ratio,
        }


def almost_rigidity_report(
    G: WeightedGraph,
    K: Optional[float] = None,
    d: Optional[int] = None,
    spectral: Optional[SpectralData] = None,
    frobenius_method: str = "auto",
) -> RigidityReport:
    """Assemble the rigidity diagnostics for a graph against H_d(K/2).

    With K omitted the sharp CD constant is estimated via curvature(G); the
    origin of K lands in ``k_source``.  d defaults to the maximal
    combinatorial degree; a mismatch with an explicit d is reported, not
    fatal.  The ratio field is dist_F / sqrt(deficit) and is left out inside
    the exact-rigidity band deficit <= 1e-9 (the exact_rigidity flag covers
    that case instead of a division by almost zero).
    """
    if K is None:
        K, _ = curvature(G)
        k_source = "estimated"
    else:
        K = float(K)
        k_source = "given"
    deg_max = G.deg_max
    if d is None:
        d = deg_max
    spectral = spectral if spectral is not None else spectrum(G)
    lambda_d = float(spectral.eigenvalues[d]) if d < spectral.n else math.nan
    deficit = lambda_d - K

    labeling = detect_hypercube(G)
    dist = method = None
    if labeling is not None and K > 0.0:
        dist, method = frobenius_distance_to_cube(G, K, frobenius_method)

    if K > 0.0:
        bm = bonnet_myers_check(G, K)
        diam, bound, bm_passes = bm.diameter, bm.bound, bm.passes
    else:
        diam, bound, bm_passes = diameter(G), None, None

    exact_rigidity = deficit <= 1e-9
    ratio = None
    if dist is not None and not exact_rigidity:
        ratio = dist / math.sqrt(deficit)
    return RigidityReport(
        is_hypercube=labeling is not None,
        labeling=labeling,
        K=K,
        k_source=k_source,
        d=int(d),
        deg_max=deg_max,
        dimension_mismatch=int(d) != deg_max,
        lambda_d=lambda_d,
        deficit=deficit,
        frobenius_distance=dist,
        frobenius_method=method,
        min_edge_weight=G.min_edge_weight(),
        diameter=diam,
        diameter_bound=bound,
        bonnet_myers_passes=bm_passes,
        cd_holds=cd_check(G, K, math.inf).holds,
        exact_rigidity=exact_rigidity,
        ratio=ratio,
    )
