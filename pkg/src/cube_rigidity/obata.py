"""Quantitative-Obata machinery: restriction maps, distance lifting, residuals.

The guiding picture: on a rigid cube the distance function from any base
vertex, shifted by half the dimension, lies in the span of the first d
nonzero-eigenvalue eigenfunctions.  Near rigidity, the operations here
measure how far a graph is from that picture: lifting the distance function
through the 1-ball restriction map, projecting onto eigenfunction spans, and
checking the pointwise identities the distance function satisfies exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .curvature import gamma
from .errors import (
    DegreeExceedsLevel,
    IndexOutOfRange,
    NotDistanceTwo,
    SingularRestrictionMap,
    SpectralMismatch,
)
from .graphs import WeightedGraph, directional_degrees, vertex_function
from .spectral import SpectralData, m_norm, project

CONDITION_LIMIT = 1e8


def _check_same_graph(G: WeightedGraph, spectral: SpectralData) -> None:
    if spectral.vertex_ids != G.vertex_ids or not np.array_equal(
        spectral.measure_snapshot, G.measure
    ):
        raise SpectralMismatch("spectral data does not belong to this graph")


@dataclass(frozen=True, eq=False)
class RestrictionMap:
    """phi -> phi|B_1(x) on the span of phi_0..phi_level.

    ``matrix`` has one row per 1-ball vertex (stable order) and one column
    per eigenfunction.  It is square exactly when deg(x) = level; then
    ``inverse_norm`` is the operator 2-norm of the inverse and ``condition``
    the 2-norm condition number.  ``least_squares`` flags full column rank
    for the rectangular cases.
    """

    base_vertex: str
    level: int
    ball_vertices: tuple[str, ...]
    matrix: np.ndarray
    square: bool
    invertible: bool
    inverse_norm: Optional[float]
    condition: Optional[float]
    least_squares: bool


def restriction_map(
    G: WeightedGraph, spectral: SpectralData, x0: str, level: int
) -> RestrictionMap:
    _check_same_graph(G, spectral)
    if not 0 <= level < spectral.n:
        raise IndexOutOfRange(f"level {level} out of range [0, {spectral.n})")
    i = G.index(x0)
    dist = G.distances_from_index(i)
    ball = np.flatnonzero(dist <= 1)
    matrix = spectral.eigenfunctions[np.ix_(ball, np.arange(level + 1))].copy()
    matrix.setflags(write=False)
    square = matrix.shape[0] == matrix.shape[1]
    sing = np.linalg.svd(matrix, compute_uv=False)
    smin, smax = float(sing[-1]), float(sing[0])
    inverse_norm = condition = None
    invertible = False
    if square and smin > 0.0:
        inverse_norm = 1.0 / smin
        condition = smax / smin
        invertible = condition < CONDITION_LIMIT
    rank = int(np.sum(sing > smax * max(matrix.shape) * np.finfo(float).eps))
    return RestrictionMap(
        base_vertex=x0,
        level=level,
        ball_vertices=tuple(G.vertex_ids[k] for k in ball),
        matrix=matrix,
        square=square,
        invertible=invertible,
        inverse_norm=inverse_norm,
        condition=condition,
        least_squares=rank == matrix.shape[1],
    )


def lift_distance(
    G: WeightedGraph, spectral: SpectralData, x0: str
) -> tuple[np.ndarray, tuple[float, float]]:
    """Lift dist(x0, .) into span(phi_0..phi_d) through its values on B_1(x0).

    Returns the lifted function and the pair (sup error, l2(m) error) of the
    lift against the true distance function.  Refused when the restriction
    map is rectangular or has condition number at least 1e8: the inversion
    is only meaningful in the near-rigid regime.
    """
    d = G.deg_max
    rm = restriction_map(G, spectral, x0, d)
    if not rm.square or not rm.invertible:
        detail = "rectangular" if not rm.square else f"condition {rm.condition:.3e}"
        raise SingularRestrictionMap(
            f"restriction map at {x0!r} (level {d}) is not safely invertible: {detail}"
        )
    i = G.index(x0)
    dist = G.distances_from_index(i).astype(float)
    ball = [G.index(v) for v in rm.ball_vertices]
    coeffs = np.linalg.solve(rm.matrix, dist[ball])
    lifted = spectral.eigenfunctions[:, : d + 1] @ coeffs
    sup_error = float(np.abs(dist - lifted).max())
    l2_error = m_norm(G.measure, dist - lifted)
    return lifted, (sup_error, l2_error)


def obata_residual(G: WeightedGraph, spectral: SpectralData, x0: str) -> float:
    """|| dist_x0 - d/2 - u ||_2 with u the m-orthogonal projection onto Lambda(d).

    The projection is the minimizer over the span, so this is the tightest
    witness for the quantitative Obata statement at base vertex x0.
    """
    _check_same_graph(G, spectral)
    d = G.deg_max
    centered = G.distances_from_index(G.index(x0)).astype(float) - d / 2.0
    u = project(spectral, centered, 1, d)
    return m_norm(G.measure, centered - u)


def generalized_obata(
    G: WeightedGraph, spectral: SpectralData, x0: str, level: int
) -> float:
    """min over u in Lambda_0(level) of || dist_x0 - u ||_2, for deg(x0) <= level.

    Lambda_0 contains the constants, so no centering is needed.
    """
    _check_same_graph(G, spectral)
    deg_x0 = int(G.degree_vector()[G.index(x0)])
    if deg_x0 > level:
        raise DegreeExceedsLevel(
            f"deg({x0!r}) = {deg_x0} exceeds level {level}; the bound is vacuous here"
        )
    dist = G.distances_from_index(G.index(x0)).astype(float)
    u = project(spectral, dist, 0, level)
    return m_norm(G.measure, dist - u)


def extension_residual(G: WeightedGraph, phi, x: str, z: str) -> float:
    """| phi(z) + phi(x) - 2 * (weighted mean of phi over common neighbors) |.

    The weights are w(x,y) w(y,z) / m(y).  Evaluated in exact rational
    arithmetic so that the identity satisfied by true distance functions
    along geodesics comes out as exactly zero.
    """
    phi = vertex_function(G, phi)
    i, j = G.index(x), G.index(z)
    if G.distances_from_index(i)[j] != 2:
        raise NotDistanceTwo(f"{x!r} and {z!r} are not at combinatorial distance 2")
    common = [y for y in G.neighbors(i) if G.weight[y, j] > 0.0]
    den = Fraction(0)
    num = Fraction(0)
    for y in common:
        a = (
            Fraction(float(G.weight[i, y]))
            * Fraction(float(G.weight[y, j]))
            / Fraction(float(G.measure[y]))
        )
        den += a
        num += Fraction(float(phi[y])) * a
    value = Fraction(float(phi[j])) + Fraction(float(phi[i])) - 2 * num / den
    return float(abs(value))


def gradient_deviation(G: WeightedGraph, phi) -> float:
    """max_x Gamma(phi)(x) - min_x Gamma(phi)(x), the spread of the gradient."""
    g = gamma(G, phi)
    return float(g.max() - g.min())


@dataclass(frozen=True)
class DegreeMeasureMaxima:
    """Worst-case deviations of degree, edge degree, measure and distance gradient
    from their rigid-cube values (D/2, D, K/2, 1), plus the inward edge-degree law
    d_minus(x) = (K/2) dist(x, x0)."""

    gamma_distance: float
    degree: float
    edge_degree: float
    measure: float
    inner_degree: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (
            self.gamma_distance,
            self.degree,
            self.edge_degree,
            self.measure,
            self.inner_degree,
        )


def degree_measure_report(G: WeightedGraph, K: float, x0: str) -> DegreeMeasureMaxima:
    """Maxima of the four rigidity deviations, plus the inward-degree law, at base x0.

    The measure deviation is taken against the unit-measure convention
    (stored measure times measure_scale).
    """
    i0 = G.index(x0)
    dist = G.distances_from_index(i0).astype(float)
    D = G.Deg_max
    gamma_f0 = gamma(G, dist)
    deg_w = G.weighted_degree_vector()
    q = G.weight / G.measure[:, None]
    on_edge = G.weight > 0.0
    inner_dev = 0.0
    for x in G.vertex_ids:
        _, d_minus, _ = directional_degrees(G, x0, x)
        k = float(dist[G.index(x)])
        inner_dev = max(inner_dev, abs(d_minus - 0.5 * K * k))
    return DegreeMeasureMaxima(
        gamma_distance=float(np.abs(gamma_f0 - D / 2.0).max()),
        degree=float(np.abs(deg_w - D).max()),
        edge_degree=float(np.abs(q[on_edge] - K / 2.0).max()),
        measure=float(np.abs(G.normalized_measure() - 1.0).max()),
        inner_degree=inner_dev,
    )


def is_distance_composed(G: WeightedGraph, h, p: str, tol: float = 1e-8) -> bool:
    """Whether h is a function of the distance to p: constant on every sphere
    about p, with in-sphere spread at most tol."""
    h = vertex_function(G, h)
    dist = G.distances_from_index(G.index(p))
    for k in range(int(dist.max()) + 1):
        values = h[dist == k]
        if values.size and float(values.max() - values.min()) > tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class ObataReport:
    """Per-base-vertex residual diagnostics for the quantitative Obata picture."""

    base_vertex: str
    K: float
    lifted_sup_error: float
    lifted_l2_error: float
    projection_residual: float
    mean_offset: float
    gradient_deviation: float
    extension_residual_max: float
    thm_degree_measure: DegreeMeasureMaxima

    def to_json_dict(self) -> dict:
        return {
            "base_vertex": self.base_vertex,
            "K": self.K,
            "lifted_sup_error": self.lifted_sup_error,
            "lifted_l2_error": self.lifted_l2_error,
            "projection_residual": self.projection_residual,
            "mean_offset": self.mean_offset,
            "gradient_deviation": self.gradient_deviation,
            "extension_residual_max": self.extension_residual_max,
            "degree_measure_maxima": {
                "gamma_distance": self.thm_degree_measure.gamma_distance,
                "degree": self.thm_degree_measure.degree,
                "edge_degree": self.thm_degree_measure.edge_degree,
                "measure": self.thm_degree_measure.measure,
                "inner_degree": self.thm_degree_measure.inner_degree,
            },
        }


def obata_report(
    G: WeightedGraph, spectral: SpectralData, x0: str, K: float
) -> ObataReport:
    """Assemble every per-base-vertex diagnostic at x0.

    The gradient and extension diagnostics are evaluated on the lifted
    distance function, the canonical element of span(phi_0..phi_d) attached
    to the base vertex.
    """
    _check_same_graph(G, spectral)
    d = G.deg_max
    i0 = G.index(x0)
    dist = G.distances_from_index(i0).astype(float)
    lifted, (sup_err, l2_err) = lift_distance(G, spectral, x0)
    residual = obata_residual(G, spectral, x0)
    m = G.measure
    mean_offset = abs(float(np.sum(dist * m) / np.sum(m)) - d / 2.0)
    grad_dev = gradient_deviation(G, lifted)
    ext_max = 0.0
    dmat = G.distance_matrix()
    for i in range(G.n):
        for j in range(i + 1, G.n):
            if dmat[i, j] == 2:
                ext_max = max(
                    ext_max,
                    extension_residual(G, lifted, G.vertex_ids[i], G.vertex_ids[j]),
                )
    return ObataReport(
        base_vertex=x0,
        K=K,
        lifted_sup_error=sup_err,
        lifted_l2_error=l2_err,
        projection_residual=residual,
        mean_offset=mean_offset,
        gradient_deviation=grad_dev,
        extension_residual_max=ext_max,
        thm_degree_measure=degree_measure_report(G, K, x0),
    )
