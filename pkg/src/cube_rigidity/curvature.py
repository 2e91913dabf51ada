"""Graph Laplacian, the Gamma and Gamma_2 forms, CD(K,N) checks and curvature.

Conventions (m-weighted Laplacian and carre du champ):

    Delta f(x)  = (1/m(x)) sum_y w(x,y) (f(y) - f(x))
    Gamma(f,g)  : 2 Gamma(f,g) = Delta(fg) - f Delta g - g Delta f,
                  evaluated here by its explicit edge sum
                  Gamma(f,g)(x) = (1/2m(x)) sum_y w(x,y)(f(y)-f(x))(g(y)-g(x))
    Gamma_2(f,g): 2 Gamma_2(f,g) = Delta Gamma(f,g) - Gamma(f, Delta g)
                  - Gamma(g, Delta f)

CD(K,N) holds when Gamma_2(f) >= (1/N)(Delta f)^2 + K Gamma(f) pointwise for
every f, which at a vertex x is a positive-semidefiniteness condition for a
matrix pencil on the 2-ball around x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .graphs import WeightedGraph, vertex_function

# PSD slack is scale-relative: matrices built from edge degrees c and from
# c * 1e-3 must pass or fail identically.
PSD_RTOL = 1e-10
BISECTION_TOL = 1e-9


def laplacian_matrix(G: WeightedGraph) -> np.ndarray:
    """Dense matrix of Delta acting on vertex functions in stable order."""
    cached = G._cache.get("laplacian")
    if cached is None:
        cached = G.weight / G.measure[:, None]
        np.fill_diagonal(cached, -G.weighted_degree_vector())
        cached.setflags(write=False)
        G._cache["laplacian"] = cached
    return cached


def laplacian_apply(G: WeightedGraph, f) -> np.ndarray:
    f = vertex_function(G, f)
    return laplacian_matrix(G) @ f


def gamma(G: WeightedGraph, f, g=None) -> np.ndarray:
    """Gamma(f,g) by the explicit edge sum; Gamma(f) when g is omitted."""
    f = vertex_function(G, f)
    g = f if g is None else vertex_function(G, g)
    df = f[None, :] - f[:, None]
    dg = df if g is f else g[None, :] - g[:, None]
    return 0.5 * (G.weight * df * dg).sum(axis=1) / G.measure


def gamma2(G: WeightedGraph, f, g=None) -> np.ndarray:
    """Gamma_2(f,g) by composing Delta and Gamma; Gamma_2(f) when g is omitted."""
    f = vertex_function(G, f)
    g = f if g is None else vertex_function(G, g)
    lf = laplacian_apply(G, f)
    lg = lf if g is f else laplacian_apply(G, g)
    return 0.5 * (
        laplacian_apply(G, gamma(G, f, g)) - gamma(G, f, lg) - gamma(G, g, lf)
    )


@dataclass(frozen=True, eq=False)
class LocalCurvatureForm:
    """Quadratic-form matrices of Gamma and Gamma_2 at a vertex, on its 2-ball.

    ``ball_vertices`` orders the 2-ball as: base vertex, then the 1-sphere,
    then the 2-sphere, each slice in stable vertex order.  For any function
    phi, phi^T gamma2_matrix phi equals Gamma_2(phi) at the base vertex, and
    ``laplacian_row`` applied to phi gives Delta phi there.
    """

    base_vertex: str
    ball_vertices: tuple[str, ...]
    gamma_matrix: np.ndarray
    gamma2_matrix: np.ndarray
    laplacian_row: np.ndarray

    def to_json_dict(self) -> dict:
        """Row-major arrays under a ball_vertices ordering header."""
        return {
            "base_vertex": self.base_vertex,
            "ball_vertices": list(self.ball_vertices),
            "gamma_matrix": [[float(v) for v in row] for row in self.gamma_matrix],
            "gamma2_matrix": [[float(v) for v in row] for row in self.gamma2_matrix],
            "laplacian_row": [float(v) for v in self.laplacian_row],
        }


def _local_parts(G: WeightedGraph, i: int):
    parts = G._cache.setdefault("local_parts", {})
    entry = parts.get(i)
    if entry is None:
        dist = G.distances_from_index(i)
        s1 = np.flatnonzero(dist == 1)
        s2 = np.flatnonzero(dist == 2)
        ball = np.concatenate(([i], s1, s2)).astype(int)
        b = ball.size
        m_x = G.measure[i]

        gm = np.zeros((b, b))
        coeff = G.weight[i, s1] / (2.0 * m_x)
        gm[0, 0] = coeff.sum()
        for p in range(s1.size):
            gm[p + 1, p + 1] = coeff[p]
            gm[0, p + 1] = gm[p + 1, 0] = -coeff[p]

        # Gamma_2(x) assembled by evaluating the Delta/Gamma composition on
        # the indicator basis of the 2-ball; values outside the ball cannot
        # affect Gamma_2 at x.
        g2 = np.zeros((b, b))
        indicators = np.zeros((G.n, b))
        indicators[ball, np.arange(b)] = 1.0
        for a in range(b):
            fa = indicators[:, a]
            for c in range(a, b):
                val = gamma2(G, fa, indicators[:, c])[i]
                g2[a, c] = g2[c, a] = val

        row = np.zeros(b)
        row[0] = -G.weighted_degree_vector()[i]
        row[1 : 1 + s1.size] = G.weight[i, s1] / m_x

        for arr in (gm, g2, row, ball):
            arr.setflags(write=False)
        entry = (ball, gm, g2, row)
        parts[i] = entry
    return entry


def local_forms(G: WeightedGraph, x: str) -> LocalCurvatureForm:
    """Assemble the Gamma(x) and Gamma_2(x) matrices and the Laplacian row at x."""
    i = G.index(x)
    ball, gm, g2, row = _local_parts(G, i)
    return LocalCurvatureForm(
        base_vertex=x,
        ball_vertices=tuple(G.vertex_ids[k] for k in ball),
        gamma_matrix=gm,
        gamma2_matrix=g2,
        laplacian_row=row,
    )


def _validate_N(N: float) -> float:
    N = float(N)
    if math.isnan(N) or N <= 0.0:
        raise InvalidParameter(f"N must lie in (0, inf], got {N}")
    return N


def _min_eigenvalue(A: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(A)[0])


def _is_psd(A: np.ndarray) -> bool:
    scale = float(np.abs(A).max()) if A.size else 0.0
    return _min_eigenvalue(A) >= -PSD_RTOL * scale


def _pencil(G: WeightedGraph, i: int, K: float, N: float) -> np.ndarray:
    _, gm, g2, row = _local_parts(G, i)
    A = g2 - K * gm
    if math.isfinite(N):
        A = A - np.outer(row, row) / N
    return A


@dataclass(frozen=True)
class CDReport:
    holds: bool
    worst_vertex: str
    min_eigenvalue: float


def cd_check(G: WeightedGraph, K: float, N: float = math.inf) -> CDReport:
    """Verify CD(K,N) pointwise via the pencil Gamma_2(x) - K Gamma(x) - (1/N) L_x L_x^T.

    ``min_eigenvalue`` is the most negative eigenvalue found across vertices;
    the per-vertex pass threshold is -1e-10 times the matrix scale.
    """
    N = _validate_N(N)
    K = float(K)
    holds = True
    worst_val = math.inf
    worst_vertex = G.vertex_ids[0]
    for i, x in enumerate(G.vertex_ids):
        A = _pencil(G, i, K, N)
        lam = _min_eigenvalue(A)
        scale = float(np.abs(A).max()) if A.size else 0.0
        if lam < -PSD_RTOL * scale:
            holds = False
        if lam < worst_val:
            worst_val = lam
            worst_vertex = x
    return CDReport(holds=holds, worst_vertex=worst_vertex, min_eigenvalue=worst_val)


def curvature_at(G: WeightedGraph, x: str, N: float = math.inf) -> float:
    """Largest K with Gamma_2(x) - K Gamma(x) - (1/N) L_x L_x^T >= 0, by bisection.

    Returns +inf when the pencil stays positive semidefinite however far the
    upper bracket is pushed (possible only for degenerate Gamma(x)), and -inf
    when no K at all satisfies it.  Bisection is run to 1e-9 on K.
    """
    N = _validate_N(N)
    i = G.index(x)
    if G.neighbors(i).size == 0:
        return math.inf
    _, gm, g2, row = _local_parts(G, i)
    base = g2 - (np.outer(row, row) / N if math.isfinite(N) else 0.0)

    def psd(K: float) -> bool:
        return _is_psd(base - K * gm)

    span = 4.0 * G.Deg_max
    lo, hi = -span, span
    for _ in range(64):
        if psd(lo):
            break
        lo *= 2.0
    else:
        return -math.inf
    for _ in range(64):
        if not psd(hi):
            break
        hi *= 2.0
    else:
        return math.inf
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if psd(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def curvature(G: WeightedGraph, N: float = math.inf) -> tuple[float, str]:
    """Global CD constant: the minimum of curvature_at over vertices, with argmin."""
    best = math.inf
    best_vertex = G.vertex_ids[0]
    for x in G.vertex_ids:
        val = curvature_at(G, x, N)
        if val < best:
            best = val
            best_vertex = x
    return best, best_vertex
