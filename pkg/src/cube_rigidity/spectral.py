"""Eigendecomposition of -Delta in the m-weighted inner product and projections.

-Delta is self-adjoint with respect to <f,g> = sum_x f(x) g(x) m(x); the
spectrum is computed from the symmetrized matrix M^(1/2) (-Delta) M^(-1/2)
and mapped back, so eigenfunctions come out m-orthonormal.  Within an
eigenvalue cluster the basis is made deterministic by projecting the standard
basis vectors (in stable vertex order) onto the eigenspace and orthonormalizing,
so repeated runs and shuffled input orders give identical output; downstream
results depend only on the spans, which are basis independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import cd_check
from .errors import IndexOutOfRange
from .graphs import WeightedGraph

CLUSTER_TOL = 1e-8


def m_inner(measure: np.ndarray, f: np.ndarray, g: np.ndarray) -> float:
    return float(np.sum(f * g * measure))


def m_norm(measure: np.ndarray, f: np.ndarray) -> float:
    return math.sqrt(max(m_inner(measure, f, f), 0.0))


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Ascending Laplacian eigenvalues with m-orthonormal eigenfunctions.

    ``eigenfunctions`` has one column per eigenvalue, rows in stable vertex
    order; ``measure_snapshot`` is the measure the inner product used.
    """

    vertex_ids: tuple[str, ...]
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    measure_snapshot: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    def eigenfunction(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"eigenfunction index {i} out of range [0, {self.n})")
        return self.eigenfunctions[:, i]

    def eigenspace_indices(self, value: float, tol: float = CLUSTER_TOL) -> list[int]:
        """Indices of eigenvalues within tol of a target value."""
        return [i for i, lam in enumerate(self.eigenvalues) if abs(lam - value) <= tol]

    def to_json_dict(self) -> dict:
        return {
            "vertex_ids": list(self.vertex_ids),
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "eigenfunctions": [
                [float(v) for v in self.eigenfunctions[:, i]] for i in range(self.n)
            ],
        }


def _clusters(values: np.ndarray, tol: float) -> list[tuple[int, int]]:
    spans = []
    start = 0
    for i in range(1, values.size):
        if values[i] - values[i - 1] > tol:
            spans.append((start, i))
            start = i
    spans.append((start, values.size))
    return spans


def _canonical_cluster_basis(
    vecs: np.ndarray, preset: list[np.ndarray], dim: int
) -> np.ndarray:
    """Deterministic orthonormal basis of span(vecs): project standard basis
    vectors in stable vertex order and Gram-Schmidt them, after any preset
    vectors."""
    projector = vecs @ vecs.T
    accepted = list(preset)
    n = vecs.shape[0]
    for j in range(n):
        if len(accepted) == dim:
            break
        u = projector[:, j].copy()
        for _ in range(2):
            for a in accepted:
                u -= (a @ u) * a
        norm = np.linalg.norm(u)
        if norm > 1e-8:
            accepted.append(u / norm)
    if len(accepted) != dim:
        raise RuntimeError("eigenspace canonicalization failed to span the cluster")
    return np.column_stack(accepted)


def _fix_signs(columns: np.ndarray) -> np.ndarray:
    for j in range(columns.shape[1]):
        col = columns[:, j]
        peak = np.abs(col).max()
        if peak == 0.0:
            continue
        lead = np.flatnonzero(np.abs(col) > 1e-12 * peak)[0]
        if col[lead] < 0.0:
            columns[:, j] = -col
    return columns


def spectrum(G: WeightedGraph) -> SpectralData:
    """Full eigendecomposition of -Delta, ordered ascending, deterministically."""
    n = G.n
    m = G.measure
    s = np.sqrt(m)
    sym = -G.weight / np.outer(s, s)
    np.fill_diagonal(sym, G.weighted_degree_vector())
    values, vectors = np.linalg.eigh(sym)

    constant = s / np.linalg.norm(s)
    canonical = np.empty_like(vectors)
    for start, stop in _clusters(values, CLUSTER_TOL):
        block = vectors[:, start:stop]
        if stop - start == 1 and start != 0:
            canonical[:, start] = block[:, 0]
            continue
        preset = [constant] if start == 0 else []
        canonical[:, start:stop] = _canonical_cluster_basis(
            block, preset, stop - start
        )

    phi = _fix_signs(canonical / s[:, None])
    values.setflags(write=False)
    phi.setflags(write=False)
    return SpectralData(
        vertex_ids=G.vertex_ids,
        eigenvalues=values,
        eigenfunctions=phi,
        measure_snapshot=m,
    )


def gap_deficit(spectral: SpectralData, K: float, d: int) -> float:
    """lambda_d - K, the spectral-gap deficit above the Lichnerowicz bound."""
    if not 0 <= d < spectral.n:
        raise IndexOutOfRange(f"eigenvalue index {d} out of range [0, {spectral.n})")
    return float(spectral.eigenvalues[d] - K)


@dataclass(frozen=True)
class LichnerowiczReport:
    passes: bool
    margin: float
    cd_holds: bool


def lichnerowicz_check(G: WeightedGraph, spectral: SpectralData, K: float) -> LichnerowiczReport:
    """lambda_1 >= K check; cd_holds reports whether CD(K,inf) actually holds."""
    if spectral.n < 2:
        raise IndexOutOfRange("lambda_1 needs at least two vertices")
    margin = float(spectral.eigenvalues[1] - K)
    return LichnerowiczReport(
        passes=margin >= -1e-9,
        margin=margin,
        cd_holds=cd_check(G, K, math.inf).holds,
    )


def eigenspace_basis(spectral: SpectralData, lo_index: int, hi_index: int) -> list[np.ndarray]:
    """Eigenfunctions phi_lo .. phi_hi as separate arrays."""
    _check_range(spectral, lo_index, hi_index)
    return [spectral.eigenfunctions[:, i] for i in range(lo_index, hi_index + 1)]


def project(spectral: SpectralData, f, lo_index: int, hi_index: int) -> np.ndarray:
    """m-orthogonal projection of f onto span(phi_lo, ..., phi_hi)."""
    _check_range(spectral, lo_index, hi_index)
    n = spectral.n
    arr = np.asarray(f, dtype=float)
    if arr.shape != (n,):
        raise IndexOutOfRange(f"expected a function on {n} vertices, got {arr.shape}")
    block = spectral.eigenfunctions[:, lo_index : hi_index + 1]
    coeffs = block.T @ (arr * spectral.measure_snapshot)
    return block @ coeffs


def _check_range(spectral: SpectralData, lo: int, hi: int) -> None:
    if not (0 <= lo <= hi < spectral.n):
        raise IndexOutOfRange(
            f"index range [{lo}, {hi}] invalid for {spectral.n} eigenvalues"
        )
