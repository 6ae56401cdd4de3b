"""Discrete graph Laplacians, standard and weighted, and their spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import WeightsRequiredError
from .graph import Graph, VertexDegrees
from .linalg import SpectralResult, determinant, eig_symmetric

KINDS = ("standard", "generalized")

ZERO_EIG_TOL = 1e-10


def _check_kind(kind: str):
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


@dataclass
class LaplacianOperator:
    """L = D - C (standard) or its weighted generalization.

    Real symmetric, positive semi-definite, zero row sums; the diagonal
    holds the (weighted) valencies.
    """

    matrix: np.ndarray
    kind: str
    degrees: VertexDegrees
    graph: Graph

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.matrix))))


def build_laplacian(g: Graph, kind: str = "standard") -> LaplacianOperator:
    """Assemble the Laplacian of a graph.

    The generalized kind uses the weighted connectivity matrix and weighted
    valencies and requires weights to be present on the graph.
    """
    _check_kind(kind)
    degrees = g.degrees()
    if kind == "generalized":
        if not g.is_weighted:
            raise WeightsRequiredError("generalized Laplacian requires edge weights")
        c = g.weighted_adjacency_matrix()
        d = np.diag(degrees.weighted_valency)
    else:
        c = g.adjacency_matrix()
        d = np.diag(degrees.valency.astype(float))
    return LaplacianOperator(matrix=d - c, kind=kind, degrees=degrees, graph=g)


def laplacian_spectrum(op: LaplacianOperator, vectors: bool = False) -> SpectralResult:
    """Sorted real spectrum of the Laplacian.

    The lowest eigenvalue is 0 (within 1e-10 of the matrix scale) and it is
    simple exactly when the graph is connected.
    """
    result = eig_symmetric(op.matrix, vectors=vectors)
    lo = float(result.eigenvalues[0])
    tol = ZERO_EIG_TOL * op.scale()
    if lo < -tol:
        raise AssertionError(f"Laplacian not positive semi-definite: min eig {lo}")
    return result


def char_poly_value(op: LaplacianOperator, lam: complex) -> complex:
    """det(lambda I - L), evaluated by LU at the requested point.

    Values only; no coefficient extraction, which would be ill-conditioned.
    """
    n = op.dim
    return determinant(lam * np.eye(n, dtype=np.complex128) - op.matrix)


def operator_degrees(op: LaplacianOperator) -> np.ndarray:
    """The degree vector entering the scattering phases: v_i or u_i."""
    if op.kind == "generalized":
        return op.degrees.weighted_valency
    return op.degrees.valency.astype(float)
