"""Quartic localization objectives on complete and partial measurement graphs.

Two instance flavors share one callback protocol (cost, gradient,
Hessian-vector product, scale):

  * CompleteInstance: every pairwise distance of a ground-truth configuration
    Y is measured; cost(Z) = || edm_map(Z Z^T - Y Y^T) ||_F^2.
  * MaskedInstance: squared-distance targets on the edges of a measurement
    graph; cost(Z) = 1/2 * sum_edges (||z_i - z_j||^2 - target_ij)^2.

On a complete graph with exact targets the two costs coincide, and gradients
and Hessian-vector products returned here are the exact derivatives of the
returned cost in both flavors (verified against central differences in the
test suite).  The tolerance scale for an instance is 1 + ||Y||_F^4, matching
the quartic growth of the cost.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .edm import edm_adjoint, edm_map
from .errors import InvalidInputError


@dataclasses.dataclass(frozen=True)
class MeasurementGraph:
    """Undirected graph on n vertices with optional squared-distance targets.

    Edges are parallel index arrays with edge_i[e] < edge_j[e], sorted
    lexicographically, without duplicates or self loops.  targets, when
    present, holds one squared-distance measurement per edge.
    """

    n: int
    edge_i: np.ndarray
    edge_j: np.ndarray
    targets: np.ndarray | None = None

    def __post_init__(self):
        ei = np.asarray(self.edge_i, dtype=np.int64)
        ej = np.asarray(self.edge_j, dtype=np.int64)
        object.__setattr__(self, "edge_i", ei)
        object.__setattr__(self, "edge_j", ej)
        if self.n < 1:
            raise InvalidInputError(f"graph needs at least one vertex, got n={self.n}")
        if ei.shape != ej.shape or ei.ndim != 1:
            raise InvalidInputError("edge_i and edge_j must be 1d arrays of equal length")
        if ei.size:
            if ei.min() < 0 or ej.max() >= self.n:
                raise InvalidInputError("edge endpoints out of range")
            if np.any(ei >= ej):
                raise InvalidInputError("edges must satisfy edge_i < edge_j (no self loops)")
            codes = ei * self.n + ej
            if np.unique(codes).size != codes.size:
                raise InvalidInputError("duplicate edges are not allowed")
            if np.any(np.diff(codes) <= 0):
                raise InvalidInputError("edges must be sorted lexicographically")
        if self.targets is not None:
            t = np.asarray(self.targets, dtype=float)
            if t.shape != ei.shape:
                raise InvalidInputError("targets must align with edges")
            object.__setattr__(self, "targets", t)

    @property
    def num_edges(self) -> int:
        return int(self.edge_i.size)

    def with_targets(self, targets: np.ndarray) -> "MeasurementGraph":
        return MeasurementGraph(self.n, self.edge_i, self.edge_j, targets)


def complete_graph(n: int) -> MeasurementGraph:
    """All pairs i < j in lexicographic order, no targets."""
    idx = np.triu_indices(n, k=1)
    return MeasurementGraph(n, idx[0].astype(np.int64), idx[1].astype(np.int64))


def squared_distance_targets(Y: np.ndarray, graph: MeasurementGraph) -> np.ndarray:
    """Exact squared pairwise distances of Y on the graph's edges."""
    Y = _as_configuration(Y, graph.n, "ground truth")
    diff = Y[graph.edge_i] - Y[graph.edge_j]
    return np.einsum("ek,ek->e", diff, diff)


def _as_configuration(Z: np.ndarray, n: int, name: str) -> np.ndarray:
    Z = np.ascontiguousarray(Z, dtype=float)
    if Z.ndim != 2 or Z.shape[0] != n:
        raise InvalidInputError(f"{name} must have shape ({n}, d), got {Z.shape}")
    return Z


class Prepared(NamedTuple):
    """Cost and gradient at a point, plus a Hessian-vector product closure."""

    cost: float
    grad: np.ndarray
    hess_vec: Callable[[np.ndarray], np.ndarray]


class CompleteInstance:
    """All-pairs instance anchored at a ground-truth configuration Y, solved in dimension k."""

    def __init__(self, Y: np.ndarray, k: int):
        Y = np.ascontiguousarray(Y, dtype=float)
        if Y.ndim != 2 or Y.shape[0] < 1:
            raise InvalidInputError(f"ground truth must be a 2d array, got shape {Y.shape}")
        if k < 1:
            raise InvalidInputError(f"optimization dimension must be positive, got {k}")
        self.Y = Y
        self.n = Y.shape[0]
        self.dg = Y.shape[1]
        self.k = int(k)
        self.gram_target = Y @ Y.T
        self.scale = 1.0 + float(np.linalg.norm(Y) ** 4)

    def prepare(self, Z: np.ndarray) -> Prepared:
        Z = _as_configuration(Z, self.n, "iterate")
        if Z.shape[1] != self.k:
            raise InvalidInputError(f"iterate must have {self.k} columns, got {Z.shape[1]}")
        n = self.n
        # Entries of W come from one subtraction of Grams, so cost and A stay
        # accurate even when the two Grams nearly cancel near an optimum.
        W = Z @ Z.T - self.gram_target
        H = edm_map(W, validate=False)
        A = edm_adjoint(H, validate=False)
        cost = float(np.vdot(H, H))
        grad = 4.0 * (A @ Z)
        gram = Z.T @ Z
        colsum = Z.sum(axis=0)

        def hvp(dZ: np.ndarray) -> np.ndarray:
            # adjoint(map(B)) @ Z with B = dZ Z^T + Z dZ^T, in factored form:
            # adjoint(map(B)) = B + Diag((n/2) b + (sum b / 2) 1 - B 1) - (b 1^T + 1 b^T)/2,
            # with b = diag(B); B itself (n x n) is never materialized.
            dZ = np.ascontiguousarray(dZ, dtype=float)
            b = 2.0 * np.einsum("ij,ij->i", Z, dZ)
            B1 = dZ @ colsum + Z @ dZ.sum(axis=0)
            BZ = dZ @ gram + Z @ (dZ.T @ Z)
            v = 0.5 * n * b + 0.5 * b.sum() - B1
            ABZ = BZ + v[:, None] * Z - 0.5 * (np.outer(b, colsum) + (b @ Z)[None, :])
            return 4.0 * (ABZ + A @ dZ)

        return Prepared(cost, grad, hvp)

    def cost(self, Z: np.ndarray) -> float:
        Z = _as_configuration(Z, self.n, "iterate")
        W = Z @ Z.T - self.gram_target
        H = edm_map(W, validate=False)
        return float(np.sum(H * H))

    def gradient(self, Z: np.ndarray) -> np.ndarray:
        return self.prepare(Z).grad

    def hess_vec(self, Z: np.ndarray, dZ: np.ndarray) -> np.ndarray:
        return self.prepare(Z).hess_vec(dZ)


class MaskedInstance:
    """Partial-graph instance with squared-distance targets on the edges.

    scale_reference, when provided, is the configuration whose norm sets the
    tolerance scale (the harness passes the ground truth); otherwise the scale
    falls back to 1 + sum(targets^2), the quartic magnitude of the data.
    """

    def __init__(self, graph: MeasurementGraph, k: int, scale_reference: np.ndarray | None = None):
        if graph.targets is None:
            raise InvalidInputError("masked instance requires a graph with targets")
        if k < 1:
            raise InvalidInputError(f"optimization dimension must be positive, got {k}")
        self.graph = graph
        self.n = graph.n
        self.k = int(k)
        if scale_reference is not None:
            ref = np.asarray(scale_reference, dtype=float)
            self.scale = 1.0 + float(np.linalg.norm(ref) ** 4)
        else:
            t = graph.targets
            self.scale = 1.0 + float(t @ t)

    def prepare(self, Z: np.ndarray) -> Prepared:
        Z = _as_configuration(Z, self.n, "iterate")
        if Z.shape[1] != self.k:
            raise InvalidInputError(f"iterate must have {self.k} columns, got {Z.shape[1]}")
        g = self.graph
        r = kernels.residuals(Z, g.edge_i, g.edge_j, g.targets)
        cost = 0.5 * float(r @ r)
        grad = kernels.grad_from_residuals(Z, g.edge_i, g.edge_j, r)

        def hvp(dZ: np.ndarray) -> np.ndarray:
            dZ = np.ascontiguousarray(dZ, dtype=float)
            return kernels.hvp_from_residuals(Z, dZ, g.edge_i, g.edge_j, r)

        return Prepared(cost, grad, hvp)

    def cost(self, Z: np.ndarray) -> float:
        Z = _as_configuration(Z, self.n, "iterate")
        g = self.graph
        r = kernels.residuals(Z, g.edge_i, g.edge_j, g.targets)
        return 0.5 * float(r @ r)

    def gradient(self, Z: np.ndarray) -> np.ndarray:
        return self.prepare(Z).grad

    def hess_vec(self, Z: np.ndarray, dZ: np.ndarray) -> np.ndarray:
        return self.prepare(Z).hess_vec(dZ)


def cost_masked(Z: np.ndarray, graph: MeasurementGraph) -> float:
    """1/2 * sum over edges of (||z_i - z_j||^2 - target)^2."""
    if graph.targets is None:
        raise InvalidInputError("cost_masked requires a graph with targets")
    Z = _as_configuration(Z, graph.n, "configuration")
    r = kernels.residuals(Z, graph.edge_i, graph.edge_j, graph.targets)
    return 0.5 * float(r @ r)


def cost_complete(Z: np.ndarray, Y: np.ndarray) -> float:
    """|| edm_map(Z Z^T - Y Y^T) ||_F^2, the all-pairs localization cost."""
    Y = np.asarray(Y, dtype=float)
    Z = _as_configuration(Z, Y.shape[0], "configuration")
    W = Z @ Z.T - Y @ Y.T
    H = edm_map(W, validate=False)
    return float(np.sum(H * H))


def gradient(Z: np.ndarray, instance) -> np.ndarray:
    """Exact gradient of the instance cost at Z."""
    return instance.gradient(Z)


def hess_vec(Z: np.ndarray, dZ: np.ndarray, instance) -> np.ndarray:
    """Exact Hessian-vector product of the instance cost at Z applied to dZ."""
    return instance.hess_vec(Z, dZ)


class SymmetryBasis(NamedTuple):
    matrices: np.ndarray  # shape (m, n, k), orthonormal under the Frobenius inner product
    rank_deficient: bool


def symmetry_basis(Z: np.ndarray, rank_tol: float = 1e-10) -> SymmetryBasis:
    """Orthonormal basis of the cost symmetries at Z: translations and rotations.

    Generators are the translation fields (ones @ v^T for coordinate vectors v)
    and the rotation fields Z @ S for skew S.  For a full-rank centered Z the
    span has dimension k + k(k-1)/2 = k(k+1)/2; otherwise the basis of the
    actual (smaller) span is returned and the deficiency is flagged.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise InvalidInputError(f"configuration must be a 2d array, got shape {Z.shape}")
    n, k = Z.shape
    gens = []
    for j in range(k):
        T = np.zeros((n, k))
        T[:, j] = 1.0
        gens.append(T.ravel())
    for a in range(k):
        for b in range(a + 1, k):
            R = np.zeros((n, k))
            R[:, b] = Z[:, a]
            R[:, a] = -Z[:, b]
            gens.append(R.ravel())
    M = np.array(gens)
    _, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > rank_tol * s[0])) if s.size else 0
    matrices = Vt[:rank].reshape(rank, n, k)
    expected = k * (k + 1) // 2
    deficient = rank < expected or np.linalg.matrix_rank(Z) < k
    return SymmetryBasis(matrices, bool(deficient))


def instance_scale(instance) -> float:
    """Tolerance scale of an instance: 1 + ||reference configuration||_F^4."""
    return float(instance.scale)
