"""Constructive spurious configurations and second-order certification.

The reflection construction places n-2 anchor points on an affine hyperplane,
one apex off the hyperplane, and the apex's mirror image as the final ground
truth point.  Collapsing the mirrored point onto the apex produces a
configuration whose gradient vanishes identically: every pairwise distance is
correct except the one between the last two points, and that residual pulls
the two coincident points in opposite directions that cancel.

Whether the collapsed configuration is a genuine second-order critical point
is decided by a small matrix inequality: the anchor spread around the apex,
sum_i (p_i - apex)(p_i - apex)^T, measured against ||apex - mirror||^2 times
the identity.  Strict inequality gives a strict spurious minimizer, equality
gives a non-strict one, and failure gives an escape direction.  certify()
checks all of this numerically from the objective alone, without trusting the
construction.
"""

from __future__ import annotations

import dataclasses
import re

import numpy as np

from .edm import center
from .errors import InvalidInputError, PreconditionError, UnsupportedSizeError
from .objective import CompleteInstance, symmetry_basis

CONDITION_STRICT = "strict"
CONDITION_NON_STRICT = "non-strict"
CONDITION_FAILS = "fails-condition"

NOT_1_CRITICAL = "not-1-critical"
NOT_2_CRITICAL = "not-2-critical"
NON_STRICT_2_CRITICAL = "non-strict-2-critical"
STRICT_2_CRITICAL = "strict-2-critical"


@dataclasses.dataclass(frozen=True)
class ReflectionExample:
    """A ground truth / spurious configuration pair from the reflection construction.

    Row layout: rows 0..n-3 are the hyperplane anchors, row n-2 is the apex,
    row n-1 is the mirrored apex (ground truth) or the apex again (spurious).
    """

    ground_truth: np.ndarray
    spurious: np.ndarray
    condition_matrix: np.ndarray
    condition_threshold: float
    condition_verdict: str
    label: str = "custom"

    @property
    def n(self) -> int:
        return self.ground_truth.shape[0]

    @property
    def dg(self) -> int:
        return self.ground_truth.shape[1]

    def instance(self, k: int | None = None) -> CompleteInstance:
        """Complete-graph instance for the ground truth at relaxation rank k."""
        return CompleteInstance(self.ground_truth, self.dg if k is None else k)

    def spurious_lifted(self, k: int) -> np.ndarray:
        """The spurious configuration zero-padded to k columns."""
        if k < self.dg:
            raise InvalidInputError(f"cannot lift to k={k} below the ambient dimension {self.dg}")
        out = np.zeros((self.n, k))
        out[:, : self.dg] = self.spurious
        return out


def build_reflection_example(
    hyperplane_points: np.ndarray,
    apex: np.ndarray,
    label: str = "custom",
    tol: float = 1e-9,
) -> ReflectionExample:
    """Build a spurious configuration by reflecting an apex across a hyperplane.

    hyperplane_points is (m, dg) with affine span of dimension exactly dg-1,
    apex is a dg-vector off that span.  Raises PreconditionError when the span
    is degenerate or the apex lies on it.
    """
    P = np.asarray(hyperplane_points, dtype=float)
    a = np.asarray(apex, dtype=float).reshape(-1)
    if P.ndim != 2:
        raise InvalidInputError(f"hyperplane points must be a 2d array, got shape {P.shape}")
    m, dg = P.shape
    if a.shape[0] != dg:
        raise InvalidInputError(f"apex must have {dg} coordinates, got {a.shape[0]}")
    if dg < 1 or m < 1:
        raise InvalidInputError("need at least one hyperplane point in at least one dimension")

    mean = P.mean(axis=0)
    Q = P - mean
    sv = np.linalg.svd(Q, compute_uv=False) if min(Q.shape) else np.zeros(0)
    scale_ref = max(float(sv[0]) if sv.size else 0.0, float(np.linalg.norm(a - mean)), 1.0)
    span_dim = int(np.sum(sv > tol * scale_ref))
    if span_dim != dg - 1:
        raise PreconditionError(
            f"hyperplane points span an affine subspace of dimension {span_dim}, expected {dg - 1}"
        )

    if dg == 1:
        normal = np.ones(1)
    else:
        _, _, Vt = np.linalg.svd(Q)
        normal = Vt[-1]
    height = float((a - mean) @ normal)
    if abs(height) <= tol * scale_ref:
        raise PreconditionError("apex lies on the hyperplane spanned by the anchor points")
    mirror = a - 2.0 * height * normal

    ground_truth = np.vstack([P, a, mirror])
    spurious = np.vstack([P, a, a])

    diffs = P - a
    condition_matrix = diffs.T @ diffs
    threshold = float(np.sum((a - mirror) ** 2))
    gap = np.linalg.eigvalsh(condition_matrix)[0] - threshold
    ref = max(1.0, threshold, float(np.linalg.norm(condition_matrix, 2)))
    if gap > tol * ref:
        verdict = CONDITION_STRICT
    elif gap < -tol * ref:
        verdict = CONDITION_FAILS
    else:
        verdict = CONDITION_NON_STRICT
    return ReflectionExample(ground_truth, spurious, condition_matrix, threshold, verdict, label)


def planar7_example() -> ReflectionExample:
    """Seven points in the plane: five collinear anchors, apex above, mirror below."""
    anchors = np.array([[-2.0, 0.0], [-1.0, 0.0], [0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    return build_reflection_example(anchors, np.array([0.0, 1.0]), label="planar7")


def simplex_example(dg: int) -> ReflectionExample:
    """Standard basis anchors with the origin as apex, n = dg + 2 points.

    The anchor spread equals the identity while the mirror distance squared is
    4/dg, so the construction is strict for dg >= 5, non-strict at dg = 4, and
    fails below.
    """
    if dg < 1:
        raise InvalidInputError(f"simplex preset needs dg >= 1, got {dg}")
    return build_reflection_example(np.eye(dg), np.zeros(dg), label=f"simplex({dg})")


def mixed7_example(dg: int) -> ReflectionExample:
    """Seven points in dimension 3 or 4: basis anchors padded with centroid copies.

    The apex sits halfway between the origin and the anchor centroid, which
    keeps the spread condition strict even though n - 2 exceeds dg.
    """
    if dg not in (3, 4):
        raise InvalidInputError(f"mixed7 preset is defined for dg in {{3, 4}}, got {dg}")
    centroid = np.full(dg, 1.0 / dg)
    anchors = np.vstack([np.eye(dg)] + [centroid] * (5 - dg))
    apex = np.full(dg, 1.0 / (2 * dg))
    return build_reflection_example(anchors, apex, label=f"mixed7({dg})")


_PRESET_RE = re.compile(r"^\s*(planar7|simplex|mixed7)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def preset_example(text: str) -> ReflectionExample:
    """Parse a preset name: planar7, simplex(dg), or mixed7(dg)."""
    match = _PRESET_RE.match(text)
    if match is None:
        raise InvalidInputError(
            f"unknown preset {text!r}; expected planar7, simplex(dg), or mixed7(dg)"
        )
    name, arg = match.groups()
    if name == "planar7":
        if arg is not None:
            raise InvalidInputError("planar7 takes no argument")
        return planar7_example()
    if arg is None:
        raise InvalidInputError(f"{name} needs a dimension argument, e.g. {name}(4)")
    return simplex_example(int(arg)) if name == "simplex" else mixed7_example(int(arg))


@dataclasses.dataclass(frozen=True)
class CriticalityReport:
    verdict: str
    grad_norm: float
    scale: float
    eigenvalues: np.ndarray | None = None
    min_eigenvalue: float | None = None
    num_negative: int | None = None
    kernel_dimension: int | None = None
    symmetry_dimension: int | None = None


def dense_hessian(instance, Z: np.ndarray, max_dim: int = 4000) -> np.ndarray:
    """Assemble the full Hessian at Z by probing hess_vec with basis matrices."""
    Z = np.asarray(Z, dtype=float)
    dim = Z.size
    if dim > max_dim:
        raise UnsupportedSizeError(
            f"dense Hessian needs {dim}^2 entries; limit is {max_dim} (raise max_dim to override)"
        )
    state = instance.prepare(Z)
    H = np.empty((dim, dim))
    probe = np.zeros_like(Z)
    flat = probe.reshape(-1)
    for idx in range(dim):
        flat[idx] = 1.0
        H[:, idx] = state.hess_vec(probe).reshape(-1)
        flat[idx] = 0.0
    return 0.5 * (H + H.T)


def certify(
    instance,
    Z: np.ndarray,
    grad_tol: float = 1e-9,
    kernel_tol: float = 1e-8,
    strict_tol: float = 1e-8,
    max_dim: int = 4000,
) -> CriticalityReport:
    """Classify Z as a critical point of the instance from derivatives alone.

    Verdicts: not-1-critical (gradient above grad_tol times the instance
    scale), not-2-critical (Hessian has a negative eigenvalue beyond
    strict_tol, relative to the largest magnitude), strict-2-critical (positive
    semidefinite with kernel no larger than the symmetry directions of Z), and
    non-strict-2-critical (extra flat directions beyond the symmetries).
    """
    Z = np.asarray(Z, dtype=float)
    state = instance.prepare(Z)
    grad_norm = float(np.linalg.norm(state.grad))
    scale = float(instance.scale)
    if grad_norm > grad_tol * scale:
        return CriticalityReport(NOT_1_CRITICAL, grad_norm, scale)

    H = dense_hessian(instance, Z, max_dim=max_dim)
    eigs = np.linalg.eigvalsh(H)
    ref = max(float(np.max(np.abs(eigs))), 1e-300)
    num_negative = int(np.sum(eigs < -strict_tol * ref))
    kernel_dim = int(np.sum(np.abs(eigs) <= kernel_tol * ref))
    sym_dim = symmetry_basis(Z).matrices.shape[0]
    if num_negative > 0:
        verdict = NOT_2_CRITICAL
    elif kernel_dim <= sym_dim:
        verdict = STRICT_2_CRITICAL
    else:
        verdict = NON_STRICT_2_CRITICAL
    return CriticalityReport(
        verdict,
        grad_norm,
        scale,
        eigenvalues=eigs,
        min_eigenvalue=float(eigs[0]),
        num_negative=num_negative,
        kernel_dimension=kernel_dim,
        symmetry_dimension=sym_dim,
    )


def _pad_columns(M: np.ndarray, width: int) -> np.ndarray:
    if M.shape[1] == width:
        return M
    out = np.zeros((M.shape[0], width))
    out[:, : M.shape[1]] = M
    return out


def align(Z: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Center Z, reduce it to Y's dimension, and rotate it onto the centered Y.

    Z is (n, k) and Y is (n, dg).  When k > dg, the centered Z is compressed
    to its top-dg principal directions first; a converged over-parametrized
    iterate carries a spurious direction of size roughly sqrt(Gram error),
    and compressing removes it, whereas zero-padding Y would let it dominate
    the distance.  When k < dg, Z is zero-padded instead.  The orthogonal
    transform (reflections allowed) minimizing the Frobenius distance to the
    centered Y is then applied.  Returns the aligned (n, dg) configuration.
    """
    Z = np.asarray(Z, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Z.ndim != 2 or Y.ndim != 2 or Z.shape[0] != Y.shape[0]:
        raise InvalidInputError(
            f"align needs two configurations with matching rows, got {Z.shape} and {Y.shape}"
        )
    dg = Y.shape[1]
    Zc = center(Z)
    if Z.shape[1] > dg:
        U, s, _ = np.linalg.svd(Zc, full_matrices=False)
        Zc = U[:, :dg] * s[:dg]
    elif Z.shape[1] < dg:
        Zc = _pad_columns(Zc, dg)
    Yc = center(Y)
    U, _, Vt = np.linalg.svd(Zc.T @ Yc)
    return Zc @ (U @ Vt)


def recovery_distance(Z: np.ndarray, Y: np.ndarray) -> float:
    """Frobenius distance from Z to Y modulo translation, orthogonal maps, and
    principal-direction reduction to Y's dimension."""
    Y = np.asarray(Y, dtype=float)
    return float(np.linalg.norm(align(Z, Y) - center(Y)))


def best_linear_map(Z: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Least-squares R minimizing ||Z R - Y||_F, requiring Z to have full column rank."""
    Z = np.asarray(Z, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Z.ndim != 2 or Y.ndim != 2 or Z.shape[0] != Y.shape[0]:
        raise InvalidInputError(
            f"best_linear_map needs configurations with matching rows, got {Z.shape} and {Y.shape}"
        )
    R, _, rank, _ = np.linalg.lstsq(Z, Y, rcond=None)
    if rank < Z.shape[1]:
        raise PreconditionError(
            f"configuration has column rank {rank} < {Z.shape[1]}; the least-squares map is not unique"
        )
    return R
