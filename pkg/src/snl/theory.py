"""Numerical validators for the operator properties and landscape guarantees.

Each check draws random inputs from a seeded generator, evaluates the claimed
inequality or identity, and reports the worst violation seen.  Reports are
deliberately small and uniform so the CLI can print one line per property.

Property ids for the distance map: P1 (diagonal part stays PSD), P2 (largest
eigenvalue dominates), P3 (trace dominates), P4 (normal-operator correction
identity), P5 (polarization equality), strict-eig-gap (the P2 domination is
strict for nonzero inputs).  For generated sensing maps the alternative pair
Q4 (correction bounded by a multiple of the diagonal quadratic form) and Q5
(roundtrip through the inverse-form definition) replaces P4/P5.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .edm import (
    center,
    centered_diag_part,
    centered_subspace_basis,
    centering_matrix,
    edm_adjoint,
    edm_map,
    normal_correction,
)
from .errors import (
    InvalidInputError,
    NumericalFailureError,
    PreconditionError,
    RetryExhaustedError,
)
from .landscape import NOT_1_CRITICAL, NOT_2_CRITICAL, certify
from .objective import CompleteInstance


@dataclasses.dataclass(frozen=True)
class PropertyReport:
    property_id: str
    trials: int
    max_violation: float
    tolerance: float
    passed: bool

    @staticmethod
    def from_violation(property_id: str, trials: int, max_violation: float, tolerance: float) -> "PropertyReport":
        return PropertyReport(property_id, trials, float(max_violation), tolerance, bool(max_violation <= tolerance))


def _random_centered_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    # rank drawn uniformly so every stratum of the cone gets sampled
    r = int(rng.integers(1, n))
    G = rng.standard_normal((n, r))
    G = G - G.mean(axis=0)
    X = G @ G.T
    norm = float(np.linalg.norm(X))
    if norm == 0.0:
        return X
    return X / norm


def check_edm_properties(n: int, trials: int, seed: int, tol: float = 1e-10,
                         equality_tol: float = 1e-11) -> list[PropertyReport]:
    """Validate P1-P5 and the strict eigenvalue gap on random centered PSD inputs.

    Samples are normalized to unit Frobenius norm, so tol is absolute.  P5 is
    an exact identity and is checked relatively at equality_tol.
    """
    if n < 3:
        raise InvalidInputError(f"property checks need n >= 3, got {n}")
    if trials < 1:
        raise InvalidInputError(f"trials must be positive, got {trials}")
    rng = np.random.default_rng(seed)
    J = centering_matrix(n)
    worst = {pid: -np.inf for pid in ("P1", "P2", "P3", "P4", "P5", "strict-eig-gap")}
    for _ in range(trials):
        X = _random_centered_psd(rng, n)
        G = centered_diag_part(X)
        eig_gamma = np.linalg.eigvalsh(G)
        lam_x = float(np.linalg.eigvalsh(X)[-1])
        lam_g = float(eig_gamma[-1])
        worst["P1"] = max(worst["P1"], -float(eig_gamma[0]))
        gap = lam_g - lam_x
        worst["P2"] = max(worst["P2"], gap)
        worst["strict-eig-gap"] = max(worst["strict-eig-gap"], gap)
        worst["P3"] = max(worst["P3"], float(np.trace(G) - np.trace(X)))
        # the correction identity: (n/2) Gamma + (tr/2) J equals the
        # normal-operator correction exactly, so the residual must vanish
        M = 0.5 * n * G + 0.5 * float(np.trace(X)) * J - normal_correction(X)
        worst["P4"] = max(worst["P4"], -float(np.linalg.eigvalsh(M)[0]))

        u = rng.standard_normal(n)
        w = rng.standard_normal(n)
        lhs = float(np.linalg.norm(edm_map(np.outer(u, w) + np.outer(w, u), validate=False)) ** 2)
        rhs = 4.0 * float(
            np.vdot(edm_map(np.outer(u, u), validate=False), edm_map(np.outer(w, w), validate=False))
        )
        rel = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
        worst["P5"] = max(worst["P5"], rel)

    tolerances = {"P1": tol, "P2": tol, "P3": tol, "P4": tol, "P5": equality_tol,
                  "strict-eig-gap": -1e-12}
    return [PropertyReport.from_violation(pid, trials, worst[pid], tolerances[pid])
            for pid in ("P1", "P2", "P3", "P4", "P5", "strict-eig-gap")]


def _random_unit_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    r = int(rng.integers(1, n + 1))
    G = rng.standard_normal((n, r))
    X = G @ G.T
    return X / float(np.linalg.norm(X))


def check_second_order_inequality(instance: CompleteInstance, Z: np.ndarray, trials: int,
                                  seed: int, tol_factor: float = 1e-10) -> PropertyReport:
    """At a second-order critical Z, a signed combination of the residual
    certificate and the map's positivity must stay nonnegative:

        0 <= tr(T) <S, adjoint(map(X - X*))> + 2 <map(Z T Z^T), map(S)>

    for every PSD S (n x n) and PSD T (k x k).  Z is gated through certify
    first; a non-critical point raises PreconditionError.
    """
    Z = np.asarray(Z, dtype=float)
    report = certify(instance, Z)
    if report.verdict in (NOT_1_CRITICAL, NOT_2_CRITICAL):
        raise PreconditionError(
            f"second-order inequality needs a 2-critical point, certify said {report.verdict}"
        )
    n, k = Z.shape
    rng = np.random.default_rng(seed)
    C = edm_adjoint(edm_map(Z @ Z.T - instance.gram_target, validate=False), validate=False)
    scale = 1.0 + float(np.linalg.norm(instance.Y)) ** 4 + float(np.linalg.norm(Z)) ** 4
    worst = -np.inf
    for _ in range(trials):
        S = _random_unit_psd(rng, n)
        T = _random_unit_psd(rng, k)
        value = float(np.trace(T)) * float(np.vdot(S, C)) + 2.0 * float(
            np.vdot(edm_map(Z @ T @ Z.T, validate=False), edm_map(S, validate=False))
        )
        worst = max(worst, -value)
    return PropertyReport.from_violation("second-order-inequality", trials, worst, tol_factor * scale)


def rip_lower_bound(n: int) -> float:
    """Restricted-isometry failure level for the distance map on rank-2 inputs.

    Two explicit rank-2 witnesses realize Rayleigh quotients n/2 and 1 for the
    normal operator; the spread forces a restricted isometry constant of at
    least 1 - 4/(n+2).  The witnesses are re-evaluated on every call and must
    match the closed forms to 1e-10.
    """
    if n < 4:
        raise InvalidInputError(f"the second witness needs four coordinates, got n={n}")
    J = centering_matrix(n)
    e = np.eye(n)
    X1 = J @ (np.outer(e[0], e[0]) - np.outer(e[1], e[1])) @ J
    a = e[0] + e[1] - e[2] - e[3]
    b = e[0] - e[1] - e[2] + e[3]
    X2 = np.outer(a, a) - np.outer(b, b)

    def quotient(X: np.ndarray) -> float:
        H = edm_map(X, validate=False)
        return float(np.vdot(X, edm_adjoint(H, validate=False)) / np.vdot(X, X))

    q1, q2 = quotient(X1), quotient(X2)
    if abs(q1 - n / 2) > 1e-10 or abs(q2 - 1.0) > 1e-10:
        raise NumericalFailureError(
            f"witness Rayleigh quotients drifted: got {q1} (want {n / 2}) and {q2} (want 1)"
        )
    return 1.0 - 4.0 / (n + 2.0)


@dataclasses.dataclass(frozen=True)
class CertificateBundle:
    C: np.ndarray
    S: np.ndarray
    P: np.ndarray
    C_spectrum: np.ndarray
    S_spectrum: np.ndarray
    P_spectrum: np.ndarray


def certificate_matrices(Z: np.ndarray, Y: np.ndarray, grad_tol: float = 1e-9,
                         rank_tol: float = 1e-10) -> CertificateBundle:
    """Certificate matrices at a full-rank first-order critical point.

    C is the graph-Laplacian-style image of the Gram residual; S truncates -C
    to its min(dg, n-k) most negative eigenpairs; P conjugates the diagonal
    part of -C by the polar factor of Z.  Raises PreconditionError when Z is
    rank deficient or the gradient gate fails.
    """
    Z = np.asarray(Z, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Z.ndim != 2 or Y.ndim != 2 or Z.shape[0] != Y.shape[0]:
        raise InvalidInputError(
            f"need configurations with matching rows, got {Z.shape} and {Y.shape}"
        )
    n, k = Z.shape
    dg = Y.shape[1]
    sv = np.linalg.svd(Z, compute_uv=False)
    if sv[-1] <= rank_tol * max(sv[0], 1.0):
        raise PreconditionError(
            f"configuration is rank deficient (sigma_min={sv[-1]:.3g}); certificates need full column rank"
        )

    instance = CompleteInstance(Y, k)
    state = instance.prepare(Z)
    grad_norm = float(np.linalg.norm(state.grad))
    if grad_norm > grad_tol * instance.scale:
        raise PreconditionError(
            f"gradient norm {grad_norm:.3g} exceeds the criticality gate {grad_tol * instance.scale:.3g}"
        )

    Zc = center(Z)
    Yc = center(Y)
    C = edm_adjoint(edm_map(Zc @ Zc.T - Yc @ Yc.T, validate=False), validate=False)
    gate = max(grad_tol * instance.scale, 1e-12 * instance.scale)
    if float(np.linalg.norm(C @ np.ones(n))) > gate or float(np.linalg.norm(C @ Z)) > gate:
        raise NumericalFailureError("certificate matrix lost the C 1 = 0 / C Z = 0 structure")

    eigvals, eigvecs = np.linalg.eigh(C)
    ell = min(dg, n - k)
    S = np.zeros((n, n))
    for i in range(max(ell, 0)):
        S -= eigvals[i] * np.outer(eigvecs[:, i], eigvecs[:, i])

    V = Z @ np.linalg.inv(_sqrtm_spd(Z.T @ Z))
    P = V.T @ centered_diag_part(-C) @ V
    return CertificateBundle(
        C, S, P,
        C_spectrum=eigvals,
        S_spectrum=np.linalg.eigvalsh(S),
        P_spectrum=np.linalg.eigvalsh(P),
    )


def _sqrtm_spd(M: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(M)
    if vals[0] <= 0:
        raise PreconditionError("polar factor needs a positive definite Gram")
    return (vecs * np.sqrt(vals)) @ vecs.T


def check_certificates(Z: np.ndarray, Y: np.ndarray, grad_tol: float = 1e-9) -> list[PropertyReport]:
    """Negative-semidefiniteness of C and the trace bound tr(P) <= tr(S)."""
    bundle = certificate_matrices(Z, Y, grad_tol=grad_tol)
    scale = 1.0 + float(np.linalg.norm(Y)) ** 4
    return [
        PropertyReport.from_violation(
            "residual-laplacian-nsd", 1, float(bundle.C_spectrum[-1]), 1e-10 * scale
        ),
        PropertyReport.from_violation(
            "trace-bound", 1, float(np.trace(bundle.P) - np.trace(bundle.S)), 1e-9 * scale
        ),
    ]


def sqrtn_threshold(dg: int, n: int) -> int:
    """Smallest relaxation rank guaranteeing a benign landscape for n points.

    Returns the minimal integer strictly above dg + n/(-1/2 + sqrt(1/4 + n/dg)).
    """
    if dg < 1:
        raise InvalidInputError(f"dg must be at least 1, got {dg}")
    if n < dg + 2:
        raise InvalidInputError(f"need n >= dg + 2, got n={n}, dg={dg}")
    value = dg + n / (-0.5 + np.sqrt(0.25 + n / dg))
    return int(np.floor(value)) + 1


def gaussian_condition(Y: np.ndarray, k: int) -> bool:
    """Spread condition under which rank-k relaxation admits no spurious minima:

        (k + 2) sigma_min(JY)^2 > 4 n max_i ||y_i - mean||^2.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise InvalidInputError(f"ground truth must be a 2d array, got shape {Y.shape}")
    n = Y.shape[0]
    Yc = center(Y)
    sv = np.linalg.svd(Yc, compute_uv=False)
    sigma_min_sq = float(sv[min(n, Y.shape[1]) - 1] ** 2) if Y.shape[1] <= n else 0.0
    max_spread = float(np.max(np.sum(Yc**2, axis=1)))
    return (k + 2) * sigma_min_sq > 4.0 * n * max_spread


@dataclasses.dataclass(frozen=True)
class AltSensingMap:
    """Random rank-one sensing map given through its inverse-form diagonal part.

    vectors rows a_i are centered; gamma(X) = sum_i a_i a_i^T (a_i^T X a_i),
    and the normal operator of the underlying map is (I - gamma)^(-1) on the
    centered subspace.  q4_constant is the empirical maximum of
    2 <X, normal(X) - X> / <X, gamma(X)> over random traceless centered X; it
    is a lower estimate of the true constant, not a certified bound.
    """

    vectors: np.ndarray
    q4_constant: float

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    def apply_gamma(self, X: np.ndarray) -> np.ndarray:
        quad = np.einsum("ij,jk,ik->i", self.vectors, X, self.vectors)
        return (self.vectors.T * quad) @ self.vectors


def _gamma_operator_matrix(smap: AltSensingMap, basis: np.ndarray) -> np.ndarray:
    d = basis.shape[0]
    M = np.empty((d, d))
    for j in range(d):
        image = smap.apply_gamma(basis[j])
        M[:, j] = np.tensordot(basis, image, axes=([1, 2], [0, 1]))
    return M


def _random_traceless_centered(rng: np.random.Generator, n: int, count: int,
                               basis: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Coordinates (in basis) of unit-norm traceless centered symmetric samples."""
    d = basis.shape[0]
    coords = rng.standard_normal((d, count))
    # remove the J direction to impose zero trace within the centered subspace
    j_coords = np.tensordot(basis, J / np.linalg.norm(J), axes=([1, 2], [0, 1]))
    coords -= np.outer(j_coords, j_coords @ coords)
    coords /= np.linalg.norm(coords, axis=0)
    return coords


def _q4_ratios(gamma_mat: np.ndarray, coords: np.ndarray) -> np.ndarray:
    gamma_coords = gamma_mat @ coords
    normal_coords = np.linalg.solve(np.eye(gamma_mat.shape[0]) - gamma_mat, coords)
    num = 2.0 * np.einsum("ij,ij->j", coords, normal_coords - coords)
    den = np.einsum("ij,ij->j", coords, gamma_coords)
    return num / den


def make_random_sensing_map(n: int, m: int, seed: int, budget: float = 0.99,
                            q4_samples: int = 10_000, max_retries: int = 3) -> AltSensingMap:
    """Draw m centered directions, rescale so the fourth-power budget is met,
    and verify their outer products span the whole centered subspace.
    """
    if n < 3:
        raise InvalidInputError(f"sensing maps need n >= 3, got {n}")
    dim = n * (n - 1) // 2
    if m < dim:
        raise InvalidInputError(
            f"m={m} rank-one measurements cannot span the {dim}-dimensional centered subspace"
        )
    if not 0 < budget < 1:
        raise InvalidInputError("the fourth-power budget must lie in (0, 1)")

    basis = centered_subspace_basis(n)
    J = centering_matrix(n)
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        A = rng.standard_normal((m, n))
        A = A - A.mean(axis=1, keepdims=True)
        fourth = float(np.sum(np.sum(A**2, axis=1) ** 2))
        A *= (budget / fourth) ** 0.25
        smap = AltSensingMap(A, q4_constant=np.nan)
        gamma_mat = _gamma_operator_matrix(smap, basis)
        sv = np.linalg.svd(gamma_mat, compute_uv=False)
        if sv[-1] > 1e-12 * sv[0]:
            coords = _random_traceless_centered(rng, n, q4_samples, basis, J)
            c = float(np.max(_q4_ratios(gamma_mat, coords)))
            return AltSensingMap(A, q4_constant=c)
    raise RetryExhaustedError(
        f"failed to draw a spanning set of {m} measurement directions in {max_retries} attempts"
    )


def check_sensing_map_properties(smap: AltSensingMap, trials: int, seed: int,
                                 tol: float = 1e-10) -> list[PropertyReport]:
    """P1-P3 plus the alternative pair for a generated sensing map.

    Q4 re-samples the correction-to-diagonal ratio and checks it stays within
    5% of the constant estimated at construction; Q5 checks the roundtrip
    through the inverse-form definition of the normal operator.
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be positive, got {trials}")
    n = smap.n
    rng = np.random.default_rng(seed)
    basis = centered_subspace_basis(n)
    J = centering_matrix(n)
    gamma_mat = _gamma_operator_matrix(smap, basis)

    worst = {pid: -np.inf for pid in ("P1", "P2", "P3", "Q5")}
    for _ in range(trials):
        X = _random_centered_psd(rng, n)
        G = smap.apply_gamma(X)
        eig_gamma = np.linalg.eigvalsh(G)
        worst["P1"] = max(worst["P1"], -float(eig_gamma[0]))
        worst["P2"] = max(worst["P2"], float(eig_gamma[-1] - np.linalg.eigvalsh(X)[-1]))
        worst["P3"] = max(worst["P3"], float(np.trace(G) - np.trace(X)))
        coords = np.tensordot(basis, X, axes=([1, 2], [0, 1]))
        roundtrip = np.linalg.solve(np.eye(len(coords)) - gamma_mat, coords - gamma_mat @ coords)
        worst["Q5"] = max(worst["Q5"], float(np.linalg.norm(roundtrip - coords)))

    coords = _random_traceless_centered(rng, n, trials, basis, J)
    q4_worst = float(np.max(_q4_ratios(gamma_mat, coords))) - smap.q4_constant

    reports = [PropertyReport.from_violation(pid, trials, worst[pid], tol)
               for pid in ("P1", "P2", "P3")]
    reports.append(PropertyReport.from_violation(
        "Q4", trials, q4_worst, 0.05 * max(abs(smap.q4_constant), 1e-30)))
    reports.append(PropertyReport.from_violation("Q5", trials, worst["Q5"], tol))
    return reports
