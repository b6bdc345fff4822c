"""Operator calculus for the Euclidean distance matrix (EDM) map on Gram-like matrices.

The central object is the linear map sending a symmetric matrix X to the
hollow matrix with entries (X_ii + X_jj - 2 X_ij) / 2.  When X = Z Z^T is the
Gram matrix of a configuration Z, twice the image is the matrix of squared
pairwise distances.  The map restricts to a bijection between centered
symmetric matrices (rows sum to zero) and hollow symmetric matrices (zero
diagonal); this module provides the map, its adjoint, the normal operator
(adjoint composed with map), and explicit inverses of all of them on those
subspaces.

Conventions:
  * configurations are (n, d) arrays, one point per row;
  * "centered" means X @ 1 = 0 (for configurations: column sums are zero);
  * "hollow" means zero diagonal;
  * all checks are relative to the Frobenius norm with tolerance 1e-12,
    violations raise InvalidInputError instead of being projected away.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

VALIDATION_TOL = 1e-12


def _as_square(X: np.ndarray, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise InvalidInputError(f"{name} must be a square matrix, got shape {X.shape}")
    return X


def require_symmetric(X: np.ndarray, name: str = "input", tol: float = VALIDATION_TOL) -> np.ndarray:
    """Return X as a float array, raising if it is not square symmetric."""
    X = _as_square(X, name)
    scale = np.linalg.norm(X)
    if np.linalg.norm(X - X.T) > tol * scale:
        raise InvalidInputError(f"{name} is not symmetric within tolerance {tol}")
    return X


def require_centered(X: np.ndarray, name: str = "input", tol: float = VALIDATION_TOL) -> np.ndarray:
    """Return X as a float array, raising if it is not symmetric with zero row sums."""
    X = require_symmetric(X, name, tol)
    scale = np.linalg.norm(X)
    if np.linalg.norm(X.sum(axis=1)) > tol * scale:
        raise InvalidInputError(f"{name} is not centered (row sums nonzero) within tolerance {tol}")
    return X


def require_hollow(X: np.ndarray, name: str = "input", tol: float = VALIDATION_TOL) -> np.ndarray:
    """Return X as a float array, raising if it is not symmetric with zero diagonal."""
    X = require_symmetric(X, name, tol)
    scale = np.linalg.norm(X)
    if np.linalg.norm(np.diag(X)) > tol * scale:
        raise InvalidInputError(f"{name} is not hollow (diagonal nonzero) within tolerance {tol}")
    return X


def centering_matrix(n: int) -> np.ndarray:
    """The orthogonal projector I - (1/n) * ones onto the mean-zero subspace of R^n."""
    if n < 1:
        raise InvalidInputError(f"matrix order must be positive, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)


def center(points: np.ndarray) -> np.ndarray:
    """Translate a configuration so its centroid is at the origin."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise InvalidInputError(f"configuration must be a 2d array, got shape {points.shape}")
    return points - points.mean(axis=0, keepdims=True)


def project_centered(X: np.ndarray) -> np.ndarray:
    """Orthogonal projection of a symmetric matrix onto the centered subspace (J X J)."""
    X = require_symmetric(X, "project_centered input")
    n = X.shape[0]
    row = X.mean(axis=1, keepdims=True)
    total = X.mean()
    return X - row - row.T + total


def edm_map(X: np.ndarray, validate: bool = True) -> np.ndarray:
    """Map a symmetric matrix to the hollow matrix (X_ii + X_jj - 2 X_ij) / 2.

    For a Gram input Z Z^T the result is half the squared-distance matrix of
    the configuration Z.  Defined on all symmetric matrices; its restriction
    to centered matrices is invertible (see edm_inverse).
    """
    if validate:
        X = require_symmetric(X, "edm_map input")
    else:
        X = np.asarray(X, dtype=float)
    d = np.diag(X)
    return 0.5 * (d[:, None] + d[None, :]) - X


def edm_adjoint(D: np.ndarray, validate: bool = True) -> np.ndarray:
    """Adjoint of edm_map on hollow inputs: diag(D @ 1) - D.

    The image is always centered.  The identity <edm_map(X), D> = <X, edm_adjoint(D)>
    holds for every symmetric X and hollow symmetric D.
    """
    if validate:
        D = require_hollow(D, "edm_adjoint input")
    else:
        D = np.asarray(D, dtype=float)
    return np.diag(D.sum(axis=1)) - D


def centered_diag_part(X: np.ndarray, validate: bool = True) -> np.ndarray:
    """J Diag(X) J: the centered projection of the diagonal part of X.

    This is exactly the correction subtracted by edm_normal_inv, and on
    centered positive semidefinite inputs it is the positive semidefinite
    "diagonal compression" whose spectrum is dominated by that of X.
    """
    if validate:
        X = require_symmetric(X, "centered_diag_part input")
    else:
        X = np.asarray(X, dtype=float)
    n = X.shape[0]
    d = np.diag(X)
    m = d / n
    return np.diag(d) - m[:, None] - m[None, :] + d.sum() / n**2


def edm_normal(X: np.ndarray, validate: bool = True) -> np.ndarray:
    """Normal operator (adjoint composed with map) on centered symmetric matrices.

    Closed form: X + (n/2) J Diag(X) J + (tr X / 2) J.  Its spectrum on the
    centered subspace is {1, n/2, n} with multiplicities {n(n-3)/2, n-1, 1}.
    """
    if validate:
        X = require_centered(X, "edm_normal input")
    else:
        X = np.asarray(X, dtype=float)
    n = X.shape[0]
    J = centering_matrix(n)
    return X + (n / 2.0) * centered_diag_part(X, validate=False) + (np.trace(X) / 2.0) * J


def normal_correction(X: np.ndarray, validate: bool = True) -> np.ndarray:
    """The non-identity part of the normal operator: edm_normal(X) - X."""
    if validate:
        X = require_centered(X, "normal_correction input")
    else:
        X = np.asarray(X, dtype=float)
    n = X.shape[0]
    J = centering_matrix(n)
    return (n / 2.0) * centered_diag_part(X, validate=False) + (np.trace(X) / 2.0) * J


def edm_normal_inv(X: np.ndarray, validate: bool = True) -> np.ndarray:
    """Inverse of the normal operator on centered symmetric matrices: X - J Diag(X) J."""
    if validate:
        X = require_centered(X, "edm_normal_inv input")
    else:
        X = np.asarray(X, dtype=float)
    return X - centered_diag_part(X, validate=False)


def edm_inverse(D: np.ndarray, validate: bool = True) -> np.ndarray:
    """Inverse of edm_map from hollow matrices back to centered matrices.

    Closed form: -D + (1 r^T + r 1^T)/n - (sum D / n^2) * ones, with r the
    vector of row sums of D.
    """
    if validate:
        D = require_hollow(D, "edm_inverse input")
    else:
        D = np.asarray(D, dtype=float)
    n = D.shape[0]
    r = D.sum(axis=1)
    return -D + (r[:, None] + r[None, :]) / n - r.sum() / n**2


def edm_adjoint_inv(X: np.ndarray, validate: bool = True) -> np.ndarray:
    """Inverse of edm_adjoint from centered matrices back to hollow matrices: Diag(X) - X."""
    if validate:
        X = require_centered(X, "edm_adjoint_inv input")
    else:
        X = np.asarray(X, dtype=float)
    return np.diag(np.diag(X)) - X


def centered_subspace_basis(n: int) -> np.ndarray:
    """An orthonormal basis (Frobenius inner product) of the centered symmetric matrices.

    Returns an array of shape (n*(n-1)//2, n, n).  Built by projecting the
    elementary symmetric basis and orthonormalizing, so it is deterministic.
    """
    if n < 2:
        raise InvalidInputError(f"need n >= 2 for a nontrivial centered subspace, got {n}")
    gens = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            E[i, j] = 1.0
            E[j, i] = 1.0
            gens.append(project_centered(E).ravel())
    M = np.array(gens)
    _, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    return Vt[:rank].reshape(rank, n, n)
