"""Pure numpy edge kernels for the partial-graph objective.

Reference implementation; same contracts as the numba backend.  Scatter adds
use np.add.at, which is unbuffered and therefore correct for repeated indices.
"""

import numpy as np


def residuals(Z, edge_i, edge_j, targets):
    diff = Z[edge_i] - Z[edge_j]
    return np.einsum("ek,ek->e", diff, diff) - targets


def grad_from_residuals(Z, edge_i, edge_j, r):
    diff = Z[edge_i] - Z[edge_j]
    contrib = (2.0 * r)[:, None] * diff
    G = np.zeros_like(Z)
    np.add.at(G, edge_i, contrib)
    np.add.at(G, edge_j, -contrib)
    return G


def hvp_from_residuals(Z, dZ, edge_i, edge_j, r):
    diff = Z[edge_i] - Z[edge_j]
    ddiff = dZ[edge_i] - dZ[edge_j]
    rdot = 2.0 * np.einsum("ek,ek->e", diff, ddiff)
    contrib = 2.0 * (rdot[:, None] * diff + r[:, None] * ddiff)
    H = np.zeros_like(Z)
    np.add.at(H, edge_i, contrib)
    np.add.at(H, edge_j, -contrib)
    return H
