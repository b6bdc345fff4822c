"""Numba-compiled edge kernels for the partial-graph objective.

Explicit loops over edges; fastmath stays off so results are deterministic
and reassociation-free.  cache=True persists compiled artifacts on disk.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def residuals(Z, edge_i, edge_j, targets):
    m = edge_i.shape[0]
    k = Z.shape[1]
    r = np.empty(m)
    for e in range(m):
        i = edge_i[e]
        j = edge_j[e]
        s = 0.0
        for c in range(k):
            d = Z[i, c] - Z[j, c]
            s += d * d
        r[e] = s - targets[e]
    return r


@numba.njit(cache=True)
def grad_from_residuals(Z, edge_i, edge_j, r):
    m = edge_i.shape[0]
    k = Z.shape[1]
    G = np.zeros_like(Z)
    for e in range(m):
        i = edge_i[e]
        j = edge_j[e]
        w = 2.0 * r[e]
        for c in range(k):
            g = w * (Z[i, c] - Z[j, c])
            G[i, c] += g
            G[j, c] -= g
    return G


@numba.njit(cache=True)
def hvp_from_residuals(Z, dZ, edge_i, edge_j, r):
    m = edge_i.shape[0]
    k = Z.shape[1]
    H = np.zeros_like(Z)
    for e in range(m):
        i = edge_i[e]
        j = edge_j[e]
        rdot = 0.0
        for c in range(k):
            rdot += (Z[i, c] - Z[j, c]) * (dZ[i, c] - dZ[j, c])
        rdot *= 2.0
        for c in range(k):
            h = 2.0 * (rdot * (Z[i, c] - Z[j, c]) + r[e] * (dZ[i, c] - dZ[j, c]))
            H[i, c] += h
            H[j, c] -= h
    return H
