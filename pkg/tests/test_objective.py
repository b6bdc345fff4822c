"""Objective tests: frozen values, derivative oracles, structural identities.

Derivatives are checked against central differences computed in-test, the
independent oracle for both instance flavors.
"""

import numpy as np
import pytest

from snl import InvalidInputError, edm_adjoint, edm_map
from snl.objective import (
    CompleteInstance,
    MaskedInstance,
    MeasurementGraph,
    complete_graph,
    cost_complete,
    cost_masked,
    gradient,
    hess_vec,
    squared_distance_targets,
    symmetry_basis,
)


def make_complete(rng, n=7, dg=2, k=3):
    Y = rng.standard_normal((n, dg))
    return CompleteInstance(Y, k)


def make_masked(rng, n=9, dg=2, k=3, keep=0.6):
    Y = rng.standard_normal((n, dg))
    g = complete_graph(n)
    mask = rng.random(g.num_edges) < keep
    g = MeasurementGraph(n, g.edge_i[mask], g.edge_j[mask])
    return MaskedInstance(g.with_targets(squared_distance_targets(Y, g)), k, scale_reference=Y)


def central_diff_cost(instance, Z, dZ, h=1e-5):
    return (instance.cost(Z + h * dZ) - instance.cost(Z - h * dZ)) / (2 * h)


def test_cost_masked_single_edge_frozen():
    g = MeasurementGraph(2, np.array([0]), np.array([1]), targets=np.array([1.0]))
    Z = np.zeros((2, 1))
    assert cost_masked(Z, g) == 0.5


def test_cost_complete_two_points_frozen():
    Y = np.array([[0.0], [1.0]])
    Z = np.zeros((2, 1))
    assert cost_complete(Z, Y) == 0.5


def test_empty_graph_cost_zero():
    g = MeasurementGraph(4, np.array([], dtype=np.int64), np.array([], dtype=np.int64), targets=np.array([]))
    rng = np.random.default_rng(0)
    Z = rng.standard_normal((4, 2))
    assert cost_masked(Z, g) == 0.0
    inst = MaskedInstance(g, 2)
    st = inst.prepare(Z)
    assert st.cost == 0.0
    np.testing.assert_allclose(st.grad, 0.0)


def test_masked_equals_complete_on_full_graph():
    rng = np.random.default_rng(1)
    for trial in range(10):
        n, dg, k = 8, 2, 3
        Y = rng.standard_normal((n, dg))
        g = complete_graph(n)
        g = g.with_targets(squared_distance_targets(Y, g))
        masked = MaskedInstance(g, k, scale_reference=Y)
        full = CompleteInstance(Y, k)
        Z = rng.standard_normal((n, k))
        dZ = rng.standard_normal((n, k))
        assert abs(masked.cost(Z) - full.cost(Z)) <= 1e-12 * (1 + full.cost(Z))
        gm, gf = gradient(Z, masked), gradient(Z, full)
        assert np.linalg.norm(gm - gf) <= 1e-12 * (1 + np.linalg.norm(gf))
        hm, hf = hess_vec(Z, dZ, masked), hess_vec(Z, dZ, full)
        assert np.linalg.norm(hm - hf) <= 1e-12 * (1 + np.linalg.norm(hf))


@pytest.mark.parametrize("flavor", ["complete", "masked"])
def test_gradient_matches_central_differences(flavor):
    rng = np.random.default_rng(2)
    for trial in range(10):
        inst = make_complete(rng) if flavor == "complete" else make_masked(rng)
        Z = rng.standard_normal((inst.n, inst.k))
        dZ = rng.standard_normal((inst.n, inst.k))
        dZ /= np.linalg.norm(dZ)
        numeric = central_diff_cost(inst, Z, dZ)
        analytic = float(np.sum(inst.prepare(Z).grad * dZ))
        assert abs(numeric - analytic) <= 1e-6 * max(1.0, abs(analytic))


@pytest.mark.parametrize("flavor", ["complete", "masked"])
def test_hess_vec_matches_gradient_differences(flavor):
    rng = np.random.default_rng(3)
    for trial in range(10):
        inst = make_complete(rng) if flavor == "complete" else make_masked(rng)
        Z = rng.standard_normal((inst.n, inst.k))
        dZ = rng.standard_normal((inst.n, inst.k))
        dZ /= np.linalg.norm(dZ)
        h = 1e-5
        numeric = (inst.gradient(Z + h * dZ) - inst.gradient(Z - h * dZ)) / (2 * h)
        analytic = inst.prepare(Z).hess_vec(dZ)
        assert np.linalg.norm(numeric - analytic) <= 1e-6 * max(1.0, np.linalg.norm(analytic))


@pytest.mark.parametrize("flavor", ["complete", "masked"])
def test_hessian_is_symmetric(flavor):
    rng = np.random.default_rng(4)
    for trial in range(10):
        inst = make_complete(rng) if flavor == "complete" else make_masked(rng)
        Z = rng.standard_normal((inst.n, inst.k))
        st = inst.prepare(Z)
        U = rng.standard_normal((inst.n, inst.k))
        V = rng.standard_normal((inst.n, inst.k))
        a = float(np.sum(U * st.hess_vec(V)))
        b = float(np.sum(V * st.hess_vec(U)))
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


def test_complete_gradient_operator_form():
    # grad = 4 * adjoint(map(W)) @ Z; the factor 4 relates the exact gradient
    # to the unnormalized operator expression and is pinned here.
    rng = np.random.default_rng(5)
    for trial in range(10):
        inst = make_complete(rng)
        Z = rng.standard_normal((inst.n, inst.k))
        W = Z @ Z.T - inst.gram_target
        expected = 4.0 * edm_adjoint(edm_map(W)) @ Z
        np.testing.assert_allclose(inst.gradient(Z), expected, atol=1e-10, rtol=1e-10)


def test_second_order_quadratic_form_identity():
    # <dZ, Hess dZ> = 4 * ( <dZ dZ^T, adjoint(map(W))> + 1/2 ||map(dZ Z^T + Z dZ^T)||^2 )
    rng = np.random.default_rng(6)
    for trial in range(20):
        inst = make_complete(rng)
        Z = rng.standard_normal((inst.n, inst.k))
        dZ = rng.standard_normal((inst.n, inst.k))
        st = inst.prepare(Z)
        lhs = float(np.sum(dZ * st.hess_vec(dZ)))
        W = Z @ Z.T - inst.gram_target
        A = edm_adjoint(edm_map(W))
        B = dZ @ Z.T
        B = B + B.T
        rhs = 4.0 * (float(np.sum(dZ @ dZ.T * A)) + 0.5 * float(np.sum(edm_map(B) ** 2)))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))


def test_cost_equals_normal_operator_inner_product():
    rng = np.random.default_rng(7)
    for trial in range(10):
        inst = make_complete(rng)
        Z = rng.standard_normal((inst.n, inst.k))
        W = Z @ Z.T - inst.gram_target
        quad = float(np.sum(W * edm_adjoint(edm_map(W))))
        assert abs(inst.cost(Z) - quad) <= 1e-11 * max(1.0, quad)


def test_rank_one_entrywise_identity():
    # map(dZ Z^T + Z dZ^T)_ij == <dz_i - dz_j, z_i - z_j>
    rng = np.random.default_rng(8)
    for trial in range(10):
        n, k = 8, 3
        Z = rng.standard_normal((n, k))
        dZ = rng.standard_normal((n, k))
        B = dZ @ Z.T
        B = B + B.T
        D = edm_map(B)
        for i in range(n):
            for j in range(n):
                expected = float(np.dot(dZ[i] - dZ[j], Z[i] - Z[j]))
                assert abs(D[i, j] - expected) <= 1e-11 * max(1.0, abs(expected))


def test_cost_invariant_under_rigid_motions():
    rng = np.random.default_rng(9)
    for trial in range(10):
        inst = make_complete(rng, n=8, dg=2, k=3)
        Z = rng.standard_normal((8, 3))
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        v = rng.standard_normal(3)
        moved = Z @ Q + np.ones((8, 1)) * v[None, :]
        c0, c1 = inst.cost(Z), inst.cost(moved)
        assert abs(c0 - c1) <= 1e-10 * max(1.0, c0)


def test_symmetry_basis_full_rank():
    rng = np.random.default_rng(10)
    n, k = 9, 3
    Z = rng.standard_normal((n, k))
    Z -= Z.mean(axis=0)
    basis, deficient = symmetry_basis(Z)
    m = k * (k + 1) // 2
    assert basis.shape == (m, n, k)
    assert not deficient
    flat = basis.reshape(m, -1)
    np.testing.assert_allclose(flat @ flat.T, np.eye(m), atol=1e-10)
    # generators lie in the span of the returned basis
    proj = flat.T @ flat
    for j in range(k):
        T = np.zeros((n, k))
        T[:, j] = 1.0
        v = T.ravel()
        assert np.linalg.norm(proj @ v - v) <= 1e-9 * np.linalg.norm(v)
    S = np.zeros((k, k))
    S[0, 1], S[1, 0] = 1.0, -1.0
    v = (Z @ S).ravel()
    assert np.linalg.norm(proj @ v - v) <= 1e-9 * np.linalg.norm(v)


def test_symmetry_basis_rank_deficient_flagged():
    rng = np.random.default_rng(11)
    n, k = 7, 3
    Z = np.zeros((n, k))
    Z[:, :2] = rng.standard_normal((n, 2))  # rank 2 in dimension 3
    basis, deficient = symmetry_basis(Z)
    assert deficient
    assert basis.shape[0] <= k * (k + 1) // 2


def test_instance_scale_values():
    Y = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    inst = CompleteInstance(Y, 2)
    assert inst.scale == 1.0 + np.linalg.norm(Y) ** 4
    g = complete_graph(3)
    g = g.with_targets(squared_distance_targets(Y, g))
    with_ref = MaskedInstance(g, 2, scale_reference=Y)
    assert with_ref.scale == inst.scale
    bare = MaskedInstance(g, 2)
    assert bare.scale == 1.0 + float(g.targets @ g.targets)


def test_graph_validation():
    with pytest.raises(InvalidInputError):
        MeasurementGraph(3, np.array([0]), np.array([0]))  # self loop
    with pytest.raises(InvalidInputError):
        MeasurementGraph(3, np.array([1]), np.array([0]))  # unordered pair
    with pytest.raises(InvalidInputError):
        MeasurementGraph(3, np.array([0, 0]), np.array([1, 1]))  # duplicate
    with pytest.raises(InvalidInputError):
        MeasurementGraph(3, np.array([0, 0]), np.array([2, 1]))  # not sorted
    with pytest.raises(InvalidInputError):
        MeasurementGraph(3, np.array([0]), np.array([3]))  # out of range
    with pytest.raises(InvalidInputError):
        MeasurementGraph(3, np.array([0]), np.array([1]), targets=np.array([1.0, 2.0]))
    g = complete_graph(3)
    with pytest.raises(InvalidInputError):
        cost_masked(np.zeros((3, 2)), g)  # no targets
    with pytest.raises(InvalidInputError):
        MaskedInstance(g, 2)
    with pytest.raises(InvalidInputError):
        cost_complete(np.zeros((4, 2)), np.zeros((3, 2)))  # shape mismatch
