import numpy as np
import pytest
import scipy.sparse as sp

from morley_shishkin.assembly import (
    assemble,
    dump_coo,
    energy_matrices,
    energy_norm,
    local_matrices,
)
from morley_shishkin.dofmap import build_dof_map
from morley_shishkin.element import eval_basis, gauss_rule, morley_local_dofs, tensor_rule
from morley_shishkin.mesh import ElementGeom, Mesh1D, TensorMesh, element_geometry, shishkin_mesh, uniform_mesh
from morley_shishkin.problems import example2
from morley_shishkin.solver import is_positive_definite, relative_residual, solve_spd


def _brute_basis_integrals(mesh, dm, k, order=9):
    """Sum over elements of int phi_k, int |grad phi_k|^2 and int (lap phi_k)^2,
    evaluated point by point through eval_basis."""
    r = gauss_rule(order)
    tot = np.zeros(3)
    for i in range(mesh.nx):
        for j in range(mesh.ny):
            e = i * mesh.ny + j
            slots = np.nonzero(dm.scatter[e] == k)[0]
            if slots.size == 0:
                continue
            s = slots[0]
            sign = dm.signs[e, s]
            g = element_geometry(mesh, i, j)
            for a, wa in zip(r.nodes, r.weights):
                for b, wb in zip(r.nodes, r.weights):
                    x, y = g.to_physical(a, b)
                    ev = eval_basis(g, x, y)
                    w = wa * wb * g.hx * g.hy
                    tot[0] += w * sign * ev.values[s]
                    tot[1] += w * (ev.gradients[s] ** 2).sum()
                    tot[2] += w * ev.laplacians[s] ** 2
    return tot


def test_local_matrices_symmetric(rng):
    for _ in range(20):
        hx, hy = 10.0 ** rng.uniform(-6, 0, 2)
        g = ElementGeom(rng.uniform(), rng.uniform(), hx, hy)
        A, B = local_matrices(g, lambda x, y: 2.0 + x * y)
        assert np.max(np.abs(A - A.T)) <= 1e-13 * np.abs(A).max()
        assert np.max(np.abs(B - B.T)) <= 1e-13 * np.abs(B).max()


def test_local_b_constant_and_linear_modes():
    g = ElementGeom(0.0, 0.0, 1.0, 1.0)
    A, B = local_matrices(g)
    one = morley_local_dofs(g, lambda x, y: 1.0 + 0 * x, lambda x, y: (0 * x, 0 * x))
    np.testing.assert_allclose(B @ one, 0.0, atol=1e-13)
    np.testing.assert_allclose(A @ one, 0.0, atol=1e-13)
    g = ElementGeom(0.3, 0.2, 0.1, 0.05)
    A, B = local_matrices(g)
    x = morley_local_dofs(g, lambda x, y: x, lambda x, y: (1.0 + 0 * x, 0 * x))
    assert x @ B @ x == pytest.approx(4 * g.hx * g.hy, rel=1e-12)
    assert x @ A @ x == pytest.approx(0.0, abs=1e-12)


def test_local_a_against_known_polynomial():
    # v = x^2 + y^3 on an element: int (lap v)^2 = int (2 + 6y)^2
    g = ElementGeom(0.5, 0.4, 0.2, 0.1)
    A, _ = local_matrices(g)
    d = morley_local_dofs(g, lambda x, y: x**2 + y**3, lambda x, y: (2 * x, 3 * y**2))
    xi, eta, w = tensor_rule(6)
    _, y = g.to_physical(xi, eta)
    exact = np.sum(w * (2 + 6 * y) ** 2) * g.hx * g.hy
    assert d @ A @ d == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("eps,n", [(1.0, 4), (1e-2, 8), (1e-8, 16)])
def test_global_symmetric_positive(eps, n):
    mesh = shishkin_mesh(eps, n)
    dm = build_dof_map(mesh)
    K, rhs = assemble(mesh, dm, eps, 1.0, 1.0)
    assert K.shape == (dm.n_dofs, dm.n_dofs)
    assert abs(K - K.T).max() == 0.0
    assert np.all(K.diagonal() > 0)
    assert np.all(np.isfinite(rhs))
    assert is_positive_definite(K)
    if dm.n_dofs < 400:
        np.linalg.cholesky(K.toarray())


def test_rhs_brute_force_n2():
    mesh = uniform_mesh(2)
    dm = build_dof_map(mesh)
    K, rhs = assemble(mesh, dm, 1.0, 1.0, 1.0)
    assert rhs.shape == (5,)
    for k in range(5):
        assert rhs[k] == pytest.approx(_brute_basis_integrals(mesh, dm, k)[0], rel=1e-12, abs=1e-15)


def test_single_node_dof_energy_brute_force():
    mesh = uniform_mesh(4)
    dm = build_dof_map(mesh)
    A, B = energy_matrices(mesh, dm)
    k = int(dm.node_index[2, 1])
    v = np.eye(dm.n_dofs)[k]
    brute = _brute_basis_integrals(mesh, dm, k)
    assert v @ (B @ v) == pytest.approx(brute[1], rel=1e-12)
    assert v @ (A @ v) == pytest.approx(brute[2], rel=1e-12)


def test_quadrature_order_stability():
    mesh = shishkin_mesh(1e-3, 8)
    dm = build_dof_map(mesh)
    c = lambda x, y: 1.0 + x + 2.0 * y + x * y
    K5, _ = assemble(mesh, dm, 1e-3, c, 1.0, quad=5)
    K8, _ = assemble(mesh, dm, 1e-3, c, 1.0, quad=8)
    assert abs(K5 - K8).max() <= 1e-12 * abs(K8).max()


def test_energy_norm_properties(rng):
    mesh = shishkin_mesh(1e-4, 8)
    dm = build_dof_map(mesh)
    A, B = energy_matrices(mesh, dm)
    assert energy_norm(np.zeros(dm.n_dofs), 1e-4, A, B) == 0.0
    for _ in range(10):
        v = rng.normal(size=dm.n_dofs)
        assert energy_norm(v, 1e-4, A, B) > 0
    K, _ = assemble(mesh, dm, 1e-4, 1.0, 0.0)
    v = rng.normal(size=dm.n_dofs)
    assert v @ (K @ v) == pytest.approx(energy_norm(v, 1e-4, A, B) ** 2, rel=1e-10)


def test_shared_edge_dof_scatter_signs():
    mesh = TensorMesh(Mesh1D(np.array([0.0, 0.5, 1.0])), Mesh1D(np.array([0.0, 1.0])))
    dm = build_dof_map(mesh)
    assert dm.n_dofs == 1
    r = gauss_rule(5)
    y = 0.5 + 0.5 * r.nodes
    means = []
    for i in (0, 1):
        g = element_geometry(mesh, i, 0)
        e = i * mesh.ny
        ev = eval_basis(g, 0.5 + 0 * y, y)
        coeff = np.zeros(8)
        slot = np.nonzero(dm.scatter[e] == 0)[0][0]
        coeff[slot] = dm.signs[e, slot]
        means.append(ev.gradients[:, :, 0] @ coeff @ r.weights / 2)
    np.testing.assert_allclose(means, [1.0, 1.0], rtol=1e-13)
    K, _ = assemble(mesh, dm, 1.0, 1.0, 1.0)
    assert K[0, 0] > 0


def test_variable_coefficient_example2():
    mesh = shishkin_mesh(1e-2, 8)
    dm = build_dof_map(mesh)
    p = example2(1e-2)
    K, rhs = assemble(mesh, dm, p.eps, p.c, p.f)
    x, rep = solve_spd(K, rhs)
    assert relative_residual(K, x, rhs) <= 1e-12


def test_dump_coo(tmp_path):
    m = sp.csr_matrix(np.array([[4.0, 1.0 / 3.0], [1.0 / 3.0, 2.0]]))
    path = tmp_path / "m.txt"
    dump_coo(m, path)
    lines = path.read_text().splitlines()
    assert lines == ["0 0 4", "0 1 0.33333333333333331", "1 0 0.33333333333333331", "1 1 2"]
    back = np.zeros((2, 2))
    for line in lines:
        r, c, v = line.split()
        back[int(r), int(c)] = float(v)
    np.testing.assert_array_equal(back, m.toarray())
