"""Shared oracles for the element tests."""

import numpy as np

from morley_shishkin.element import gauss_rule, physical_basis, reference_basis

# Local DOF sites: 4 vertices then Gauss points on e1 (bottom), e2 (left),
# e3 (top), e4 (right) with outward normals.
EDGES = [((0.0, -1.0), "bottom"), ((-1.0, 0.0), "left"), ((0.0, 1.0), "top"), ((1.0, 0.0), "right")]


def edge_local_points(order=5):
    t = gauss_rule(order).nodes
    one = np.ones_like(t)
    return [(t, -one), (-one, t), (t, one), (one, t)]


def local_duality_matrix(hx, hy, reduced=False, order=5):
    """``D[i, j] = DOF_j(phi_i)`` evaluated at exact local points, plus the
    per-entry integrand magnitude used to judge rounding."""
    w = gauss_rule(order).weights / 2.0
    D = np.empty((8, 8))
    S = np.ones((8, 8))
    v, *_ = physical_basis(hx, hy, reference_basis(np.array([-1.0, -1, 1, 1]), np.array([-1.0, 1, 1, -1]), reduced))
    D[:, :4] = v.T
    for k, ((xi, eta), ((nx, ny), _)) in enumerate(zip(edge_local_points(order), EDGES)):
        _, dx, dy, *_ = physical_basis(hx, hy, reference_basis(xi, eta, reduced))
        dn = nx * dx + ny * dy
        D[:, 4 + k] = w @ dn
        S[:, 4 + k] = np.maximum(np.abs(dn).max(axis=0), 1.0)
    return D, S
