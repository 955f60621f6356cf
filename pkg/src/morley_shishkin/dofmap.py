"""Global numbering of the Morley degrees of freedom.

Unknowns are the values at interior mesh nodes and the means of the normal
derivative along interior edges. Global edge unknowns use the normal ``+x``
on vertical edges and ``+y`` on horizontal edges, so an element sees a
global edge unknown with sign ``+1`` on its right/top edge and ``-1`` on its
left/bottom edge. Everything on the boundary is constrained to zero and
removed from the system; constrained slots carry the index ``-1``.

Ordering: interior nodes first (x-index outermost), then interior vertical
edges, then interior horizontal edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import TensorMesh

CONSTRAINED = -1


@dataclass(frozen=True, eq=False)
class DofMap:
    mesh: TensorMesh
    n_dofs: int
    node_index: np.ndarray  # (nx+1, ny+1)
    vedge_index: np.ndarray  # (nx+1, ny)
    hedge_index: np.ndarray  # (nx, ny+1)
    scatter: np.ndarray  # (n_elements, 8) global index or CONSTRAINED
    signs: np.ndarray  # (n_elements, 8) +1 / -1

    @property
    def n_nodes(self) -> int:
        return int((self.node_index >= 0).sum())


def build_dof_map(mesh: TensorMesh) -> DofMap:
    nx, ny = mesh.nx, mesh.ny
    counter = 0

    def number(shape, interior):
        nonlocal counter
        idx = np.full(shape, CONSTRAINED, dtype=np.int64)
        k = int(interior.sum())
        idx[interior] = np.arange(counter, counter + k)
        counter += k
        return idx

    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny + 1), indexing="ij")
    node = number((nx + 1, ny + 1), (ii > 0) & (ii < nx) & (jj > 0) & (jj < ny))
    ii, jj = np.meshgrid(np.arange(nx + 1), np.arange(ny), indexing="ij")
    vedge = number((nx + 1, ny), (ii > 0) & (ii < nx))
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny + 1), indexing="ij")
    hedge = number((nx, ny + 1), (jj > 0) & (jj < ny))

    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    i, j = i.ravel(), j.ravel()
    scatter = np.stack(
        [
            node[i, j],  # a1
            node[i, j + 1],  # a2
            node[i + 1, j + 1],  # a3
            node[i + 1, j],  # a4
            hedge[i, j],  # e1 bottom
            vedge[i, j],  # e2 left
            hedge[i, j + 1],  # e3 top
            vedge[i + 1, j],  # e4 right
        ],
        axis=1,
    )
    signs = np.tile(np.array([1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0]), (i.size, 1))
    for arr in (node, vedge, hedge, scatter, signs):
        arr.setflags(write=False)
    return DofMap(mesh, counter, node, vedge, hedge, scatter, signs)


def element_index(dm: DofMap, i: int, j: int) -> int:
    mesh = dm.mesh
    if not (0 <= i < mesh.nx and 0 <= j < mesh.ny):
        raise IndexError(f"element ({i}, {j}) outside a {mesh.nx}x{mesh.ny} mesh")
    return i * mesh.ny + j


def local_to_global(dm: DofMap, i: int, j: int):
    """The 8 ``(global index or None, sign)`` pairs of element ``(i, j)``."""
    e = element_index(dm, i, j)
    return [
        (None if g == CONSTRAINED else int(g), float(s))
        for g, s in zip(dm.scatter[e], dm.signs[e])
    ]


def local_coefficients(dm: DofMap, coeffs) -> np.ndarray:
    """Signed local coefficient vectors of all elements, shape ``(n_elements, 8)``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (dm.n_dofs,):
        raise ValueError(f"expected {dm.n_dofs} coefficients, got {coeffs.shape}")
    padded = np.append(coeffs, 0.0)  # index -1 picks the trailing zero
    return padded[dm.scatter] * dm.signs
