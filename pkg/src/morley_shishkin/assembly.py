"""Element integrals and global assembly of ``eps^2 a_N + b_N``.

Element loops are vectorised over batches of elements: reference shape
functions are tabulated once at the tensor Gauss points and mapped to each
element by its half-widths.
"""

from __future__ import annotations

from typing import Callable, Union

import numpy as np
import scipy.sparse as sp

from .dofmap import DofMap
from .element import N_LOCAL, QuadRule, physical_basis, reference_basis, tensor_rule
from .mesh import ElementGeom, TensorMesh

Field = Union[float, Callable[[np.ndarray, np.ndarray], np.ndarray]]

DEFAULT_QUAD = 5
_CHUNK = 4096


def _order(quad) -> int:
    return quad.order if isinstance(quad, QuadRule) else int(quad)


def evaluate_field(field: Field, x, y) -> np.ndarray:
    if callable(field):
        return np.broadcast_to(np.asarray(field(x, y), dtype=float), np.shape(x))
    return np.full(np.shape(x), float(field))


def _element_batches(mesh: TensorMesh, quad, chunk=_CHUNK):
    """Yield ``(slice, xq, yq, wJ, basis)`` for batches of elements.

    ``basis`` is the physical ``(v, dx, dy, dxx, dxy, dyy)`` tuple with shape
    ``(batch, nq, 8)``; ``wJ`` holds quadrature weights times the Jacobian.
    """
    xi, eta, w = tensor_rule(_order(quad))
    ref = reference_basis(xi, eta)
    xc, yc, hx, hy = mesh.element_arrays()
    for start in range(0, xc.size, chunk):
        s = slice(start, min(start + chunk, xc.size))
        bx, by = hx[s, None], hy[s, None]
        xq = xc[s, None] + bx * xi
        yq = yc[s, None] + by * eta
        wJ = w * (bx * by)
        basis = physical_basis(bx, by, tuple(r[None] for r in ref))
        yield s, xq, yq, wJ, basis


def _local_blocks(mesh: TensorMesh, c: Field, quad):
    """Per-element ``(A_loc, B_loc)`` stacks of shape ``(n_elements, 8, 8)``."""
    n = mesh.n_elements
    A = np.empty((n, N_LOCAL, N_LOCAL))
    B = np.empty((n, N_LOCAL, N_LOCAL))
    for s, xq, yq, wJ, (v, dx, dy, dxx, dxy, dyy) in _element_batches(mesh, quad):
        lap = dxx + dyy
        A[s] = np.einsum("eq,eqi,eqj->eij", wJ, lap, lap)
        cw = wJ * evaluate_field(c, xq, yq)
        B[s] = np.einsum("eq,eqi,eqj->eij", cw, dx, dx) + np.einsum("eq,eqi,eqj->eij", cw, dy, dy)
    # exact symmetry (einsum rounding differs between (i, j) and (j, i))
    return _sym(A), _sym(B)


def _sym(M):
    return 0.5 * (M + np.swapaxes(M, -1, -2))


def local_matrices(geom: ElementGeom, c: Field = 1.0, quad=DEFAULT_QUAD):
    """``A_loc[i, j] = int_K lap(phi_i) lap(phi_j)`` and
    ``B_loc[i, j] = int_K c grad(phi_i) . grad(phi_j)`` on one element."""
    xi, eta, w = tensor_rule(_order(quad))
    ref = reference_basis(xi, eta)
    v, dx, dy, dxx, dxy, dyy = physical_basis(geom.hx, geom.hy, ref)
    wJ = w * geom.hx * geom.hy
    x, y = geom.to_physical(xi, eta)
    cw = wJ * evaluate_field(c, x, y)
    lap = dxx + dyy
    A = np.einsum("q,qi,qj->ij", wJ, lap, lap)
    B = np.einsum("q,qi,qj->ij", cw, dx, dx) + np.einsum("q,qi,qj->ij", cw, dy, dy)
    return _sym(A), _sym(B)


def local_load(mesh: TensorMesh, f: Field, quad=DEFAULT_QUAD) -> np.ndarray:
    """``int_K f phi_i`` for every element, shape ``(n_elements, 8)``."""
    F = np.empty((mesh.n_elements, N_LOCAL))
    for s, xq, yq, wJ, basis in _element_batches(mesh, quad):
        F[s] = np.einsum("eq,eqi->ei", wJ * evaluate_field(f, xq, yq), basis[0])
    return F


def scatter_matrix(dm: DofMap, blocks: np.ndarray) -> sp.csr_matrix:
    """Sum signed element blocks into a global CSR matrix."""
    g, s = dm.scatter, dm.signs
    rows = np.broadcast_to(g[:, :, None], blocks.shape)
    cols = np.broadcast_to(g[:, None, :], blocks.shape)
    vals = blocks * s[:, :, None] * s[:, None, :]
    keep = (rows >= 0) & (cols >= 0)
    m = sp.coo_matrix(
        (vals[keep], (rows[keep], cols[keep])), shape=(dm.n_dofs, dm.n_dofs)
    ).tocsr()
    m.sum_duplicates()
    return m


def scatter_vector(dm: DofMap, local: np.ndarray) -> np.ndarray:
    vals = local * dm.signs
    keep = dm.scatter >= 0
    return np.bincount(dm.scatter[keep], weights=vals[keep], minlength=dm.n_dofs)


def assemble(mesh: TensorMesh, dm: DofMap, eps: float, c: Field, f: Field, quad=DEFAULT_QUAD):
    """System matrix ``eps^2 a_N + b_N`` and load vector ``(f, phi_k)``."""
    A, B = _local_blocks(mesh, c, quad)
    K = scatter_matrix(dm, eps * eps * A + B)
    rhs = scatter_vector(dm, local_load(mesh, f, quad))
    return K, rhs


def energy_matrices(mesh: TensorMesh, dm: DofMap, quad=DEFAULT_QUAD):
    """Unscaled ``a_N`` and ``b_N`` (with ``c = 1``) matrices, so that
    ``||v||^2 = eps^2 v.A.v + v.B.v``."""
    A, B = _local_blocks(mesh, 1.0, quad)
    return scatter_matrix(dm, A), scatter_matrix(dm, B)


def energy_norm(v, eps: float, A, B) -> float:
    v = np.asarray(v, dtype=float)
    return float(np.sqrt(eps * eps * (v @ (A @ v)) + v @ (B @ v)))


def dump_coo(matrix, path) -> None:
    """Write ``row col value`` lines with 17 significant digits."""
    m = sp.coo_matrix(matrix)
    order = np.lexsort((m.col, m.row))
    with open(path, "w") as fh:
        for r, c, v in zip(m.row[order], m.col[order], m.data[order]):
            fh.write(f"{r} {c} {v:.17g}\n")
