"""Rectangular Morley element.

Shape functions are written in the local coordinates
``xi = (x - xc) / hx`` and ``eta = (y - yc) / hy`` of an element of size
``2 hx x 2 hy``; this keeps evaluation accurate on the very thin cells that
appear inside boundary layers. The local ordering is always
``(p1, p2, p3, p4, q1, q2, q3, q4)`` with

* vertices ``a1 = (-,-)``, ``a2 = (-,+)``, ``a3 = (+,+)``, ``a4 = (+,-)``,
* edges ``e1`` bottom, ``e2`` left, ``e3`` top, ``e4`` right.

The edge functions carry a length factor, e.g. ``q2 = hx * Q2(xi)``, so the
physical derivatives are obtained from reference derivatives by
:func:`scale_factors`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import ElementGeom

N_LOCAL = 8

# Vertex sign pattern (sx, sy) for a1..a4.
VERTEX_SX = np.array([-1.0, -1.0, 1.0, 1.0])
VERTEX_SY = np.array([-1.0, 1.0, 1.0, -1.0])

# Which reference coordinate each edge function depends on: 1 = eta, 0 = xi.
_EDGE_USES_ETA = (True, False, True, False)


@dataclass(frozen=True)
class QuadRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return self.nodes.size


@lru_cache(maxsize=None)
def gauss_rule(order: int) -> QuadRule:
    """Gauss-Legendre rule with ``order`` points on ``[-1, 1]``."""
    if not 1 <= order <= 16:
        raise ValueError(f"unsupported quadrature order {order} (need 1..16)")
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(x, w)


def tensor_rule(order: int):
    """Tensor-product rule on ``[-1, 1]^2`` as flat ``(xi, eta, w)`` arrays."""
    r = gauss_rule(order)
    xi, eta = np.meshgrid(r.nodes, r.nodes, indexing="ij")
    w = np.outer(r.weights, r.weights)
    return xi.ravel(), eta.ravel(), w.ravel()


@dataclass
class LocalBasisEval:
    """Values and derivatives of the 8 shape functions at one point.

    ``gradients`` has shape ``(8, 2)`` and ``seconds`` ``(8, 3)`` with columns
    ``(dxx, dxy, dyy)``.
    """

    values: np.ndarray
    gradients: np.ndarray
    seconds: np.ndarray

    @property
    def laplacians(self) -> np.ndarray:
        return self.seconds[:, 0] + self.seconds[:, 2]


def reference_basis(xi, eta, reduced: bool = False):
    """Reference shape functions and their xi/eta derivatives.

    Returns a tuple ``(v, d_xi, d_eta, d_xixi, d_xieta, d_etaeta)`` of arrays
    with a trailing axis of length 8. These are the functions in local
    coordinates *before* the length factors of the edge functions are applied.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    shape = np.broadcast(xi, eta).shape + (N_LOCAL,)
    out = [np.zeros(shape) for _ in range(6)]
    v, dx, dy, dxx, dxy, dyy = out
    x = xi[..., None]
    y = eta[..., None]
    sx, sy = VERTEX_SX, VERTEX_SY
    bil = 2.0 * (1.0 + sx * x) * (1.0 + sy * y)
    if reduced:
        v[..., :4] = (bil + sx * x + sy * y) / 8.0
        dx[..., :4] = (2.0 * sx * (1.0 + sy * y) + sx) / 8.0
        dy[..., :4] = (2.0 * sy * (1.0 + sx * x) + sy) / 8.0
    else:
        v[..., :4] = (bil - sx * (x**3 - x) - sy * (y**3 - y)) / 8.0
        dx[..., :4] = (2.0 * sx * (1.0 + sy * y) - sx * (3.0 * x**2 - 1.0)) / 8.0
        dy[..., :4] = (2.0 * sy * (1.0 + sx * x) - sy * (3.0 * y**2 - 1.0)) / 8.0
        dxx[..., :4] = -6.0 * sx * x / 8.0
        dyy[..., :4] = -6.0 * sy * y / 8.0
    dxy[..., :4] = np.broadcast_to(2.0 * sx * sy / 8.0, shape[:-1] + (4,))

    # Edge functions: q1, q3 depend on eta; q2, q4 on xi. Signs: q1/q2 carry -1/4,
    # q3/q4 carry +1/4; cubics (t+1)(t-1)^2 = t^3 - t^2 - t + 1 and
    # (t+1)^2(t-1) = t^3 + t^2 - t - 1.
    for k, (uses_eta, low) in enumerate(zip(_EDGE_USES_ETA, (True, True, False, False))):
        t = eta if uses_eta else xi
        if low:
            if reduced:
                f, f1, f2 = -(-(t**2) - t + 1.0) / 4.0, -(-2.0 * t - 1.0) / 4.0, np.full_like(t, 0.5)
            else:
                f = -(t**3 - t**2 - t + 1.0) / 4.0
                f1 = -(3.0 * t**2 - 2.0 * t - 1.0) / 4.0
                f2 = -(6.0 * t - 2.0) / 4.0
        else:
            if reduced:
                f, f1, f2 = (t**2 - t - 1.0) / 4.0, (2.0 * t - 1.0) / 4.0, np.full_like(t, 0.5)
            else:
                f = (t**3 + t**2 - t - 1.0) / 4.0
                f1 = (3.0 * t**2 + 2.0 * t - 1.0) / 4.0
                f2 = (6.0 * t + 2.0) / 4.0
        col = 4 + k
        v[..., col] = f
        if uses_eta:
            dy[..., col] = f1
            dyy[..., col] = f2
        else:
            dx[..., col] = f1
            dxx[..., col] = f2
    return v, dx, dy, dxx, dxy, dyy


def scale_factors(hx, hy):
    """Length factors of the 8 shape functions, shape ``(..., 8)``."""
    hx = np.asarray(hx, dtype=float)
    hy = np.asarray(hy, dtype=float)
    one = np.ones_like(hx + hy)
    return np.stack([one, one, one, one, hy * one, hx * one, hy * one, hx * one], axis=-1)


def physical_basis(hx, hy, ref):
    """Map reference derivatives to physical ones.

    ``hx``/``hy`` broadcast against the leading axes of the arrays in ``ref``
    (with the trailing shape-function axis appended). Returns
    ``(v, dx, dy, dxx, dxy, dyy)``.
    """
    v, dx, dy, dxx, dxy, dyy = ref
    hx = np.asarray(hx, dtype=float)[..., None]
    hy = np.asarray(hy, dtype=float)[..., None]
    s = scale_factors(hx[..., 0], hy[..., 0])
    return (
        s * v,
        s * dx / hx,
        s * dy / hy,
        s * dxx / (hx * hx),
        s * dxy / (hx * hy),
        s * dyy / (hy * hy),
    )


def _eval(geom: ElementGeom, x, y, reduced):
    xi, eta = geom.to_local(x, y)
    v, dx, dy, dxx, dxy, dyy = physical_basis(geom.hx, geom.hy, reference_basis(xi, eta, reduced))
    return LocalBasisEval(v, np.stack([dx, dy], axis=-1), np.stack([dxx, dxy, dyy], axis=-1))


def eval_basis(geom: ElementGeom, x, y) -> LocalBasisEval:
    """Full Morley shape functions at physical point(s) ``(x, y)``."""
    return _eval(geom, x, y, reduced=False)


def eval_reduced_basis(geom: ElementGeom, x, y) -> LocalBasisEval:
    """Reduced (cubic-free) shape functions at physical point(s) ``(x, y)``."""
    return _eval(geom, x, y, reduced=True)


def edge_points(geom: ElementGeom, order: int = 5):
    """Gauss points on the four edges.

    Returns ``(x, y, nx, ny, w)``: coordinates of shape ``(4, order)``, the
    outward normal of each edge and weights normalised so that
    ``sum(w * g)`` is the edge mean of ``g``.
    """
    r = gauss_rule(order)
    t = r.nodes
    xs = np.empty((4, t.size))
    ys = np.empty((4, t.size))
    xs[0], ys[0] = geom.xc + geom.hx * t, geom.yc - geom.hy  # e1 bottom
    xs[1], ys[1] = geom.xc - geom.hx, geom.yc + geom.hy * t  # e2 left
    xs[2], ys[2] = geom.xc + geom.hx * t, geom.yc + geom.hy  # e3 top
    xs[3], ys[3] = geom.xc + geom.hx, geom.yc + geom.hy * t  # e4 right
    nx = np.array([0.0, -1.0, 0.0, 1.0])
    ny = np.array([-1.0, 0.0, 1.0, 0.0])
    return xs, ys, nx, ny, r.weights / 2.0


def morley_local_dofs(geom: ElementGeom, v, grad, order: int = 5) -> np.ndarray:
    """The 8 Morley degrees of freedom of ``v`` on ``geom``.

    ``v(x, y)`` and ``grad(x, y) -> (v_x, v_y)`` must accept numpy arrays.
    The result holds the vertex values ``v(a1..a4)`` followed by the edge
    means of the outward normal derivative on ``e1..e4``.
    """
    a = geom.vertices()
    vals = np.asarray(v(a[:, 0], a[:, 1]), dtype=float) * np.ones(4)
    xs, ys, nx, ny, w = edge_points(geom, order)
    gx, gy = grad(xs, ys)
    gx = np.broadcast_to(np.asarray(gx, dtype=float), xs.shape)
    gy = np.broadcast_to(np.asarray(gy, dtype=float), xs.shape)
    dn = gx * nx[:, None] + gy * ny[:, None]
    return np.concatenate([vals, dn @ w])


def interpolate_morley(geom: ElementGeom, dofs) -> np.ndarray:
    """Coefficients of the Morley interpolant in the ``(p, q)`` basis.

    The basis is dual to the degrees of freedom, so this is the identity.
    """
    dofs = np.asarray(dofs, dtype=float)
    if dofs.shape != (N_LOCAL,):
        raise ValueError("expected 8 local degrees of freedom")
    return dofs.copy()


def interpolate_reduced(geom: ElementGeom, dofs) -> np.ndarray:
    """Coefficients of the reduced interpolant in the ``(p-, q-)`` basis."""
    return interpolate_morley(geom, dofs)


def evaluate_local(geom: ElementGeom, coeffs, x, y, reduced: bool = False):
    """Evaluate ``sum_k coeffs[k] * phi_k`` and its derivatives.

    Returns ``(value, (dx, dy), (dxx, dxy, dyy))``.
    """
    b = _eval(geom, x, y, reduced)
    c = np.asarray(coeffs, dtype=float)
    val = b.values @ c
    grad = np.moveaxis(b.gradients, -2, -1) @ c
    sec = np.moveaxis(b.seconds, -2, -1) @ c
    return val, (grad[..., 0], grad[..., 1]), (sec[..., 0], sec[..., 1], sec[..., 2])


def interpolate_bilinear(geom: ElementGeom, vertex_values) -> np.ndarray:
    """Coefficients ``(c0, c1, c2, c3)`` of ``c0 + c1 x + c2 y + c3 x y``
    taking ``vertex_values`` at ``a1..a4``."""
    b = bilinear_local(vertex_values)
    # b0 + b1 xi + b2 eta + b3 xi eta with xi = (x - xc)/hx, eta = (y - yc)/hy
    xc, yc, hx, hy = geom.xc, geom.yc, geom.hx, geom.hy
    b1, b2, b3 = b[1] / hx, b[2] / hy, b[3] / (hx * hy)
    return np.array(
        [
            b[0] - b1 * xc - b2 * yc + b3 * xc * yc,
            b1 - b3 * yc,
            b2 - b3 * xc,
            b3,
        ]
    )


def bilinear_local(vertex_values) -> np.ndarray:
    """Bilinear interpolant in local coordinates, ``b0 + b1 xi + b2 eta + b3 xi eta``."""
    v1, v2, v3, v4 = np.asarray(vertex_values, dtype=float)
    return np.array(
        [
            (v1 + v2 + v3 + v4) / 4.0,
            (-v1 - v2 + v3 + v4) / 4.0,
            (-v1 + v2 + v3 - v4) / 4.0,
            (v1 - v2 + v3 - v4) / 4.0,
        ]
    )
