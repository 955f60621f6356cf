"""The rectangular Morley element, one cell at a time.

Each cell carries eight degrees of freedom: the four vertex values and the
mean outward normal derivative on each edge.  The local space contains all
quadratics, so the interpolant of a quadratic is exact.
"""

import numpy as np

from morley_shishkin import ElementGeom, eval_basis, morley_local_dofs

geom = ElementGeom(xc=0.3, yc=0.6, hx=0.05, hy=0.002)   # a strongly anisotropic cell


def quad(x, y):
    return 1 + 2 * x - y + 3 * x * x - x * y + 5 * y * y


def grad(x, y):
    return 2 + 6 * x - y, -1 - x + 10 * y


# The shape functions are dual to the dofs, so the dofs are the coefficients.
coeffs = morley_local_dofs(geom, quad, grad)
print("local dofs of the quadratic:", np.round(coeffs, 6))

rng = np.random.default_rng(0)
xs, ys = geom.to_physical(rng.uniform(-1, 1, 5), rng.uniform(-1, 1, 5))
vals = eval_basis(geom, xs, ys).values @ coeffs
print("max interpolation error on the quadratic:", np.max(np.abs(vals - quad(xs, ys))))
