"""A tour of the layer-adapted tensor mesh.

Small diffusion parameters push the solution into thin boundary layers.  The
mesh puts a quarter of its cells in each layer strip of width
``lam = min(eps ln N, 1/4)`` and spreads the rest over the interior.
"""

import numpy as np

from morley_shishkin import bisect, build_shishkin_1d, shishkin_mesh, transition_parameter

for eps in (1.0, 1e-2, 1e-4, 1e-8):
    n = 16
    lam = transition_parameter(eps, n)
    widths = build_shishkin_1d(eps, n).widths
    print(f"eps={eps:<7g} lam={lam:.3e}  finest cell {widths.min():.3e}  coarsest {widths.max():.3e}"
          f"  aspect {widths.max() / widths.min():.1e}")

# Meshes are tensor products; bisection halves every cell and keeps the
# original breakpoints, which is what the double-mesh error estimate needs.
mesh = shishkin_mesh(1e-3, 8)
fine = bisect(mesh)
print("\ncoarse x-breakpoints:", np.round(mesh.mx.points, 5))
print("bisected keeps them: ", np.allclose(fine.mx.points[::2], mesh.mx.points))
