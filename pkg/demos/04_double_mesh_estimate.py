"""Estimate the error without an exact solution.

Solve on a mesh and on its bisection, then measure the difference of the
two discrete solutions on the fine cells.  On layer-adapted meshes this
tracks the true error closely, which is checked first on a problem whose
solution is known.
"""

from morley_shishkin import (
    bisect,
    energy_error_double_mesh,
    energy_error_exact,
    example1,
    example2,
    shishkin_mesh,
    solve_problem,
)

eps, n = 1e-4, 32
problem = example1(eps)
mesh = shishkin_mesh(eps, n)
coarse, _ = solve_problem(problem, mesh)
fine, _ = solve_problem(problem, bisect(mesh))
print(f"known solution: true error {energy_error_exact(coarse, problem.exact):.3e}, "
      f"double-mesh estimate {energy_error_double_mesh(coarse, fine):.3e}")

# A variable-coefficient problem with no closed-form solution.
print("\nvariable coefficient problem, eps=1e-6")
problem = example2(1e-6)
for n in (16, 32, 64):
    mesh = shishkin_mesh(problem.eps, n)
    coarse, _ = solve_problem(problem, mesh)
    fine, _ = solve_problem(problem, bisect(mesh))
    print(f"  N={n:<3d} estimate {energy_error_double_mesh(coarse, fine):.3e}")
