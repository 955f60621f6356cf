"""Solve the model problem with a known solution and watch the error fall.

The error is measured in the broken energy norm
``sqrt(eps^2 |lap(u - u_N)|^2 + |grad(u - u_N)|^2)`` summed over cells.
For tiny eps the first-order part dominates and the error drops by about
four per doubling of N; at eps = 1 it is the second-order part.
"""

from morley_shishkin import (
    ConvergenceTable,
    energy_error_exact,
    example1,
    shishkin_mesh,
    solve_problem,
)

table = ConvergenceTable(problem="ex1", estimator="exact")
for eps in (1.0, 1e-2, 1e-8):
    problem = example1(eps)
    for n in (8, 16, 32, 64):
        sol, report = solve_problem(problem, shishkin_mesh(eps, n))
        table.add(eps, n, energy_error_exact(sol, problem.exact), report.residual)
print(table.fill_rates().to_markdown())
