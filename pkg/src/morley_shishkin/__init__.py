"""Rectangular Morley finite elements on Shishkin meshes for
``eps^2 lap^2 u - div(c grad u) = f`` on the unit square."""

from .assembly import assemble, energy_matrices, local_matrices
from .dofmap import DofMap, build_dof_map, local_to_global
from .element import (
    eval_basis,
    eval_reduced_basis,
    gauss_rule,
    interpolate_bilinear,
    interpolate_morley,
    interpolate_reduced,
    morley_local_dofs,
)
from .mesh import (
    EdgeClass,
    EdgeId,
    ElementGeom,
    Mesh1D,
    Orientation,
    TensorMesh,
    bisect,
    build_shishkin_1d,
    classify_edge,
    element_geometry,
    shishkin_mesh,
    transition_parameter,
    uniform_mesh,
)
from .problems import ProblemSpec, example1, example2, example3, get_problem, layer_constants
from .solver import NotConverged, NotPositiveDefinite, SolveOptions, SolveReport, solve_spd
from .study import (
    ConvergenceTable,
    MorleySolution,
    convergence_rate,
    energy_error_double_mesh,
    energy_error_exact,
    eval_solution,
    solve_problem,
)

__version__ = "0.1.0"
