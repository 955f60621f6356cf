"""Discrete solutions, energy-norm errors and convergence tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .assembly import DEFAULT_QUAD, assemble
from .dofmap import DofMap, build_dof_map, element_index, local_coefficients
from .element import gauss_rule, physical_basis, reference_basis, tensor_rule
from .mesh import TensorMesh, element_geometry, is_bisection
from .problems import ExactSolution, ProblemSpec
from .solver import SolveOptions, solve_spd

_CHUNK = 4096


@dataclass(eq=False)
class MorleySolution:
    mesh: TensorMesh
    dm: DofMap
    coeffs: np.ndarray
    eps: float

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.dm.n_dofs,):
            raise ValueError("coefficient vector does not match the dof map")
        self._local = None

    @property
    def local(self) -> np.ndarray:
        if self._local is None:
            self._local = local_coefficients(self.dm, self.coeffs)
        return self._local

    def evaluate_local(self, elems, xi, eta):
        """Value, gradient and Laplacian at local points of given elements.

        ``elems`` has shape ``(m,)`` and ``xi``/``eta`` shape ``(m, nq)``.
        """
        xc, yc, hx, hy = self.mesh.element_arrays()
        v, dx, dy, dxx, _, dyy = physical_basis(
            hx[elems, None], hy[elems, None], reference_basis(xi, eta)
        )
        c = self.local[elems][:, None, :]
        return (
            np.sum(v * c, axis=-1),
            np.sum(dx * c, axis=-1),
            np.sum(dy * c, axis=-1),
            np.sum((dxx + dyy) * c, axis=-1),
        )


def solve_problem(problem: ProblemSpec, mesh: TensorMesh, quad=DEFAULT_QUAD,
                  opts: Optional[SolveOptions] = None):
    """Assemble and solve on ``mesh``; returns ``(MorleySolution, SolveReport)``."""
    dm = build_dof_map(mesh)
    K, rhs = assemble(mesh, dm, problem.eps, problem.c, problem.f, quad)
    x, report = solve_spd(K, rhs, opts)
    return MorleySolution(mesh, dm, x, problem.eps), report


def eval_solution(sol: MorleySolution, i: int, j: int, x, y, tol: float = 1e-12):
    """``(value, (u_x, u_y), laplacian)`` of the element ``(i, j)`` polynomial."""
    geom = element_geometry(sol.mesh, i, j)
    xi, eta = geom.to_local(x, y)
    if np.any(np.abs(xi) > 1 + tol) or np.any(np.abs(eta) > 1 + tol):
        raise ValueError(f"point outside element ({i}, {j})")
    e = element_index(sol.dm, i, j)
    xi, eta = np.broadcast_arrays(np.atleast_1d(xi), np.atleast_1d(eta))
    v, gx, gy, lap = sol.evaluate_local(np.array([e]), xi[None], eta[None])
    out = [a[0] for a in (v, gx, gy, lap)]
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        out = [float(a[0]) for a in out]
    return out[0], (out[1], out[2]), out[3]


def _pairwise_sum(a: np.ndarray) -> float:
    # numpy's sum is pairwise along a contiguous axis and deterministic.
    return float(np.sum(np.ascontiguousarray(a, dtype=float)))


def energy_error_exact(sol: MorleySolution, exact: Optional[ExactSolution], quad=DEFAULT_QUAD) -> float:
    """Broken norm ``sqrt(eps^2 |u - u_N|_{2,N}^2 + |u - u_N|_{1,N}^2)``."""
    if exact is None:
        raise ValueError("the problem has no exact solution")
    xi, eta, w = tensor_rule(quad if isinstance(quad, int) else quad.order)
    xc, yc, hx, hy = sol.mesh.element_arrays()
    eps2 = sol.eps**2
    parts = []
    for start in range(0, xc.size, _CHUNK):
        e = np.arange(start, min(start + _CHUNK, xc.size))
        X = np.broadcast_to(xi, (e.size, xi.size))
        Y = np.broadcast_to(eta, (e.size, eta.size))
        _, gx, gy, lap = sol.evaluate_local(e, X, Y)
        x = xc[e, None] + hx[e, None] * xi
        y = yc[e, None] + hy[e, None] * eta
        dens = (
            eps2 * (exact.laplacian(x, y) - lap) ** 2
            + (exact.ux(x, y) - gx) ** 2
            + (exact.uy(x, y) - gy) ** 2
        )
        parts.append(np.sum(dens * w, axis=1) * hx[e] * hy[e])
    return math.sqrt(_pairwise_sum(np.concatenate(parts)))


def energy_norm_quadrature(sol: MorleySolution, quad=DEFAULT_QUAD) -> float:
    """``||u_N||_{eps,N}`` by element quadrature."""
    zero = ExactSolution(*(lambda x, y: 0.0 * x for _ in range(5)))
    return energy_error_exact(sol, zero, quad)


def energy_error_double_mesh(coarse: MorleySolution, fine: MorleySolution, quad=DEFAULT_QUAD) -> float:
    """``||u_fine - u_coarse||_{eps,N}`` integrated over the fine elements."""
    if not is_bisection(coarse.mesh, fine.mesh):
        raise ValueError("fine mesh is not the bisection of the coarse mesh")
    if coarse.eps != fine.eps:
        raise ValueError("coarse and fine solutions use different eps")
    xi, eta, w = tensor_rule(quad if isinstance(quad, int) else quad.order)
    fm, cm = fine.mesh, coarse.mesh
    _, _, hx, hy = fm.element_arrays()
    eps2 = coarse.eps**2
    parts = []
    for start in range(0, fm.n_elements, _CHUNK):
        e = np.arange(start, min(start + _CHUNK, fm.n_elements))
        I, J = np.divmod(e, fm.ny)
        parent = (I // 2) * cm.ny + J // 2
        # Child local coordinates mapped into the parent: (2a - 1 + t) / 2.
        pxi = (2.0 * (I % 2)[:, None] - 1.0 + xi) / 2.0
        peta = (2.0 * (J % 2)[:, None] - 1.0 + eta) / 2.0
        X = np.broadcast_to(xi, (e.size, xi.size))
        Y = np.broadcast_to(eta, (e.size, eta.size))
        _, fgx, fgy, flap = fine.evaluate_local(e, X, Y)
        _, cgx, cgy, clap = coarse.evaluate_local(parent, pxi, peta)
        dens = eps2 * (flap - clap) ** 2 + (fgx - cgx) ** 2 + (fgy - cgy) ** 2
        parts.append(np.sum(dens * w, axis=1) * hx[e] * hy[e])
    return math.sqrt(_pairwise_sum(np.concatenate(parts)))


def convergence_rate(e_n: float, e_2n: float) -> float:
    """Observed order ``log2(e_N / e_2N)``."""
    if not (e_n > 0 and e_2n > 0):
        raise ValueError("errors must be positive")
    return (math.log(e_n) - math.log(e_2n)) / math.log(2.0)


def error_envelope(eps: float, n: int) -> float:
    """``eps^(1/2)/N + eps ln(N)/N + N^(-3/2)``."""
    return math.sqrt(eps) / n + eps * math.log(n) / n + n**-1.5


def morley_interpolant(mesh: TensorMesh, dm: DofMap, v, grad, order: int = 5) -> np.ndarray:
    """Global degrees of freedom of a smooth ``v`` (node values and edge means)."""
    coeffs = np.zeros(dm.n_dofs)
    X, Y = np.meshgrid(mesh.mx.points, mesh.my.points, indexing="ij")
    mask = dm.node_index >= 0
    coeffs[dm.node_index[mask]] = v(X[mask], Y[mask])
    r = gauss_rule(order)
    px, py = mesh.mx.points, mesh.my.points
    # Vertical edges: mean of v_x along x = px[i], y in [py[j], py[j+1]].
    i, j = np.nonzero(dm.vedge_index >= 0)
    yq = 0.5 * (py[j] + py[j + 1])[:, None] + 0.5 * (py[j + 1] - py[j])[:, None] * r.nodes
    gx, _ = grad(np.broadcast_to(px[i, None], yq.shape), yq)
    coeffs[dm.vedge_index[i, j]] = np.asarray(gx) @ r.weights / 2.0
    i, j = np.nonzero(dm.hedge_index >= 0)
    xq = 0.5 * (px[i] + px[i + 1])[:, None] + 0.5 * (px[i + 1] - px[i])[:, None] * r.nodes
    _, gy = grad(xq, np.broadcast_to(py[j, None], xq.shape))
    coeffs[dm.hedge_index[i, j]] = np.asarray(gy) @ r.weights / 2.0
    return coeffs


def reduced_interpolation_errors(mesh: TensorMesh, v, grad, hess, quad: int = 6, edge_order: int = 8):
    """Broken ``H^1`` and ``H^2`` seminorms of ``v - Pi^- v`` on ``mesh``.

    ``hess(x, y)`` returns ``(v_xx, v_xy, v_yy)``.
    """
    xi, eta, w = tensor_rule(quad)
    ref = reference_basis(xi, eta, reduced=True)
    r = gauss_rule(edge_order)
    t, tw = r.nodes, r.weights / 2.0
    xc, yc, hx, hy = mesh.element_arrays()
    X, Y = xc[:, None], yc[:, None]
    HX, HY = hx[:, None], hy[:, None]
    sx = np.array([-1.0, -1.0, 1.0, 1.0])
    sy = np.array([-1.0, 1.0, 1.0, -1.0])
    dofs = np.empty((xc.size, 8))
    dofs[:, :4] = v(X + sx * HX, Y + sy * HY)
    dofs[:, 4] = -grad(X + HX * t, Y - HY)[1] @ tw
    dofs[:, 5] = -grad(X - HX, Y + HY * t)[0] @ tw
    dofs[:, 6] = grad(X + HX * t, Y + HY)[1] @ tw
    dofs[:, 7] = grad(X + HX, Y + HY * t)[0] @ tw
    b = physical_basis(HX, HY, tuple(a[None] for a in ref))
    c = dofs[:, None, :]
    _, dx, dy, dxx, dxy, dyy = [np.sum(a * c, axis=-1) for a in b]
    x, y = X + HX * xi, Y + HY * eta
    vx, vy = grad(x, y)
    vxx, vxy, vyy = hess(x, y)
    wJ = w * HX * HY
    h1 = np.sum(wJ * ((vx - dx) ** 2 + (vy - dy) ** 2))
    h2 = np.sum(wJ * ((vxx - dxx) ** 2 + 2.0 * (vxy - dxy) ** 2 + (vyy - dyy) ** 2))
    return math.sqrt(h1), math.sqrt(h2)


# ---------------------------------------------------------------------------
# Convergence tables


@dataclass
class Row:
    eps: float
    n: int
    error: float
    rate: Optional[float] = None
    residual: float = float("nan")


@dataclass
class ConvergenceTable:
    problem: str
    estimator: str
    norm: str = "energy"
    coupled: bool = False
    rows: List[Row] = field(default_factory=list)

    def add(self, eps, n, error, residual=float("nan")):
        self.rows.append(Row(float(eps), int(n), float(error), None, float(residual)))

    def fill_rates(self):
        """Attach rates to the coarser row of each ``(N, 2N)`` pair."""
        for row in self.rows:
            row.rate = None
            succ = self.successor(row)
            if succ is not None:
                row.rate = convergence_rate(row.error, succ.error)
        return self

    def successor(self, row: Row) -> Optional[Row]:
        for other in self.rows:
            if other.n != 2 * row.n:
                continue
            if self.coupled or other.eps == row.eps:
                return other
        return None

    def lookup(self, eps, n) -> Row:
        for row in self.rows:
            if row.n == n and (self.coupled or math.isclose(row.eps, eps, rel_tol=1e-12)):
                return row
        raise KeyError((eps, n))

    def to_csv(self) -> str:
        lines = ["problem,estimator,eps,N,error,rate"]
        for r in self.rows:
            rate = "" if r.rate is None else format_sci(r.rate)
            lines.append(
                f"{self.problem},{self.estimator},{format_eps(r.eps)},{r.n},{format_sci(r.error)},{rate}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        header = ["eps", "N", "error", "rate"]
        body = [
            [format_eps(r.eps), str(r.n), f"{r.error:.2e}", "" if r.rate is None else f"{r.rate:.2f}"]
            for r in self.rows
        ]
        widths = [max(len(h), *(len(b[k]) for b in body)) if body else len(h) for k, h in enumerate(header)]
        fmt = lambda cells: "| " + " | ".join(c.rjust(wd) for c, wd in zip(cells, widths)) + " |"
        lines = [
            f"<!-- {self.problem}, {self.estimator} estimator, {self.norm} norm -->",
            fmt(header),
            "|" + "|".join("-" * (wd + 1) + ":" for wd in widths) + "|",
        ]
        lines.extend(fmt(b) for b in body)
        return "\n".join(lines) + "\n"


def _strip_exponent(s: str) -> str:
    mant, exp = s.split("e")
    return f"{mant}e{int(exp)}"


def format_sci(x: float) -> str:
    """Fixed six fractional digits, compact exponent: ``2.080000e-3``."""
    return _strip_exponent(f"{x:.6e}")


def format_eps(x: float) -> str:
    """Shortest round-trip mantissa, compact exponent: ``1e0``, ``6.25e-2``."""
    return _strip_exponent(np.format_float_scientific(x, trim="-", exp_digits=1))
