"""Solution of the symmetric positive definite Morley systems.

Layer cells make the diagonal of ``eps^2 a_N + b_N`` span many orders of
magnitude, so the system is symmetrically Jacobi-scaled before it is
factorised. The direct path factorises with a symmetric fill-reducing
ordering and no pivoting; the pivots of that factorisation are the
``D`` of ``L D L^T``, so a nonpositive pivot means the matrix is not SPD.

On the thinnest layer meshes rounding ``x`` to float64 alone leaves a relative
residual near 1e-10, so the direct solution is refined with residuals and
iterates kept in ``np.longdouble`` (a no-op where long double is float64).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    pass


class NotPositiveDefinite(SolverError):
    pass


class NotConverged(SolverError):
    def __init__(self, message, best_residual):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass
class SolveOptions:
    method: str = "direct"
    rel_residual_tol: float = 1e-12
    max_iterations: int = 20000
    prescale: bool = True
    refinement_steps: int = 3
    extended_precision: bool = True  # refine with long double residuals and iterate

    def __post_init__(self):
        if self.method not in ("direct", "cg"):
            raise ValueError(f"unknown solver method {self.method!r}")
        if not self.rel_residual_tol > 0:
            raise ValueError("rel_residual_tol must be positive")


@dataclass
class SolveReport:
    method: str
    residual: float
    iterations: int = 0
    factor_nnz: int = 0
    min_pivot: float = float("nan")
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)


def _residual(A, x, b):
    """``b - A x`` accumulated in long double."""
    ld = np.longdouble
    return np.asarray(b, dtype=ld) - sp.csr_matrix(A).astype(ld) @ np.asarray(x, dtype=ld)


def relative_residual(A, x, b) -> float:
    """``||b - A x|| / ||b||`` (absolute if ``b = 0``), evaluated in long double."""
    r = _residual(A, x, b)
    nb = np.linalg.norm(np.asarray(b, dtype=np.longdouble))
    return float(np.linalg.norm(r) / nb) if nb > 0 else float(np.linalg.norm(r))


class LDLFactor:
    """Symmetric factorisation ``P A P^T = L D L^T`` without pivoting.

    Backed by SuperLU with a symmetric column ordering and zero diagonal
    pivot threshold; the row and column permutations are checked to agree.
    """

    def __init__(self, A):
        A = sp.csc_matrix(A)
        if A.shape[0] == 0:
            self._lu = None
            self.pivots = np.empty(0)
            self.nnz = 0
            return
        try:
            lu = spla.splu(
                A,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:  # exactly singular factor
            raise NotPositiveDefinite(str(exc)) from exc
        if not np.array_equal(lu.perm_r, lu.perm_c):
            raise NotPositiveDefinite("factorisation needed off-diagonal pivoting")
        self.pivots = lu.U.diagonal()
        if not np.all(self.pivots > 0):
            k = int(np.argmin(self.pivots))
            raise NotPositiveDefinite(f"nonpositive pivot {self.pivots[k]:.3e} at step {k}")
        self._lu = lu
        self.nnz = int(lu.L.nnz + lu.U.nnz)

    def solve(self, b):
        if self._lu is None:
            return np.zeros_like(b)
        return self._lu.solve(b)


def is_positive_definite(A) -> bool:
    try:
        LDLFactor(A)
    except NotPositiveDefinite:
        return False
    return True


def solve_spd(A, b, opts: SolveOptions | None = None):
    """Solve ``A x = b`` for a sparse SPD ``A``.

    The reported residual is always measured on the unscaled system.
    """
    opts = opts or SolveOptions()
    t0 = time.perf_counter()
    A = sp.csr_matrix(A)
    b = np.asarray(b, dtype=float)
    n = A.shape[0]
    if opts.prescale and n:
        d = A.diagonal()
        if np.any(d <= 0):
            raise NotPositiveDefinite("nonpositive diagonal entry")
        s = 1.0 / np.sqrt(d)
        S = sp.diags(s)
        As = (S @ A @ S).tocsr()
    else:
        s = np.ones(n)
        As = A
    bs = s * b

    if opts.method == "direct":
        fac = LDLFactor(As)
        y = fac.solve(bs)
        x = s * y
        # Iterative refinement on the original system, stopped on stagnation.
        # With extended precision the iterate and residual live in long double,
        # which removes the float64 rounding floor u * || |A| |x| || / ||b||.
        if opts.extended_precision:
            x = x.astype(np.longdouble)
        res = relative_residual(A, x, b)
        for _ in range(opts.refinement_steps):
            if res <= opts.rel_residual_tol:
                break
            r = _residual(A, x, b)
            dx = s * fac.solve(s * r.astype(float))
            x_new = x + dx.astype(x.dtype)
            res_new = relative_residual(A, x_new, b)
            if res_new >= res:
                break
            stalled = res_new > 0.5 * res
            x, res = x_new, res_new
            if stalled:
                break
        if res > opts.rel_residual_tol:
            log.warning("direct solve reached relative residual %.2e (target %.1e)",
                        res, opts.rel_residual_tol)
        report = SolveReport(
            "direct",
            relative_residual(A, x, b),
            factor_nnz=fac.nnz,
            min_pivot=float(fac.pivots.min()) if n else float("nan"),
        )
    else:
        iters = 0

        def count(_):
            nonlocal iters
            iters += 1

        # Tighten the scaled tolerance until the unscaled residual meets the target.
        tol = opts.rel_residual_tol
        y = np.zeros(n)
        for _ in range(4):
            y, info = spla.cg(As, bs, x0=y, rtol=tol, atol=0.0,
                              maxiter=opts.max_iterations, callback=count)
            x = s * y
            res = relative_residual(A, x, b)
            if info > 0 or iters >= opts.max_iterations:
                raise NotConverged(f"cg did not converge in {opts.max_iterations} iterations", res)
            if res <= opts.rel_residual_tol:
                break
            tol *= 0.1
        report = SolveReport("cg", relative_residual(A, x, b), iterations=iters)
    report.wall_time = time.perf_counter() - t0
    return x, report
