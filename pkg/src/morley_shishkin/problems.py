"""Model problems ``eps^2 lap^2 u - div(c grad u) = f`` with clamped
boundary conditions ``u = du/dn = 0`` on the unit square."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .assembly import Field, evaluate_field

PI = np.pi


@dataclass(frozen=True)
class ExactSolution:
    u: Callable
    ux: Callable
    uy: Callable
    uxx: Callable
    uyy: Callable

    def laplacian(self, x, y):
        return self.uxx(x, y) + self.uyy(x, y)


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    eps: float
    c: Field
    f: Field
    exact: Optional[ExactSolution] = None
    c_min: float = 0.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        t = np.linspace(0.0, 1.0, 101)
        x, y = np.meshgrid(t, t, indexing="ij")
        cmin = float(np.min(evaluate_field(self.c, x, y)))
        if not cmin > 0:
            raise ValueError(f"coefficient c must be positive, sampled minimum {cmin}")
        object.__setattr__(self, "c_min", cmin)


@dataclass(frozen=True)
class LayerConstants:
    l: float
    q: float
    d: float


def layer_constants(eps: float) -> LayerConstants:
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    l = -np.expm1(-1.0 / eps)
    q = 2.0 - l
    return LayerConstants(float(l), float(q), float(1.0 / (q - 2.0 * eps * l)))


class Example1Solution:
    """``u(x, y) = g(x) h(y)``: a sine profile and a cubic, each corrected by
    exponential layers so that ``u`` and ``du/dn`` vanish on the boundary.

    ``g(x, k)`` and ``h(y, k)`` return the ``k``-th derivative, ``k = 0..4``.
    Layer factors are always ``exp(-t / eps)`` with ``t >= 0``.
    """

    def __init__(self, eps: float):
        self.eps = eps
        self.consts = layer_constants(eps)

    def _layers(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-t / self.eps), np.exp(-(1.0 - t) / self.eps)

    def g(self, x, k: int = 0):
        eps, l = self.eps, self.consts.l
        x = np.asarray(x, dtype=float)
        e0, e1 = self._layers(x)
        tail = np.exp(-1.0 / eps)
        s, c = np.sin(PI * x), np.cos(PI * x)
        if k == 0:
            return 0.5 * (s + PI * eps / l * (e0 + e1 - 1.0 - tail))
        trig = (c, -s, -c, s)[(k - 1) % 4] * PI**k
        layer = (e1 + (-1) ** k * e0) * PI / l / eps ** (k - 1)
        return 0.5 * (trig + layer)

    def h(self, y, k: int = 0):
        eps = self.eps
        l, q, d = self.consts.l, self.consts.q, self.consts.d
        y = np.asarray(y, dtype=float)
        f0, f1 = self._layers(y)
        alpha, beta = 3.0 / l - d, 3.0 / l + d
        if k == 0:
            poly = 2.0 * y * (1.0 - y * y)
            return poly + eps * (l * d * (1.0 - 2.0 * y) - 3.0 * q / l + alpha * f0 + beta * f1)
        poly = (2.0 - 6.0 * y * y - 2.0 * eps * l * d, -12.0 * y, -12.0 + 0.0 * y, 0.0 * y)[k - 1]
        return poly + ((-1) ** k * alpha * f0 + beta * f1) / eps ** (k - 1)

    def u(self, x, y):
        return self.g(x) * self.h(y)

    def ux(self, x, y):
        return self.g(x, 1) * self.h(y)

    def uy(self, x, y):
        return self.g(x) * self.h(y, 1)

    def uxx(self, x, y):
        return self.g(x, 2) * self.h(y)

    def uyy(self, x, y):
        return self.g(x) * self.h(y, 2)

    def biharmonic(self, x, y):
        g, h = self.g, self.h
        return g(x, 4) * h(y) + 2.0 * g(x, 2) * h(y, 2) + g(x) * h(y, 4)

    def rhs(self, x, y):
        lap = self.g(x, 2) * self.h(y) + self.g(x) * self.h(y, 2)
        return self.eps**2 * self.biharmonic(x, y) - lap

    def exact(self) -> ExactSolution:
        return ExactSolution(self.u, self.ux, self.uy, self.uxx, self.uyy)


def example1(eps: float) -> ProblemSpec:
    sol = Example1Solution(eps)
    return ProblemSpec("example1", eps, 1.0, sol.rhs, sol.exact())


def _c2(x, y):
    return 3.0 + (1.0 + x) * y**2 + (2.0 - y) * np.exp(x)


def _f2(x, y):
    return 100.0 * (1.0 - x - y + 2.0 * x * y) * (x + y - 2.0 * x * y)


def example2(eps: float) -> ProblemSpec:
    return ProblemSpec("example2", eps, _c2, _f2)


def _f3(x, y):
    return 2.0 * PI**2 * (1.0 - np.cos(2.0 * PI * x) * np.cos(2.0 * PI * y))


def example3(eps: float) -> ProblemSpec:
    return ProblemSpec("example3", eps, 1.0, _f3)


PROBLEMS = {"example1": example1, "example2": example2, "example3": example3}


def get_problem(name: str, eps: float) -> ProblemSpec:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(eps)
