"""Layer-adapted tensor-product meshes of the unit square.

A :class:`Mesh1D` is a strictly increasing breakpoint list on ``[0, 1]``; a
:class:`TensorMesh` is the product of two of them. Element ``(i, j)`` is the
rectangle ``[x_i, x_{i+1}] x [y_j, y_{j+1}]`` and elements are flattened with
the x-index outermost, ``e = i * ny + j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Breakpoints ``0 = points[0] < ... < points[n] = 1``.

    ``eps`` and ``lam`` are carried along for meshes produced by
    :func:`build_shishkin_1d` (and preserved by bisection); they are ``None``
    for hand-made meshes.
    """

    points: np.ndarray
    eps: Optional[float] = None
    lam: Optional[float] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("a mesh needs at least two breakpoints")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if np.any(np.diff(pts) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.points)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.points[:-1] + self.points[1:])

    @property
    def half_widths(self) -> np.ndarray:
        return 0.5 * self.widths

    def __eq__(self, other):
        if not isinstance(other, Mesh1D):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


@dataclass(frozen=True)
class TensorMesh:
    mx: Mesh1D
    my: Mesh1D

    @property
    def nx(self) -> int:
        return self.mx.n

    @property
    def ny(self) -> int:
        return self.my.n

    @property
    def n_elements(self) -> int:
        return self.nx * self.ny

    @property
    def eps(self) -> Optional[float]:
        return self.mx.eps

    def element_arrays(self):
        """Flattened ``(xc, yc, hx, hy)`` arrays over all elements."""
        xc, yc = np.meshgrid(self.mx.centers, self.my.centers, indexing="ij")
        hx, hy = np.meshgrid(self.mx.half_widths, self.my.half_widths, indexing="ij")
        return xc.ravel(), yc.ravel(), hx.ravel(), hy.ravel()

    def to_csv(self) -> str:
        """Breakpoints as CSV with columns ``axis,index,coordinate``."""
        lines = ["axis,index,coordinate"]
        for axis, m in (("x", self.mx), ("y", self.my)):
            lines.extend(f"{axis},{k},{float(p)!r}" for k, p in enumerate(m.points))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ElementGeom:
    xc: float
    yc: float
    hx: float
    hy: float

    def __post_init__(self):
        if not (self.hx > 0 and self.hy > 0):
            raise ValueError("half-widths must be positive")

    @property
    def area(self) -> float:
        return 4.0 * self.hx * self.hy

    def vertices(self) -> np.ndarray:
        """Vertex coordinates ``a1..a4`` as a ``(4, 2)`` array (a1 lower-left,
        a2 upper-left, a3 upper-right, a4 lower-right)."""
        sx = np.array([-1.0, -1.0, 1.0, 1.0])
        sy = np.array([-1.0, 1.0, 1.0, -1.0])
        return np.column_stack([self.xc + sx * self.hx, self.yc + sy * self.hy])

    def to_local(self, x, y):
        return (np.asarray(x) - self.xc) / self.hx, (np.asarray(y) - self.yc) / self.hy

    def to_physical(self, xi, eta):
        return self.xc + self.hx * np.asarray(xi), self.yc + self.hy * np.asarray(eta)


class Orientation(enum.Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class EdgeId:
    """A mesh edge.

    Vertical edge ``(i, j)`` lies on ``x = x_i`` and spans ``[y_j, y_{j+1}]``;
    horizontal edge ``(i, j)`` lies on ``y = y_j`` and spans ``[x_i, x_{i+1}]``.
    """

    orientation: Orientation
    i: int
    j: int


class EdgeClass(enum.Enum):
    INTERIOR_UNIFORM = 1
    INTERIOR_NONUNIFORM = 2
    BOUNDARY = 3


def transition_parameter(eps: float, n: int) -> float:
    """Shishkin transition point ``min(eps * ln n, 1/4)``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 4:
        raise ValueError("n must be at least 4")
    return min(eps * np.log(n), 0.25)


def build_shishkin_1d(eps: float, n: int) -> Mesh1D:
    """Piecewise-uniform Shishkin mesh with ``n/4``, ``n/2`` and ``n/4``
    intervals on ``[0, lam]``, ``[lam, 1 - lam]`` and ``[1 - lam, 1]``.

    The right half is the mirror image of the left half, so
    ``points[k] + points[n - k] == 1`` holds exactly.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 4 or n % 4:
        raise ValueError(f"n must be a positive multiple of 4, got {n}")
    lam = transition_parameter(eps, n)
    q = n // 4
    fine = lam * np.arange(q + 1) / q
    coarse = lam + (1.0 - 2.0 * lam) * np.arange(1, q + 1) / (2 * q)
    left = np.concatenate([fine, coarse[:-1]])
    # Mirror so that symmetry is exact in floating point.
    pts = np.concatenate([left, [0.5], (1.0 - left)[::-1]])
    return Mesh1D(pts, eps=float(eps), lam=float(lam))


def shishkin_mesh(eps: float, n: int) -> TensorMesh:
    m = build_shishkin_1d(eps, n)
    return TensorMesh(m, m)


def uniform_mesh(n: int, ny: Optional[int] = None) -> TensorMesh:
    mx = Mesh1D(np.linspace(0.0, 1.0, n + 1))
    my = mx if ny is None else Mesh1D(np.linspace(0.0, 1.0, ny + 1))
    return TensorMesh(mx, my)


def bisect_1d(mesh: Mesh1D) -> Mesh1D:
    pts = np.empty(2 * mesh.n + 1)
    pts[0::2] = mesh.points
    pts[1::2] = mesh.centers
    return Mesh1D(pts, eps=mesh.eps, lam=mesh.lam)


def bisect(mesh: TensorMesh) -> TensorMesh:
    """Split every element into four equal children."""
    return TensorMesh(bisect_1d(mesh.mx), bisect_1d(mesh.my))


def is_bisection(coarse: TensorMesh, fine: TensorMesh) -> bool:
    for c, f in ((coarse.mx, fine.mx), (coarse.my, fine.my)):
        if f.n != 2 * c.n:
            return False
        if not np.array_equal(f.points[0::2], c.points):
            return False
        if not np.allclose(f.points[1::2], c.centers, rtol=0.0, atol=1e-15):
            return False
    return True


def element_geometry(mesh: TensorMesh, i: int, j: int) -> ElementGeom:
    if not (0 <= i < mesh.nx and 0 <= j < mesh.ny):
        raise IndexError(f"element ({i}, {j}) outside a {mesh.nx}x{mesh.ny} mesh")
    return ElementGeom(
        float(mesh.mx.centers[i]),
        float(mesh.my.centers[j]),
        float(mesh.mx.half_widths[i]),
        float(mesh.my.half_widths[j]),
    )


def _same_area(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * max(a, b)


def classify_edge(mesh: TensorMesh, e: EdgeId) -> EdgeClass:
    wx, wy = mesh.mx.widths, mesh.my.widths
    if e.orientation is Orientation.VERTICAL:
        if not (0 <= e.i <= mesh.nx and 0 <= e.j < mesh.ny):
            raise IndexError(f"vertical edge {e} out of range")
        if e.i in (0, mesh.nx):
            return EdgeClass.BOUNDARY
        left, right = wx[e.i - 1] * wy[e.j], wx[e.i] * wy[e.j]
    else:
        if not (0 <= e.i < mesh.nx and 0 <= e.j <= mesh.ny):
            raise IndexError(f"horizontal edge {e} out of range")
        if e.j in (0, mesh.ny):
            return EdgeClass.BOUNDARY
        left, right = wx[e.i] * wy[e.j - 1], wx[e.i] * wy[e.j]
    if _same_area(left, right):
        return EdgeClass.INTERIOR_UNIFORM
    return EdgeClass.INTERIOR_NONUNIFORM


def iter_edges(mesh: TensorMesh):
    for i in range(mesh.nx + 1):
        for j in range(mesh.ny):
            yield EdgeId(Orientation.VERTICAL, i, j)
    for i in range(mesh.nx):
        for j in range(mesh.ny + 1):
            yield EdgeId(Orientation.HORIZONTAL, i, j)
