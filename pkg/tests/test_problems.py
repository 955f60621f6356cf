import math

import numpy as np
import pytest
import sympy as sp

from morley_shishkin.problems import (
    Example1Solution,
    ProblemSpec,
    example1,
    example2,
    example3,
    get_problem,
    layer_constants,
)

X, Y, E = sp.symbols("x y epsilon", positive=True)


def _sym_gh():
    """Example 1 profiles transcribed independently for the sympy oracle."""
    l = 1 - sp.exp(-1 / E)
    q = 2 - l
    d = 1 / (q - 2 * E * l)
    g = sp.Rational(1, 2) * (sp.sin(sp.pi * X) + sp.pi * E / l * (sp.exp(-X / E) + sp.exp((X - 1) / E) - 1 - sp.exp(-1 / E)))
    h = 2 * Y * (1 - Y**2) + E * (l * d * (1 - 2 * Y) - 3 * q / l + (3 / l - d) * sp.exp(-Y / E) + (3 / l + d) * sp.exp((Y - 1) / E))
    return g, h


G_SYM, H_SYM = _sym_gh()


def _hp(expr, subs, digits=60):
    return float(sp.N(expr.subs(subs), digits))


@pytest.mark.parametrize("eps", [1.0, 1e-1, 1e-2, 1e-8])
@pytest.mark.parametrize("k", range(5))
def test_profile_derivatives_match_sympy(eps, k, rng):
    ex = Example1Solution(eps)
    gk = sp.diff(G_SYM, X, k)
    hk = sp.diff(H_SYM, Y, k)
    # include points inside the layers
    pts = np.concatenate([rng.uniform(0, 1, 6), [0.0, 1.0, 0.5 * eps, 1 - 0.5 * eps, 3 * eps]])
    pts = np.clip(pts, 0, 1)
    for t in pts:
        subs = {E: sp.Float(eps, 60), X: sp.Float(float(t), 60), Y: sp.Float(float(t), 60)}
        floor = 1e-12 * eps ** min(0, 1 - k)
        assert ex.g(t, k) == pytest.approx(_hp(gk, subs), rel=1e-9, abs=floor)
        assert ex.h(t, k) == pytest.approx(_hp(hk, subs), rel=1e-9, abs=floor)


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-4, 1e-8])
def test_rhs_residual_against_sympy(eps, rng):
    ex = Example1Solution(eps)
    u = G_SYM * H_SYM
    lap = sp.diff(u, X, 2) + sp.diff(u, Y, 2)
    bih = sp.diff(u, X, 4) + 2 * sp.diff(u, X, 2, Y, 2) + sp.diff(u, Y, 4)
    f_sym = E**2 * bih - lap
    for x, y in rng.uniform(0, 1, (20, 2)):
        subs = {E: sp.Float(eps, 60), X: sp.Float(float(x), 60), Y: sp.Float(float(y), 60)}
        ref = _hp(f_sym, subs)
        scale = max(abs(ref), 1.0)
        assert abs(ex.rhs(x, y) - ref) <= 1e-8 * scale


@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-8])
def test_boundary_compatibility(eps):
    u = example1(eps).exact
    t = np.linspace(0, 1, 250)
    zero, one = np.zeros_like(t), np.ones_like(t)
    for x, y, normal in [(zero, t, "x"), (one, t, "x"), (t, zero, "y"), (t, one, "y")]:
        assert np.max(np.abs(u.u(x, y))) <= 1e-10
        dn = u.ux(x, y) if normal == "x" else u.uy(x, y)
        assert np.max(np.abs(dn)) <= 1e-10


def test_no_overflow_for_tiny_eps():
    ex = Example1Solution(1e-8)
    t = np.linspace(0, 1, 1001)
    with np.errstate(over="raise", invalid="raise"):
        for k in range(5):
            assert np.all(np.isfinite(ex.g(t, k)))
            assert np.all(np.isfinite(ex.h(t, k)))
        x, y = np.meshgrid(t[::50], t[::50])
        assert np.all(np.isfinite(ex.rhs(x, y)))


def test_layer_constants():
    c = layer_constants(1.0)
    assert c.l == pytest.approx(0.6321205588285577, rel=1e-15)
    assert c.q == pytest.approx(1.3678794411714423, rel=1e-15)
    assert c.d == pytest.approx(1 / (c.q - 2 * c.l), rel=1e-15)
    assert c.d == pytest.approx(9.6489, rel=1e-4)
    c = layer_constants(1e-8)
    assert c.l == 1.0 and c.q == 1.0
    assert c.d == pytest.approx(1.00000002, rel=1e-15)
    for eps in [1.0, 0.3, 1e-2, 1e-5]:
        c = layer_constants(eps)
        assert 0 < c.l <= 1 and math.isfinite(c.d)
        assert abs(c.q - (1 + math.exp(-1 / eps))) <= 1e-15
    with pytest.raises(ValueError):
        layer_constants(0.0)
    with pytest.raises(ValueError):
        layer_constants(1.5)


def test_example2_data():
    p = example2(1e-3)
    assert p.f(0.0, 0.0) == 0.0
    assert p.f(0.5, 0.5) == pytest.approx(25.0)
    assert p.c(0.0, 0.0) == pytest.approx(5.0)
    assert p.exact is None
    assert p.c_min > 0


def test_example3_data():
    p = example3(1e-3)
    assert p.f(0.0, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert p.f(0.25, 0.25) == pytest.approx(2 * np.pi**2)
    assert p.f(0.5, 0.5) == pytest.approx(0.0, abs=1e-13)
    assert p.c == 1.0 and p.exact is None


def test_example1_definition():
    p = example1(1e-2)
    assert p.c == 1.0 and p.exact is not None
    x = np.array([0.3, 0.7])
    y = np.array([0.2, 0.9])
    ex = Example1Solution(1e-2)
    np.testing.assert_allclose(p.exact.laplacian(x, y), ex.g(x, 2) * ex.h(y) + ex.g(x) * ex.h(y, 2))


def test_problem_spec_validation():
    with pytest.raises(ValueError):
        ProblemSpec("bad", 1.0, lambda x, y: x - 0.5, 1.0)
    with pytest.raises(ValueError):
        ProblemSpec("bad", 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        get_problem("example9", 1.0)
    assert get_problem("example3", 0.1).name == "example3"
