"""Potential metadata invariants, grid IO, and mollification bounds."""

import numpy as np
import pytest
from scipy.integrate import quad

from cocycle_lab.potentials import (
    Mollifier,
    builtin_potential,
    grid_potential,
    load_grid_csv,
    mollify,
    save_grid_csv,
)

ALL_BUILTINS = ["constant", "cos2d", "cosx1", "cosprod", "weierstrass", "coord_x1"]


@pytest.mark.parametrize("name", ALL_BUILTINS)
def test_probe_grid_within_sup_norm(name):
    pot = builtin_potential(name)
    probe = pot.on_probe_grid(512)
    assert np.max(np.abs(probe)) <= pot.sup_norm + 1e-9


@pytest.mark.parametrize("name", ALL_BUILTINS)
def test_dyadic_holder_quotients(name):
    pot = builtin_potential(name)
    x = (np.arange(256) + 0.5) / 256
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    base = np.asarray(pot(X1, X2))
    for k in range(3, 10):
        h = 2.0**-k
        for dx in ((h, 0.0), (0.0, h)):
            diff = np.max(np.abs(np.asarray(pot(X1 + dx[0], X2 + dx[1])) - base))
            assert diff / h**pot.alpha <= pot.holder_constant * 1.05 + 1e-12


def test_weierstrass_sup_norm_analytic():
    pot = builtin_potential("weierstrass", alpha=0.5)
    expect = sum(2.0 ** (-0.5 * j) for j in range(13)) + 1.0
    assert pot.sup_norm == pytest.approx(expect)


def test_alpha_validation():
    with pytest.raises(ValueError):
        builtin_potential("weierstrass", alpha=1.5)
    with pytest.raises(ValueError):
        builtin_potential("cos2d", bogus=1)
    with pytest.raises(ValueError):
        builtin_potential("no_such_potential")


def test_grid_roundtrip(tmp_path):
    pot = builtin_potential("coord_x1", m=64)
    path = tmp_path / "grid.csv"
    save_grid_csv(path, pot)
    back = load_grid_csv(path, alpha=1.0)
    assert np.array_equal(back.grid, pot.grid)
    assert back(0.25, 0.9) == pytest.approx(0.25)


def test_grid_loader_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("m,row,values\r\n4,0,1,2,3\r\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_grid_csv(path)
    path.write_text("nonsense\r\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_grid_csv(path)


def test_grid_requires_square():
    with pytest.raises(ValueError):
        grid_potential(np.zeros((4, 5)))


def test_mollifier_invariants():
    for tau in (0.2, 0.05, 0.01):
        h = Mollifier(tau)
        y = np.linspace(-0.5, 0.5, 10001)
        vals = h(y)
        assert np.all(vals >= 0.0)
        assert np.all(vals[np.abs(y) > tau] == 0.0)
        assert abs(h.mass_quadrature() - 1.0) <= 1e-10
        consts = h.derivative_constants()
        # |h^(m)| <= C_m tau^-(m+1) with C_m measured once from the bump poly
        grid = np.linspace(-tau, tau, 20001)
        assert np.max(h(grid)) <= consts[0] / tau + 1e-9
    with pytest.raises(ValueError):
        Mollifier(0.3)


def test_mollify_preserves_constants():
    pot = builtin_potential("constant", c=3.0)
    smooth, report = mollify(pot, 0.05)
    assert report["max_abs_diff"] <= 1e-9
    assert float(smooth(0.3, 0.7)) == pytest.approx(3.0, abs=1e-9)


def test_mollify_cosine_fourier_multiplier():
    # psi = hat h(1) cos(2 pi x1); oracle multiplier by adaptive quadrature
    tau = 0.05
    pot = builtin_potential("cosx1")
    smooth, report = mollify(pot, tau)
    c_tau = 693.0 / (512.0 * tau)
    hat1 = quad(
        lambda y: c_tau * (1 - (y / tau) ** 2) ** 5 * np.cos(2 * np.pi * y), -tau, tau
    )[0]
    assert 0.0 < hat1 < 1.0
    xs = np.linspace(0.0, 1.0, 41)
    vals = np.asarray(smooth(xs, np.full_like(xs, 0.3)))
    assert np.max(np.abs(vals - hat1 * np.cos(2 * np.pi * xs))) <= 1e-3
    assert report["max_abs_diff"] <= pot.grad_bound * tau


@pytest.mark.parametrize("tau", [0.1, 0.03, 0.01])
@pytest.mark.parametrize("name", ["cos2d", "cosprod", "weierstrass", "cosx1"])
def test_mollify_holder_budget(name, tau):
    pot = builtin_potential(name)
    _, report = mollify(pot, tau)
    assert report["max_abs_diff"] <= pot.holder_constant * tau**pot.alpha


def test_mollify_derivative_report():
    pot = builtin_potential("weierstrass", alpha=0.5)
    _, report = mollify(pot, 0.05)
    assert set(report["derivative_sup"]) == {0, 1, 2, 3, 4}
    assert all(v >= 0 for v in report["derivative_sup"].values())
