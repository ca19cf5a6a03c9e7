"""Dynamics tests: closed forms against stepping oracles, exactness, ranges."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cocycle_lab.torus import (
    Shift,
    SkewShift,
    TorusPoint,
    iterate,
    mod1,
    orbit_fold,
    orbit_points,
    skew_closed_form,
)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def naive_step(dyn, x):
    """Independent single-step oracle in plain float arithmetic."""
    if isinstance(dyn, Shift):
        return TorusPoint(x.x1 + dyn.omega[0], x.x2 + dyn.omega[1])
    return TorusPoint(x.x1 + x.x2, x.x2 + dyn.omega)


def naive_iterate(dyn, x, n):
    for _ in range(n):
        x = naive_step(dyn, x)
    return x


def torus_dist(a, b):
    d1 = abs(a.x1 - b.x1)
    d2 = abs(a.x2 - b.x2)
    return max(min(d1, 1 - d1), min(d2, 1 - d2))


@given(st.floats(-1e9, 1e9, allow_nan=False))
def test_mod1_range(t):
    r = mod1(t)
    assert 0.0 <= r < 1.0


def test_shift_periodic_orbit():
    # 4 * 0.25 and 4 * 0.5 are integers
    out = iterate(Shift((0.25, 0.5)), TorusPoint(0.0, 0.0), 4)
    assert out == TorusPoint(0.0, 0.0)


def test_skew_periodic_orbit():
    # closed form (4 x2 + 6 w, 4 w) mod 1 = (0, 0) at w = 1/2
    out = iterate(SkewShift(0.5), TorusPoint(0.0, 0.0), 4)
    assert out == TorusPoint(0.0, 0.0)


def test_skew_identity_at_zero_steps():
    x = TorusPoint(0.37, 0.81)
    assert skew_closed_form(0.3, x, 0) == x
    assert iterate(SkewShift(0.3), x, 0) == x


def test_skew_iterate_matches_stepping_oracle():
    dyn = SkewShift(0.3)
    x = TorusPoint(0.1, 0.2)
    assert torus_dist(iterate(dyn, x, 3), naive_iterate(dyn, x, 3)) < 1e-12


def test_closed_form_matches_ten_fold_stepping():
    dyn = SkewShift(0.3)
    x = TorusPoint(0.1, 0.2)
    got = skew_closed_form(0.3, x, 10)
    ref = naive_iterate(dyn, x, 10)
    assert torus_dist(got, ref) < 1e-12


def test_closed_form_equals_iterate_exactly():
    # both reduce through exact rational arithmetic, so they agree bitwise
    for m in (1, 7, 1000, 123456, 10**7, 2**40 + 17):
        a = skew_closed_form(GOLDEN, TorusPoint(0.1, 0.2), m)
        b = iterate(SkewShift(GOLDEN), TorusPoint(0.1, 0.2), m)
        assert a == b


def test_closed_form_exact_rational_oracle():
    # dyadic inputs: compare against exact Fraction recursion
    w = Fraction(3, 16)
    x1, x2 = Fraction(1, 8), Fraction(5, 32)
    fx1, fx2 = x1, x2
    for _ in range(257):
        fx1, fx2 = (fx1 + fx2) % 1, (fx2 + w) % 1
    got = skew_closed_form(3 / 16, TorusPoint(1 / 8, 5 / 32), 257)
    assert got.x1 == float(fx1) and got.x2 == float(fx2)


def test_stepping_agreement_long():
    dyn = SkewShift(GOLDEN)
    x = TorusPoint(0.123, 0.456)
    assert torus_dist(iterate(dyn, x, 10**4), naive_iterate(dyn, x, 10**4)) < 1e-10


@pytest.mark.parametrize("kind", ["shift", "skew"])
def test_semigroup(kind):
    # shift: exact to a couple of roundings even at 1e6; skew: the float
    # rounding of the intermediate x2 is amplified by the second exponent,
    # so the guarantee degrades linearly (n * 2^-53 ~ 1e-10 at n = 1e6)
    dyn = Shift((GOLDEN, 0.32)) if kind == "shift" else SkewShift(GOLDEN)
    x = TorusPoint(0.15, 0.67)
    for m, n, tol in ((10**6, 10**6, 1e-12 if kind == "shift" else 1e-9), (7000, 3000, 1e-12)):
        two_step = iterate(dyn, iterate(dyn, x, m), n)
        one_step = iterate(dyn, x, m + n)
        assert torus_dist(two_step, one_step) < tol


def test_outputs_in_unit_square():
    rng = np.random.default_rng(0)
    for _ in range(50):
        dyn = SkewShift(rng.random()) if rng.random() < 0.5 else Shift((rng.random(), rng.random()))
        x = TorusPoint(rng.random(), rng.random())
        y = iterate(dyn, x, int(rng.integers(-10**6, 10**6)))
        assert 0.0 <= y.x1 < 1.0 and 0.0 <= y.x2 < 1.0
    pts = orbit_points(SkewShift(GOLDEN), TorusPoint(0.9, 0.99), 5000)
    assert pts.min() >= 0.0 and pts.max() < 1.0


def test_orbit_fold_constant():
    vals = orbit_fold(Shift((0.1, 0.2)), TorusPoint(0, 0), 50, lambda a, b: np.full_like(a, 3.25))
    assert np.all(vals == 3.25)


def test_orbit_fold_period_two():
    vals = orbit_fold(Shift((0.5, 0.0)), TorusPoint(0, 0), 4, lambda a, b: a)
    assert np.allclose(vals, [0.5, 0.0, 0.5, 0.0])


def test_orbit_fold_matches_per_point_recomputation():
    from cocycle_lab.potentials import builtin_potential

    pot = builtin_potential("cos2d")
    dyn = SkewShift(GOLDEN)
    x = TorusPoint(0.21, 0.68)
    vals = orbit_fold(dyn, x, 1000, pot)
    naive = np.array(
        [float(pot(*iterate(dyn, x, k).as_tuple())) for k in range(1, 1001)]
    )
    assert np.max(np.abs(vals - naive)) < 1e-9
