"""Experiment-level tests: closed forms, paired comparisons, RNG contract."""

import math

import numpy as np
import pytest

from cocycle_lab.diophantine import GOLDEN, SILVER
from cocycle_lab.experiments import (
    determinant_ldt,
    free_lyapunov_exact,
    green_decay_scan,
    large_disorder_check,
    localization_profile,
    lyapunov_estimate,
    resonance_scan,
    scale_convergence_scan,
    uniform_upper_check,
)
from cocycle_lab.operator import SpectralWindow, eigenvalues_sturm
from cocycle_lab.potentials import builtin_potential
from cocycle_lab.torus import Shift, SkewShift, TorusPoint

GOLDEN_PAIR = (GOLDEN, SILVER)
COS2D = builtin_potential("cos2d")
ZERO = builtin_potential("constant", c=0.0)


@pytest.mark.parametrize("energy", [0.0, 1.0, 2.5, 3.0, 5.0])
def test_free_cocycle_closed_form(energy):
    est = lyapunov_estimate(ZERO, Shift(GOLDEN_PAIR), 1.0, energy, 4000, 12, seed=1)
    # phase-independent cocycle: stderr vanishes, the residual finite-N bias
    # is the spectral-projection transient log(C)/N
    assert abs(est.L_hat - free_lyapunov_exact(energy)) <= 3 * est.stderr + 10.0 / est.N


def test_lyapunov_nonnegative_and_scales():
    est = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 2.0, 0.3, 2000, 24, seed=3)
    assert est.L_hat >= -1e-9
    assert [l for l, _ in est.per_scale] == [250, 500, 1000, 2000]


def test_lyapunov_large_disorder_bound():
    est = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 100.0, 0.0, 1000, 200, seed=5)
    assert est.L_hat > 0.5 * math.log(100.0)


def test_lyapunov_doubling_samples_consistency():
    base = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 2.0, 0.3, 500, 100, seed=9)
    doubled = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 2.0, 0.3, 500, 200, seed=9)
    assert abs(doubled.L_hat - base.L_hat) <= 4 * base.stderr


def test_lyapunov_worker_independence():
    serial = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 2.0, 0.3, 500, 64, seed=9, workers=1)
    threaded = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 2.0, 0.3, 500, 64, seed=9, workers=4)
    assert serial.L_hat == threaded.L_hat and serial.stderr == threaded.stderr


def test_scale_convergence_constant_exact():
    pot = builtin_potential("constant", c=2.0)
    scan = scale_convergence_scan(pot, Shift(GOLDEN_PAIR), 1.0, 0.0, [50, 100, 200, 400], 50, seed=1)
    expect = [math.log(l + 1) / l for l in (50, 100, 200, 400)]
    assert np.allclose(scan.means, expect, rtol=1e-12)
    gaps = [abs(a - b) for a, b in zip(expect, expect[1:])]
    assert np.allclose(scan.gaps, gaps, rtol=1e-9)


def test_scale_convergence_free_hyperbolic():
    # V - E = -3: f_l = (mu1^(l+1) - mu2^(l+1)) / sqrt(5) up to sign, so the
    # per-site rate is exactly L + (L - log sqrt(5)) / l + O(mu^-2l)
    scan = scale_convergence_scan(ZERO, Shift(GOLDEN_PAIR), 1.0, 3.0, [100, 200, 400], 20, seed=2)
    L = free_lyapunov_exact(3.0)
    for l, m in zip(scan.scales, scan.means):
        expect = L + (L - math.log(math.sqrt(5.0))) / l
        assert m == pytest.approx(expect, abs=1e-9)


def test_scale_convergence_gap_shrinks():
    scan = scale_convergence_scan(COS2D, SkewShift(GOLDEN), 100.0, 0.0, [50, 100, 200, 400], 200, seed=3)
    assert scan.gaps[2] < scan.gaps[0]


def test_ldt_constant_potential_zero_fraction():
    pot = builtin_potential("constant", c=1.0)
    rep = determinant_ldt(pot, Shift(GOLDEN_PAIR), 2.0, 0.7, 200, 0.2, 100, seed=1)
    assert rep.fraction == 0.0  # determinant is phase-independent


def test_ldt_degenerate_tolerance_ends():
    rep_inf = determinant_ldt(COS2D, Shift(GOLDEN_PAIR), 2.0, 0.7, 100, 0.2, 100, seed=2, tol=math.inf)
    assert rep_inf.fraction == 0.0
    rep_zero = determinant_ldt(COS2D, Shift(GOLDEN_PAIR), 2.0, 0.7, 100, 0.2, 100, seed=2, tol=0.0)
    assert rep_zero.fraction == 1.0


def test_ldt_paired_shrinkage_small():
    r1 = determinant_ldt(COS2D, Shift(GOLDEN_PAIR), 2.0, 0.7, 400, 0.2, 200, seed=7)
    r2 = determinant_ldt(COS2D, Shift(GOLDEN_PAIR), 2.0, 0.7, 1600, 0.2, 200, seed=7)
    assert r2.fraction <= r1.fraction <= 0.05
    assert math.isfinite(r1.mean_log_det_indep)


def test_uniform_upper_free_transient():
    # constant hyperbolic cocycle: the only excess is the projection-norm
    # transient log||P|| (1/sqrt(N) - 1/N) ~ 9.2e-3 at N = 1000; frozen from
    # the closed form of [[3,-1],[1,0]]
    rep = uniform_upper_check(ZERO, Shift(GOLDEN_PAIR), 1.0, 3.0, 1000, 1000, seed=1)
    assert 0.0 < rep.excess <= 0.01
    assert rep.argmax_length <= 40  # attained near the short end


def test_uniform_upper_elliptic_edge():
    rep = uniform_upper_check(ZERO, Shift(GOLDEN_PAIR), 1.0, 1.99, 1000, 1000, seed=1)
    assert math.isfinite(rep.excess) and rep.excess > 0


def test_uniform_upper_large_disorder():
    rep = uniform_upper_check(COS2D, SkewShift(GOLDEN), 100.0, 0.0, 1000, 1000, seed=2)
    assert rep.excess <= 1000 ** -0.1


def test_resonance_constant_no_flags():
    pot = builtin_potential("constant", c=1.0)
    scan = resonance_scan(pot, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0.1, 0.2), 20,
                          [500, 900], [0.0, 0.5], kappa=0.2)
    assert scan.flagged_fraction == 0.0


def test_resonance_requires_deep_shift():
    with pytest.raises(ValueError):
        resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0, 0), 50,
                       [100], [0.0], kappa=0.2)


def test_resonance_acceptance_style_fraction():
    scan = resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0.13, 0.29), 200,
                          [10**5, 10**6], np.linspace(-1.9, 1.9, 101), kappa=0.2)
    assert scan.flagged_fraction <= 0.1


def test_resonance_critical_value_flags_harder():
    # cos+cos has critical values {-2, 0, 2}; the saddle value 0 produces
    # strictly more flags than a regular value on the same n_bar ladder
    # (frozen paired comparison at kappa = 0.7)
    nbars = [40401 + 7919 * k for k in range(24)]
    saddle = resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0.13, 0.29),
                            200, nbars, [0.0], kappa=0.7)
    regular = resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0.13, 0.29),
                             200, nbars, [0.7], kappa=0.7)
    n_saddle = sum(r["flagged"] for r in saddle.rows_list)
    n_regular = sum(r["flagged"] for r in regular.rows_list)
    assert n_saddle > n_regular


def test_resonance_eigenvalue_target():
    scan = resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0.13, 0.29), 100,
                          [10**5, 10**6], np.linspace(-1.5, 1.5, 21), kappa=0.2,
                          target="eigenvalue")
    assert scan.target == "eigenvalue"
    assert scan.flagged_fraction <= 0.1


def test_green_decay_free_hyperbolic():
    scan = green_decay_scan(ZERO, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0.1, 0.2),
                            60, 10**5, [3.0], L0=0.48)
    row = scan.rows_list[0]
    assert row["status"] == "ok"
    # true rate 0.9624 with L0/2 = 0.24 slack: the margin is large
    assert row["max_violation"] < -5.0


def test_green_decay_skips_spectrum_energy():
    from cocycle_lab.torus import iterate

    n, n_bar = 40, 10**4
    phase = iterate(SkewShift(GOLDEN), TorusPoint(0.1, 0.2), n_bar)
    w = SpectralWindow(1, n, phase, SkewShift(GOLDEN), COS2D, 1.0, 0.0)
    eig = float(eigenvalues_sturm(w, tol=0.0).eigenvalues[13])
    scan = green_decay_scan(COS2D, SkewShift(GOLDEN), 1.0, TorusPoint(0.1, 0.2),
                            n, n_bar, [eig], L0=0.2)
    assert scan.skipped == 1
    assert scan.rows_list[0]["status"] == "skipped"


def test_green_decay_large_disorder_fraction():
    grid = np.linspace(-204, 204, 201)
    scan = green_decay_scan(COS2D, SkewShift(GOLDEN), 100.0, TorusPoint(0.1, 0.2),
                            100, 10**5, grid, seed=5)
    assert scan.violating_fraction <= 0.2
    assert scan.L0_policy == "half_measured"


def test_localization_free_not_localized():
    rep = localization_profile(ZERO, SkewShift(GOLDEN), 0.0, TorusPoint(0.1, 0.2), 60,
                               seed=3, lyap_n=256, lyap_samples=8)
    assert rep.localized_fraction <= 0.05


def test_localization_diagonal_dominant():
    rep = localization_profile(COS2D, SkewShift(GOLDEN), 1e4, TorusPoint(0.1, 0.2), 60,
                               seed=3, lyap_n=256, lyap_samples=8)
    assert rep.localized_fraction >= 0.95


def test_localization_mass_tables_monotone_and_complete():
    rep = localization_profile(COS2D, SkewShift(GOLDEN), 50.0, TorusPoint(0.4, 0.9), 50,
                               seed=1, lyap_n=256, lyap_samples=8)
    for row in rep.rows_list:
        masses = [v for k, v in row.items() if k.startswith("mass_hw")]
        assert all(b >= a - 1e-12 for a, b in zip(masses, masses[1:]))
        assert masses[-1] == pytest.approx(1.0, abs=1e-9)
        assert row["residual"] <= 1e-8 * (2 + 50 * COS2D.sup_norm)


def test_large_disorder_constant_potential():
    pot = builtin_potential("constant", c=1.0)
    rep = large_disorder_check(pot, SkewShift(GOLDEN), 100.0, 20, [0.0], 100, seed=1)
    row = rep.rows_list[0]
    # f_N for constant diagonal 100: the per-site rate is log 99 + o(1)
    assert row["mean_log_det_rate"] == pytest.approx(math.log(99.0), abs=0.05)
    assert row["passes"] == 1


def test_large_disorder_lambda_floor():
    with pytest.raises(ValueError):
        large_disorder_check(COS2D, SkewShift(GOLDEN), 5.0, 20, [0.0], 100, seed=1)


def test_large_disorder_resonant_energy_gap():
    # E = lambda V(T^1 x*) makes the first diagonal entry vanish at x*,
    # blowing up the diagonal-comparison gap near that phase
    lam = 100.0
    from cocycle_lab.ergodic import sample_phases
    from cocycle_lab.torus import iterate

    phases = sample_phases(11, 400)
    x_star = TorusPoint(phases[7, 0], phases[7, 1])
    moved = iterate(SkewShift(GOLDEN), x_star, 1)
    e_res = lam * float(COS2D(moved.x1, moved.x2))
    rep = large_disorder_check(COS2D, SkewShift(GOLDEN), lam, 30, [e_res, 77.7], 400, seed=11)
    resonant, generic = rep.rows_list[0], rep.rows_list[1]
    assert resonant["diag_gap_max"] > 10 * generic["diag_gap_max"]


def test_large_disorder_failing_fraction_reference():
    lam = 100.0
    grid = np.linspace(-lam * 2 - 2, lam * 2 + 2, 101)
    rep = large_disorder_check(COS2D, SkewShift(GOLDEN), lam, 50, grid, 200, seed=4)
    assert rep.failing_fraction <= rep.reference_fraction_cap  # lambda^(-1/8)


def test_resonance_beta_cap():
    with pytest.raises(ValueError, match="cap"):
        resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0, 0), 20,
                       [10**6], [0.0], kappa=0.2, beta=0.4)
    scan = resonance_scan(COS2D, Shift(GOLDEN_PAIR), 1.0, TorusPoint(0, 0), 20,
                          [500], [0.0], kappa=0.2, beta=0.8)
    assert len(scan.rows_list) == 1


def test_lyapunov_dual_route_agreement():
    # norm route (log ||M_N||) and determinant route (log |f_N|) estimate
    # the same exponent; at strong coupling they agree to a few percent
    est = lyapunov_estimate(COS2D, SkewShift(GOLDEN), 100.0, 0.0, 400, 100, seed=13)
    scan = scale_convergence_scan(COS2D, SkewShift(GOLDEN), 100.0, 0.0, [400], 100, seed=13)
    assert abs(est.L_hat - scan.means[0]) <= 0.05
