"""Exponential sums, Birkhoff averages, level sets, and log-averages.

Space averages use tensor midpoint quadrature (exact for the trigonometric
builtins); raw logarithmic integrals clamp at log(1e-300) and report how
many nodes were clamped.  Monte-Carlo phase sampling draws one Philox
stream per sample index, so results do not depend on how samples are
distributed over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .diophantine import torus_norm
from .potentials import Potential
from .torus import Dynamics, TorusPoint, orbit_fold

__all__ = [
    "quad_grid",
    "RegularizedAbs",
    "chi_plateau",
    "exp_sum_linear",
    "weyl_sum_quadratic",
    "min_inv_sum",
    "space_average",
    "birkhoff_vs_space",
    "level_set_report",
    "exceptional_xi_scan",
    "log_average",
    "deviation_measure",
    "sample_phases",
    "wilson_halfwidth",
]

LOG_FLOOR = math.log(1e-300)
QUAD_M = 1024  # default midpoint nodes per axis

# fixed irrational per-axis offsets keep the tensor grid off rational-slope
# singular curves (e.g. the zero lines of cos+cos align exactly with the
# plain midpoint grid); trigonometric exactness of the midpoint rule is
# unaffected by a constant phase shift
_QUAD_SHIFT1 = (math.sqrt(2.0) - 1.0) / 2.0
_QUAD_SHIFT2 = (math.sqrt(3.0) - 1.0) / 2.0


def quad_grid(nodes: int = QUAD_M) -> tuple[np.ndarray, np.ndarray]:
    """Shifted-midpoint tensor nodes (X1, X2) for T^2 quadrature."""
    x1 = np.mod((np.arange(nodes) + 0.5 + _QUAD_SHIFT1) / nodes, 1.0)
    x2 = np.mod((np.arange(nodes) + 0.5 + _QUAD_SHIFT2) / nodes, 1.0)
    return np.meshgrid(x1, x2, indexing="ij")


def sample_phases(seed: int, count: int, start: int = 0) -> np.ndarray:
    """(count, 2) phases from per-index Philox streams keyed by (seed, i).

    Sample i is a pure function of (seed, i): chunked or parallel evaluation
    produces identical values in any order.
    """
    out = np.empty((count, 2))
    for i in range(count):
        gen = np.random.Generator(np.random.Philox(key=np.random.SeedSequence((int(seed), start + i)).generate_state(2, np.uint64)))
        out[i] = gen.random(2)
    return out


def wilson_halfwidth(successes: int, trials: int, z: float = 1.959963984540054) -> float:
    """Half-width of the Wilson 95% interval for a binomial fraction."""
    if trials <= 0:
        return 0.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    return float(z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom)


@dataclass(frozen=True)
class RegularizedAbs:
    """Even C^1 regularization of |y| at scale delta.

    rho(y) = |y| for |y| >= delta and delta/2 + y^2/(2 delta) inside, so
    rho >= |.| everywhere and delta/2 <= rho <= delta on (-delta, delta).
    """

    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0,1)")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        a = np.abs(y)
        return np.where(a >= self.delta, a, 0.5 * self.delta + y * y / (2.0 * self.delta))


def chi_plateau(y, delta: float):
    """Plateau cutoff: 1 on [-delta, delta], cubic smoothstep to 0 at +-2 delta."""
    a = np.abs(np.asarray(y, dtype=float))
    s = np.clip((a - delta) / delta, 0.0, 1.0)
    return 1.0 - s * s * (3.0 - 2.0 * s)


def exp_sum_linear(theta: float, n: int) -> tuple[complex, float]:
    """S = sum_{m=1}^{n} e(m theta) by direct summation, with the bound
    2n / (1 + n ||theta||); the bound is asserted before returning."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    m = np.arange(1, n + 1, dtype=float)
    s = complex(np.sum(np.exp(2j * np.pi * np.mod(m * theta, 1.0))))
    bound = 2.0 * n / (1.0 + n * torus_norm(theta))
    if abs(s) > bound * (1.0 + 1e-9) + 1e-9:
        raise AssertionError(f"exponential-sum bound violated: |S|={abs(s)} > {bound}")
    return s, bound


def weyl_sum_quadratic(alpha: float, beta: float, n: int, eps: float = 0.1) -> tuple[complex, float]:
    """S = sum_{k=1}^{n} e(k^2 alpha + k beta) and the reference n^(1/2+eps).

    The reference is attached for reporting only (the comparison constant is
    not pinned).  Phases are reduced in extended precision so k^2 alpha stays
    accurate up to n ~ 1e8.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(1, n + 1, dtype=np.longdouble)
    phase = np.mod(k * k * np.longdouble(alpha) + k * np.longdouble(beta), 1.0).astype(float)
    s = complex(np.sum(np.exp(2j * np.pi * phase)))
    return s, float(n ** (0.5 + eps))


def min_inv_sum(
    alpha: float, n: int, c: Optional[float] = None, eps: Optional[float] = None
):
    """sum_{k=1}^{n} min(n, ||k alpha||^{-1}) with the 1/0 capped at n.

    When the frequency's classification constants (c, eps) are supplied the
    reference value c^-1 n^(1+eps) log n is attached and a (value, reference)
    pair is returned; otherwise just the value.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(1, n + 1, dtype=float)
    norms = torus_norm(k * alpha)
    with np.errstate(divide="ignore"):
        inv = np.where(norms > 0, 1.0 / np.where(norms > 0, norms, 1.0), np.inf)
    value = float(np.sum(np.minimum(float(n), inv)))
    if c is None or eps is None:
        return value
    return value, float(n ** (1.0 + eps) * math.log(max(n, 2)) / c)


def space_average(f, nodes: int = QUAD_M) -> float:
    """Tensor (shifted) midpoint quadrature of f over T^2."""
    X1, X2 = quad_grid(nodes)
    return float(np.mean(np.asarray(f(X1, X2))))


def birkhoff_vs_space(
    psi,
    dyn: Dynamics,
    x: TorusPoint,
    n: int,
    nodes: int = QUAD_M,
) -> tuple[float, float, float]:
    """(orbit average over m = 1..n, space average, absolute gap)."""
    orbit = float(np.mean(orbit_fold(dyn, x, n, psi)))
    space = space_average(psi, nodes)
    return orbit, space, abs(orbit - space)


def level_set_report(
    f: Potential,
    dyn: Dynamics,
    x: TorusPoint,
    n: int,
    xi: float,
    delta: float,
    nodes: int = QUAD_M,
) -> dict:
    """Orbit visits to the level set {|f - xi| < delta} vs its measure.

    Reports the visit count among the first n orbit points, the quadrature
    measures at width delta and 2 delta, and the reference combination
    mes S(xi, 2 delta) + (1 + B_1) sqrt(delta).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0,1)")
    vals = orbit_fold(dyn, x, n, f)
    hits = int(np.count_nonzero(np.abs(vals - xi) < delta))
    X1, X2 = quad_grid(nodes)
    dist = np.abs(np.asarray(f(X1, X2)) - xi)
    mes_d = float(np.mean(dist < delta))
    mes_2d = float(np.mean(dist < 2.0 * delta))
    return {
        "hits": hits,
        "visit_fraction": hits / n,
        "measure_delta": mes_d,
        "measure_2delta": mes_2d,
        "reference_bound": mes_2d + (1.0 + f.grad_bound) * math.sqrt(delta),
    }


def exceptional_xi_scan(
    f: Potential,
    delta: float,
    xi_grid,
    nodes: int = QUAD_M,
) -> dict:
    """Grid xi with mes{|f - xi| < delta} > sqrt(delta).

    The xi grid must stay inside [-B_0, B_0].  Returns the exceptional
    sub-grid and a grid-spacing estimate of the exceptional measure.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    b0 = f.sup_norm
    if xi_grid.size and (xi_grid.min() < -b0 - 1e-12 or xi_grid.max() > b0 + 1e-12):
        raise ValueError("xi grid must lie inside [-B0, B0]")
    X1, X2 = quad_grid(nodes)
    vals = np.asarray(f(X1, X2)).ravel()
    thresh = math.sqrt(delta)
    measures = np.array([np.mean(np.abs(vals - xi) < delta) for xi in xi_grid])
    mask = measures > thresh
    spacing = float(np.median(np.diff(np.sort(xi_grid)))) if xi_grid.size > 1 else 0.0
    return {
        "exceptional_xi": xi_grid[mask],
        "measures": measures,
        "exceptional_fraction": float(np.mean(mask)) if xi_grid.size else 0.0,
        "estimated_measure": float(np.count_nonzero(mask) * spacing),
    }


def log_average(
    f: Potential,
    xi: float,
    mode: str = "raw",
    delta: Optional[float] = None,
    nodes: int = QUAD_M,
) -> dict:
    """Quadrature of log|f - xi| (clamped) or of log rho_delta(f - xi).

    Returns the value plus diagnostics: clamped-node count in raw mode, the
    raw/regularized difference when delta is given, and the square integral
    of log|f - xi| (a report column for the large-value estimates).
    """
    X1, X2 = quad_grid(nodes)
    dev = np.asarray(f(X1, X2)) - xi
    with np.errstate(divide="ignore"):
        raw_logs = np.log(np.abs(dev))
    clamped = int(np.count_nonzero(raw_logs < LOG_FLOOR))
    raw_logs = np.maximum(raw_logs, LOG_FLOOR)
    raw = float(np.mean(raw_logs))
    out = {
        "raw": raw,
        "clamped_nodes": clamped,
        "sq_integral": float(np.mean(raw_logs**2)),
    }
    if mode == "raw":
        out["value"] = raw
        if delta is not None:
            out["regularized"] = float(np.mean(np.log(RegularizedAbs(delta)(dev))))
            out["raw_reg_gap"] = abs(out["regularized"] - raw)
        return out
    if mode == "regularized":
        if delta is None:
            raise ValueError("regularized mode requires delta")
        reg = float(np.mean(np.log(RegularizedAbs(delta)(dev))))
        out["value"] = reg
        out["regularized"] = reg
        out["raw_reg_gap"] = abs(reg - raw)
        return out
    raise ValueError("mode must be 'raw' or 'regularized'")


def deviation_measure(
    f: Potential,
    dyn: Dynamics,
    n: int,
    xi: float,
    tol: float,
    phase_samples: int,
    seed: int,
    nodes: int = QUAD_M,
) -> dict:
    """Monte-Carlo measure of phases whose orbit log-average deviates.

    Estimates mes{ x : |n^-1 sum_k log|f(T^k x) - xi| - <log|f - xi|>| > tol }
    over phase_samples Philox-seeded phases, with a Wilson 95% interval.
    """
    if phase_samples < 100:
        raise ValueError("phase_samples must be >= 100")
    mean = log_average(f, xi, "raw", nodes=nodes)["value"]
    phases = sample_phases(seed, phase_samples)
    deviations = np.empty(phase_samples)
    for i, (p1, p2) in enumerate(phases):
        vals = orbit_fold(dyn, TorusPoint(p1, p2), n, f)
        with np.errstate(divide="ignore"):
            logs = np.maximum(np.log(np.abs(vals - xi)), LOG_FLOOR)
        deviations[i] = abs(float(np.mean(logs)) - mean)
    exceed = int(np.count_nonzero(deviations > tol))
    return {
        "fraction": exceed / phase_samples,
        "ci95": wilson_halfwidth(exceed, phase_samples),
        "space_mean": mean,
        "max_deviation": float(deviations.max()),
    }
