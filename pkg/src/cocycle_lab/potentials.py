"""Potentials on T^2 with Holder metadata, plus the mollifier bump.

A potential is either a closed-form builtin or an M x M sample grid with
periodic bilinear interpolation.  Every potential carries the constants
used by the quantitative estimates downstream:

    sup_norm         B_0 = max |f|
    grad_bound       B_1 = max(B_0, sup|d1 f|, sup|d2 f|)   (inf allowed)
    holder_constant  B_alpha, w.r.t. the max-coordinate distance on T^2

For grids (and for the rough builtins) the constants are estimated by
dyadic finite differences over a probe grid with a 5% safety factor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Potential",
    "builtin_potential",
    "BUILTIN_POTENTIALS",
    "load_grid_csv",
    "save_grid_csv",
    "Mollifier",
    "mollify",
]

_PROBE = 512  # probe grid per axis for metadata and invariant checks


@dataclass
class Potential:
    """Real function on T^2 with regularity metadata."""

    name: str
    alpha: float
    sup_norm: float
    holder_constant: float
    grad_bound: float
    func: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    grid: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.func is None) == (self.grid is None):
            raise ValueError("exactly one of func/grid must be given")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")

    @property
    def kind(self) -> str:
        return "closed_form" if self.func is not None else "grid"

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.func is not None:
            return self.func(x1, x2)
        return _bilinear(self.grid, x1, x2)

    def on_probe_grid(self, m: int = _PROBE) -> np.ndarray:
        x = (np.arange(m) + 0.5) / m
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        return np.asarray(self(X1, X2))


def _bilinear(grid: np.ndarray, x1, x2):
    m = grid.shape[0]
    t1 = np.mod(np.asarray(x1, dtype=float), 1.0) * m
    t2 = np.mod(np.asarray(x2, dtype=float), 1.0) * m
    i = np.floor(t1).astype(int) % m
    j = np.floor(t2).astype(int) % m
    u = t1 - np.floor(t1)
    v = t2 - np.floor(t2)
    ip = (i + 1) % m
    jp = (j + 1) % m
    return (
        grid[i, j] * (1 - u) * (1 - v)
        + grid[ip, j] * u * (1 - v)
        + grid[i, jp] * (1 - u) * v
        + grid[ip, jp] * u * v
    )


def _measure_constants(f: Callable, alpha: float, probe: int = 256):
    """(B_0, B_alpha, B_1) by dyadic finite differences, 5% safety factor."""
    x = (np.arange(probe) + 0.5) / probe
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    base = np.asarray(f(X1, X2))
    b0 = float(np.max(np.abs(base)))
    qa = 0.0
    q1 = 0.0
    for k in range(3, 10):
        h = 2.0**-k
        for dx1, dx2 in ((h, 0.0), (0.0, h)):
            diff = np.max(np.abs(np.asarray(f(X1 + dx1, X2 + dx2)) - base))
            qa = max(qa, diff / h**alpha)
            q1 = max(q1, diff / h)
    return b0, 1.05 * qa, 1.05 * max(q1, b0)


def _weierstrass_factory(alpha: float, depth: int = 12):
    weights = 2.0 ** (-alpha * np.arange(depth + 1))
    freqs = 2.0 ** np.arange(depth + 1)

    def f(x1, x2):
        phases = 2.0 * np.pi * np.multiply.outer(freqs, np.asarray(x1, dtype=float))
        return np.tensordot(weights, np.cos(phases), axes=(0, 0)) + np.cos(
            2.0 * np.pi * np.asarray(x2, dtype=float)
        )

    return f, float(weights.sum() + 1.0)


def _coord_grid(m: int = 1024) -> np.ndarray:
    vals = np.arange(m, dtype=float) / m
    return np.tile(vals[:, None], (1, m))


def builtin_potential(name: str, **params) -> Potential:
    """Construct a named builtin; see BUILTIN_POTENTIALS for the catalogue."""
    if name == "constant":
        c = float(params.pop("c", 1.0))
        _reject_extra(params)
        return Potential(
            name=f"constant({c:g})",
            alpha=1.0,
            sup_norm=abs(c),
            holder_constant=0.0,
            grad_bound=abs(c),
            func=lambda x1, x2, _c=c: np.full(np.broadcast(x1, x2).shape, _c),
        )
    if name == "cos2d":
        _reject_extra(params)
        f = lambda x1, x2: np.cos(2 * np.pi * x1) + np.cos(2 * np.pi * x2)
        _, ba, _ = _measure_constants(f, 1.0)
        return Potential("cos2d", 1.0, 2.0, ba, 2 * np.pi, func=f)
    if name == "cosx1":
        _reject_extra(params)
        f = lambda x1, x2: np.cos(2 * np.pi * x1) + 0.0 * np.asarray(x2)
        _, ba, _ = _measure_constants(f, 1.0)
        return Potential("cosx1", 1.0, 1.0, ba, 2 * np.pi, func=f)
    if name == "cosprod":
        _reject_extra(params)
        f = lambda x1, x2: np.cos(2 * np.pi * x1) * np.cos(2 * np.pi * x2)
        _, ba, _ = _measure_constants(f, 1.0)
        return Potential("cosprod", 1.0, 1.0, ba, 2 * np.pi, func=f)
    if name == "weierstrass":
        alpha = float(params.pop("alpha", 0.5))
        depth = int(params.pop("depth", 12))
        _reject_extra(params)
        if not 0.0 < alpha <= 1.0:
            raise ValueError("weierstrass alpha must lie in (0,1]")
        f, b0 = _weierstrass_factory(alpha, depth)
        _, ba, b1 = _measure_constants(f, alpha)
        return Potential(f"weierstrass({alpha:g})", alpha, b0, ba, b1, func=f)
    if name == "coord_x1":
        m = int(params.pop("m", 1024))
        _reject_extra(params)
        return grid_potential(_coord_grid(m), alpha=1.0, name="coord_x1")
    raise ValueError(f"unknown builtin potential: {name!r}")


def _reject_extra(params: dict):
    if params:
        raise ValueError(f"unexpected potential parameters: {sorted(params)}")


#: catalogue for the CLI `list` command: name -> (parameter names, alpha note)
BUILTIN_POTENTIALS = {
    "constant": ("c", "alpha=1"),
    "cos2d": ("", "alpha=1"),
    "cosx1": ("", "alpha=1"),
    "cosprod": ("", "alpha=1"),
    "weierstrass": ("alpha, depth", "alpha parameterized (sub-C^1)"),
    "coord_x1": ("m", "alpha=1 (grid, seam at x1=0)"),
}


def grid_potential(values: np.ndarray, alpha: float = 1.0, name: str = "grid") -> Potential:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("grid potential requires a square M x M array")
    pot = Potential(name, alpha, 0.0, 0.0, 0.0, grid=values)
    _, ba, b1 = _measure_constants(pot, alpha)
    # the bilinear interpolant attains its sup at a grid node
    pot.sup_norm = float(np.max(np.abs(values)))
    pot.holder_constant, pot.grad_bound = ba, max(b1, pot.sup_norm)
    return pot


# ---------------------------------------------------------------------------
# grid CSV format: header line "m,row,values", then one line per row:
# M, row_index, M comma-separated values (row-major).
# ---------------------------------------------------------------------------

def save_grid_csv(path, pot_or_values) -> None:
    values = pot_or_values.grid if isinstance(pot_or_values, Potential) else pot_or_values
    values = np.asarray(values, dtype=float)
    m = values.shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["m", "row", "values"])
        for r in range(m):
            w.writerow([m, r] + [f"{v:.17g}" for v in values[r]])


def load_grid_csv(path, alpha: float = 1.0, name: Optional[str] = None) -> Potential:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0][:2]] != ["m", "row"]:
        raise ValueError(f"{path}: expected grid CSV header 'm,row,values'")
    body = [r for r in rows[1:] if r]
    if not body:
        raise ValueError(f"{path}: empty grid CSV")
    m = int(body[0][0])
    if len(body) != m:
        raise ValueError(f"{path}: expected {m} rows, found {len(body)}")
    values = np.empty((m, m))
    for r in body:
        if int(r[0]) != m:
            raise ValueError(f"{path}: inconsistent m column")
        idx = int(r[1])
        vals = np.array([float(v) for v in r[2:]])
        if vals.size != m:
            raise ValueError(f"{path}: row {idx} has {vals.size} values, expected {m}")
        values[idx] = vals
    return grid_potential(values, alpha=alpha, name=name or f"grid:{path}")


# ---------------------------------------------------------------------------
# mollifier: periodization of c_tau * (1 - (y/tau)^2)^5 on [-tau, tau].
# The fifth-order zero at +-tau makes the bump C^4; c_tau = 693/(512 tau).
# ---------------------------------------------------------------------------

_BUMP_POLY = np.polynomial.Polynomial([1, 0, -1]) ** 5  # (1 - v^2)^5
_BUMP_MASS = 512.0 / 693.0  # integral of (1-v^2)^5 over [-1, 1]


@dataclass
class Mollifier:
    """Unit-mass C^4 periodic bump of half-width tau in (0, 1/4)."""

    tau: float

    def __post_init__(self):
        if not 0.0 < self.tau < 0.25:
            raise ValueError("tau must lie in (0, 1/4)")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        u = y - np.round(y)  # representative in [-1/2, 1/2)
        v = u / self.tau
        inside = np.abs(v) < 1.0
        out = np.zeros_like(v)
        out[inside] = (1.0 - v[inside] ** 2) ** 5
        return out / (_BUMP_MASS * self.tau)

    def derivative_constants(self) -> dict[int, float]:
        """Measured C_m with max|h^(m)| = C_m tau^-(m+1), m = 0..4."""
        v = np.linspace(-1.0, 1.0, 20001)
        consts = {}
        poly = _BUMP_POLY
        for m in range(5):
            consts[m] = float(np.max(np.abs(poly(v))) / _BUMP_MASS)
            poly = poly.deriv()
        return consts

    def mass_quadrature(self, nodes: int = 1 << 16) -> float:
        y = (np.arange(nodes) + 0.5) / nodes
        return float(np.mean(self(y)))


def mollify(pot: Potential, tau: float) -> tuple[Potential, dict]:
    """Smooth a potential by periodic convolution with the product bump.

    Returns the smoothed potential (a grid with M >= 8/tau samples per axis)
    and a report with the measured sup distance to the input and spectral
    estimates of the derivative sup-norms up to order 4.  The discrete
    kernel is normalized to unit mass, so constants are reproduced exactly.
    """
    if not 0.0 < tau < 0.25:
        raise ValueError("tau must lie in (0, 1/4)")
    m = 64
    while m < 8.0 / tau:
        m *= 2
    x = np.arange(m) / m
    base = np.asarray(pot(*np.meshgrid(x, x, indexing="ij")))
    h = Mollifier(tau)
    k1 = h(x)
    kern = np.outer(k1, k1)
    kern /= kern.sum()
    smooth = np.fft.irfft2(np.fft.rfft2(base) * np.fft.rfft2(kern), s=(m, m))

    out = Potential(
        name=f"mollified({pot.name}, tau={tau:g})",
        alpha=1.0,
        sup_norm=float(np.max(np.abs(smooth))),
        holder_constant=0.0,
        grad_bound=0.0,
        grid=smooth,
    )
    _, ba, b1 = _measure_constants(out, 1.0)
    out.holder_constant, out.grad_bound = ba, b1

    freqs = np.fft.fftfreq(m, d=1.0 / m)
    spec = np.fft.fft2(smooth)
    deriv_sup = {0: out.sup_norm}
    for order in range(1, 5):
        best = 0.0
        for a in range(order + 1):
            b = order - a
            mult = (2j * np.pi * freqs[:, None]) ** a * (2j * np.pi * freqs[None, :]) ** b
            best = max(best, float(np.max(np.abs(np.fft.ifft2(spec * mult).real))))
        deriv_sup[order] = best
    report = {
        "grid_m": m,
        "max_abs_diff": float(np.max(np.abs(smooth - base))),
        "holder_budget": pot.holder_constant * tau**pot.alpha,
        "derivative_sup": deriv_sup,
    }
    return out, report
