"""Top-level experiments: Lyapunov scans, deviation statistics, resonances,
Green-function decay, localization profiles, and the large-disorder check.

Every experiment is a pure function of its arguments; randomness comes from
per-sample Philox streams keyed by (seed, sample index), so reported numbers
do not depend on chunking or worker count.  Results are small dataclasses
with ``rows()`` (per-record dicts for CSV) and ``summary()`` (JSON dict).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ergodic import LOG_FLOOR, quad_grid, sample_phases, wilson_halfwidth
from .operator import (
    SpectralWindow,
    det_log_batch,
    det_prefix_logs,
    spectral_decomposition,
    transfer_norm_logs,
)
from .potentials import Potential
from .torus import Dynamics, TorusPoint, iterate, orbit_points
from .util import parallel_map

__all__ = [
    "LyapunovEstimate",
    "lyapunov_estimate",
    "free_lyapunov_exact",
    "ScaleConvergence",
    "scale_convergence_scan",
    "DeviationReport",
    "determinant_ldt",
    "UniformUpperReport",
    "uniform_upper_check",
    "ResonanceScan",
    "resonance_scan",
    "GreenDecayScan",
    "green_decay_scan",
    "LocalizationReport",
    "localization_profile",
    "LargeDisorderReport",
    "large_disorder_check",
]


def _diag_batch(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    energy: float,
    n: int,
    phases: np.ndarray,
) -> np.ndarray:
    """(B, n) array of lambda V(T^k x_i) - E, k = 1..n."""
    out = np.empty((phases.shape[0], n))
    for i, (p1, p2) in enumerate(phases):
        pts = orbit_points(dyn, TorusPoint(p1, p2), n, start=1)
        out[i] = lam * np.asarray(pot(pts[:, 0], pts[:, 1])) - energy
    return out


def free_lyapunov_exact(energy: float) -> float:
    """Lyapunov exponent of the zero-potential cocycle at energy E."""
    e = abs(energy)
    if e <= 2.0:
        return 0.0
    return math.log((e + math.sqrt(e * e - 4.0)) / 2.0)


@dataclass
class LyapunovEstimate:
    L_hat: float
    stderr: float
    N: int
    samples: int
    per_scale: list[tuple[int, float]]
    energy: float = 0.0
    coupling: float = 1.0

    def rows(self):
        return [{"ell": l, "mean_log_norm_rate": v} for l, v in self.per_scale]

    def summary(self):
        return {
            "L_hat": self.L_hat,
            "stderr": self.stderr,
            "N": self.N,
            "samples": self.samples,
            "energy": self.energy,
            "coupling": self.coupling,
        }


def lyapunov_estimate(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    energy: float,
    n: int,
    samples: int,
    seed: int,
    workers: int = 1,
) -> LyapunovEstimate:
    """Monte-Carlo Lyapunov exponent: mean over phases of N^-1 log||M_N||.

    per_scale records the running means at lengths ~N/8, N/4, N/2, N.
    """
    if n < 10 or samples < 10:
        raise ValueError("need n >= 10 and samples >= 10")
    cps = sorted({max(1, n // 8), max(1, n // 4), max(1, n // 2), n})
    phases = sample_phases(seed, samples)

    def work(chunk):
        lo, hi = chunk
        diag = _diag_batch(pot, dyn, lam, energy, n, phases[lo:hi])
        return transfer_norm_logs(diag, cps)

    chunks = _chunks(samples, workers)
    logs = np.vstack(parallel_map(work, chunks, workers))
    rates = logs[:, -1] / n
    per_scale = [(l, float(np.mean(logs[:, i] / l))) for i, l in enumerate(cps)]
    return LyapunovEstimate(
        L_hat=float(np.mean(rates)),
        stderr=float(np.std(rates, ddof=1) / math.sqrt(samples)),
        N=n,
        samples=samples,
        per_scale=per_scale,
        energy=energy,
        coupling=lam,
    )


def _chunks(total: int, workers: int, minimum: int = 16):
    size = max(minimum, math.ceil(total / max(1, workers)))
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


def _lyapunov_rates_at(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    energies: np.ndarray,
    n: int,
    samples: int,
    seed: int,
) -> np.ndarray:
    """L_hat for a whole energy grid, sharing orbit values across energies.

    The (energy, sample) axes are flattened into one transfer-product batch;
    energies are chunked so the working set stays a few tens of megabytes.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    phases = sample_phases(seed, samples)
    vals = _diag_batch(pot, dyn, lam, 0.0, n, phases)  # lambda V along orbits
    out = np.empty(energies.size)
    block = max(1, int(4e7) // max(1, samples * n))
    for lo in range(0, energies.size, block):
        chunk = energies[lo : lo + block]
        diag = (vals[None, :, :] - chunk[:, None, None]).reshape(-1, n)
        logs = transfer_norm_logs(diag, [n]).reshape(chunk.size, samples)
        out[lo : lo + chunk.size] = logs.mean(axis=1) / n
    return out


@dataclass
class ScaleConvergence:
    scales: list[int]
    means: list[float]
    gaps: list[float]
    reference: list[float]
    envelope_fit: dict

    def rows(self):
        rows = []
        for i, l in enumerate(self.scales):
            rows.append(
                {
                    "ell": l,
                    "mean_log_det_rate": self.means[i],
                    "gap_to_next": self.gaps[i] if i < len(self.gaps) else math.nan,
                    "reference_inv_sqrt": self.reference[i],
                }
            )
        return rows

    def summary(self):
        return {"scales": self.scales, "means": self.means, "envelope_fit": self.envelope_fit}


def scale_convergence_scan(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    energy: float,
    scales: Sequence[int],
    samples: int,
    seed: int,
) -> ScaleConvergence:
    """Per-scale Monte-Carlo means of l^-1 <log|f_l|> and successive gaps.

    The same phase sample is reused across scales so gaps are paired; the
    l^-1/2 reference curve and a log-log envelope fit against the largest
    scale are attached for reporting.
    """
    scales = [int(s) for s in scales]
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly increasing")
    phases = sample_phases(seed, samples)
    diag = _diag_batch(pot, dyn, lam, energy, max(scales), phases)
    means = []
    for l in scales:
        _, logs = det_log_batch(diag[:, :l])
        means.append(float(np.mean(logs)) / l)
    gaps = [abs(means[i + 1] - means[i]) for i in range(len(scales) - 1)]
    reference = [s**-0.5 for s in scales]
    fit = {}
    if len(scales) >= 3:
        dev = np.array([abs(m - means[-1]) for m in means[:-1]])
        keep = dev > 0
        if keep.sum() >= 2:
            slope, intercept = np.polyfit(
                np.log(np.array(scales[:-1], dtype=float)[keep]), np.log(dev[keep]), 1
            )
            fit = {"slope": float(slope), "intercept": float(intercept)}
    return ScaleConvergence(scales, means, gaps, reference, fit)


@dataclass
class DeviationReport:
    N: int
    E: float
    tol: float
    fraction: float
    ci95: float
    mean_log_det: float
    fraction_indep: float = math.nan
    mean_log_det_indep: float = math.nan

    def rows(self):
        return [self.summary()]

    def summary(self):
        return {
            "N": self.N,
            "E": self.E,
            "tol": self.tol,
            "fraction": self.fraction,
            "ci95": self.ci95,
            "mean_log_det": self.mean_log_det,
            "fraction_indep": self.fraction_indep,
            "mean_log_det_indep": self.mean_log_det_indep,
        }


def determinant_ldt(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    energy: float,
    n: int,
    kappa: float,
    samples: int,
    seed: int,
    workers: int = 1,
    tol: Optional[float] = None,
) -> DeviationReport:
    """Fraction of phases with |log|f_N| - mean| > N^(1-kappa).

    The mean is taken over the same sample (reported as mean_log_det) and,
    for reference, over an independent sample drawn from the stream indices
    [samples, 2*samples).  tol overrides the N^(1-kappa) threshold.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    phases = sample_phases(seed, samples)
    phases_ind = sample_phases(seed, samples, start=samples)

    def work_on(ph):
        def work(chunk):
            lo, hi = chunk
            _, logs = det_log_batch(_diag_batch(pot, dyn, lam, energy, n, ph[lo:hi]))
            return logs

        return np.concatenate(parallel_map(work, _chunks(samples, workers), workers))

    logs = work_on(phases)
    logs_ind = work_on(phases_ind)
    tol = float(n ** (1.0 - kappa)) if tol is None else float(tol)
    mean = float(np.mean(logs))
    mean_ind = float(np.mean(logs_ind))
    exceed = int(np.count_nonzero(np.abs(logs - mean) > tol))
    exceed_ind = int(np.count_nonzero(np.abs(logs - mean_ind) > tol))
    return DeviationReport(
        N=n,
        E=energy,
        tol=tol,
        fraction=exceed / samples,
        ci95=wilson_halfwidth(exceed, samples),
        mean_log_det=mean,
        fraction_indep=exceed_ind / samples,
        mean_log_det_indep=mean_ind,
    )


@dataclass
class UniformUpperReport:
    N: int
    E: float
    excess: float
    allowance: float
    mean_rate: float
    sup_rate: float
    argmax_length: int

    def rows(self):
        return [self.summary()]

    def summary(self):
        return {
            "N": self.N,
            "E": self.E,
            "excess": self.excess,
            "allowance": self.allowance,
            "mean_rate": self.mean_rate,
            "sup_rate": self.sup_rate,
            "argmax_length": self.argmax_length,
        }


def uniform_upper_check(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    energy: float,
    n: int,
    sample_sup: int,
    seed: int,
    kappa: float = 0.2,
) -> UniformUpperReport:
    """sup over phases and lengths N' in [sqrt(N), N] of the length-N' rate
    minus the mean length-N rate, reported against the N^-kappa allowance."""
    if sample_sup < 1000:
        raise ValueError("sample_sup must be >= 1000")
    phases = sample_phases(seed, sample_sup)
    n_lo = max(1, int(math.isqrt(n)))
    lengths = list(range(n_lo, n + 1))
    diag = _diag_batch(pot, dyn, lam, energy, n, phases)
    logs = transfer_norm_logs(diag, lengths)
    rates = logs / np.array(lengths, dtype=float)
    mean_rate = float(np.mean(logs[:, -1])) / n
    sup_idx = np.unravel_index(int(np.argmax(rates)), rates.shape)
    sup_rate = float(rates[sup_idx])
    return UniformUpperReport(
        N=n,
        E=energy,
        excess=sup_rate - mean_rate,
        allowance=float(n**-kappa),
        mean_rate=mean_rate,
        sup_rate=sup_rate,
        argmax_length=lengths[sup_idx[1]],
    )


@dataclass
class ResonanceScan:
    rows_list: list[dict]
    threshold: float
    flagged_fraction: float
    target: str

    def rows(self):
        return self.rows_list

    def summary(self):
        return {
            "threshold": self.threshold,
            "flagged_fraction": self.flagged_fraction,
            "target": self.target,
            "records": len(self.rows_list),
        }


def _eigenvalue_function_grid(pot, dyn, lam, ell, j, nodes=192):
    """E_j of the length-ell window as a function of the phase, on a grid."""
    X1, X2 = quad_grid(nodes)
    return _eigenvalue_function_at(pot, dyn, lam, ell, j, X1.ravel(), X2.ravel()).reshape(
        nodes, nodes
    )


def _eigenvalue_function_at(pot, dyn, lam, ell, j, x1, x2):
    """Batch-evaluate E_j^{(ell)} at phases (x1, x2) via dense eigensolve."""
    pts = np.stack([np.asarray(x1, dtype=float).ravel(), np.asarray(x2, dtype=float).ravel()], axis=1)
    bsz = pts.shape[0]
    diag = np.empty((bsz, ell))
    for k in range(1, ell + 1):
        moved = np.array(
            [iterate(dyn, TorusPoint(p1, p2), k).as_tuple() for p1, p2 in pts]
        )
        diag[:, k - 1] = lam * np.asarray(pot(moved[:, 0], moved[:, 1]))
    mats = np.zeros((bsz, ell, ell))
    idx = np.arange(ell)
    mats[:, idx, idx] = diag
    if ell > 1:
        mats[:, idx[:-1], idx[:-1] + 1] = -1.0
        mats[:, idx[:-1] + 1, idx[:-1]] = -1.0
    vals = np.linalg.eigvalsh(mats)
    return vals[:, j - 1]


def resonance_scan(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    x0: TorusPoint,
    n: int,
    n_bar_list: Sequence[int],
    xi_grid: Sequence[float],
    kappa: float,
    target: str = "potential",
    ell: Optional[int] = None,
    j: Optional[int] = None,
    quad_nodes: int = 192,
    beta: Optional[float] = None,
) -> ResonanceScan:
    """Shifted-orbit log-averages against space averages, flagged at N^-kappa.

    For each n_bar the orbit starts at T^n_bar x0; each (n_bar, xi) record
    compares N^-1 sum_k log|f(T^k T^n_bar x0) - xi| with <log|f - xi|> and
    is flagged when the deviation exceeds N^-kappa.  f is the coupled
    potential (target='potential') or the eigenvalue function E_j of the
    length-ell window (target='eigenvalue'; ell defaults to ceil(N^0.2)).
    Every n_bar must exceed N^2; passing beta additionally caps the shifts
    at exp(N^beta).
    """
    n = int(n)
    xi_grid = np.asarray(xi_grid, dtype=float)
    cap = math.exp(n**beta) if beta is not None else math.inf
    for nb in n_bar_list:
        if nb <= n * n:
            raise ValueError("each n_bar must exceed N^2")
        if nb > cap:
            raise ValueError(f"n_bar {nb} exceeds the exp(N^beta) cap {cap:.3g}")
    if target == "potential":
        f_orbitval = lambda pts: lam * np.asarray(pot(pts[:, 0], pts[:, 1]))
        X1, X2 = quad_grid(quad_nodes)
        field_vals = lam * np.asarray(pot(X1, X2)).ravel()
    elif target == "eigenvalue":
        ell = ell if ell is not None else max(1, math.ceil(n**0.2))
        j = j if j is not None else (ell + 1) // 2
        f_orbitval = lambda pts: _eigenvalue_function_at(
            pot, dyn, lam, ell, j, pts[:, 0], pts[:, 1]
        )
        field_vals = _eigenvalue_function_grid(pot, dyn, lam, ell, j, quad_nodes).ravel()
    else:
        raise ValueError("target must be 'potential' or 'eigenvalue'")

    threshold = float(n**-kappa)
    rows = []
    flags = 0
    for nb in n_bar_list:
        start = iterate(dyn, x0, int(nb))
        pts = orbit_points(dyn, start, n, start=1)
        orbit_vals = f_orbitval(pts)
        for xi in xi_grid:
            with np.errstate(divide="ignore"):
                orbit_mean = float(
                    np.mean(np.maximum(np.log(np.abs(orbit_vals - xi)), LOG_FLOOR))
                )
                space_mean = float(
                    np.mean(np.maximum(np.log(np.abs(field_vals - xi)), LOG_FLOOR))
                )
            dev = abs(orbit_mean - space_mean)
            flagged = dev > threshold
            flags += int(flagged)
            rows.append(
                {
                    "n_bar": int(nb),
                    "xi": float(xi),
                    "deviation": dev,
                    "threshold": threshold,
                    "flagged": int(flagged),
                }
            )
    return ResonanceScan(
        rows_list=rows,
        threshold=threshold,
        flagged_fraction=flags / len(rows) if rows else 0.0,
        target=target,
    )


@dataclass
class GreenDecayScan:
    rows_list: list[dict]
    violating_fraction: float
    skipped: int
    L0_policy: str

    def rows(self):
        return self.rows_list

    def summary(self):
        return {
            "violating_fraction": self.violating_fraction,
            "skipped": self.skipped,
            "L0_policy": self.L0_policy,
            "records": len(self.rows_list),
        }


def green_decay_scan(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    x0: TorusPoint,
    n: int,
    n_bar: int,
    e_grid: Sequence[float],
    L0: Optional[float] = None,
    seed: int = 0,
    lyap_n: int = 512,
    lyap_samples: int = 16,
) -> GreenDecayScan:
    """Off-diagonal Green decay at the shifted phase T^n_bar x0.

    For each grid energy the check is max over |m - n| > N/2 of
    log|G(m,n)| + L0 |m-n| / 2 <= 0.  L0 defaults to half the measured
    Lyapunov rate at that energy (policy 'half_measured').  Energies within
    1e-9 of the window spectrum are skipped and counted separately.
    """
    e_grid = np.asarray(e_grid, dtype=float)
    phase = iterate(dyn, x0, int(n_bar))
    pts = orbit_points(dyn, phase, n, start=1)
    site = lam * np.asarray(pot(pts[:, 0], pts[:, 1]))
    eigs = _sturm_eigs_from_diag(site)
    if L0 is None:
        policy = "half_measured"
        l_hats = _lyapunov_rates_at(pot, dyn, lam, e_grid, lyap_n, lyap_samples, seed)
        l0_vals = 0.5 * l_hats
    else:
        policy = "fixed"
        l0_vals = np.full(e_grid.size, float(L0))

    m_idx, n_idx = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    far = (n_idx - m_idx) > n / 2.0  # upper triangle, |m-n| > N/2
    seps = (n_idx - m_idx)[far]

    rows = []
    violations = 0
    skipped = 0
    for i, e in enumerate(e_grid):
        dist = float(np.min(np.abs(eigs - e)))
        if dist < 1e-9:
            skipped += 1
            rows.append(
                {"E": float(e), "status": "skipped", "max_violation": math.nan, "L0": float(l0_vals[i])}
            )
            continue
        sp, lp = det_prefix_logs(site - e)
        ssuf, lsuf = det_prefix_logs((site - e)[::-1])
        lsuf = lsuf[::-1]
        # log|G(m,n)| = lp[m-1] + lsuf[n] - lp[N]   (lsuf[k] = log|f_[k+1, N]|)
        logg = lp[m_idx[far] - 1] + lsuf[n_idx[far]] - lp[n]
        worst = float(np.max(logg + 0.5 * l0_vals[i] * seps))
        flagged = worst > 0.0
        violations += int(flagged)
        rows.append(
            {
                "E": float(e),
                "status": "violating" if flagged else "ok",
                "max_violation": worst,
                "L0": float(l0_vals[i]),
            }
        )
    checked = e_grid.size - skipped
    return GreenDecayScan(
        rows_list=rows,
        violating_fraction=violations / checked if checked else 0.0,
        skipped=skipped,
        L0_policy=policy,
    )


def _sturm_eigs_from_diag(diag: np.ndarray) -> np.ndarray:
    from .operator import _sturm_values

    return _sturm_values(diag, None, tol=None)


@dataclass
class LocalizationReport:
    rows_list: list[dict]
    localized_fraction: float
    included: int
    excluded: int
    edge_collar: int
    rho: float
    r2_min: float

    def rows(self):
        return self.rows_list

    def summary(self):
        return {
            "localized_fraction": self.localized_fraction,
            "included": self.included,
            "excluded": self.excluded,
            "edge_collar": self.edge_collar,
            "rho": self.rho,
            "r2_min": self.r2_min,
        }


def localization_profile(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    x0: TorusPoint,
    n_box: int,
    rho: float = 0.5,
    r2_min: float = 0.8,
    seed: int = 0,
    lyap_n: int = 1024,
    lyap_samples: int = 8,
) -> LocalizationReport:
    """Full eigenpair decay census on the window [-n_box, n_box].

    Per eigenpair: center of mass, the minimal half-width holding 99% of the
    mass, and a least-squares exponential fit of the tail of log|psi|.  The
    localized fraction counts included eigenpairs with fitted_rate >=
    rho * L_hat(E_j) / 2 and fit r^2 >= r2_min; eigenpairs centered within
    n_box^(3/4) of an edge are excluded from the statistic.
    """
    if n_box < 50:
        raise ValueError("n_box must be >= 50")
    w = SpectralWindow(-n_box, n_box, x0, dyn, pot, lam, 0.0)
    dec = spectral_decomposition(w, vectors=True, seed=seed)
    sites = np.arange(-n_box, n_box + 1)
    collar = int(round(n_box**0.75))
    l_hats = _lyapunov_rates_at(
        pot, dyn, lam, dec.eigenvalues, lyap_n, lyap_samples, seed + 1
    )

    rows = []
    included = 0
    localized = 0
    for jj in range(dec.size):
        psi = dec.eigenvectors[:, jj]
        mass = psi * psi
        center = float(np.sum(sites * mass))
        c_int = int(round(center))
        sep = np.abs(sites - c_int)
        order = np.argsort(sep, kind="stable")
        cum = np.cumsum(mass[order])
        half_width = int(sep[order][np.searchsorted(cum, 0.99)])
        sorted_sep = sep[order]
        mass_table = {}
        for hw in (0, 1, 2, 4, 8, 16, 32, 64, 128, 256):
            if hw > n_box:
                break
            k = int(np.searchsorted(sorted_sep, hw, side="right"))
            mass_table[hw] = float(cum[k - 1]) if k else 0.0
        mass_table[2 * n_box] = float(cum[-1])  # full window, exactly 1
        amp = np.abs(psi)
        # fit the contiguous decay range around the center: stop at the
        # first ring whose amplitude falls under the solver noise floor,
        # so flat rounding noise and faint distant admixtures stay out
        floor = max(1e-250, float(amp.max()) * 1e-11)
        smax = int(sep.max())
        ring = np.zeros(smax + 1)
        np.maximum.at(ring, sep, amp)
        below = np.nonzero(ring[2:] < floor)[0]
        s_stop = (below[0] + 2) if below.size else (smax + 1)
        tail = (sep >= 2) & (sep < s_stop) & (amp > floor)
        if np.count_nonzero(tail) < 4:
            # ultra-tight states cross the floor within 2-3 sites; take the
            # nearest rings so the two-parameter fit is still determined
            tail = (sep >= 1) & (sep < max(s_stop, 3)) & (amp > floor)
        rate, r2 = math.nan, 0.0
        if np.count_nonzero(tail) >= 4:
            xs = sep[tail].astype(float)
            ys = np.log(amp[tail])
            slope, intercept = np.polyfit(xs, ys, 1)
            pred = slope * xs + intercept
            ss_res = float(np.sum((ys - pred) ** 2))
            ss_tot = float(np.sum((ys - ys.mean()) ** 2))
            r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
            rate = -float(slope)
        edge_excluded = abs(c_int) > n_box - collar
        is_localized = (
            (not math.isnan(rate)) and rate >= rho * l_hats[jj] / 2.0 and r2 >= r2_min
        )
        if not edge_excluded:
            included += 1
            localized += int(is_localized)
        row = {
            "j": jj + 1,
            "E": float(dec.eigenvalues[jj]),
            "residual": float(dec.residuals[jj]),
            "center": c_int,
            "half_width_99": half_width,
            "fitted_rate": rate,
            "fit_r2": r2,
            "L_hat": float(l_hats[jj]),
            "edge_excluded": int(edge_excluded),
            "localized": int(is_localized),
        }
        for hw, fr in mass_table.items():
            row[f"mass_hw{hw}"] = fr
        rows.append(row)
    return LocalizationReport(
        rows_list=rows,
        localized_fraction=localized / included if included else 0.0,
        included=included,
        excluded=dec.size - included,
        edge_collar=collar,
        rho=rho,
        r2_min=r2_min,
    )


@dataclass
class LargeDisorderReport:
    rows_list: list[dict]
    failing_fraction: float
    threshold: float
    reference_fraction_cap: float

    def rows(self):
        return self.rows_list

    def summary(self):
        return {
            "failing_fraction": self.failing_fraction,
            "threshold": self.threshold,
            "reference_fraction_cap": self.reference_fraction_cap,
            "records": len(self.rows_list),
        }


def large_disorder_check(
    pot: Potential,
    dyn: Dynamics,
    lam: float,
    n: int,
    e_grid: Sequence[float],
    samples: int,
    seed: int,
    lambda_floor: float = 20.0,
) -> LargeDisorderReport:
    """Determinant growth against the (1/2) log lambda threshold.

    Per grid energy: the phase-mean of N^-1 log|f_N|, a pass flag
    (mean > 0.5 log lambda), and statistics of the diagonal-comparison gap
    |log|f_N| - log|det D_N|| (D_N the diagonal part), which the theory
    puts at O(N lambda^-1/2) away from resonant phases.
    """
    if abs(lam) < lambda_floor:
        raise ValueError(f"large-disorder check requires |lambda| >= {lambda_floor}")
    e_grid = np.asarray(e_grid, dtype=float)
    phases = sample_phases(seed, samples)
    vals = _diag_batch(pot, dyn, lam, 0.0, n, phases)  # lambda V(T^k x)
    half_log_lam = 0.5 * math.log(abs(lam))
    rows = []
    failing = 0
    for e in e_grid:
        diag = vals - e
        _, logs = det_log_batch(diag)
        with np.errstate(divide="ignore"):
            diag_logs = np.sum(np.maximum(np.log(np.abs(diag)), LOG_FLOOR), axis=1)
        gaps = np.abs(logs - diag_logs)
        mean_rate = float(np.mean(logs)) / n
        ok = mean_rate > half_log_lam
        failing += int(not ok)
        rows.append(
            {
                "E": float(e),
                "mean_log_det_rate": mean_rate,
                "passes": int(ok),
                "diag_gap_mean": float(np.mean(gaps)),
                "diag_gap_max": float(np.max(gaps)),
            }
        )
    return LargeDisorderReport(
        rows_list=rows,
        failing_fraction=failing / e_grid.size if e_grid.size else 0.0,
        threshold=half_log_lam,
        reference_fraction_cap=float(abs(lam) ** -0.125),
    )
