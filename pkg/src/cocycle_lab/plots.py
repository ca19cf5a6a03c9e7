"""Figure rendering for the report path.

Each experiment gets one summary figure saved next to its CSV tables.
Rendering is headless (Agg) and intentionally plain: log-scale panels for
decay-type results, scatter/step panels for scans.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figure"]


def render_figure(experiment: str, result, path) -> Path | None:
    fn = _RENDERERS.get(experiment)
    if fn is None:
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig = fn(result)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def _fig(width=6.0, height=4.0):
    return plt.subplots(figsize=(width, height))


def _lyapunov(result):
    fig, ax = _fig()
    ells = [l for l, _ in result.per_scale]
    means = [m for _, m in result.per_scale]
    ax.plot(ells, means, "o-", label="mean rate at length l")
    ax.axhline(result.L_hat, color="k", ls="--", lw=0.8, label=f"L_hat = {result.L_hat:.4f}")
    ax.set_xscale("log")
    ax.set_xlabel("length l")
    ax.set_ylabel("l^-1 log ||M_l||")
    ax.legend()
    ax.set_title("Lyapunov estimate")
    return fig


def _scale_convergence(result):
    fig, ax = _fig()
    ax.plot(result.scales, result.means, "o-", label="l^-1 <log|f_l|>")
    if len(result.scales) > 1:
        ref0 = abs(result.means[0] - result.means[-1]) or result.reference[0]
        scale = ref0 / result.reference[0] if result.reference[0] else 1.0
        ax.plot(
            result.scales,
            [result.means[-1] + scale * r for r in result.reference],
            ":",
            label="l^-1/2 reference envelope",
        )
    ax.set_xscale("log")
    ax.set_xlabel("scale l")
    ax.set_ylabel("per-site mean log-determinant")
    ax.legend()
    ax.set_title("Scale convergence")
    return fig


def _ldt(result):
    fig, ax = _fig()
    ax.bar([0, 1], [result.fraction, result.fraction_indep], width=0.5)
    ax.set_xticks([0, 1], ["same-sample mean", "independent mean"])
    ax.set_ylabel("deviation fraction")
    ax.set_title(f"Determinant LDT, N={result.N}, tol=N^(1-kappa)={result.tol:.3g}")
    return fig


def _uniform_upper(result):
    fig, ax = _fig()
    ax.bar([0], [result.excess], width=0.4, label="measured excess")
    ax.axhline(result.allowance, color="r", ls="--", label="N^-kappa allowance")
    ax.set_xticks([])
    ax.set_ylabel("sup rate - mean rate")
    ax.legend()
    ax.set_title("Uniform upper bound check")
    return fig


def _resonance(result):
    fig, ax = _fig()
    xs = [r["xi"] for r in result.rows_list]
    ys = [r["deviation"] for r in result.rows_list]
    flag = np.array([r["flagged"] for r in result.rows_list], dtype=bool)
    xs = np.array(xs)
    ys = np.array(ys)
    ax.plot(xs[~flag], ys[~flag], ".", ms=3, label="quiet")
    if flag.any():
        ax.plot(xs[flag], ys[flag], "rx", ms=5, label="flagged")
    ax.axhline(result.threshold, color="r", ls="--", lw=0.8, label="N^-kappa")
    ax.set_xlabel("xi")
    ax.set_ylabel("orbit/space log-average deviation")
    ax.set_yscale("log")
    ax.legend()
    ax.set_title(f"Resonance scan ({result.target})")
    return fig


def _green_decay(result):
    fig, ax = _fig()
    es = [r["E"] for r in result.rows_list if r["status"] != "skipped"]
    vs = [r["max_violation"] for r in result.rows_list if r["status"] != "skipped"]
    ax.plot(es, vs, ".", ms=3)
    ax.axhline(0.0, color="r", ls="--", lw=0.8)
    ax.set_xlabel("E")
    ax.set_ylabel("max log|G| + L0 |m-n|/2")
    ax.set_title(f"Green decay scan (violating fraction {result.violating_fraction:.3f})")
    return fig


def _localization(result):
    fig, axes = plt.subplots(1, 2, figsize=(9.5, 4.0))
    included = [r for r in result.rows_list if not r["edge_excluded"]]
    axes[0].plot(
        [r["E"] for r in included], [r["fitted_rate"] for r in included], ".", ms=3
    )
    axes[0].set_xlabel("E_j")
    axes[0].set_ylabel("fitted tail rate")
    axes[0].set_title("Tail rates")
    axes[1].hist([r["half_width_99"] for r in included], bins=30)
    axes[1].set_xlabel("99% mass half-width")
    axes[1].set_title(f"localized fraction {result.localized_fraction:.3f}")
    return fig


def _large_disorder(result):
    fig, ax = _fig()
    es = [r["E"] for r in result.rows_list]
    ms = [r["mean_log_det_rate"] for r in result.rows_list]
    ax.plot(es, ms, ".", ms=3, label="mean N^-1 log|f_N|")
    ax.axhline(result.threshold, color="r", ls="--", label="(1/2) log lambda")
    ax.set_xlabel("E")
    ax.set_ylabel("per-site log-determinant")
    ax.legend()
    ax.set_title(f"Large disorder (failing fraction {result.failing_fraction:.3f})")
    return fig


def _deviation(result):
    fig, ax = _fig()
    ax.bar([0], [result["fraction"]], width=0.4)
    ax.errorbar([0], [result["fraction"]], yerr=[result["ci95"]], color="k", capsize=4)
    ax.set_xticks([])
    ax.set_ylabel("deviating phase fraction")
    ax.set_title("Log-average deviation measure")
    return fig


_RENDERERS = {
    "lyapunov": _lyapunov,
    "scale_convergence": _scale_convergence,
    "determinant_ldt": _ldt,
    "uniform_upper": _uniform_upper,
    "resonance": _resonance,
    "green_decay": _green_decay,
    "localization": _localization,
    "large_disorder": _large_disorder,
    "deviation_measure": _deviation,
}
