"""cocycle-lab command line: run experiments, verify, list builtins.

    cocycle-lab run CONFIG [--seed S] [--workers W] [--out DIR]
    cocycle-lab verify {identities,statistics,all} [--seed S] [--out DIR]
    cocycle-lab list

Runs write summary.json, per-table CSVs, a rendered figure, and the fully
resolved configuration into the output directory.  The default output root
is $COCYCLE_LAB_OUT (falling back to ./runs).  Exit codes: 0 success,
2 configuration error, 3 numerical degeneracy; failures are also written
to error.txt in the output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path

import numpy as np

from . import experiments as X
from .acceptance import SUITES, run_suite
from .config import EXPERIMENTS, ConfigError, ExperimentConfig, load_config
from .diophantine import NAMED_FREQUENCIES, continued_fraction
from .ergodic import deviation_measure
from .operator import SingularWindowError
from .potentials import BUILTIN_POTENTIALS, builtin_potential
from .reports import write_csv, write_json, write_junit

__all__ = ["main"]


def _output_dir(cfg_path: Path, explicit: str, cfg_dir: str) -> Path:
    if explicit:
        return Path(explicit)
    if cfg_dir:
        return Path(cfg_dir)
    root = os.environ.get("COCYCLE_LAB_OUT", "runs")
    return Path(root) / cfg_path.stem


def _dispatch(cfg: ExperimentConfig, workers: int):
    name = cfg.experiment
    pot = cfg.make_potential()
    dyn = cfg.make_dynamics()
    scan = cfg["scan"]
    tol = cfg["tolerances"]
    lam = cfg["potential"]["lambda"]
    if name == "lyapunov":
        return X.lyapunov_estimate(
            pot, dyn, lam, scan["E"], scan["N"], scan["samples"], scan["seed"], workers
        )
    if name == "scale_convergence":
        return X.scale_convergence_scan(
            pot, dyn, lam, scan["E"], scan["scales"], scan["samples"], scan["seed"]
        )
    if name == "determinant_ldt":
        return X.determinant_ldt(
            pot, dyn, lam, scan["E"], scan["N"], tol["kappa"], scan["samples"],
            scan["seed"], workers,
        )
    if name == "uniform_upper":
        return X.uniform_upper_check(
            pot, dyn, lam, scan["E"], scan["N"], scan["sample_sup"], scan["seed"],
            tol["kappa"],
        )
    if name == "resonance":
        return X.resonance_scan(
            pot, dyn, lam, cfg.phase(), scan["N"], scan["N_bar"], scan["xi_grid"],
            tol["kappa"], target=scan["target"],
        )
    if name == "green_decay":
        l0 = tol["L0"]
        return X.green_decay_scan(
            pot, dyn, lam, cfg.phase(), scan["N"], scan["N_bar"][0], scan["E_grid"],
            L0=None if l0 == "auto" else l0, seed=scan["seed"],
        )
    if name == "localization":
        return X.localization_profile(
            pot, dyn, lam, cfg.phase(), scan["N_box"], rho=tol["rho"],
            r2_min=tol["r2_min"], seed=scan["seed"],
        )
    if name == "large_disorder":
        return X.large_disorder_check(
            pot, dyn, lam, scan["N"], scan["E_grid"], scan["samples"], scan["seed"]
        )
    if name == "deviation_measure":
        return deviation_measure(
            pot, dyn, scan["N"], scan["xi"], tol["tol"], scan["samples"], scan["seed"]
        )
    raise ConfigError(f"unknown experiment '{name}'")


def _write_outputs(out: Path, cfg: ExperimentConfig, result) -> None:
    out.mkdir(parents=True, exist_ok=True)
    formats = cfg["output"]["formats"]
    name = cfg.experiment
    (out / "resolved_config.ini").write_text(cfg.echo_ini(), encoding="utf-8")
    if isinstance(result, dict):  # deviation_measure returns a plain report
        rows = [result]
        summary = dict(result)
    else:
        rows = result.rows()
        summary = result.summary()
    if "json" in formats:
        write_json(out / "summary.json", {"experiment": name, **summary})
    if "csv" in formats and rows:
        write_csv(out / f"{name}.csv", rows)
    if "png" in formats:
        from .plots import render_figure

        render_figure(name, result, out / f"{name}.png")


def _cmd_run(args) -> int:
    cfg_path = Path(args.config)
    out = _output_dir(cfg_path, args.out, "")
    try:
        cfg = load_config(cfg_path)
        if args.seed is not None:
            cfg["scan"]["seed"] = int(args.seed)
        out = _output_dir(cfg_path, args.out, cfg["output"]["dir"])
        result = _dispatch(cfg, max(1, args.workers))
        _write_outputs(out, cfg, result)
    except ConfigError as exc:
        _report_error(out, f"configuration error: {exc}")
        return 2
    except (SingularWindowError, FloatingPointError, np.linalg.LinAlgError) as exc:
        _report_error(out, f"numerical degeneracy: {exc}")
        return 3
    except ValueError as exc:
        _report_error(out, f"configuration error: {exc}")
        return 2
    print(f"wrote {out}")
    return 0


def _report_error(out: Path, message: str) -> None:
    print(message, file=sys.stderr)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "error.txt").write_text(message + "\n" + traceback.format_exc(), encoding="utf-8")
    except OSError:
        pass


def _cmd_verify(args) -> int:
    try:
        results = run_suite(args.suite, seed=args.seed or 0)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    out = Path(args.out) if args.out else Path(os.environ.get("COCYCLE_LAB_OUT", "runs")) / "verify"
    out.mkdir(parents=True, exist_ok=True)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} [{r.seconds:7.2f}s] {r.name}: {r.detail}")
    write_junit(out / f"verify_{args.suite}.xml", f"cocycle-lab {args.suite}", results)
    failures = [r for r in results if not r.passed]
    print(f"{len(results) - len(failures)}/{len(results)} checks passed; results in {out}")
    return 1 if failures else 0


def _cmd_list(_args) -> int:
    print("builtin potentials:")
    for name in sorted(BUILTIN_POTENTIALS):
        params, note = BUILTIN_POTENTIALS[name]
        pot = builtin_potential(
            name, **({"alpha": 0.5} if name == "weierstrass" else {})
        )
        extra = f" params({params})" if params else ""
        print(
            f"  {name:<12} {note:<32} B0={pot.sup_norm:.6g} "
            f"B_alpha={pot.holder_constant:.6g} B1={pot.grad_bound:.6g}{extra}"
        )
    print("named frequencies:")
    for name in sorted(NAMED_FREQUENCIES):
        val = NAMED_FREQUENCIES[name]
        if isinstance(val, tuple):
            print(f"  {name:<22} ({val[0]:.12f}, {val[1]:.12f})")
        else:
            cf = continued_fraction(val, max_depth=8)
            conv = ", ".join(f"{p}/{q}" for p, q in cf.convergents[:8])
            print(f"  {name:<22} {val:.12f}  convergents: {conv}")
    print("experiments:", ", ".join(sorted(EXPERIMENTS)))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cocycle-lab",
        description="numerical laboratory for quasi-periodic Schrodinger cocycles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config", help="INI or JSON experiment configuration")
    p_run.add_argument("--seed", type=int, default=None, help="override the scan seed")
    p_run.add_argument("--workers", type=int, default=1, help="worker threads")
    p_run.add_argument("--out", default="", help="output directory")
    p_run.set_defaults(fn=_cmd_run)

    p_ver = sub.add_parser("verify", help="run an acceptance suite")
    p_ver.add_argument("suite", choices=sorted(SUITES))
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", default="", help="directory for the results file")
    p_ver.set_defaults(fn=_cmd_verify)

    p_list = sub.add_parser("list", help="list builtin potentials and frequencies")
    p_list.set_defaults(fn=_cmd_list)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
