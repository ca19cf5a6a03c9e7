"""Experiment configuration: flat key-value sections, JSON accepted too.

The native format is INI-style with one section per concern::

    [experiment]
    name = lyapunov
    [potential]
    builtin = cos2d
    lambda = 1.0
    [dynamics]
    kind = shift
    omega = golden_pair
    [scan]
    N = 1000
    samples = 200
    seed = 7
    E = 3.0
    [tolerances]
    kappa = 0.2
    [output]
    formats = csv,json,png

A JSON file with the same section/key structure is accepted as an
alternative input.  Unknown sections or keys are rejected by name; the
fully resolved configuration (defaults materialized) is echoed into the
output directory and can itself be re-run.
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .diophantine import NAMED_FREQUENCIES, resolve_frequency
from .potentials import BUILTIN_POTENTIALS, Potential, builtin_potential, load_grid_csv
from .torus import Dynamics, Shift, SkewShift, TorusPoint

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "EXPERIMENTS"]

#: experiment name -> scan keys it requires
EXPERIMENTS = {
    "lyapunov": ("N", "samples", "E"),
    "scale_convergence": ("scales", "samples", "E"),
    "determinant_ldt": ("N", "samples", "E"),
    "uniform_upper": ("N", "sample_sup", "E"),
    "resonance": ("N", "N_bar", "xi_grid", "x0"),
    "green_decay": ("N", "N_bar", "E_grid", "x0"),
    "localization": ("N_box", "x0"),
    "large_disorder": ("N", "E_grid", "samples"),
    "deviation_measure": ("N", "xi", "samples"),
}


class ConfigError(Exception):
    """Malformed configuration; the message names the offending key."""


_SCHEMA: dict[str, dict[str, tuple]] = {
    "experiment": {"name": ("str", None)},
    "potential": {
        "builtin": ("str", "cos2d"),
        "grid_file": ("str", ""),
        "lambda": ("float", 1.0),
        "alpha": ("float", 0.5),
        "c": ("float", 1.0),
    },
    "dynamics": {
        "kind": ("str", "shift"),
        "omega": ("freq", "golden_pair"),
    },
    "scan": {
        "N": ("int", 0),
        "N_bar": ("int_list", []),
        "N_box": ("int", 0),
        "E": ("float", 0.0),
        "E_grid": ("grid", []),
        "xi": ("float", 0.0),
        "xi_grid": ("grid", []),
        "scales": ("int_list", []),
        "samples": ("int", 200),
        "sample_sup": ("int", 1000),
        "seed": ("int", 0),
        "x0": ("point", (0.0, 0.0)),
        "target": ("str", "potential"),
    },
    "tolerances": {
        "kappa": ("float", 0.2),
        "beta": ("float", 0.3),
        "sigma": ("float", 0.25),
        "delta": ("float", 0.01),
        "tau": ("float", 0.05),
        "tol": ("float", 0.1),
        "L0": ("l0", "auto"),
        "rho": ("float", 0.5),
        "r2_min": ("float", 0.8),
    },
    "output": {
        "dir": ("str", ""),
        "formats": ("str_list", ["csv", "json", "png"]),
    },
}


def _parse_value(kind: str, raw, key: str):
    try:
        if kind == "str":
            return str(raw).strip()
        if kind == "int":
            return int(str(raw).strip())
        if kind == "float":
            return float(str(raw).strip())
        if kind == "int_list":
            if isinstance(raw, (list, tuple)):
                return [int(v) for v in raw]
            return [int(v) for v in str(raw).replace(" ", "").split(",") if v]
        if kind == "str_list":
            if isinstance(raw, (list, tuple)):
                return [str(v) for v in raw]
            return [v for v in str(raw).replace(" ", "").split(",") if v]
        if kind == "grid":
            # either "lo:hi:count" or an explicit comma list
            if isinstance(raw, (list, tuple)):
                return [float(v) for v in raw]
            text = str(raw).strip()
            if not text:
                return []
            if ":" in text:
                lo, hi, count = text.split(":")
                lo, hi, count = float(lo), float(hi), int(count)
                if count < 2:
                    return [lo]
                step = (hi - lo) / (count - 1)
                return [lo + i * step for i in range(count)]
            return [float(v) for v in text.split(",") if v]
        if kind == "point":
            if isinstance(raw, (list, tuple)):
                a, b = raw
                return (float(a), float(b))
            a, b = str(raw).replace(" ", "").split(",")
            return (float(a), float(b))
        if kind == "freq":
            if isinstance(raw, (list, tuple)):
                return tuple(float(v) for v in raw)
            text = str(raw).strip()
            if text in NAMED_FREQUENCIES:
                return text
            if "," in text:
                a, b = text.replace(" ", "").split(",")
                return (float(a), float(b))
            return float(text)
        if kind == "l0":
            text = str(raw).strip()
            return "auto" if text == "auto" else float(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid value for '{key}': {raw!r} ({exc})") from None
    raise ConfigError(f"internal: unknown schema kind {kind}")


@dataclass
class ExperimentConfig:
    values: dict[str, dict[str, Any]]
    source: str = ""

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.values[section]

    @property
    def experiment(self) -> str:
        return self.values["experiment"]["name"]

    def make_potential(self) -> Potential:
        sec = self.values["potential"]
        if sec["grid_file"]:
            return load_grid_csv(sec["grid_file"], alpha=sec["alpha"])
        name = sec["builtin"]
        if name not in BUILTIN_POTENTIALS:
            raise ConfigError(f"invalid value for 'builtin': {name!r}")
        kwargs = {}
        if name == "weierstrass":
            kwargs["alpha"] = sec["alpha"]
        if name == "constant":
            kwargs["c"] = sec["c"]
        return builtin_potential(name, **kwargs)

    def make_dynamics(self) -> Dynamics:
        sec = self.values["dynamics"]
        omega = resolve_frequency(sec["omega"])
        kind = sec["kind"]
        if kind == "shift":
            if not isinstance(omega, tuple):
                raise ConfigError("shift dynamics needs a frequency pair for 'omega'")
            return Shift(omega)
        if kind in ("skew", "skew_shift", "skewshift"):
            if isinstance(omega, tuple):
                raise ConfigError("skew-shift dynamics needs a scalar 'omega'")
            return SkewShift(omega)
        raise ConfigError(f"invalid value for 'kind': {kind!r}")

    def phase(self) -> TorusPoint:
        return TorusPoint(*self.values["scan"]["x0"])

    def require(self, *keys: str):
        missing = [k for k in keys if _is_unset(self.values["scan"].get(k))]
        if missing:
            raise ConfigError(
                f"experiment '{self.experiment}' requires scan keys: {', '.join(missing)}"
            )

    def echo_ini(self) -> str:
        lines = []
        for section, entries in self.values.items():
            lines.append(f"[{section}]")
            for key, val in entries.items():
                lines.append(f"{key} = {_format_value(val)}")
            lines.append("")
        return "\n".join(lines)


def _is_unset(v) -> bool:
    if v is None:
        return True
    if isinstance(v, (list, tuple)) and len(v) == 0:
        return True
    if isinstance(v, int) and v == 0:
        return True
    return False


def _format_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _build(raw_sections: dict[str, dict[str, Any]], source: str) -> ExperimentConfig:
    values: dict[str, dict[str, Any]] = {}
    for section, raw in raw_sections.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section '{section}'")
        schema = _SCHEMA[section]
        out = {}
        for key, rawval in raw.items():
            if key not in schema:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
            out[key] = _parse_value(schema[key][0], rawval, key)
        values[section] = out
    # materialize defaults
    for section, schema in _SCHEMA.items():
        sec = values.setdefault(section, {})
        for key, (kind, default) in schema.items():
            if key not in sec:
                if section == "experiment" and key == "name":
                    raise ConfigError("missing required key 'name' in section [experiment]")
                sec[key] = default if not isinstance(default, list) else list(default)
    name = values["experiment"]["name"]
    if name not in EXPERIMENTS:
        raise ConfigError(
            f"unknown experiment '{name}'; choose from {', '.join(sorted(EXPERIMENTS))}"
        )
    cfg = ExperimentConfig(values=values, source=source)
    cfg.require(*EXPERIMENTS[name])
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
        if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
            raise ConfigError("JSON config must map section names to key/value objects")
        return _build(data, str(path))
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (N vs n)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"invalid config syntax: {exc}") from None
    sections = {s: dict(parser.items(s)) for s in parser.sections()}
    return _build(sections, str(path))
