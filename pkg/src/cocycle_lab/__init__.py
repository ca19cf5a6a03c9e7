"""Numerical laboratory for quasi-periodic Schrodinger cocycles.

Library layout:

    torus        shift/skew-shift dynamics with exact closed-form iterates
    diophantine  continued fractions, ||k w|| minima, frequency classification
    potentials   builtin and grid potentials with Holder metadata, mollifier
    ergodic      exponential sums, Birkhoff averages, level sets, log-averages
    operator     determinants, monodromies, Sturm spectra, Green functions
    experiments  Lyapunov/LDT/resonance/decay/localization/disorder scans
    config/cli   configuration-driven runner with CSV/JSON/figure reports
    acceptance   the verification suites behind `cocycle-lab verify`
"""

from .diophantine import NAMED_FREQUENCIES
from .potentials import Potential, builtin_potential, load_grid_csv, save_grid_csv
from .torus import Dynamics, Shift, SkewShift, TorusPoint, iterate, orbit_fold

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "NAMED_FREQUENCIES",
    "Potential",
    "builtin_potential",
    "load_grid_csv",
    "save_grid_csv",
    "Dynamics",
    "Shift",
    "SkewShift",
    "TorusPoint",
    "iterate",
    "orbit_fold",
]
