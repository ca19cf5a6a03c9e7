"""Continued fractions, ||k*omega|| minima, and Diophantine classification.

All continued-fraction arithmetic runs on the exact rational value of the
input float (a float *is* a dyadic rational), so partial quotients are
reproducible and exact; the expansion stops once denominators exceed 2^53
or the rational terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

__all__ = [
    "NAMED_FREQUENCIES",
    "resolve_frequency",
    "torus_norm",
    "ContinuedFraction",
    "continued_fraction",
    "komega_lower_bound",
    "min_komega",
    "FrequencyClass",
    "classify_frequency",
    "bad_grid_scan",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SILVER = math.sqrt(2.0) - 1.0

#: named frequencies usable anywhere a literal is accepted.  golden2 is the
#: square of the golden mean; note golden + golden2 = 1 exactly, so the pair
#: (golden, golden2) is resonant along k = (1, 1) -- useful as a degenerate
#: test case.  golden_pair combines the golden and silver means, which are
#: jointly Diophantine (1, golden, sqrt(2) are rationally independent).
NAMED_FREQUENCIES: dict[str, Union[float, tuple[float, float]]] = {
    "golden": GOLDEN,
    "golden2": GOLDEN * GOLDEN,
    "silver": SILVER,
    "golden_pair": (GOLDEN, SILVER),
    "degenerate_golden_pair": (GOLDEN, GOLDEN * GOLDEN),
    "cbrt2_pair": (2.0 ** (1.0 / 3.0) - 1.0, 2.0 ** (2.0 / 3.0) - 1.0),
}


def resolve_frequency(spec) -> Union[float, tuple[float, float]]:
    """Map a name, number, or pair to a concrete frequency value."""
    if isinstance(spec, str):
        try:
            return NAMED_FREQUENCIES[spec]
        except KeyError:
            raise ValueError(f"unknown frequency name: {spec!r}") from None
    if isinstance(spec, (tuple, list)):
        a, b = spec
        return (float(a), float(b))
    return float(spec)


def torus_norm(t):
    """Distance to the nearest integer, in [0, 1/2].  Accepts arrays."""
    t = np.asarray(t, dtype=float)
    r = np.abs(t - np.round(t))
    return float(r) if r.ndim == 0 else r


@dataclass
class ContinuedFraction:
    """Partial quotients a_s and convergents p_s/q_s of omega in (0,1).

    Recurrences (s >= 1):  q_s = a_s q_{s-1} + q_{s-2},  q_0 = 1, q_{-1} = 0,
    and likewise for p_s with p_0 = 0, p_{-1} = 1.  Lists are indexed from 0,
    i.e. partial_quotients[s-1] = a_s and convergents[s-1] = (p_s, q_s).
    """

    omega: float
    partial_quotients: list[int] = field(default_factory=list)
    convergents: list[tuple[int, int]] = field(default_factory=list)
    terminated_rational: bool = False

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)

    def a(self, s: int) -> int:
        return self.partial_quotients[s - 1]

    def p(self, s: int) -> int:
        return 1 if s == -1 else (0 if s == 0 else self.convergents[s - 1][0])

    def q(self, s: int) -> int:
        return 0 if s == -1 else (1 if s == 0 else self.convergents[s - 1][1])


def continued_fraction(omega: float, max_depth: int = 64) -> ContinuedFraction:
    """Continued-fraction expansion of the exact rational value of omega.

    Stops at max_depth, at exact rational termination, or once q_s > 2^53.
    """
    omega = float(omega)
    if not 0.0 < omega < 1.0:
        raise ValueError(f"omega must lie in (0,1), got {omega}")
    f = Fraction(omega)
    num, den = f.numerator, f.denominator
    cf = ContinuedFraction(omega=omega)
    p_prev, q_prev = 1, 0  # s = -1
    p_cur, q_cur = 0, 1  # s = 0
    # Euclid on den/num: a_s = floor(r_{s-1}/r_s)
    r_prev, r_cur = den, num
    for _ in range(int(max_depth)):
        if r_cur == 0:
            cf.terminated_rational = True
            break
        a, r_next = divmod(r_prev, r_cur)
        p_next = a * p_cur + p_prev
        q_next = a * q_cur + q_prev
        cf.partial_quotients.append(a)
        cf.convergents.append((p_next, q_next))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        r_prev, r_cur = r_cur, r_next
        if q_cur > 2**53:
            break
    else:
        return cf
    if r_cur == 0 and not cf.terminated_rational:
        cf.terminated_rational = True
    return cf


def komega_lower_bound(cf: ContinuedFraction, m: int) -> float:
    """Guaranteed lower bound a_{s+1}/q_{s+1} <= ||m*omega|| for 1 <= m < q_s.

    Uses the smallest stored s >= 1 with m < q_s (the tightest bound the
    convergent table provides).
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    for s in range(1, cf.depth):  # need a_{s+1}, q_{s+1} stored
        if m < cf.q(s):
            return cf.a(s + 1) / cf.q(s + 1)
    raise ValueError(f"m={m} outside the stored convergent range (q_max={cf.q(cf.depth)})")


def _kdot_2d(omega: tuple[float, float], n: int):
    """All ||k.omega|| for the canonical half-lattice enumeration.

    k runs over the box max(|k1|,|k2|) <= n, k != 0, one representative per
    +-k pair.  Enumeration order: k1 = 0 with k2 = 1..n, then k1 = 1..n with
    k2 in the order 0, 1, -1, 2, -2, ...; first occurrence of the minimum
    wins, so ties resolve to the smaller enumeration index.
    """
    n = int(n)
    w1, w2 = omega
    ks = []
    ks.extend((0, k2) for k2 in range(1, n + 1))
    k2_order = [0]
    for v in range(1, n + 1):
        k2_order.extend((v, -v))
    for k1 in range(1, n + 1):
        ks.extend((k1, k2) for k2 in k2_order)
    karr = np.array(ks, dtype=float)
    vals = torus_norm(karr[:, 0] * w1 + karr[:, 1] * w2)
    return ks, vals


def min_komega(omega, n: int) -> tuple[Union[int, tuple[int, int]], float]:
    """Minimizer of ||k.omega|| over 1 <= |k| <= n (1-D) or the 2-D box.

    In 2-D, k ranges over Z^2 \\ {0} with |k1|, |k2| <= n; since the norm is
    even in k only one representative per +-k pair is scanned.  Returns
    (k_star, min_value); ties go to the smaller enumeration index.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    omega = resolve_frequency(omega)
    if isinstance(omega, tuple):
        ks, vals = _kdot_2d(omega, n)
        i = int(np.argmin(vals))
        return ks[i], float(vals[i])
    k = np.arange(1, n + 1, dtype=float)
    vals = torus_norm(k * omega)
    i = int(np.argmin(vals))
    return i + 1, float(vals[i])


@dataclass
class FrequencyClass:
    """Outcome of the three finite Diophantine checks.

    poly:   ||k.omega|| > c |k|^-A for all 1 <= |k| <= K (|k| = |k1|+|k2|
            in 2-D); the condition is only semi-decidable, so the result is
            "verified up to K".
    window: ||k.omega|| >= N^-gamma1 for all 1 <= |k| <= N^gamma2.
    scale:  ||k omega|| >= c N^-(1+eps) for all 0 < |k| <= N (1-D only).

    Each failed check carries a witness (k, ||k.omega||).
    """

    omega: Union[float, tuple[float, float]]
    dioph_full: Optional[bool] = None
    dioph_full_K: Optional[int] = None
    dioph_window: Optional[bool] = None
    in_scale_typical: Optional[bool] = None
    witnesses: dict = field(default_factory=dict)


def _enumerate_kdot(omega, kmax: int):
    """(|k|, ||k.omega||) arrays over the ranges used by classify_frequency."""
    if isinstance(omega, tuple):
        w1, w2 = omega
        k1 = np.arange(0, kmax + 1)
        k2 = np.arange(-kmax, kmax + 1)
        K1, K2 = np.meshgrid(k1, k2, indexing="ij")
        keep = (K1 + np.abs(K2) <= kmax) & ((K1 > 0) | (K2 > 0))
        K1, K2 = K1[keep], K2[keep]
        sizes = K1 + np.abs(K2)
        vals = torus_norm(K1 * w1 + K2 * w2)
        kk = list(zip(K1.tolist(), K2.tolist()))
        return kk, sizes.astype(float), vals
    k = np.arange(1, kmax + 1)
    vals = torus_norm(k.astype(float) * omega)
    return k.tolist(), k.astype(float), vals


def classify_frequency(
    omega,
    c: float = 0.1,
    A: float = 3.0,
    N: int = 100,
    gamma1: float = 0.3,
    gamma2: float = 0.3,
    eps: float = 0.2,
    K: Optional[int] = None,
) -> FrequencyClass:
    """Decide the finite Diophantine conditions by exhaustive enumeration.

    K caps the polynomial check; defaults to 10^5 in 1-D and 2048 in 2-D
    (the 2-D lattice grows quadratically in K).
    """
    omega = resolve_frequency(omega)
    two_d = isinstance(omega, tuple)
    if K is None:
        K = 2048 if two_d else 100_000
    out = FrequencyClass(omega=omega, dioph_full_K=int(K))

    kk, sizes, vals = _enumerate_kdot(omega, int(K))
    bad = vals <= c * sizes**-A
    if bad.any():
        i = int(np.argmax(bad))
        out.dioph_full = False
        out.witnesses["dioph_full"] = (kk[i], float(vals[i]))
    else:
        out.dioph_full = True

    kwin = max(1, int(math.floor(N**gamma2)))
    kk, sizes, vals = _enumerate_kdot(omega, kwin)
    thresh = N**-gamma1
    bad = vals < thresh
    if bad.any():
        i = int(np.argmax(bad))
        out.dioph_window = False
        out.witnesses["dioph_window"] = (kk[i], float(vals[i]))
    else:
        out.dioph_window = True

    if not two_d:
        k = np.arange(1, int(N) + 1)
        vals = torus_norm(k.astype(float) * omega)
        bad = vals < c * N ** -(1.0 + eps)
        if bad.any():
            i = int(np.argmax(bad))
            out.in_scale_typical = False
            out.witnesses["in_scale_typical"] = (int(k[i]), float(vals[i]))
        else:
            out.in_scale_typical = True
    return out


def bad_grid_scan(n_bar: int, n0: int, mu: float, grid_dim: int = 1):
    """Grid indices j with min_{1<=|k|<=n0} ||k . j/n_bar|| < mu.

    Returns (J, reference_bound).  In 2-D, j = (j1, j2) runs over [1,n_bar]^2
    with omega_j = (j1/n_bar, j2/n_bar) and the reference bound is
    mu n0^2 n_bar^2 + n0^3 n_bar; the 1-D analogue is mu n0 n_bar + n0^2.
    The bound is reported, not asserted (its constant is absorbed).
    """
    n_bar, n0 = int(n_bar), int(n0)
    if not (n_bar >= n0 >= 1):
        raise ValueError("need n_bar >= n0 >= 1")
    if not 0.0 < mu < 0.5:
        raise ValueError("mu must lie in (0, 1/2)")
    if grid_dim == 1:
        j = np.arange(1, n_bar + 1, dtype=float)
        k = np.arange(1, n0 + 1, dtype=float)
        vals = torus_norm(np.outer(k, j / n_bar)).min(axis=0)
        members = set((np.nonzero(vals < mu)[0] + 1).tolist())
        return members, mu * n0 * n_bar + n0**2
    if grid_dim == 2:
        j = np.arange(1, n_bar + 1, dtype=float) / n_bar
        J1, J2 = np.meshgrid(j, j, indexing="ij")
        best = np.full(J1.shape, np.inf)
        for k1 in range(0, n0 + 1):
            for k2 in range(-n0, n0 + 1):
                if (k1 == 0 and k2 <= 0) or max(k1, abs(k2)) > n0:
                    continue
                np.minimum(best, torus_norm(k1 * J1 + k2 * J2), out=best)
        idx = np.nonzero(best < mu)
        members = {(int(a) + 1, int(b) + 1) for a, b in zip(*idx)}
        return members, mu * n0**2 * n_bar**2 + n0**3 * n_bar
    raise ValueError("grid_dim must be 1 or 2")
