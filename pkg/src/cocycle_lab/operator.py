"""Finite-volume operators: determinants, monodromies, spectra, Green functions.

The operator on [a, b] is the symmetric tridiagonal matrix with diagonal
lambda*V(T^n x) - attached through a SpectralWindow - and off-diagonal -1.
Everything is carried in sign/log-magnitude form with per-step rescaling,
so windows of length ~1e6 at large coupling neither overflow nor underflow.

``fault_injection`` is a test fixture: it lets the mutation-sensitivity
suite flip a sign in the determinant recurrence, drop the rescaling, or
shift a Cramer index, and verify that the identity checks catch each.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_banded

from .potentials import Potential
from .torus import Dynamics, Shift, SkewShift, TorusPoint, orbit_points

__all__ = [
    "SpectralWindow",
    "SignedLog",
    "LogScaledMatrix",
    "SpectralDecomposition",
    "SingularWindowError",
    "fault_injection",
    "dirichlet_determinant",
    "det_log_batch",
    "det_prefix_logs",
    "monodromy",
    "monodromy_batch",
    "transfer_norm_logs",
    "monodromy_identity_check",
    "sturm_counts",
    "sturm_counts_batch",
    "sturm_values_batch",
    "eigenvalues_sturm",
    "eigenvector_inverse_iteration",
    "spectral_decomposition",
    "green_entry",
    "green_row_logs",
    "green_oracle",
    "weyl_comparison_report",
    "eigenvalue_perturbation_check",
    "thouless_check",
]

_FAULT: Optional[str] = None
_FAULTS = ("sign_flip", "no_rescale", "cramer_shift")


@contextlib.contextmanager
def fault_injection(name: str):
    """Enable one named fault for the duration of the context (tests only)."""
    global _FAULT
    if name not in _FAULTS:
        raise ValueError(f"unknown fault {name!r}; choose from {_FAULTS}")
    _FAULT = name
    try:
        yield
    finally:
        _FAULT = None


class SingularWindowError(Exception):
    """E collides with the spectrum of the window (zero determinant/pivot)."""


@dataclass(frozen=True)
class SpectralWindow:
    """Operator data on the integer interval [a, b] at phase x and energy E."""

    a: int
    b: int
    phase: TorusPoint
    dyn: Dynamics
    potential: Potential
    coupling: float = 1.0
    energy: float = 0.0

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError("need a <= b")

    @property
    def size(self) -> int:
        return self.b - self.a + 1

    def site_values(self) -> np.ndarray:
        """lambda * V(T^n x) for n = a..b."""
        pts = orbit_points(self.dyn, self.phase, self.size, start=self.a)
        return self.coupling * np.asarray(self.potential(pts[:, 0], pts[:, 1]))

    def diag_minus_energy(self) -> np.ndarray:
        return self.site_values() - self.energy

    def sup_bound(self) -> float:
        """Gershgorin radius 2 + |lambda| B_0, bounding the spectrum."""
        return 2.0 + abs(self.coupling) * self.potential.sup_norm


@dataclass(frozen=True)
class SignedLog:
    """A real number stored as sign in {-1, 0, +1} and log|value|."""

    sign: int
    log_abs: float

    @property
    def value(self) -> float:
        return 0.0 if self.sign == 0 else self.sign * math.exp(self.log_abs)

    def __mul__(self, other: "SignedLog") -> "SignedLog":
        s = self.sign * other.sign
        return SignedLog(s, self.log_abs + other.log_abs if s else -math.inf)

    def __truediv__(self, other: "SignedLog") -> "SignedLog":
        if other.sign == 0:
            raise ZeroDivisionError("SignedLog division by zero")
        s = self.sign * other.sign
        return SignedLog(s, self.log_abs - other.log_abs if s else -math.inf)


@dataclass(frozen=True)
class LogScaledMatrix:
    """2x2 matrix exp(log_scale) * entries with max |entry| kept at 1."""

    entries: np.ndarray
    log_scale: float

    def represented(self) -> np.ndarray:
        return math.exp(self.log_scale) * self.entries

    def norm2_log(self) -> float:
        """log of the spectral norm of the represented matrix."""
        e = self.entries
        a = float(np.sum(e * e))
        d = float(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])
        smax_sq = 0.5 * (a + math.sqrt(max(a * a - 4.0 * d * d, 0.0)))
        return self.log_scale + 0.5 * math.log(smax_sq)

    def det_log(self) -> tuple[int, float]:
        d = float(
            self.entries[0, 0] * self.entries[1, 1]
            - self.entries[0, 1] * self.entries[1, 0]
        )
        if d == 0.0:
            return 0, -math.inf
        return (1 if d > 0 else -1), 2.0 * self.log_scale + math.log(abs(d))

    def entry(self, i: int, j: int) -> SignedLog:
        v = float(self.entries[i, j])
        if v == 0.0:
            return SignedLog(0, -math.inf)
        return SignedLog(1 if v > 0 else -1, self.log_scale + math.log(abs(v)))


# ---------------------------------------------------------------------------
# determinant recurrence f_k = (d_k) f_{k-1} - f_{k-2}  (d = diag - E),
# f_{-1} = 0, f_0 = 1, rescaled every step.
# ---------------------------------------------------------------------------

def det_log_batch(diag: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Signs and log magnitudes of the determinants for a (B, N) diag batch."""
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    bsz, n = diag.shape
    f_prev = np.zeros(bsz)
    f_cur = np.ones(bsz)
    scale = np.zeros(bsz)
    flip = -1.0 if _FAULT == "sign_flip" else 1.0
    for k in range(n):
        f_next = diag[:, k] * f_cur + flip * (-f_prev)
        f_prev, f_cur = f_cur, f_next
        if _FAULT != "no_rescale":
            m = np.maximum(np.abs(f_prev), np.abs(f_cur))
            m = np.where(m > 0.0, m, 1.0)
            f_prev /= m
            f_cur /= m
            scale += np.log(m)
    with np.errstate(divide="ignore"):
        logs = scale + np.log(np.abs(f_cur))
    return np.sign(f_cur).astype(int), logs


def det_prefix_logs(diag: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Prefix determinants f of lengths 0..N: signs and log magnitudes."""
    diag = np.asarray(diag, dtype=float)
    n = diag.size
    signs = np.empty(n + 1, dtype=int)
    logs = np.empty(n + 1)
    signs[0], logs[0] = 1, 0.0
    f_prev, f_cur, scale = 0.0, 1.0, 0.0
    flip = -1.0 if _FAULT == "sign_flip" else 1.0
    for k in range(n):
        f_next = diag[k] * f_cur + flip * (-f_prev)
        f_prev, f_cur = f_cur, f_next
        if _FAULT != "no_rescale":
            m = max(abs(f_prev), abs(f_cur))
            if m > 0.0:
                f_prev /= m
                f_cur /= m
                scale += math.log(m)
        signs[k + 1] = 0 if f_cur == 0.0 else (1 if f_cur > 0 else -1)
        logs[k + 1] = scale + math.log(abs(f_cur)) if f_cur != 0.0 else -math.inf
    return signs, logs


def dirichlet_determinant(w: SpectralWindow) -> SignedLog:
    """det(H_[a,b] - E) in sign/log form via the three-term recurrence."""
    signs, logs = det_log_batch(w.diag_minus_energy()[None, :])
    return SignedLog(int(signs[0]), float(logs[0]))


# ---------------------------------------------------------------------------
# monodromy: ordered product of [[d_m, -1], [1, 0]] from m = b down to a
# (single-step factors are applied on the left), rescaled every step.
# ---------------------------------------------------------------------------

def monodromy_batch(diag: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Entries (B,2,2) and log scales (B,) of the transfer products."""
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    bsz, n = diag.shape
    m00 = np.ones(bsz)
    m01 = np.zeros(bsz)
    m10 = np.zeros(bsz)
    m11 = np.ones(bsz)
    scale = np.zeros(bsz)
    for k in range(n):
        d = diag[:, k]
        n00 = d * m00 - m10
        n01 = d * m01 - m11
        m10, m11 = m00, m01
        m00, m01 = n00, n01
        if _FAULT != "no_rescale":
            mx = np.maximum.reduce([np.abs(m00), np.abs(m01), np.abs(m10), np.abs(m11)])
            mx = np.where(mx > 0.0, mx, 1.0)
            m00 /= mx
            m01 /= mx
            m10 /= mx
            m11 /= mx
            scale += np.log(mx)
    entries = np.stack(
        [np.stack([m00, m01], axis=-1), np.stack([m10, m11], axis=-1)], axis=-2
    )
    return entries, scale


def monodromy(w: SpectralWindow) -> LogScaledMatrix:
    entries, scale = monodromy_batch(w.diag_minus_energy()[None, :])
    return LogScaledMatrix(entries[0], float(scale[0]))


def transfer_norm_logs(diag: np.ndarray, checkpoints: Sequence[int]) -> np.ndarray:
    """log ||M_l|| (spectral norm) at the requested lengths, batched.

    diag has shape (B, N); checkpoints are lengths in [1, N].  Returns an
    array of shape (B, len(checkpoints)).
    """
    diag = np.atleast_2d(np.asarray(diag, dtype=float))
    bsz, n = diag.shape
    cps = sorted(set(int(c) for c in checkpoints))
    if cps[0] < 1 or cps[-1] > n:
        raise ValueError("checkpoints out of range")
    out = np.empty((bsz, len(cps)))
    pos = {c: i for i, c in enumerate(cps)}
    m00 = np.ones(bsz)
    m01 = np.zeros(bsz)
    m10 = np.zeros(bsz)
    m11 = np.ones(bsz)
    scale = np.zeros(bsz)
    for k in range(n):
        d = diag[:, k]
        n00 = d * m00 - m10
        n01 = d * m01 - m11
        m10, m11 = m00, m01
        m00, m01 = n00, n01
        mx = np.maximum.reduce([np.abs(m00), np.abs(m01), np.abs(m10), np.abs(m11)])
        mx = np.where(mx > 0.0, mx, 1.0)
        m00 /= mx
        m01 /= mx
        m10 /= mx
        m11 /= mx
        scale += np.log(mx)
        if (k + 1) in pos:
            a = m00 * m00 + m01 * m01 + m10 * m10 + m11 * m11
            det = m00 * m11 - m01 * m10
            smax_sq = 0.5 * (a + np.sqrt(np.maximum(a * a - 4.0 * det * det, 0.0)))
            out[:, pos[k + 1]] = scale + 0.5 * np.log(smax_sq)
        if k + 1 == cps[-1]:
            break
    return out


def _rel_log_discrepancy(sl_a: SignedLog, sl_b: SignedLog) -> float:
    """Relative discrepancy between two log magnitudes (inf on sign clash)."""
    if sl_a.sign != sl_b.sign:
        return math.inf
    if sl_a.sign == 0:
        return 0.0
    return abs(sl_a.log_abs - sl_b.log_abs) / max(1.0, abs(sl_b.log_abs))


def monodromy_identity_check(w: SpectralWindow) -> float:
    """Max relative discrepancy between the monodromy entries and the four
    determinants (f_[a,b], -f_[a+1,b], f_[a,b-1], -f_[a+1,b-1]).

    The lower-right determinant index is [a+1, b-1]: it is the unique choice
    compatible with unimodularity and the length-1/length-2 products.
    """
    if w.size < 3:
        raise ValueError("monodromy_identity_check needs b - a >= 2")
    diag = w.diag_minus_energy()
    mono = monodromy(w)

    def det_sl(d: np.ndarray) -> SignedLog:
        if d.size == 0:
            return SignedLog(1, 0.0)
        s, l = det_log_batch(d[None, :])
        return SignedLog(int(s[0]), float(l[0]))

    neg = lambda sl: SignedLog(-sl.sign, sl.log_abs)
    refs = [
        det_sl(diag),  # f_[a,b]
        neg(det_sl(diag[1:])),  # -f_[a+1,b]
        det_sl(diag[:-1]),  # f_[a,b-1]
        neg(det_sl(diag[1:-1])),  # -f_[a+1,b-1]
    ]
    worst = 0.0
    for (i, j), ref in zip(((0, 0), (0, 1), (1, 0), (1, 1)), refs):
        worst = max(worst, _rel_log_discrepancy(mono.entry(i, j), ref))
    return worst


# ---------------------------------------------------------------------------
# Sturm-sequence eigensolver
# ---------------------------------------------------------------------------

def sturm_counts(diag: np.ndarray, energies: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each trial energy.

    Counts sign changes of the rescaled determinant sequence; a zero takes
    the sign opposite to its predecessor.
    """
    diag = np.asarray(diag, dtype=float)
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    p_prev = np.zeros(e.size)
    p_cur = np.ones(e.size)
    s_prev = np.ones(e.size)
    count = np.zeros(e.size, dtype=int)
    for d in diag:
        p_next = (d - e) * p_cur - p_prev
        p_prev, p_cur = p_cur, p_next
        m = np.maximum(np.abs(p_prev), np.abs(p_cur))
        m = np.where(m > 0.0, m, 1.0)
        p_prev /= m
        p_cur /= m
        s_cur = np.where(p_cur > 0, 1.0, np.where(p_cur < 0, -1.0, -s_prev))
        count += (s_cur != s_prev).astype(int)
        s_prev = s_cur
    return count


def sturm_counts_batch(diags: np.ndarray, energies: np.ndarray) -> np.ndarray:
    """Eigenvalue counts for a batch: diags (G, N), energies (G, M) -> (G, M)."""
    diags = np.asarray(diags, dtype=float)
    e = np.asarray(energies, dtype=float)
    gsz, msz = e.shape
    p_prev = np.zeros((gsz, msz))
    p_cur = np.ones((gsz, msz))
    s_prev = np.ones((gsz, msz))
    count = np.zeros((gsz, msz), dtype=int)
    for k in range(diags.shape[1]):
        p_next = (diags[:, k : k + 1] - e) * p_cur - p_prev
        p_prev, p_cur = p_cur, p_next
        m = np.maximum(np.abs(p_prev), np.abs(p_cur))
        m = np.where(m > 0.0, m, 1.0)
        p_prev /= m
        p_cur /= m
        s_cur = np.where(p_cur > 0, 1.0, np.where(p_cur < 0, -1.0, -s_prev))
        count += (s_cur != s_prev).astype(int)
        s_prev = s_cur
    return count


def sturm_values_batch(
    diags: np.ndarray, tol: float = 0.0, max_depth: int = 60
) -> np.ndarray:
    """All eigenvalues of a batch of same-size windows: (G, N) -> (G, N)."""
    diags = np.asarray(diags, dtype=float)
    gsz, n = diags.shape
    lo = np.tile((diags.min(axis=1) - 2.0 - 1e-9)[:, None], (1, n))
    hi = np.tile((diags.max(axis=1) + 2.0 + 1e-9)[:, None], (1, n))
    js = np.tile(np.arange(1, n + 1)[None, :], (gsz, 1))
    for _ in range(max_depth):
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        above = sturm_counts_batch(diags, mid) >= js
        hi = np.where(above & ~stuck, mid, hi)
        lo = np.where(~above & ~stuck, mid, lo)
        if np.all(stuck | (hi - lo <= tol)):
            break
    return np.maximum.accumulate(0.5 * (lo + hi), axis=1)


def eigenvalues_sturm(
    w: SpectralWindow, tol: Optional[float] = None, max_depth: int = 60
) -> "SpectralDecomposition":
    """All eigenvalues by Sturm bisection, each bracketed to width <= tol.

    tol defaults to 1e-12 * (2 + |lambda| B_0); tol = 0 bisects to float
    resolution (capped at max_depth sweeps).
    """
    diag = w.site_values()
    values = _sturm_values(diag, w.sup_bound() if tol is None else None, tol, max_depth)
    return SpectralDecomposition(eigenvalues=values)


def _sturm_values(
    diag: np.ndarray,
    default_scale: Optional[float],
    tol: Optional[float],
    max_depth: int = 60,
) -> np.ndarray:
    if tol is None:
        tol = 1e-12 * (default_scale if default_scale is not None else (2.0 + np.abs(diag).max()))
    if tol < 0:
        raise ValueError("tol must be >= 0")
    n = diag.size
    lo = np.full(n, diag.min() - 2.0 - 1e-9)
    hi = np.full(n, diag.max() + 2.0 + 1e-9)
    js = np.arange(1, n + 1)
    for _ in range(max_depth):
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        c = sturm_counts(diag, mid)
        above = c >= js
        hi = np.where(above & ~stuck, mid, hi)
        lo = np.where(~above & ~stuck, mid, lo)
        if np.all(stuck | (hi - lo <= tol)):
            break
    vals = 0.5 * (lo + hi)
    return np.maximum.accumulate(vals)  # guard monotonicity at float resolution


@dataclass
class SpectralDecomposition:
    """Eigenvalues in increasing order, optional eigenvectors and residuals."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None  # column j = psi_j
    residuals: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.eigenvalues.size


def _banded(diag: np.ndarray) -> np.ndarray:
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = -1.0
    ab[1, :] = diag
    ab[2, :-1] = -1.0
    return ab


def _tridiag_apply(diag: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = diag * v
    out[:-1] -= v[1:]
    out[1:] -= v[:-1]
    return out


def eigenvector_inverse_iteration(
    w: SpectralWindow,
    e_approx: float,
    seed: int = 0,
    ortho_against: Optional[np.ndarray] = None,
    max_iter: int = 50,
    min_sweeps: int = 3,
) -> tuple[np.ndarray, float, bool]:
    """Unit eigenvector near e_approx by shifted inverse iteration.

    Returns (vector, residual, converged) with residual = ||(H - e) psi||.
    The start vector is seeded; the first nonzero entry is made positive.
    ortho_against (columns) is re-projected out every sweep - used inside
    clusters of near-degenerate eigenvalues.  At least min_sweeps solves are
    performed: the residual converges after one sweep, but extra sweeps
    purge admixtures of spectrally close, spatially distant states.
    """
    diag = w.site_values()
    n = diag.size
    gen = np.random.Generator(
        np.random.Philox(key=np.random.SeedSequence((int(seed), hash(float(e_approx)) & 0xFFFFFFFF)).generate_state(2, np.uint64))
    )
    v = gen.standard_normal(n)
    v /= np.linalg.norm(v)
    shift = float(e_approx)
    tol_res = 1e-8 * w.sup_bound()
    residual = math.inf
    ab = _banded(diag - shift)
    sweeps = 0
    for _ in range(max_iter):
        try:
            v_new = solve_banded((1, 1), ab, v)
        except np.linalg.LinAlgError:
            shift += 1e-13 * max(1.0, abs(shift))
            ab = _banded(diag - shift)
            continue
        if not np.all(np.isfinite(v_new)):
            shift += 1e-13 * max(1.0, abs(shift))
            ab = _banded(diag - shift)
            continue
        if ortho_against is not None and ortho_against.size:
            v_new = v_new - ortho_against @ (ortho_against.T @ v_new)
        nrm = np.linalg.norm(v_new)
        if nrm == 0.0 or not np.isfinite(nrm):
            v_new = gen.standard_normal(n)
            nrm = np.linalg.norm(v_new)
        v = v_new / nrm
        sweeps += 1
        residual = float(np.linalg.norm(_tridiag_apply(diag, v) - e_approx * v))
        if residual <= tol_res and sweeps >= min_sweeps:
            break
    nz = np.nonzero(v)[0]
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v, residual, residual <= tol_res


def spectral_decomposition(
    w: SpectralWindow,
    tol: Optional[float] = None,
    vectors: bool = True,
    seed: int = 0,
    cluster_width: float = 1e-9,
) -> SpectralDecomposition:
    """Eigenvalues (Sturm bisection) plus inverse-iteration eigenvectors.

    Vectors inside eigenvalue clusters narrower than cluster_width are
    orthogonalized against the cluster's earlier vectors.
    """
    dec = eigenvalues_sturm(w, tol=tol)
    if not vectors:
        return dec
    n = dec.size
    vecs = np.empty((n, n))
    residuals = np.empty(n)
    cluster_start = 0
    for j in range(n):
        if j > 0 and dec.eigenvalues[j] - dec.eigenvalues[j - 1] > cluster_width:
            cluster_start = j
        ortho = vecs[:, cluster_start:j] if j > cluster_start else None
        v, res, _ = eigenvector_inverse_iteration(
            w, float(dec.eigenvalues[j]), seed=seed + j, ortho_against=ortho
        )
        vecs[:, j] = v
        residuals[j] = res
    dec.eigenvectors = vecs
    dec.residuals = residuals
    return dec


# ---------------------------------------------------------------------------
# Green functions
# ---------------------------------------------------------------------------

def _window_prefix_suffix(w: SpectralWindow):
    diag = w.diag_minus_energy()
    sp, lp = det_prefix_logs(diag)
    ss, ls = det_prefix_logs(diag[::-1])
    return (sp, lp), (ss[::-1].copy(), ls[::-1].copy())


def green_entry(w: SpectralWindow, m: int, n: int) -> SignedLog:
    """(H_[a,b] - E)^-1 (m, n) = f_[a,m-1] f_[n+1,b] / f_[a,b] (m <= n),
    extended symmetrically; empty determinants count as 1."""
    if not (w.a <= m <= w.b and w.a <= n <= w.b):
        raise ValueError("entry indices outside the window")
    if m > n:
        m, n = n, m
    (sp, lp), (ss, ls) = _window_prefix_suffix(w)
    den = SignedLog(int(sp[w.size]), float(lp[w.size]))
    if den.sign == 0:
        raise SingularWindowError("E is an eigenvalue of the window")
    i = m - w.a  # prefix length a..m-1
    j = n - w.a + 1  # suffix start offset for n+1..b
    if _FAULT == "cramer_shift":
        i = min(i + 1, w.size)
    num = SignedLog(int(sp[i]), float(lp[i])) * SignedLog(int(ss[j]), float(ls[j]))
    return num / den


def green_row_logs(w: SpectralWindow, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs and log magnitudes of G(m, n) for all n in [a, b]."""
    if not w.a <= m <= w.b:
        raise ValueError("row index outside the window")
    (sp, lp), (ss, ls) = _window_prefix_suffix(w)
    if sp[w.size] == 0:
        raise SingularWindowError("E is an eigenvalue of the window")
    size = w.size
    i0 = m - w.a
    signs = np.empty(size, dtype=int)
    logs = np.empty(size)
    for n in range(size):
        i, j = (i0, n + 1) if i0 <= n else (n, i0 + 1)
        if _FAULT == "cramer_shift":
            i = min(i + 1, size)
        signs[n] = sp[i] * ss[j] * sp[size]
        logs[n] = lp[i] + ls[j] - lp[size]
    return signs, logs


def green_oracle(w: SpectralWindow, m: int) -> np.ndarray:
    """Column m of the resolvent by a direct banded solve (test oracle)."""
    if not w.a <= m <= w.b:
        raise ValueError("column index outside the window")
    diag = w.diag_minus_energy()
    rhs = np.zeros(w.size)
    rhs[m - w.a] = 1.0
    try:
        u = solve_banded((1, 1), _banded(diag), rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularWindowError(f"banded solve failed: {exc}") from exc
    if not np.all(np.isfinite(u)):
        raise SingularWindowError("non-finite resolvent column (E too close to spectrum)")
    return u


# ---------------------------------------------------------------------------
# comparison and identity reports
# ---------------------------------------------------------------------------

def weyl_comparison_report(w: SpectralWindow, cuts: Sequence[tuple[int, int]]) -> dict:
    """Whole-window log-determinant vs the sum over consecutive blocks.

    cuts = [(a_1,b_1), ..., (a_n,b_n)] must tile [a, b] from the left
    without gaps; a trailing remainder (b_n < b) is allowed and counted by
    the (n + N - b_n) factor of the reference bound.
    """
    a, b = w.a, w.b
    if not cuts:
        raise ValueError("need at least one block")
    prev_end = a - 1
    for (ak, bk) in cuts:
        if ak != prev_end + 1 or bk < ak or bk > b:
            raise ValueError(f"blocks must tile [{a},{b}] consecutively, got {cuts}")
        prev_end = bk
    diag = w.diag_minus_energy()
    _, full_log = det_log_batch(diag[None, :])
    full_log = float(full_log[0])
    block_sum = 0.0
    etas = []
    full_eigs = _sturm_values(diag + w.energy, None, tol=None)
    etas.append(np.min(np.abs(full_eigs - w.energy)))
    for (ak, bk) in cuts:
        seg = diag[ak - a : bk - a + 1]
        _, l = det_log_batch(seg[None, :])
        block_sum += float(l[0])
        seg_eigs = _sturm_values(seg + w.energy, None, tol=None)
        etas.append(np.min(np.abs(seg_eigs - w.energy)))
    eta = float(min(etas))
    lhs = abs(full_log - block_sum)
    n_blocks = len(cuts)
    b_n = cuts[-1][1] - a + 1  # last covered length, in sites
    size = w.size
    if eta == 0.0:
        return {"lhs": lhs, "eta": 0.0, "bound_ratio": math.inf, "degenerate": True}
    beff = abs(w.coupling) * w.potential.sup_norm
    denom = (n_blocks + size - b_n) * math.log((beff + 1.0) / eta)
    return {
        "lhs": lhs,
        "eta": eta,
        "bound_ratio": lhs / denom if denom > 0 else math.inf,
        "degenerate": False,
    }


def eigenvalue_perturbation_check(
    w: SpectralWindow, x2: TorusPoint, omega2
) -> dict:
    """Eigenvalue shift vs the sup-norm of the diagonal perturbation.

    The second window shares everything but phase/frequency.  The shift is
    bounded by the diagonal sup difference (Weyl), up to solver tolerance;
    the Holder ratio against N^2 B_alpha (|dx| + |dw|)^alpha is reported.
    """
    if isinstance(w.dyn, Shift):
        dyn2 = Shift(tuple(omega2) if not np.isscalar(omega2) else (float(omega2), float(omega2)))
        dw = max(
            abs(w.dyn.omega[0] - dyn2.omega[0]), abs(w.dyn.omega[1] - dyn2.omega[1])
        )
    else:
        dyn2 = SkewShift(float(omega2))
        dw = abs(w.dyn.omega - dyn2.omega)
    w2 = replace(w, phase=x2, dyn=dyn2)
    d1 = eigenvalues_sturm(w, tol=0.0)
    d2 = eigenvalues_sturm(w2, tol=0.0)
    shift = float(np.max(np.abs(d1.eigenvalues - d2.eigenvalues)))
    diag_sup = float(np.max(np.abs(w.site_values() - w2.site_values())))
    dx = max(abs(w.phase.x1 - x2.x1), abs(w.phase.x2 - x2.x2))
    sep = dx + dw
    n = w.size
    holder_ref = (
        n * n * abs(w.coupling) * w.potential.holder_constant * sep**w.potential.alpha
    )
    slack = 8.0 * np.finfo(float).eps * w.sup_bound()
    return {
        "max_eigenvalue_shift": shift,
        "diag_sup_norm": diag_sup,
        "passes": shift <= diag_sup + slack,
        "holder_ratio": shift / holder_ref if holder_ref > 0 else 0.0,
    }


def thouless_check(w: SpectralWindow) -> float:
    """|log|f_N| - sum_j log|E_j - E||; exact up to eigenvalue rounding.

    Requires dist(E, spectrum) >= 1e-6 so the log sum stays conditioned.
    """
    det = dirichlet_determinant(w)
    dec = eigenvalues_sturm(w, tol=0.0)
    gaps = np.abs(dec.eigenvalues - w.energy)
    dist = float(gaps.min())
    if dist < 1e-6:
        raise ValueError(f"dist(E, spectrum) = {dist:.3g} below the 1e-6 floor")
    if det.sign == 0:
        raise SingularWindowError("zero determinant at distance >= 1e-6?")
    return abs(det.log_abs - float(np.sum(np.log(gaps))))
