"""Brute-force verifiers for the closed-form results.

Nothing here calls the cubic solver or the QUADPACK-based spectral
quadrature; the oracles are independent routes to the same numbers and
ship with the library so that ``kerrfpi selfcheck`` can run them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR

from . import _kernels
from .errors import QuadratureError
from .params import NormalizedParams, PhysicalParams, derive_rates, kerr_factor, normalize

DEFAULT_GRID_POINTS = 4001


@dataclass
class OracleReport:
    target: str
    max_abs_error: float
    max_rel_error: float
    samples: int
    passed: bool
    tolerance: float = math.nan
    seed: int | None = None
    note: str = ""

    def as_dict(self) -> dict:
        return {k: v.item() if isinstance(v, np.generic) else v for k, v in asdict(self).items()}


def default_n_max(np_: NormalizedParams) -> float:
    # every root obeys n <= Y because the bracket 1 + (...)^2 is >= 1
    return float(np_.Y) + 1.0


def root_scan(np_: NormalizedParams, n_max: float | None = None,
              grid_points: int = DEFAULT_GRID_POINTS) -> list[float]:
    """All roots of ``n [1 + (Delta0 - n Delta1)^2] = Y`` by sign-change scan and bisection."""
    if n_max is None:
        n_max = default_n_max(np_)
    roots, counts, coarse = _kernels.scan_roots(
        [np_.Y], [np_.Delta0], [np_.Delta1], [n_max], grid_points
    )
    if coarse[0]:
        warnings.warn("root scan grid is too coarse: adjacent sign changes", RuntimeWarning, stacklevel=2)
    k = min(int(counts[0]), roots.shape[1])
    return [float(r) for r in roots[0, :k]]


def root_scan_batch(Y, D0, D1, n_max=None, grid_points: int = DEFAULT_GRID_POINTS):
    """Vectorized ``root_scan``: returns (roots padded with NaN, counts, coarse flags)."""
    Y = np.asarray(Y, dtype=float)
    if n_max is None:
        n_max = Y + 1.0
    return _kernels.scan_roots(Y, D0, D1, np.broadcast_to(n_max, Y.shape), grid_points)


@dataclass(frozen=True)
class FixedPointResult:
    n: float
    converged: bool
    iterations: int


def safe_damping(np_: NormalizedParams) -> float:
    """Damping that keeps the relaxed map monotone: 1 / (1 + Y |Delta1|).

    The drive map has slope bounded by Y |Delta1| in magnitude, so this eta
    makes every step order-preserving; iterates then converge
    monotonically to a fixed point on a stable branch.
    """
    return 1.0 / (1.0 + abs(np_.Y * np_.Delta1))


def fixed_point(p: PhysicalParams, n_start: float, damping: float | None = None,
                tol: float = 1e-10, max_iter: int = 100_000) -> FixedPointResult:
    """Damped iteration ``n <- (1 - eta) n + eta p_eff L(delta_n, kappa_eff)``.

    Written in physical rates so it is independent of the normalized cubic.
    """
    rates = derive_rates(p)
    kappa = rates.kappa_eff if p.mode == "quantum" else rates.kappa_cav
    eta = safe_damping(normalize(p)) if damping is None else float(damping)
    if not 0.0 < eta <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    g = kerr_factor(p) * p.delta1
    n = float(n_start)
    for it in range(1, max_iter + 1):
        dn = p.delta0 - g * n
        target = rates.p_eff * 2.0 * kappa / (dn * dn + kappa * kappa)
        step = eta * (target - n)
        n += step
        if abs(step) < tol:
            return FixedPointResult(n, True, it)
    return FixedPointResult(n, False, max_iter)


def fixed_point_batch(Y, D0, D1, n_start, eta=None, tol: float = 1e-10, max_iter: int = 100_000):
    """Normalized damped iteration over many parameter sets at once."""
    Y = np.asarray(Y, dtype=float)
    D1 = np.asarray(D1, dtype=float)
    if eta is None:
        eta = 1.0 / (1.0 + np.abs(Y * D1))
    return _kernels.fixed_point(Y, D0, D1, n_start, eta, tol=tol, max_iter=max_iter)


# ---------------------------------------------------------------------------
# reference quadrature: adaptive Gauss-Kronrod (7/15) bisection
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    fx = f(mid + half * _NODES)
    k = half * np.dot(_WK, fx)
    g = half * np.dot(_WG15, fx)
    return k, abs(k - g)


def quad_reference(f: Callable, window: tuple[float, float], tol: float = 1e-10,
                   max_intervals: int = 20_000, vectorized: bool = True,
                   breakpoints=(), scale: float = 1.0) -> tuple[float, float]:
    """Adaptive-bisection quadrature of ``f`` over ``window``.

    Infinite windows are mapped with ``w = s tan(theta)`` (``s`` the
    characteristic width of the integrand), which turns Lorentzian tails into
    bounded integrands. ``tol`` is relative to the running total. Raises
    ``QuadratureError`` carrying the best estimate when the interval
    budget runs out.
    """
    fv = f if vectorized else np.vectorize(f, otypes=[float])
    a, b = float(window[0]), float(window[1])
    if math.isinf(a) or math.isinf(b):
        ta = -0.5 * math.pi if math.isinf(a) else math.atan(a / scale)
        tb = 0.5 * math.pi if math.isinf(b) else math.atan(b / scale)

        def g(t):
            return scale * fv(scale * np.tan(t)) / np.cos(t) ** 2

        inner = (math.atan(x / scale) for x in breakpoints)
        edges = [ta] + sorted(t for t in inner if ta < t < tb) + [tb]
    else:
        g = fv
        edges = [a] + sorted(x for x in breakpoints if a < x < b) + [b]

    intervals = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _gk15(g, lo, hi)
        intervals.append((e, lo, hi, v))
    total = sum(iv[3] for iv in intervals)
    err = sum(iv[0] for iv in intervals)
    while err > tol * max(abs(total), 1e-300):
        if len(intervals) >= max_intervals:
            raise QuadratureError("reference quadrature budget exhausted", total, err)
        intervals.sort(key=lambda iv: iv[0])
        e, lo, hi, v = intervals.pop()
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(g, lo, mid)
        v2, e2 = _gk15(g, mid, hi)
        intervals += [(e1, lo, mid, v1), (e2, mid, hi, v2)]
        total += v1 + v2 - v
        err += e1 + e2 - e
    total = sum(iv[3] for iv in intervals)
    return total, err


def fluct_riemann(omega, p: PhysicalParams, n: float, half_width: float | None = None,
                  step: float | None = None) -> np.ndarray:
    """Photon-number fluctuation density by a plain Riemann sum on a uniform grid.

    Fixed-grid counterpart of the adaptive convolution in ``spectra``.
    """
    rates = derive_rates(p)
    kc = rates.kappa_cav
    ks = p.kappa_s
    dn = p.delta0 - kerr_factor(p) * p.delta1 * n
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    wmax = float(np.max(np.abs(omega))) if omega.size else 0.0
    W = half_width if half_width is not None else 400.0 * max(kc, ks) + abs(dn) + wmax
    h = step if step is not None else 0.02 * min(kc, ks)
    m = int(math.ceil(2.0 * W / h)) + 1
    amp = 4.0 * p.kappa_in * p.p_in * ks
    return _kernels.fluct_riemann(omega, -W, h, m, amp, ks, dn, kc)


def n2_per_photon_cgs(tilde_n2_cm2_per_w: float, n0: float, lambda0_m: float, V_m3: float) -> float:
    """Per-photon index change computed entirely in Gaussian units.

    I = (n0 c / 8 pi) |E|^2 with |E|^2 = 4 pi hbar omega0 / V for one photon,
    converted from erg s^-1 cm^-2 to W cm^-2 at the end.
    """
    c_cgs = C_LIGHT * 1e2           # cm/s
    hbar_cgs = HBAR * 1e7           # erg s
    V_cgs = V_m3 * 1e6              # cm^3
    omega0 = 2.0 * math.pi * c_cgs / (lambda0_m * 1e2)
    e2 = 4.0 * math.pi * hbar_cgs * omega0 / V_cgs
    intensity_cgs = n0 * c_cgs / (8.0 * math.pi) * e2    # erg / (s cm^2)
    intensity_w_cm2 = intensity_cgs * 1e-7
    return tilde_n2_cm2_per_w * intensity_w_cm2
