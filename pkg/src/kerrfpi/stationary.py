"""Stationary photon numbers, branch stability and the bistability domain.

The self-consistency condition for the mean photon number reduces to the
cubic ``Y = n [1 + (Delta0 - n Delta1)^2]``. It is solved in the scaled
variable ``x = Delta1 n``, where it becomes the monic cubic

    x^3 - 2 Delta0 x^2 + (1 + Delta0^2) x - Delta1 Y = 0

with O(1) coefficients regardless of how small ``Delta1`` is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import SolverError
from .params import NormalizedParams, PhysicalParams, derive_rates, normalize

Branch = Literal["unique", "lower", "middle", "upper"]

EPS = np.finfo(float).eps
MERGE_RTOL = 1e-9
RESIDUAL_RTOL = 1e-9
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class StationaryState:
    n: float
    branch: Branch
    stable: bool
    residual: float
    # double or triple root exactly at a fold: dY/dn = 0
    marginal: bool = False

    @property
    def stability_label(self) -> str:
        if self.marginal:
            return "marginal"
        return "hypothesized-stable" if self.stable else "unstable"


@dataclass(frozen=True)
class BistabilityBoundary:
    """Fold points of the stationary curve.

    ``n_minus <= n_plus`` are the photon numbers at the two folds.
    ``p_plus`` is the upper edge of the three-root power window, reached at
    the fold ``n_minus`` (where the lower branch ends); ``p_minus`` is the
    lower edge, reached at ``n_plus``. Powers are effective drive powers.
    """

    exists: bool
    n_minus: float
    n_plus: float
    p_minus: float
    p_plus: float
    delta_min: float


def y_of_n(n, np_: NormalizedParams):
    """Dimensionless drive needed to sustain ``n`` photons."""
    u = np_.Delta0 - n * np_.Delta1
    return n * (1.0 + u * u)


def dy_dn(n, np_: NormalizedParams):
    """Slope of the stationary curve; positive slope means hypothesized stability."""
    u = np_.Delta0 - n * np_.Delta1
    return 1.0 + u * u - 2.0 * n * np_.Delta1 * u


def _g(x: float, d0: float, c: float) -> float:
    return x * (1.0 + (d0 - x) ** 2) - c


def _g_err(x: float, d0: float, c: float) -> float:
    # rounding-level bound on |g(x)| from the expanded terms
    ax = abs(x)
    return 8.0 * EPS * (ax ** 3 + 2.0 * abs(d0) * ax * ax + (1.0 + d0 * d0) * ax + abs(c))


def _gp(x: float, d0: float) -> float:
    return 3.0 * x * x - 4.0 * d0 * x + 1.0 + d0 * d0


def _depressed_guesses(d0: float, c: float) -> list[float]:
    """Closed-form roots of the depressed cubic, shifted back to x."""
    p = 1.0 - d0 * d0 / 3.0
    q = (2.0 * d0 ** 3 + 18.0 * d0) / 27.0 - c
    shift = 2.0 * d0 / 3.0
    h = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if h > 0.0 or p >= 0.0:
        s = math.sqrt(max(h, 0.0))
        a = -q / 2.0 - math.copysign(s, q)
        u = math.copysign(abs(a) ** (1.0 / 3.0), a)
        t = u - p / (3.0 * u) if u != 0.0 else 0.0
        return [t + shift]
    r = 2.0 * math.sqrt(-p / 3.0)
    arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
    phi = math.acos(min(1.0, max(-1.0, arg)))
    return [r * math.cos(phi / 3.0 - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]


def _polish(a: float, b: float, guess: float, d0: float, c: float) -> float:
    """Safeguarded Newton on a monotone bracket [a, b] of g."""
    ga = _g(a, d0, c)
    if ga == 0.0:
        return a
    gb = _g(b, d0, c)
    if gb == 0.0:
        return b
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(200):
        gx = _g(x, d0, c)
        if gx == 0.0:
            return x
        if (gx > 0.0) == (ga > 0.0):
            a, ga = x, gx
        else:
            b = x
        d = _gp(x, d0)
        step = gx / d if d != 0.0 else math.inf
        xn = x - step
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if abs(xn - x) <= 2.0 * EPS * max(abs(xn), 1e-300) or b - a <= 4.0 * EPS * max(abs(a), abs(b)):
            return xn
        x = xn
    return x


def _solve_scaled(d0: float, c: float, x_lo: float, x_hi: float) -> list[tuple[float, int]]:
    """Real roots of g on [x_lo, x_hi] as (root, multiplicity) pairs."""
    guesses = _depressed_guesses(d0, c)
    disc = d0 * d0 - 3.0
    crit: list[float] = []
    if disc > 0.0:
        s = math.sqrt(disc)
        crit = [(2.0 * d0 - s) / 3.0, (2.0 * d0 + s) / 3.0]
    elif disc > -8.0 * EPS * d0 * d0:
        crit = [2.0 * d0 / 3.0]

    # critical points where g vanishes to rounding are double (or triple) roots
    multiple: list[tuple[float, int]] = []
    cuts: list[float] = []
    for xc in crit:
        if not (x_lo <= xc <= x_hi):
            continue
        if abs(_g(xc, d0, c)) <= _g_err(xc, d0, c):
            multiple.append((xc, 3 if len(crit) == 1 else 2))
        cuts.append(xc)

    edges = [x_lo] + cuts + [x_hi]
    mult_at = {m for m, _ in multiple}
    found: list[tuple[float, int]] = list(multiple)
    for a, b in zip(edges[:-1], edges[1:]):
        # g is monotone on [a, b]; a multiple root on an edge excludes any other
        if b <= a or a in mult_at or b in mult_at:
            continue
        ga, gb = _g(a, d0, c), _g(b, d0, c)
        if ga == 0.0 or gb == 0.0 or (ga > 0.0) != (gb > 0.0):
            inside = [x for x in guesses if a <= x <= b]
            guess = inside[0] if inside else 0.5 * (a + b)
            found.append((_polish(a, b, guess, d0, c), 1))
    found.sort()
    return found


def solve_normalized(np_: NormalizedParams) -> list[StationaryState]:
    """All stationary photon numbers for dimensionless parameters."""
    Y, D0, D1 = float(np_.Y), float(np_.Delta0), float(np_.Delta1)
    if Y < 0.0:
        raise SolverError(f"negative drive Y={Y}")
    if Y == 0.0:
        return [StationaryState(0.0, "unique", True, 0.0)]
    if D1 == 0.0:
        n = Y / (1.0 + D0 * D0)
        return [StationaryState(n, "unique", True, abs(y_of_n(n, np_) - Y))]

    c = D1 * Y
    x_lo, x_hi = min(0.0, c), max(0.0, c)
    scaled = _solve_scaled(D0, c, x_lo, x_hi)
    roots: list[tuple[float, int]] = []
    for x, mult in scaled:
        n = x / D1
        if n < 0.0:
            if n > -1e-12:
                n = 0.0
            else:
                continue
        roots.append((n, mult))
    roots.sort()
    # merge in n-space as well
    merged: list[tuple[float, int]] = []
    for n, m in roots:
        if merged and abs(n - merged[-1][0]) <= MERGE_RTOL * max(1.0, n):
            merged[-1] = (merged[-1][0], merged[-1][1] + m)
            continue
        merged.append((n, m))

    tol = RESIDUAL_RTOL * max(1.0, Y)
    states: list[StationaryState] = []
    distinct = len(merged)
    if distinct == 1:
        labels = ["unique"]
    elif distinct == 2:
        labels = ["lower", "upper"]
    else:
        labels = ["lower", "middle", "upper"][:distinct]
    for (n, mult), label in zip(merged, labels):
        res = abs(y_of_n(n, np_) - Y)
        if res > tol:
            raise SolverError(f"residual {res:.3e} exceeds tolerance {tol:.3e} at n={n!r}")
        marginal = mult > 1
        stable = (not marginal) and dy_dn(n, np_) > 0.0
        states.append(StationaryState(n, label, stable, res, marginal))
    return states


def stationary_photon_numbers(p: PhysicalParams) -> list[StationaryState]:
    """Stationary mean photon numbers, sorted ascending, with stability labels."""
    return solve_normalized(normalize(p))


def boundary_normalized(D0: float, D1: float) -> tuple[bool, float, float, float, float]:
    """Fold photon numbers and fold drives ``(exists, n_minus, n_plus, Y_minus, Y_plus)``."""
    exists = D0 * D1 > 0.0 and abs(D0) >= SQRT3 * (1.0 - 4.0 * EPS)
    if not exists:
        return False, math.nan, math.nan, math.nan, math.nan
    a0, a1 = abs(D0), abs(D1)
    s = math.sqrt(max(a0 * a0 - 3.0, 0.0))
    n_minus = (2.0 * a0 - s) / (3.0 * a1)
    n_plus = (2.0 * a0 + s) / (3.0 * a1)
    y = lambda n: n * (1.0 + (a0 - n * a1) ** 2)  # noqa: E731
    # Y at n_minus is the local maximum of the curve, Y at n_plus the local minimum
    return True, n_minus, n_plus, y(n_plus), y(n_minus)


def bistability_boundary(p: PhysicalParams) -> BistabilityBoundary:
    np_ = normalize(p)
    rates = derive_rates(p)
    kappa = rates.kappa_eff if p.mode == "quantum" else rates.kappa_cav
    exists, n_minus, n_plus, y_minus, y_plus = boundary_normalized(np_.Delta0, np_.Delta1)
    return BistabilityBoundary(
        exists=exists,
        n_minus=n_minus,
        n_plus=n_plus,
        p_minus=np_.power_from_y(y_minus),
        p_plus=np_.power_from_y(y_plus),
        delta_min=SQRT3 * kappa,
    )


def onset_power(p: PhysicalParams) -> float:
    """Effective drive at which bistability first appears (detuning at threshold)."""
    np_ = normalize(p)
    if np_.Delta1 == 0.0:
        return math.inf
    return np_.power_from_y(8.0 * SQRT3 / (9.0 * abs(np_.Delta1)))


def output_power(p: PhysicalParams, s: StationaryState) -> float:
    """Power leaving through the output mirror, photons per unit time."""
    return 2.0 * p.kappa_out * s.n
