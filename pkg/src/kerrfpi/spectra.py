"""Stationary spectra of the driven Kerr cavity.

Frequencies ``omega`` are offsets from the drive carrier. Every density is
normalized so that ``(1/2pi) * integral(density, domega)`` is the total
quantity (photons, photons per unit time, or 1 for the commutator).

The explicit forms with ``(delta_n - omega)^2`` are used throughout for the
cavity resonance position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, InvalidParameterError, MonochromaticInputError, QuadratureError
from .params import PhysicalParams, derive_rates, nonlinear_detuning

SpectrumKind = Literal["input_power", "cavity_field", "commutator", "output_power", "photon_fluct"]

TWO_PI = 2.0 * math.pi
DEFAULT_RTOL = 1e-8
QUAD_LIMIT = 400


@dataclass(frozen=True)
class Spectrum:
    omega_grid: np.ndarray
    values: np.ndarray
    kind: SpectrumKind
    # (1/2pi) * integral over the whole real line, by quadrature
    total: float = math.nan
    total_error: float = math.nan


def lorentz(omega, kappa):
    """Unit-area Lorentzian ``2 kappa / (omega^2 + kappa^2)`` (area measured with d omega / 2 pi)."""
    if np.any(np.asarray(kappa) <= 0):
        raise InvalidParameterError("Lorentzian half-width must be > 0")
    omega = np.asarray(omega, dtype=float)
    return 2.0 * kappa / (omega * omega + kappa * kappa)


def _require_linewidth(p: PhysicalParams) -> None:
    if p.kappa_s <= 0.0:
        raise MonochromaticInputError(
            "input linewidth kappa_s is 0: the spectrum is a delta distribution; "
            "only integrated quantities are available"
        )


def _require_single_mirror(p: PhysicalParams) -> None:
    if p.kappa_out != 0.0 or p.kappa_abs != 0.0:
        raise ConfigurationError("requires the single-mirror cavity (kappa_out = kappa_abs = 0)")


def input_spectrum(omega, p: PhysicalParams):
    _require_linewidth(p)
    return p.p_in * lorentz(omega, p.kappa_s)


def cavity_spectrum(omega, p: PhysicalParams, n: float):
    """Intracavity field spectrum for the stationary state with ``n`` photons."""
    omega = np.asarray(omega, dtype=float)
    dn = nonlinear_detuning(p, n)
    kc = p.kappa_in + p.kappa_out + p.kappa_abs
    return 2.0 * p.kappa_in * input_spectrum(omega, p) / ((dn - omega) ** 2 + kc * kc)


def commutator_spectrum(omega, p: PhysicalParams, n: float):
    omega = np.asarray(omega, dtype=float)
    dn = nonlinear_detuning(p, n)
    kc = p.kappa_in + p.kappa_out + p.kappa_abs
    return 2.0 * kc / ((dn - omega) ** 2 + kc * kc)


def anti_normal_spectrum(omega, p: PhysicalParams, n: float):
    """Spectrum of the anti-normally ordered product, n(omega) + c(omega)."""
    return cavity_spectrum(omega, p, n) + commutator_spectrum(omega, p, n)


def output_spectrum(omega, p: PhysicalParams, n: float):
    return 2.0 * p.kappa_out * cavity_spectrum(omega, p, n)


def mean_photon_number(p: PhysicalParams, n: float) -> float:
    """Closed-form ``(1/2pi) * integral n(omega)`` evaluated at photon number ``n``.

    Equals ``n`` exactly when ``n`` is stationary. Valid for kappa_s = 0 too.
    """
    rates = derive_rates(p)
    dn = nonlinear_detuning(p, n)
    return float(rates.p_eff * lorentz(dn, rates.kappa_eff))


# ---------------------------------------------------------------------------
# quadrature over the real line
# ---------------------------------------------------------------------------


def integrate_line(
    f: Callable[[float], float],
    peaks: Sequence[float],
    width: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = 0.0,
) -> tuple[float, float]:
    """``integral_{-inf}^{inf} f`` for a rational integrand with known peak positions.

    The finite core ``[min(peaks) - 20 width, max(peaks) + 20 width]`` is
    integrated with the peaks as breakpoints; both tails use QUADPACK's
    infinite-interval transform. Raises ``QuadratureError`` when the summed
    error estimate exceeds the tolerance.
    """
    pk = sorted({float(x) for x in peaks})
    lo, hi = pk[0] - 20.0 * width, pk[-1] + 20.0 * width
    inner = [x for x in pk if lo < x < hi]
    opts = dict(epsabs=atol, epsrel=rtol, limit=QUAD_LIMIT)
    core, e_core = integrate.quad(f, lo, hi, points=inner or None, **opts)
    left, e_left = integrate.quad(f, -np.inf, lo, **opts)
    right, e_right = integrate.quad(f, hi, np.inf, **opts)
    total = core + left + right
    err = e_core + e_left + e_right
    if err > max(atol, rtol * abs(total)) * 10.0:
        raise QuadratureError("quadrature tolerance not met", total, err)
    return total, err


def spectral_total(f: Callable[[float], float], peaks, width, rtol=DEFAULT_RTOL) -> tuple[float, float]:
    """``(1/2pi) * integral f`` with its error estimate."""
    v, e = integrate_line(f, peaks, width, rtol=rtol)
    return v / TWO_PI, e / TWO_PI


def _scalar_cavity(p: PhysicalParams, n: float) -> Callable[[float], float]:
    _require_linewidth(p)
    dn = float(nonlinear_detuning(p, n))
    kc = p.kappa_in + p.kappa_out + p.kappa_abs
    ks = p.kappa_s
    amp = 4.0 * p.kappa_in * p.p_in * ks

    def cav(w: float) -> float:
        return amp / ((w * w + ks * ks) * ((dn - w) ** 2 + kc * kc))

    return cav


def photon_fluct_density(omega: float, p: PhysicalParams, n: float, rtol: float = DEFAULT_RTOL) -> float:
    """Photon-number fluctuation density at a single frequency offset.

    Sum of the self-convolution of n(omega) and the symmetrized overlap of
    n(omega) with the commutator spectrum, each over d omega' / 2pi.
    """
    cav = _scalar_cavity(p, n)
    dn = float(nonlinear_detuning(p, n))
    kc = p.kappa_in + p.kappa_out + p.kappa_abs
    om = float(omega)

    def integrand(w: float) -> float:
        a = cav(w + om)
        c = 2.0 * kc / ((dn - w) ** 2 + kc * kc)
        return a * cav(w) + 0.5 * (a + cav(w - om)) * c

    peaks = (0.0, dn, -om, dn - om, om, dn + om)
    width = max(p.kappa_s, kc)
    v, _ = integrate_line(integrand, peaks, width, rtol=rtol)
    return v / TWO_PI


def photon_fluct_total(p: PhysicalParams, n: float, rtol: float = 1e-9) -> tuple[float, float]:
    """``(1/2pi) * integral`` of the fluctuation density over all frequencies.

    The density is even in omega, so the half line is integrated and doubled.
    """
    dn = abs(float(nonlinear_detuning(p, n)))
    inner_rtol = rtol * 1e-2
    f = lambda w: photon_fluct_density(w, p, n, rtol=inner_rtol)  # noqa: E731
    width = max(p.kappa_s, p.kappa_cav)
    hi = 2.0 * dn + 40.0 * width
    pts = sorted({x for x in (dn, 2.0 * dn) if 0.0 < x < hi}) or None
    opts = dict(epsabs=0.0, epsrel=rtol, limit=QUAD_LIMIT)
    core, e1 = integrate.quad(f, 0.0, hi, points=pts, **opts)
    tail, e2 = integrate.quad(f, hi, np.inf, **opts)
    total = 2.0 * (core + tail) / TWO_PI
    err = 2.0 * (e1 + e2) / TWO_PI
    if err > 10.0 * rtol * abs(total):
        raise QuadratureError("fluctuation total tolerance not met", total, err)
    return total, err


def default_grid(p: PhysicalParams, n: float, num: int = 2001, half_width: float | None = None) -> np.ndarray:
    """Uniform grid covering the drive line and the shifted cavity resonance."""
    rates = derive_rates(p)
    dn = float(nonlinear_detuning(p, n))
    W = half_width if half_width is not None else 50.0 * max(rates.kappa_eff, p.kappa_s)
    return np.linspace(min(0.0, dn) - W, max(0.0, dn) + W, num)


def photon_fluct_spectrum(
    omega_grid, p: PhysicalParams, n: float, rtol: float = DEFAULT_RTOL, with_total: bool = False
) -> Spectrum:
    omega_grid = np.asarray(omega_grid, dtype=float)
    _require_linewidth(p)
    values = np.array([photon_fluct_density(w, p, n, rtol=rtol) for w in omega_grid])
    total, err = photon_fluct_total(p, n) if with_total else (math.nan, math.nan)
    return Spectrum(omega_grid, values, "photon_fluct", total, err)


def spectrum(kind: SpectrumKind, omega_grid, p: PhysicalParams, n: float, rtol: float = DEFAULT_RTOL) -> Spectrum:
    """Sample one spectrum on a grid and attach its quadrature total."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.ndim != 1 or np.any(np.diff(omega_grid) <= 0):
        raise InvalidParameterError("omega grid must be one-dimensional and strictly increasing")
    if kind == "photon_fluct":
        return photon_fluct_spectrum(omega_grid, p, n, rtol=rtol, with_total=True)
    fn = {
        "input_power": lambda w: input_spectrum(w, p),
        "cavity_field": lambda w: cavity_spectrum(w, p, n),
        "commutator": lambda w: commutator_spectrum(w, p, n),
        "output_power": lambda w: output_spectrum(w, p, n),
    }[kind]
    dn = float(nonlinear_detuning(p, n))
    width = max(p.kappa_s, p.kappa_cav)
    total, err = spectral_total(lambda w: float(fn(w)), (0.0, dn), width, rtol=rtol)
    return Spectrum(omega_grid, np.asarray(fn(omega_grid), dtype=float), kind, total, err)


# ---------------------------------------------------------------------------
# single-mirror correlation functions and the closure identity
# ---------------------------------------------------------------------------


def cross_corr_in_cavity(omega, p: PhysicalParams, n: float):
    """Input-cavity cross spectrum <a_in^+(w) a(w)> for the single-mirror cavity."""
    _require_single_mirror(p)
    omega = np.asarray(omega, dtype=float)
    k = p.kappa_in
    dn = nonlinear_detuning(p, n)
    return math.sqrt(2.0 * k) * input_spectrum(omega, p) / (1j * (dn - omega) + k)


def cross_corr_in_kerr(omega, p: PhysicalParams, n: float):
    """<a_in^+(w) (n a)_w>: the cross spectrum with the Kerr product, 2n times the above."""
    return 2.0 * n * cross_corr_in_cavity(omega, p, n)


def kerr_in_partner(omega, p: PhysicalParams, n: float):
    """<(a^+ n)_{-w} a_in(w)>, the conjugate partner of ``cross_corr_in_kerr``."""
    return np.conj(cross_corr_in_kerr(omega, p, n))


def nn_correlation_spectrum(omega, p: PhysicalParams, n: float):
    """<(a^+ n)_{-w} (n a)_w> fixed by energy conservation at the mirror."""
    _require_single_mirror(p)
    omega = np.asarray(omega, dtype=float)
    k = p.kappa_in
    dn = nonlinear_detuning(p, n)
    return 8.0 * k * n * n * input_spectrum(omega, p) / ((dn - omega) ** 2 + k * k)


def assemble_full_spectrum(omega, p: PhysicalParams, n: float):
    """Cavity spectrum built from the unclosed expression with the Kerr correlations.

    Uses the bare detuning delta0 in the denominator and the correlation
    functions above in the numerator. Agreement with ``cavity_spectrum``
    is the closure identity.
    """
    _require_single_mirror(p)
    omega = np.asarray(omega, dtype=float)
    k = p.kappa_in
    d1 = p.delta1
    x = cross_corr_in_kerr(omega, p, n)
    x_partner = kerr_in_partner(omega, p, n)
    num = (
        d1 * d1 * nn_correlation_spectrum(omega, p, n)
        + 1j * d1 * math.sqrt(2.0 * k) * (x - x_partner)
        + 2.0 * k * input_spectrum(omega, p)
    )
    return (num / ((p.delta0 - omega) ** 2 + k * k)).real


def implied_output_spectrum(omega, p: PhysicalParams, n: float):
    """Output power spectrum from the unclosed single-mirror expression."""
    _require_single_mirror(p)
    omega = np.asarray(omega, dtype=float)
    k = p.kappa_in
    d1 = p.delta1
    d0w = p.delta0 - omega
    x = cross_corr_in_kerr(omega, p, n)
    x_partner = kerr_in_partner(omega, p, n)
    num = 2.0 * k * d1 * d1 * nn_correlation_spectrum(omega, p, n) + 1j * math.sqrt(2.0 * k) * d1 * (
        (k + 1j * d0w) * x - x_partner * (k - 1j * d0w)
    )
    return (num / (d0w ** 2 + k * k)).real + input_spectrum(omega, p)


def mirror_output_spectrum(omega, p: PhysicalParams, n: float):
    """Output spectrum from the mirror relation a_out = sqrt(2 kappa) a - a_in."""
    _require_single_mirror(p)
    k = p.kappa_in
    cross = cross_corr_in_cavity(omega, p, n)
    return 2.0 * k * cavity_spectrum(omega, p, n) - math.sqrt(2.0 * k) * 2.0 * cross.real + input_spectrum(omega, p)
