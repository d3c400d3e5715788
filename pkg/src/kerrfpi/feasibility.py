"""Laboratory Kerr media: per-photon nonlinearity and few-photon bistability.

Internally everything is SI. The intensity nonlinear index ``tilde_n2``
is stored in m^2/W; helpers convert from and to cm^2/W and cm^2/kW.
The intensity of one cavity photon is ``n0 c hbar omega0 / (2 V)``, the
SI value of the Gaussian-unit convention I = (n0 c / 8 pi)|E|^2 with
|E|^2 = 4 pi hbar omega0 / V per photon.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from scipy.constants import c as C_LIGHT
from scipy.constants import hbar as HBAR

from .errors import InvalidParameterError

SQRT3 = math.sqrt(3.0)
CM2_PER_M2 = 1.0e4
W_PER_KW = 1.0e3
MIN_VOLUME = 1e-30  # m^3, well below any optical mode volume


def cm2_per_w_to_si(value: float) -> float:
    return value / CM2_PER_M2


def si_to_cm2_per_w(value: float) -> float:
    return value * CM2_PER_M2


def cm2_per_kw_to_si(value: float) -> float:
    return cm2_per_w_to_si(value / W_PER_KW)


def si_to_cm2_per_kw(value: float) -> float:
    return si_to_cm2_per_w(value) * W_PER_KW


@dataclass(frozen=True)
class KerrMediumSpec:
    """Kerr medium inside a wavelength-scale cavity.

    ``tilde_n2`` is in m^2/W (use ``from_cm2_per_kw`` for the customary
    unit), ``lambda0`` the vacuum wavelength in m and ``V`` the mode volume
    in m^3.
    """

    tilde_n2: float
    n0: float
    lambda0: float
    V: float
    Q: float
    m: int = 1
    omega0: float = field(init=False)

    def __post_init__(self):
        if not self.n0 > 1.0:
            raise InvalidParameterError(f"n0 must be > 1, got {self.n0}")
        if not self.lambda0 > 0.0:
            raise InvalidParameterError("lambda0 must be > 0")
        if not self.V > 0.0:
            raise InvalidParameterError("mode volume must be > 0")
        if self.V < MIN_VOLUME:
            raise InvalidParameterError(f"mode volume {self.V} m^3 is below {MIN_VOLUME} m^3")
        if not self.Q > 0.0:
            raise InvalidParameterError("Q must be > 0")
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParameterError("mode index m must be an integer >= 1")
        object.__setattr__(self, "omega0", 2.0 * math.pi * C_LIGHT / self.lambda0)

    @classmethod
    def from_cm2_per_kw(cls, tilde_n2_cm2_kw: float, n0: float, lambda0: float, V: float | None = None,
                        Q: float = 1e3, m: int = 1) -> "KerrMediumSpec":
        """Build with ``tilde_n2`` in cm^2/kW; ``V`` defaults to (lambda0 / 2 n0)^3."""
        if V is None:
            V = (lambda0 / (2.0 * n0)) ** 3
        return cls(cm2_per_kw_to_si(tilde_n2_cm2_kw), n0, lambda0, V, Q, m)

    @property
    def cavity_length(self) -> float:
        """Length of a cavity whose m-th mode sits at ``omega0``."""
        return self.m * self.lambda0 / (2.0 * self.n0)

    @property
    def kappa_eff(self) -> float:
        """Effective half-width implied by the quality factor, omega0 / 2Q."""
        return self.omega0 / (2.0 * self.Q)


def photon_intensity(spec: KerrMediumSpec) -> float:
    """Intensity of a single cavity photon, W/m^2."""
    return spec.n0 * C_LIGHT * HBAR * spec.omega0 / (2.0 * spec.V)


def n2_per_photon(spec: KerrMediumSpec) -> float:
    """Refractive-index change per intracavity photon (dimensionless)."""
    return spec.tilde_n2 * photon_intensity(spec)


def refractive_index(spec: KerrMediumSpec, n: float) -> float:
    return spec.n0 + n2_per_photon(spec) * n


def kerr_delta1(spec: KerrMediumSpec) -> float:
    """Kerr coefficient delta1 in rad/s, from 2 delta1 = omega0 n2 / n0."""
    return spec.omega0 * n2_per_photon(spec) / (2.0 * spec.n0)


def mode_frequency(spec: KerrMediumSpec, n: float) -> float:
    """Cavity resonance pulled by ``n`` photons, first order in n2 n / n0."""
    shift = n2_per_photon(spec) * n / spec.n0
    if abs(shift) > 0.1:
        warnings.warn(
            f"n2*n/n0 = {shift:.3g} is not small; first-order mode shift is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    return spec.omega0 * (1.0 - shift)


def min_tilde_n2(spec: KerrMediumSpec) -> float:
    """Smallest tilde_n2 (m^2/W) that allows bistability with one photon. Ignores spec.tilde_n2."""
    return SQRT3 * spec.V / (C_LIGHT * HBAR * spec.omega0 * spec.Q)


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    margin: float
    # sign the detuning delta0 must have for bistability (same as delta1)
    detuning_sign: int


def bistability_feasible(spec: KerrMediumSpec, n: float = 1.0) -> Feasibility:
    """Check tilde_n2 c hbar omega0 n Q / (sqrt(3) V) >= 1.

    A negative ``tilde_n2`` is accepted: the margin uses its magnitude and
    bistability then needs a negative detuning.
    """
    if not n > 0.0:
        raise InvalidParameterError("photon number must be > 0")
    margin = abs(spec.tilde_n2) * C_LIGHT * HBAR * spec.omega0 * n * spec.Q / (SQRT3 * spec.V)
    sign = 1 if spec.tilde_n2 >= 0.0 else -1
    return Feasibility(margin >= 1.0, margin, sign)
