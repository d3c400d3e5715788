"""Cavity and drive parameters, derived rates and dimensionless form.

All rates (detunings, decay rates, Kerr shift) are angular frequencies in
one consistent unit; powers are photons per unit time in the same unit.
Normalized units (kappa_cav = 1) are just a particular choice of that unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import InvalidParameterError

Mode = Literal["quantum", "semiclassical"]
MODES: tuple[str, ...] = ("quantum", "semiclassical")


@dataclass(frozen=True)
class PhysicalParams:
    """Drive and cavity parameters of a Kerr Fabry-Perot cavity.

    In ``semiclassical`` mode the input linewidth ``kappa_s`` is forced to
    zero (monochromatic coherent drive) and the Kerr shift enters the
    nonlinear detuning without the factor 2 of the quantum theory.
    """

    delta0: float
    delta1: float
    kappa_in: float
    kappa_out: float = 0.0
    kappa_abs: float = 0.0
    kappa_s: float = 0.0
    p_in: float = 0.0
    mode: Mode = "quantum"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        for name in ("delta0", "delta1", "kappa_in", "kappa_out", "kappa_abs", "kappa_s", "p_in"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.kappa_in <= 0.0:
            raise InvalidParameterError(f"kappa_in must be > 0, got {self.kappa_in}")
        for name in ("kappa_out", "kappa_abs", "kappa_s", "p_in"):
            if getattr(self, name) < 0.0:
                raise InvalidParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.mode == "semiclassical":
            object.__setattr__(self, "kappa_s", 0.0)

    @property
    def kappa_cav(self) -> float:
        return self.kappa_in + self.kappa_out + self.kappa_abs

    @property
    def p_eff(self) -> float:
        return self.kappa_in / self.kappa_cav * self.p_in

    def with_p_eff(self, p_eff: float) -> "PhysicalParams":
        """Copy with ``p_in`` chosen so that the effective drive equals ``p_eff``."""
        return replace(self, p_in=p_eff * self.kappa_cav / self.kappa_in)

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "delta0": self.delta0,
            "delta1": self.delta1,
            "kappa_in": self.kappa_in,
            "kappa_out": self.kappa_out,
            "kappa_abs": self.kappa_abs,
            "kappa_s": self.kappa_s,
            "p_in": self.p_in,
        }


@dataclass(frozen=True)
class DerivedRates:
    kappa_cav: float
    kappa_eff: float
    p_eff: float


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless drive ``Y``, detuning ``Delta0`` and nonlinearity ``Delta1``."""

    Y: float
    Delta0: float
    Delta1: float
    # rate used for the normalization: kappa_eff (quantum) or kappa_cav (semiclassical)
    kappa_norm: float = field(default=1.0, compare=False)

    def power_from_y(self, y: float) -> float:
        """Effective drive power corresponding to a dimensionless drive ``y``."""
        return self.kappa_norm * y / 2.0


def derive_rates(p: PhysicalParams) -> DerivedRates:
    """Total decay, effective width and effective drive of the cavity."""
    if p.kappa_in <= 0.0:
        raise InvalidParameterError("kappa_in must be > 0")
    for name in ("kappa_out", "kappa_abs", "kappa_s", "p_in"):
        if getattr(p, name) < 0.0:
            raise InvalidParameterError(f"{name} must be >= 0")
    kappa_cav = p.kappa_in + p.kappa_out + p.kappa_abs
    return DerivedRates(
        kappa_cav=kappa_cav,
        kappa_eff=p.kappa_s + kappa_cav,
        p_eff=(p.kappa_in / kappa_cav) * p.p_in,
    )


def kerr_factor(p: PhysicalParams) -> float:
    """Multiplier of delta1 in the nonlinear detuning: 2 (quantum) or 1 (semiclassical)."""
    return 2.0 if p.mode == "quantum" else 1.0


def normalize(p: PhysicalParams) -> NormalizedParams:
    rates = derive_rates(p)
    # semiclassical: kappa_s is already 0, so kappa_eff == kappa_cav
    kappa = rates.kappa_eff if p.mode == "quantum" else rates.kappa_cav
    return NormalizedParams(
        Y=2.0 * rates.p_eff / kappa,
        Delta0=p.delta0 / kappa,
        Delta1=kerr_factor(p) * p.delta1 / kappa,
        kappa_norm=kappa,
    )


def nonlinear_detuning(p: PhysicalParams, n):
    """Cavity-drive detuning shifted by ``n`` photons of Kerr feedback."""
    if np.any(np.asarray(n) < 0):
        raise InvalidParameterError("photon number must be >= 0")
    return p.delta0 - kerr_factor(p) * p.delta1 * n


def to_normalized_units(p: PhysicalParams) -> PhysicalParams:
    """Rescale every rate and power so that ``kappa_cav == 1``."""
    s = p.kappa_cav
    return replace(
        p,
        delta0=p.delta0 / s,
        delta1=p.delta1 / s,
        kappa_in=p.kappa_in / s,
        kappa_out=p.kappa_out / s,
        kappa_abs=p.kappa_abs / s,
        kappa_s=p.kappa_s / s,
        p_in=p.p_in / s,
    )
