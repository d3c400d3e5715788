import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrfpi import feasibility as fz
from kerrfpi.errors import InvalidParameterError
from kerrfpi.oracle import n2_per_photon_cgs

LAM, N0 = 1.55e-6, 3.3


def semiconductor(tilde_n2=1e-6, Q=1e3):
    return fz.KerrMediumSpec.from_cm2_per_kw(tilde_n2, N0, LAM, Q=Q)


def test_unit_conversions_round_trip():
    assert fz.si_to_cm2_per_kw(fz.cm2_per_kw_to_si(3.7e-6)) == pytest.approx(3.7e-6)
    assert fz.cm2_per_w_to_si(1.0) == 1e-4
    assert fz.cm2_per_kw_to_si(1.0) == 1e-7


def test_default_volume_is_half_wavelength_cube():
    spec = semiconductor()
    assert spec.V == pytest.approx((LAM / (2 * N0)) ** 3)
    assert spec.cavity_length == pytest.approx(LAM / (2 * N0))


def test_min_tilde_n2_value():
    # hbar-based value for the semiconductor half-wavelength cube at Q = 1e3
    assert fz.si_to_cm2_per_kw(fz.min_tilde_n2(semiconductor())) == pytest.approx(5.839e-6, rel=1e-3)


def test_margin_is_ratio_to_minimum():
    spec = semiconductor(tilde_n2=2e-5)
    res = fz.bistability_feasible(spec)
    assert res.margin == pytest.approx(spec.tilde_n2 / fz.min_tilde_n2(spec), rel=1e-12)
    assert res.feasible


def test_higher_q_makes_glass_level_nonlinearity_feasible():
    assert not fz.bistability_feasible(semiconductor(Q=1e3)).feasible
    assert fz.bistability_feasible(semiconductor(Q=1e4)).feasible


def test_negative_nonlinearity_flips_detuning_sign():
    res = fz.bistability_feasible(semiconductor(tilde_n2=-1e-4))
    assert res.detuning_sign == -1 and res.feasible


def test_delta1_and_width_consistency():
    spec = semiconductor()
    # bistability needs 2 delta1 n >= sqrt(3) kappa_eff ... margin expresses exactly this ratio
    ratio = 2 * fz.kerr_delta1(spec) / (math.sqrt(3) * spec.kappa_eff)
    assert ratio == pytest.approx(fz.bistability_feasible(spec).margin, rel=1e-12)


def test_mode_frequency_shift_and_warning():
    spec = semiconductor()
    assert fz.mode_frequency(spec, 1.0) < spec.omega0
    huge = fz.KerrMediumSpec.from_cm2_per_kw(1e3, N0, LAM)
    with pytest.warns(RuntimeWarning):
        fz.mode_frequency(huge, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        fz.mode_frequency(spec, 1.0)


@pytest.mark.parametrize(
    "kw",
    [dict(n0=1.0), dict(lambda0=0.0), dict(V=0.0), dict(V=1e-40), dict(Q=0.0), dict(m=0), dict(m=1.5)],
)
def test_invalid_media(kw):
    base = dict(tilde_n2=1e-13, n0=N0, lambda0=LAM, V=1e-20, Q=1e3, m=1)
    base.update(kw)
    with pytest.raises(InvalidParameterError):
        fz.KerrMediumSpec(**base)


def test_photon_number_must_be_positive():
    with pytest.raises(InvalidParameterError):
        fz.bistability_feasible(semiconductor(), 0.0)


@given(st.floats(1.05, 4.0), st.floats(0.3e-6, 3e-6), st.floats(0.1, 100.0), st.floats(1e-8, 1e-2))
def test_si_and_gaussian_paths_agree(n0, lam, vscale, tilde_cm2_w):
    V = vscale * (lam / (2 * n0)) ** 3
    spec = fz.KerrMediumSpec(fz.cm2_per_w_to_si(tilde_cm2_w), n0, lam, V, 1e3)
    assert fz.n2_per_photon(spec) == pytest.approx(n2_per_photon_cgs(tilde_cm2_w, n0, lam, V), rel=1e-12)
