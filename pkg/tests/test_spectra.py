import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrfpi import spectra
from kerrfpi.errors import ConfigurationError, InvalidParameterError, MonochromaticInputError, QuadratureError
from kerrfpi.params import PhysicalParams
from kerrfpi.stationary import stationary_photon_numbers

REF = PhysicalParams(delta0=4.4, delta1=1.8, kappa_in=0.5, kappa_out=0.5, kappa_s=1.0).with_p_eff(1.3)
SINGLE = REF.replace(kappa_in=1.0, kappa_out=0.0)


def stable_states(p):
    return [s for s in stationary_photon_numbers(p) if s.stable]


def test_lorentz_rejects_nonpositive_width():
    with pytest.raises(InvalidParameterError):
        spectra.lorentz(0.0, 0.0)


def test_monochromatic_drive_has_no_density():
    p = REF.replace(mode="semiclassical")
    with pytest.raises(MonochromaticInputError):
        spectra.input_spectrum(0.0, p)
    with pytest.raises(MonochromaticInputError):
        spectra.cavity_spectrum(0.0, p, 0.5)
    with pytest.raises(MonochromaticInputError):
        spectra.photon_fluct_density(0.0, p, 0.5)
    # integrated photon number stays available
    n = stable_states(p)[0].n
    assert spectra.mean_photon_number(p, n) == pytest.approx(n, rel=1e-12)


def test_mean_photon_number_closed_form_at_stationary_states():
    for s in stationary_photon_numbers(REF):
        assert spectra.mean_photon_number(REF, s.n) == pytest.approx(s.n, rel=1e-12)


def test_output_spectrum_is_zero_without_output_mirror():
    p = REF.replace(kappa_out=0.0, kappa_abs=0.5)
    n = stationary_photon_numbers(p)[0].n
    assert np.all(spectra.output_spectrum(np.linspace(-5, 5, 11), p, n) == 0.0)


@pytest.mark.parametrize("kind,expected", [("input_power", 2.6), ("commutator", 1.0)])
def test_spectrum_totals(kind, expected):
    s = stable_states(REF)[0]
    sp = spectra.spectrum(kind, np.linspace(-5, 5, 21), REF, s.n)
    assert sp.total == pytest.approx(expected, rel=1e-8)
    assert sp.values.shape == (21,)


def test_cavity_and_output_totals():
    for s in stable_states(REF):
        cav = spectra.spectrum("cavity_field", np.linspace(-5, 5, 5), REF, s.n)
        out = spectra.spectrum("output_power", np.linspace(-5, 5, 5), REF, s.n)
        assert cav.total == pytest.approx(s.n, rel=1e-8)
        assert out.total == pytest.approx(2 * REF.kappa_out * s.n, rel=1e-8)


def test_grid_must_increase():
    with pytest.raises(InvalidParameterError):
        spectra.spectrum("cavity_field", [0.0, 0.0, 1.0], REF, 0.4)


def test_fluct_density_is_even():
    n = stable_states(REF)[1].n
    for w in (0.3, 1.7, 6.0):
        a = spectra.photon_fluct_density(w, REF, n)
        b = spectra.photon_fluct_density(-w, REF, n)
        assert a == pytest.approx(b, rel=1e-8)


def test_fluct_spectrum_with_total():
    n = stable_states(REF)[0].n
    sp = spectra.photon_fluct_spectrum(np.linspace(-2, 2, 5), REF, n, with_total=True)
    assert sp.total == pytest.approx(n * (n + 1), rel=1e-6)
    assert np.all(sp.values > 0)


def test_default_grid_covers_both_lines():
    n = stable_states(REF)[0].n
    g = spectra.default_grid(REF, n, num=11)
    assert g[0] < min(0.0, 4.4 - 3.6 * n) and g[-1] > 4.4 - 3.6 * n


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_quadrature_error_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        spectra.integrate_line(lambda w: math.sin(50 * w) / (1 + w * w) ** 0.1, (0.0,), 1.0, rtol=1e-12)
    assert math.isfinite(info.value.estimate)


def test_closure_requires_single_mirror():
    with pytest.raises(ConfigurationError):
        spectra.assemble_full_spectrum(0.0, REF, 0.4)


def test_closure_identity_and_mirror_relation():
    w = np.linspace(-30, 30, 601)
    for s in stable_states(SINGLE):
        cav = spectra.cavity_spectrum(w, SINGLE, s.n)
        np.testing.assert_allclose(spectra.assemble_full_spectrum(w, SINGLE, s.n), cav, rtol=1e-9)
        pin = spectra.input_spectrum(w, SINGLE)
        np.testing.assert_allclose(spectra.implied_output_spectrum(w, SINGLE, s.n), pin, rtol=1e-9)
        np.testing.assert_allclose(spectra.mirror_output_spectrum(w, SINGLE, s.n), pin, rtol=1e-9)


pos = st.floats(0.05, 5.0, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(pos, pos, st.floats(-8, 8), st.floats(0.05, 3.0), st.floats(0.0, 4.0))
def test_cavity_spectrum_integrates_to_closed_form(ki, ks, d0, d1, n):
    p = PhysicalParams(delta0=d0, delta1=d1, kappa_in=ki, kappa_s=ks, p_in=1.0)
    dn = d0 - 2 * d1 * n
    total, _ = spectra.spectral_total(lambda w: float(spectra.cavity_spectrum(w, p, n)), (0.0, dn),
                                      min(ki, ks), rtol=1e-10)
    assert total == pytest.approx(spectra.mean_photon_number(p, n), rel=1e-7)
