import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kerrfpi.errors import InvalidParameterError
from kerrfpi.params import (
    PhysicalParams,
    derive_rates,
    kerr_factor,
    nonlinear_detuning,
    normalize,
    to_normalized_units,
)


def reference(**kw):
    base = dict(delta0=4.4, delta1=1.8, kappa_in=0.5, kappa_out=0.5, kappa_s=1.0)
    base.update(kw)
    return PhysicalParams(**base).with_p_eff(1.3)


def test_derived_rates_at_reference():
    r = derive_rates(reference())
    assert r.kappa_cav == 1.0
    assert r.kappa_eff == 2.0
    assert r.p_eff == pytest.approx(1.3)


def test_normalized_quantum():
    np_ = normalize(reference())
    assert np_.Y == pytest.approx(1.3)
    assert np_.Delta0 == pytest.approx(2.2)
    assert np_.Delta1 == pytest.approx(1.8)
    assert np_.kappa_norm == 2.0


def test_semiclassical_drops_linewidth_and_factor_two():
    p = reference(mode="semiclassical")
    assert p.kappa_s == 0.0
    assert kerr_factor(p) == 1.0
    np_ = normalize(p)
    assert np_.Y == pytest.approx(2.6)
    assert np_.Delta0 == pytest.approx(4.4)
    assert np_.Delta1 == pytest.approx(1.8)


def test_absorption_reduces_effective_drive():
    p = PhysicalParams(delta0=0, delta1=1, kappa_in=0.5, kappa_abs=0.5, p_in=2.0)
    assert p.p_eff == pytest.approx(1.0)


@pytest.mark.parametrize(
    "kw",
    [
        dict(kappa_in=0.0),
        dict(kappa_in=-1.0),
        dict(kappa_out=-0.1),
        dict(kappa_abs=-0.1),
        dict(kappa_s=-1.0),
        dict(p_in=-1.0),
        dict(delta0=math.nan),
        dict(delta1=math.inf),
        dict(mode="classical"),
    ],
)
def test_invalid_parameters(kw):
    base = dict(delta0=1.0, delta1=1.0, kappa_in=1.0)
    base.update(kw)
    with pytest.raises(InvalidParameterError):
        PhysicalParams(**base)


def test_nonlinear_detuning():
    p = reference()
    assert nonlinear_detuning(p, 0.0) == 4.4
    assert nonlinear_detuning(p, 1.0) == pytest.approx(4.4 - 3.6)
    assert nonlinear_detuning(reference(mode="semiclassical"), 1.0) == pytest.approx(4.4 - 1.8)
    with pytest.raises(InvalidParameterError):
        nonlinear_detuning(p, -0.1)


def test_with_p_eff_round_trip():
    p = PhysicalParams(delta0=1, delta1=1, kappa_in=0.3, kappa_out=0.2, kappa_abs=0.1)
    assert p.with_p_eff(0.7).p_eff == pytest.approx(0.7)


rates = st.floats(0.01, 100.0)


@given(rates, rates, rates, rates, st.floats(-50, 50), st.floats(-10, 10), st.floats(0, 50))
def test_normalization_is_scale_free(ki, ko, ka, ks, d0, d1, p_in):
    p = PhysicalParams(delta0=d0, delta1=d1, kappa_in=ki, kappa_out=ko, kappa_abs=ka, kappa_s=ks, p_in=p_in)
    a, b = normalize(p), normalize(to_normalized_units(p))
    assert b.Y == pytest.approx(a.Y, rel=1e-12, abs=1e-300)
    assert b.Delta0 == pytest.approx(a.Delta0, rel=1e-12, abs=1e-300)
    assert b.Delta1 == pytest.approx(a.Delta1, rel=1e-12, abs=1e-300)
    assert to_normalized_units(p).kappa_cav == pytest.approx(1.0)
