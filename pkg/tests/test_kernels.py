import subprocess
import sys

import numpy as np
import pytest

from kerrfpi import _kernels, oracle, spectra
from kerrfpi.params import PhysicalParams
from kerrfpi.stationary import stationary_photon_numbers

REF = PhysicalParams(delta0=4.4, delta1=1.8, kappa_in=0.5, kappa_out=0.5, kappa_s=1.0).with_p_eff(1.3)


def draws(n=300, seed=5):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, 20, n), rng.uniform(-6, 6, n), rng.uniform(-4, 4, n)


def test_scan_roots_backend(kernel_backend):
    Y, D0, D1 = draws()
    roots, counts, _ = _kernels.scan_roots(Y, D0, D1, Y + 1.0, 2001)
    assert roots.shape == (300, 3)
    assert np.all((counts == 1) | (counts == 3))
    assert _kernels.backend() == kernel_backend


def test_backends_agree():
    Y, D0, D1 = draws()
    out = {}
    for name in ("numba", "numpy"):
        _kernels.select_backend(name)
        out[name] = (
            _kernels.scan_roots(Y, D0, D1, Y + 1.0, 2001),
            _kernels.fixed_point(Y, D0, D1, np.zeros_like(Y), 1 / (1 + np.abs(Y * D1)), 1e-12, 200_000),
            _kernels.fluct_riemann(np.array([-1.0, 0.0, 2.5]), -200.0, 0.02, 20001, 2.6, 1.0, 0.8, 1.0),
        )
    _kernels.select_backend("numba")
    (ra, ca, _), (fa, ia, va), ga = out["numba"]
    (rb, cb, _), (fb, ib, vb), gb = out["numpy"]
    np.testing.assert_array_equal(ca, cb)
    np.testing.assert_allclose(ra, rb, atol=1e-12, equal_nan=True)
    np.testing.assert_allclose(fa, fb, atol=1e-12)
    np.testing.assert_array_equal(va, vb)
    np.testing.assert_allclose(ga, gb, rtol=1e-12)


def test_riemann_matches_adaptive(kernel_backend):
    n = stationary_photon_numbers(REF)[2].n
    w = np.array([-3.0, 0.0, 1.5])
    ref = oracle.fluct_riemann(w, REF, n)
    got = [spectra.photon_fluct_density(x, REF, n, rtol=1e-11) for x in w]
    np.testing.assert_allclose(got, ref, rtol=1e-8)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.select_backend("cuda")


def test_env_flag_selects_numpy():
    code = "from kerrfpi import _kernels; print(_kernels.backend())"
    env = {"KERRFPI_DISABLE_NUMBA": "1", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
