"""The oracle battery behind ``kerrfpi selfcheck``.

Each check compares a closed-form or production routine against an
independent route and returns an ``OracleReport``. Tolerances live in
``TOLERANCES`` so reports and tests share one table.
"""

from __future__ import annotations

import math

import numpy as np

from . import feasibility, oracle, spectra
from .oracle import OracleReport
from .params import NormalizedParams, PhysicalParams, nonlinear_detuning
from .stationary import (
    SQRT3,
    bistability_boundary,
    onset_power,
    solve_normalized,
    stationary_photon_numbers,
)
from .sweep import sweep

TOLERANCES = {
    "roots_vs_scan": 1e-8,
    "fixed_point_vs_stable": 1e-8,
    "threshold_flag": 0.0,
    "lorentz_normalization": 1e-10,
    "lorentz_convolution": 1e-8,
    "spectral_totals": 1e-6,
    "commutator_total": 1e-9,
    "fluct_density_vs_riemann": 1e-6,
    "closure_identity": 1e-9,
    "onset_power": 1e-3,
    "feasibility_units": 1e-12,
}

# reference point with two coexisting stable states
REFERENCE = PhysicalParams(delta0=4.4, delta1=1.8, kappa_in=0.5, kappa_out=0.5, kappa_s=1.0).with_p_eff(1.3)


def random_normalized(rng: np.random.Generator, draws: int):
    """Draws with Delta0 in [-6, 6], Delta1 in [-4, 4] minus zero, Y in [0, 20]."""
    D0 = rng.uniform(-6.0, 6.0, draws)
    D1 = rng.uniform(-4.0, 4.0, draws)
    D1 = np.where(np.abs(D1) < 1e-6, 1e-6, D1)
    Y = rng.uniform(0.0, 20.0, draws)
    return Y, D0, D1


def check_roots(seed: int = 0, draws: int = 10_000, grid_points: int = oracle.DEFAULT_GRID_POINTS) -> OracleReport:
    rng = np.random.default_rng(seed)
    Y, D0, D1 = random_normalized(rng, draws)
    scanned, counts, _ = oracle.root_scan_batch(Y, D0, D1, grid_points=grid_points)
    worst_abs = worst_rel = 0.0
    mismatched = 0
    for i in range(draws):
        exact = [s.n for s in solve_normalized(NormalizedParams(Y[i], D0[i], D1[i], 1.0))]
        got = list(scanned[i, : counts[i]])
        if len(got) != len(exact):
            mismatched += 1
            continue
        for a, b in zip(exact, got):
            d = abs(a - b)
            worst_abs = max(worst_abs, d)
            worst_rel = max(worst_rel, d / max(abs(a), 1e-300))
    tol = TOLERANCES["roots_vs_scan"]
    ok = mismatched == 0 and worst_abs < tol
    return OracleReport("roots_vs_scan", worst_abs, worst_rel, draws, ok, tol, seed,
                        f"root-count mismatches: {mismatched}")


def check_fixed_point(seed: int = 0, draws: int = 10_000, tol_iter: float = 1e-13,
                      max_iter: int = 2_000_000) -> OracleReport:
    """Damped iteration from n=0 and n=Y must land on a stable root."""
    rng = np.random.default_rng(seed + 1)
    Y, D0, D1 = random_normalized(rng, draws)
    worst_abs = worst_rel = 0.0
    unconverged = 0
    for start in (np.zeros(draws), Y.copy()):
        limits, _, conv = oracle.fixed_point_batch(Y, D0, D1, start, tol=tol_iter, max_iter=max_iter)
        for i in range(draws):
            if not conv[i]:
                unconverged += 1
                continue
            stable = [s.n for s in solve_normalized(NormalizedParams(Y[i], D0[i], D1[i], 1.0))
                      if s.stable or s.marginal]
            d = min(abs(limits[i] - s) for s in stable)
            worst_abs = max(worst_abs, d)
            worst_rel = max(worst_rel, d / max(abs(limits[i]), 1e-300))
    tol = TOLERANCES["fixed_point_vs_stable"]
    ok = worst_abs < tol
    return OracleReport("fixed_point_vs_stable", worst_abs, worst_rel, 2 * draws, ok, tol, seed + 1,
                        f"runs without a limit (divergence reports): {unconverged}")


def check_threshold(seed: int = 0, draws: int = 10_000) -> OracleReport:
    """Existence flag against |delta0| >= sqrt(3) kappa_eff, including draws a few ulps from the edge.

    Detuning and Kerr coefficient share a sign in every draw; the flag is
    false for opposite signs regardless of magnitude.
    """
    rng = np.random.default_rng(seed + 2)
    eps = np.finfo(float).eps
    wrong = 0
    for _ in range(draws):
        kappa_in, kappa_s = rng.uniform(0.05, 3.0, 2)
        kappa_eff = kappa_in + kappa_s
        sign = rng.choice([-1.0, 1.0])
        if rng.random() < 0.2:
            ratio = SQRT3 * (1.0 + int(rng.integers(-64, 65)) * eps)
        else:
            ratio = rng.uniform(0.0, 4.0)
        p = PhysicalParams(delta0=sign * ratio * kappa_eff, delta1=sign * rng.uniform(0.05, 4.0),
                           kappa_in=kappa_in, kappa_s=kappa_s)
        exists = bistability_boundary(p).exists
        expected = abs(p.delta0) >= SQRT3 * kappa_eff
        if exists != expected and abs(abs(p.delta0) / kappa_eff - SQRT3) > 8.0 * eps * SQRT3:
            wrong += 1
    return OracleReport("threshold_flag", float(wrong), float(wrong) / draws, draws, wrong == 0,
                        TOLERANCES["threshold_flag"], seed + 2,
                        "count of flags disagreeing beyond 8 ulp of the threshold")


def check_lorentz() -> list[OracleReport]:
    reports = []
    worst = 0.0
    for kappa in (0.01, 0.3, 1.0, 7.5):
        val, _ = oracle.quad_reference(lambda w: spectra.lorentz(w, kappa) / (2 * math.pi),
                                       (-math.inf, math.inf), tol=1e-12, scale=kappa)
        worst = max(worst, abs(val - 1.0))
    tol = TOLERANCES["lorentz_normalization"]
    reports.append(OracleReport("lorentz_normalization", worst, worst, 4, worst < tol, tol))

    worst_abs = worst_rel = 0.0
    cases = [(0.5, 1.0, 0.0), (0.5, 1.0, 3.0), (2.0, 0.1, -4.0), (1.0, 1.0, 10.0), (0.05, 3.0, 0.7)]
    for k1, k2, delta in cases:
        f = lambda w: spectra.lorentz(w, k1) * spectra.lorentz(delta - w, k2) / (2 * math.pi)  # noqa: E731
        val, _ = oracle.quad_reference(f, (-math.inf, math.inf), tol=1e-12, breakpoints=(0.0, delta),
                                       scale=max(k1, k2))
        exact = float(spectra.lorentz(delta, k1 + k2))
        worst_abs = max(worst_abs, abs(val - exact))
        worst_rel = max(worst_rel, abs(val - exact) / exact)
    tol = TOLERANCES["lorentz_convolution"]
    reports.append(OracleReport("lorentz_convolution", worst_abs, worst_rel, len(cases), worst_rel < tol, tol))
    return reports


def check_spectra(p: PhysicalParams = REFERENCE) -> list[OracleReport]:
    states = [s for s in stationary_photon_numbers(p) if s.stable]
    worst_n = worst_c = worst_f = 0.0
    for s in states:
        n = s.n
        dn = float(nonlinear_detuning(p, n))
        width = min(p.kappa_s, p.kappa_cav)
        tot_n, _ = spectra.spectral_total(lambda w: float(spectra.cavity_spectrum(w, p, n)), (0.0, dn), width)
        tot_c, _ = spectra.spectral_total(lambda w: float(spectra.commutator_spectrum(w, p, n)), (dn,), p.kappa_cav,
                                          rtol=1e-12)
        tot_f, _ = spectra.photon_fluct_total(p, n)
        worst_n = max(worst_n, abs(tot_n - n) / n)
        worst_c = max(worst_c, abs(tot_c - 1.0))
        worst_f = max(worst_f, abs(tot_f - n * (n + 1.0)) / (n * (n + 1.0)))
    t1, t2 = TOLERANCES["spectral_totals"], TOLERANCES["commutator_total"]
    return [
        OracleReport("cavity_total", worst_n, worst_n, len(states), worst_n < t1, t1),
        OracleReport("commutator_total", worst_c, worst_c, len(states), worst_c < t2, t2),
        OracleReport("photon_fluct_total", worst_f, worst_f, len(states), worst_f < t1, t1),
    ]


def check_fluct_density(p: PhysicalParams = REFERENCE) -> OracleReport:
    omegas = np.array([-6.0, -2.5, -0.7, 0.0, 0.3, 1.1, 2.0, 4.5, 9.0])
    worst_abs = worst_rel = 0.0
    count = 0
    for s in stationary_photon_numbers(p):
        if not s.stable:
            continue
        ref = oracle.fluct_riemann(omegas, p, s.n)
        for w, r in zip(omegas, ref):
            v = spectra.photon_fluct_density(float(w), p, s.n, rtol=1e-10)
            worst_abs = max(worst_abs, abs(v - r))
            worst_rel = max(worst_rel, abs(v - r) / abs(r))
            count += 1
    tol = TOLERANCES["fluct_density_vs_riemann"]
    return OracleReport("fluct_density_vs_riemann", worst_abs, worst_rel, count, worst_rel < tol, tol)


def check_closure(p: PhysicalParams | None = None, points: int = 2001) -> OracleReport:
    if p is None:
        p = REFERENCE.replace(kappa_in=1.0, kappa_out=0.0)
    worst_abs = worst_rel = 0.0
    for s in stationary_photon_numbers(p):
        if not s.stable:
            continue
        grid = spectra.default_grid(p, s.n, num=points)
        cav = spectra.cavity_spectrum(grid, p, s.n)
        full = spectra.assemble_full_spectrum(grid, p, s.n)
        pin = spectra.input_spectrum(grid, p)
        pout = spectra.implied_output_spectrum(grid, p, s.n)
        for a, b in ((full, cav), (pout, pin)):
            d = np.abs(a - b)
            worst_abs = max(worst_abs, float(d.max()))
            worst_rel = max(worst_rel, float((d / np.abs(b)).max()))
    tol = TOLERANCES["closure_identity"]
    return OracleReport("closure_identity", worst_abs, worst_rel, points, worst_rel < tol, tol)


def check_onset() -> OracleReport:
    base = PhysicalParams(delta0=0.0, delta1=1.8, kappa_in=0.5, kappa_out=0.5, kappa_s=1.0)
    cases = [
        (base, 0.855, 8 * SQRT3 / (9 * 1.8) * (2.0 / (2 * 1.0))),
        (base.replace(mode="semiclassical"), 0.428, 8 * SQRT3 / (9 * 1.8) * 0.5),
    ]
    worst = 0.0
    analytic = 0.0
    for p, quoted, closed in cases:
        val = onset_power(p)
        worst = max(worst, abs(val - quoted))
        analytic = max(analytic, abs(val - closed))
    tol = TOLERANCES["onset_power"]
    return OracleReport("onset_power", worst, worst / 0.428, 2, worst <= tol and analytic < 1e-12, tol,
                        note=f"deviation from closed form: {analytic:.3g}")


def check_feasibility_units() -> OracleReport:
    worst = 0.0
    for lam, n0, vscale in ((1.55e-6, 3.3, 1.0), (0.8e-6, 1.45, 10.0), (1.064e-6, 2.2, 0.5)):
        spec = feasibility.KerrMediumSpec.from_cm2_per_kw(1e-6, n0, lam, vscale * (lam / (2 * n0)) ** 3)
        si = feasibility.n2_per_photon(spec)
        cgs = oracle.n2_per_photon_cgs(1e-9, n0, lam, spec.V)
        worst = max(worst, abs(si - cgs) / abs(cgs))
    tol = TOLERANCES["feasibility_units"]
    return OracleReport("feasibility_units", worst, worst, 3, worst < tol, tol)


def check_hysteresis(p: PhysicalParams = REFERENCE, num: int = 161) -> OracleReport:
    b = bistability_boundary(p)
    grid = np.linspace(0.5 * b.p_minus, 1.5 * b.p_plus, num)
    step = grid[1] - grid[0]
    up = sweep(p, "p_eff", grid, "up")
    down = sweep(p, "p_eff", grid[::-1], "down")
    ok = len(up.jumps) == 1 and len(down.jumps) == 1
    dev = math.inf
    if ok:
        dev = max(abs(up.grid[up.jumps[0].index] - b.p_plus), abs(down.grid[down.jumps[0].index] - b.p_minus))
        ok = dev <= step
    return OracleReport("hysteresis_jumps", dev, dev / step, num, ok, step,
                        note=f"jumps up={len(up.jumps)} down={len(down.jumps)}; tolerance is one grid step")


def run_selfcheck(seed: int = 0, draws: int = 2000, grid_points: int = oracle.DEFAULT_GRID_POINTS) -> list[OracleReport]:
    reports = [
        check_roots(seed, draws, grid_points),
        check_fixed_point(seed, draws),
        check_threshold(seed, draws),
    ]
    reports += check_lorentz()
    reports += check_spectra()
    reports.append(check_fluct_density())
    reports.append(check_closure())
    reports.append(check_onset())
    reports.append(check_feasibility_units())
    reports.append(check_hysteresis())
    return reports
