"""Hot numeric loops behind the brute-force oracles.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical signature and results. The numba path is used
when numba imports and ``KERRFPI_DISABLE_NUMBA`` is unset (or ``0``);
``select_backend`` switches at runtime, which the tests and the
benchmark use to compare the two.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

ENV_FLAG = "KERRFPI_DISABLE_NUMBA"

REFINE_POINTS = 33
REFINE_LEVELS = 14
MAX_ROOTS = 3


def _env_disables_numba() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------


def _cubic_residual(n, Y, D0, D1):
    u = D0 - n * D1
    return n * (1.0 + u * u) - Y


def _bisect_np(a, b, fa, Y, D0, D1, xtol):
    """Vectorized bisection of brackets [a, b] with f(a) = fa."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = np.array(fa, dtype=float)
    for _ in range(200):
        if a.size == 0 or np.all(b - a <= xtol * np.maximum(1.0, np.abs(a))):
            break
        m = 0.5 * (a + b)
        fm = _cubic_residual(m, Y, D0, D1)
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, m, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, m)
    return 0.5 * (a + b)


def _refine_hidden_np(a, b, Y, D0, D1, xtol):
    """Zoom into a local minimum of |f| looking for a narrowly separated root pair."""
    for _ in range(REFINE_LEVELS):
        x = np.linspace(a, b, REFINE_POINTS)
        f = _cubic_residual(x, Y, D0, D1)
        zeros = x[f == 0.0]
        if zeros.size:
            return list(zeros)
        change = np.nonzero(np.sign(f[:-1]) != np.sign(f[1:]))[0]
        if change.size:
            return list(_bisect_np(x[change], x[change + 1], f[change], Y, D0, D1, xtol))
        j = int(np.argmin(np.abs(f)))
        if j == 0 or j == REFINE_POINTS - 1:
            return []
        a, b = x[j - 1], x[j + 1]
    return []


def _merge_sorted(roots, out, row):
    """Sort, merge near-duplicates and store at most MAX_ROOTS roots in ``out[row]``."""
    roots = sorted(roots)
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= 1e-9 * max(1.0, abs(r)):
            continue
        merged.append(r)
    count = min(len(merged), MAX_ROOTS)
    out[row, :count] = merged[:count]
    return len(merged)


def scan_roots_numpy(Y, D0, D1, n_max, grid_points, xtol):
    Y = np.asarray(Y, dtype=float)
    D0 = np.asarray(D0, dtype=float)
    D1 = np.asarray(D1, dtype=float)
    n_max = np.asarray(n_max, dtype=float)
    N = Y.shape[0]
    roots = np.full((N, MAX_ROOTS), np.nan)
    counts = np.zeros(N, dtype=np.int64)
    coarse = np.zeros(N, dtype=np.bool_)
    for i in range(N):
        y, d0, d1 = Y[i], D0[i], D1[i]
        x = np.linspace(0.0, n_max[i], grid_points)
        f = _cubic_residual(x, y, d0, d1)
        found = list(x[f == 0.0])
        sa, sb = np.sign(f[:-1]), np.sign(f[1:])
        change = np.nonzero((sa * sb) < 0)[0]
        if change.size:
            found.extend(_bisect_np(x[change], x[change + 1], f[change], y, d0, d1, xtol))
            if np.any(np.diff(change) == 1):
                coarse[i] = True
        af = np.abs(f)
        s = np.sign(f)
        mid = np.arange(1, grid_points - 1)
        hidden = mid[
            (s[mid - 1] == s[mid]) & (s[mid] == s[mid + 1]) & (s[mid] != 0)
            & (af[mid] < af[mid - 1]) & (af[mid] <= af[mid + 1])
        ]
        for k in hidden:
            found.extend(_refine_hidden_np(x[k - 1], x[k + 1], y, d0, d1, xtol))
        counts[i] = _merge_sorted(found, roots, i)
    return roots, counts, coarse


def fixed_point_numpy(Y, D0, D1, n_start, eta, tol, max_iter):
    Y = np.asarray(Y, dtype=float)
    D0 = np.asarray(D0, dtype=float)
    D1 = np.asarray(D1, dtype=float)
    eta = np.broadcast_to(np.asarray(eta, dtype=float), Y.shape)
    n = np.array(n_start, dtype=float, copy=True)
    iters = np.zeros(Y.shape, dtype=np.int64)
    converged = np.zeros(Y.shape, dtype=np.bool_)
    active = np.arange(Y.shape[0])
    for it in range(1, max_iter + 1):
        if active.size == 0:
            break
        na = n[active]
        u = D0[active] - D1[active] * na
        step = eta[active] * (Y[active] / (1.0 + u * u) - na)
        n[active] = na + step
        iters[active] = it
        done = np.abs(step) < tol
        converged[active[done]] = True
        active = active[~done]
    return n, iters, converged


def fluct_riemann_numpy(omega, w0, h, m, amp, ks, dn, kc):
    """Fixed-grid convolution estimate of the photon-number fluctuation density."""
    w = w0 + h * np.arange(m)

    def cav(x):
        return amp / ((x * x + ks * ks) * ((dn - x) ** 2 + kc * kc))

    nw = cav(w)
    cw = 2.0 * kc / ((dn - w) ** 2 + kc * kc)
    out = np.empty(len(omega))
    for j, om in enumerate(np.asarray(omega, dtype=float)):
        s = cav(w + om) * nw + 0.5 * (cav(w + om) + cav(w - om)) * cw
        out[j] = s.sum() * h / (2.0 * math.pi)
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _res_nb(n, Y, D0, D1):
        u = D0 - n * D1
        return n * (1.0 + u * u) - Y

    @njit(cache=True)
    def _bisect_nb(a, b, fa, Y, D0, D1, xtol):
        for _ in range(200):
            if b - a <= xtol * max(1.0, abs(a)):
                break
            m = 0.5 * (a + b)
            fm = _res_nb(m, Y, D0, D1)
            if (fm > 0.0) == (fa > 0.0) and fm != 0.0:
                a = m
                fa = fm
            elif fm == 0.0:
                return m
            else:
                b = m
        return 0.5 * (a + b)

    @njit(cache=True)
    def _sgn(v):
        if v > 0.0:
            return 1
        if v < 0.0:
            return -1
        return 0

    @njit(cache=True)
    def _refine_hidden_nb(a, b, Y, D0, D1, xtol, buf, nbuf):
        x = np.empty(REFINE_POINTS)
        f = np.empty(REFINE_POINTS)
        for _ in range(REFINE_LEVELS):
            for j in range(REFINE_POINTS):
                x[j] = a + (b - a) * j / (REFINE_POINTS - 1)
                f[j] = _res_nb(x[j], Y, D0, D1)
            hit = False
            for j in range(REFINE_POINTS):
                if f[j] == 0.0 and nbuf < buf.shape[0]:
                    buf[nbuf] = x[j]
                    nbuf += 1
                    hit = True
            for j in range(REFINE_POINTS - 1):
                if _sgn(f[j]) * _sgn(f[j + 1]) < 0 and nbuf < buf.shape[0]:
                    buf[nbuf] = _bisect_nb(x[j], x[j + 1], f[j], Y, D0, D1, xtol)
                    nbuf += 1
                    hit = True
            if hit:
                return nbuf
            jmin = 0
            for j in range(1, REFINE_POINTS):
                if abs(f[j]) < abs(f[jmin]):
                    jmin = j
            if jmin == 0 or jmin == REFINE_POINTS - 1:
                return nbuf
            a = x[jmin - 1]
            b = x[jmin + 1]
        return nbuf

    @njit(cache=True)
    def _scan_one_nb(y, d0, d1, nmax, grid_points, xtol, buf):
        nbuf = 0
        coarse = False
        h = nmax / (grid_points - 1)
        f_prev2 = 0.0
        f_prev = _res_nb(0.0, y, d0, d1)
        if f_prev == 0.0:
            buf[nbuf] = 0.0
            nbuf += 1
        last_change = -2
        for k in range(1, grid_points):
            xk = h * k
            fk = _res_nb(xk, y, d0, d1)
            if fk == 0.0 and nbuf < buf.shape[0]:
                buf[nbuf] = xk
                nbuf += 1
            if _sgn(f_prev) * _sgn(fk) < 0 and nbuf < buf.shape[0]:
                buf[nbuf] = _bisect_nb(xk - h, xk, f_prev, y, d0, d1, xtol)
                nbuf += 1
                if last_change == k - 1:
                    coarse = True
                last_change = k
            if k >= 2:
                s0 = _sgn(f_prev2)
                if (s0 != 0 and s0 == _sgn(f_prev) and s0 == _sgn(fk)
                        and abs(f_prev) < abs(f_prev2) and abs(f_prev) <= abs(fk)):
                    nbuf = _refine_hidden_nb(xk - 2 * h, xk, y, d0, d1, xtol, buf, nbuf)
            f_prev2 = f_prev
            f_prev = fk
        return nbuf, coarse

    @njit(cache=True)
    def scan_roots_numba(Y, D0, D1, n_max, grid_points, xtol):
        N = Y.shape[0]
        roots = np.full((N, MAX_ROOTS), np.nan)
        counts = np.zeros(N, dtype=np.int64)
        coarse = np.zeros(N, dtype=np.bool_)
        buf = np.empty(16)
        for i in range(N):
            nbuf, c = _scan_one_nb(Y[i], D0[i], D1[i], n_max[i], grid_points, xtol, buf)
            coarse[i] = c
            vals = np.sort(buf[:nbuf])
            cnt = 0
            last = 0.0
            for j in range(nbuf):
                r = vals[j]
                if cnt > 0 and abs(r - last) <= 1e-9 * max(1.0, abs(r)):
                    continue
                if cnt < MAX_ROOTS:
                    roots[i, cnt] = r
                cnt += 1
                last = r
            counts[i] = cnt
        return roots, counts, coarse

    @njit(cache=True)
    def fixed_point_numba(Y, D0, D1, n_start, eta, tol, max_iter):
        N = Y.shape[0]
        n_out = np.empty(N)
        iters = np.zeros(N, dtype=np.int64)
        converged = np.zeros(N, dtype=np.bool_)
        for i in range(N):
            n = n_start[i]
            y, d0, d1, e = Y[i], D0[i], D1[i], eta[i]
            for it in range(1, max_iter + 1):
                u = d0 - d1 * n
                step = e * (y / (1.0 + u * u) - n)
                n += step
                iters[i] = it
                if abs(step) < tol:
                    converged[i] = True
                    break
            n_out[i] = n
        return n_out, iters, converged

    @njit(cache=True)
    def fluct_riemann_numba(omega, w0, h, m, amp, ks, dn, kc):
        out = np.empty(omega.shape[0])
        for j in range(omega.shape[0]):
            om = omega[j]
            s = 0.0
            for k in range(m):
                w = w0 + h * k
                nw = amp / ((w * w + ks * ks) * ((dn - w) ** 2 + kc * kc))
                a = w + om
                na = amp / ((a * a + ks * ks) * ((dn - a) ** 2 + kc * kc))
                b = w - om
                nb_ = amp / ((b * b + ks * ks) * ((dn - b) ** 2 + kc * kc))
                cw = 2.0 * kc / ((dn - w) ** 2 + kc * kc)
                s += na * nw + 0.5 * (na + nb_) * cw
            out[j] = s * h / (2.0 * math.pi)
        return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_BACKEND = "numba" if HAVE_NUMBA and not _env_disables_numba() else "numpy"


def backend() -> str:
    return _BACKEND


def select_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not importable")
    _BACKEND = name


def scan_roots(Y, D0, D1, n_max, grid_points, xtol=1e-12):
    """Grid scan plus bisection for all roots of n(1+(D0-n D1)^2) = Y per row."""
    args = (
        np.ascontiguousarray(Y, dtype=np.float64),
        np.ascontiguousarray(D0, dtype=np.float64),
        np.ascontiguousarray(D1, dtype=np.float64),
        np.ascontiguousarray(n_max, dtype=np.float64),
        int(grid_points),
        float(xtol),
    )
    if _BACKEND == "numba":
        return scan_roots_numba(*args)
    return scan_roots_numpy(*args)


def fixed_point(Y, D0, D1, n_start, eta, tol=1e-10, max_iter=100_000):
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    eta = np.ascontiguousarray(np.broadcast_to(np.asarray(eta, dtype=np.float64), Y.shape))
    args = (
        Y,
        np.ascontiguousarray(D0, dtype=np.float64),
        np.ascontiguousarray(D1, dtype=np.float64),
        np.ascontiguousarray(np.broadcast_to(np.asarray(n_start, dtype=np.float64), Y.shape)),
        eta,
        float(tol),
        int(max_iter),
    )
    if _BACKEND == "numba":
        return fixed_point_numba(*args)
    return fixed_point_numpy(*args)


def fluct_riemann(omega, w0, h, m, amp, ks, dn, kc):
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    args = (omega, float(w0), float(h), int(m), float(amp), float(ks), float(dn), float(kc))
    if _BACKEND == "numba":
        return fluct_riemann_numba(*args)
    return fluct_riemann_numpy(*args)
