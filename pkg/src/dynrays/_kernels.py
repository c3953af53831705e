"""Hot loops: orbit classification and exponential-map survival.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy version
with identical semantics.  The numba path is used when numba imports and the
environment variable ``DYNRAYS_NO_NUMBA`` is unset (or ``0``).  Both paths are
importable directly (``*_nb`` / ``*_np``) so tests and the benchmark can
compare them.
"""

import math
import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
    if numba.config.THREADING_LAYER == "default":
        # skip the TBB probe; the installed TBB is too old and warns on every run
        numba.config.THREADING_LAYER = "workqueue"
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DYNRAYS_NO_NUMBA", "0") in ("", "0")

# orbit status codes
ESCAPED = 0
BOUNDED = 1
HIT = 2

# invariant-set codes
INV_NONE = 0
INV_REAL = 1
INV_IMAG = 2
INV_ZERO = 3

# |z| above which the imaginary part no longer fixes the phase of exp(z)
PHASE_LIMIT = 1e12
LOG_HUGE = 700.0


def configure_threads():
    """Apply the ``DYN_THREADS`` cap (0 or unset means numba's default)."""
    if not HAVE_NUMBA:
        return
    try:
        n = int(os.environ.get("DYN_THREADS", "0"))
    except ValueError:
        n = 0
    if n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# escape classification
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _step(x, y, a_re, a_im, b_re, b_im):
        c = math.cos(y)
        s = math.sin(y)
        ur = 0.0
        ui = 0.0
        if a_re != 0.0 or a_im != 0.0:
            e = math.exp(x)
            ur = a_re * (e * c) - a_im * (e * s)
            ui = a_re * (e * s) + a_im * (e * c)
        vr = 0.0
        vi = 0.0
        if b_re != 0.0 or b_im != 0.0:
            ei = math.exp(-x)
            vr = b_re * (ei * c) - b_im * (-(ei * s))
            vi = b_re * (-(ei * s)) + b_im * (ei * c)
        return ur + vr, ui + vi

    @njit(cache=True, parallel=True)
    def escape_orbits_nb(re, im, a_re, a_im, b_re, b_im, n_max, escape_re, eps, invariant):
        n = re.shape[0]
        status = np.empty(n, np.int8)
        inv = np.zeros(n, np.int8)
        steps = np.empty(n, np.int64)
        last_re = np.empty(n)
        last_im = np.empty(n)
        max_re = np.empty(n)
        for i in prange(n):
            x = re[i]
            y = im[i]
            m = 0.0
            st = BOUNDED
            code = INV_NONE
            k = n_max
            for j in range(n_max + 1):
                ax = abs(x)
                if ax > m:
                    m = ax
                if ax > escape_re:
                    st = ESCAPED
                    k = j
                    break
                if invariant:
                    if ax <= eps and abs(y) <= eps:
                        st = HIT
                        code = INV_ZERO
                        k = j
                        break
                    if ax <= eps:
                        st = HIT
                        code = INV_IMAG
                        k = j
                        break
                if j == n_max:
                    break
                x, y = _step(x, y, a_re, a_im, b_re, b_im)
            status[i] = st
            inv[i] = code
            steps[i] = k
            last_re[i] = x
            last_im[i] = y
            max_re[i] = m
        return status, inv, steps, last_re, last_im, max_re


def _step_np(x, y, a_re, a_im, b_re, b_im):
    c = np.cos(y)
    s = np.sin(y)
    ur = ui = vr = vi = 0.0
    if a_re != 0.0 or a_im != 0.0:
        e = np.exp(x)
        ur = a_re * (e * c) - a_im * (e * s)
        ui = a_re * (e * s) + a_im * (e * c)
    if b_re != 0.0 or b_im != 0.0:
        ei = np.exp(-x)
        vr = b_re * (ei * c) - b_im * (-(ei * s))
        vi = b_re * (-(ei * s)) + b_im * (ei * c)
    return ur + vr, ui + vi


def escape_orbits_np(re, im, a_re, a_im, b_re, b_im, n_max, escape_re, eps, invariant):
    n = re.shape[0]
    x = np.array(re, dtype=float)
    y = np.array(im, dtype=float)
    status = np.full(n, BOUNDED, np.int8)
    inv = np.zeros(n, np.int8)
    steps = np.full(n, n_max, np.int64)
    max_re = np.zeros(n)
    active = np.ones(n, bool)
    for j in range(n_max + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ax = np.abs(x[idx])
        max_re[idx] = np.maximum(max_re[idx], ax)
        done = ax > escape_re
        status[idx[done]] = ESCAPED
        steps[idx[done]] = j
        if invariant:
            ay = np.abs(y[idx])
            zero = ~done & (ax <= eps) & (ay <= eps)
            imag = ~done & ~zero & (ax <= eps)
            status[idx[zero | imag]] = HIT
            inv[idx[zero]] = INV_ZERO
            inv[idx[imag]] = INV_IMAG
            steps[idx[zero | imag]] = j
            done = done | zero | imag
        active[idx[done]] = False
        if j == n_max:
            break
        live = idx[~done]
        x[live], y[live] = _step_np(x[live], y[live], a_re, a_im, b_re, b_im)
    return status, inv, steps, x, y, max_re


def escape_orbits(re, im, a_re, a_im, b_re, b_im, n_max, escape_re, eps, invariant):
    """Classify orbits of ``a e^z + b e^-z`` started at ``re + i im``.

    Returns ``(status, invariant_code, steps, last_re, last_im, max_abs_re)``.
    """
    re = np.ascontiguousarray(re, dtype=float)
    im = np.ascontiguousarray(im, dtype=float)
    args = (re, im, float(a_re), float(a_im), float(b_re), float(b_im),
            int(n_max), float(escape_re), float(eps), bool(invariant))
    if USE_NUMBA:
        return escape_orbits_nb(*args)
    return escape_orbits_np(*args)


# ---------------------------------------------------------------------------
# survival of lambda*exp(z) in a right half-plane
# ---------------------------------------------------------------------------
#
# Orbits are tracked as (x, y) while |z| <= PHASE_LIMIT; past that the
# imaginary part cannot fix the next phase modulo 2*pi, so the supplied
# uniform phase for that sample/step is used instead (independence of
# consecutive steps).  Real parts past LOG_HUGE are kept as +inf.

if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def survival_nb(re, im, log_lam, arg_lam, xi, n_steps, phases):
        n = re.shape[0]
        alive_steps = np.zeros(n, np.int64)
        log_xi = math.log(xi)
        for i in prange(n):
            x = re[i]
            y = im[i]
            resolved = math.hypot(x, y) <= PHASE_LIMIT
            k = 0
            for j in range(n_steps):
                if resolved:
                    th = arg_lam + y
                else:
                    th = 2.0 * math.pi * phases[i, j]
                logr = log_lam + x
                c = math.cos(th)
                if not (c > 0.0 and logr + math.log(c) > log_xi):
                    break
                k = j + 1
                if logr <= LOG_HUGE:
                    r = math.exp(logr)
                    x = r * c
                    y = r * math.sin(th)
                    resolved = r <= PHASE_LIMIT
                else:
                    x = math.inf
                    y = math.nan
                    resolved = False
            alive_steps[i] = k
        return alive_steps


def survival_np(re, im, log_lam, arg_lam, xi, n_steps, phases):
    n = re.shape[0]
    x = np.array(re, dtype=float)
    y = np.array(im, dtype=float)
    resolved = np.hypot(x, y) <= PHASE_LIMIT
    alive = np.ones(n, bool)
    alive_steps = np.zeros(n, np.int64)
    log_xi = math.log(xi)
    for j in range(n_steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        th = np.where(resolved[idx], arg_lam + y[idx], 2.0 * np.pi * phases[idx, j])
        logr = log_lam + x[idx]
        c = np.cos(th)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (c > 0.0) & (logr + np.log(np.where(c > 0.0, c, 1.0)) > log_xi)
        alive[idx[~ok]] = False
        sv = idx[ok]
        alive_steps[sv] = j + 1
        logr, th = logr[ok], th[ok]
        small = logr <= LOG_HUGE
        r = np.exp(np.where(small, logr, 0.0))
        x[sv] = np.where(small, r * np.cos(th), np.inf)
        y[sv] = np.where(small, r * np.sin(th), np.nan)
        resolved[sv] = small & (r <= PHASE_LIMIT)
    return alive_steps


def survival(re, im, lam, xi, n_steps, phases):
    """Number of leading iterates of ``lam*exp`` with real part > ``xi``, per sample."""
    re = np.ascontiguousarray(re, dtype=float)
    im = np.ascontiguousarray(im, dtype=float)
    phases = np.ascontiguousarray(phases, dtype=float)
    args = (re, im, math.log(abs(lam)), math.atan2(lam.imag, lam.real),
            float(xi), int(n_steps), phases)
    if USE_NUMBA:
        return survival_nb(*args)
    return survival_np(*args)


# ---------------------------------------------------------------------------
# covering sums: sum over a row of standard squares of |w^2 + c|^(-d/2)
# ---------------------------------------------------------------------------
#
# A row holds the squares with centres w_j = sgn*(j + 1/2)*pi + i v for
# j0 <= j <= j1.  Rows of at most SHORT_ROW terms, and the terms with
# j < ``direct`` of longer rows, are summed exactly.  The rest of a long row
# is the midpoint rule of a smooth function, replaced by its integral
# (Gauss-Legendre panels in log u) plus the first Euler-Maclaurin
# correction; the next correction is below 1e-12 relative for u > direct*pi.

GL_PANEL = 1.0  # panel width in log u; singularities sit ~pi/2 off the axis
SHORT_ROW = 64


def gl_nodes(n=16):
    x, w = np.polynomial.legendre.leggauss(n)
    return np.ascontiguousarray(x), np.ascontiguousarray(w)


if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _g(t, v, sgn, c_re, c_im, e):
        p = t * t - v * v + c_re
        q = 2.0 * sgn * t * v + c_im
        return (p * p + q * q) ** e

    @njit(cache=True, inline="always")
    def _dg(t, v, sgn, c_re, c_im, e):
        p = t * t - v * v + c_re
        q = 2.0 * sgn * t * v + c_im
        m = p * p + q * q
        return e * m ** (e - 1.0) * 4.0 * (p * t + q * sgn * v)

    @njit(cache=True, parallel=True)
    def row_sums_nb(j0, j1, v, sgn, c_re, c_im, d, direct, gx, gw):
        n = j0.shape[0]
        out = np.empty(n)
        e = -d / 4.0
        pi = math.pi
        for r in prange(n):
            ncol = j1[r] - j0[r] + 1
            kd = ncol
            if ncol > SHORT_ROW:
                kd = min(ncol, max(0, direct - j0[r]))
            tot = 0.0
            for k in range(kd):
                tot += _g((j0[r] + k + 0.5) * pi, v[r], sgn[r], c_re, c_im, e)
            if kd < ncol:
                a = (j0[r] + kd) * pi
                b = (j1[r] + 1) * pi
                la = math.log(a)
                lb = math.log(b)
                npan = max(1, int(math.ceil((lb - la) / GL_PANEL)))
                h = (lb - la) / npan
                integral = 0.0
                for p in range(npan):
                    mid = la + (p + 0.5) * h
                    for q in range(gx.shape[0]):
                        t = math.exp(mid + 0.5 * h * gx[q])
                        integral += gw[q] * 0.5 * h * t * _g(t, v[r], sgn[r], c_re, c_im, e)
                tot += integral / pi - pi / 24.0 * (
                    _dg(b, v[r], sgn[r], c_re, c_im, e) - _dg(a, v[r], sgn[r], c_re, c_im, e))
            out[r] = tot
        return out


def _g_np(t, v, sgn, c_re, c_im, e):
    p = t * t - v * v + c_re
    q = 2.0 * sgn * t * v + c_im
    return (p * p + q * q) ** e


def _dg_np(t, v, sgn, c_re, c_im, e):
    p = t * t - v * v + c_re
    q = 2.0 * sgn * t * v + c_im
    m = p * p + q * q
    return e * m ** (e - 1.0) * 4.0 * (p * t + q * sgn * v)


def row_sums_np(j0, j1, v, sgn, c_re, c_im, d, direct, gx, gw):
    e = -d / 4.0
    pi = math.pi
    ncol = j1 - j0 + 1
    kd = np.where(ncol <= SHORT_ROW, ncol, np.clip(direct - j0, 0, ncol))
    out = np.zeros(j0.shape[0])
    for k in range(int(kd.max(initial=0))):
        m = k < kd
        out[m] += _g_np((j0[m] + k + 0.5) * pi, v[m], sgn[m], c_re, c_im, e)
    long_ = np.flatnonzero(kd < ncol)
    if long_.size:
        a = (j0[long_] + kd[long_]) * pi
        b = (j1[long_] + 1) * pi
        vv, ss = v[long_], sgn[long_]
        la, lb = np.log(a), np.log(b)
        npan = np.maximum(1, np.ceil((lb - la) / GL_PANEL).astype(np.int64))
        h = (lb - la) / npan
        integral = np.zeros(long_.size)
        for p in range(int(npan.max())):
            m = p < npan
            mid = la[m] + (p + 0.5) * h[m]
            for xq, wq in zip(gx, gw):
                t = np.exp(mid + 0.5 * h[m] * xq)
                integral[m] += wq * 0.5 * h[m] * t * _g_np(t, vv[m], ss[m], c_re, c_im, e)
        out[long_] += integral / pi - pi / 24.0 * (
            _dg_np(b, vv, ss, c_re, c_im, e) - _dg_np(a, vv, ss, c_re, c_im, e))
    return out


def row_sums(j0, j1, v, sgn, c, d, direct=256):
    """Per-row sums of ``|w_j^2 + c|^(-d/2)`` over ``j0 <= j <= j1``."""
    j0 = np.ascontiguousarray(j0, dtype=np.int64)
    j1 = np.ascontiguousarray(j1, dtype=np.int64)
    v = np.ascontiguousarray(v, dtype=float)
    sgn = np.ascontiguousarray(sgn, dtype=float)
    gx, gw = gl_nodes()
    args = (j0, j1, v, sgn, float(c.real), float(c.imag), float(d), int(direct), gx, gw)
    if USE_NUMBA:
        return row_sums_nb(*args)
    return row_sums_np(*args)
