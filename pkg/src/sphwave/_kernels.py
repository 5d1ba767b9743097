"""Compiled Monte Carlo kernels.

Each kernel materializes one replicate range [r0, r1) of an experiment:
it derives the (seed, r) stream, draws the Poisson count and the point
variables, and accumulates the target functional, writing one scalar (or row)
per replicate. The stream logic mirrors ``rng.SplitStream`` bit for bit, and
every kernel is bitwise deterministic in (config, engine) regardless of
worker count or chunking. The pure-Python fallbacks below implement the same
arithmetic; compiled and interpreted results may differ on isolated entries
by one last bit (fused multiply-add contraction), which tests pin down.

Legendre evaluation uses a Horner form in t^2 for degrees up to 30 (power
coefficients stay small enough there) and the three-term recurrence above.
Normalized associated Legendre recurrences run without exponent tracking:
kernel-scale degrees keep them inside the double range, and a seed that
underflows corresponds to a value that is zero at double precision anyway.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import SplitStream

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def deco(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return deco


FOUR_PI = 4.0 * math.pi
HORNER_MAX_DEGREE = 30

U64 = np.uint64
_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX_A = U64(0xBF58476D1CE4E5B9)
_MIX_B = U64(0x94D049BB133111EB)
_POISSON_CUTOFF = 30.0


def legendre_power_coefs(ell: int) -> np.ndarray:
    """Coefficients of P_l as a polynomial in t^2 (odd l: divided by t)."""
    c = np.polynomial.legendre.Legendre.basis(ell).convert(
        kind=np.polynomial.Polynomial
    ).coef
    return np.ascontiguousarray(c[ell % 2 :: 2])


# ---------------------------------------------------------------------------
# compiled stream primitives (bit-compatible with rng.SplitStream)
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX_A
    z = (z ^ (z >> U64(27))) * _MIX_B
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def _derive(seed, replicate):
    key = _mix64(U64(seed) ^ _mix64(U64(replicate) + _GOLDEN))
    st = key + _GOLDEN
    s0 = _mix64(st)
    st = st + _GOLDEN
    s1 = _mix64(st)
    st = st + _GOLDEN
    s2 = _mix64(st)
    st = st + _GOLDEN
    s3 = _mix64(st)
    if s0 | s1 | s2 | s3 == U64(0):
        s0 = _GOLDEN
    return s0, s1, s2, s3


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << U64(k)) | (x >> U64(64 - k))


@njit(cache=True, nogil=True)
def _next(s0, s1, s2, s3):
    out = _rotl(s0 + s3, 23) + s0
    t = s1 << U64(17)
    s2 = s2 ^ s0
    s3 = s3 ^ s1
    s1 = s1 ^ s2
    s0 = s0 ^ s3
    s2 = s2 ^ t
    s3 = _rotl(s3, 45)
    return out, s0, s1, s2, s3


@njit(cache=True, nogil=True)
def _unif(s0, s1, s2, s3):
    x, s0, s1, s2, s3 = _next(s0, s1, s2, s3)
    return (x >> U64(11)) * 2.0**-53, s0, s1, s2, s3


@njit(cache=True, nogil=True)
def _poisson(s0, s1, s2, s3, mean):
    if mean < _POISSON_CUTOFF:
        floor_p = math.exp(-mean)
        k = 0
        p = 1.0
        while True:
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            p *= u
            if p <= floor_p:
                return k, s0, s1, s2, s3
            k += 1
    slam = math.sqrt(mean)
    loglam = math.log(mean)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
        u -= 0.5
        v, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
        us = 0.5 - abs(u)
        k = int(math.floor((2.0 * a / us + b) * u + mean + 0.43))
        if us >= 0.07 and v <= vr:
            return k, s0, s1, s2, s3
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)) <= (
            -mean + k * loglam - math.lgamma(k + 1.0)
        ):
            return k, s0, s1, s2, s3


# ---------------------------------------------------------------------------
# field evaluation helpers
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _p_horner(coefs, odd, t):
    w = t * t
    acc = coefs[coefs.shape[0] - 1]
    for j in range(coefs.shape[0] - 2, -1, -1):
        acc = acc * w + coefs[j]
    if odd:
        acc *= t
    return acc


@njit(cache=True, nogil=True)
def _p_recurrence(ell, t):
    if ell == 0:
        return 1.0
    p_prev = 1.0
    p = t
    for k in range(2, ell + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k - 1) * p_prev) / k
    return p


@njit(cache=True, nogil=True)
def _norm_plm(ell, m, z):
    """Orthonormalized associated Legendre N_l^m(z), plain recurrence."""
    s2 = 1.0 - z * z
    if s2 < 0.0:
        s2 = 0.0
    s = math.sqrt(s2)
    p = math.sqrt(1.0 / FOUR_PI)
    for j in range(1, m + 1):
        p *= math.sqrt((2.0 * j + 1.0) / (2.0 * j)) * s
    if ell == m:
        return p
    p_prev = p
    p = math.sqrt(2.0 * m + 3.0) * z * p
    for k in range(m + 2, ell + 1):
        a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = math.sqrt((2.0 * k + 1.0) * ((k - 1.0) ** 2 - m * m) / ((2.0 * k - 3.0) * (k * k - m * m)))
        p_prev, p = p, a * z * p - b * p_prev
    return p


@njit(cache=True, nogil=True)
def _yrow_accumulate(ell, z, phi, acc):
    """Add the basis row at (z, phi) into acc (length 2l+1, m = -l..l)."""
    sqrt2 = math.sqrt(2.0)
    s2 = 1.0 - z * z
    if s2 < 0.0:
        s2 = 0.0
    s = math.sqrt(s2)
    seed = math.sqrt(1.0 / FOUR_PI)
    for m in range(0, ell + 1):
        if m > 0:
            seed *= math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
        p = seed
        if ell > m:
            p_prev = p
            p = math.sqrt(2.0 * m + 3.0) * z * p
            for k in range(m + 2, ell + 1):
                a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                b = math.sqrt(
                    (2.0 * k + 1.0) * ((k - 1.0) ** 2 - m * m) / ((2.0 * k - 3.0) * (k * k - m * m))
                )
                p_prev, p = p, a * z * p - b * p_prev
        if m == 0:
            acc[ell] += p
        else:
            acc[ell + m] += sqrt2 * p * math.cos(m * phi)
            acc[ell - m] += sqrt2 * p * math.sin(m * phi)


# ---------------------------------------------------------------------------
# replicate-range kernels
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def k_point(seed, r0, r1, lam, ell, coefs, use_horner, scale, out):
    odd = ell % 2 == 1
    for r in range(r0, r1):
        s0, s1, s2, s3 = _derive(seed, r)
        n, s0, s1, s2, s3 = _poisson(s0, s1, s2, s3, lam)
        acc = 0.0
        for _ in range(n):
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            t = 2.0 * u - 1.0
            if use_horner:
                acc += _p_horner(coefs, odd, t)
            else:
                acc += _p_recurrence(ell, t)
        out[r - r0] = scale * acc


@njit(cache=True, nogil=True)
def k_coefficient(seed, r0, r1, lam, ell, m, scale, out):
    mabs = abs(m)
    sqrt2 = math.sqrt(2.0)
    for r in range(r0, r1):
        s0, s1, s2, s3 = _derive(seed, r)
        n, s0, s1, s2, s3 = _poisson(s0, s1, s2, s3, lam)
        acc = 0.0
        for _ in range(n):
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            z = 2.0 * u - 1.0
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            phi = 2.0 * math.pi * u
            p = _norm_plm(ell, mabs, z)
            if m == 0:
                acc += p
            elif m > 0:
                acc += sqrt2 * p * math.cos(m * phi)
            else:
                acc += sqrt2 * p * math.sin(mabs * phi)
        out[r - r0] = scale * acc


@njit(cache=True, nogil=True)
def k_vector(seed, r0, r1, lam, ell, scale, out):
    dim = 2 * ell + 1
    for r in range(r0, r1):
        s0, s1, s2, s3 = _derive(seed, r)
        n, s0, s1, s2, s3 = _poisson(s0, s1, s2, s3, lam)
        row = np.zeros(dim)
        for _ in range(n):
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            z = 2.0 * u - 1.0
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            phi = 2.0 * math.pi * u
            _yrow_accumulate(ell, z, phi, row)
        for j in range(dim):
            out[r - r0, j] = scale * row[j]


@njit(cache=True, nogil=True)
def k_norm_squared(seed, r0, r1, lam, ell, scale, out):
    dim = 2 * ell + 1
    for r in range(r0, r1):
        s0, s1, s2, s3 = _derive(seed, r)
        n, s0, s1, s2, s3 = _poisson(s0, s1, s2, s3, lam)
        row = np.zeros(dim)
        for _ in range(n):
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            z = 2.0 * u - 1.0
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            phi = 2.0 * math.pi * u
            _yrow_accumulate(ell, z, phi, row)
        acc = 0.0
        for j in range(dim):
            a = scale * row[j]
            acc += a * a
        out[r - r0] = acc


@njit(cache=True, nogil=True)
def k_fdd(seed, r0, r1, lam, ell, xs, scale, out):
    d = xs.shape[0]
    for r in range(r0, r1):
        s0, s1, s2, s3 = _derive(seed, r)
        n, s0, s1, s2, s3 = _poisson(s0, s1, s2, s3, lam)
        row = np.zeros(d)
        for _ in range(n):
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            z = 2.0 * u - 1.0
            u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
            phi = 2.0 * math.pi * u
            sn = math.sqrt(max(1.0 - z * z, 0.0))
            px = sn * math.cos(phi)
            py = sn * math.sin(phi)
            for i in range(d):
                dot = px * xs[i, 0] + py * xs[i, 1] + z * xs[i, 2]
                if dot > 1.0:
                    dot = 1.0
                elif dot < -1.0:
                    dot = -1.0
                row[i] += _p_recurrence(ell, dot)
        for i in range(d):
            out[r - r0, i] = scale * row[i]


@njit(cache=True, nogil=True)
def k_uniform_block(seed, replicate, out):
    s0, s1, s2, s3 = _derive(seed, replicate)
    for i in range(out.shape[0]):
        u, s0, s1, s2, s3 = _unif(s0, s1, s2, s3)
        out[i] = u


# ---------------------------------------------------------------------------
# pure-Python mirrors (identical arithmetic, used without numba and in
# bit-compatibility tests)
# ---------------------------------------------------------------------------


def _py_p_eval(ell, coefs, use_horner, t):
    if use_horner:
        w = t * t
        acc = coefs[-1]
        for j in range(len(coefs) - 2, -1, -1):
            acc = acc * w + coefs[j]
        if ell % 2 == 1:
            acc *= t
        return acc
    if ell == 0:
        return 1.0
    p_prev, p = 1.0, t
    for k in range(2, ell + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k - 1) * p_prev) / k
    return p


def _py_norm_plm(ell, m, z):
    s = math.sqrt(max(1.0 - z * z, 0.0))
    p = math.sqrt(1.0 / FOUR_PI)
    for j in range(1, m + 1):
        p *= math.sqrt((2.0 * j + 1.0) / (2.0 * j)) * s
    if ell == m:
        return p
    p_prev = p
    p = math.sqrt(2.0 * m + 3.0) * z * p
    for k in range(m + 2, ell + 1):
        a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = math.sqrt((2.0 * k + 1.0) * ((k - 1.0) ** 2 - m * m) / ((2.0 * k - 3.0) * (k * k - m * m)))
        p_prev, p = p, a * z * p - b * p_prev
    return p


def _py_yrow_accumulate(ell, z, phi, acc):
    sqrt2 = math.sqrt(2.0)
    s = math.sqrt(max(1.0 - z * z, 0.0))
    seed = math.sqrt(1.0 / FOUR_PI)
    for m in range(0, ell + 1):
        if m > 0:
            seed *= math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
        p = seed
        if ell > m:
            p_prev = p
            p = math.sqrt(2.0 * m + 3.0) * z * p
            for k in range(m + 2, ell + 1):
                a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                b = math.sqrt(
                    (2.0 * k + 1.0) * ((k - 1.0) ** 2 - m * m) / ((2.0 * k - 3.0) * (k * k - m * m))
                )
                p_prev, p = p, a * z * p - b * p_prev
        if m == 0:
            acc[ell] += p
        else:
            acc[ell + m] += sqrt2 * p * math.cos(m * phi)
            acc[ell - m] += sqrt2 * p * math.sin(m * phi)


def py_point(seed, r0, r1, lam, ell, coefs, use_horner, scale, out):
    for r in range(r0, r1):
        st = SplitStream(seed, r)
        n = st.poisson(lam)
        acc = 0.0
        for _ in range(n):
            t = 2.0 * st.uniform() - 1.0
            acc += _py_p_eval(ell, coefs, use_horner, t)
        out[r - r0] = scale * acc


def py_coefficient(seed, r0, r1, lam, ell, m, scale, out):
    mabs = abs(m)
    sqrt2 = math.sqrt(2.0)
    for r in range(r0, r1):
        st = SplitStream(seed, r)
        n = st.poisson(lam)
        acc = 0.0
        for _ in range(n):
            z = 2.0 * st.uniform() - 1.0
            phi = 2.0 * math.pi * st.uniform()
            p = _py_norm_plm(ell, mabs, z)
            if m == 0:
                acc += p
            elif m > 0:
                acc += sqrt2 * p * math.cos(m * phi)
            else:
                acc += sqrt2 * p * math.sin(mabs * phi)
        out[r - r0] = scale * acc


def py_vector(seed, r0, r1, lam, ell, scale, out):
    dim = 2 * ell + 1
    for r in range(r0, r1):
        st = SplitStream(seed, r)
        n = st.poisson(lam)
        row = np.zeros(dim)
        for _ in range(n):
            z = 2.0 * st.uniform() - 1.0
            phi = 2.0 * math.pi * st.uniform()
            _py_yrow_accumulate(ell, z, phi, row)
        out[r - r0, :] = scale * row


def py_norm_squared(seed, r0, r1, lam, ell, scale, out):
    dim = 2 * ell + 1
    tmp = np.empty((1, dim))
    for r in range(r0, r1):
        py_vector(seed, r, r + 1, lam, ell, scale, tmp)
        acc = 0.0
        for j in range(dim):
            acc += tmp[0, j] * tmp[0, j]
        out[r - r0] = acc


def py_fdd(seed, r0, r1, lam, ell, xs, scale, out):
    d = xs.shape[0]
    for r in range(r0, r1):
        st = SplitStream(seed, r)
        n = st.poisson(lam)
        row = np.zeros(d)
        for _ in range(n):
            z = 2.0 * st.uniform() - 1.0
            phi = 2.0 * math.pi * st.uniform()
            sn = math.sqrt(max(1.0 - z * z, 0.0))
            ux, uy = sn * math.cos(phi), sn * math.sin(phi)
            for i in range(d):
                dot = min(1.0, max(-1.0, ux * xs[i, 0] + uy * xs[i, 1] + z * xs[i, 2]))
                row[i] += _py_p_eval(ell, np.empty(0), False, dot)
        out[r - r0, :] = scale * row


def py_uniform_block(seed, replicate, out):
    st = SplitStream(seed, replicate)
    for i in range(out.shape[0]):
        out[i] = st.uniform()
