"""Legendre polynomials, associated Legendre functions, and the real
fully-normalized spherical harmonic basis, plus the quadrature rules used
as oracles for every integral identity in the package.

Conventions. The basis is real, orthonormal on the sphere, and carries no
Condon-Shortley phase:

    Y_{l,0}  = sqrt((2l+1)/4pi) * P_l(cos th)
    Y_{l,m}  = sqrt((2l+1)/2pi * (l-m)!/(l+m)!) * P_l^m(cos th) * cos(m ph),  m > 0
    Y_{l,-m} = sqrt((2l+1)/2pi * (l-m)!/(l+m)!) * P_l^m(cos th) * sin(m ph),  m > 0

with P_l^m(t) = (1-t^2)^{m/2} d^m/dt^m P_l(t) (unsigned). Evaluation runs
through upward three-term recurrences on the orthonormalized functions with
per-point exponent tracking, stable beyond l = 2000 where raw P_l^m would
overflow near l ~ 150.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError

__all__ = [
    "FOUR_PI",
    "Multipole",
    "SpherePoint",
    "QuadratureRule",
    "SphereRule",
    "legendre",
    "legendre_all",
    "assoc_legendre",
    "real_sph_harm",
    "sph_harm_row",
    "sph_harm_table",
    "gauss_legendre_rule",
    "sphere_quadrature",
    "legendre_quartic_integral",
]

FOUR_PI = 4.0 * math.pi

_T_SLACK = 1e-10  # tolerance for |t| slightly above 1 from rounded dot products


@dataclass(frozen=True)
class Multipole:
    """Degree of a spherical Laplace eigenspace; eigenvalue is -l(l+1)."""

    ell: int

    def __post_init__(self):
        if not isinstance(self.ell, (int, np.integer)) or self.ell < 0:
            raise DomainError(f"multipole degree must be a nonnegative integer, got {self.ell!r}")

    @property
    def lam(self) -> int:
        return self.ell * (self.ell + 1)

    @property
    def dim(self) -> int:
        return 2 * self.ell + 1


@dataclass(frozen=True)
class SpherePoint:
    """Location on the unit sphere, stored as a unit 3-vector."""

    x: float
    y: float
    z: float

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        v = np.asarray(v, dtype=float)
        r = math.sqrt(float(v @ v))
        if r < 1e-12:
            raise DomainError("cannot normalize a near-zero vector onto the sphere")
        return cls(float(v[0]) / r, float(v[1]) / r, float(v[2]) / r)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpherePoint":
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    @property
    def theta(self) -> float:
        return math.atan2(math.hypot(self.x, self.y), self.z)

    @property
    def phi(self) -> float:
        return math.atan2(self.y, self.x) % (2.0 * math.pi)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other: "SpherePoint") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + _T_SLACK):
        raise DomainError("Legendre argument outside [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def legendre(ell: int, t):
    """Legendre polynomial P_l(t) on [-1, 1]; P_l(1) = 1 exactly.

    Accepts a scalar or an ndarray of arguments.
    """
    scalar = np.isscalar(t) or np.ndim(t) == 0
    t = _check_t(t)
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    out = _legendre_arr(ell, np.atleast_1d(t))
    return float(out[0]) if scalar else out


def _legendre_arr(ell: int, t: np.ndarray) -> np.ndarray:
    if ell == 0:
        return np.ones_like(t)
    p_prev = np.ones_like(t)
    p = t.copy()
    for k in range(2, ell + 1):
        p_prev, p = p, ((2 * k - 1) * t * p - (k - 1) * p_prev) / k
    # endpoints are exact through the recurrence; pin them anyway
    at_one = t == 1.0
    at_neg = t == -1.0
    if at_one.any():
        p[at_one] = 1.0
    if at_neg.any():
        p[at_neg] = -1.0 if ell % 2 else 1.0
    return p


def legendre_all(ell_max: int, t: float) -> np.ndarray:
    """All of P_0(t) .. P_{ell_max}(t) from one fused recurrence pass."""
    if ell_max < 0:
        raise DomainError("degree must be nonnegative")
    tt = float(_check_t(t))
    out = np.empty(ell_max + 1)
    out[0] = 1.0
    if ell_max >= 1:
        out[1] = tt
    for k in range(2, ell_max + 1):
        out[k] = ((2 * k - 1) * tt * out[k - 1] - (k - 1) * out[k - 2]) / k
    return out


# ---------------------------------------------------------------------------
# orthonormalized associated Legendre machinery
# ---------------------------------------------------------------------------

_LN2 = math.log(2.0)
_RESCALE_EVERY = 24
_TINY = 2.0**-500
_BIG = 2.0**500
_TINY_SCALE_UP = 2.0**1000


def _log_seed(m: int, one_minus_t2: np.ndarray) -> np.ndarray:
    """log |N_m^m(t)| with N the orthonormalized function (sign is +)."""
    if m == 0:
        return np.full_like(one_minus_t2, -0.5 * math.log(FOUR_PI))
    c = 0.5 * (
        math.log((2 * m + 1) / FOUR_PI)
        + math.lgamma(2 * m + 1)
        - 2 * m * _LN2
        - 2 * math.lgamma(m + 1)
    )
    with np.errstate(divide="ignore"):
        return c + 0.5 * m * np.log(one_minus_t2)


def _climb(ell: int, m: int, t: np.ndarray, mant: np.ndarray, ex: np.ndarray):
    """Recur N_m^m -> N_ell^m on (mantissa, exponent) pairs, in place."""
    if ell == m:
        return mant, ex
    p_prev = mant
    p = math.sqrt(2 * m + 3) * t * mant
    for k in range(m + 2, ell + 1):
        a = math.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
        b = math.sqrt(
            (2.0 * k + 1.0) * ((k - 1.0) ** 2 - m * m) / ((2.0 * k - 3.0) * (k * k - m * m))
        )
        p_prev, p = p, a * t * p - b * p_prev
        if (k - m) % _RESCALE_EVERY == 0:
            mag = np.maximum(np.abs(p), np.abs(p_prev))
            small = mag < _TINY
            if small.any():
                p[small] *= _TINY_SCALE_UP
                p_prev[small] *= _TINY_SCALE_UP
                ex[small] -= 1000
            big = mag > _BIG
            if big.any():
                p[big] /= _TINY_SCALE_UP
                p_prev[big] /= _TINY_SCALE_UP
                ex[big] += 1000
    return p, ex


def _norm_plm_column(ell: int, m: int, t: np.ndarray):
    """Orthonormalized N_ell^m(t) as (mantissa, base-2 exponent) arrays."""
    one_minus = np.maximum(1.0 - t * t, 0.0)
    logseed = _log_seed(m, one_minus)
    ex = np.zeros(t.shape, dtype=np.int64)
    mant = np.empty_like(t)
    finite = np.isfinite(logseed)
    e = np.floor(logseed[finite] / _LN2)
    ex[finite] = e.astype(np.int64)
    mant[finite] = np.exp(logseed[finite] - e * _LN2)
    mant[~finite] = 0.0
    return _climb(ell, m, t, mant, ex)


def _assemble(mant: np.ndarray, ex: np.ndarray) -> np.ndarray:
    return np.ldexp(mant, ex.astype(np.int32, copy=False))


def sph_harm_table(ell: int, z, phi) -> np.ndarray:
    """Real spherical harmonic rows Y_{ell,m} for points given by z = cos(theta)
    and longitude phi; returns shape (npoints, 2*ell+1), columns m = -ell..ell.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if z.shape != phi.shape:
        raise DomainError("z and phi must have matching shapes")
    z = _check_t(z)
    n = z.size
    out = np.empty((n, 2 * ell + 1))
    sqrt2 = math.sqrt(2.0)
    for m in range(ell + 1):
        mant, ex = _norm_plm_column(ell, m, z)
        nlm = _assemble(mant, ex)
        if m == 0:
            out[:, ell] = nlm
        else:
            out[:, ell + m] = sqrt2 * nlm * np.cos(m * phi)
            out[:, ell - m] = sqrt2 * nlm * np.sin(m * phi)
    return out


def sph_harm_row(ell: int, p: SpherePoint) -> np.ndarray:
    """All 2*ell+1 basis values at one point, columns m = -ell..ell."""
    return sph_harm_table(ell, np.array([p.z]), np.array([p.phi]))[0]


def real_sph_harm(ell: int, m: int, p: SpherePoint) -> float:
    """One element Y_{ell,m} of the real orthonormal basis at point p."""
    if abs(m) > ell:
        raise DomainError(f"|m| = {abs(m)} exceeds degree {ell}")
    z = np.array([p.z])
    mant, ex = _norm_plm_column(ell, abs(m), z)
    nlm = float(_assemble(mant, ex)[0])
    if m == 0:
        return nlm
    if m > 0:
        return math.sqrt(2.0) * nlm * math.cos(m * p.phi)
    return math.sqrt(2.0) * nlm * math.sin(-m * p.phi)


def assoc_legendre(ell: int, m: int, t: float) -> float:
    """Associated Legendre function P_l^m(t) = (1-t^2)^{m/2} d^m P_l/dt^m.

    Unsigned (no Condon-Shortley factor). Values that exceed the double
    range (large l with large m) come back as +/-inf rather than failing.
    """
    if m < 0 or m > ell:
        raise DomainError(f"order m must satisfy 0 <= m <= l, got m={m}, l={ell}")
    tt = float(_check_t(t))
    if m == 0:
        return legendre(ell, tt)
    if abs(tt) == 1.0:
        return 0.0
    arr = np.array([tt])
    mant, ex = _norm_plm_column(ell, m, arr)
    mant_v = float(mant[0])
    if mant_v == 0.0:
        return 0.0
    # undo the orthonormalization in log space to dodge overflow
    log_unnorm = 0.5 * (
        math.log(FOUR_PI / (2 * ell + 1)) + math.lgamma(ell + m + 1) - math.lgamma(ell - m + 1)
    )
    log_val = math.log(abs(mant_v)) + float(ex[0]) * _LN2 + log_unnorm
    sign = math.copysign(1.0, mant_v)
    if log_val > 709.0:
        return sign * math.inf
    return sign * math.exp(log_val)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]; exact for polynomial degree <= 2*order-1."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int

    def integrate(self, f) -> float:
        vals = f(self.nodes) if callable(f) else np.asarray(f)
        return float(self.weights @ vals)


@lru_cache(maxsize=32)
def _gl_cached(order: int):
    nodes, weights = roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_rule(order: int) -> QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1] (cached, immutable)."""
    if order < 1:
        raise DomainError("quadrature order must be >= 1")
    nodes, weights = _gl_cached(int(order))
    return QuadratureRule(nodes=nodes, weights=weights, order=int(order))


@dataclass(frozen=True)
class SphereRule:
    """Product quadrature on the sphere: Gauss-Legendre in cos(theta) times
    a uniform longitude grid; exact for spherical polynomials of the stated
    degree. Weights sum to 4*pi."""

    xyz: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    degree: int

    def integrate(self, vals) -> float:
        return float(self.weights @ np.asarray(vals))


def sphere_quadrature(degree: int) -> SphereRule:
    """Quadrature exact for products of spherical harmonics of total degree
    <= degree (e.g. degree = 2l for a pair of Y_l's, 4l for a quartet)."""
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    n_t = degree // 2 + 1
    n_phi = degree + 1
    t, wt = _gl_cached(n_t)
    ph = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * math.pi / n_phi
    z = np.repeat(t, n_phi)
    phi = np.tile(ph, n_t)
    w = np.repeat(wt * wphi, n_phi)
    s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    xyz = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return SphereRule(xyz=xyz, weights=w, z=z, phi=phi, degree=int(degree))


@lru_cache(maxsize=512)
def legendre_quartic_integral(ell: int) -> float:
    """Exact value of the quartic integral int_0^1 P_l(t)^4 dt by quadrature.

    The integrand is an even polynomial of degree 4l, so an order 2l+3 rule
    (degree 4l+5 exactness, guard nodes included) integrates it exactly and
    half of the [-1, 1] integral is returned.
    """
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    rule = gauss_legendre_rule(2 * ell + 3)
    p = _legendre_arr(ell, np.asarray(rule.nodes))
    return 0.5 * float(rule.weights @ p**4)
