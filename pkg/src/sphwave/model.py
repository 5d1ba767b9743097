"""The Poisson spherical wave model: point-process realizations, field
synthesis, and empirical harmonic coefficients.

A realization with rate nu carries a Poisson(4*pi*nu) number of points drawn
uniformly on the sphere (Lebesgue governing measure, so the expected count is
the rate times the surface area). The field is the normalized superposition

    T(x) = (1/sqrt(nu)) * sum_k sqrt((2l+1)/4pi) * P_l(<x, xi_k>),

which has mean zero and unit variance at every point for l >= 1, and harmonic
coefficients a_m = sqrt(4pi/((2l+1) nu)) * sum_k Y_{l,m}(xi_k).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .rng import SplitStream
from .sphfn import FOUR_PI, SpherePoint, legendre, sph_harm_table, sphere_quadrature

__all__ = [
    "PoissonRealization",
    "HarmonicVector",
    "FiniteDimVector",
    "sample_realization",
    "evaluate_field",
    "evaluate_field_many",
    "harmonic_coefficients",
    "synthesize",
    "parseval_check",
    "finite_dim_eval",
    "save_realization",
    "load_realization",
]


@dataclass(frozen=True)
class PoissonRealization:
    """One draw of the sphere Poisson process, replayable from (rate, seed)."""

    rate: float
    seed: int
    replicate: int
    xyz: np.ndarray = field(repr=False)  # (count, 3) unit rows

    @property
    def count(self) -> int:
        return self.xyz.shape[0]

    @property
    def points(self) -> list[SpherePoint]:
        return [SpherePoint(float(x), float(y), float(z)) for x, y, z in self.xyz]


@dataclass(frozen=True)
class HarmonicVector:
    """Empirical coefficients a_{l,m} of one realization, m = -l..l."""

    ell: int
    rate: float
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.coeffs.shape != (2 * self.ell + 1,):
            raise DomainError("coefficient vector must have length 2l+1")


@dataclass(frozen=True)
class FiniteDimVector:
    """Field values at d points together with the model covariance matrix
    Gamma_ij = P_l(<x_i, x_j>) (unit diagonal)."""

    ell: int
    points: np.ndarray = field(repr=False)  # (d, 3)
    values: np.ndarray = field(repr=False)  # (d,)
    gamma: np.ndarray = field(repr=False)  # (d, d)


def _require_stochastic_ell(ell: int):
    if ell < 1:
        raise DomainError("stochastic operations need l >= 1 (l = 0 is not centered)")


def sample_realization(rate: float, seed: int, replicate: int = 0) -> PoissonRealization:
    """Draw a realization: Poisson(4*pi*rate) points, uniform on the sphere.

    Deterministic in (rate, seed, replicate); the draw order (count, then
    z block, then phi block) is part of the replay contract.
    """
    if rate <= 0:
        raise DomainError("rate must be positive")
    stream = SplitStream(seed, replicate)
    n = stream.poisson(FOUR_PI * rate)
    z = 2.0 * stream.uniform_block(n) - 1.0
    phi = 2.0 * math.pi * stream.uniform_block(n)
    s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    xyz = np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    return PoissonRealization(rate=float(rate), seed=int(seed), replicate=int(replicate), xyz=xyz)


def evaluate_field(r: PoissonRealization, ell: int, p: SpherePoint) -> float:
    """Field value T(p): finite sum of Legendre waves over realized points."""
    _require_stochastic_ell(ell)
    if r.count == 0:
        return 0.0
    dots = r.xyz @ p.vec
    amp = math.sqrt((2 * ell + 1) / FOUR_PI / r.rate)
    return amp * float(np.sum(legendre(ell, dots)))


def evaluate_field_many(r: PoissonRealization, ell: int, pts: np.ndarray) -> np.ndarray:
    """Field values at several points; pts has shape (d, 3)."""
    _require_stochastic_ell(ell)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if r.count == 0:
        return np.zeros(pts.shape[0])
    amp = math.sqrt((2 * ell + 1) / FOUR_PI / r.rate)
    dots = r.xyz @ pts.T  # (count, d)
    return amp * np.array([np.sum(legendre(ell, dots[:, i])) for i in range(pts.shape[0])])


def harmonic_coefficients(r: PoissonRealization, ell: int) -> HarmonicVector:
    """Empirical coefficient vector; synthesis with the basis row reproduces
    the field exactly (addition formula)."""
    _require_stochastic_ell(ell)
    if r.count == 0:
        return HarmonicVector(ell=ell, rate=r.rate, coeffs=np.zeros(2 * ell + 1))
    phi = np.mod(np.arctan2(r.xyz[:, 1], r.xyz[:, 0]), 2.0 * math.pi)
    tab = sph_harm_table(ell, r.xyz[:, 2], phi)
    amp = math.sqrt(FOUR_PI / ((2 * ell + 1) * r.rate))
    return HarmonicVector(ell=ell, rate=r.rate, coeffs=amp * tab.sum(axis=0))


def synthesize(v: HarmonicVector, p: SpherePoint) -> float:
    """Reconstruct the field at p from its harmonic coefficients."""
    from .sphfn import sph_harm_row

    return float(v.coeffs @ sph_harm_row(v.ell, p))


def parseval_check(r: PoissonRealization, ell: int, quad_order: int) -> tuple[float, float]:
    """(quadrature of ||T||^2 over the sphere, sum of squared coefficients).

    The two sides agree to roundoff; quad_order is the Gauss-Legendre order
    in cos(theta) and must be at least 2l+2.
    """
    _require_stochastic_ell(ell)
    if quad_order < 2 * ell + 2:
        raise DomainError("quadrature order must be at least 2l+2")
    rule = sphere_quadrature(2 * quad_order)
    if r.count == 0:
        return 0.0, 0.0
    vals = evaluate_field_many(r, ell, rule.xyz)
    lhs = float(rule.weights @ vals**2)
    coeffs = harmonic_coefficients(r, ell).coeffs
    return lhs, float(coeffs @ coeffs)


def finite_dim_eval(r: PoissonRealization, ell: int, pts) -> FiniteDimVector:
    """Evaluate the field at d distinct points and attach Gamma_d."""
    _require_stochastic_ell(ell)
    if isinstance(pts, (list, tuple)) and pts and isinstance(pts[0], SpherePoint):
        pts = np.array([p.vec for p in pts])
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    d = pts.shape[0]
    if d == 0:
        raise DomainError("need at least one evaluation point")
    dots = pts @ pts.T
    off = dots[~np.eye(d, dtype=bool)]
    if off.size and np.any(off >= 1.0 - 1e-12):
        raise DomainError("evaluation points must be pairwise distinct (Gamma_d singular)")
    gamma = legendre(ell, np.clip(dots, -1.0, 1.0).ravel()).reshape(d, d)
    np.fill_diagonal(gamma, 1.0)
    values = evaluate_field_many(r, ell, pts)
    return FiniteDimVector(ell=ell, points=pts, values=values, gamma=gamma)


def save_realization(r: PoissonRealization, path) -> None:
    """Columnar text format: JSON header line, then one 'x y z' row per point."""
    with open(path, "w") as fh:
        fh.write(
            json.dumps(
                {"rate": r.rate, "seed": r.seed, "replicate": r.replicate, "count": r.count}
            )
            + "\n"
        )
        for x, y, z in r.xyz:
            fh.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")


def load_realization(path) -> PoissonRealization:
    """Read back a realization written by save_realization."""
    with open(path) as fh:
        header = json.loads(fh.readline())
        rows = [tuple(float(tok) for tok in line.split()) for line in fh if line.strip()]
    xyz = np.array(rows, dtype=float).reshape(len(rows), 3)
    if header["count"] != xyz.shape[0]:
        raise DomainError(f"realization file corrupt: header count {header['count']} != {xyz.shape[0]} rows")
    return PoissonRealization(
        rate=header["rate"], seed=header["seed"], replicate=header.get("replicate", 0), xyz=xyz
    )
