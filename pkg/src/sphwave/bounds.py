"""Evaluators for the quantitative central-limit bounds.

Each evaluator returns a BoundReport with the bound's value at the given
(l, nu, d, smoothness budget). Test-function suprema cannot be materialized,
so bounds are linear in caller-supplied caps on the minimum Lipschitz
constants M1, M2, M3 (default all 1). Every numeric constant is assembled
from primitives at runtime; nothing is a hard-coded decimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .moments import (
    cum4_coefficient_sum,
    cum4_point,
    fourth_moment_point,
    norm_moments,
)
from .sphfn import FOUR_PI
from .wigner import GAMMA_3J_UPPER

__all__ = [
    "SmoothnessBudget",
    "BoundReport",
    "THEOREMS",
    "wasserstein_c1",
    "one_dim_leading_constant",
    "b3_constant",
    "b3_harmonic",
    "b2_harmonic",
    "harmonic_radicand",
    "bound_one_dim",
    "bound_one_dim_kolmogorov",
    "bound_fdd_d3",
    "bound_harmonic_d3",
    "bound_harmonic_d2",
    "bound_fdd_via_harmonics",
    "bound_functional",
]

THEOREMS = (
    "one_dim_wasserstein",
    "one_dim_kolmogorov",
    "fdd_d3",
    "harmonic_d3",
    "harmonic_d2",
    "fdd_via_harmonics",
    "functional",
)


@dataclass(frozen=True)
class SmoothnessBudget:
    """Caps on the minimum Lipschitz constants M1, M2, M3 of test functions."""

    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0

    def __post_init__(self):
        for v in (self.m1, self.m2, self.m3):
            if not (math.isfinite(v) and v >= 0):
                raise DomainError("smoothness caps must be finite and nonnegative")

    def scaled(self, c: float) -> "SmoothnessBudget":
        return SmoothnessBudget(c * self.m1, c * self.m2, c * self.m3)


UNIT_BUDGET = SmoothnessBudget()


@dataclass(frozen=True)
class BoundReport:
    """One evaluated theorem bound. leading_term, when present, is the
    sharper/leading companion form and never exceeds value."""

    theorem: str
    value: float
    ell: Optional[int]
    rate: float
    leading_term: Optional[float] = None
    d: Optional[int] = None
    budget: Optional[SmoothnessBudget] = None
    combined: Optional[float] = None

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise DomainError(f"unknown theorem {self.theorem!r}")
        if self.value < 0:
            raise DomainError("bounds are nonnegative")


def wasserstein_c1() -> float:
    """Constant of the scalar fourth-moment bound: 1/sqrt(2 pi) + 2/3."""
    return 1.0 / math.sqrt(2.0 * math.pi) + 2.0 / 3.0


def one_dim_leading_constant() -> float:
    """sqrt(3)/(2 pi^2) + (2/3) sqrt(3/(2 pi^3)), computed from primitives."""
    return math.sqrt(3.0) / (2.0 * math.pi**2) + (2.0 / 3.0) * math.sqrt(3.0 / (2.0 * math.pi**3))


def _check(ell: int, rate: float, min_ell: int = 2):
    if ell is not None and ell < min_ell:
        raise DomainError(f"need l >= {min_ell}")
    if rate <= 0:
        raise DomainError("rate must be positive")


def b3_constant(d: int, budget: SmoothnessBudget = UNIT_BUDGET) -> float:
    """Third-order smoothness constant sqrt(2d)/4 * M2 + 2d/9 * M3 (Tr Gamma = d)."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return math.sqrt(2.0 * d) / 4.0 * budget.m2 + 2.0 * d / 9.0 * budget.m3


def b3_harmonic(ell: int, budget: SmoothnessBudget = UNIT_BUDGET) -> float:
    """B3 for the coefficient vector: sqrt(2(2l+1))/4 M2 + (2/9) sqrt((2l+1) 4pi) M3."""
    n = 2 * ell + 1
    return math.sqrt(2.0 * n) / 4.0 * budget.m2 + (2.0 / 9.0) * math.sqrt(n * FOUR_PI) * budget.m3


def b2_harmonic(ell: int, budget: SmoothnessBudget = UNIT_BUDGET) -> float:
    """B2 for the coefficient vector: A1 + (sqrt(2 pi)/6) sqrt(2l+1) M2 with
    A1 = sqrt((2l+1)/4pi) M1 / sqrt(pi)."""
    n = 2 * ell + 1
    a1 = math.sqrt(n / FOUR_PI) / math.sqrt(math.pi) * budget.m1
    return a1 + math.sqrt(2.0 * math.pi) / 6.0 * math.sqrt(n) * budget.m2


def harmonic_radicand(ell: int, rate: float) -> float:
    """Worst-case radicand 8 sqrt(4pi) * 1.539 * (log l/l + 2/l + 1/(4l+1)^2) / nu,
    the materialized form of the coefficient-vector bound's interior."""
    _check(ell, rate)
    return (
        8.0
        * math.sqrt(FOUR_PI)
        * GAMMA_3J_UPPER
        * (math.log(ell) / ell + 2.0 / ell + 1.0 / (4 * ell + 1) ** 2)
        / rate
    )


def bound_one_dim(ell: int, rate: float) -> BoundReport:
    """Scalar Wasserstein bound c1 * sqrt(cum4), with the leading-order
    companion (sqrt(3)/(2 pi^2) + (2/3) sqrt(3/(2 pi^3))) sqrt(log l / nu)."""
    _check(ell, rate)
    value = wasserstein_c1() * math.sqrt(cum4_point(ell, rate))
    leading = one_dim_leading_constant() * math.sqrt(math.log(ell) / rate)
    return BoundReport("one_dim_wasserstein", value, ell, rate, leading_term=leading)


def bound_one_dim_kolmogorov(ell: int, rate: float) -> BoundReport:
    """Kolmogorov-distance bound (11 + E[T^4]^(1/2) + E[T^4]^(1/4)) sqrt(E[T^4]-3)."""
    _check(ell, rate, min_ell=1)
    m4 = fourth_moment_point(ell, rate)
    value = (11.0 + math.sqrt(m4) + m4**0.25) * math.sqrt(m4 - 3.0)
    return BoundReport("one_dim_kolmogorov", value, ell, rate)


def bound_fdd_d3(
    ell: int, rate: float, d: int, budget: SmoothnessBudget = UNIT_BUDGET
) -> BoundReport:
    """d-point smooth-metric bound B3(budget; d) * d * sqrt(cum4_point)."""
    _check(ell, rate, min_ell=1)
    if d < 1:
        raise DomainError("dimension must be >= 1")
    c4 = cum4_point(ell, rate)
    value = b3_constant(d, budget) * d * math.sqrt(c4)
    leading = (
        b3_constant(d, budget) * d * math.sqrt(3.0 / (2.0 * math.pi**3) * math.log(ell) / rate)
    )
    return BoundReport("fdd_d3", value, ell, rate, leading_term=leading, d=d, budget=budget)


def bound_harmonic_d3(
    ell: int, rate: float, budget: SmoothnessBudget = UNIT_BUDGET
) -> BoundReport:
    """Coefficient-vector d3 bound: B3(budget; l) times the square root of the
    worst-case radicand. The sharper companion (leading_term) replaces the
    radicand with (2l+1) times the exact coupling sum and never exceeds it."""
    _check(ell, rate)
    b3 = b3_harmonic(ell, budget)
    value = b3 * math.sqrt(harmonic_radicand(ell, rate))
    exact = b3 * math.sqrt((2 * ell + 1) * cum4_coefficient_sum(ell, rate))
    return BoundReport("harmonic_d3", value, ell, rate, leading_term=exact, budget=budget)


def bound_harmonic_d2(
    ell: int, rate: float, budget: SmoothnessBudget = UNIT_BUDGET
) -> BoundReport:
    """Coefficient-vector d2 bound, same radicand with the B2 constant."""
    _check(ell, rate)
    value = b2_harmonic(ell, budget) * math.sqrt(harmonic_radicand(ell, rate))
    return BoundReport("harmonic_d2", value, ell, rate, budget=budget)


def bound_fdd_via_harmonics(
    ell: int, rate: float, d: int, budget: SmoothnessBudget = UNIT_BUDGET
) -> BoundReport:
    """d-point bound routed through the coefficient vector: the composed
    smoothness cap d(2l+1)/(4 sqrt(pi)) M2 + (2 sqrt(2) d/9)(2l+1) M3 times the
    harmonic radicand; `combined` is the minimum with the direct d-point
    bound, realizing the d * (sqrt(l) ^ d) * sqrt(log l / nu) combination."""
    _check(ell, rate)
    if d < 1:
        raise DomainError("dimension must be >= 1")
    n = 2 * ell + 1
    cap = d * n / (4.0 * math.sqrt(math.pi)) * budget.m2 + 2.0 * math.sqrt(2.0) * d / 9.0 * n * budget.m3
    value = cap * math.sqrt(harmonic_radicand(ell, rate))
    direct = bound_fdd_d3(ell, rate, d, budget).value
    return BoundReport(
        "fdd_via_harmonics",
        value,
        ell,
        rate,
        d=d,
        budget=budget,
        combined=min(value, direct),
    )


def bound_functional(rate: float, ell: Optional[int] = None) -> BoundReport:
    """Functional d3 bound (1/4 + 4 sqrt(pi)) sqrt(4 pi / nu), independent of l.

    The constant is assembled as 1/4 + sqrt(4 E||T||^2); the radicand is the
    norm-moment combination, which collapses to 4 pi / nu for every l.
    """
    if rate <= 0:
        raise DomainError("rate must be positive")
    nsq = norm_moments(ell if ell is not None else 1, rate)[0]
    constant = 0.25 + math.sqrt(4.0 * nsq)
    value = constant * math.sqrt(FOUR_PI / rate)
    return BoundReport("functional", value, ell, rate)
