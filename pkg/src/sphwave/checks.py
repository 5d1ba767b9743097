"""One-shot verification suite: every analytic identity and bound property
the package promises, runnable at two depths.

``fast`` keeps degrees small (l <= 20 for the identity suite) and finishes in
well under a minute; ``full`` pushes the same checks to their documented
ranges (l <= 100..200, plus the l = 2000 stability sweep). Each check returns
a CheckResult with the measured worst deviation and its tolerance; the run
manifest aggregates them (overall pass = AND over checks).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bounds as _bounds
from . import model as _model
from . import moments as _moments
from . import sphfn as _sphfn
from . import wigner as _wigner
from .sphfn import FOUR_PI, SpherePoint

__all__ = ["CheckResult", "RunManifest", "run_verify", "VERIFY_LEVELS"]

VERIFY_LEVELS = ("fast", "full")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "measured": self.measured,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass
class RunManifest:
    level: str
    version: str
    started: float
    finished: float = 0.0
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "level": self.level,
            "version": self.version,
            "started": self.started,
            "finished": self.finished,
            "wall_time_s": self.finished - self.started,
            "passed": self.passed,
            "checks": [c.to_json_dict() for c in self.checks],
        }


def _result(name, measured, tolerance, detail=""):
    return CheckResult(name, bool(measured <= tolerance), float(measured), float(tolerance), detail)


def _rng(tag: int) -> np.ndarray:
    return np.random.default_rng(tag)


# ---------------------------------------------------------------------------
# sphfn identities
# ---------------------------------------------------------------------------


def check_legendre_endpoints(full: bool) -> CheckResult:
    lmax = 10000
    at1 = _sphfn.legendre_all(lmax, 1.0)
    atm = _sphfn.legendre_all(lmax, -1.0)
    signs = np.where(np.arange(lmax + 1) % 2 == 0, 1.0, -1.0)
    worst = max(np.abs(at1 - 1.0).max(), np.abs(atm - signs).max())
    return _result("legendre_endpoints", worst, 0.0, f"P_l(+-1) exact through l={lmax}")


def check_addition_formula(full: bool) -> CheckResult:
    gen = _rng(101)
    ells = list(range(1, 21)) + ([50, 100, 150, 200] if full else [200])
    worst = 0.0
    for ell in ells:
        z = gen.uniform(-1, 1, 100)
        ph = gen.uniform(0, 2 * math.pi, 100)
        tab = _sphfn.sph_harm_table(ell, z, ph)
        dev = np.abs((tab**2).sum(axis=1) - (2 * ell + 1) / FOUR_PI).max() / (2 * ell + 1)
        worst = max(worst, dev)
    return _result("addition_formula", worst, 1e-10, "sum_m Y^2 vs (2l+1)/4pi, scaled by 2l+1")


def check_duplication_formula(full: bool) -> CheckResult:
    gen = _rng(102)
    worst = 0.0
    for ell in range(1, 21):
        rule = _sphfn.sphere_quadrature(2 * ell)
        x = SpherePoint.from_vector(gen.normal(size=3))
        y = SpherePoint.from_vector(gen.normal(size=3))
        px = _sphfn.legendre(ell, rule.xyz @ x.vec)
        py = _sphfn.legendre(ell, rule.xyz @ y.vec)
        lhs = (2 * ell + 1) ** 2 / FOUR_PI**2 * float(rule.weights @ (px * py))
        rhs = (2 * ell + 1) / FOUR_PI * _sphfn.legendre(ell, x.dot(y))
        worst = max(worst, abs(lhs - rhs))
    return _result("duplication_formula", worst, 1e-9)


def check_orthonormality(full: bool) -> CheckResult:
    lmax = 20
    rule = _sphfn.sphere_quadrature(2 * lmax)
    cols = []
    for ell in range(0, lmax + 1):
        cols.append(_sphfn.sph_harm_table(ell, rule.z, rule.phi))
    basis = np.hstack(cols)  # (nodes, sum(2l+1))
    gram = basis.T @ (rule.weights[:, None] * basis)
    worst = float(np.abs(gram - np.eye(gram.shape[0])).max())
    return _result("orthonormality", worst, 1e-9, f"Gram of all Y_lm, l <= {lmax}")


def check_legendre_sq_integral(full: bool) -> CheckResult:
    worst = 0.0
    for ell in range(0, 101):
        rule = _sphfn.gauss_legendre_rule(ell + 2)
        val = 0.5 * float(rule.weights @ _sphfn.legendre(ell, rule.nodes) ** 2)
        worst = max(worst, abs(val - 1.0 / (2 * ell + 1)))
    return _result("legendre_sq_integral", worst, 1e-12, "int_0^1 P_l^2 = 1/(2l+1), l <= 100")


def check_high_degree_stability(full: bool) -> CheckResult:
    ell = 2000
    gen = _rng(103)
    z = gen.uniform(-1, 1, 8)
    ph = gen.uniform(0, 2 * math.pi, 8)
    tab = _sphfn.sph_harm_table(ell, z, ph)
    finite = np.isfinite(tab).all()
    raw_ok = all(math.isfinite(_sphfn.assoc_legendre(ell, m, 0.3)) for m in (0, 1, 2, 5))
    dev = np.abs((tab**2).sum(axis=1) - (2 * ell + 1) / FOUR_PI).max() / (2 * ell + 1)
    measured = dev if (finite and raw_ok) else math.inf
    return _result("high_degree_stability", measured, 1e-10, "l = 2000 sweep, no overflow/NaN")


# ---------------------------------------------------------------------------
# wigner identities
# ---------------------------------------------------------------------------


def check_cg_unitarity(full: bool) -> CheckResult:
    pairs = (
        [(l1, l2) for l1 in range(1, 21) for l2 in range(1, 21) if abs(l1 - l2) <= 6]
        if full
        else [(1, 1), (2, 3), (5, 5), (8, 6), (13, 12), (20, 20), (20, 15)]
    )
    worst = 0.0
    for l1, l2 in pairs:
        l3s = sorted({abs(l1 - l2), max(abs(l1 - l2), (l1 + l2) // 2), l1 + l2})
        for i, l3 in enumerate(l3s):
            for l3p in l3s[i:]:
                m3 = min(1, l3)
                m3p = m3 if l3p >= m3 else 0
                total = 0.0
                for m1 in range(-l1, l1 + 1):
                    m2 = m3 - m1
                    m2p = m3p - m1
                    if abs(m2) <= l2 and m2 == m2p:
                        total += _wigner.clebsch_gordan(l1, m1, l2, m2, l3, m3) * _wigner.clebsch_gordan(
                            l1, m1, l2, m2, l3p, m3p
                        )
                target = 1.0 if (l3 == l3p and m3 == m3p) else 0.0
                worst = max(worst, abs(total - target))
    return _result("cg_unitarity", worst, 1e-11, "sum_{m1 m2} C C' = delta delta")


def check_cg_diag_unitarity(full: bool) -> CheckResult:
    ells = list(range(1, 101)) + [150, 200] if full else list(range(1, 21))
    worst = 0.0
    for ell in ells:
        total = np.zeros(2 * ell + 1)
        for m in range(-ell, ell + 1):
            total += _wigner.cg_diag_sq_family(ell, m)
        worst = max(worst, float(np.abs(total - 1.0).max()))
    return _result("cg_diag_unitarity", worst, 1e-11, "sum_m (C_{l,-m;l,m}^{L,0})^2 = 1")


def check_threej_cg_roundtrip(full: bool) -> CheckResult:
    gen = np.random.default_rng(104)
    worst = 0.0
    count = 0
    while count < 1000:
        l1 = int(gen.integers(0, 21))
        l2 = int(gen.integers(0, 21))
        l3 = int(gen.integers(abs(l1 - l2), l1 + l2 + 1))
        m1 = int(gen.integers(-l1, l1 + 1))
        m2 = int(gen.integers(-l2, l2 + 1))
        m3 = -m1 - m2
        if abs(m3) > l3:
            continue
        direct = _wigner.wigner3j(l1, l2, l3, m1, m2, m3)
        via = _wigner.wigner3j_via_cg(l1, l2, l3, m1, m2, m3)
        worst = max(worst, abs(direct - via))
        count += 1
    return _result("threej_cg_roundtrip", worst, 1e-13, "1000 random keys")


def check_threej_symmetry(full: bool) -> CheckResult:
    gen = np.random.default_rng(105)
    worst = 0.0
    count = 0
    while count < 400:
        l1 = int(gen.integers(0, 16))
        l2 = int(gen.integers(0, 16))
        l3 = int(gen.integers(abs(l1 - l2), l1 + l2 + 1))
        m1 = int(gen.integers(-l1, l1 + 1))
        m2 = int(gen.integers(-l2, l2 + 1))
        m3 = -m1 - m2
        if abs(m3) > l3:
            continue
        sign = (-1.0) ** ((l1 + l2 + l3) % 2)
        a = _wigner.wigner3j(l1, l2, l3, m1, m2, m3)
        b = _wigner.wigner3j(l2, l1, l3, m2, m1, m3)
        c = _wigner.wigner3j(l1, l3, l2, m1, m3, m2)
        worst = max(worst, abs(b - sign * a), abs(c - sign * a))
        count += 1
    return _result("threej_symmetry", worst, 1e-13, "column exchange with (-1)^(l1+l2+l3)")


def check_cg_special_values(full: bool) -> CheckResult:
    worst = 0.0
    for ell in range(1, 101):
        c = _wigner.clebsch_gordan(ell, 0, ell, 0, 0, 0)
        worst = max(worst, abs(c * c - 1.0 / (2 * ell + 1)))
        top = _wigner.wigner3j_zero(ell, ell, 0)
        worst = max(worst, abs(top - (-1.0) ** (ell % 2) / math.sqrt(2 * ell + 1)))
    return _result("cg_special_values", worst, 1e-13, "(C_{l,0;l,0}^{0,0})^2 = 1/(2l+1)")


def check_gaunt_vs_quadrature(full: bool) -> CheckResult:
    import itertools

    lmax = 6 if full else 3
    worst = 0.0
    for ell in range(0, lmax + 1):
        rule = _sphfn.sphere_quadrature(4 * ell)
        tab = _sphfn.sph_harm_table(ell, rule.z, rule.phi)
        quad = np.einsum("na,nb,nc,nd,n->abcd", tab, tab, tab, tab, rule.weights, optimize=True)
        for ms in itertools.product(range(-ell, ell + 1), repeat=4):
            v = _wigner.gaunt_quartic(ell, *ms)
            q = quad[ms[0] + ell, ms[1] + ell, ms[2] + ell, ms[3] + ell]
            worst = max(worst, abs(v - q))
    return _result("gaunt_vs_quadrature", worst, 1e-9, f"all m-tuples, l <= {lmax}")


def check_quartic_identity(full: bool) -> CheckResult:
    lmax = 50 if full else 20
    worst = 0.0
    for ell in range(0, lmax + 1):
        a = _sphfn.legendre_quartic_integral(ell)
        b = _wigner.quartic_integral_via_wigner(ell)
        worst = max(worst, abs(a - b) / a)
    return _result("quartic_identity", worst, 1e-10, f"quadrature vs coupling sum, l <= {lmax}")


def check_quartic_asymptotic_trend(full: bool) -> CheckResult:
    target = 3.0 / (2.0 * math.pi**2)
    ells = (100, 1000, 10000) if full else (100, 400, 1600)
    devs = []
    for ell in ells:
        val = ell * ell * _sphfn.legendre_quartic_integral(ell) / math.log(ell)
        devs.append(abs(val - target) / target)
    decreasing = all(devs[i + 1] < devs[i] for i in range(len(devs) - 1))
    measured = 0.0 if decreasing else 1.0
    detail = "relative deviations " + ", ".join(f"{d:.4f}" for d in devs)
    return _result("quartic_asymptotic_trend", measured, 0.0, detail)


def check_wigner_bound_envelope(full: bool) -> CheckResult:
    lmax = 200 if full else 50
    bad = 0
    for ell in range(1, lmax + 1):
        for L in range(1, 2 * ell):
            if not _wigner.wigner3j_bound_check(ell, L):
                bad += 1
    return _result("wigner_bound_envelope", bad, 0, f"all valid L, l <= {lmax}")


# ---------------------------------------------------------------------------
# moments and bounds
# ---------------------------------------------------------------------------


def check_cum4_bracket(full: bool) -> CheckResult:
    lmax = 200 if full else 50
    bad = 0
    for ell in range(2, lmax + 1):
        lo, up = _moments.cum4_bracket(ell, 1.0)
        s = _moments.cum4_coefficient_sum(ell, 1.0)
        if not (lo <= s <= up):
            bad += 1
    return _result("cum4_bracket", bad, 0, f"lower <= sum_m cum4 <= upper, l = 2..{lmax}")


def check_cum4_sum_consistency(full: bool) -> CheckResult:
    worst = 0.0
    for ell in (2, 5, 10) + ((16, 25) if full else ()):
        direct = math.fsum(_moments.cum4_coefficient(ell, m, 3.0) for m in range(-ell, ell + 1))
        collapsed = _moments.cum4_coefficient_sum(ell, 3.0)
        worst = max(worst, abs(direct - collapsed) / collapsed)
    return _result("cum4_sum_consistency", worst, 1e-10, "per-m sum vs collapsed form")


def check_quartic_route_consistency(full: bool) -> CheckResult:
    lmax = 50 if full else 20
    worst = 0.0
    for ell in range(1, lmax + 1):
        a = _moments.cum4_point(ell, 2.0)
        b = _moments.cum4_point_via_wigner(ell, 2.0)
        worst = max(worst, abs(a - b) / a)
    return _result("quartic_route_consistency", worst, 1e-10)


def check_norm_combination(full: bool) -> CheckResult:
    worst = 0.0
    for ell in (1, 5, 20, 200):
        for rate in (0.5, 10.0, 1e4):
            combo = _moments.norm_fourth_combination(ell, rate)
            worst = max(worst, abs(combo - FOUR_PI / rate) / (FOUR_PI**2))
    return _result("norm_combination", worst, 1e-12, "E||T||^4 - (E||T||^2)^2 - 2||S||^2 = 4pi/nu")


def check_functional_independence(full: bool) -> CheckResult:
    vals = [_bounds.bound_functional(7.25, ell).value for ell in (2, 20, 200)]
    worst = max(abs(v - vals[0]) for v in vals)
    expected = (0.25 + 4.0 * math.sqrt(math.pi)) * math.sqrt(FOUR_PI / 7.25)
    worst = max(worst, abs(vals[0] - expected))
    return _result("functional_independence", worst, 1e-12, "same value at l = 2, 20, 200")


def check_bound_properties(full: bool) -> CheckResult:
    worst = 0.0
    budget = _bounds.SmoothnessBudget()
    doubled = budget.scaled(2.0)
    for ell in (2, 10, 50) + ((200,) if full else ()):
        prev = math.inf
        for rate in (1.0, 10.0, 100.0):
            rep = _bounds.bound_one_dim(ell, rate)
            if not (0.0 <= rep.value < prev):
                worst = max(worst, 1.0)
            prev = rep.value
        b1 = _bounds.b3_constant(3, budget)
        b2 = _bounds.b3_constant(3, doubled)
        worst = max(worst, abs(b2 - 2.0 * b1))
        h = _bounds.bound_harmonic_d3(ell, 5.0, budget)
        if not h.leading_term <= h.value * (1 + 1e-12):
            worst = max(worst, 1.0)
        v = _bounds.bound_fdd_via_harmonics(ell, 5.0, 4, budget)
        if not (v.combined <= v.value + 1e-15 and v.combined <= _bounds.bound_fdd_d3(ell, 5.0, 4, budget).value + 1e-15):
            worst = max(worst, 1.0)
    return _result("bound_properties", worst, 1e-12, "monotone in nu, budget-linear, min-combined")


# ---------------------------------------------------------------------------
# model spot checks
# ---------------------------------------------------------------------------


def check_synthesis_duality(full: bool) -> CheckResult:
    gen = _rng(106)
    worst = 0.0
    for ell in (10, 100) if full else (10, 30):
        r = _model.sample_realization(2.0, seed=2024, replicate=ell)
        coeffs = _model.harmonic_coefficients(r, ell)
        pts = [SpherePoint.from_vector(gen.normal(size=3)) for _ in range(50)]
        scale = 1e-9 * max(r.count, 1) / math.sqrt(r.rate)
        for p in pts:
            lhs = _model.synthesize(coeffs, p)
            rhs = _model.evaluate_field(r, ell, p)
            worst = max(worst, abs(lhs - rhs) / scale)
    return _result("synthesis_duality", worst, 1.0, "|sum_m a_m Y_m - T| <= 1e-9 count/sqrt(nu)")


def check_parseval(full: bool) -> CheckResult:
    r = _model.sample_realization(3.0, seed=515)
    worst = 0.0
    for ell in (1, 3, 8):
        lhs, rhs = _model.parseval_check(r, ell, 2 * ell + 2)
        worst = max(worst, abs(lhs - rhs) / max(rhs, 1e-30))
    return _result("parseval", worst, 1e-8, "quadrature norm vs coefficient sum")


_FAST_CHECKS = [
    check_legendre_endpoints,
    check_addition_formula,
    check_duplication_formula,
    check_orthonormality,
    check_legendre_sq_integral,
    check_cg_unitarity,
    check_cg_diag_unitarity,
    check_threej_cg_roundtrip,
    check_threej_symmetry,
    check_cg_special_values,
    check_gaunt_vs_quadrature,
    check_quartic_identity,
    check_quartic_route_consistency,
    check_cum4_bracket,
    check_cum4_sum_consistency,
    check_wigner_bound_envelope,
    check_norm_combination,
    check_functional_independence,
    check_bound_properties,
    check_synthesis_duality,
    check_parseval,
]

_FULL_ONLY_CHECKS = [
    check_high_degree_stability,
    check_quartic_asymptotic_trend,
]


def run_verify(level: str = "fast") -> RunManifest:
    """Run the configured check suite; the manifest lists every check once."""
    from . import __version__

    if level not in VERIFY_LEVELS:
        raise ValueError(f"level must be one of {VERIFY_LEVELS}")
    full = level == "full"
    manifest = RunManifest(level=level, version=__version__, started=time.time())
    checks = _FAST_CHECKS + (_FULL_ONLY_CHECKS if full else [])
    for fn in checks:
        manifest.checks.append(fn(full))
    manifest.finished = time.time()
    return manifest
