"""Coupling-coefficient engine against exact oracles: sympy's rational wigner
machinery, the package's own exact path, and direct sphere quadrature."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.physics.wigner import wigner_3j as sp_wigner_3j

from sphwave.errors import CapacityError, DomainError
from sphwave.sphfn import sph_harm_table, sphere_quadrature, legendre_quartic_integral
from sphwave.wigner import (
    CGKey,
    Wigner3jKey,
    cg_diag_sq_family,
    clebsch_gordan,
    gaunt_quartic,
    quartic_integral_via_wigner,
    threej_diag_family,
    threej_zero_family,
    wigner3j,
    wigner3j_bound_check,
    wigner3j_exact,
    wigner3j_via_cg,
    wigner3j_zero,
)


class TestWigner3j:
    def test_odd_sum_vanishes(self):
        assert wigner3j(1, 1, 1, 0, 0, 0) == 0.0
        assert wigner3j_zero(1, 1, 1) == 0.0

    def test_112_value(self):
        assert wigner3j(1, 1, 2, 0, 0, 0) == pytest.approx(math.sqrt(2.0 / 15.0), rel=1e-14)
        assert wigner3j_zero(1, 1, 2) == pytest.approx(math.sqrt(2.0 / 15.0), rel=1e-14)

    def test_paired_with_zero_degree(self):
        for ell in (1, 2, 7, 30):
            expected = (-1.0) ** ell / math.sqrt(2 * ell + 1)
            assert wigner3j(ell, ell, 0, 0, 0, 0) == pytest.approx(expected, rel=1e-13)

    def test_zero_m_closed_form_matches_general(self):
        for l1, l2, l3 in [(1, 1, 2), (2, 3, 5), (4, 4, 6), (10, 12, 8), (1, 2, 3)]:
            assert wigner3j_zero(l1, l2, l3) == pytest.approx(
                wigner3j(l1, l2, l3, 0, 0, 0), abs=1e-13
            )

    def test_against_sympy_oracle(self):
        gen = np.random.default_rng(11)
        checked = 0
        while checked < 25:
            l1 = int(gen.integers(0, 7))
            l2 = int(gen.integers(0, 7))
            l3 = int(gen.integers(abs(l1 - l2), l1 + l2 + 1))
            m1 = int(gen.integers(-l1, l1 + 1))
            m2 = int(gen.integers(-l2, l2 + 1))
            m3 = -m1 - m2
            if abs(m3) > l3:
                continue
            expected = float(sp_wigner_3j(l1, l2, l3, m1, m2, m3))
            assert wigner3j(l1, l2, l3, m1, m2, m3) == pytest.approx(expected, abs=1e-14)
            checked += 1

    def test_selection_rules_return_zero(self):
        assert wigner3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle
        assert wigner3j(2, 2, 2, 1, 0, 0) == 0.0  # m sum
        assert wigner3j(2, 2, 2, 3, -3, 0) == 0.0  # |m| > l

    def test_capacity_cap(self):
        with pytest.raises(CapacityError):
            wigner3j(6000, 6000, 0, 0, 0, 0)

    def test_key_dataclasses(self):
        assert Wigner3jKey(1, 1, 2, 0, 0, 0).allowed()
        assert not Wigner3jKey(1, 1, 4, 0, 0, 0).allowed()
        assert Wigner3jKey(1, 1, 2, 0, 0, 0).value() == wigner3j(1, 1, 2, 0, 0, 0)
        assert CGKey(1, 0, 1, 0, 0, 0).value() == clebsch_gordan(1, 0, 1, 0, 0, 0)

    @given(st.integers(0, 10), st.integers(0, 10))
    @settings(max_examples=40, deadline=None)
    def test_column_exchange_symmetry(self, l1, l2):
        l3 = l1 + l2 - min(l1, l2)  # valid by construction
        sign = (-1.0) ** ((l1 + l2 + l3) % 2)
        a = wigner3j(l1, l2, l3, 0, 0, 0)
        assert wigner3j(l2, l1, l3, 0, 0, 0) == pytest.approx(sign * a, abs=1e-14)


class TestExactPath:
    def test_rational_times_sqrt(self):
        e = wigner3j_exact(1, 1, 2, 0, 0, 0)
        assert e.rational == Fraction(1)
        assert e.radicand == Fraction(2, 15)
        assert str(e) == "(1)*sqrt(2/15)"
        assert e.value() == pytest.approx(math.sqrt(2.0 / 15.0), rel=1e-15)

    def test_squared_value_is_exact_fraction(self):
        e = wigner3j_exact(2, 2, 4, 0, 0, 0)
        assert e.squared == Fraction(2, 35)

    def test_float_path_agrees_with_exact(self):
        gen = np.random.default_rng(12)
        checked = 0
        while checked < 40:
            l1 = int(gen.integers(0, 25))
            l2 = int(gen.integers(0, 25))
            l3 = int(gen.integers(abs(l1 - l2), l1 + l2 + 1))
            m1 = int(gen.integers(-l1, l1 + 1))
            m2 = int(gen.integers(-l2, l2 + 1))
            m3 = -m1 - m2
            if abs(m3) > l3:
                continue
            assert wigner3j(l1, l2, l3, m1, m2, m3) == pytest.approx(
                wigner3j_exact(l1, l2, l3, m1, m2, m3).value(), abs=5e-13
            )
            checked += 1


class TestClebschGordan:
    def test_special_value(self):
        assert clebsch_gordan(1, 0, 1, 0, 0, 0) == pytest.approx(-1.0 / math.sqrt(3.0), rel=1e-14)

    def test_m_selection(self):
        assert clebsch_gordan(3, 1, 2, 1, 4, 1) == 0.0  # m1 + m2 != m3

    def test_coupling_weight_bounded(self):
        # unitarity caps every squared coefficient by 1; checked where the
        # summed-cumulant bracket consumes these weights
        for ell in (1, 5, 20):
            for L in range(0, 2 * ell + 1):
                c = clebsch_gordan(ell, 0, ell, 0, L, 0)
                assert c * c <= 1.0 + 1e-14

    def test_roundtrip_through_both_relations(self):
        gen = np.random.default_rng(13)
        checked = 0
        while checked < 200:
            l1 = int(gen.integers(0, 15))
            l2 = int(gen.integers(0, 15))
            l3 = int(gen.integers(abs(l1 - l2), l1 + l2 + 1))
            m1 = int(gen.integers(-l1, l1 + 1))
            m2 = int(gen.integers(-l2, l2 + 1))
            m3 = -m1 - m2
            if abs(m3) > l3:
                continue
            direct = wigner3j(l1, l2, l3, m1, m2, m3)
            assert wigner3j_via_cg(l1, l2, l3, m1, m2, m3) == pytest.approx(direct, abs=1e-13)
            checked += 1

    def test_unitarity_instance(self):
        for ell, L in [(3, 2), (10, 7), (25, 25)]:
            total = math.fsum(
                clebsch_gordan(ell, -m, ell, m, L, 0) ** 2 for m in range(-ell, ell + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-11)


class TestFamilies:
    def test_zero_family_matches_scalar(self):
        for ell in (1, 5, 40, 150):
            fam = threej_zero_family(ell)
            for L in (0, 1, ell, 2 * ell):
                assert fam[L] == pytest.approx(wigner3j_zero(ell, ell, L), abs=1e-13)

    def test_diag_family_matches_exact(self):
        for ell, m in [(6, 4), (30, 0), (60, 25), (120, 120), (150, -41)]:
            fam = threej_diag_family(ell, m)
            for L in np.linspace(0, 2 * ell, 7).astype(int):
                expected = wigner3j_exact(ell, ell, int(L), -m, m, 0).value()
                assert fam[L] == pytest.approx(expected, abs=5e-14)

    def test_diag_family_normalization(self):
        for ell, m in [(20, 3), (200, 77)]:
            fam = threej_diag_family(ell, m)
            L = np.arange(2 * ell + 1)
            assert float(((2 * L + 1) * fam**2).sum()) == pytest.approx(1.0, rel=1e-13)

    def test_cg_diag_sq_family_unitarity(self):
        ell = 40
        total = np.zeros(2 * ell + 1)
        for m in range(-ell, ell + 1):
            total += cg_diag_sq_family(ell, m)
        assert np.abs(total - 1.0).max() <= 1e-11

    def test_order_out_of_range(self):
        with pytest.raises(DomainError):
            threej_diag_family(5, 9)


class TestGauntQuartic:
    def test_monopole(self):
        assert gaunt_quartic(0, 0, 0, 0, 0) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)

    def test_axial_quartet_vs_quadrature(self):
        rule = sphere_quadrature(4)
        tab = sph_harm_table(1, rule.z, rule.phi)
        quad = float(rule.weights @ tab[:, 1] ** 4)
        assert gaunt_quartic(1, 0, 0, 0, 0) == pytest.approx(quad, abs=1e-12)

    def test_mixed_quartet_vs_quadrature(self):
        ell = 2
        rule = sphere_quadrature(4 * ell)
        tab = sph_harm_table(ell, rule.z, rule.phi)
        quad = float(rule.weights @ (tab[:, 3] * tab[:, 1] * tab[:, 4] * tab[:, 0]))
        assert gaunt_quartic(ell, 1, -1, 2, -2) == pytest.approx(quad, abs=1e-12)

    def test_all_tuples_small_degrees(self):
        for ell in (1, 2):
            rule = sphere_quadrature(4 * ell)
            tab = sph_harm_table(ell, rule.z, rule.phi)
            quad = np.einsum("na,nb,nc,nd,n->abcd", tab, tab, tab, tab, rule.weights)
            for ms in itertools.product(range(-ell, ell + 1), repeat=4):
                got = gaunt_quartic(ell, *ms)
                want = quad[ms[0] + ell, ms[1] + ell, ms[2] + ell, ms[3] + ell]
                assert got == pytest.approx(want, abs=1e-9)

    def test_order_error(self):
        with pytest.raises(DomainError):
            gaunt_quartic(2, 3, 0, 0, 0)


class TestQuarticIdentity:
    def test_trivial_degrees(self):
        assert quartic_integral_via_wigner(0) == pytest.approx(1.0, rel=1e-14)
        assert quartic_integral_via_wigner(1) == pytest.approx(0.2, rel=1e-13)

    def test_matches_quadrature_to_fifty(self):
        for ell in (2, 7, 23, 50):
            quad = legendre_quartic_integral(ell)
            coup = quartic_integral_via_wigner(ell)
            assert abs(coup - quad) / quad <= 1e-10


class TestBoundEnvelope:
    def test_spot_values(self):
        assert wigner3j_bound_check(10, 2)
        assert wigner3j_bound_check(100, 50)

    def test_sweep_small(self):
        for ell in range(1, 61):
            for L in range(1, 2 * ell):
                assert wigner3j_bound_check(ell, L)

    def test_domain(self):
        with pytest.raises(DomainError):
            wigner3j_bound_check(10, 0)
