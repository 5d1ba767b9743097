"""Poisson wave model: determinism, exact synthesis identities, statistics."""

import math

import numpy as np
import pytest

from sphwave.errors import DomainError
from sphwave.model import (
    evaluate_field,
    finite_dim_eval,
    harmonic_coefficients,
    load_realization,
    parseval_check,
    sample_realization,
    save_realization,
    synthesize,
)
from sphwave.sphfn import FOUR_PI, SpherePoint


class TestSampling:
    def test_deterministic_in_seed(self):
        a = sample_realization(2.5, seed=42)
        b = sample_realization(2.5, seed=42)
        assert a.count == b.count
        assert np.array_equal(a.xyz, b.xyz)
        c = sample_realization(2.5, seed=43)
        assert a.count != c.count or not np.array_equal(a.xyz, c.xyz)

    def test_points_on_sphere(self):
        r = sample_realization(3.0, seed=1)
        norms = np.linalg.norm(r.xyz, axis=1)
        assert np.abs(norms - 1.0).max() < 1e-12

    def test_expected_count(self):
        lam = FOUR_PI * 1.5
        counts = [sample_realization(1.5, seed=5, replicate=k).count for k in range(400)]
        se = math.sqrt(lam / 400)
        assert abs(np.mean(counts) - lam) < 4 * se

    def test_z_uniformity(self):
        # one large draw: mean z over ~1e6 points within 4 standard errors
        rate = 8.0e4
        r = sample_realization(rate, seed=77)
        se = math.sqrt(1.0 / 3.0 / r.count)
        assert abs(r.xyz[:, 2].mean()) < 4 * se

    def test_rate_validation(self):
        with pytest.raises(DomainError):
            sample_realization(0.0, seed=1)


class TestFieldEvaluation:
    def test_empty_realization_gives_zero(self):
        r = sample_realization(1e-4, seed=3)  # expected count ~ 1e-3
        assert r.count == 0
        p = SpherePoint.from_angles(0.3, 0.4)
        assert evaluate_field(r, 3, p) == 0.0
        assert np.all(harmonic_coefficients(r, 3).coeffs == 0.0)
        assert parseval_check(r, 3, 8) == (0.0, 0.0)

    def test_single_point_at_evaluation_site(self):
        r = sample_realization(1.0, seed=9)
        one = type(r)(rate=1.0, seed=9, replicate=0, xyz=np.array([[0.0, 0.0, 1.0]]))
        p = SpherePoint(0.0, 0.0, 1.0)
        assert evaluate_field(one, 1, p) == pytest.approx(math.sqrt(3.0 / FOUR_PI), rel=1e-14)

    def test_degree_zero_rejected(self):
        r = sample_realization(1.0, seed=2)
        with pytest.raises(DomainError):
            evaluate_field(r, 0, SpherePoint.from_angles(1, 1))

    def test_variance_statistics(self):
        # pointwise variance equals 1: average T^2 over replicates
        p = SpherePoint.from_angles(1.1, 0.2)
        vals = []
        for k in range(500):
            r = sample_realization(5.0, seed=31, replicate=k)
            vals.append(evaluate_field(r, 4, p))
        vals = np.array(vals)
        se_mean = vals.std() / math.sqrt(500)
        assert abs(vals.mean()) < 4 * se_mean
        assert abs(vals.var() - 1.0) < 4 * math.sqrt(2.0 / 500) * 1.5


class TestHarmonicCoefficients:
    def test_synthesis_reproduces_field(self):
        gen = np.random.default_rng(4)
        for ell in (2, 9, 40):
            r = sample_realization(2.0, seed=100 + ell)
            vec = harmonic_coefficients(r, ell)
            tol = 1e-9 * max(r.count, 1) / math.sqrt(r.rate)
            for _ in range(10):
                p = SpherePoint.from_vector(gen.normal(size=3))
                assert abs(synthesize(vec, p) - evaluate_field(r, ell, p)) <= tol

    def test_single_point_parseval_value(self):
        # one governed point: sum_m a_m^2 = 1/nu by the addition formula
        xyz = np.array([[0.6, -0.64, 0.48]])
        xyz /= np.linalg.norm(xyz)
        r = type(sample_realization(1.0, seed=1))(rate=2.0, seed=1, replicate=0, xyz=xyz)
        vec = harmonic_coefficients(r, 2)
        assert float(vec.coeffs @ vec.coeffs) == pytest.approx(1.0 / 2.0, rel=1e-12)

    def test_parseval_identity(self):
        r = sample_realization(4.0, seed=6)
        lhs, rhs = parseval_check(r, 3, 8)
        assert abs(lhs - rhs) <= 1e-8 * max(abs(rhs), 1.0)

    def test_parseval_quadrature_order_guard(self):
        r = sample_realization(1.0, seed=6)
        with pytest.raises(DomainError):
            parseval_check(r, 3, 7)


class TestFiniteDim:
    def test_gamma_diagonal_and_symmetry(self):
        r = sample_realization(2.0, seed=8)
        pts = np.array([[0, 0, 1.0], [1.0, 0, 0], [0, 1.0, 0]])
        f = finite_dim_eval(r, 5, pts)
        assert np.array_equal(np.diag(f.gamma), np.ones(3))
        assert np.array_equal(f.gamma, f.gamma.T)

    def test_gamma_single_point(self):
        r = sample_realization(2.0, seed=8)
        f = finite_dim_eval(r, 5, np.array([[0, 0, 1.0]]))
        assert np.array_equal(f.gamma, np.array([[1.0]]))

    def test_antipodal_pair_degree_one(self):
        r = sample_realization(2.0, seed=8)
        pts = np.array([[0, 0, 1.0], [0, 0, -1.0]])
        f = finite_dim_eval(r, 1, pts)
        assert f.gamma[0, 1] == pytest.approx(-1.0, abs=1e-14)

    def test_duplicate_points_rejected(self):
        r = sample_realization(2.0, seed=8)
        pts = np.array([[0, 0, 1.0], [0, 0, 1.0]])
        with pytest.raises(DomainError):
            finite_dim_eval(r, 2, pts)

    def test_values_match_scalar_evaluation(self):
        r = sample_realization(2.0, seed=12)
        pts = np.array([[0, 0, 1.0], [0.6, 0.8, 0.0]])
        f = finite_dim_eval(r, 3, pts)
        for i, p in enumerate(pts):
            assert f.values[i] == pytest.approx(
                evaluate_field(r, 3, SpherePoint.from_vector(p)), rel=1e-12
            )


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        r = sample_realization(2.0, seed=123)
        path = tmp_path / "real.txt"
        save_realization(r, path)
        back = load_realization(path)
        assert back.rate == r.rate and back.seed == r.seed and back.count == r.count
        assert np.array_equal(back.xyz, r.xyz)

    def test_corrupt_count_detected(self, tmp_path):
        r = sample_realization(2.0, seed=123)
        path = tmp_path / "real.txt"
        save_realization(r, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(DomainError):
            load_realization(path)
