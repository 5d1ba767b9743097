"""Stream determinism and compiled-vs-interpreted kernel agreement."""

import math

import numpy as np
import pytest

from sphwave import _kernels as K
from sphwave.rng import SplitStream


class TestSplitStream:
    def test_deterministic_and_isolated(self):
        a = SplitStream(123, 7)
        b = SplitStream(123, 7)
        assert [a.next_u64() for _ in range(16)] == [b.next_u64() for _ in range(16)]
        c = SplitStream(123, 8)
        assert a.next_u64() != c.next_u64()

    def test_uniform_range_and_moments(self):
        s = SplitStream(9, 0)
        u = s.uniform_block(20000)
        assert (u >= 0).all() and (u < 1).all()
        assert abs(u.mean() - 0.5) < 4 * (1 / math.sqrt(12 * 20000))
        assert abs(u.var() - 1 / 12) < 4 * (1 / 12) * math.sqrt(2.0 / 20000) * 3

    def test_poisson_small_mean_moments(self):
        s = SplitStream(10, 0)
        draws = np.array([s.poisson(3.5) for _ in range(20000)])
        se = math.sqrt(3.5 / 20000)
        assert abs(draws.mean() - 3.5) < 4 * se
        assert abs(draws.var() - 3.5) < 4 * 3.5 * math.sqrt(2.0 / 20000) * 2

    def test_poisson_large_mean_moments(self):
        s = SplitStream(11, 0)
        draws = np.array([s.poisson(250.0) for _ in range(8000)])
        se = math.sqrt(250.0 / 8000)
        assert abs(draws.mean() - 250.0) < 4 * se
        # skewness ~ 1/sqrt(mean)
        zs = (draws - draws.mean()) / draws.std()
        assert abs((zs**3).mean() - 1 / math.sqrt(250.0)) < 0.15

    def test_poisson_zero_mean(self):
        assert SplitStream(1, 0).poisson(0.0) == 0

    def test_negative_mean_rejected(self):
        with pytest.raises(ValueError):
            SplitStream(1, 0).poisson(-1.0)


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="compiled kernels unavailable")
class TestCompiledMirrors:
    def test_uniform_block_bitwise(self):
        out_c = np.empty(4096)
        out_p = np.empty(4096)
        K.k_uniform_block(77, 5, out_c)
        K.py_uniform_block(77, 5, out_p)
        assert np.array_equal(out_c, out_p)

    def test_point_kernel_close(self):
        lam = 4 * math.pi * 3.0
        coefs = K.legendre_power_coefs(8)
        a = np.empty(400)
        b = np.empty(400)
        K.k_point(3, 0, 400, lam, 8, coefs, True, 1.0, a)
        K.py_point(3, 0, 400, lam, 8, coefs, True, 1.0, b)
        assert np.array_equal(a, b)

    def test_vector_kernel_one_ulp(self):
        lam = 4 * math.pi * 2.0
        a = np.empty((200, 9))
        b = np.empty((200, 9))
        K.k_vector(5, 0, 200, lam, 4, 0.7, a)
        K.py_vector(5, 0, 200, lam, 4, 0.7, b)
        assert np.max(np.abs(a - b)) <= 4 * np.finfo(float).eps * np.max(np.abs(a))

    def test_recurrence_matches_horner(self):
        coefs = K.legendre_power_coefs(13)
        for t in (-0.9, -0.3, 0.1, 0.77):
            h = K._py_p_eval(13, coefs, True, t)
            r = K._py_p_eval(13, coefs, False, t)
            assert h == pytest.approx(r, abs=1e-12)

    def test_norm_plm_matches_sphfn(self):
        from sphwave.sphfn import sph_harm_table

        z, phi = 0.42, 1.3
        row = sph_harm_table(6, np.array([z]), np.array([phi]))[0]
        acc = np.zeros(13)
        K._py_yrow_accumulate(6, z, phi, acc)
        assert acc == pytest.approx(row, abs=1e-13)


class TestChunkingInvariance:
    def test_point_kernel_chunk_independent(self):
        lam = 4 * math.pi * 1.5
        coefs = K.legendre_power_coefs(5)
        whole = np.empty(300)
        K.py_point(21, 0, 300, lam, 5, coefs, True, 1.0, whole)
        pieces = np.empty(300)
        for a, b in [(0, 100), (100, 131), (131, 300)]:
            K.py_point(21, a, b, lam, 5, coefs, True, 1.0, pieces[a:b])
        assert np.array_equal(whole, pieces)
