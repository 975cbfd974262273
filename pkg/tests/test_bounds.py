import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from subcover import bounds as b


def test_collision_bound_values():
    assert b.collision_bound(0, 3, 64).raw == 0.0
    assert b.collision_bound(4, 1, 64).raw == pytest.approx(math.e, rel=1e-12)
    assert b.collision_bound(4, 4, 64).raw == pytest.approx((math.e / 4) ** 4, rel=1e-12)
    with pytest.raises(ValueError):
        b.collision_bound(4, 0, 64)


def test_repetition_bound_values():
    assert b.repetition_bound(0, 1, 2, 16).raw == 0.0
    assert b.repetition_bound(2, 1, 2, 16).raw == pytest.approx(math.e / 2, rel=1e-12)
    assert b.repetition_bound(4, 2, 3, 4).raw == pytest.approx((math.e / 2) ** 2, rel=1e-12)
    with pytest.raises(ValueError):
        b.repetition_bound(4, 0, 3, 4)
    with pytest.raises(ValueError):
        b.repetition_bound(4, 1, 1, 4)


def test_bound_value_forms():
    v = b.collision_bound(4, 1, 64)
    assert v.clamped == 1.0 and v.as_probability == 1.0
    w = b.collision_bound(4, 4, 64)
    assert w.clamped == pytest.approx(w.raw) and w.as_probability == pytest.approx(w.raw ** 2)


def test_log_space_no_overflow():
    v = b.collision_bound(2**128, 5, 2**256)
    assert math.isfinite(v.raw) and v.raw > 0
    # (e * 2^192 / (5 * 2^128))^5 in log2
    assert float(v.log_raw) / math.log(2) == pytest.approx(5 * (math.log2(math.e) + 64 - math.log2(5)))
    huge = b.repetition_bound(2**128, 1, 2, 2**16)
    assert huge.clamped == 1.0
    tiny = b.repetition_bound(1, 3, 5, 2**256)
    assert 0.0 <= tiny.raw < 1e-300 and tiny.as_probability == tiny.raw ** 2


def test_mu3_branches():
    N = 2**8
    assert b.mu3(0, N) == pytest.approx(10 * N ** 0.125)
    # left branch: 2e * 2^150 / 2^28 = 2e * 2^122
    assert b.mu3(2**100, 2**56) == pytest.approx(2 * math.e * 2.0 ** 122, rel=1e-12)
    star = brentq(lambda l: 2 * math.e * l ** 1.5 / math.sqrt(N) - 10 * N ** 0.125, 1, 100)
    assert star == pytest.approx((10 * 2**5 / (2 * math.e)) ** (2 / 3), rel=1e-9)
    assert star == pytest.approx(15.1, abs=0.05)
    assert b.mu3(15, N) == pytest.approx(10 * N ** 0.125)
    assert b.mu3(16, N) == pytest.approx(2 * math.e * 16 ** 1.5 / 16)


def test_a_i_small_values():
    assert b.a_i(0, 256) == 0.0
    assert b.a_i(1, 256) == pytest.approx(math.sqrt(2) * math.sqrt(10 * 256 ** 0.125 / 256), rel=1e-12)
    assert b.a_i(1, 256) == pytest.approx(0.3953, abs=5e-5)


@pytest.mark.parametrize("N", [2**8, 2**12])
def test_a_i_prefix_agrees(N):
    table = b.a_i_prefix(int(math.isqrt(N)) + 1, N)
    for i in (0, 1, 2, 5, 17, int(math.isqrt(N))):
        assert table[i] == pytest.approx(b.a_i(i, N), rel=1e-12)


def test_pi_s():
    assert b.pi_s(1) == 1.0 and b.pi_s(2) == 1.0
    assert b.pi_s(3) == pytest.approx(2 * math.sqrt(2))
    assert b.pi_s(4) == pytest.approx(2 * math.sqrt(3) * math.sqrt(2 * math.sqrt(2)))
    with pytest.raises(ValueError):
        b.pi_s(0)
    assert all(b.pi_s(s) <= 4 * s for s in range(1, 41))


def test_mu_s():
    N = 2**16
    assert b.mu_s(3, 0, N) == pytest.approx(90 * N ** 0.125)
    # s = 3 left branch reduces to 2e * l^{3/2} / sqrt(N)
    ell = 10**6
    assert b.mu_s(3, ell, N) == pytest.approx(2 * math.e * ell ** 1.5 / math.sqrt(N), rel=1e-12)
    with pytest.raises(ValueError):
        b.mu_s(2, 0, N)


def test_a_is_direct():
    assert b.a_is(0, 3, 256) == 0.0
    N, s = 256, 3
    expect = 0.0
    for ell in range(4):
        mu = b.mu_s(s, ell, N)
        inner = sum(math.comb(s, r) * ell / N ** r for r in range(2, s + 1))
        expect += math.sqrt((s - 1) * mu / N) + (ell / N) ** (s / 2) + math.sqrt(inner)
    assert b.a_is(4, s, N) == pytest.approx(expect, rel=1e-12)
    with pytest.raises(ValueError):
        b.a_is(3, 2, N)


@pytest.mark.parametrize("s", [3, 4])
def test_a_is_stays_below_cap(s):
    N = 2**16
    cap = b.a_is_cap(s, N)
    assert cap == pytest.approx(2 * math.e * s * s * b.pi_s(s - 1) * N ** (1 / 2 ** s))
    # terms are positive, so the sum is increasing and the last point decides
    top = s * math.isqrt(N)
    assert b.a_is(top, s, N) <= cap
    assert b.a_is(top // 3, s, N) < b.a_is(top, s, N)


def test_c_k():
    assert b.c_k(2) == 2
    assert b.c_k(4) == 40
    assert b.c_k(6) == sum(math.factorial(6) // math.factorial(j - 1) for j in range(2, 7))
    with pytest.raises(ValueError):
        b.c_k(1)


def test_one_ksc_bound():
    assert b.one_ksc_amplitude_bound(0, 3, 64).raw == 0.0
    i, k, N = 5, 3, 2**20
    direct = k ** (k / 2) * i ** 1.5 / N ** (k / 2) + math.sqrt(b.c_k(k)) * math.e * i ** 2.5 / N ** (k / 2)
    assert b.one_ksc_amplitude_bound(i, k, N).raw == pytest.approx(direct, rel=1e-12)
    with pytest.raises(ValueError):
        b.one_ksc_amplitude_bound(1, 1, 4)


def test_lower_bound_exponents():
    assert b.lower_bound_exponent("one-k-sc", 5) == 1
    assert b.lower_bound_exponent("k-rsc", 2) == Fraction(3, 7)
    assert b.lower_bound_exponent("k-rsc", 1) == Fraction(1, 3)
    assert b.lower_bound_exponent("k-distinct-2-rsc", 4) == Fraction(3, 7)
    assert b.rsc_lower_exponent_as_printed(2) == Fraction(1, 3)
    assert b.rsc_lower_exponent_as_printed(3) == Fraction(3, 7)
    with pytest.raises(ValueError):
        b.lower_bound_exponent("two-rsc", 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(2, 4), st.integers(1, 2**40))
def test_bounds_monotone_in_queries(i, j, jj, N):
    assert b.collision_bound(i, j, N).raw <= b.collision_bound(i + 1, j, N).raw
    assert b.repetition_bound(i, j, jj, N).raw <= b.repetition_bound(i + 1, j, jj, N).raw
    assert b.one_ksc_amplitude_bound(i, jj, N).raw <= b.one_ksc_amplitude_bound(i + 1, jj, N).raw


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 60), st.integers(2, 2**20))
def test_threshold_sums_monotone(i, N):
    assert b.a_i(i, N) <= b.a_i(i + 1, N)
    assert b.mu3(i, N) <= b.mu3(i + 1, N)
    assert b.a_is(i, 3, N) <= b.a_is(i + 1, 3, N)


def test_a_i_cap_sweep_small():
    N = 2**8
    vals = b.a_i_prefix(math.isqrt(N) + 1, N)
    assert np.all(vals < b.a_i_cap(N))
