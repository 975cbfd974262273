"""Closed-form amplitude bounds, thresholds and exponents of the lower-bound analysis.

Bounds that can blow up (powers with large i or N) are evaluated as logarithms
in mpmath so nothing overflows; the sums used as thresholds stay small and
are accumulated with mpmath's ``fsum`` at the same working precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

DPS = 40


@dataclass(frozen=True)
class BoundValue:
    """An amplitude bound held as its natural log (``-inf`` for zero)."""

    log_raw: mpmath.mpf

    @classmethod
    def zero(cls) -> BoundValue:
        return cls(mpmath.ninf)

    @property
    def raw(self) -> float:
        return float(mpmath.exp(self.log_raw))

    @property
    def clamped(self) -> float:
        return 1.0 if self.log_raw >= 0 else self.raw

    @property
    def as_probability(self) -> float:
        return self.clamped ** 2


def _log(x) -> mpmath.mpf:
    return mpmath.log(mpmath.mpf(x))


def collision_bound(i: int, j: int, N: int) -> BoundValue:
    """Amplitude of holding at least j distinct 2-collisions after i queries."""
    if j < 1:
        raise ValueError("j must be >= 1")
    if i < 0 or N < 1:
        raise ValueError("need i >= 0 and N >= 1")
    if i == 0:
        return BoundValue.zero()
    with mpmath.workdps(DPS):
        # (e * i^{3/2} / (j * sqrt(N)))^j
        return BoundValue(j * (1 + mpmath.mpf(3) / 2 * _log(i) - _log(j) - _log(N) / 2))


def repetition_bound(i: int, ell: int, j: int, N: int) -> BoundValue:
    """Amplitude of holding at least ell distinct j-repetitions after i queries."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if j < 2:
        raise ValueError("j must be >= 2")
    if i < 0 or N < 1:
        raise ValueError("need i >= 0 and N >= 1")
    if i == 0:
        return BoundValue.zero()
    with mpmath.workdps(DPS):
        # (e * i / (ell * N^{(j-1)/2}))^ell
        return BoundValue(ell * (1 + _log(i) - _log(ell) - mpmath.mpf(j - 1) / 2 * _log(N)))


def mu3(ell: int, N: int) -> float:
    if ell < 0:
        raise ValueError("ell must be >= 0")
    with mpmath.workdps(DPS):
        left = 2 * mpmath.e * mpmath.mpf(ell) ** 1.5 / mpmath.sqrt(N)
        right = 10 * mpmath.mpf(N) ** (mpmath.mpf(1) / 8)
        return float(max(left, right))


def _a_i_term(ell: int, N: int):
    # the ell = 0 term refers to argument -1; both uses are clamped to 0
    m = max(ell - 1, 0)
    return mpmath.sqrt(2) * (mpmath.sqrt(mpmath.mpf(mu3(m, N)) / N) + mpmath.mpf(m) / N)


def a_i(i: int, N: int) -> float:
    if i < 0:
        raise ValueError("i must be >= 0")
    with mpmath.workdps(DPS):
        return float(mpmath.fsum(_a_i_term(ell, N) for ell in range(i)))


def a_i_prefix(imax: int, N: int) -> np.ndarray:
    """All of a_i(0..imax, N) at once in float64; used as a cross-check of ``a_i``."""
    m = np.maximum(np.arange(imax) - 1, 0).astype(float)
    mu = np.maximum(2 * math.e * m ** 1.5 / math.sqrt(N), 10 * N ** 0.125)
    terms = math.sqrt(2) * (np.sqrt(mu / N) + m / N)
    return np.concatenate([[0.0], np.cumsum(terms)])


def a_i_cap(N: int) -> float:
    return 2 * math.e * N ** 0.125


def pi_s(s: int) -> float:
    if s < 1:
        raise ValueError("s must be >= 1")
    with mpmath.workdps(DPS):
        p = mpmath.mpf(1)
        for q in range(2, s):
            p = 2 * mpmath.sqrt(q) * mpmath.sqrt(p)
        return float(p)


def mu_s(s: int, ell: int, N: int) -> float:
    if s < 3:
        raise ValueError("s must be >= 3")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    with mpmath.workdps(DPS):
        F = mpmath.mpf
        p = F(pi_s(s - 1))
        c_exp = F(2 ** (s - 2) - 1) / 2 ** (s - 3)
        l_exp = F(2 ** (s - 1) - 1) / 2 ** (s - 2)
        n_exp = F(2 ** (s - 2) - 1) / 2 ** (s - 2)
        left = p * (2 * mpmath.e) ** c_exp * F(ell) ** l_exp / F(N) ** n_exp
        right = 10 * s * s * p * F(N) ** (F(1) / 2 ** s)
        return float(max(left, right))


def a_is(i: int, s: int, N: int) -> float:
    if s < 3:
        raise ValueError("s must be >= 3")
    if i < 0:
        raise ValueError("i must be >= 0")
    with mpmath.workdps(DPS):
        F = mpmath.mpf
        terms = []
        for ell in range(i):
            binom = mpmath.fsum(math.comb(s, r) * F(ell) / F(N) ** r for r in range(2, s + 1))
            terms.append(mpmath.sqrt((s - 1) * F(mu_s(s, ell, N)) / N)
                         + (F(ell) / N) ** (F(s) / 2)
                         + mpmath.sqrt(binom))
        return float(mpmath.fsum(terms))


def a_is_cap(s: int, N: int) -> float:
    """2e * s^2 * Pi_{s-1} * N^{1/2^s}, the growth cap a_is is checked against."""
    return 2 * math.e * s * s * pi_s(s - 1) * N ** (1 / 2 ** s)


def c_k(k: int) -> int:
    if k < 2:
        raise ValueError("k must be >= 2")
    return sum(math.factorial(k) // math.factorial(j - 1) for j in range(2, k + 1))


def one_ksc_amplitude_bound(i: int, k: int, N: int) -> BoundValue:
    if k < 2:
        raise ValueError("k must be >= 2")
    if i < 0 or N < 1:
        raise ValueError("need i >= 0 and N >= 1")
    if i == 0:
        return BoundValue.zero()
    with mpmath.workdps(DPS):
        F = mpmath.mpf
        half_k = F(k) / 2
        first = half_k * _log(k) + F(3) / 2 * _log(i) - half_k * _log(N)
        second = _log(c_k(k)) / 2 + 1 + F(5) / 2 * _log(i) - half_k * _log(N)
        # log(e^a + e^b) without leaving log space
        hi, lo = max(first, second), min(first, second)
        return BoundValue(hi + mpmath.log1p(mpmath.exp(lo - hi)))


def lower_bound_exponent(problem: str, k: int) -> Fraction:
    if problem == "k-rsc":
        if k < 1:
            raise ValueError("k must be >= 1")
        return Fraction(2 ** k - 1, 2 ** (k + 1) - 1)
    if problem == "one-k-sc":
        if k < 2:
            raise ValueError("k must be >= 2")
        return Fraction(k, 5)
    if problem == "k-distinct-2-rsc":
        if k < 1:
            raise ValueError("k must be >= 1")
        return Fraction(3, 7)
    raise ValueError(f"unsupported problem {problem!r}")


def rsc_lower_exponent_as_printed(s: int) -> Fraction:
    """(2^{s-1}-1)/(2^s-1): the s-RSC exponent with the other indexing, 1/3 at s=2."""
    if s < 2:
        raise ValueError("s must be >= 2")
    return Fraction(2 ** (s - 1) - 1, 2 ** s - 1)
