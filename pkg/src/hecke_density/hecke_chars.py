"""Hecke characters Xi_k on ideals of Z[i] and the coefficient algebra of L_k(s).

Xi_k(a) = exp(4 i k theta_a), theta_a the first-quadrant generator angle.  The
family is F(K) = {L_k : 1 <= k <= K}; every L_k has conductor 4, root number 1
and local parameters 2|k|, 2|k| + 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .errors import DomainError
from .gaussian_arith import GaussianPrimeIdeal, PrimeClass, classify, is_prime, two_square_decompose

@dataclass(frozen=True)
class CharacterIndex:
    k: int
    K: int

    def __post_init__(self) -> None:
        if self.K < 1:
            raise DomainError("family size K must be >= 1")


@dataclass(frozen=True)
class LFunctionMeta:
    """Archimedean and conductor data of L_k."""

    k: int

    @property
    def conductor(self) -> int:
        return 4

    @property
    def kappa1(self) -> int:
        return abs(2 * self.k)

    @property
    def kappa2(self) -> int:
        return abs(2 * self.k) + 1

    @property
    def root_number(self) -> int:
        return 1


def xi(k: int, ideal: GaussianPrimeIdeal | float) -> complex:
    """Xi_k of an ideal (or of a bare first-quadrant angle)."""
    theta = ideal.theta if isinstance(ideal, GaussianPrimeIdeal) else float(ideal)
    return cmath.exp(4j * k * theta)


def _prime_angle(p: int) -> float:
    a, b = two_square_decompose(p)
    return math.atan2(b, a)


def _check_prime(p: int) -> PrimeClass:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return classify(p)


def coeff_A(k: int, p: int, l: int) -> float:
    """Coefficient of p^{-ls} in L_k(s): the sum of Xi_k over ideals of norm p^l."""
    if l < 0:
        raise DomainError("exponent l must be >= 0")
    cls = _check_prime(p)
    if l == 0:
        return 1.0
    if cls is PrimeClass.RAMIFIED:
        return -1.0 if (l * k) % 2 else 1.0
    if cls is PrimeClass.INERT:
        return 0.0 if l % 2 else 1.0
    theta = _prime_angle(p)
    if l % 2 == 0:
        terms = [2.0 * math.cos(8 * k * j * theta) for j in range(1, l // 2 + 1)]
        return math.fsum([1.0, *terms])
    return math.fsum(2.0 * math.cos(4 * k * m * theta) for m in range(1, l + 1, 2))


def coeff_a(k: int, p: int, l: int) -> float:
    """Coefficient of Lambda(p^l) p^{-ls} in -L_k'/L_k(s)."""
    if l < 1:
        raise DomainError("exponent l must be >= 1")
    cls = _check_prime(p)
    if cls is PrimeClass.RAMIFIED:
        return -1.0 if (l * k) % 2 else 1.0
    if cls is PrimeClass.INERT:
        return 0.0 if l % 2 else 2.0
    return 2.0 * math.cos(4 * k * l * _prime_angle(p))


def prime_power_split(n: int) -> tuple[int, int] | None:
    """``(p, l)`` with n = p^l, or None when n is not a prime power."""
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            l = 0
            while n % p == 0:
                n //= p
                l += 1
            return (p, l) if n == 1 else None
        p += 1
    return n, 1


def coeff_c(k: int, n: int) -> float:
    """Lambda(n) a_k(n); zero off prime powers."""
    if n < 2:
        raise DomainError("n must be >= 2")
    pl = prime_power_split(n)
    if pl is None:
        return 0.0
    p, l = pl
    return math.log(p) * coeff_a(k, p, l)


def coeff_mu(k: int, p: int, h: int) -> float:
    """Coefficient of p^{-hs} in 1/L_k(s)."""
    if h < 0:
        raise DomainError("h must be >= 0")
    cls = _check_prime(p)
    if h == 0:
        return 1.0
    if h == 1:
        return -coeff_A(k, p, 1)
    if h == 2:
        return {PrimeClass.INERT: -1.0, PrimeClass.SPLIT: 1.0, PrimeClass.RAMIFIED: 0.0}[cls]
    return 0.0


def dirichlet_coefficient(k: int, n: int) -> float:
    """Coefficient of n^{-s} in L_k(s), by multiplicativity."""
    if n < 1:
        raise DomainError("n must be >= 1")
    out = 1.0
    p = 2
    while p * p <= n:
        if n % p == 0:
            l = 0
            while n % p == 0:
                n //= p
                l += 1
            out *= coeff_A(k, p, l)
        p += 1
    if n > 1:
        out *= coeff_A(k, n, 1)
    return out


# (class, h, n parity) -> lim_K <mu_k(p^h) A_k(p^n)>_K ; absent keys are 0
DELTA_TABLE = MappingProxyType(
    {
        (PrimeClass.RAMIFIED, 0, 0): 1,
        (PrimeClass.RAMIFIED, 1, 1): -1,
        (PrimeClass.SPLIT, 0, 0): 1,
        (PrimeClass.SPLIT, 1, 1): -2,
        (PrimeClass.SPLIT, 2, 0): 1,
        (PrimeClass.INERT, 0, 0): 1,
        (PrimeClass.INERT, 2, 0): -1,
    }
)


def delta_limit(prime_class: PrimeClass, h: int, n: int) -> int:
    return DELTA_TABLE.get((prime_class, h, n % 2), 0)


def _A_over_k(ks: np.ndarray, p: int, l: int) -> np.ndarray:
    cls = classify(p)
    if l == 0:
        return np.ones(ks.size)
    if cls is PrimeClass.RAMIFIED:
        return np.where((ks * l) % 2 == 1, -1.0, 1.0)
    if cls is PrimeClass.INERT:
        return np.full(ks.size, 0.0 if l % 2 else 1.0)
    theta = _prime_angle(p)
    # sum over ideals of norm p^l: exp(4ik(2j - l)theta), j = 0..l
    js = np.arange(l + 1)
    return np.cos(4.0 * np.outer(ks, 2 * js - l) * theta).sum(axis=1)


def delta_average_empirical(p: int, h: int, n: int, K: int) -> float:
    """(1/K) sum_{k <= K} mu_k(p^h) A_k(p^n) by direct summation."""
    if K < 1:
        raise DomainError("K must be >= 1")
    _check_prime(p)
    ks = np.arange(1, K + 1)
    if h == 0:
        mu = np.ones(K)
    elif h == 1:
        mu = -_A_over_k(ks, p, 1)
    else:
        mu = np.full(K, coeff_mu(1, p, h))
    return math.fsum(mu * _A_over_k(ks, p, n)) / K


def char_average(ideal: GaussianPrimeIdeal | float, K: int) -> complex:
    """(1/K) sum_{k=1}^K Xi_k(ideal) = exp(2i(K+1)theta) sin(2K theta)/(K sin(2 theta)).

    The half-angle form keeps full relative accuracy as theta -> 0, where the
    geometric form x(1 - x^K)/(K(1 - x)) cancels.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    theta = ideal.theta if isinstance(ideal, GaussianPrimeIdeal) else float(ideal)
    # 2 theta = m pi + d with |d| <= pi/2, so the ratio is well conditioned at every resonance
    d = math.remainder(2 * theta, math.pi)
    m = round((2 * theta - d) / math.pi)
    sign = -1.0 if (m * (K - 1)) % 2 else 1.0
    ratio = 1.0 if d == 0 else math.sin(K * d) / (K * math.sin(d))
    return cmath.exp(2j * (K + 1) * theta) * sign * ratio


def char_average_many(theta: np.ndarray, K: int) -> np.ndarray:
    """Vectorised ``char_average`` over an array of angles."""
    if K < 1:
        raise DomainError("K must be >= 1")
    theta = np.asarray(theta, dtype=np.float64)
    d = np.remainder(2 * theta + math.pi / 2, math.pi) - math.pi / 2
    m = np.rint((2 * theta - d) / math.pi).astype(np.int64)
    sign = np.where((m * (K - 1)) % 2 == 1, -1.0, 1.0)
    zero = d == 0
    ratio = np.where(zero, 1.0, np.sin(K * d) / (K * np.where(zero, 1.0, np.sin(d))))
    return np.exp(2j * (K + 1) * theta) * sign * ratio


def _angle_of_prime(p: int) -> float:
    cls = classify(p)
    if cls is PrimeClass.RAMIFIED:
        return math.pi / 4
    if cls is PrimeClass.INERT:
        return 0.0
    return _prime_angle(p)


def mu_A_expansion(p: int, h: int, n: int) -> dict[int, float]:
    """mu_k(p^h) A_k(p^n) written as sum_m c_m exp(4 i k m theta_p); returns {m: c_m}."""
    cls = _check_prime(p)
    if cls is PrimeClass.INERT:
        a = {0: 1.0} if n % 2 == 0 else {}
        mu = {0: {0: 1.0}, 2: {0: -1.0}}.get(h, {})
    elif cls is PrimeClass.RAMIFIED:
        a = {n: 1.0}
        mu = {0: {0: 1.0}, 1: {1: -1.0}}.get(h, {})
    else:
        a = {}
        for j in range(n + 1):
            a[2 * j - n] = a.get(2 * j - n, 0.0) + 1.0
        mu = {0: {0: 1.0}, 1: {1: -1.0, -1: -1.0}, 2: {0: 1.0}}.get(h, {})
    out: dict[int, float] = {}
    for m1, c1 in mu.items():
        for m2, c2 in a.items():
            out[m1 + m2] = out.get(m1 + m2, 0.0) + c1 * c2
    return {m: c for m, c in out.items() if c != 0}


def _resonant(m: int, theta: float) -> bool:
    # exp(4 i m theta) == 1
    x = 4 * m * theta / (2 * math.pi)
    return abs(x - round(x)) < 1e-12


def delta_from_expansion(p: int, h: int, n: int) -> float:
    """lim_K <mu_k(p^h) A_k(p^n)>_K: the resonant frequencies of ``mu_A_expansion``."""
    theta = _angle_of_prime(p)
    return math.fsum(c for m, c in mu_A_expansion(p, h, n).items() if _resonant(m, theta))


def delta_rate_constant(p: int, h: int, n: int) -> float:
    """C with |<mu_k(p^h) A_k(p^n)>_K - delta| <= C/K for every K >= 1.

    Each non-resonant frequency contributes |c_m|/|sin(2 m theta)|, the bound
    on a normalised geometric sum of exp(4 i k m theta).
    """
    theta = _angle_of_prime(p)
    return math.fsum(
        abs(c) / abs(math.sin(2 * m * theta))
        for m, c in mu_A_expansion(p, h, n).items()
        if not _resonant(m, theta)
    )
