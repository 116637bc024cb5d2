"""Closed-form constants of the one-level density expansion.

Each constant is computed once per cutoff and memoised.  Truncated sums carry
an explicit tail bound; the psi-integral constants carry only an empirical
stability estimate (difference under cutoff doubling), since the prime number
theorem error term has no usable explicit constant.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Callable
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .accel import alternating_sum
from .errors import ConsistencyError, DomainError
from .gaussian_arith import PRIMES, psi_weighted_integral

DEFAULT_PRIME_CUTOFF = 10**6
DEFAULT_PSI_CUTOFF = 10**6
CJ_MAX = 8
ETA_TERMS = 30
ETA_TOLERANCE = 1e-10

LOG2 = math.log(2)
LOGPI = math.log(math.pi)


class _Memo:
    """Per-key single initialisation; values are immutable once stored."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._values: dict = {}

    def get(self, key, compute: Callable):
        try:
            return self._values[key]
        except KeyError:
            pass
        with self._lock:
            if key not in self._values:
                self._values[key] = compute()
            return self._values[key]

    def clear(self) -> None:
        with self._lock:
            self._values.clear()


_MEMO = _Memo()


def clear_cache() -> None:
    _MEMO.clear()


# ---------------------------------------------------------------------------
# gamma_0, eta(i), L'/L(1, chi_1)


def _bernoulli_even(count: int) -> list[Fraction]:
    """B_2, B_4, ..., B_{2 count} from the Akiyama-Tanigawa recurrence."""
    top = 2 * count
    b = []
    a = [Fraction(0)] * (top + 1)
    for m in range(top + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        b.append(a[0])
    return [b[2 * k] for k in range(1, count + 1)]


def _log2_fraction(terms: int = 40) -> Fraction:
    """log 2 = 2 atanh(1/3) as a rational with error below 3^{-2 terms}."""
    return 2 * sum(Fraction(1, (2 * m + 1) * 3 ** (2 * m + 1)) for m in range(terms))


def _harmonic_minus_log(e: int, terms: int) -> Fraction:
    """H_n - log n - 1/(2n) + sum_k B_{2k}/(2k n^{2k}) at n = 2^e, in exact rationals."""
    n = 2**e
    h = sum(Fraction(1, i) for i in range(1, n + 1))
    corr = sum(bk / (2 * (k + 1) * n ** (2 * (k + 1))) for k, bk in enumerate(_bernoulli_even(terms)))
    return h - e * _log2_fraction() - Fraction(1, 2 * n) + corr


def euler_gamma() -> float:
    """Euler-Mascheroni constant by Euler-Maclaurin summation of H_n - log n, rounded once."""
    return _MEMO.get("gamma0", lambda: float(_harmonic_minus_log(5, 8)))


def eta_product(terms: int = ETA_TERMS) -> float:
    """e^{-pi/12} prod_{n <= terms} (1 - e^{-2 pi n})."""
    logs = [math.log1p(-math.exp(-2 * math.pi * n)) for n in range(1, terms + 1)]
    return math.exp(math.fsum([-math.pi / 12, *logs]))


def eta_gamma_formula() -> float:
    """Gamma(1/4) / (2 pi^{3/4})."""
    return math.gamma(0.25) / (2 * math.pi**0.75)


def eta_i() -> tuple[float, float]:
    """``(eta(i), log|eta(i)|)``; the q-product is checked against the Gamma(1/4) formula."""

    def compute():
        eta = eta_product()
        check = eta_gamma_formula()
        if abs(eta - check) > ETA_TOLERANCE:
            raise ConsistencyError(f"eta(i) product {eta!r} disagrees with Gamma(1/4) formula {check!r}")
        return eta, math.log(eta)

    return _MEMO.get("eta_i", compute)


def lprime_over_l_1() -> float:
    """L'/L(1, chi_1) = gamma_0 - 2 log 2 - 4 log|eta(i)| (Kronecker limit formula)."""
    return math.fsum([euler_gamma(), -2 * LOG2, -4 * eta_i()[1]])


def lprime_over_l_1_series(n: int = 40) -> float:
    """Independent value: L'(1, chi_1) as an accelerated alternating series over L(1, chi_1) = pi/4."""
    lprime = alternating_sum(lambda k: -math.log(2 * k + 1) / (2 * k + 1), n)
    return lprime / (math.pi / 4)


# ---------------------------------------------------------------------------
# prime sums


def p3_tail_bound(P: float) -> float:
    """int_P^inf log t/(t^2 - 1) dt = sum_m P^{1-2m}(log P/(2m-1) + 1/(2m-1)^2)."""
    if P <= 1:
        raise DomainError("tail bound needs P > 1")
    logP = math.log(P)
    terms = []
    m = 1
    while True:
        k = 2 * m - 1
        term = P ** (-k) * (logP / k + 1.0 / (k * k))
        terms.append(term)
        if term < 1e-18 * terms[0] or m > 200:
            break
        m += 1
    return math.fsum(terms)


def _p3_terms(P: int) -> np.ndarray:
    primes = PRIMES.get(P)
    p = primes[primes % 4 == 3].astype(np.float64)
    return np.log(p) / (p * p - 1.0)


def prime_sum_P3(P: int) -> tuple[float, float]:
    """``(sum_{p <= P, p = 3 mod 4} log p/(p^2 - 1), tail bound)``."""
    if P < 3:
        raise DomainError("prime_sum_P3 needs P >= 3")
    P = int(P)
    return _MEMO.get(("P3", P), lambda: (math.fsum(_p3_terms(P)), p3_tail_bound(P)))


# ---------------------------------------------------------------------------
# psi-integral constants


def c1_constant(T: float = DEFAULT_PSI_CUTOFF) -> float:
    """int_1^T (psi(t) - t)/t^2 dt + 1."""
    if T < 1:
        raise DomainError("c1 needs T >= 1")
    return _MEMO.get(("c1", float(T)), lambda: psi_weighted_integral(T, 1.0) + 1.0)


def cj_weight(j: int) -> np.polynomial.Polynomial:
    """(1/(j-2)!) u^{j-2} (u/(j-1) - 1) as a polynomial in u = log t."""
    if not 2 <= j <= CJ_MAX:
        raise DomainError(f"c_j is defined here for 2 <= j <= {CJ_MAX}")
    coef = np.zeros(j)
    coef[j - 2] = -1.0
    coef[j - 1] = 1.0 / (j - 1)
    return np.polynomial.Polynomial(coef / math.factorial(j - 2))


def cj_constant(j: int, T: float = DEFAULT_PSI_CUTOFF) -> float:
    """(1/(j-2)!) int_1^T (log t)^{j-2}(log t/(j-1) - 1)(psi(t) - t)/t^2 dt."""
    w = cj_weight(j)
    if T < 1:
        raise DomainError("c_j needs T >= 1")
    return _MEMO.get(("cj", j, float(T)), lambda: psi_weighted_integral(T, w))


def c_sequence(J: int, T: float = DEFAULT_PSI_CUTOFF) -> list[float]:
    """[c_1, ..., c_J]."""
    return [c1_constant(T)] + [cj_constant(j, T) for j in range(2, J + 1)]


def d_constant(P: int = DEFAULT_PRIME_CUTOFF) -> float:
    """3 log 2 - 1 - log pi + 4 log|eta(i)| - 2 P3."""
    p3, _ = prime_sum_P3(P)
    return math.fsum([3 * LOG2, -1.0, -LOGPI, 4 * eta_i()[1], -2 * p3])


def c_constant(P: int = DEFAULT_PRIME_CUTOFF, T: float = DEFAULT_PSI_CUTOFF) -> float:
    """d - c_1 - gamma_0."""
    return d_constant(P) - c1_constant(T) - euler_gamma()


def d_uncertainty(P: int = DEFAULT_PRIME_CUTOFF) -> float:
    return 2 * prime_sum_P3(P)[1]


def c1_stability(T: float = DEFAULT_PSI_CUTOFF) -> float:
    """|c_1(2T) - c_1(T)|, the empirical uncertainty of c_1."""
    return abs(c1_constant(2 * T) - c1_constant(T))


def c_uncertainty(P: int = DEFAULT_PRIME_CUTOFF, T: float = DEFAULT_PSI_CUTOFF) -> float:
    return d_uncertainty(P) + c1_stability(T)


@dataclass(frozen=True)
class ConstantsReport:
    gamma0: float
    eta_i: float
    log_abs_eta_i: float
    lprime_over_l_1: float
    P3: float
    P3_tail_bound: float
    c1: float
    cj: list
    d: float
    c: float
    cutoffs: list

    def to_dict(self) -> dict:
        return asdict(self)


def constants_report(P: int = DEFAULT_PRIME_CUTOFF, T: float = DEFAULT_PSI_CUTOFF) -> ConstantsReport:
    eta, log_eta = eta_i()
    p3, tail = prime_sum_P3(P)
    return ConstantsReport(
        gamma0=euler_gamma(),
        eta_i=eta,
        log_abs_eta_i=log_eta,
        lprime_over_l_1=lprime_over_l_1(),
        P3=p3,
        P3_tail_bound=tail,
        c1=c1_constant(T),
        cj=[cj_constant(j, T) for j in range(2, CJ_MAX + 1)],
        d=d_constant(P),
        c=c_constant(P, T),
        cutoffs=[int(P), T],
    )
