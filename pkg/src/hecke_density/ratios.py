"""Ratios-recipe quantities for the family F(K).

G(alpha, gamma) = prod_p G_p is the Euler product assembled from the
k-averages of the coefficients; it factors as Y * A with

    Y = L(1+2g, chi_1) zeta(1+2a) / (L(1+a+g, chi_1) zeta(1+a+g))

and A an absolutely convergent product over odd primes.  With
x = p^{-1-a-g}, y = p^{-1-2g} the local factors of A are

    p = 3 mod 4:  (1 - y^2)/(1 - x^2)
    p = 1 mod 4:  1 - ((x - y)/(1 - x))^2

and the factor at 2 is identically 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .accel import alternating_sum
from .errors import AccuracyError, DomainError
from .gaussian_arith import PRIMES, PrimeClass, classify, is_prime

DEFAULT_EULER_CUTOFF = 10**6
ZETA_TOLERANCE = 1e-9
_SERIES_TERMS = (48, 60)


@dataclass(frozen=True)
class ShiftPoint:
    """Shifts (alpha, gamma) with -1/4 < Re alpha < 1/4."""

    alpha: complex
    gamma: complex

    def __post_init__(self) -> None:
        a = complex(self.alpha)
        if not -0.25 < a.real < 0.25:
            raise DomainError(f"Re(alpha) = {a.real} outside (-1/4, 1/4)")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "gamma", complex(self.gamma))

    def in_family_range(self, K: int) -> bool:
        """Whether Re(gamma) > 1/log K, the family-size side condition."""
        return K > 1 and self.gamma.real > 1.0 / math.log(K)


@dataclass(frozen=True)
class EulerProductValue:
    value: complex
    cutoff: int
    tail_estimate: float


def _real_if_close(z: complex) -> complex | float:
    return z.real if z.imag == 0 else z


def _fsum_complex(values) -> complex:
    arr = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


# ---------------------------------------------------------------------------
# gamma-factor average


def _check_alpha(alpha: complex) -> complex:
    alpha = complex(alpha)
    if not abs(alpha.real) < 0.25:
        raise DomainError(f"Re(alpha) = {alpha.real} outside (-1/4, 1/4)")
    return alpha


def gamma_ratio_average_exact(alpha: complex, K: int):
    """(1/K) sum_{k<=K} Gamma(bk - alpha)/Gamma(bk + alpha), bk = 1/2 + 2k."""
    alpha = _check_alpha(alpha)
    if K < 1:
        raise DomainError("K must be >= 1")
    kb = 0.5 + 2.0 * np.arange(1, K + 1)
    if alpha.imag == 0:
        a = alpha.real
        return math.fsum(np.exp(special.gammaln(kb - a) - special.gammaln(kb + a))) / K
    terms = np.exp(special.loggamma(kb - alpha) - special.loggamma(kb + alpha))
    return _fsum_complex(terms) / K


def gamma_ratio_average_asymptotic(alpha: complex, K: int):
    """(2K)^{-2 alpha}/(1 - 2 alpha)."""
    alpha = _check_alpha(alpha)
    if K < 1:
        raise DomainError("K must be >= 1")
    if alpha.imag == 0:
        a = alpha.real
        return (2.0 * K) ** (-2 * a) / (1 - 2 * a)
    return cmath.exp(-2 * alpha * math.log(2 * K)) / (1 - 2 * alpha)


# ---------------------------------------------------------------------------
# local factors and A


def G_local(prime_class: PrimeClass, p: int, s: ShiftPoint):
    """The local factor G_p(alpha, gamma) in closed form."""
    if not is_prime(p) or classify(p) is not prime_class:
        raise DomainError(f"{p} is not a prime of class {prime_class.value}")
    a, g = s.alpha, s.gamma
    if (1 + 2 * a).real <= 0 or (1 + a + g).real <= 0 or (1 + 2 * g).real <= 0:
        raise DomainError("shifts too far left for the local factor")
    den = 1 - p ** (-1 - 2 * a)
    x = p ** (-1 - (a + g))
    y = p ** (-1 - 2 * g)
    if prime_class is PrimeClass.INERT:
        num = 1 - y
    elif prime_class is PrimeClass.SPLIT:
        num = 1 - 2 * x + y
    else:
        num = 1 - x
    return _real_if_close(complex(num / den))


def _odd_primes(P: int) -> tuple[np.ndarray, np.ndarray]:
    primes = PRIMES.get(P)
    return primes[primes % 4 == 3], primes[primes % 4 == 1]


def _log_A_terms(alpha: complex, gamma: complex, P: int) -> np.ndarray:
    p3, p1 = _odd_primes(P)
    e_x = -1 - (alpha + gamma)
    e_y = -1 - 2 * gamma
    out = []
    for primes, inert in ((p3, True), (p1, False)):
        logp = np.log(primes.astype(np.float64))
        x = np.exp(e_x * logp)
        y = np.exp(e_y * logp)
        if inert:
            out.append(np.log1p(-y * y) - np.log1p(-x * x))
        else:
            u = (x - y) / (1 - x)
            out.append(np.log1p(-u * u))
    return np.concatenate(out)


def _A_tail(alpha: complex, gamma: complex, P: int) -> float:
    # each factor is 1 + O(max(|x|,|y|)^2), summed over integers n > P
    e = 2 + 2 * min((alpha + gamma).real, 2 * gamma.real)
    if e <= 1:
        return math.inf
    xP = P ** (-1 - (alpha + gamma).real)
    return 4.0 * P ** (1 - e) / ((e - 1) * (1 - xP) ** 2)


def A_product(s: ShiftPoint, P: int = DEFAULT_EULER_CUTOFF) -> EulerProductValue:
    """The arithmetic factor A(alpha, gamma) truncated at p <= P."""
    if P < 2:
        raise DomainError("cutoff P must be >= 2")
    a, g = s.alpha, s.gamma
    terms = _log_A_terms(a, g, P)
    if a.imag == 0 and g.imag == 0:
        value: complex | float = math.exp(math.fsum(terms.real))
    else:
        value = cmath.exp(_fsum_complex(terms))
    log_tail = _A_tail(a, g, P)
    return EulerProductValue(value, int(P), abs(value) * math.expm1(log_tail))


def _A_value(alpha: complex, gamma: complex, P: int):
    return A_product(ShiftPoint(alpha, gamma), P).value


def _log_sum_tail(e: float, P: int) -> float:
    # int_P^inf log t / (t^e - 1) dt <= (P^{1-e}(log P/(e-1) + 1/(e-1)^2)) / (1 - P^{-e})
    logP = math.log(P)
    return P ** (1 - e) * (logP / (e - 1) + 1 / (e - 1) ** 2) / (1 - P ** (-e))


def A_diag_derivative(r: float, P: int = DEFAULT_EULER_CUTOFF) -> float:
    """d/d(alpha) A(alpha, gamma) at alpha = gamma = r: -2 sum_{p = 3 (4)} log p/(p^{2+4r} - 1)."""
    if r <= -0.25:
        raise DomainError("A_diag_derivative needs r > -1/4")
    p3, _ = _odd_primes(P)
    p = p3.astype(np.float64)
    logp = np.log(p)
    return -2.0 * math.fsum(logp / np.expm1((2 + 4 * r) * logp))


def A_diag_derivative_tail(r: float, P: int = DEFAULT_EULER_CUTOFF) -> float:
    return 2.0 * _log_sum_tail(2 + 4 * r, P)


def A_antidiag_derivative_at0(P: int = DEFAULT_EULER_CUTOFF) -> float:
    """d/dr A(-r, r) at r = 0: 4 sum_{p = 3 (4)} log p/(p^2 - 1)."""
    p3, _ = _odd_primes(P)
    p = p3.astype(np.float64)
    return 4.0 * math.fsum(np.log(p) / (p * p - 1.0))


def central_difference(fn, x0: float, h: float = 1e-5):
    return (fn(x0 + h) - fn(x0 - h)) / (2 * h)


# ---------------------------------------------------------------------------
# zeta and L(s, chi_1)


def _series_pair(s: complex, n: int) -> tuple[complex, complex, complex, complex]:
    eta = alternating_sum(lambda k: (k + 1) ** (-s), n)
    deta = alternating_sum(lambda k: -math.log(k + 1) * (k + 1) ** (-s), n)
    L = alternating_sum(lambda k: (2 * k + 1) ** (-s), n)
    dL = alternating_sum(lambda k: -math.log(2 * k + 1) * (2 * k + 1) ** (-s), n)
    return eta, deta, L, dL


def zeta_family(s: complex):
    """(zeta(s), zeta'(s), L(s, chi_1), L'(s, chi_1)) for 0.4 < Re s < 3.

    zeta comes from the alternating eta series through zeta = eta/(1 - 2^{1-s});
    both alternating series are accelerated.  Two term counts are compared and
    an AccuracyError is raised when they disagree beyond 1e-9.
    """
    s = complex(s)
    if not 0.4 < s.real < 3:
        raise DomainError(f"zeta_family needs 0.4 < Re s < 3, got {s}")
    if s == 1:
        raise DomainError("zeta has a pole at s = 1")
    lo = _series_pair(s, _SERIES_TERMS[0])
    hi = _series_pair(s, _SERIES_TERMS[1])
    worst = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(lo, hi))
    if worst > ZETA_TOLERANCE:
        raise AccuracyError(f"alternating series unresolved at s = {s}", achieved=worst)
    eta, deta, L, dL = hi
    two = 2 ** (1 - s)
    D = 1 - two
    zeta = eta / D
    dzeta = deta / D - eta * two * math.log(2) / (D * D)
    out = (zeta, dzeta, L, dL)
    if s.imag == 0:
        return tuple(float(v.real) for v in out)
    return out


def Y_factor(alpha: complex, gamma: complex):
    """zeta(1 + 2a) L(1 + 2g) / (zeta(1 + a + g) L(1 + a + g)); zero when a + g = 0."""
    a, g = complex(alpha), complex(gamma)
    if a + g == 0:
        return 0.0  # the zeta pole sits in the denominator
    z2a, _, _, _ = zeta_family(1 + 2 * a)
    zag, _, Lag, _ = zeta_family(1 + (a + g))
    _, _, L2g, _ = zeta_family(1 + 2 * g)
    return _real_if_close(complex(L2g * z2a / (Lag * zag)))


def G_product(s: ShiftPoint, P: int = DEFAULT_EULER_CUTOFF) -> EulerProductValue:
    """G = Y * A."""
    A = A_product(s, P)
    Y = Y_factor(s.alpha, s.gamma)
    return EulerProductValue(_real_if_close(complex(Y * A.value)), A.cutoff, abs(Y) * A.tail_estimate)


# ---------------------------------------------------------------------------
# predictions


def _R_offdiag(alpha: complex, gamma: complex, K: int, P: int):
    g1 = G_product(ShiftPoint(alpha, gamma), P)
    g2 = G_product(ShiftPoint(-alpha, gamma), P)
    pref = cmath.exp(2 * alpha * math.log(math.pi / (2 * K))) / (1 - 2 * alpha)
    return g1.value + pref * g2.value, g1.value, g1.tail_estimate + abs(pref) * g2.tail_estimate


_ALPHA0_STEP = 1e-3


def ratios_prediction_R_full(s: ShiftPoint, K: int, P: int = DEFAULT_EULER_CUTOFF):
    """``(R, G(alpha, gamma), tail)``.  At alpha = 0 (removable singularity) R is
    extrapolated from symmetric evaluations at alpha = +-h, +-h/2 (Richardson)."""
    if K < 2:
        raise DomainError("K must be >= 2")
    a, g = s.alpha, s.gamma
    if (1 + a + g).real <= 0.4 or (1 + 2 * g).real <= 0.4:
        raise DomainError("shift point outside the evaluable range")
    if abs(a) > _ALPHA0_STEP / 10:
        R, G, tail = _R_offdiag(a, g, K, P)
        return _real_if_close(complex(R)), G, tail

    def sym(h):
        r1, _, t1 = _R_offdiag(a + h, g, K, P)
        r2, _, t2 = _R_offdiag(a - h, g, K, P)
        return (r1 + r2) / 2, max(t1, t2)

    s1, t1 = sym(_ALPHA0_STEP)
    s2, t2 = sym(_ALPHA0_STEP / 2)
    R = (4 * s2 - s1) / 3
    G = math.inf if a == 0 else G_product(s, P).value  # G has a pole at alpha = 0
    return _real_if_close(complex(R)), G, max(t1, t2)


def ratios_prediction_R(s: ShiftPoint, K: int, P: int = DEFAULT_EULER_CUTOFF):
    """G(alpha, gamma) + (1/(1 - 2 alpha)) (pi/(2K))^{2 alpha} G(-alpha, gamma)."""
    return ratios_prediction_R_full(s, K, P)[0]


def predicted_logderiv_average(r: float, K: int, P: int = DEFAULT_EULER_CUTOFF) -> float:
    """Predicted (1/K) sum_k L_k'/L_k(1/2 + r) for real 1/log K < r < 1/4."""
    if K < 2:
        raise DomainError("K must be >= 2")
    r = float(r)
    if not 1.0 / math.log(K) < r < 0.25:
        raise DomainError(f"r = {r} outside (1/log K, 1/4) for K = {K}")
    z, dz, L, dL = zeta_family(1 + 2 * r)
    z_reflect = zeta_family(1 - 2 * r)[0]
    A_anti = A_product(ShiftPoint(-r, r), P).value
    second = (math.pi / (2 * K)) ** (2 * r) / (1 - 2 * r) * (L / (math.pi / 4)) * z_reflect * A_anti
    return math.fsum([dz / z, A_diag_derivative(r, P), -dL / L, -second])
