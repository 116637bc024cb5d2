"""Additive decomposition of the one-level density D_1(F(K); f).

Two ledgers are computed side by side:

* explicit formula (unconditional):  W_f + S_split + S_inert + S_ram
* ratios recipe (conjectural):        W_f + S_zeta + S_L + S_A' + S_Gamma

Here M = log K.  Every prime sum is finite because fhat is supported in
[-nu, nu]: S_zeta, S_L, S_A' only see n < K^nu and S_inert, S_split, S_ram
only see norms below K^{2 nu}.  Reductions go through ``math.fsum`` so the
results do not depend on evaluation order.
"""

from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from . import constants
from .errors import AccuracyError, CapacityError, DomainError, UnsupportedFunctionError
from .fourier_pairs import FejerTest, SmoothBumpTest, TestFunction
from .gaussian_arith import SplitPowers, prime_powers, split_prime_powers
from .hecke_chars import char_average_many

LOG2 = math.log(2)
LOGPI = math.log(math.pi)
#: Default largest norm the split sum may enumerate.
DEFAULT_NORM_BUDGET = 10**8
IMAG_TOLERANCE = 1e-10


def _check_K(K: int, least: int = 2) -> int:
    if int(K) != K or K < least:
        raise DomainError(f"K must be an integer >= {least}")
    return int(K)


def support_limit(K: int, nu: float, power: float = 1.0) -> int:
    """An integer bound beyond the support edge K^{power nu}; fhat vanishes past it."""
    return int(math.floor(math.exp(power * nu * math.log(K)))) + 1


def required_norm_budget(K: int, nu: float) -> int:
    """Largest norm the explicit-formula side enumerates at (K, nu)."""
    return support_limit(K, nu, 2.0)


# ---------------------------------------------------------------------------
# archimedean term W_f


def mean_digamma_kbold(K: int) -> float:
    """(1/K) sum_{k<=K} digamma(1/2 + 2k), from the duplication formula and
    sum_{k=1}^K digamma(k + a) = (a + K) digamma(a + K + 1) - a digamma(a + 1) - K."""
    K = _check_K(K, 1)

    def block(a):
        return (a + K) * special.digamma(a + K + 1) - a * special.digamma(a + 1) - K

    return math.fsum([K * LOG2, 0.5 * block(0.25), 0.5 * block(0.75)]) / K


def _E_K(t: float, K: int) -> float:
    # (1/K) sum_k exp(-(1/2 + 2k) t)
    if t == 0:
        return 1.0
    return math.exp(-2.5 * t) * (-math.expm1(-2 * K * t)) / (K * -math.expm1(-2 * t))


def W_f_exact(K: int, t: TestFunction) -> float:
    """Archimedean term with the exact gamma factors of every L_k, k <= K.

    Uses Re digamma(a + ix) = int_0^inf (e^{-u}/u - e^{-au} cos(xu)/(1 - e^{-u})) du,
    which turns the tau-integral into an integral against fhat:

        W_f = (1/M)[fhat(0)(<digamma(bk)> - log pi)
                    + int_0^inf (fhat(0) - fhat(u/2M)) E_K(u)/(1 - e^{-u}) du].
    """
    K = _check_K(K)
    M = math.log(K)
    f0 = t.fhat0
    edge = 2 * M * t.nu

    def g(u: float) -> float:
        if u == 0:
            return 0.0 if isinstance(t, SmoothBumpTest) else f0 / (2 * M * t.nu)
        return (f0 - float(t.fhat(u / (2 * M)))) * _E_K(u, K) / -math.expm1(-u)

    lo = min(0.25 / K, edge / 2)
    breaks = [0.0]
    x = lo
    while x < edge:
        breaks.append(x)
        x *= 2
    breaks.append(edge)
    pieces, errs = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        v, e = integrate.quad(g, a, b, epsabs=1e-15, epsrel=1e-12, limit=200)
        pieces.append(v)
        errs.append(e)
    v, e = integrate.quad(g, edge, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)
    pieces.append(v)
    errs.append(e)
    err = math.fsum(errs)
    if err > 1e-10:
        raise AccuracyError(f"W_f quadrature error estimate {err:.3g}", achieved=err)
    return math.fsum([f0 * (mean_digamma_kbold(K) - LOGPI), math.fsum(pieces)]) / M


def W_f_integrand(tau: float, K: int, t: TestFunction) -> float:
    """(1/2M) f(tau) [<digamma(bk + i pi tau/M) + digamma(bk - i pi tau/M)> - 2 log pi], per-k digamma."""
    K = _check_K(K)
    M = math.log(K)
    kb = 0.5 + 2.0 * np.arange(1, K + 1)
    re = special.digamma(kb + 1j * math.pi * tau / M).real
    return float(t.f(tau)) * (2 * math.fsum(re) / K - 2 * LOGPI) / (2 * M)


def W_f_direct(K: int, t: TestFunction, cutoff: float = 400.0) -> float:
    """Reference value of W_f by quadrature of ``W_f_integrand`` over tau (small K only).

    Composite Gauss-Legendre on [0, cutoff].  For the Fejer family the range
    beyond ``cutoff`` is handled by writing f = (1 - cos(2 pi nu tau))/(2 (pi nu tau)^2):
    a plain and a Fourier-cosine integral on [cutoff, inf).
    """
    K = _check_K(K)
    M = math.log(K)
    kb = 0.5 + 2.0 * np.arange(1, K + 1)

    def bracket(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=np.float64))
        re = special.digamma(kb[:, None] + 1j * math.pi * tau[None, :] / M).real
        return (2 * re.mean(axis=0) - 2 * LOGPI) / (2 * M)

    if isinstance(t, SmoothBumpTest):
        cutoff = min(cutoff, 300.0)  # f is below 1e-15 beyond this
    x, w = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(0.0, cutoff, int(8 * cutoff * max(t.nu, 0.25)) + 2)
    half = 0.5 * np.diff(edges)
    nodes = (half[:, None] * x + (0.5 * (edges[:-1] + edges[1:]))[:, None]).ravel()
    weights = (half[:, None] * w).ravel()
    head = math.fsum(weights * t.f(nodes) * bracket(nodes))
    tail = 0.0
    if isinstance(t, FejerTest):
        a = math.pi * t.nu

        def g(u):
            return float(bracket(u)[0]) / (2 * (a * u) ** 2)

        plain = integrate.quad(g, cutoff, np.inf, epsabs=1e-15, limit=200)[0]
        osc = integrate.quad(g, cutoff, np.inf, weight="cos", wvar=2 * a, epsabs=1e-15, limlst=200)[0]
        tail = plain - osc
    return 2.0 * (head + tail)


def W_f_asymptotic(K: int, t: TestFunction) -> float:
    """fhat(0)(1 + (log 2 - 1 - log pi)/M)."""
    K = _check_K(K)
    return t.fhat0 * (1 + (LOG2 - 1 - LOGPI) / math.log(K))


# ---------------------------------------------------------------------------
# ratios-side prime sums


def _prime_power_table(K: int, nu: float, power: float = 1.0, limit: int | None = None):
    lim = support_limit(K, nu, power) if limit is None else int(limit)
    if lim < 2:
        return (np.zeros(0, np.int64),) * 2 + (np.zeros(0),)
    return prime_powers(lim)


def _weighted_fsum(weights: np.ndarray, t: TestFunction, args: np.ndarray) -> float:
    return math.fsum(weights * t.fhat(args))


def S_zeta_sum(K: int, t: TestFunction, limit: int | None = None) -> float:
    """-(1/M) sum_n Lambda(n)/n fhat(log n/M)."""
    K = _check_K(K)
    M = math.log(K)
    q, _, lam = _prime_power_table(K, t.nu, limit=limit)
    return -_weighted_fsum(lam / q, t, np.log(q.astype(np.float64)) / M) / M


def S_L_sum(K: int, t: TestFunction, limit: int | None = None) -> float:
    """(1/M) sum_n Lambda(n) chi_1(n)/n fhat(log n/M)."""
    K = _check_K(K)
    M = math.log(K)
    q, p, lam = _prime_power_table(K, t.nu, limit=limit)
    chi = (q % 4 == 1).astype(np.float64) - (q % 4 == 3)
    return _weighted_fsum(lam * chi / q, t, np.log(q.astype(np.float64)) / M) / M


def S_Aprime_sum(K: int, t: TestFunction, limit: int | None = None) -> float:
    """-(2/M) sum_{p = 3 (4)} sum_{n>=1} log p/p^{2n} fhat(2n log p/M)."""
    K = _check_K(K)
    M = math.log(K)
    q, p, lam = _prime_power_table(K, t.nu, limit=limit)
    logq = np.log(q.astype(np.float64))
    logp = np.log(p.astype(np.float64))
    even = (p % 4 == 3) & (np.rint(logq / logp).astype(np.int64) % 2 == 0)
    q, lam, logq = q[even], lam[even], logq[even]
    return -2.0 * _weighted_fsum(lam / q, t, logq / M) / M


def S_zeta_asymptotic(K: int, t: TestFunction, J: int = 1, T: float = constants.DEFAULT_PSI_CUTOFF) -> float:
    """-f(0)/2 - sum_{j<=J} c_j fhat^{(j-1)}(0)/M^j."""
    K = _check_K(K)
    M = math.log(K)
    if J < 1:
        raise DomainError("J must be >= 1")
    if isinstance(t, FejerTest):
        if J > 1:
            raise UnsupportedFunctionError("the Fejer fhat is not differentiable at 0; only J = 1 applies")
        derivs = [t.fhat0]
    elif isinstance(t, SmoothBumpTest):
        if J > constants.CJ_MAX:
            raise DomainError(f"J must be <= {constants.CJ_MAX}")
        derivs = t.derivatives_at_zero(J - 1)
    else:
        raise UnsupportedFunctionError(f"no expansion for {t!r}")
    cs = constants.c_sequence(J, T)
    return math.fsum([-t.f0 / 2] + [-cs[j] * derivs[j] / M ** (j + 1) for j in range(J)])


def S_L_asymptotic(K: int, t: TestFunction) -> float:
    """-fhat(0)/M * L'/L(1, chi_1)."""
    K = _check_K(K)
    return -t.fhat0 / math.log(K) * constants.lprime_over_l_1()


def S_Aprime_asymptotic(K: int, t: TestFunction, P: int = constants.DEFAULT_PRIME_CUTOFF) -> float:
    """-2 P3 fhat(0)/M."""
    K = _check_K(K)
    return -2.0 * constants.prime_sum_P3(P)[0] * t.fhat0 / math.log(K)


def S_Gamma_asymptotic(K: int, t: TestFunction, P: int = constants.DEFAULT_PRIME_CUTOFF) -> float:
    """f(0)/2 - (1/2) int_{-1}^{1} fhat - d fhat(1)/M."""
    K = _check_K(K)
    return math.fsum([t.f0 / 2, -0.5 * t.window_integral(), -constants.d_constant(P) * float(t.fhat(1.0)) / math.log(K)])


# ---------------------------------------------------------------------------
# explicit-formula prime sums


def S_inert(K: int, t: TestFunction, limit: int | None = None) -> float:
    """-(2/M) sum_{p = 3 (4), l even} log p/p^{l/2} fhat(l log p/(2M)), p^l below K^{2 nu}."""
    K = _check_K(K)
    M = math.log(K)
    q, p, lam = _prime_power_table(K, t.nu, 2.0, limit)
    logq = np.log(q.astype(np.float64))
    logp = np.log(p.astype(np.float64))
    even = (p % 4 == 3) & (np.rint(logq / logp).astype(np.int64) % 2 == 0)
    q, lam, logq = q[even], lam[even], logq[even]
    return -2.0 * _weighted_fsum(lam / np.sqrt(q.astype(np.float64)), t, logq / (2 * M)) / M


def _ram_exponents(K: int, nu: float, limit: int | None) -> np.ndarray:
    lim = support_limit(K, nu, 2.0) if limit is None else int(limit)
    return np.arange(1, max(lim, 1).bit_length())  # all l with 2^l <= lim


def S_ram(K: int, t: TestFunction, limit: int | None = None) -> tuple[float, float]:
    """(exact, limit) forms of the ramified contribution.

    exact = -(1/M)(1/K) sum_{k<=K} sum_l (-1)^{lk} log 2/2^{l/2} fhat(l log 2/(2M)),
    limit = -(log 2/M) sum_n 2^{-n} fhat(n log 2/M)   (the even-l terms alone).
    """
    K = _check_K(K, 1)
    M = math.log(K) if K > 1 else math.nan
    ls = _ram_exponents(K, t.nu, limit)
    if ls.size == 0:
        return 0.0, 0.0
    weights = LOG2 * 2.0 ** (-ls / 2.0) * t.fhat(ls * LOG2 / (2 * M))
    ks = np.arange(1, K + 1)
    sign_avg = np.array([math.fsum(np.where((ks * l) % 2 == 1, -1.0, 1.0)) for l in ls.tolist()]) / K
    exact = -math.fsum(weights * sign_avg) / M
    even = ls % 2 == 0
    n = ls[even] // 2
    lim = -LOG2 * math.fsum(2.0 ** (-n.astype(np.float64)) * t.fhat(n * LOG2 / M)) / M
    return exact, lim


def odd_K_ramified_residual(K: int, t: TestFunction, limit: int | None = None) -> float:
    """(1/(KM)) sum_{l odd} log 2 2^{-l/2} fhat(l log 2/(2M)) for odd K, 0 for even K."""
    K = _check_K(K)
    if K % 2 == 0:
        return 0.0
    M = math.log(K)
    ls = _ram_exponents(K, t.nu, limit)
    ls = ls[ls % 2 == 1]
    return math.fsum(LOG2 * 2.0 ** (-ls / 2.0) * t.fhat(ls * LOG2 / (2 * M))) / (K * M)


class _SplitCache:
    """Largest split-power table built so far; smaller limits are masked views."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._limit = 0
        self._table: SplitPowers | None = None

    def get(self, limit: int, threads: int = 1, budget: int | None = None) -> SplitPowers:
        with self._lock:
            if limit > self._limit or self._table is None:
                self._table = split_prime_powers(limit, threads=threads, capacity=budget)
                self._limit = limit
            tab = self._table
        keep = tab.norm <= limit
        return SplitPowers(*(getattr(tab, f.name)[keep] for f in fields(SplitPowers)))

    def clear(self) -> None:
        with self._lock:
            self._limit, self._table = 0, None


SPLIT_CACHE = _SplitCache()


def S_split(
    K: int,
    t: TestFunction,
    *,
    norm_budget: int = DEFAULT_NORM_BUDGET,
    limit: int | None = None,
    threads: int = 1,
) -> float:
    """-(1/M) sum_{p = 1 (4), p^l} log p p^{-l/2} fhat(l log p/(2M)) (<Xi(P1^l)>_K + <Xi(P2^l)>_K)."""
    K = _check_K(K)
    M = math.log(K)
    lim = required_norm_budget(K, t.nu) if limit is None else int(limit)
    if lim > norm_budget:
        raise CapacityError(
            f"S_split at K={K}, nu={t.nu} needs norms up to {lim}, above the budget {norm_budget}", required=lim
        )
    if lim < 5:
        return 0.0
    tab = SPLIT_CACHE.get(lim, threads=threads, budget=max(norm_budget, lim))
    w = tab.logp * tab.norm.astype(np.float64) ** -0.5 * t.fhat(tab.l * tab.logp / (2 * M))
    live = w != 0
    w = w[live]
    avg = char_average_many(tab.theta1[live], K) + char_average_many(tab.theta2[live], K)
    terms = w * avg
    im = math.fsum(terms.imag)
    if abs(im) > IMAG_TOLERANCE:
        raise AccuracyError(f"S_split imaginary residue {im:.3g}", achieved=abs(im))
    return -math.fsum(terms.real) / M


# ---------------------------------------------------------------------------
# assembled densities


def identity_defect(K: int, t: TestFunction) -> float:
    """S_inert + S_ram_exact - (S_zeta + S_L + S_A')."""
    return math.fsum(
        [S_inert(K, t), S_ram(K, t)[0], -S_zeta_sum(K, t), -S_L_sum(K, t), -S_Aprime_sum(K, t)]
    )


def one_level_density_unconditional(K: int, t: TestFunction, **split_kw) -> float:
    """W_f_exact + S_split + S_inert + S_ram_exact."""
    return math.fsum([W_f_exact(K, t), S_split(K, t, **split_kw), S_inert(K, t), S_ram(K, t)[0]])


def one_level_density_conjectured(
    K: int, t: TestFunction, P: int = constants.DEFAULT_PRIME_CUTOFF, T: float = constants.DEFAULT_PSI_CUTOFF
) -> float:
    """fhat(0) - (1/2) int fhat 1_{[-1,1]} + (c fhat(0) - d fhat(1))/M."""
    K = _check_K(K)
    M = math.log(K)
    c = constants.c_constant(P, T)
    d = constants.d_constant(P)
    return math.fsum([t.fhat0, -0.5 * t.window_integral(), (c * t.fhat0 - d * float(t.fhat(1.0))) / M])


def theorem_prediction(
    K: int, t: TestFunction, P: int = constants.DEFAULT_PRIME_CUTOFF, T: float = constants.DEFAULT_PSI_CUTOFF
) -> float:
    """fhat(0) - f(0)/2 + c fhat(0)/M."""
    K = _check_K(K)
    return math.fsum([t.fhat0, -t.f0 / 2, constants.c_constant(P, T) * t.fhat0 / math.log(K)])


def nonvanishing_bound(nu) -> Fraction | float:
    """5/4 - 1/(2 nu), the proportion of L_k(1/2) != 0 guaranteed by the Fejer pair.

    Exact (a Fraction) for int/Fraction/decimal-string input, float otherwise.
    """
    if isinstance(nu, str):
        nu = Fraction(nu)
    if not 0 < nu < 1:
        raise DomainError("nonvanishing_bound is backed only for 0 < nu < 1")
    if isinstance(nu, (int, Fraction)):
        return Fraction(5, 4) - 1 / (2 * Fraction(nu))
    return 1.25 - 1.0 / (2.0 * nu)


NONVANISHING_SUPREMUM = Fraction(3, 4)


@dataclass(frozen=True)
class TermReport:
    K: int
    M: float
    test_function: dict
    W_f_exact: float
    W_f_asymptotic: float
    S_zeta_sum: float
    S_zeta_asymptotic: float
    S_L_sum: float
    S_L_asymptotic: float
    S_Aprime_sum: float
    S_Aprime_asymptotic: float
    S_Gamma_asymptotic: float
    S_inert: float
    S_ram_exact: float
    S_ram_limit: float
    S_split: float
    D1_unconditional: float
    D1_conjectured: float
    identity_defect: float

    def to_dict(self) -> dict:
        return asdict(self)


def term_report(
    K: int,
    t: TestFunction,
    *,
    P: int = constants.DEFAULT_PRIME_CUTOFF,
    T: float = constants.DEFAULT_PSI_CUTOFF,
    norm_budget: int = DEFAULT_NORM_BUDGET,
    threads: int = 1,
    J: int = 1,
) -> TermReport:
    K = _check_K(K)
    M = math.log(K)
    need = required_norm_budget(K, t.nu)
    if need > norm_budget:
        raise CapacityError(f"K={K}, nu={t.nu} needs norm budget {need} (have {norm_budget})", required=need)
    wf = W_f_exact(K, t)
    sz, sl, sa = S_zeta_sum(K, t), S_L_sum(K, t), S_Aprime_sum(K, t)
    si = S_inert(K, t)
    r_exact, r_limit = S_ram(K, t)
    ss = S_split(K, t, norm_budget=norm_budget, threads=threads)
    return TermReport(
        K=K,
        M=M,
        test_function=t.descriptor(),
        W_f_exact=wf,
        W_f_asymptotic=W_f_asymptotic(K, t),
        S_zeta_sum=sz,
        S_zeta_asymptotic=S_zeta_asymptotic(K, t, J, T),
        S_L_sum=sl,
        S_L_asymptotic=S_L_asymptotic(K, t),
        S_Aprime_sum=sa,
        S_Aprime_asymptotic=S_Aprime_asymptotic(K, t, P),
        S_Gamma_asymptotic=S_Gamma_asymptotic(K, t, P),
        S_inert=si,
        S_ram_exact=r_exact,
        S_ram_limit=r_limit,
        S_split=ss,
        D1_unconditional=math.fsum([wf, ss, si, r_exact]),
        D1_conjectured=one_level_density_conjectured(K, t, P, T),
        identity_defect=math.fsum([si, r_exact, -sz, -sl, -sa]),
    )
