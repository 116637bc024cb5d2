"""The gating invariant suite behind ``hecke-density verify``.

Each check belongs to a block (``arith``, ``chars``, ``delta``, ``functions``,
``constants``, ``ratios``, ``identity``, ``rates``) and returns a
``CheckResult``.  Checks are cheap enough to run on every invocation; the
heavier rate experiments live in the ``rates`` block.
"""

from __future__ import annotations

import cmath
import math
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from . import constants, density, gaussian_arith, hecke_chars, ratios
from .errors import HeckeDensityError
from .fourier_pairs import FejerTest, SmoothBumpTest
from .gaussian_arith import PrimeClass


@dataclass(frozen=True)
class CheckResult:
    name: str
    block: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass(frozen=True)
class Check:
    name: str
    block: str
    fn: Callable[[], tuple[bool, str]]


_REGISTRY: list[Check] = []


def check(name: str, block: str):
    def deco(fn):
        _REGISTRY.append(Check(name, block, fn))
        return fn

    return deco


def blocks() -> list[str]:
    return sorted({c.block for c in _REGISTRY})


def run_checks(only: Iterable[str] | None = None) -> list[CheckResult]:
    wanted = set(only) if only else None
    if wanted:
        unknown = wanted - set(blocks())
        if unknown:
            raise ValueError(f"unknown verification block(s): {', '.join(sorted(unknown))}")
    out = []
    for c in _REGISTRY:
        if wanted and c.block not in wanted:
            continue
        start = time.perf_counter()
        try:
            ok, detail = c.fn()
        except (HeckeDensityError, ArithmeticError, ValueError) as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        out.append(CheckResult(c.name, c.block, bool(ok), detail, time.perf_counter() - start))
    return out


# ---------------------------------------------------------------------------
# arithmetic


def _trial_division_count(n: int) -> int:
    return sum(1 for m in range(2, n + 1) if all(m % d for d in range(2, math.isqrt(m) + 1)))


@check("sieve-matches-trial-division", "arith")
def _sieve():
    got = sum(1 for _ in gaussian_arith.sieve_primes(20000))
    want = _trial_division_count(20000)
    return got == want, f"{got} primes vs {want}"


@check("two-square-decomposition", "arith")
def _two_square():
    primes = gaussian_arith.primes_up_to(10**6)
    split = primes[primes % 4 == 1]
    a, b = gaussian_arith.two_square_decompose_many(split)
    ok = bool(np.all(a * a + b * b == split) and np.all(a > b) and np.all(b > 0))
    return ok and gaussian_arith.two_square_decompose(13) == (3, 2), f"{split.size} split primes"


@check("angle-gap", "arith")
def _angle_gap():
    tab = gaussian_arith.split_prime_powers(10**6)
    gap = float(np.min(np.minimum(tab.theta1, tab.theta2) * np.sqrt(tab.norm.astype(np.float64))))
    return gap >= ANGLE_GAP_C0, f"min theta*sqrt(N) = {gap:.6f} (c0 = {ANGLE_GAP_C0})"


#: Pinned lower bound for theta * sqrt(N) over split prime-power ideals.
ANGLE_GAP_C0 = 1.0


@check("psi-integral-hand-values", "arith")
def _psi_hand():
    v2 = gaussian_arith.psi_weighted_integral(2)
    v3 = gaussian_arith.psi_weighted_integral(3)
    want3 = -math.log(2) + math.log(2) * (1 / 2 - 1 / 3) - math.log(1.5)
    ok = abs(v2 + math.log(2)) < 1e-15 and abs(v3 - want3) < 1e-15
    return ok, f"I(2) = {v2!r}, I(3) = {v3!r}"


# ---------------------------------------------------------------------------
# characters


def ideal_sum_by_norm(k: int, limit: int) -> np.ndarray:
    """sum of Xi_k over all ideals of each norm n <= limit (first-quadrant lattice points)."""
    out = np.zeros(limit + 1, dtype=complex)
    r = math.isqrt(limit)
    for a in range(1, r + 1):
        for b in range(0, math.isqrt(limit - a * a) + 1):
            out[a * a + b * b] += cmath.exp(4j * k * math.atan2(b, a))
    return out


@check("coefficients-multiplicative", "chars")
def _mult():
    worst = 0.0
    for k in (1, 3, 7):
        direct = ideal_sum_by_norm(k, 2000)
        for n in range(1, 2001):
            worst = max(worst, abs(direct[n] - hecke_chars.dirichlet_coefficient(k, n)))
    return worst < 1e-10, f"max deviation {worst:.2e}"


@check("char-average-closed-form", "chars")
def _char_avg():
    rng = np.random.default_rng(0)
    worst = 0.0
    for theta in rng.uniform(0, math.pi / 2, 100):
        for K in (1, 2, 17, 1000):
            direct = sum(cmath.exp(4j * k * theta) for k in range(1, K + 1)) / K
            worst = max(worst, abs(direct - hecke_chars.char_average(float(theta), K)))
    return worst <= 1e-12, f"max deviation {worst:.2e}"


# ---------------------------------------------------------------------------
# delta tables


@check("delta-table", "delta")
def _delta():
    bad = []
    for p in (2, 5, 13, 3, 7):
        cls = gaussian_arith.classify(p)
        for h in range(3):
            for n in range(4):
                lim = hecke_chars.delta_limit(cls, h, n)
                if lim != hecke_chars.delta_from_expansion(p, h, n):
                    bad.append(f"p={p},h={h},n={n}: table {lim} vs expansion")
                    continue
                C = hecke_chars.delta_rate_constant(p, h, n)
                for K in (10**2, 10**3, 10**4):
                    emp = hecke_chars.delta_average_empirical(p, h, n, K)
                    if abs(emp - lim) > C / K + 1e-12:
                        bad.append(f"p={p},h={h},n={n},K={K}: {emp:.6f} vs {lim}")
    return not bad, "; ".join(bad) or "all (p,h,n) within C_p/K"


def delta_series(cls: PrimeClass, p: int, alpha: float, gamma: float, N: int = 60) -> float:
    """sum_{h<=2, n<=N} delta(h, n)/p^{h(1/2+gamma) + n(1/2+alpha)}."""
    terms = [
        hecke_chars.delta_limit(cls, h, n) * p ** (-(h * (0.5 + gamma) + n * (0.5 + alpha)))
        for h in range(3)
        for n in range(N + 1)
    ]
    return math.fsum(terms)


@check("local-factor-vs-delta-series", "delta")
def _local():
    worst = 0.0
    for cls, p in ((PrimeClass.RAMIFIED, 2), (PrimeClass.SPLIT, 5), (PrimeClass.INERT, 3)):
        for a, g in ((0.1, 0.1), (0.15, 0.2), (0.2, 0.05)):
            closed = ratios.G_local(cls, p, ratios.ShiftPoint(a, g))
            worst = max(worst, abs(closed - delta_series(cls, p, a, g)))
    return worst <= 1e-10, f"max deviation {worst:.2e}"


# ---------------------------------------------------------------------------
# test functions


@check("symplectic-pairing", "functions")
def _pairing():
    worst = 0.0
    for nu in (0.5, 1.0, 2.0):
        from .fourier_pairs import symplectic_pairing_check

        lhs, rhs = symplectic_pairing_check(FejerTest(nu))
        worst = max(worst, abs(lhs - rhs))
    return worst <= 1e-8, f"max |lhs - rhs| = {worst:.2e}"


@check("bump-derivative-vs-difference", "functions")
def _bump_deriv():
    t = SmoothBumpTest(0.5)
    h = 1e-4
    fd = (float(t.fhat(h)) - 2 * float(t.fhat(0)) + float(t.fhat(-h))) / (h * h)
    an = t.derivatives_at_zero(2)[2]
    rel = abs(fd - an) / abs(an)
    return rel <= 1e-6, f"relative deviation {rel:.2e}"


# ---------------------------------------------------------------------------
# constants


@check("eta-dual-formula", "constants")
def _eta():
    diff = abs(constants.eta_product() - constants.eta_gamma_formula())
    return diff <= 1e-10, f"|product - Gamma formula| = {diff:.2e}"


@check("lprime-over-l-oracle", "constants")
def _lprime():
    diff = abs(constants.lprime_over_l_1() - constants.lprime_over_l_1_series())
    return diff <= 1e-6, f"|closed - series| = {diff:.2e}"


@check("c-d-relation", "constants")
def _cd():
    rep = constants.constants_report()
    lhs = rep.c + rep.c1 + rep.gamma0
    return abs(lhs - rep.d) <= 1e-15, f"c + c1 + gamma0 - d = {lhs - rep.d:.2e}"


# ---------------------------------------------------------------------------
# ratios


@check("A-diagonal-is-one", "ratios")
def _A_diag():
    vals = [ratios.A_product(ratios.ShiftPoint(r, r), P).value for r in (0.0, 0.01, 0.1) for P in (10, 1000, 10**5)]
    return all(v == 1.0 for v in vals), f"values {sorted(set(vals))}"


@check("A-derivatives-vs-differences", "ratios")
def _A_deriv():
    h, P = 1e-5, 10**6

    def A(a, g):
        return ratios.A_product(ratios.ShiftPoint(a, g), P).value

    fd1 = (A(0.01 + h, 0.01) - A(0.01 - h, 0.01)) / (2 * h)
    an1 = ratios.A_diag_derivative(0.01, P)
    fd2 = (A(-h, h) - A(h, -h)) / (2 * h)
    an2 = ratios.A_antidiag_derivative_at0(P)
    r1, r2 = abs(fd1 / an1 - 1), abs(fd2 / an2 - 1)
    return max(r1, r2) <= 1e-6, f"relative deviations {r1:.2e}, {r2:.2e}"


@check("gamma-average-rate", "ratios")
def _gamma_rate():
    errs = [
        abs(ratios.gamma_ratio_average_exact(0.1, K) - ratios.gamma_ratio_average_asymptotic(0.1, K))
        for K in (1000, 2000, 4000)
    ]
    q = [errs[1] / errs[0], errs[2] / errs[1]]
    return all(0.4 <= x <= 0.6 for x in q), f"ratios {q[0]:.3f}, {q[1]:.3f}"


@check("L-at-one", "ratios")
def _L1():
    L = ratios.zeta_family(1.0 + 1e-12)[2]
    z2 = ratios.zeta_family(2.0)[0]
    d1, d2 = abs(L - math.pi / 4), abs(z2 - math.pi**2 / 6)
    return max(d1, d2) <= 1e-9, f"|L(1) - pi/4| = {d1:.1e}, |zeta(2) - pi^2/6| = {d2:.1e}"


# ---------------------------------------------------------------------------
# the inert/ramified identity


@check("identity-even-K", "identity")
def _id_even():
    t = FejerTest(0.5)
    vals = [density.identity_defect(K, t) for K in (100, 1000, 10000)]
    return all(abs(v) <= 1e-12 for v in vals), f"defects {[f'{v:.1e}' for v in vals]}"


@check("identity-odd-K", "identity")
def _id_odd():
    t = FejerTest(0.5)
    devs = [abs(density.identity_defect(K, t) - density.odd_K_ramified_residual(K, t)) for K in (101, 1001)]
    return all(d <= 1e-12 for d in devs), f"deviation from closed form {[f'{d:.1e}' for d in devs]}"


@check("ramified-parity", "identity")
def _ram():
    t = FejerTest(0.5)
    ok = True
    for K in (100, 101, 1000, 1001):
        exact, lim = density.S_ram(K, t)
        want = density.odd_K_ramified_residual(K, t)
        ok &= abs((exact - lim) - want) <= 1e-12
    return ok, "exact - limit equals the odd-K residual"


# ---------------------------------------------------------------------------
# rate experiments


@check("W_f-rate", "rates")
def _wf_rate():
    t = FejerTest(0.5)
    errs = [abs(density.W_f_exact(K, t) - density.W_f_asymptotic(K, t)) for K in (256, 512, 1024, 2048)]
    q = [errs[i] / errs[i + 1] for i in range(3)]
    return all(1.7 <= x <= 2.3 for x in q), f"factors {[round(x, 3) for x in q]}"


@check("S_zeta-rate", "rates")
def _szeta_rate():
    t = SmoothBumpTest(0.5)
    vals = []
    for e in range(10, 21, 2):
        K = 2**e
        M = math.log(K)
        vals.append((density.S_zeta_sum(K, t) - density.S_zeta_asymptotic(K, t, 1)) * M * M)
    a = [abs(v) for v in vals]
    same_sign = all(v * vals[0] > 0 for v in vals)
    return same_sign and max(a) / min(a) <= 10, f"scaled values {[round(v, 5) for v in vals]}"


@check("S_split-decay", "rates")
def _split():
    t = FejerTest(0.8)
    scaled = [abs(density.S_split(2**e, t)) * (2**e) ** 0.2 / math.log(2**e) for e in (10, 12, 14)]
    ok = all(b <= 3 * a for a, b in zip(scaled, scaled[1:])) and max(scaled) <= 3 * scaled[0]
    return ok, f"scaled {[f'{s:.3e}' for s in scaled]}"
