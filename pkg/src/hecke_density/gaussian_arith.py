"""Rational primes, their splitting in Z[i], prime-power ideals and Chebyshev psi.

Bulk routines work on numpy arrays over fixed segments of ``SEGMENT_SIZE``
integers so that results do not depend on the number of worker threads.
Scalar routines (``two_square_decompose``, ``ideal_angle``) use exact Python
integers.
"""

from __future__ import annotations

import enum
import math
import struct
import threading
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError, DomainError

SEGMENT_SIZE = 1 << 20
#: Largest sieve limit accepted by default (generators must fit in u32).
MAX_SIEVE_LIMIT = 4 * 10**9

HALF_PI = math.pi / 2


class PrimeClass(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"

    @property
    def code(self) -> int:
        """Cache-file code: the residue of p mod 4 (2 for the ramified prime)."""
        return {PrimeClass.SPLIT: 1, PrimeClass.RAMIFIED: 2, PrimeClass.INERT: 3}[self]

    @classmethod
    def from_code(cls, code: int) -> PrimeClass:
        try:
            return {1: cls.SPLIT, 2: cls.RAMIFIED, 3: cls.INERT}[int(code)]
        except KeyError:
            raise ValueError(f"unknown prime class code {code}") from None


ALL_CLASSES = frozenset(PrimeClass)


def classify(p: int) -> PrimeClass:
    """Splitting type of the rational prime ``p`` in Z[i]."""
    if p == 2:
        return PrimeClass.RAMIFIED
    return PrimeClass.SPLIT if p % 4 == 1 else PrimeClass.INERT


@dataclass(frozen=True)
class GaussianPrimeIdeal:
    """The ideal P^l for a prime ideal P of Z[i] lying over ``p``.

    ``gen_a + i gen_b`` generates P itself (first quadrant, for a split prime
    this is either the canonical generator or its swap); ``theta`` is the
    first-quadrant angle of P^l.  ``lambda_weight`` is log N(P), the weight
    the ideal carries in -L'/L.
    """

    p: int
    l: int
    prime_class: PrimeClass
    gen_a: int
    gen_b: int
    norm: int
    theta: float
    lambda_weight: float


@dataclass(frozen=True)
class PsiStep:
    t: int
    jump: float


# ---------------------------------------------------------------------------
# sieving


def _check_limit(limit: int, capacity: int | None) -> None:
    cap = MAX_SIEVE_LIMIT if capacity is None else capacity
    if limit > cap:
        raise CapacityError(
            f"sieve limit {limit} exceeds the configured budget {cap}", required=limit
        )


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    # primes in [lo, hi)
    mask = np.ones(hi - lo, dtype=bool)
    if lo < 2:
        mask[: 2 - lo] = False
    for p in base.tolist():
        sq = p * p
        if sq >= hi:
            break
        start = max(sq, -(-lo // p) * p)
        mask[start - lo :: p] = False
    return (np.flatnonzero(mask) + lo).astype(np.int64)


def primes_up_to(
    limit: int,
    *,
    threads: int = 1,
    capacity: int | None = None,
    segment_size: int = SEGMENT_SIZE,
) -> np.ndarray:
    """All primes ``<= limit`` as a sorted int64 array (segmented sieve)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    _check_limit(limit, capacity)
    base = _small_primes(math.isqrt(limit))
    bounds = [(lo, min(lo + segment_size, limit + 1)) for lo in range(0, limit + 1, segment_size)]
    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _sieve_segment(b[0], b[1], base), bounds))
    else:
        parts = [_sieve_segment(lo, hi, base) for lo, hi in bounds]
    return np.concatenate(parts)


def sieve_primes(limit: int, *, capacity: int | None = None) -> Iterator[tuple[int, PrimeClass]]:
    """Yield ``(p, class)`` for every prime ``p <= limit`` in increasing order.

    Memory stays O(sqrt(limit) + segment): one segment is materialised at a time.
    """
    if limit < 2:
        raise DomainError("sieve_primes requires limit >= 2")
    _check_limit(limit, capacity)
    base = _small_primes(math.isqrt(limit))
    for lo in range(0, limit + 1, SEGMENT_SIZE):
        for p in _sieve_segment(lo, min(lo + SEGMENT_SIZE, limit + 1), base).tolist():
            yield p, classify(p)


class _PrimeCache:
    """Keeps the longest prime array computed so far; slices serve smaller limits."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._limit = 1
        self._primes = np.zeros(0, dtype=np.int64)

    def get(self, limit: int, threads: int = 1, capacity: int | None = None) -> np.ndarray:
        with self._lock:
            if limit > self._limit:
                _check_limit(limit, capacity)
                self._primes = primes_up_to(limit, threads=threads, capacity=capacity)
                self._limit = limit
            return self._primes[: np.searchsorted(self._primes, limit, side="right")]

    def clear(self) -> None:
        with self._lock:
            self._limit = 1
            self._primes = np.zeros(0, dtype=np.int64)


PRIMES = _PrimeCache()


# ---------------------------------------------------------------------------
# primality and two squares

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sqrt_mod_prime(n: int, p: int) -> int:
    """A square root of ``n`` modulo the odd prime ``p`` (Tonelli-Shanks)."""
    n %= p
    if n == 0:
        return 0
    if pow(n, (p - 1) // 2, p) != 1:
        raise DomainError(f"{n} is not a quadratic residue mod {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def two_square_decompose(p: int) -> tuple[int, int]:
    """Return ``(a, b)`` with ``a > b > 0`` and ``a*a + b*b == p`` for a prime p = 1 mod 4."""
    p = int(p)
    if p % 4 != 1 or not is_prime(p):
        raise DomainError(f"{p} is not a prime congruent to 1 mod 4")
    x = sqrt_mod_prime(p - 1, p)
    r0, r1 = p, x
    while r1 * r1 > p:
        r0, r1 = r1, r0 % r1
    a = r1
    b = math.isqrt(p - a * a)
    return (a, b) if a > b else (b, a)


def _powmod(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    # all operands < 2**32 so every product fits in uint64
    result = np.ones_like(mod)
    base = base % mod
    exp = exp.copy()
    while np.any(exp):
        odd = (exp & 1).astype(bool)
        result = np.where(odd, result * base % mod, result)
        base = base * base % mod
        exp >>= 1
    return result


def two_square_decompose_many(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised Cornacchia descent for an array of primes = 1 mod 4."""
    p = np.asarray(primes, dtype=np.uint64)
    if p.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    if np.any(p % 4 != 1) or np.any(p >= 1 << 32):
        raise DomainError("two_square_decompose_many needs primes = 1 mod 4 below 2**32")
    root = np.zeros_like(p)
    todo = np.ones(p.size, dtype=bool)
    for c in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71):
        if not todo.any():
            break
        idx = np.flatnonzero(todo)
        pp = p[idx]
        x = _powmod(np.full(idx.size, c, dtype=np.uint64), (pp - 1) // 4, pp)
        ok = x * x % pp == pp - 1
        root[idx[ok]] = x[ok]
        todo[idx[ok]] = False
    for i in np.flatnonzero(todo).tolist():  # pathological: tiny non-residue search failed
        root[i] = sqrt_mod_prime(int(p[i]) - 1, int(p[i]))
    r0, r1 = p.copy(), root
    active = r1 * r1 > p
    while active.any():
        r0, r1 = np.where(active, r1, r0), np.where(active, r0 % np.maximum(r1, 1), r1)
        active = r1 * r1 > p
    a = r1.astype(np.int64)
    rem = p.astype(np.int64) - a * a
    b = np.floor(np.sqrt(rem.astype(np.float64))).astype(np.int64)
    b += (b + 1) * (b + 1) <= rem
    b -= b * b > rem
    if np.any(a * a + b * b != p.astype(np.int64)):
        raise AssertionError("Cornacchia descent produced an invalid decomposition")
    return np.maximum(a, b), np.minimum(a, b)


# ---------------------------------------------------------------------------
# angles and ideals


def first_quadrant(a: int, b: int) -> tuple[int, int]:
    """Unit multiple of ``a + bi`` lying in {a > 0, b >= 0}."""
    if a == 0 and b == 0:
        raise DomainError("the zero ideal has no angle")
    for _ in range(4):
        if a > 0 and b >= 0:
            return a, b
        a, b = -b, a  # multiply by i
    raise AssertionError("unreachable")


def ideal_angle(a: int, b: int) -> float:
    """Argument of the first-quadrant generator of <a + bi>, in [0, pi/2)."""
    a, b = first_quadrant(int(a), int(b))
    return math.atan2(b, a)


def gaussian_power(a: int, b: int, l: int) -> tuple[int, int]:
    re, im = 1, 0
    for _ in range(l):
        re, im = re * a - im * b, re * b + im * a
    return re, im


def power_angle(a: int, b: int, l: int) -> float:
    """Angle of P^l where P = <a + bi>, via the exact generator (a + bi)^l."""
    return ideal_angle(*gaussian_power(a, b, l))


def enumerate_prime_power_ideals(
    norm_limit: int,
    classes: Iterable[PrimeClass] = ALL_CLASSES,
    *,
    capacity: int | None = None,
) -> Iterator[GaussianPrimeIdeal]:
    """Every prime-power ideal with norm ``<= norm_limit`` in the requested classes.

    Ordered by rational prime, then exponent; for split primes the canonical
    ideal <a + bi> (a > b) precedes its conjugate <b + ai>.
    """
    if norm_limit < 2:
        raise DomainError("norm_limit must be >= 2")
    classes = frozenset(classes)
    for p, cls in sieve_primes(norm_limit, capacity=capacity):
        if cls not in classes:
            continue
        logp = math.log(p)
        if cls is PrimeClass.RAMIFIED:
            l, n = 1, 2
            while n <= norm_limit:
                yield GaussianPrimeIdeal(2, l, cls, 1, 1, n, power_angle(1, 1, l), logp)
                l, n = l + 1, n * 2
        elif cls is PrimeClass.INERT:
            l, n = 1, p * p
            while n <= norm_limit:
                yield GaussianPrimeIdeal(p, l, cls, p, 0, n, 0.0, 2 * logp)
                l, n = l + 1, n * p * p
        else:
            a, b = two_square_decompose(p)
            l, n = 1, p
            while n <= norm_limit:
                for ga, gb in ((a, b), (b, a)):
                    yield GaussianPrimeIdeal(p, l, cls, ga, gb, n, power_angle(ga, gb, l), logp)
                l, n = l + 1, n * p


@dataclass(frozen=True)
class SplitPowers:
    """Array form of the split prime powers p^l <= norm_limit.

    ``theta1`` belongs to P1^l with P1 = <a + bi>, a > b; ``theta2`` to the
    conjugate P2^l.  Each row stands for the pair {P1^l, P2^l}.
    """

    p: np.ndarray
    l: np.ndarray
    logp: np.ndarray
    norm: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray


def split_prime_powers(
    norm_limit: int, *, threads: int = 1, capacity: int | None = None
) -> SplitPowers:
    primes = PRIMES.get(norm_limit, threads=threads, capacity=capacity)
    split = primes[primes % 4 == 1]
    a, b = two_square_decompose_many(split)
    rows_p = [split]
    rows_l = [np.ones(split.size, dtype=np.int64)]
    th1 = [np.arctan2(b, a).astype(np.float64)]
    th2 = [np.arctan2(a, b).astype(np.float64)]
    small = split[split * split <= norm_limit]
    for i in range(small.size):
        p, ai, bi = int(small[i]), int(a[i]), int(b[i])
        l, n = 2, p * p
        ps, ls, t1, t2 = [], [], [], []
        while n <= norm_limit:
            ps.append(p)
            ls.append(l)
            t1.append(power_angle(ai, bi, l))
            t2.append(power_angle(bi, ai, l))
            l, n = l + 1, n * p
        rows_p.append(np.array(ps, dtype=np.int64))
        rows_l.append(np.array(ls, dtype=np.int64))
        th1.append(np.array(t1))
        th2.append(np.array(t2))
    p_all = np.concatenate(rows_p)
    l_all = np.concatenate(rows_l)
    order = np.lexsort((l_all, p_all))
    p_all, l_all = p_all[order], l_all[order]
    return SplitPowers(
        p=p_all,
        l=l_all,
        logp=np.log(p_all.astype(np.float64)),
        norm=p_all**l_all,
        theta1=np.concatenate(th1)[order],
        theta2=np.concatenate(th2)[order],
    )


# ---------------------------------------------------------------------------
# Chebyshev psi


def prime_powers(limit: int, *, threads: int = 1, capacity: int | None = None):
    """Prime powers q <= limit with their prime ``p`` and Lambda(q) = log p, sorted by q."""
    primes = PRIMES.get(max(limit, 2), threads=threads, capacity=capacity)
    qs, ps = [primes], [primes]
    small = primes[primes * primes <= limit]
    q = small * small
    base = small
    while q.size:
        qs.append(q)
        ps.append(base)
        keep = q <= limit // base
        q, base = q[keep] * base[keep], base[keep]
    q_all = np.concatenate(qs)
    p_all = np.concatenate(ps)
    keep = q_all <= limit
    q_all, p_all = q_all[keep], p_all[keep]
    order = np.argsort(q_all, kind="stable")
    return q_all[order], p_all[order], np.log(p_all[order].astype(np.float64))


def psi_steps(limit: int) -> Iterator[PsiStep]:
    """Jumps of psi(t) up to ``limit``, in increasing t."""
    q, _, lam = prime_powers(limit)
    for t, jump in zip(q.tolist(), lam.tolist()):
        yield PsiStep(t, jump)


def chebyshev_psi(t: float) -> float:
    q, _, lam = prime_powers(int(math.floor(t)))
    return math.fsum(lam)


def _as_poly(weight) -> np.polynomial.Polynomial:
    if isinstance(weight, np.polynomial.Polynomial):
        poly = weight
    elif np.isscalar(weight):
        poly = np.polynomial.Polynomial([float(weight)])
    else:
        poly = np.polynomial.Polynomial(np.asarray(weight, dtype=np.float64))
    if poly.degree() > 8:
        raise DomainError("weight polynomial degree must be <= 8")
    return poly


def psi_weighted_integral(T: float, weight: Sequence[float] | float = 1.0) -> float:
    """Integral over [1, T] of w(log t) (psi(t) - t) / t^2 dt, evaluated exactly.

    ``weight`` holds the ascending coefficients of w in powers of log t.  With
    W = w + w' + w'' + ..., -W(log t)/t is an antiderivative of w(log t)/t^2,
    so summation by parts over the jumps of psi gives

        sum_{q <= T} Lambda(q) W(log q)/q - psi(T) W(log T)/T - int_0^{log T} w(u) du.
    """
    if T < 1:
        raise DomainError("psi_weighted_integral needs T >= 1")
    return psi_integral_curve([T], weight)[0]


def psi_integral_curve(Ts: Sequence[float], weight: Sequence[float] | float = 1.0) -> list[float]:
    """``psi_weighted_integral`` at several increasing cutoffs from a single pass."""
    Ts = [float(T) for T in Ts]
    if any(T < 1 for T in Ts):
        raise DomainError("psi_weighted_integral needs T >= 1")
    if any(b < a for a, b in zip(Ts, Ts[1:])):
        raise DomainError("cutoffs must be non-decreasing")
    w = _as_poly(weight)
    W = w.copy()
    d = w
    while d.degree() > 0 or d.coef.any():
        d = d.deriv()
        if not d.coef.any():
            break
        W = W + d
    w_int = w.integ()
    top = int(math.floor(Ts[-1])) if Ts else 1
    q, _, lam = prime_powers(top) if top >= 2 else (np.zeros(0, np.int64),) * 2 + (np.zeros(0),)
    logq = np.log(q.astype(np.float64))
    terms = lam * W(logq) / q
    out = []
    start = 0
    partial: list[float] = []  # running pieces, fsum'd at each cutoff
    psi_parts: list[float] = []
    for T in Ts:
        stop = int(np.searchsorted(q, math.floor(T), side="right"))
        partial.append(math.fsum(terms[start:stop]))
        psi_parts.append(math.fsum(lam[start:stop]))
        start = stop
        logT = math.log(T)
        psi_T = math.fsum(psi_parts)
        out.append(math.fsum([math.fsum(partial), -psi_T * W(logT) / T, -w_int(logT)]))
    return out


# ---------------------------------------------------------------------------
# prime / ideal cache file

CACHE_MAGIC = b"GPRIM\0"
CACHE_VERSION = 1
_HEADER = struct.Struct("<6sIQ")
CACHE_RECORD = np.dtype([("p", "<u8"), ("cls", "u1"), ("a", "<u4"), ("b", "<u4")])


def prime_records(norm_limit: int) -> np.ndarray:
    """One cache record per rational prime p <= norm_limit.

    Generators: canonical (a, b) with a > b for split p, (1, 1) for 2, (p, 0) for inert p.
    """
    primes = PRIMES.get(norm_limit)
    rec = np.zeros(primes.size, dtype=CACHE_RECORD)
    rec["p"] = primes
    cls = np.where(primes == 2, 2, primes % 4)
    rec["cls"] = cls
    split = cls == 1
    a, b = two_square_decompose_many(primes[split])
    rec["a"][split], rec["b"][split] = a, b
    rec["a"][cls == 2], rec["b"][cls == 2] = 1, 1
    rec["a"][cls == 3] = primes[cls == 3]
    return rec


def write_prime_cache(path: str | Path, norm_limit: int, records: np.ndarray | None = None) -> None:
    if records is None:
        records = prime_records(norm_limit)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, norm_limit))
        fh.write(np.ascontiguousarray(records, dtype=CACHE_RECORD).tobytes())


def read_prime_cache(path: str | Path) -> tuple[int, np.ndarray]:
    """Return ``(norm_limit, records)``; raises ValueError on a bad header."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("prime cache truncated before header end")
    magic, version, norm_limit = _HEADER.unpack_from(raw)
    if magic != CACHE_MAGIC:
        raise ValueError(f"bad prime cache magic {magic!r}")
    if version != CACHE_VERSION:
        raise ValueError(f"unsupported prime cache version {version}")
    body = raw[_HEADER.size :]
    if len(body) % CACHE_RECORD.itemsize:
        raise ValueError("prime cache body is not a whole number of records")
    return norm_limit, np.frombuffer(body, dtype=CACHE_RECORD).copy()
