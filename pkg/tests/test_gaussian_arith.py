import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_density import gaussian_arith as ga
from hecke_density.errors import CapacityError, DomainError
from hecke_density.gaussian_arith import PrimeClass


def trial_primes(n):
    return [m for m in range(2, n + 1) if all(m % d for d in range(2, math.isqrt(m) + 1))]


@pytest.mark.parametrize("p, cls", [(2, PrimeClass.RAMIFIED), (13, PrimeClass.SPLIT), (7, PrimeClass.INERT)])
def test_classify(p, cls):
    assert ga.classify(p) is cls
    assert PrimeClass.from_code(cls.code) is cls


def test_sieve_matches_trial_division():
    assert [p for p, _ in ga.sieve_primes(5000)] == trial_primes(5000)


def test_sieve_across_segment_boundary():
    got = ga.primes_up_to(300, segment_size=64)
    assert got.tolist() == trial_primes(300)


def test_sieve_threads_deterministic():
    a = ga.primes_up_to(3 * 10**6, threads=1)
    b = ga.primes_up_to(3 * 10**6, threads=4)
    assert np.array_equal(a, b)


def test_sieve_rejects_tiny_limit():
    with pytest.raises(DomainError):
        list(ga.sieve_primes(1))


def test_sieve_capacity_refusal():
    with pytest.raises(CapacityError) as exc:
        ga.primes_up_to(10**6, capacity=1000)
    assert exc.value.required == 10**6


@pytest.mark.parametrize("p, ab", [(5, (2, 1)), (13, (3, 2))])
def test_two_square_examples(p, ab):
    assert ga.two_square_decompose(p) == ab


@pytest.mark.parametrize("p", [2, 3, 7, 9])
def test_two_square_domain(p):
    with pytest.raises(DomainError):
        ga.two_square_decompose(p)


def test_two_square_exhaustive_oracle():
    for p in trial_primes(3000):
        if p % 4 != 1:
            continue
        want = next((a, b) for a in range(math.isqrt(p), 0, -1) for b in range(1, a) if a * a + b * b == p)
        assert ga.two_square_decompose(p) == want


def test_two_square_vectorised_agrees():
    primes = ga.primes_up_to(200000)
    split = primes[primes % 4 == 1]
    a, b = ga.two_square_decompose_many(split)
    for p, x, y in zip(split[::97].tolist(), a[::97].tolist(), b[::97].tolist()):
        assert ga.two_square_decompose(p) == (x, y)


@given(st.integers(min_value=3, max_value=10**12))
@settings(max_examples=200, deadline=None)
def test_is_prime_against_trial(n):
    small = all(n % d for d in range(2, min(math.isqrt(n), 1000) + 1))
    if n < 10**6:
        assert ga.is_prime(n) == small
    elif not small:
        assert not ga.is_prime(n)


def test_ideal_angle_examples():
    assert ga.ideal_angle(1, 1) == pytest.approx(math.pi / 4, abs=1e-16)
    assert ga.ideal_angle(1, 0) == 0.0
    assert ga.ideal_angle(2, 1) == pytest.approx(0.46364760900081, abs=1e-14)


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_ideal_angle_unit_invariant(a, b):
    if a == 0 and b == 0:
        return
    th = ga.ideal_angle(a, b)
    assert 0 <= th < math.pi / 2
    # multiplying by a unit leaves the ideal unchanged
    assert ga.ideal_angle(-b, a) == th


def test_enumerate_examples():
    split = list(ga.enumerate_prime_power_ideals(10, {PrimeClass.SPLIT}))
    assert [(i.gen_a, i.gen_b, i.l) for i in split] == [(2, 1, 1), (1, 2, 1)]
    inert = list(ga.enumerate_prime_power_ideals(9, {PrimeClass.INERT}))
    assert [(i.p, i.norm, i.l, i.theta) for i in inert] == [(3, 9, 1, 0.0)]
    ram = list(ga.enumerate_prime_power_ideals(8, {PrimeClass.RAMIFIED}))
    assert [i.norm for i in ram] == [2, 4, 8]
    assert ram[0].theta == pytest.approx(math.pi / 4)


def test_enumerate_norm_invariants():
    for ideal in ga.enumerate_prime_power_ideals(5000):
        assert 0 <= ideal.theta < math.pi / 2
        if ideal.prime_class is PrimeClass.INERT:
            assert ideal.norm == ideal.p ** (2 * ideal.l) and ideal.theta == 0.0
        else:
            assert ideal.norm == ideal.p**ideal.l
        if ideal.l == 1 and ideal.prime_class is not PrimeClass.INERT:
            assert ideal.gen_a**2 + ideal.gen_b**2 == ideal.norm
        if ideal.prime_class is PrimeClass.SPLIT:
            assert ideal.theta > 0


def test_power_angle_exact_vs_naive():
    # exact Gaussian power vs l * theta reduced mod pi/2
    for a, b in [(2, 1), (3, 2), (10, 1)]:
        for l in range(1, 8):
            naive = (l * math.atan2(b, a)) % (math.pi / 2)
            assert ga.power_angle(a, b, l) == pytest.approx(naive, abs=1e-12)


def test_split_powers_table_matches_enumeration():
    tab = ga.split_prime_powers(20000)
    listed = sorted(
        (i.norm, round(i.theta, 12)) for i in ga.enumerate_prime_power_ideals(20000, {PrimeClass.SPLIT})
    )
    table = sorted(
        [(int(n), round(float(t), 12)) for n, t in zip(tab.norm, tab.theta1)]
        + [(int(n), round(float(t), 12)) for n, t in zip(tab.norm, tab.theta2)]
    )
    assert listed == table


def test_chebyshev_psi_small():
    assert ga.chebyshev_psi(10) == pytest.approx(math.log(2520), abs=1e-13)


@pytest.mark.parametrize(
    "T, want",
    [
        (1, 0.0),
        (2, -math.log(2)),
        (3, -math.log(2) + math.log(2) * (1 / 2 - 1 / 3) - math.log(1.5)),
    ],
)
def test_psi_weighted_integral_hand(T, want):
    assert ga.psi_weighted_integral(T) == pytest.approx(want, abs=1e-15)


def test_psi_weighted_integral_quadrature_oracle():
    from scipy.integrate import quad

    steps = [(s.t, s.jump) for s in ga.psi_steps(60)]
    knots = [1] + [t for t, _ in steps] + [60]
    total, psi = 0.0, 0.0
    jumps = dict(steps)
    for lo, hi in zip(knots, knots[1:]):
        psi += jumps.get(lo, 0.0)
        w = lambda t: (1 + math.log(t)) * (psi - t) / t**2
        total += quad(w, lo, hi, epsabs=1e-14)[0]
    assert ga.psi_weighted_integral(60, [1.0, 1.0]) == pytest.approx(total, abs=1e-11)


def test_psi_integral_curve_matches_points():
    Ts = [5.0, 17.5, 100.0]
    assert ga.psi_integral_curve(Ts) == pytest.approx([ga.psi_weighted_integral(T) for T in Ts], abs=1e-14)


def test_prime_cache_round_trip(tmp_path):
    path = tmp_path / "primes.bin"
    ga.write_prime_cache(path, 10000)
    limit, rec = ga.read_prime_cache(path)
    assert limit == 10000
    assert np.array_equal(rec, ga.prime_records(10000))
    split = rec[rec["cls"] == 1]
    assert np.all(split["a"].astype(np.int64) ** 2 + split["b"].astype(np.int64) ** 2 == split["p"])


def test_prime_cache_rejects_corruption(tmp_path):
    path = tmp_path / "primes.bin"
    ga.write_prime_cache(path, 1000)
    raw = path.read_bytes()
    (tmp_path / "magic.bin").write_bytes(b"XXXXXX" + raw[6:])
    (tmp_path / "trunc.bin").write_bytes(raw[:-3])
    (tmp_path / "short.bin").write_bytes(raw[:5])
    for name in ("magic.bin", "trunc.bin", "short.bin"):
        with pytest.raises(ValueError):
            ga.read_prime_cache(tmp_path / name)
