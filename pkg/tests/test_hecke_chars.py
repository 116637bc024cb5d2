import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_density import hecke_chars as hc
from hecke_density.errors import DomainError
from hecke_density.gaussian_arith import PrimeClass, enumerate_prime_power_ideals
from hecke_density.verify import ideal_sum_by_norm

X = complex(-7, 24) / 25  # Xi_1(<2+i>)


def first_ideal(norm_limit, cls, gen=None):
    for ideal in enumerate_prime_power_ideals(norm_limit, {cls}):
        if gen is None or (ideal.gen_a, ideal.gen_b) == gen:
            return ideal
    raise LookupError


def test_xi_examples():
    ram = first_ideal(2, PrimeClass.RAMIFIED)
    for k in range(6):
        assert hc.xi(k, ram) == pytest.approx((-1) ** k, abs=1e-15)
    assert hc.xi(0, 1.234) == 1
    assert hc.xi(1, first_ideal(5, PrimeClass.SPLIT, (2, 1))) == pytest.approx(X, abs=1e-15)


def test_metadata():
    meta = hc.LFunctionMeta(3)
    assert (meta.conductor, meta.kappa1, meta.kappa2, meta.root_number) == (4, 6, 7, 1)
    with pytest.raises(DomainError):
        hc.CharacterIndex(1, 0)


def test_coeff_examples():
    assert hc.coeff_A(1, 7, 3) == 0
    assert hc.coeff_A(1, 2, 3) == -1
    assert hc.coeff_A(1, 5, 1) == pytest.approx(-0.56, abs=1e-15)
    assert hc.coeff_c(1, 49) == pytest.approx(2 * math.log(7))
    assert hc.coeff_c(1, 6) == 0
    assert hc.coeff_c(1, 5) == pytest.approx(-0.56 * math.log(5))
    assert hc.coeff_mu(4, 13, 0) == 1
    assert hc.coeff_mu(4, 13, 2) == 1
    assert hc.coeff_mu(4, 13, 3) == 0


def test_coeff_domain():
    with pytest.raises(DomainError):
        hc.coeff_A(1, 9, 1)
    with pytest.raises(DomainError):
        hc.coeff_c(1, 1)


@pytest.mark.parametrize("k", [0, 1, 2, 5, 11])
def test_dirichlet_coefficient_vs_lattice_points(k):
    direct = ideal_sum_by_norm(k, 1500)
    got = np.array([hc.dirichlet_coefficient(k, n) for n in range(1, 1501)])
    assert np.max(np.abs(direct[1:] - got)) < 1e-11


@pytest.mark.parametrize("k", [1, 3])
@pytest.mark.parametrize("p", [2, 3, 5, 13])
def test_mu_inverts_A(k, p):
    # (sum_h mu(p^h) x^h)(sum_l A(p^l) x^l) = 1 as power series in x = p^{-s}
    for n in range(1, 8):
        conv = math.fsum(hc.coeff_mu(k, p, h) * hc.coeff_A(k, p, n - h) for h in range(min(n, 2) + 1))
        assert conv == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k", [1, 4])
@pytest.mark.parametrize("p", [2, 7, 5, 29])
def test_a_from_log_derivative(k, p):
    # -L'/L = sum log p a(p^l) p^{-ls}: Newton identity n A(p^n) = sum_l a(p^l) A(p^{n-l})
    for n in range(1, 7):
        lhs = n * hc.coeff_A(k, p, n)
        rhs = math.fsum(hc.coeff_a(k, p, l) * hc.coeff_A(k, p, n - l) for l in range(1, n + 1))
        assert lhs == pytest.approx(rhs, abs=1e-11)


@pytest.mark.parametrize(
    "cls, h, n, want",
    [(PrimeClass.SPLIT, 1, 3, -2), (PrimeClass.INERT, 2, 0, -1), (PrimeClass.RAMIFIED, 0, 1, 0)],
)
def test_delta_limit_examples(cls, h, n, want):
    assert hc.delta_limit(cls, h, n) == want


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13, 17, 41])
def test_delta_table_matches_frequency_expansion(p):
    from hecke_density.gaussian_arith import classify

    for h in range(4):
        for n in range(7):
            assert hc.delta_from_expansion(p, h, n) == hc.delta_limit(classify(p), h, n)


@pytest.mark.parametrize("p", [2, 3, 5, 13, 17])
def test_expansion_reproduces_products(p):
    rng = np.random.default_rng(p)
    theta = hc._angle_of_prime(p)
    for h in range(3):
        for n in range(4):
            terms = hc.mu_A_expansion(p, h, n)
            for k in rng.integers(1, 500, 5).tolist():
                lhs = hc.coeff_mu(k, p, h) * hc.coeff_A(k, p, n)
                rhs = sum(c * cmath.exp(4j * k * m * theta) for m, c in terms.items())
                assert rhs == pytest.approx(lhs, abs=1e-9)


def test_delta_empirical_examples():
    assert hc.delta_average_empirical(2, 1, 1, 10) == -1
    vals = [hc.delta_average_empirical(5, 0, 2, K) for K in (10, 100, 1000, 10000)]
    assert abs(vals[-1] - 1) < abs(vals[0] - 1) + 1e-15
    C = hc.delta_rate_constant(5, 1, 1)
    assert abs(hc.delta_average_empirical(5, 1, 1, 100) + 2) <= C / 100


@given(st.sampled_from([2, 3, 5, 7, 13, 29, 37]), st.integers(0, 2), st.integers(0, 3), st.integers(1, 3000))
@settings(max_examples=150, deadline=None)
def test_delta_rate_bound_holds(p, h, n, K):
    from hecke_density.gaussian_arith import classify

    dev = abs(hc.delta_average_empirical(p, h, n, K) - hc.delta_limit(classify(p), h, n))
    assert dev <= hc.delta_rate_constant(p, h, n) / K + 1e-12


def test_char_average_examples():
    ram = first_ideal(2, PrimeClass.RAMIFIED)
    assert hc.char_average(ram, 10) == pytest.approx(0, abs=1e-15)
    ideal = first_ideal(5, PrimeClass.SPLIT, (2, 1))
    assert hc.char_average(ideal, 1) == pytest.approx(hc.xi(1, ideal), abs=1e-15)
    assert hc.char_average(ideal, 3) == pytest.approx((X + X**2 + X**3) / 3, abs=1e-14)


def test_char_average_resonant_angle():
    assert hc.char_average(0.0, 7) == 1
    assert hc.char_average(1e-12, 50) == pytest.approx(1, abs=1e-9)


@given(st.floats(0, math.pi / 2, exclude_max=True), st.integers(1, 400))
@settings(max_examples=200, deadline=None)
def test_char_average_vs_direct(theta, K):
    direct = sum(cmath.exp(4j * k * theta) for k in range(1, K + 1)) / K
    assert abs(hc.char_average(theta, K) - direct) <= 1e-9


def test_char_average_many_matches_scalar():
    th = np.array([0.0, 0.1, math.pi / 4, 1e-13, 1.2])
    got = hc.char_average_many(th, 37)
    want = [hc.char_average(float(t), 37) for t in th]
    assert np.allclose(got, want, atol=1e-12)


def test_delta_table_fault_injection(monkeypatch):
    from types import MappingProxyType

    from hecke_density import verify

    bad = dict(hc.DELTA_TABLE)
    bad[(PrimeClass.SPLIT, 1, 1)] = -1
    monkeypatch.setattr(hc, "DELTA_TABLE", MappingProxyType(bad))
    res = {r.name: r for r in verify.run_checks(["delta"])}
    assert not res["delta-table"].passed
    assert "p=5,h=1,n=1" in res["delta-table"].detail
