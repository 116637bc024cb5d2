import math

import mpmath
import pytest

from hecke_density import constants, ratios
from hecke_density.errors import AccuracyError, DomainError
from hecke_density.gaussian_arith import PrimeClass
from hecke_density.ratios import ShiftPoint
from hecke_density.verify import delta_series


def test_shift_point_validation():
    assert ShiftPoint(0.1, 0.2).alpha == 0.1
    with pytest.raises(DomainError):
        ShiftPoint(0.3, 0.0)


def test_gamma_average_examples():
    assert ratios.gamma_ratio_average_exact(0, 50) == pytest.approx(1, abs=1e-15)
    assert ratios.gamma_ratio_average_asymptotic(0, 50) == 1
    assert ratios.gamma_ratio_average_exact(0.1, 1) == pytest.approx(math.gamma(2.4) / math.gamma(2.6), rel=1e-14)
    assert ratios.gamma_ratio_average_asymptotic(0.1, 1000) == pytest.approx(2000**-0.2 / 0.8, rel=1e-15)


def test_gamma_average_vs_mpmath_complex():
    a = complex(0.1, 2.0)
    want = sum(mpmath.gamma(2 * k + 0.5 - a) / mpmath.gamma(2 * k + 0.5 + a) for k in range(1, 31)) / 30
    assert complex(ratios.gamma_ratio_average_exact(a, 30)) == pytest.approx(complex(want), rel=1e-12)


def test_gamma_average_rate():
    errs = [
        abs(ratios.gamma_ratio_average_exact(0.1, K) - ratios.gamma_ratio_average_asymptotic(0.1, K))
        for K in (1000, 2000, 4000)
    ]
    assert 0.4 <= errs[1] / errs[0] <= 0.6 and 0.4 <= errs[2] / errs[1] <= 0.6


@pytest.mark.parametrize("cls, p", [(PrimeClass.RAMIFIED, 2), (PrimeClass.SPLIT, 5), (PrimeClass.INERT, 3)])
def test_G_local_diagonal_and_series(cls, p):
    assert ratios.G_local(cls, p, ShiftPoint(0.07, 0.07)) == pytest.approx(1, abs=1e-15)
    for a, g in ((0.05, 0.1), (0.0, 0.2), (-0.1, 0.15)):
        assert ratios.G_local(cls, p, ShiftPoint(a, g)) == pytest.approx(delta_series(cls, p, a, g, 400), abs=1e-12)


def test_G_local_series_converges_in_N():
    closed = ratios.G_local(PrimeClass.SPLIT, 5, ShiftPoint(0.05, 0.1))
    errs = [abs(closed - delta_series(PrimeClass.SPLIT, 5, 0.05, 0.1, N)) for N in (5, 10, 20, 40)]
    assert errs == sorted(errs, reverse=True) and errs[-1] < 1e-12


def test_A_product_diagonal_exactly_one():
    for r in (0.0, 0.03, -0.2):
        for P in (3, 100, 10**5):
            assert ratios.A_product(ShiftPoint(r, r), P).value == 1.0


def test_A_derivative_examples():
    assert ratios.A_diag_derivative(0.0, 10**5) == pytest.approx(-2 * constants.prime_sum_P3(10**5)[0], rel=1e-12)
    assert ratios.A_diag_derivative(0.0, 5) == pytest.approx(-math.log(3) / 4, rel=1e-14)
    assert ratios.A_antidiag_derivative_at0(5) == pytest.approx(math.log(3) / 2, rel=1e-14)
    assert ratios.A_antidiag_derivative_at0(10**5) == pytest.approx(4 * constants.prime_sum_P3(10**5)[0], rel=1e-14)


def test_A_derivatives_vs_finite_differences():
    P, h = 10**6, 1e-5

    def A(a, g):
        return ratios.A_product(ShiftPoint(a, g), P).value

    fd1 = (A(0.01 + h, 0.01) - A(0.01 - h, 0.01)) / (2 * h)
    fd2 = (A(-h, h) - A(h, -h)) / (2 * h)
    assert fd1 == pytest.approx(ratios.A_diag_derivative(0.01, P), rel=1e-6)
    assert fd2 == pytest.approx(ratios.A_antidiag_derivative_at0(P), rel=1e-6)


def test_A_linearisation():
    r = 1e-3
    val = ratios.A_product(ShiftPoint(-r, r), 10**6).value
    assert val == pytest.approx(1 + r * 4 * constants.prime_sum_P3(10**6)[0], abs=5 * r * r)


def test_zeta_family_values():
    z, zp, L, Lp = ratios.zeta_family(2.0)
    assert z == pytest.approx(math.pi**2 / 6, abs=1e-9)
    assert ratios.zeta_family(1 + 1e-12)[2] == pytest.approx(math.pi / 4, abs=1e-9)
    assert ratios.zeta_family(0.5)[0] == pytest.approx(-1.4603545088, abs=1e-10)
    chi = [0, 1, 0, -1]
    for s in (0.6, 1.3, complex(0.8, 3.0)):
        got = ratios.zeta_family(s)
        want = (
            mpmath.zeta(s),
            mpmath.zeta(s, derivative=1),
            mpmath.dirichlet(s, chi),
            mpmath.diff(lambda u: mpmath.dirichlet(u, chi), s),
        )
        for g, w in zip(got, want):
            assert complex(g) == pytest.approx(complex(w), abs=1e-9)


def test_zeta_family_domain():
    for s in (1.0, 0.3, 3.5):
        with pytest.raises(DomainError):
            ratios.zeta_family(s)


def test_R_diagonal_first_term_and_stability():
    R, G, tail = ratios.ratios_prediction_R_full(ShiftPoint(0.1, 0.1), 1000, 10**5)
    assert G == pytest.approx(1, abs=1e-12)
    a = ratios.ratios_prediction_R(ShiftPoint(0.05, 0.1), 1000, 10**5)
    b = ratios.ratios_prediction_R(ShiftPoint(0.05, 0.1), 1000, 2 * 10**5)
    assert abs(a - b) <= 1e-8


def test_R_is_continuous_at_zero_shift():
    at0 = ratios.ratios_prediction_R(ShiftPoint(0.0, 0.1), 1000, 10**5)
    near = ratios.ratios_prediction_R(ShiftPoint(1e-4, 0.1), 1000, 10**5)
    assert at0 == pytest.approx(near, abs=1e-3)


def test_predicted_logderiv_average():
    K = 1000
    v = ratios.predicted_logderiv_average(0.2499, K, 10**5)
    assert math.isfinite(v)
    with pytest.raises(DomainError):
        ratios.predicted_logderiv_average(0.3, K)
    assert (math.pi / (2 * K)) ** 0.2 == pytest.approx((math.pi / 2000) ** 0.2)


def test_accuracy_error_type():
    assert issubclass(AccuracyError, ArithmeticError)
