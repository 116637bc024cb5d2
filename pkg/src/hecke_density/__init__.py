"""One-level density of the Hecke L-function family over Z[i]: explicit-formula sums,
ratios-conjecture terms and closed-form constants, cross-validated numerically."""

__version__ = "0.1.0"

from .constants import ConstantsReport, constants_report
from .density import (
    TermReport,
    W_f_asymptotic,
    W_f_exact,
    identity_defect,
    nonvanishing_bound,
    one_level_density_conjectured,
    one_level_density_unconditional,
    term_report,
    theorem_prediction,
)
from .errors import (
    AccuracyError,
    CapacityError,
    ConsistencyError,
    DomainError,
    HeckeDensityError,
    UnsupportedFunctionError,
)
from .fourier_pairs import FejerTest, MatrixGroup, SmoothBumpTest, TestFunction, make_test_function
from .gaussian_arith import GaussianPrimeIdeal, PrimeClass, classify, primes_up_to
from .hecke_chars import char_average, coeff_A, coeff_a, coeff_mu, delta_limit
from .ratios import A_product, G_local, ShiftPoint, ratios_prediction_R

__all__ = [
    "AccuracyError",
    "A_product",
    "CapacityError",
    "ConsistencyError",
    "ConstantsReport",
    "DomainError",
    "FejerTest",
    "G_local",
    "GaussianPrimeIdeal",
    "HeckeDensityError",
    "MatrixGroup",
    "PrimeClass",
    "ShiftPoint",
    "SmoothBumpTest",
    "TermReport",
    "TestFunction",
    "UnsupportedFunctionError",
    "W_f_asymptotic",
    "W_f_exact",
    "char_average",
    "classify",
    "coeff_A",
    "coeff_a",
    "coeff_mu",
    "constants_report",
    "delta_limit",
    "identity_defect",
    "make_test_function",
    "nonvanishing_bound",
    "one_level_density_conjectured",
    "one_level_density_unconditional",
    "primes_up_to",
    "ratios_prediction_R",
    "term_report",
    "theorem_prediction",
]
