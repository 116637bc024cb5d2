"""Even test functions f with compactly supported Fourier transform.

Convention: fhat(x) = int f(t) exp(-2 pi i x t) dt, so f(0) = int fhat and
fhat(0) = int f.  Two families are provided: the Fejer pair
f = (sin(nu pi x)/(nu pi x))^2, fhat(x) = (1/nu)(1 - |x|/nu)_+, and a C-infinity
bump fhat(x) = c exp(-1/(1 - (x/nu)^2)) normalised so that f(0) = 1.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError, UnsupportedFunctionError

_SERIES_CUTOFF = 1e-4
_GL_NODES = 256
#: Largest |Im z| at which the bump quadrature is validated.
BUMP_STRIP = 2.0


class MatrixGroup(enum.Enum):
    U = "U"
    USp = "USp"
    O = "O"
    SOeven = "SOeven"
    SOodd = "SOodd"


class TestFunction:
    """Base class; subclasses provide ``f``, ``fhat`` and ``window_integral``."""

    __test__ = False  # keep pytest from collecting the class
    family = "abstract"

    def __init__(self, nu: float) -> None:
        nu = float(nu)
        if not (nu > 0 and math.isfinite(nu)):
            raise DomainError("support half-width nu must be positive and finite")
        self.nu = nu

    def __repr__(self) -> str:
        return f"{type(self).__name__}(nu={self.nu!r})"

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.nu == other.nu

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.nu))

    def descriptor(self) -> dict:
        return {"family": self.family, "nu": self.nu}

    @property
    def f0(self) -> float:
        return 1.0

    @property
    def fhat0(self) -> float:
        raise NotImplementedError

    def f(self, z):
        raise NotImplementedError

    def fhat(self, x):
        raise NotImplementedError

    def window_integral(self) -> float:
        """int_{-1}^{1} fhat."""
        raise NotImplementedError


class FejerTest(TestFunction):
    family = "fejer"

    @property
    def fhat0(self) -> float:
        return 1.0 / self.nu

    def f(self, z):
        z = np.asarray(z)
        if np.iscomplexobj(z):
            z = np.where(z.real < 0, -z, z)
        else:
            z = np.abs(z.astype(np.float64))
        w = self.nu * math.pi * z
        small = np.abs(w) < _SERIES_CUTOFF
        ws = np.where(small, 1.0, w)
        closed = (np.sin(ws) / ws) ** 2
        w2 = w * w
        series = 1 - w2 / 3 + 2 * w2 * w2 / 45 - w2 * w2 * w2 / 315
        out = np.where(small, series, closed)
        return out[()] if out.ndim == 0 else out

    def fhat(self, x):
        x = np.abs(np.asarray(x, dtype=np.float64))
        out = np.where(x < self.nu, (1.0 - x / self.nu) / self.nu, 0.0)
        return out[()] if out.ndim == 0 else out

    def window_integral(self) -> float:
        m = min(self.nu, 1.0)
        return 2.0 * (m / self.nu - m * m / (2.0 * self.nu * self.nu))

    def strip_decay_constant(self, height: float = 1.0) -> float:
        """C with |f(sigma + i h)| <= C / sigma^2 for real sigma != 0."""
        w = self.nu * math.pi
        return math.cosh(w * height) ** 2 / (w * w)


@lru_cache(maxsize=1)
def _bump_mass() -> float:
    # int_{-1}^{1} exp(-1/(1-u^2)) du
    val, _ = integrate.quad(
        lambda u: math.exp(-1.0 / (1.0 - u * u)) if u < 1 else 0.0, 0.0, 1.0, epsabs=1e-17, epsrel=1e-14, limit=200
    )
    return 2.0 * val


@lru_cache(maxsize=1)
def _gl_nodes() -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(_GL_NODES)


@lru_cache(maxsize=None)
def _bump_series(order: int) -> tuple[Fraction, ...]:
    """Taylor coefficients E_n of exp(-u^2/(1-u^2)) = exp(-sum_{m>=1} u^{2m})."""
    g = [Fraction(0)] + [Fraction(-1) if n % 2 == 0 else Fraction(0) for n in range(1, order + 1)]
    e = [Fraction(1)]
    for n in range(1, order + 1):
        e.append(sum((k * g[k] * e[n - k] for k in range(1, n + 1)), Fraction(0)) / n)
    return tuple(e)


class SmoothBumpTest(TestFunction):
    family = "bump"

    @cached_property
    def norm_const(self) -> float:
        return 1.0 / (self.nu * _bump_mass())

    @property
    def fhat0(self) -> float:
        return self.norm_const * math.exp(-1.0)

    def fhat(self, x):
        u = np.abs(np.asarray(x, dtype=np.float64)) / self.nu
        inside = u < 1
        us = np.where(inside, u, 0.0)
        out = np.where(inside, self.norm_const * np.exp(-1.0 / (1.0 - us * us)), 0.0)
        return out[()] if out.ndim == 0 else out

    def f(self, z):
        z = np.asarray(z)
        if np.any(np.abs(np.imag(z)) >= BUMP_STRIP):
            raise DomainError(f"bump evaluation needs |Im z| < {BUMP_STRIP}")
        flat = np.atleast_1d(z).ravel()
        out = np.empty(flat.shape, dtype=np.result_type(flat.dtype, np.float64))
        # 2 int_0^nu fhat(r) cos(2 pi r z) dr, one 256-node panel per ~4 oscillations
        panels = 1 + (self.nu * np.abs(flat.real) / 4).astype(np.int64)
        for n in np.unique(panels).tolist():
            idx = np.flatnonzero(panels == n)
            r, w = self._panel_rule(n)
            for lo in range(0, idx.size, 256):
                part = idx[lo : lo + 256]
                vals = 2.0 * (w * self.fhat(r)) @ np.cos(2 * np.pi * np.outer(r, flat[part]))
                out[part] = vals if np.iscomplexobj(out) else vals.real
        out = out.reshape(np.shape(z))
        return out[()] if out.ndim == 0 else out

    def _panel_rule(self, panels: int) -> tuple[np.ndarray, np.ndarray]:
        x, w = _gl_nodes()
        edges = np.linspace(0.0, self.nu, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        r = (half[:, None] * x[None, :] + mid[:, None]).ravel()
        return r, (half[:, None] * w[None, :]).ravel()

    def window_integral(self) -> float:
        if self.nu <= 1.0:
            return 1.0
        val, err = integrate.quad(lambda x: float(self.fhat(x)), 0.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200)
        return 2.0 * val

    def derivatives_at_zero(self, max_order: int) -> list[float]:
        if max_order < 0:
            raise DomainError("max_order must be >= 0")
        e = _bump_series(max_order)
        scale = self.norm_const * math.exp(-1.0)
        return [
            0.0 if j % 2 else float(e[j] * math.factorial(j)) * scale / self.nu**j
            for j in range(max_order + 1)
        ]


def make_test_function(family: str, nu: float) -> TestFunction:
    try:
        cls = {"fejer": FejerTest, "bump": SmoothBumpTest}[family.lower()]
    except KeyError:
        raise DomainError(f"unknown test family {family!r}") from None
    return cls(nu)


def eval_f(t: TestFunction, z):
    return t.f(z)


def eval_fhat(t: TestFunction, x):
    return t.fhat(x)


def fhat_derivatives_at_zero(t: TestFunction, max_order: int) -> list[float]:
    """fhat^{(j)}(0) for j = 0..max_order (smooth family only)."""
    if not isinstance(t, SmoothBumpTest):
        raise UnsupportedFunctionError(f"{t!r} has no derivatives of fhat at 0")
    return t.derivatives_at_zero(max_order)


def symplectic_pairing_check(t: TestFunction, tol: float = 1e-10) -> tuple[float, float]:
    """``(int f(x) sin(2 pi x)/(2 pi x) dx, (1/2) int_{-1}^{1} fhat)``.

    The left side is integrated numerically: Gauss-Kronrod on [0, 1] and a
    Fourier (QAWF) sine integral of f(x)/(2 pi x) on [1, inf).
    """
    head, e1 = integrate.quad(
        lambda x: float(t.f(x)) * (1.0 if x == 0 else math.sin(2 * math.pi * x) / (2 * math.pi * x)),
        0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    tail, e2 = integrate.quad(
        lambda x: float(t.f(x)) / (2 * math.pi * x), 1.0, np.inf, weight="sin", wvar=2 * math.pi,
        epsabs=1e-13, limlst=200,
    )
    err = 2 * (e1 + e2)
    if err > tol:
        raise AccuracyError(f"pairing quadrature reached only {err:.3g}", achieved=err)
    return 2.0 * (head + tail), 0.5 * t.window_integral()


def katz_sarnak_density(G: MatrixGroup, t: TestFunction) -> float:
    """int f(x) W_G(x) dx for the one-level kernels W_G of the classical groups."""
    sin_part = 0.5 * t.window_integral()  # int f(x) sin(2 pi x)/(2 pi x) dx
    delta_part = 0.5 * t.f0
    base = t.fhat0
    return {
        MatrixGroup.U: base,
        MatrixGroup.USp: base - sin_part,
        MatrixGroup.O: base + delta_part,
        MatrixGroup.SOeven: base + sin_part,
        MatrixGroup.SOodd: base + delta_part - sin_part,
    }[G]
