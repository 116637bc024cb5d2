"""Convergence acceleration for alternating series."""

from __future__ import annotations

import math
from collections.abc import Callable


def alternating_sum(term: Callable[[int], complex], n: int = 40) -> complex:
    """sum_{k>=0} (-1)^k term(k) by the Cohen-Rodriguez Villegas-Zagier scheme.

    For totally monotone (or analytic-moment) terms the error is about
    5.83^{-n} times the size of the first term.
    """
    d = (3 + math.sqrt(8)) ** n
    d = (d + 1 / d) / 2
    b, c = -1.0, -d
    s = 0.0
    for k in range(n):
        c = b - c
        s += c * term(k)
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1))
    return s / d
