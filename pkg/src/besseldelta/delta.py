"""The Bessel-weighted integral I(a, b; X), its diagonal main term C(b, X),
and the two delta-identities built from them.

    I(a, b; X) = int_0^inf  w(x/X) e(2 a sqrt(x)) J_g(4 pi b sqrt(x)) dx

After the substitution x -> X x^2 the integrand lives on the square root of
the window support.  When the kernel argument is uniformly large the kernel
is split into its two explicit exponentials, which turns the integral into a
pair of linear-phase oscillatory integrals with rates proportional to
(a + b) sqrt(X) and (a - b) sqrt(X); otherwise the kernel is evaluated
directly under the integral sign.

The main term

    C(b, X) = X * sum_{j<=J} d_j (4 pi b sqrt(X))^{-j-1/2} * Mellin_w(3/4 - j/2)

is comparable to X (b^2 X)^{-1/4}; on the diagonal a = b the ratio I/C tends
to 1 at rate (b^2 X)^{-(J+1)/2}.

Both delta-identities collapse their complete exponential sums in closed form
(a geometric sum mod p, and a divisor sum of Ramanujan sums mod p*q), so the
arithmetic factor is exact and only the Bessel ratio is numerical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .charsums import is_prime
from .errors import ParameterError
from .kernels import (BesselKernel, expansion_truncation, kernel_expansion,
                      kernel_j)
from .oscillatory import LinearPhase, OscillatorySpec, integrate_oscillatory
from .windows import SmoothBump

__all__ = [
    "DeltaParams",
    "bessel_integral",
    "main_term",
    "delta_single_modulus",
    "delta_two_moduli",
    "diagonal_tolerance",
    "OFF_DIAGONAL_CAP",
]

#: Engineering cap for surviving off-diagonal terms in the delta-identities.
OFF_DIAGONAL_CAP = 0.05

_SPLIT_THRESHOLD = 30.0  # minimum kernel argument for the exponential split


@dataclass(frozen=True)
class DeltaParams:
    """Kernel, window, scale X and main-term truncation order J."""

    kernel: BesselKernel
    window: SmoothBump
    X: float
    J: int = 0

    def __post_init__(self):
        if not (self.X > 0):
            raise ParameterError("scale X must be positive")
        if self.J < 0:
            raise ParameterError("truncation order J must be >= 0")


@lru_cache(maxsize=None)
def _mellin_value(window: SmoothBump, j: int) -> complex:
    return window.mellin(0.75 - 0.5 * j)


def _default_tolerance(params: DeltaParams, b: float) -> float:
    return 1e-9 * params.X * (b * b * params.X) ** -0.25


def bessel_integral(params: DeltaParams, a: float, b: float,
                    tol: float | None = None) -> complex:
    """I(a, b; X) to absolute accuracy ``tol``
    (default 1e-9 * X * (b^2 X)^{-1/4})."""
    if a < 0 or not (b > 0):
        raise ParameterError("requires a >= 0 and b > 0")
    X = params.X
    w = params.window
    if tol is None:
        tol = _default_tolerance(params, b)
    sx = math.sqrt(X)
    beta = 4.0 * math.pi * b * sx          # kernel argument = beta * x
    x_lo = math.sqrt(w.lo)
    x_hi = math.sqrt(w.hi)
    y_min = beta * x_lo
    scale = X * (b * b * X) ** -0.25       # magnitude of the main term

    use_split = y_min >= _SPLIT_THRESHOLD and b * b * X >= 10.0
    cut = None
    if use_split:
        rel_target = min(1e-10, 0.25 * tol / scale)
        cut = expansion_truncation(params.kernel, y_min, rel_target)
        use_split = cut is not None

    if use_split:
        coeffs = kernel_expansion(params.kernel, cut)
        c = np.asarray(coeffs.c)
        d = np.asarray(coeffs.d)

        def series_amp(coefvec):
            def amp(x, deriv=0):
                if deriv != 0:
                    raise ParameterError("split amplitude provides values only")
                y = beta * x
                powers = y[:, None] ** (-np.arange(len(coefvec))[None, :] - 0.5)
                return 2.0 * X * x * w(x * x) * (powers @ coefvec)
            return amp

        out = 0.0 + 0.0j
        for coefvec, rate in ((c, 2.0 * math.pi * (2 * a + 2 * b) * sx),
                              (d, 2.0 * math.pi * (2 * a - 2 * b) * sx)):
            spec = OscillatorySpec(lo=x_lo, hi=x_hi,
                                   amplitude=series_amp(coefvec),
                                   phase=LinearPhase(rate),
                                   tolerance=0.5 * tol)
            out += integrate_oscillatory(spec).value
        return out

    # direct kernel evaluation under the integral
    def amp(x, deriv=0):
        if deriv != 0:
            raise ParameterError("direct amplitude provides values only")
        kv = np.array([kernel_j(params.kernel, float(beta * xi)) for xi in x],
                      dtype=complex)
        return 2.0 * X * x * w(x * x) * kv

    spec = OscillatorySpec(lo=x_lo, hi=x_hi, amplitude=amp,
                           phase=LinearPhase(4.0 * math.pi * a * sx),
                           tolerance=tol, amplitude_bandwidth=beta)
    return integrate_oscillatory(spec).value


def main_term(params: DeltaParams, b: float) -> complex:
    """C(b, X): the truncated diagonal main term at order params.J."""
    if not (b > 0):
        raise ParameterError("requires b > 0")
    X = params.X
    beta = 4.0 * math.pi * b * math.sqrt(X)
    coeffs = kernel_expansion(params.kernel, params.J)
    out = 0.0 + 0.0j
    for j in range(params.J + 1):
        out += coeffs.d[j] * beta ** (-j - 0.5) * _mellin_value(params.window, j)
    return X * out


def diagonal_tolerance(scale: float, X: float, modulus: int) -> float:
    """Engineering tolerance for the diagonal deviation of a delta-identity:
    10 * (scale * X / modulus^2)^{-1/2}."""
    return 10.0 / math.sqrt(scale * X / modulus ** 2)


def _check_scale(X: float, hi: int, lo: int, modulus: int, what: str):
    cap = X ** 0.9
    if cap <= hi:
        raise ParameterError(
            f"requires X^0.9 > {what} scale: X^0.9 = {cap:.6g} <= {hi}")
    if cap <= modulus ** 2 / lo:
        raise ParameterError(
            f"requires X^0.9 > modulus^2/scale: X^0.9 = {cap:.6g} <= "
            f"{modulus ** 2 / lo:.6g}")


def delta_single_modulus(params: DeltaParams, p: int, r: int, n: int,
                         tol: float | None = None) -> complex:
    """Single-modulus delta approximation:

        (1/p) sum_{a mod p} e(a(n-r)/p) * I(sqrt(r)/p, sqrt(n)/p; X) / C(sqrt(r)/p, X)

    The full additive-character sum equals p when p | n-r and 0 otherwise, so
    the value is [p | n-r] * I/C exactly; the Bessel ratio is the only
    numerical ingredient.  Near n = r the result approximates the Kronecker
    delta of n - r.
    """
    if not is_prime(p):
        raise ParameterError(f"modulus p = {p} must be prime")
    if r < 1 or n < 1:
        raise ParameterError("requires r, n >= 1")
    _check_scale(params.X, max(r, n), min(r, n), p, "sample")
    if (n - r) % p != 0:
        return 0.0 + 0.0j
    a = math.sqrt(r) / p
    b = math.sqrt(n) / p
    ig = bessel_integral(params, a, b, tol=tol)
    return ig / main_term(params, a)


def delta_two_moduli(params: DeltaParams, p: int, q: int, m: int, n: int,
                     tol: float | None = None) -> complex:
    """Two-moduli delta approximation over c | p q:

        (1/pq) sum_{c | pq} sum*_{a mod c} e(a(n-m)/c) * I(sqrt(m)/pq, sqrt(n)/pq; X)
                                                     / C(sqrt(m)/pq, X)

    The double sum is a divisor sum of Ramanujan sums and collapses to
    pq * [pq | n-m] exactly.
    """
    if not is_prime(p) or not is_prime(q):
        raise ParameterError("p and q must be prime")
    if p == q:
        raise ParameterError("p and q must be distinct primes")
    if m < 1 or n < 1:
        raise ParameterError("requires m, n >= 1")
    pq = p * q
    _check_scale(params.X, max(m, n), min(m, n), pq, "sample")
    if (n - m) % pq != 0:
        return 0.0 + 0.0j
    a = math.sqrt(m) / pq
    b = math.sqrt(n) / pq
    ig = bessel_integral(params, a, b, tol=tol)
    return ig / main_term(params, a)
