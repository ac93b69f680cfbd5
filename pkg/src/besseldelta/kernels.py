"""Bessel functions of real and purely imaginary order, and the GL(2) kernel
transforms built from them.

Two kernel families are supported: holomorphic forms of even weight kappa,
whose transform is 2*pi*i^kappa * J_{kappa-1}, and (tempered) Maass forms of
spectral parameter mu, whose J-type transform combines J_{2*i*mu} and
J_{-2*i*mu} and whose K-type transform is a rescaled K_{2*i*mu}.

Evaluation strategy for J_nu: an ascending power series run at extended
working precision for small and moderate arguments, and the large-argument
expansion in exponential form

    J_nu(x) = x^{-1/2} * sum_j (a_j e^{ix} + b_j e^{-ix}) / x^j + O(x^{-3/2-J})

with  a_j = (nu,j) (i/2)^j e(-(2nu+1)/8) / sqrt(2 pi)  and
      b_j = (nu,j) (-i/2)^j e((2nu+1)/8) / sqrt(2 pi),

where (nu,j) is the Hankel symbol.  The asymptotic branch is used only when
its first omitted term certifies the requested tolerance; otherwise the
series branch runs with enough digits to defeat the e^x cancellation.

All functions here are pure; values depend only on the arguments, so
concurrent use needs no locking.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .errors import DomainError, ParameterError, PrecisionLossError

__all__ = [
    "Holomorphic",
    "Maass",
    "BesselKernel",
    "AsymptoticCoefficients",
    "hankel_symbol",
    "bessel_j",
    "kernel_j",
    "kernel_k",
    "kernel_expansion",
    "expansion_eval",
    "expansion_truncation",
    "SERIES_ASYMPTOTIC_CROSSOVER",
]

#: Fixed crossover between the ascending series and the exponential expansion.
SERIES_ASYMPTOTIC_CROSSOVER = 30.0

_MAX_SERIES_DIGITS = 12000
_MAX_EXPANSION_TERMS = 64
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Holomorphic:
    """Holomorphic cusp form kernel of even weight kappa >= 4."""

    kappa: int

    def __post_init__(self):
        if self.kappa < 4 or self.kappa % 2 != 0:
            raise ParameterError(
                f"holomorphic weight must be an even integer >= 4, got {self.kappa}")

    @property
    def bessel_order(self) -> float:
        return float(self.kappa - 1)

    def label(self) -> str:
        return f"holo:{self.kappa}"


@dataclass(frozen=True)
class Maass:
    """Tempered Maass form kernel with real spectral parameter mu > 0.

    The complementary-series range (i*mu real) is rejected: every quantitative
    contract in this package assumes mu real.  ``reflection_sign`` is the
    eigenvalue under the reflection operator and only enters the K-transform.
    """

    mu: float
    reflection_sign: int = 1

    def __post_init__(self):
        if not (self.mu > 0) or not math.isfinite(self.mu):
            raise ParameterError(
                f"Maass spectral parameter must be real and positive, got {self.mu}")
        if self.reflection_sign not in (-1, 1):
            raise ParameterError("reflection sign must be +1 or -1")

    def label(self) -> str:
        sign = "+" if self.reflection_sign > 0 else "-"
        return f"maass:{self.mu:g}:{sign}"


BesselKernel = Holomorphic | Maass


def parse_kernel(text: str) -> BesselKernel:
    """Parse ``holo:<kappa>`` or ``maass:<mu>[:+|-]`` into a kernel."""
    parts = text.split(":")
    if parts[0] == "holo" and len(parts) == 2:
        return Holomorphic(int(parts[1]))
    if parts[0] == "maass" and len(parts) in (2, 3):
        sign = 1
        if len(parts) == 3:
            sign = 1 if parts[2] in ("+", "+1", "1") else -1
        return Maass(float(parts[1]), sign)
    raise ParameterError(f"cannot parse kernel spec {text!r}")


def hankel_symbol(nu, j: int) -> float:
    """Hankel symbol (nu, j) = prod_{k=1..j} (4 nu^2 - (2k-1)^2) / (4^j j!).

    (nu, 0) = 1.  Exact product evaluation; no Gamma calls.  ``nu`` may be
    real or purely imaginary (then 4 nu^2 is real and so is the symbol).
    """
    if j < 0:
        raise ParameterError("hankel_symbol order j must be >= 0")
    four_nu_sq = 4.0 * complex(nu) ** 2
    if abs(four_nu_sq.imag) > 1e-12 * (1.0 + abs(four_nu_sq.real)):
        raise ParameterError(
            "hankel_symbol requires real or purely imaginary order")
    q = four_nu_sq.real
    out = 1.0
    for k in range(1, j + 1):
        out *= (q - (2 * k - 1) ** 2) / (4.0 * k)
    return out


def _check_order(order) -> complex:
    nu = complex(order)
    if abs(nu.real) > 1e-14 and abs(nu.imag) > 1e-14:
        raise ParameterError(
            "bessel order must be real or purely imaginary, got %r" % (order,))
    return nu


def _phase_eighth(nu: complex, sign: int) -> complex:
    # e(sign*(2 nu + 1)/8) = exp(sign * i pi (2 nu + 1)/4)
    return cmath.exp(sign * 1j * math.pi * (2.0 * nu + 1.0) / 4.0)


def _ab_coefficients(nu: complex, count: int) -> tuple[list[complex], list[complex]]:
    """First ``count`` exponential-form expansion coefficients a_j, b_j for J_nu."""
    pa = _phase_eighth(nu, -1) / _SQRT_2PI
    pb = _phase_eighth(nu, +1) / _SQRT_2PI
    a: list[complex] = []
    b: list[complex] = []
    h = 1.0  # running Hankel symbol
    q = (4.0 * nu * nu).real
    for j in range(count):
        if j > 0:
            h *= (q - (2 * j - 1) ** 2) / (4.0 * j)
        a.append(h * (0.5j) ** j * pa)
        b.append(h * (-0.5j) ** j * pb)
    return a, b


def _asymptotic_value(nu: complex, x: float, rel_tol: float):
    """Exponential-form expansion of J_nu(x), or None if it cannot certify rel_tol.

    Truncates at the first term whose magnitude falls below rel_tol times the
    leading magnitude; gives up if no such term appears before the divergent
    tail takes over.
    """
    a, b = _ab_coefficients(nu, _MAX_EXPANSION_TERMS)
    lead = abs(a[0]) + abs(b[0])
    cut = None
    prev = math.inf
    grow = 0
    for j in range(_MAX_EXPANSION_TERMS):
        m = (abs(a[j]) + abs(b[j])) * x ** (-j)
        if m < 0.005 * rel_tol * lead:
            cut = j
            break
        if m > prev:
            grow += 1
            if grow >= 3 and m > 10.0 * lead:
                return None  # divergent tail before certification
        else:
            grow = 0
        prev = m
    if cut is None:
        return None
    ep = cmath.exp(1j * x)
    em = 1.0 / ep
    acc = 0.0 + 0.0j
    for j in range(cut - 1, -1, -1):
        acc = acc / x + (a[j] * ep + b[j] * em)
    return acc / math.sqrt(x)


def _series_digits(nu: complex, x: float) -> int:
    # Cancellation in the ascending series is ~ e^x; for real order nu the
    # early terms also reach (x/2)^nu / Gamma(nu+1).
    extra = 0.0
    if abs(nu.real) > 0:
        extra = abs(nu.real) * max(0.0, math.log10(x / 2.0 + 1.0))
    return 30 + int(0.45 * x + extra)


def _series_value(nu: complex, x: float) -> complex:
    """Ascending power series for J_nu(x) at extended working precision."""
    digits = _series_digits(nu, x)
    if digits > _MAX_SERIES_DIGITS:
        raise PrecisionLossError(
            f"series evaluation of J_nu at x={x} needs {digits} digits "
            f"(cap {_MAX_SERIES_DIGITS})",
            achieved=None)
    with mp.workdps(digits):
        z = mp.mpf(x) / 2
        if abs(nu.imag) > 0:
            order = mp.mpc(nu.real, nu.imag)
        else:
            order = mp.mpf(nu.real)
        zz = z * z
        term = z ** order * mp.rgamma(order + 1)
        total = term
        peak = abs(term)
        floor = mp.mpf(10) ** (-(digits - 8))
        m = 0
        while True:
            m += 1
            term = term * (-zz) / (m * (order + m))
            total += term
            mag = abs(term)
            if mag > peak:
                peak = mag
            if mag < floor * (peak + 1) and 2 * m > x:
                break
            if m > 10 * digits + 4 * x + 1000:
                raise PrecisionLossError(
                    "ascending series failed to terminate", achieved=float(mag))
        return complex(total)


def bessel_j(order, x: float, tol: float = 1e-10) -> complex:
    """J-Bessel function for real or purely imaginary order.

    Relative accuracy ``tol`` (default 1e-10) on x > 0.  Above the crossover
    the exponential-form expansion is used whenever its first omitted term
    certifies the tolerance; everywhere else the ascending series runs at
    extended precision.
    """
    if not (x > 0):
        raise DomainError(f"bessel_j requires x > 0, got {x}")
    nu = _check_order(order)
    if x >= SERIES_ASYMPTOTIC_CROSSOVER:
        val = _asymptotic_value(nu, x, tol)
        if val is not None:
            return val
    return _series_value(nu, x)


def kernel_j(kernel: BesselKernel, x: float, tol: float = 1e-10) -> complex:
    """The oscillatory J-type kernel transform attached to a form.

    Holomorphic weight kappa:  2 pi i^kappa J_{kappa-1}(x).
    Maass parameter mu:        pi*i/sinh(pi mu) * (J_{2 i mu}(x) - J_{-2 i mu}(x)),
    which is real for real x (the two orders are conjugate).
    """
    if isinstance(kernel, Holomorphic):
        rot = (1, 1j, -1, -1j)[kernel.kappa % 4]
        return 2.0 * math.pi * rot * bessel_j(kernel.bessel_order, x, tol)
    mu = kernel.mu
    jp = bessel_j(2j * mu, x, tol)
    jm = bessel_j(-2j * mu, x, tol)
    return (math.pi * 1j / math.sinh(math.pi * mu)) * (jp - jm)


def kernel_k(kernel: BesselKernel, x: float) -> float:
    """The exponentially decaying K-type transform.

    Maass: 4 * reflection_sign * cosh(pi mu) * K_{2 i mu}(x), real-valued.
    Holomorphic: identically 0 by the structure of the summation formula.
    """
    if not (x > 0):
        raise DomainError(f"kernel_k requires x > 0, got {x}")
    if isinstance(kernel, Holomorphic):
        return 0.0
    mu = kernel.mu
    with mp.workdps(25):
        kv = mp.besselk(mp.mpc(0, 2.0 * mu), mp.mpf(x))
        val = 4.0 * kernel.reflection_sign * mp.cosh(mp.pi * mu) * mp.re(kv)
        return float(val)


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Coefficients of the exponential-form large-argument kernel expansion.

      kernel_j(g, y) = sum_{j<=j_max} (c_j e^{iy} + d_j e^{-iy}) y^{-j-1/2}
                       + O(y^{-3/2-j_max})

    The coefficients depend only on the kernel parameter (kappa or mu), never
    on the argument.  c_0 = sqrt(pi)(1+i) and d_0 = sqrt(pi)(1-i) for every
    kernel.
    """

    c: tuple[complex, ...]
    d: tuple[complex, ...]

    @property
    def j_max(self) -> int:
        return len(self.c) - 1


@lru_cache(maxsize=None)
def kernel_expansion(kernel: BesselKernel, j_max: int) -> AsymptoticCoefficients:
    """Expansion coefficients c_j, d_j of the J-type kernel, j = 0..j_max."""
    if j_max < 0:
        raise ParameterError("expansion order must be >= 0")
    n = j_max + 1
    if isinstance(kernel, Holomorphic):
        rot = 2.0 * math.pi * (1, 1j, -1, -1j)[kernel.kappa % 4]
        a, b = _ab_coefficients(complex(kernel.bessel_order), n)
        c = tuple(rot * aj for aj in a)
        d = tuple(rot * bj for bj in b)
    else:
        mu = kernel.mu
        pref = math.pi * 1j / math.sinh(math.pi * mu)
        ap, bp = _ab_coefficients(2j * mu, n)
        am, bm = _ab_coefficients(-2j * mu, n)
        c = tuple(pref * (ap[j] - am[j]) for j in range(n))
        d = tuple(pref * (bp[j] - bm[j]) for j in range(n))
    return AsymptoticCoefficients(c=c, d=d)


def expansion_eval(coeffs: AsymptoticCoefficients, y: float) -> complex:
    """Evaluate the truncated exponential-form expansion at argument y > 0."""
    if not (y > 0):
        raise DomainError("expansion argument must be positive")
    ep = cmath.exp(1j * y)
    em = 1.0 / ep
    acc = 0.0 + 0.0j
    for j in range(coeffs.j_max, -1, -1):
        acc = acc / y + (coeffs.c[j] * ep + coeffs.d[j] * em)
    return acc / math.sqrt(y)


def expansion_truncation(kernel: BesselKernel, y_min: float, rel_tol: float):
    """Smallest truncation order whose first omitted term at y_min is below
    rel_tol relative to the leading coefficient, or None if the expansion
    cannot certify that accuracy at y_min."""
    coeffs = kernel_expansion(kernel, _MAX_EXPANSION_TERMS - 1)
    lead = abs(coeffs.c[0]) + abs(coeffs.d[0])
    for j in range(1, _MAX_EXPANSION_TERMS):
        m = (abs(coeffs.c[j]) + abs(coeffs.d[j])) * y_min ** (-j)
        if m < rel_tol * lead:
            return j - 1
    return None
