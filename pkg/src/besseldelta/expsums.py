"""Finite exponential sums weighted by Hecke eigenvalues: smoothed sums with
phase T*phi(n/N) + gamma*n, sharp-cutoff nonlinear sums, character-and-
|n|^{-it} twisted sums, and the exact amplified split

    S(N) = S1(N) + S2(N)

obtained from |lam(l)|^2 lam(k) = conj(lam(l)) [lam(l k) + 1_{l | k} lam(k/l)]
for auxiliary primes l.  All sums are exact finite sums (no truncation beyond
the window support); terms are accumulated with exactly rounded compensated
summation, so results are independent of summation order.

Empirical size exponents are extracted by least squares on dyadic samples of
log |S| against log N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .charsums import DirichletCharacter, is_prime
from .errors import (DegenerateInputError, InsufficientDataError,
                     ParameterError, ResourceError)
from .windows import SmoothBump

__all__ = [
    "PhaseSpec",
    "power_phase",
    "RAMANUJAN_EXPONENT_HOLOMORPHIC",
    "smooth_exp_sum",
    "sharp_exp_sum",
    "twisted_sum",
    "amplification_split",
    "AmplifiedSplit",
    "exponent_fit",
    "ExponentFit",
    "random_sign_sum",
]

#: Best coefficient-growth exponent for holomorphic forms ("can take 0").
#: Recorded for documentation; no operation consumes it.
RAMANUJAN_EXPONENT_HOLOMORPHIC = 0.0

_T_CAP = 1e4


@dataclass(frozen=True)
class PhaseSpec:
    """Phase f(x) = T * phi(x / N) + gamma * x with curved profile phi.

    ``phi(x, deriv=0)`` must be smooth on (1/2, 5/2) with |phi''| bounded
    away from 0 (grid-checked at construction through ``validate``).
    """

    T: float
    phi: Callable
    gamma: float
    N: float

    def validate(self):
        grid = np.linspace(0.5, 2.5, 257)
        d2 = np.abs(np.asarray(self.phi(grid, 2), dtype=float))
        if float(np.min(d2)) < 0.99:
            raise ParameterError(
                "phase profile needs |phi''| >= 0.99 on (1/2, 5/2); "
                f"min is {float(np.min(d2)):.4g}")
        return self

    def eval(self, n: np.ndarray) -> np.ndarray:
        return self.T * np.asarray(self.phi(n / self.N, 0), dtype=float) \
            + self.gamma * n


def power_phase(beta: float):
    """phi(x) = x^beta with derivatives, for the nonlinear phase family."""

    def phi(x, deriv: int = 0):
        x = np.asarray(x, dtype=float)
        coef = 1.0
        for k in range(deriv):
            coef *= beta - k
        return coef * x ** (beta - deriv)

    return phi


def _csum(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real.tolist()),
                   math.fsum(values.imag.tolist()))


def _support_range(window: SmoothBump, N: float) -> tuple[int, int]:
    return int(math.floor(window.lo * N)) + 1, int(math.ceil(window.hi * N)) - 1


def smooth_exp_sum(provider, phase: PhaseSpec, window: SmoothBump) -> complex:
    """sum_n lam(n) e(f(n)) V(n/N) over the window support (exact finite sum)."""
    N = phase.N
    lo, hi = _support_range(window, N)
    if hi > provider.n_max:
        raise ResourceError(
            f"needs lam up to {hi}, table holds {provider.n_max}", required=hi)
    ns = np.arange(lo, hi + 1)
    lam = provider.lam_array(hi)[lo:]
    f = phase.eval(ns.astype(float))
    vals = lam * window(ns / N) * np.exp(2j * np.pi * (f - np.floor(f)))
    return _csum(vals)


def sharp_exp_sum(provider, alpha: float, beta: float, gamma: float,
                  N: int) -> complex:
    """sum_{n <= N} lam(n) e(alpha n^beta + gamma n) with a sharp cutoff."""
    if alpha == 0:
        raise ParameterError("requires alpha != 0")
    if beta == 1:
        raise ParameterError("requires beta != 1 (else the phase is linear)")
    if N > provider.n_max:
        raise ResourceError(
            f"needs lam up to {N}, table holds {provider.n_max}", required=N)
    ns = np.arange(1, N + 1, dtype=float)
    lam = provider.lam_array(N)[1:]
    f = alpha * ns ** beta + gamma * ns
    vals = lam * np.exp(2j * np.pi * (f - np.floor(f)))
    return _csum(vals)


def _twist_values(chi: DirichletCharacter, t: float, ns: np.ndarray) -> np.ndarray:
    if abs(t) > _T_CAP:
        raise ParameterError(f"|t| capped at {_T_CAP:g} for phase accuracy")
    return chi(ns) * np.exp(-1j * t * np.log(ns.astype(float)))


def twisted_sum(provider, chi: DirichletCharacter, t: float,
                window: SmoothBump, N: float) -> complex:
    """sum_n lam(n) chi(n) n^{-it} V(n/N)."""
    lo, hi = _support_range(window, N)
    if hi > provider.n_max:
        raise ResourceError(
            f"needs lam up to {hi}, table holds {provider.n_max}", required=hi)
    ns = np.arange(lo, hi + 1)
    lam = provider.lam_array(hi)[lo:]
    vals = lam * _twist_values(chi, t, ns) * window(ns / N)
    return _csum(vals)


@dataclass(frozen=True)
class AmplifiedSplit:
    total: complex
    diagonal_part: complex   # the delta(n - r l) piece
    descent_part: complex    # the lam(n / l) piece
    residual: float

    @property
    def passed(self) -> bool:
        return self.residual <= 1e-9 * (1.0 + abs(self.total))


def amplification_split(provider, chi: DirichletCharacter, t: float,
                        window: SmoothBump, N: float,
                        primes_l: Sequence[int]) -> AmplifiedSplit:
    """Exact two-piece decomposition of the twisted sum over an amplifier set.

    With W(k) = chi(k) k^{-it} V(k/N) and L* = sum_l |lam(l)|^2,

        S  = sum_k lam(k) W(k)
        S1 = (1/L*) sum_l conj(lam(l)) sum_r W(r) sum_n lam(n) delta(n - r l)
        S2 = (1/L*) sum_l conj(lam(l)) sum_n lam(n) W(l n)

    The Kronecker delta in S1 is evaluated literally, so S = S1 + S2 is an
    exact identity; the residual only carries floating-point rounding.
    """
    ells = sorted(set(int(l) for l in primes_l))
    if not ells:
        raise DegenerateInputError("amplifier set is empty")
    for l in ells:
        if not is_prime(l):
            raise ParameterError(f"amplifier {l} is not prime")
        if l % chi.q == 0:
            raise ParameterError(
                f"amplifier {l} shares a factor with the character modulus")
    lo, hi = _support_range(window, N)
    need = hi * max(ells)
    if need > provider.n_max:
        raise ResourceError(
            f"needs lam up to {need}, table holds {provider.n_max}",
            required=need)
    lam_full = provider.lam_array(need)
    l_star = math.fsum(lam_full[l] ** 2 for l in ells)
    if l_star == 0.0:
        raise DegenerateInputError(
            "every amplifier eigenvalue vanishes (L* = 0)")

    ns = np.arange(lo, hi + 1)
    w_vals = _twist_values(chi, t, ns) * window(ns / N)
    total = _csum(lam_full[ns] * w_vals)

    s1_parts = []
    s2_parts = []
    for l in ells:
        lam_l = lam_full[l]
        # sum_r W(r) lam(r l): the delta picks n = r l
        s1_parts.append(lam_l * _csum(w_vals * lam_full[ns * l]))
        # sum_n lam(n) W(l n) over l n in the support
        m_lo = max(1, int(math.floor(window.lo * N / l)) + 1)
        m_hi = int(math.ceil(window.hi * N / l)) - 1
        if m_hi >= m_lo:
            ms = np.arange(m_lo, m_hi + 1)
            w_ln = _twist_values(chi, t, ms * l) * window(ms * l / N)
            s2_parts.append(lam_l * _csum(lam_full[ms] * w_ln))
        else:
            s2_parts.append(0.0 + 0.0j)
    s1 = complex(math.fsum(p.real for p in s1_parts),
                 math.fsum(p.imag for p in s1_parts)) / l_star
    s2 = complex(math.fsum(p.real for p in s2_parts),
                 math.fsum(p.imag for p in s2_parts)) / l_star
    return AmplifiedSplit(total=total, diagonal_part=s1, descent_part=s2,
                          residual=abs(total - s1 - s2))


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    used: int


def exponent_fit(samples: Sequence[tuple[float, float]]) -> ExponentFit:
    """Least-squares slope of log |S| against log N over dyadic samples.

    Samples with |S| = 0 are dropped; at least 4 must remain.
    """
    pts = [(math.log(n), math.log(s)) for n, s in samples if s > 0]
    if len(pts) < 4:
        raise InsufficientDataError(
            f"exponent fit needs >= 4 nonzero samples, got {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(slope=float(slope), intercept=float(intercept),
                       r_squared=r2, used=len(pts))


def random_sign_sum(N: int, seed: int) -> float:
    """|sum of N independent +-1| for a seeded control of square-root size."""
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=N) * 2 - 1
    return abs(float(np.sum(signs)))
