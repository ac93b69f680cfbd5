"""Compactly supported smooth weight functions.

Two recipes, both vanishing to infinite order at the support endpoints:

* ``bump``:    w(x) = exp(-1/(1-t^2)) with t the affine map of (lo, hi) onto
  (-1, 1); not normalized to unit mass.
* ``plateau``: identically 1 on [lo + 1/delta, hi - 1/delta] with ramps
  r(u) = B(u)/(B(u) + B(1-u)), B(u) = exp(-1/u), of width 1/delta; the j-th
  derivative is bounded by C_j * delta^j.

Derivatives (orders 0..8) are produced by exact rational-polynomial
recursions, never by numerical differencing.  Evaluation is vectorized over
numpy arrays, and instances are immutable, so sharing across threads is safe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ParameterError

__all__ = ["SmoothBump", "bump_window", "plateau_window", "MAX_DERIV_ORDER"]

MAX_DERIV_ORDER = 8

_EXP_FLOOR = -700.0  # exp() underflow guard


def _bump_numerators(max_order: int) -> list[list[int]]:
    """Numerator polynomials P_j(t) with
    d^j/dt^j exp(-1/(1-t^2)) = P_j(t) / (1-t^2)^{2j} * exp(-1/(1-t^2)).

    Recursion: P_{j+1} = (1-t^2)^2 P_j' + (4 j t (1-t^2) - 2 t) P_j.
    Coefficients are exact integers (ascending powers of t).
    """

    def dpoly(p):
        return [k * p[k] for k in range(1, len(p))] or [0]

    def mul(p, q):
        out = [0] * (len(p) + len(q) - 1)
        for i, a in enumerate(p):
            for k, b in enumerate(q):
                out[i + k] += a * b
        return out

    def add(p, q):
        n = max(len(p), len(q))
        return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                for i in range(n)]

    one_minus_t2 = [1, 0, -1]
    sq = mul(one_minus_t2, one_minus_t2)
    polys = [[1]]
    for j in range(max_order):
        pj = polys[-1]
        lead = mul(sq, dpoly(pj))
        tail = mul(add(mul([0, 4 * j], one_minus_t2), [0, -2]), pj)
        polys.append(add(lead, tail))
    return polys


_BUMP_POLYS = _bump_numerators(MAX_DERIV_ORDER + 2)


def _ramp_numerators(max_order: int) -> list[list[int]]:
    """Polynomials Q_k(u) with d^k/du^k exp(-1/u) = Q_k(u)/u^{2k} * exp(-1/u).

    Recursion: Q_{k+1} = u^2 Q_k' + (1 - 2 k u) Q_k.
    """
    polys = [[1]]
    for k in range(max_order):
        q = polys[-1]
        dq = [i * q[i] for i in range(1, len(q))] or [0]
        u2dq = [0, 0] + dq
        other = [q[0]] + [(q[i] if i < len(q) else 0) - 2 * k * q[i - 1]
                          for i in range(1, len(q) + 1)]
        n = max(len(u2dq), len(other))
        polys.append([(u2dq[i] if i < len(u2dq) else 0)
                      + (other[i] if i < len(other) else 0) for i in range(n)])
    return polys


_RAMP_POLYS = _ramp_numerators(MAX_DERIV_ORDER + 2)


def _polyval(coeffs, u):
    acc = np.zeros_like(u)
    for ck in reversed(coeffs):
        acc = acc * u + float(ck)
    return acc


def _exp_flat(u, order: int):
    """Q_order(u) * exp(-1/u - 2*order*log u) for u > 0, 0 elsewhere.

    This is d^order/du^order exp(-1/u), evaluated without overflow near u=0.
    """
    out = np.zeros_like(u)
    pos = u > 0
    if np.any(pos):
        up = u[pos]
        expo = -1.0 / up - 2.0 * order * np.log(up)
        good = expo > _EXP_FLOOR
        vals = np.zeros_like(up)
        vals[good] = _polyval(_RAMP_POLYS[order], up[good]) * np.exp(expo[good])
        out[pos] = vals
    return out


def _ramp_derivs(u: np.ndarray, max_order: int) -> list[np.ndarray]:
    """Derivatives 0..max_order of r(u) = B(u)/(B(u)+B(1-u)) on 0 < u < 1."""
    num = [_exp_flat(u, k) for k in range(max_order + 1)]
    negpow = [(-1.0) ** k for k in range(max_order + 1)]
    den = [num[k] + negpow[k] * _exp_flat(1.0 - u, k) for k in range(max_order + 1)]
    r: list[np.ndarray] = []
    for n in range(max_order + 1):
        acc = num[n].copy()
        for k in range(n):
            acc -= math.comb(n, k) * r[k] * den[n - k]
        r.append(acc / den[0])
    return r


@dataclass(frozen=True)
class SmoothBump:
    """A compactly supported C-infinity window on (lo, hi).

    ``derivative_scale`` (delta) is 1 for the pure bump profile and >= 1 for
    plateau profiles, where it sets the ramp width 1/delta.
    """

    lo: float
    hi: float
    derivative_scale: float = 1.0
    profile: str = "bump"

    def __post_init__(self):
        if not (0 < self.lo < self.hi):
            raise ParameterError("window must satisfy 0 < lo < hi")
        if self.profile not in ("bump", "plateau"):
            raise ParameterError(f"unknown window profile {self.profile!r}")
        if self.profile == "plateau":
            if self.derivative_scale < 4.0 / (self.hi - self.lo):
                raise ParameterError(
                    "plateau window needs delta >= 4/(hi-lo); got "
                    f"delta={self.derivative_scale}, support ({self.lo}, {self.hi})")

    # -- evaluation ------------------------------------------------------

    def __call__(self, x, deriv: int = 0):
        """j-th derivative at x; identically 0 outside [lo, hi]."""
        if deriv < 0 or deriv > MAX_DERIV_ORDER:
            raise ParameterError(
                f"derivative order {deriv} unsupported (max {MAX_DERIV_ORDER})")
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if self.profile == "bump":
            out = self._eval_bump(arr, deriv)
        else:
            out = self._eval_plateau(arr, deriv)
        return float(out[0]) if scalar else out

    def _eval_bump(self, x: np.ndarray, deriv: int) -> np.ndarray:
        mid = 0.5 * (self.lo + self.hi)
        s = 2.0 / (self.hi - self.lo)
        t = (x - mid) * s
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        if np.any(inside):
            ti = t[inside]
            u = 1.0 - ti * ti
            expo = -1.0 / u - 2.0 * deriv * np.log(u)
            good = expo > _EXP_FLOOR
            vals = np.zeros_like(ti)
            vals[good] = (_polyval(_BUMP_POLYS[deriv], ti[good])
                          * np.exp(expo[good]) * s ** deriv)
            out[inside] = vals
        return out

    def _eval_plateau(self, x: np.ndarray, deriv: int) -> np.ndarray:
        d = self.derivative_scale
        w = 1.0 / d
        out = np.zeros_like(x)
        if deriv == 0:
            out[(x >= self.lo + w) & (x <= self.hi - w)] = 1.0
        left = (x > self.lo) & (x < self.lo + w)
        if np.any(left):
            u = (x[left] - self.lo) * d
            out[left] = _ramp_derivs(u, deriv)[deriv] * d ** deriv
        right = (x > self.hi - w) & (x < self.hi)
        if np.any(right):
            u = (self.hi - x[right]) * d
            out[right] = _ramp_derivs(u, deriv)[deriv] * (-d) ** deriv
        return out

    # -- derived quantities ----------------------------------------------

    def mellin(self, s) -> complex:
        """Mellin transform  integral of w(x) x^{s-1} dx  to ~1e-12 absolute."""
        sc = complex(s)

        def re_part(x):
            return float((self(x) * x ** (sc - 1)).real)

        def im_part(x):
            return float((self(x) * x ** (sc - 1)).imag)

        pts = self._breakpoints()
        re, _ = quad(re_part, self.lo, self.hi, points=pts, limit=400,
                     epsabs=1e-13, epsrel=1e-13)
        if abs(sc.imag) < 1e-300:
            return complex(re, 0.0)
        im, _ = quad(im_part, self.lo, self.hi, points=pts, limit=400,
                     epsabs=1e-13, epsrel=1e-13)
        return complex(re, im)

    def mass(self) -> float:
        return self.mellin(1.0).real

    def variation(self) -> float:
        """Total variation; polyline variation on a fine grid (O(h^2) exact)."""
        grid = np.linspace(self.lo, self.hi, 1 << 16)
        vals = self(grid)
        return float(np.sum(np.abs(np.diff(vals))))

    def _breakpoints(self):
        if self.profile == "plateau":
            w = 1.0 / self.derivative_scale
            return [self.lo + w, self.hi - w]
        return [0.5 * (self.lo + self.hi)]


def bump_window(lo: float = 1.0, hi: float = 2.0) -> SmoothBump:
    """The canonical bump on (lo, hi)."""
    return SmoothBump(lo=lo, hi=hi, derivative_scale=1.0, profile="bump")


def plateau_window(lo: float, hi: float, delta: float) -> SmoothBump:
    """Window == 1 on [lo + 1/delta, hi - 1/delta] with smooth ramps."""
    return SmoothBump(lo=lo, hi=hi, derivative_scale=float(delta),
                      profile="plateau")
