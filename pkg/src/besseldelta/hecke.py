"""Exact Hecke eigenvalue data for the discriminant cusp form (weight 12,
level 1), plus its multiplicativity, mean-square and summation-formula
diagnostics.

The coefficient table is the q-expansion of the 24th power of the Euler
product: the pentagonal-number series for prod (1 - q^k) is raised to the
24th power by a squaring chain (2 -> 4 -> 8 -> 16 -> 24) of truncated
convolutions.  Convolutions run as number-theoretic transforms modulo a set
of word-size primes, and the exact signed integers are recovered by the
Chinese remainder theorem, so every table entry is exact.  Normalized
eigenvalues lam(n) = tau(n) / n^{11/2} are produced only at the boundary.

The summation-formula verifier compares

    sum_n lam(n) e(a n / c) F(n)

against its dual expansion through the oscillatory kernel transform, with the
scale-independent unimodular constant determined once numerically and then
frozen.

Table construction is sequential; the finished provider is immutable and can
be shared freely across threads.
"""
from __future__ import annotations

import hashlib
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .delta import DeltaParams, bessel_integral
from .errors import ParameterError, ResourceError
from .kernels import (BesselKernel, Holomorphic, expansion_truncation,
                      kernel_expansion)
from .oscillatory import batched_linear_transform
from .windows import SmoothBump, plateau_window

__all__ = [
    "TAU_TABLE_CAP",
    "tau_table",
    "tau_checksum",
    "save_tau_cache",
    "load_tau_cache",
    "tau_cache_path",
    "TauCoefficients",
    "hecke_relation_holds",
    "rankin_selberg_ratio",
    "divisor_count_sieve",
    "deligne_bound_holds",
    "VoronoiReport",
    "coefficient_sum_twisted_additive",
    "voronoi_dual_sum",
    "determine_voronoi_phase",
    "voronoi_check",
    "VORONOI_MAX_MODULUS",
    "VORONOI_MAX_SCALE",
]

TAU_TABLE_CAP = 10 ** 6

# NTT-friendly word-size primes; the product exceeds 2 * max |tau(n)| for
# n <= 10^6, so CRT recovers the signed integers uniquely.
_NTT_PRIMES = (998244353, 167772161, 469762049, 754974721, 2013265921)


def _generator(p: int) -> int:
    phi = p - 1
    fac = []
    m = phi
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, p):
        if all(pow(g, phi // f, p) != 1 for f in fac):
            return g
    raise ParameterError(f"no generator for {p}")


def _bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def _ntt(vec: np.ndarray, p: int, g: int, invert: bool) -> np.ndarray:
    n = len(vec)
    a = vec[_bit_reverse_indices(n)].copy()
    length = 2
    while length <= n:
        half = length // 2
        w0 = pow(g, (p - 1) // length, p)
        if invert:
            w0 = pow(w0, p - 2, p)
        tw = np.ones(half, dtype=np.int64)
        filled = 1
        mult = w0
        while filled < half:
            take = min(filled, half - filled)
            tw[filled:filled + take] = tw[:take] * mult % p
            filled += take
            mult = mult * mult % p
        blocks = a.reshape(-1, length)
        u = blocks[:, :half].copy()
        v = blocks[:, half:] * tw % p
        blocks[:, :half] = (u + v) % p
        blocks[:, half:] = (u - v) % p
        length *= 2
    if invert:
        a = a * pow(n, p - 2, p) % p
    return a


class _ModConvolver:
    """Truncated convolution of length-L sequences modulo one NTT prime."""

    def __init__(self, p: int, size: int, keep: int):
        self.p = p
        self.g = _generator(p)
        self.size = size
        self.keep = keep

    def forward(self, coeffs: np.ndarray) -> np.ndarray:
        buf = np.zeros(self.size, dtype=np.int64)
        buf[:len(coeffs)] = coeffs
        return _ntt(buf, self.p, self.g, invert=False)

    def product(self, fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
        prod = fa * fb % self.p
        full = _ntt(prod, self.p, self.g, invert=True)
        return full[:self.keep]

    def square_chain_24(self, base: np.ndarray) -> np.ndarray:
        """base^24 truncated to ``keep`` coefficients mod p."""
        p2 = self.product(*(lambda f: (f, f))(self.forward(base)))
        p4 = self.product(*(lambda f: (f, f))(self.forward(p2)))
        f4 = self.forward(p4)
        p8 = self.product(f4, f4)
        f8 = self.forward(p8)
        p16 = self.product(f8, f8)
        return self.product(self.forward(p16), f8)


def _pentagonal_series(length: int) -> np.ndarray:
    """Coefficients of prod_{k>=1} (1 - q^k) up to degree length-1 (exact,
    integer values in {-1, 0, 1})."""
    out = np.zeros(length, dtype=np.int64)
    out[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= length and g2 >= length:
            break
        s = -1 if k % 2 else 1
        if g1 < length:
            out[g1] = s
        if g2 < length:
            out[g2] = s
        k += 1
    return out


def tau_table(n_max: int, transform_size: int | None = None) -> list[int]:
    """Exact coefficients tau(1..n_max) of the weight-12 level-1 cusp form.

    ``transform_size`` (a power of two >= 2*n_max) only changes the internal
    convolution chunking; the output is identical for every legal value.
    Index 0 of the returned list is 0.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if n_max > TAU_TABLE_CAP:
        raise ResourceError(
            f"tau table capped at {TAU_TABLE_CAP}", required=n_max)
    length = n_max  # degrees 0 .. n_max-1 of the 24th power
    min_size = 1
    while min_size < 2 * length:
        min_size *= 2
    if transform_size is None:
        transform_size = min_size
    if transform_size < min_size or transform_size & (transform_size - 1):
        raise ParameterError(
            f"transform_size must be a power of two >= {min_size}")
    base = _pentagonal_series(length)
    residues = []
    for p in _NTT_PRIMES:
        conv = _ModConvolver(p, transform_size, length)
        residues.append(conv.square_chain_24(base % p))
    # CRT reconstruction to signed integers
    M = 1
    for p in _NTT_PRIMES:
        M *= p
    weights = []
    for p in _NTT_PRIMES:
        Mi = M // p
        weights.append(Mi * pow(Mi % p, -1, p))
    half = M // 2
    tau = [0] * (n_max + 1)
    cols = [r.tolist() for r in residues]
    for i in range(length):
        acc = 0
        for r, w in zip(cols, weights):
            acc += r[i] * w
        acc %= M
        if acc > half:
            acc -= M
        tau[i + 1] = acc
    return tau


def tau_checksum(tau: list[int]) -> str:
    """SHA-256 over the canonical serialization of the table."""
    h = hashlib.sha256()
    h.update(_serialize_tau(tau))
    return h.hexdigest()


def _serialize_tau(tau: list[int]) -> bytes:
    n_max = len(tau) - 1
    out = bytearray()
    out += b"TAUC\x01"
    out += struct.pack("<Q", n_max)
    for n in range(1, n_max + 1):
        v = tau[n]
        nbytes = (v.bit_length() + 8) // 8 or 1
        raw = v.to_bytes(nbytes, "little", signed=True)
        out += struct.pack("<I", len(raw))
        out += raw
    return bytes(out)


def save_tau_cache(tau: list[int], path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(_serialize_tau(tau))


def load_tau_cache(path) -> list[int]:
    data = Path(path).read_bytes()
    if data[:5] != b"TAUC\x01":
        raise ParameterError(f"{path} is not a coefficient cache")
    (n_max,) = struct.unpack_from("<Q", data, 5)
    pos = 13
    tau = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        (ln,) = struct.unpack_from("<I", data, pos)
        pos += 4
        tau[n] = int.from_bytes(data[pos:pos + ln], "little", signed=True)
        pos += ln
    return tau


def tau_cache_path(cache_dir, n_max: int) -> Path:
    return Path(cache_dir) / f"tau_{n_max}.bin"


class TauCoefficients:
    """Normalized Hecke eigenvalues lam(n) = tau(n)/n^{11/2} of the
    discriminant form; the exact integer table stays available for identity
    checks.  Any provider exposing ``n_max``, ``tau``, ``lam`` and
    ``lam_array`` can stand in for this class (one-dimensional spaces of
    higher weight would plug in the same way)."""

    weight = 12

    def __init__(self, tau: list[int]):
        self._tau = tau
        self.n_max = len(tau) - 1
        self._lam_cache: np.ndarray | None = None

    @classmethod
    def build(cls, n_max: int, cache_dir=None) -> "TauCoefficients":
        if cache_dir is not None:
            path = tau_cache_path(cache_dir, n_max)
            if path.exists():
                return cls(load_tau_cache(path))
        tau = tau_table(n_max)
        if cache_dir is not None:
            save_tau_cache(tau, tau_cache_path(cache_dir, n_max))
        return cls(tau)

    def tau(self, n: int) -> int:
        if not (1 <= n <= self.n_max):
            raise ResourceError(
                f"tau({n}) outside table (n_max = {self.n_max})", required=n)
        return self._tau[n]

    def lam(self, n: int) -> float:
        return self.tau(n) / float(n) ** 5.5

    def lam_array(self, n_hi: int) -> np.ndarray:
        """lam(0..n_hi) with the 0 slot set to 0."""
        if n_hi > self.n_max:
            raise ResourceError(
                f"lam_array({n_hi}) outside table (n_max = {self.n_max})",
                required=n_hi)
        if self._lam_cache is None or len(self._lam_cache) <= n_hi:
            n = np.arange(len(self._tau), dtype=float)
            n[0] = 1.0
            self._lam_cache = np.array(self._tau, dtype=float) / n ** 5.5
            self._lam_cache[0] = 0.0
        return self._lam_cache[:n_hi + 1]


def hecke_relation_holds(provider: TauCoefficients, m: int, n: int) -> bool:
    """Exact integer check of tau(m) tau(n) = sum_{d | (m,n)} d^11 tau(m n / d^2)."""
    g = math.gcd(m, n)
    rhs = 0
    for d in range(1, g + 1):
        if g % d == 0:
            rhs += d ** 11 * provider.tau(m * n // (d * d))
    return provider.tau(m) * provider.tau(n) == rhs


def rankin_selberg_ratio(provider: TauCoefficients, N: int) -> float:
    """sum_{n <= N} lam(n)^2 / N; bounded above and below for this form."""
    lam = provider.lam_array(N)
    return float(np.sum(lam[1:] ** 2)) / N


def divisor_count_sieve(n_max: int) -> np.ndarray:
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def deligne_bound_holds(provider: TauCoefficients, n_max: int) -> bool:
    """Exact check of tau(n)^2 <= d(n)^2 n^11 for all n <= n_max."""
    d = divisor_count_sieve(n_max)
    return all(provider.tau(n) ** 2 <= int(d[n]) ** 2 * n ** 11
               for n in range(1, n_max + 1))


# ---------------------------------------------------------------------------
# Summation-formula verifier (level 1, trivial nebentypus, weight 12)

VORONOI_MAX_MODULUS = 5
VORONOI_MAX_SCALE = 200
_VORONOI_MAX_DUAL = 20000


@dataclass(frozen=True)
class VoronoiReport:
    a: int
    c: int
    N: int
    lhs: complex
    rhs: complex
    diff: float
    tol: float
    eta: complex
    dual_terms: int

    @property
    def passed(self) -> bool:
        return self.diff <= self.tol


def _voronoi_window() -> SmoothBump:
    # delta = 4 gives the widest ramps and hence the fastest dual-sum decay
    return plateau_window(1.0, 2.0, 4.0)


def _dual_term_tol(stop_tol: float, N: float) -> float:
    # Floor the per-term quadrature demand at the double-precision noise of
    # the batched panel sums (scale ~ N * 1e-13); below it refinement stalls.
    return max(stop_tol / 2048.0, 6e-12 * N / 50.0)


def coefficient_sum_twisted_additive(provider: TauCoefficients, a: int, c: int,
                                     window: SmoothBump, N: int) -> complex:
    """sum_n lam(n) e(a n / c) F(n) with F(x) = window(x / N)."""
    n_lo = int(math.floor(window.lo * N)) + 1
    n_hi = int(math.ceil(window.hi * N)) - 1
    ns = np.arange(n_lo, n_hi + 1)
    lam = provider.lam_array(n_hi)[n_lo:]
    weights = window(ns / N)
    phases = np.exp(2j * np.pi * (a * ns % c) / c)
    vals = lam * weights * phases
    return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))


def _dual_integral_block(kernel: BesselKernel, window: SmoothBump, N: float,
                         ns: np.ndarray, c: int, term_tol: float) -> np.ndarray:
    """Kernel integrals  int F(x) J_g((4 pi / c) sqrt(n x)) dx  for a block
    of indices n, where F(x) = window(x / N).

    Small arguments go through the scalar engine one at a time; the rest
    share the exponential split, whose two linear-phase pieces are batched
    over the whole block (one node grid per refinement level).
    """
    params = DeltaParams(kernel=kernel, window=window, X=N, J=0)
    x_lo = math.sqrt(window.lo)
    x_hi = math.sqrt(window.hi)
    betas = 4.0 * math.pi * np.sqrt(ns * N) / c
    out = np.zeros(len(ns), dtype=complex)
    small = (betas * x_lo < 30.0) | (ns * N / c ** 2 < 10.0)
    for i in np.nonzero(small)[0]:
        out[i] = bessel_integral(params, 0.0, math.sqrt(float(ns[i])) / c,
                                 tol=term_tol)
    big = ~small
    if not np.any(big):
        return out
    bb = betas[big]
    rel_target = min(1e-10, 0.1 * term_tol / (N * float(np.max(ns)) ** -0.25))
    cut = expansion_truncation(kernel, float(np.min(bb)) * x_lo, rel_target)
    if cut is None:
        for i in np.nonzero(big)[0]:
            out[i] = bessel_integral(params, 0.0, math.sqrt(float(ns[i])) / c,
                                     tol=term_tol)
        return out
    coeffs = kernel_expansion(kernel, cut)
    bmin = float(np.min(bb))

    def make_g(j):
        def g(x):
            return 2.0 * N * x ** (0.5 - j) * window(x * x)
        return g

    amps = [make_g(j) for j in range(cut + 1)]
    sizes = [(abs(coeffs.c[j]) + abs(coeffs.d[j])) * bmin ** (-j - 0.5)
             for j in range(cut + 1)]
    tols = [term_tol / (4.0 * (cut + 1) * max(s, 1e-30)) for s in sizes]
    tmat, _ = batched_linear_transform(amps, x_lo, x_hi, bb, tols)
    acc = np.zeros(len(bb), dtype=complex)
    for j in range(cut + 1):
        acc += bb ** (-j - 0.5) * (coeffs.c[j] * tmat[j]
                                   + coeffs.d[j] * np.conj(tmat[j]))
    out[big] = acc
    return out


def voronoi_dual_sum(provider: TauCoefficients, kernel: BesselKernel, a: int,
                     c: int, window: SmoothBump, N: int, term_tol: float,
                     stop_tol: float,
                     max_terms: int = _VORONOI_MAX_DUAL) -> tuple[complex, int]:
    """sum_n lam(n) e(-a^{-1} n / c) * int F(x) J_g((4 pi / c) sqrt(n x)) dx,
    truncated once the kernel-integral envelope falls below stop_tol."""
    abar = pow(a, -1, c) if c > 1 else 0
    re, im = [], []
    lam_env = 1.0
    n_done = 0
    block = 256
    while True:
        n_hi = min(n_done + block, max_terms)
        if n_hi <= n_done:
            raise ResourceError(
                f"dual sum did not certify its tail within {max_terms} terms",
                required=n_done + 1)
        if n_hi > provider.n_max:
            raise ResourceError(
                f"dual sum needs lam({n_hi}) beyond the table", required=n_hi)
        ns = np.arange(n_done + 1, n_hi + 1)
        integrals = _dual_integral_block(kernel, window, float(N), ns, c,
                                         term_tol)
        lam = provider.lam_array(n_hi)[ns]
        lam_env = max(lam_env, float(np.max(np.abs(lam))))
        terms = lam * np.exp(-2j * np.pi * (abar * ns % c) / c) * integrals
        re.extend(terms.real.tolist())
        im.extend(terms.imag.tolist())
        n_done = n_hi
        if float(np.max(np.abs(integrals))) * (lam_env + 1.0) < stop_tol:
            break
    return complex(math.fsum(re), math.fsum(im)), n_done


_ETA_CACHE: dict = {}


def determine_voronoi_phase(provider: TauCoefficients,
                            kernel: BesselKernel | None = None) -> complex:
    """The unimodular constant of the level-1 summation formula, fixed once
    numerically at (a, c) = (1, 2), N = 50 and then frozen."""
    if kernel is None:
        kernel = Holomorphic(12)
    key = kernel
    if key in _ETA_CACHE:
        return _ETA_CACHE[key]
    window = _voronoi_window()
    N = 50
    lhs = coefficient_sum_twisted_additive(provider, 1, 2, window, N)
    stop_tol = 5e-8 * max(1.0, abs(lhs))
    raw, _ = voronoi_dual_sum(provider, kernel, 1, 2, window, N,
                              term_tol=_dual_term_tol(stop_tol, N),
                              stop_tol=stop_tol)
    eta = lhs / (raw / 2)
    _ETA_CACHE[key] = eta
    return eta


def voronoi_check(provider: TauCoefficients, a: int, c: int, N: int,
                  rel_tol: float = 1e-6, abs_tol: float = 1e-8,
                  eta: complex | None = None) -> VoronoiReport:
    """Compare both sides of the twisted coefficient summation formula.

    Level 1, trivial nebentypus, weight 12 only (the dual form equals the
    form itself and the K-type transform is absent).
    """
    if math.gcd(a, c) != 1:
        raise ParameterError("requires gcd(a, c) = 1")
    if not (1 <= c <= VORONOI_MAX_MODULUS):
        raise ParameterError(f"modulus c capped at {VORONOI_MAX_MODULUS}")
    if not (1 <= N <= VORONOI_MAX_SCALE):
        raise ParameterError(f"scale N capped at {VORONOI_MAX_SCALE}")
    kernel = Holomorphic(12)
    window = _voronoi_window()
    if eta is None:
        eta = determine_voronoi_phase(provider, kernel)
    lhs = coefficient_sum_twisted_additive(provider, a, c, window, N)
    tol = abs_tol + rel_tol * abs(lhs)
    stop_tol = tol / 8.0
    raw, terms = voronoi_dual_sum(provider, kernel, a, c, window, N,
                                  term_tol=_dual_term_tol(stop_tol, N),
                                  stop_tol=stop_tol)
    rhs = eta * raw / c
    diff = abs(lhs - rhs)
    tol = abs_tol + rel_tol * max(abs(lhs), abs(rhs))
    return VoronoiReport(a=a, c=c, N=N, lhs=lhs, rhs=rhs, diff=diff, tol=tol,
                         eta=eta, dual_terms=terms)
