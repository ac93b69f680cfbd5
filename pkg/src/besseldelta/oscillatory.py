"""Panel-based quadrature for oscillatory integrals  I = int w(y) e^{i rho(y)} dy,
plus certifiers for the first- and second-derivative test bounds.

The engine subdivides the support into panels no wider than a quarter of the
local wavelength (estimated from max |rho'|), applies fixed-order
Gauss-Legendre nodes on each panel, and reports the change under one panel
halving as the error estimate.  Panel sums are combined with exactly rounded
compensated summation, so results are independent of panel ordering.

Phase convention: phases are in radians (the integrand is e^{i rho}).  The
second-derivative certifiers quote their curvature parameters for this same
phase; the classical bounds stated for e(f) = e^{2 pi i f} are applied with
f = rho / (2 pi).

Everything here is pure computation on immutable inputs; no shared state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import HypothesisError, ParameterError, PrecisionLossError, ResourceError

__all__ = [
    "OscillatorySpec",
    "OscillatorySpec2D",
    "QuadratureResult",
    "DerivativeTestCertificate",
    "integrate_oscillatory",
    "integrate_oscillatory_2d",
    "batched_linear_transform",
    "certify_nonstationary",
    "certify_second_derivative",
    "certify_second_derivative_2d",
    "LinearPhase",
    "QuadraticPhase",
    "PolynomialPhase",
    "window_amplitude",
    "total_variation",
]

PHASE_BUDGET_RADIANS = 1.0e7
_MAX_NODES_1D = 1 << 23
_MAX_NODES_AXIS_2D = 1 << 17
_GL_ORDER = 16
_GL_ORDER_2D = 12

SLACK_NONSTATIONARY = 5.0
SLACK_SECOND_DERIVATIVE = 1.0
SLACK_SECOND_DERIVATIVE_2D = 5.0


def _gl_nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


_NODES_1D, _WEIGHTS_1D = _gl_nodes(_GL_ORDER)
_NODES_2D, _WEIGHTS_2D = _gl_nodes(_GL_ORDER_2D)


@dataclass(frozen=True)
class OscillatorySpec:
    """One oscillatory integral: amplitude, radian phase, and target accuracy.

    ``amplitude(y, deriv=0)`` and ``phase(y, deriv=0)`` must accept numpy
    arrays; derivative orders beyond those a caller exercises (certifiers use
    amplitude orders <= 2 and phase orders <= 4) need not be implemented.
    ``amplitude_bandwidth`` declares extra oscillation (radians per unit
    length) hidden inside the amplitude, so panels can resolve it.
    """

    lo: float
    hi: float
    amplitude: Callable
    phase: Callable
    tolerance: float = 1e-9
    amplitude_bandwidth: float = 0.0

    def __post_init__(self):
        if not (self.hi > self.lo):
            raise ParameterError("integration support must have hi > lo")
        if not (self.tolerance > 0):
            raise ParameterError("tolerance must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float
    panels: int


def _panel_sum(spec: OscillatorySpec, n_panels: int) -> complex:
    edges = np.linspace(spec.lo, spec.hi, n_panels + 1)
    centers = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1] - edges[0])
    re_parts: list[float] = []
    im_parts: list[float] = []
    chunk = max(1, (1 << 19) // _GL_ORDER)
    for start in range(0, n_panels, chunk):
        c = centers[start:start + chunk]
        x = (c[:, None] + half * _NODES_1D[None, :]).ravel()
        vals = np.asarray(spec.amplitude(x, 0), dtype=complex)
        vals = vals * np.exp(1j * np.asarray(spec.phase(x, 0), dtype=float))
        panel_vals = vals.reshape(len(c), _GL_ORDER) @ _WEIGHTS_1D
        panel_vals *= half
        re_parts.extend(panel_vals.real.tolist())
        im_parts.extend(panel_vals.imag.tolist())
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def _phase_rate(spec: OscillatorySpec) -> tuple[float, float]:
    grid = np.linspace(spec.lo, spec.hi, 1025)
    d1 = np.abs(np.asarray(spec.phase(grid, 1), dtype=float))
    rate = float(np.max(d1)) + spec.amplitude_bandwidth
    variation = float(np.trapezoid(d1, grid)) + \
        spec.amplitude_bandwidth * (spec.hi - spec.lo)
    return rate, variation


def integrate_oscillatory(spec: OscillatorySpec) -> QuadratureResult:
    """Evaluate the integral to spec.tolerance (absolute).

    Raises ResourceError if the total phase variation exceeds the radian
    budget, and PrecisionLossError (carrying the achieved estimate) if
    refinement stalls above the tolerance.
    """
    rate, variation = _phase_rate(spec)
    if variation > PHASE_BUDGET_RADIANS:
        raise ResourceError(
            f"phase variation {variation:.3g} rad exceeds budget "
            f"{PHASE_BUDGET_RADIANS:.3g}",
            required=int(variation / (0.5 * math.pi)) + 1)
    # panel width <= quarter wavelength of the fastest oscillation
    n = max(8, int(math.ceil((spec.hi - spec.lo) * rate / (0.5 * math.pi))))
    if n * _GL_ORDER > _MAX_NODES_1D:
        raise ResourceError(
            f"needs {n} panels; node budget is {_MAX_NODES_1D}", required=n)
    prev = _panel_sum(spec, n)
    while True:
        n *= 2
        cur = _panel_sum(spec, n)
        err = abs(cur - prev)
        if err <= spec.tolerance:
            return QuadratureResult(value=cur, error_estimate=err, panels=n)
        if n * 2 * _GL_ORDER > _MAX_NODES_1D:
            raise PrecisionLossError(
                f"error estimate {err:.3g} above tolerance {spec.tolerance:.3g} "
                f"at {n} panels", achieved=err, value=cur)
        prev = cur


def batched_linear_transform(amplitudes, lo: float, hi: float, freqs,
                             tols, max_nodes: int = _MAX_NODES_1D):
    """Values of  int_lo^hi g_k(x) e^{i f x} dx  for several amplitudes g_k
    and a shared vector of frequencies f.

    Same panel rule and refinement-difference error control as the scalar
    engine, but all frequencies and amplitudes share one node grid, so each
    refinement level is a single complex matrix product.  ``amplitudes`` is a
    callable or a sequence of callables mapping a node array to values;
    ``tols`` the matching absolute tolerance(s).  Returns (values, errors),
    each of shape (n_amplitudes, n_freqs); a bare callable gets flat arrays.
    """
    single = callable(amplitudes)
    amps = [amplitudes] if single else list(amplitudes)
    tol_vec = np.full(len(amps), tols, dtype=float) if np.isscalar(tols) \
        else np.asarray(tols, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    if freqs.size == 0:
        empty = np.zeros((len(amps), 0))
        return (empty[0] + 0j, empty[0]) if single else (empty + 0j, empty)
    rate = float(np.max(np.abs(freqs)))

    def level(n_panels: int) -> np.ndarray:
        edges = np.linspace(lo, hi, n_panels + 1)
        centers = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * (edges[1] - edges[0])
        x = (centers[:, None] + half * _NODES_1D[None, :]).ravel()
        wts = np.tile(_WEIGHTS_1D, n_panels) * half
        gw = np.stack([np.asarray(g(x)) * wts for g in amps])
        out = np.empty((len(amps), len(freqs)), dtype=complex)
        chunk = max(1, (1 << 22) // max(1, len(x)))
        for s in range(0, len(freqs), chunk):
            ex = np.exp(1j * freqs[s:s + chunk, None] * x[None, :])
            out[:, s:s + chunk] = gw @ ex.T
        return out

    n = max(8, int(math.ceil((hi - lo) * rate / (0.5 * math.pi))))
    if n * _GL_ORDER > max_nodes:
        raise ResourceError(
            f"batched transform needs {n} panels, above budget", required=n)
    prev = level(n)
    while True:
        n *= 2
        cur = level(n)
        err = np.abs(cur - prev)
        worst = err.max(axis=1)
        if bool(np.all(worst <= tol_vec)):
            break
        if n * 2 * _GL_ORDER > max_nodes:
            raise PrecisionLossError(
                f"batched transform stalled at max error {float(worst.max()):.3g}",
                achieved=float(worst.max()), value=cur)
        prev = cur
    return (cur[0], err[0]) if single else (cur, err)


# ---------------------------------------------------------------------------
# Phase helpers


@dataclass(frozen=True)
class LinearPhase:
    """rho(y) = rate * y + offset   (radians)."""

    rate: float
    offset: float = 0.0

    def __call__(self, y, deriv: int = 0):
        y = np.asarray(y, dtype=float)
        if deriv == 0:
            return self.rate * y + self.offset
        if deriv == 1:
            return np.full_like(y, self.rate)
        return np.zeros_like(y)


@dataclass(frozen=True)
class QuadraticPhase:
    """rho(y) = curvature * (y - center)^2   (radians)."""

    curvature: float
    center: float = 0.0

    def __call__(self, y, deriv: int = 0):
        y = np.asarray(y, dtype=float)
        if deriv == 0:
            return self.curvature * (y - self.center) ** 2
        if deriv == 1:
            return 2.0 * self.curvature * (y - self.center)
        if deriv == 2:
            return np.full_like(y, 2.0 * self.curvature)
        return np.zeros_like(y)


@dataclass(frozen=True)
class PolynomialPhase:
    """rho(y) = sum_k coeffs[k] * y^k   (radians, ascending coefficients)."""

    coeffs: tuple

    def __call__(self, y, deriv: int = 0):
        y = np.asarray(y, dtype=float)
        c = list(self.coeffs)
        for _ in range(deriv):
            c = [k * c[k] for k in range(1, len(c))]
        if not c:
            return np.zeros_like(y)
        acc = np.zeros_like(y)
        for ck in reversed(c):
            acc = acc * y + ck
        return acc


def window_amplitude(window) -> Callable:
    """Adapt a SmoothBump into the (y, deriv) amplitude signature."""

    def amp(y, deriv: int = 0):
        return window(y, deriv)

    return amp


def total_variation(fn: Callable, lo: float, hi: float, n: int = 1 << 16) -> float:
    grid = np.linspace(lo, hi, n)
    vals = np.asarray(fn(grid, 0), dtype=float)
    return float(np.sum(np.abs(np.diff(vals))))


# ---------------------------------------------------------------------------
# Derivative-test certificates


@dataclass(frozen=True)
class DerivativeTestCertificate:
    """Outcome of checking one derivative-test inequality.

    ``bound_value`` is the right-hand side of the inequality (without slack);
    ``integral_value`` the computed integral.  The check passes when
    |integral| <= slack * bound.
    """

    lemma: str
    parameters: dict
    bound_value: float
    integral_value: complex
    slack: float
    hypothesis_grid_points: int = 1024

    @property
    def ratio(self) -> float:
        if self.bound_value == 0:
            return math.inf
        return abs(self.integral_value) / self.bound_value

    @property
    def violated(self) -> bool:
        return abs(self.integral_value) > self.slack * self.bound_value


_GRID_POINTS = 1024


def _hypothesis_grid(lo, hi):
    return np.linspace(lo, hi, _GRID_POINTS)


def certify_nonstationary(spec: OscillatorySpec, *, Q: float, U: float,
                          Y: float, Z: float, R: float, A: int,
                          slack: float = SLACK_NONSTATIONARY) -> DerivativeTestCertificate:
    """First-derivative (nonstationary phase) bound:

        |I| <= slack * (hi-lo) * Z * (Y/(R^2 Q^2) + 1/(R Q) + 1/(R U))^A

    under |rho'| >= R, |rho^(i)| <= Y/Q^i (i = 2..4), |w^(j)| <= Z/U^j
    (j = 0..2).  The hypotheses are spot-checked on a grid; a grid pass is
    necessary, not sufficient.
    """
    if not (R > 0 and Q > 0 and U > 0 and Y > 0 and Z > 0):
        raise ParameterError("nonstationary-test parameters must be positive")
    if A < 0:
        raise ParameterError("decay exponent A must be >= 0")
    g = _hypothesis_grid(spec.lo, spec.hi)
    d1 = np.abs(np.asarray(spec.phase(g, 1), dtype=float))
    if np.min(d1) < R:
        i = int(np.argmin(d1))
        raise HypothesisError(
            f"|phase'| = {d1[i]:.6g} < R = {R:.6g} at y = {g[i]:.6g}",
            order=1, point=float(g[i]))
    for i_ord in (2, 3, 4):
        di = np.abs(np.asarray(spec.phase(g, i_ord), dtype=float))
        cap = Y / Q ** i_ord
        if np.max(di) > cap * (1 + 1e-12):
            k = int(np.argmax(di))
            raise HypothesisError(
                f"|phase^({i_ord})| = {di[k]:.6g} exceeds Y/Q^{i_ord} = {cap:.6g} "
                f"at y = {g[k]:.6g}", order=i_ord, point=float(g[k]))
    for j_ord in (0, 1, 2):
        wj = np.abs(np.asarray(spec.amplitude(g, j_ord), dtype=float))
        cap = Z / U ** j_ord
        if np.max(wj) > cap * (1 + 1e-12):
            k = int(np.argmax(wj))
            raise HypothesisError(
                f"|amplitude^({j_ord})| = {wj[k]:.6g} exceeds Z/U^{j_ord} = "
                f"{cap:.6g} at y = {g[k]:.6g}", order=j_ord, point=float(g[k]))
    bound = (spec.hi - spec.lo) * Z * (Y / (R * Q) ** 2 + 1.0 / (R * Q)
                                       + 1.0 / (R * U)) ** A
    result = integrate_oscillatory(spec)
    return DerivativeTestCertificate(
        lemma="A1",
        parameters={"Q": Q, "U": U, "Y": Y, "Z": Z, "R": R, "A": A},
        bound_value=bound, integral_value=result.value, slack=slack)


def certify_second_derivative(spec: OscillatorySpec, curvature: float,
                              slack: float = SLACK_SECOND_DERIVATIVE) -> DerivativeTestCertificate:
    """Second-derivative (van der Corput) bound with explicit constant:

        |I| <= slack * 4 * Var(w) / sqrt(pi * curvature)

    where ``curvature`` is a positive lower bound for the second derivative
    of the radian phase, grid-verified, and the amplitude is real.
    """
    if not (curvature > 0):
        raise ParameterError("curvature lower bound must be positive")
    g = _hypothesis_grid(spec.lo, spec.hi)
    d2 = np.asarray(spec.phase(g, 2), dtype=float)
    if np.min(d2) < curvature * (1 - 1e-12):
        i = int(np.argmin(d2))
        raise HypothesisError(
            f"phase'' = {d2[i]:.6g} < curvature = {curvature:.6g} at y = {g[i]:.6g}",
            order=2, point=float(g[i]))
    w0 = np.asarray(spec.amplitude(g, 0))
    if np.iscomplexobj(w0) and np.max(np.abs(w0.imag)) > 1e-14 * (1 + np.max(np.abs(w0))):
        raise ParameterError("second-derivative test requires a real amplitude")
    var = total_variation(spec.amplitude, spec.lo, spec.hi)
    bound = 4.0 * var / math.sqrt(math.pi * curvature)
    result = integrate_oscillatory(spec)
    return DerivativeTestCertificate(
        lemma="A2", parameters={"lambda": curvature, "V": var},
        bound_value=bound, integral_value=result.value, slack=slack)


# ---------------------------------------------------------------------------
# Two-dimensional version


@dataclass(frozen=True)
class OscillatorySpec2D:
    """Double integral of wx(x) wy(y) e^{i rho(x, y)} over a rectangle.

    ``phase(X, Y, dx, dy)`` returns the mixed partial derivative of order
    (dx, dy) on broadcast arrays, in radians.
    """

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    amplitude_x: Callable
    amplitude_y: Callable
    phase: Callable
    tolerance: float = 1e-8

    def __post_init__(self):
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise ParameterError("rectangle must be nondegenerate")


def _tensor_sum(spec: OscillatorySpec2D, nx: int, ny: int) -> complex:
    ex = np.linspace(spec.x_lo, spec.x_hi, nx + 1)
    ey = np.linspace(spec.y_lo, spec.y_hi, ny + 1)
    hx = 0.5 * (ex[1] - ex[0])
    hy = 0.5 * (ey[1] - ey[0])
    cx = 0.5 * (ex[1:] + ex[:-1])
    cy = 0.5 * (ey[1:] + ey[:-1])
    xs = (cx[:, None] + hx * _NODES_2D[None, :]).ravel()
    ys = (cy[:, None] + hy * _NODES_2D[None, :]).ravel()
    wx = np.asarray(spec.amplitude_x(xs, 0), dtype=float) * \
        np.tile(_WEIGHTS_2D, nx) * hx
    wy = np.asarray(spec.amplitude_y(ys, 0), dtype=float) * \
        np.tile(_WEIGHTS_2D, ny) * hy
    parts_re: list[float] = []
    parts_im: list[float] = []
    chunk = max(1, (1 << 22) // len(ys))
    for start in range(0, len(xs), chunk):
        xblk = xs[start:start + chunk]
        ph = np.asarray(spec.phase(xblk[:, None], ys[None, :], 0, 0), dtype=float)
        block = (wx[start:start + chunk, None] * wy[None, :]) * np.exp(1j * ph)
        s = block.sum()
        parts_re.append(float(s.real))
        parts_im.append(float(s.imag))
    return complex(math.fsum(parts_re), math.fsum(parts_im))


def integrate_oscillatory_2d(spec: OscillatorySpec2D) -> QuadratureResult:
    """Tensor-panel Gauss-Legendre evaluation with one halving refinement."""
    gx = np.linspace(spec.x_lo, spec.x_hi, 129)
    gy = np.linspace(spec.y_lo, spec.y_hi, 129)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    rx = float(np.max(np.abs(spec.phase(X, Y, 1, 0))))
    ry = float(np.max(np.abs(spec.phase(X, Y, 0, 1))))
    nx = max(4, int(math.ceil((spec.x_hi - spec.x_lo) * rx / (0.5 * math.pi))))
    ny = max(4, int(math.ceil((spec.y_hi - spec.y_lo) * ry / (0.5 * math.pi))))
    if nx * _GL_ORDER_2D > _MAX_NODES_AXIS_2D or ny * _GL_ORDER_2D > _MAX_NODES_AXIS_2D:
        raise ResourceError(
            f"2-D quadrature needs {nx} x {ny} panels, above the axis budget",
            required=max(nx, ny))
    prev = _tensor_sum(spec, nx, ny)
    cur = _tensor_sum(spec, 2 * nx, 2 * ny)
    err = abs(cur - prev)
    if err <= spec.tolerance:
        return QuadratureResult(value=cur, error_estimate=err,
                                panels=2 * nx * 2 * ny)
    if 4 * nx * _GL_ORDER_2D > _MAX_NODES_AXIS_2D or 4 * ny * _GL_ORDER_2D > _MAX_NODES_AXIS_2D:
        raise PrecisionLossError(
            f"2-D error estimate {err:.3g} above tolerance {spec.tolerance:.3g}",
            achieved=err, value=cur)
    prev = cur
    cur = _tensor_sum(spec, 4 * nx, 4 * ny)
    err = abs(cur - prev)
    if err > spec.tolerance:
        raise PrecisionLossError(
            f"2-D error estimate {err:.3g} above tolerance {spec.tolerance:.3g}",
            achieved=err, value=cur)
    return QuadratureResult(value=cur, error_estimate=err, panels=4 * nx * 4 * ny)


def certify_second_derivative_2d(spec: OscillatorySpec2D, curvature_x: float,
                                 curvature_y: float,
                                 slack: float = SLACK_SECOND_DERIVATIVE_2D) -> DerivativeTestCertificate:
    """Two-dimensional second-derivative bound:

        |I| <= slack * V / sqrt(curvature_x * curvature_y),
        V = (int |wx'|) * (int |wy'|),

    under grid-verified |rho_xx| >= curvature_x, |rho_yy| >= curvature_y and
    |det rho''| >= curvature_x * curvature_y for the radian phase.
    """
    if not (curvature_x > 0 and curvature_y > 0):
        raise ParameterError("curvature bounds must be positive")
    gx = np.linspace(spec.x_lo, spec.x_hi, 64)
    gy = np.linspace(spec.y_lo, spec.y_hi, 64)
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    hxx = np.asarray(spec.phase(X, Y, 2, 0), dtype=float)
    hyy = np.asarray(spec.phase(X, Y, 0, 2), dtype=float)
    hxy = np.asarray(spec.phase(X, Y, 1, 1), dtype=float)
    det = hxx * hyy - hxy ** 2
    for name, arr, floor, order in (
            ("|rho_xx|", np.abs(hxx), curvature_x, (2, 0)),
            ("|rho_yy|", np.abs(hyy), curvature_y, (0, 2)),
            ("|det rho''|", np.abs(det), curvature_x * curvature_y, (1, 1))):
        if np.min(arr) < floor * (1 - 1e-12):
            i, j = np.unravel_index(int(np.argmin(arr)), arr.shape)
            raise HypothesisError(
                f"{name} = {arr[i, j]:.6g} < {floor:.6g} at "
                f"({gx[i]:.6g}, {gy[j]:.6g})", order=order,
                point=(float(gx[i]), float(gy[j])))
    var = (total_variation(spec.amplitude_x, spec.x_lo, spec.x_hi)
           * total_variation(spec.amplitude_y, spec.y_lo, spec.y_hi))
    bound = var / math.sqrt(curvature_x * curvature_y)
    result = integrate_oscillatory_2d(spec)
    return DerivativeTestCertificate(
        lemma="A3",
        parameters={"lambda": curvature_x, "rho": curvature_y, "V": var},
        bound_value=bound, integral_value=result.value, slack=slack,
        hypothesis_grid_points=64 * 64)
