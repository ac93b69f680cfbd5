"""Battery runner sweeping the derivative-test certifiers over the phase
families that actually occur in the delta-method analysis: the
log + square-root + linear phase of the twisted sums after dualization, its
two-variable sibling with a mixed square-root term, and plain quadratic
(stationary-point) phases.

Each case is run independently; hypothesis failures are recorded per case
rather than aborting the battery, and rows are merged in sorted case order,
so reports are deterministic.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisError, ParameterError
from .oscillatory import (OscillatorySpec, OscillatorySpec2D, PolynomialPhase,
                          QuadraticPhase, certify_nonstationary,
                          certify_second_derivative,
                          certify_second_derivative_2d, window_amplitude)
from .windows import bump_window, plateau_window

__all__ = [
    "LogSqrtLinearPhase",
    "Hybrid2DPhase",
    "Quadratic2DPhase",
    "BoundBatteryReport",
    "run_battery",
    "default_grid",
]


@dataclass(frozen=True)
class LogSqrtLinearPhase:
    """rho(y) = -t log y + c1 sqrt(y) + c2 y  (radians).

    The shape of the dualized twisted-sum phase: a logarithm from the
    |n|^{-it} twist, a square root from the kernel frequency, and a linear
    term from the unfolding.
    """

    t: float
    c1: float
    c2: float

    def __call__(self, y, deriv: int = 0):
        y = np.asarray(y, dtype=float)
        t, c1, c2 = self.t, self.c1, self.c2
        if deriv == 0:
            return -t * np.log(y) + c1 * np.sqrt(y) + c2 * y
        if deriv == 1:
            return -t / y + 0.5 * c1 / np.sqrt(y) + c2
        if deriv == 2:
            return t / y ** 2 - 0.25 * c1 * y ** -1.5
        if deriv == 3:
            return -2.0 * t / y ** 3 + 0.375 * c1 * y ** -2.5
        if deriv == 4:
            return 6.0 * t / y ** 4 - 0.9375 * c1 * y ** -3.5
        raise ParameterError(f"phase derivative order {deriv} unsupported")


@dataclass(frozen=True)
class Hybrid2DPhase:
    """rho(x, y) = -t (log x - log y) + a1 x - a2 y + kappa sqrt(x y)."""

    t: float
    kappa: float
    a1: float
    a2: float

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t, k, a1, a2 = self.t, self.kappa, self.a1, self.a2
        if (dx, dy) == (0, 0):
            return -t * (np.log(x) - np.log(y)) + a1 * x - a2 * y \
                + k * np.sqrt(x * y)
        if (dx, dy) == (1, 0):
            return -t / x + a1 + 0.5 * k * np.sqrt(y / x)
        if (dx, dy) == (0, 1):
            return t / y - a2 + 0.5 * k * np.sqrt(x / y)
        if (dx, dy) == (2, 0):
            return t / x ** 2 - 0.25 * k * np.sqrt(y) * x ** -1.5
        if (dx, dy) == (0, 2):
            return -t / y ** 2 - 0.25 * k * np.sqrt(x) * y ** -1.5
        if (dx, dy) == (1, 1):
            return 0.25 * k / np.sqrt(x * y)
        raise ParameterError(f"2-D phase derivative ({dx},{dy}) unsupported")


@dataclass(frozen=True)
class Quadratic2DPhase:
    """rho(x, y) = cx (x - x0)^2 + cy (y - y0)^2  (cy may be negative)."""

    cx: float
    cy: float
    x0: float = 0.0
    y0: float = 0.0

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if (dx, dy) == (0, 0):
            return self.cx * (x - self.x0) ** 2 + self.cy * (y - self.y0) ** 2
        if (dx, dy) == (1, 0):
            return 2.0 * self.cx * (x - self.x0) + 0.0 * y
        if (dx, dy) == (0, 1):
            return 2.0 * self.cy * (y - self.y0) + 0.0 * x
        if (dx, dy) == (2, 0):
            return np.broadcast_to(2.0 * self.cx, np.broadcast(x, y).shape)
        if (dx, dy) == (0, 2):
            return np.broadcast_to(2.0 * self.cy, np.broadcast(x, y).shape)
        if (dx, dy) == (1, 1):
            return np.zeros(np.broadcast(x, y).shape)
        raise ParameterError(f"2-D phase derivative ({dx},{dy}) unsupported")


@dataclass
class BoundBatteryReport:
    lemma: str
    grid_description: str
    cases_run: int = 0
    violations: int = 0
    hypothesis_failures: int = 0
    max_ratio: float = 0.0
    rows: list = field(default_factory=list)

    def to_rows(self):
        return list(self.rows)


def _window_by_name(name: str):
    if name == "bump":
        return bump_window()
    if name.startswith("plateau"):
        return plateau_window(1.0, 2.0, float(name.split(":")[1]))
    raise ParameterError(f"unknown window {name!r}")


def _run_case_a1(case: dict):
    w = _window_by_name(case.get("window", "bump"))
    kind = case.get("kind", "logsqrt")
    if kind == "logsqrt":
        phase = LogSqrtLinearPhase(case["t"], case["c1"], case["c2"])
    elif kind == "lincube":
        # rate * y + c3 * y^3, rate dominant so the derivative never vanishes
        phase = PolynomialPhase((0.0, case["rate"], 0.0, case["c3"]))
    else:
        raise ParameterError(f"unknown A1 phase kind {kind!r}")
    spec = OscillatorySpec(w.lo, w.hi, window_amplitude(w), phase,
                           tolerance=1e-10)
    return certify_nonstationary(spec, Q=case["Q"], U=case["U"], Y=case["Y"],
                                 Z=case["Z"], R=case["R"], A=case["A"])


def _run_case_a2(case: dict):
    w = _window_by_name(case.get("window", "bump"))
    T = case["T"]
    phase = QuadraticPhase(curvature=2.0 * math.pi * T,
                           center=case.get("center", 0.0))
    spec = OscillatorySpec(w.lo, w.hi, window_amplitude(w), phase,
                           tolerance=1e-10)
    return certify_second_derivative(spec, curvature=4.0 * math.pi * T)


def _run_case_a3(case: dict):
    w = _window_by_name(case.get("window", "bump"))
    kind = case.get("kind", "hybrid")
    if kind == "hybrid":
        phase = Hybrid2DPhase(case["t"], case["kappa"], case["a1"], case["a2"])
        lam = case["lam"]
        rho = case["rho"]
    elif kind == "quadratic":
        cx = 2.0 * math.pi * case["Tx"]
        cy = 2.0 * math.pi * case["Ty"]
        phase = Quadratic2DPhase(cx, cy, case.get("x0", 0.0), case.get("y0", 0.0))
        lam = abs(2.0 * cx)
        rho = abs(2.0 * cy)
    else:
        raise ParameterError(f"unknown A3 phase kind {kind!r}")
    spec = OscillatorySpec2D(w.lo, w.hi, w.lo, w.hi, window_amplitude(w),
                             window_amplitude(w), phase, tolerance=1e-8)
    return certify_second_derivative_2d(spec, lam, rho)


_RUNNERS = {"A1": _run_case_a1, "A2": _run_case_a2, "A3": _run_case_a3}


def run_battery(lemma: str, cases, description: str = "") -> BoundBatteryReport:
    """Certify every case; aggregate violations, worst ratio, and rows."""
    if lemma not in _RUNNERS:
        raise ParameterError(f"unknown lemma id {lemma!r} (A1, A2, A3)")
    cases = list(cases)
    if not cases:
        raise ParameterError("battery grid is empty")
    report = BoundBatteryReport(lemma=lemma, grid_description=description
                                or f"{len(cases)} cases")
    runner = _RUNNERS[lemma]
    keyed = sorted((repr(sorted(c.items())), c) for c in cases)
    for key, case in keyed:
        row = {"lemma": lemma, "case": key}
        try:
            cert = runner(case)
        except HypothesisError as exc:
            report.hypothesis_failures += 1
            row.update(status="hypothesis-error", detail=str(exc))
        else:
            report.cases_run += 1
            report.max_ratio = max(report.max_ratio, cert.ratio)
            if cert.violated:
                report.violations += 1
            row.update(status="ok", bound=cert.bound_value,
                       integral_abs=abs(cert.integral_value),
                       ratio=cert.ratio, slack=cert.slack,
                       violated=cert.violated)
        report.rows.append(row)
    return report


def default_grid(lemma: str, seed: int = 20240901) -> list[dict]:
    """The shipped parameter grids for each certifier battery."""
    if lemma == "A2":
        cases = []
        for T in (100.0, 200.0, 500.0, 1000.0, 2000.0, 10000.0):
            for center, window in ((0.0, "bump"), (1.25, "bump"),
                                   (1.5, "bump"), (1.5, "plateau:8"),
                                   (1.75, "bump")):
                cases.append({"T": T, "center": center, "window": window})
        return cases
    if lemma == "A1":
        cases = []
        for t in (300.0, 1000.0, 3000.0):
            for c1, c2 in ((0.0, 0.0), (20.0, 0.0), (20.0, 10.0)):
                # on [1, 2]: |rho'| >= t/2 - c1/2 - c2, derivatives <= 6t + c1
                R = t / 2.0 - 0.5 * c1 - c2
                cases.append({"kind": "logsqrt", "t": t, "c1": c1, "c2": c2,
                              "Q": 1.0, "U": 0.05, "Y": 6.0 * t + c1,
                              "Z": 1.0, "R": R, "A": 2})
        rng = random.Random(seed)
        for _ in range(20):
            rate = rng.uniform(300.0, 3000.0)
            c3 = rng.uniform(-1.0, 1.0) * rate / 30.0
            # |rho'| >= rate - 3 |c3| * 4 >= rate * 0.6
            R = rate - 12.0 * abs(c3)
            Y = max(12.0 * abs(c3) * 2.0, 6.0 * abs(c3)) * 2.0 + 1.0
            cases.append({"kind": "lincube", "rate": rate, "c3": c3,
                          "Q": 1.0, "U": 0.05, "Y": Y, "Z": 1.0, "R": R,
                          "A": 2})
        return cases
    if lemma == "A3":
        t, kappa = 1000.0, 100.0
        lam = t / 4.0 - kappa
        cases = []
        for a1, a2 in ((t / 1.5, t / 1.5), (t / 1.2, t / 1.8), (-t, t)):
            cases.append({"kind": "hybrid", "t": t, "kappa": kappa,
                          "a1": a1, "a2": a2, "lam": lam, "rho": lam})
        return cases
    raise ParameterError(f"unknown lemma id {lemma!r}")
