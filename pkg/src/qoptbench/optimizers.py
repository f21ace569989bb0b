"""Derivative-free minimizers: simultaneous-perturbation and Nelder-Mead simplex.

Both return best-so-far results over every objective evaluation and are
deterministic given (theta0, seed, budget).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class OptResult:
    best_theta: np.ndarray
    best_value: float
    evaluations: int
    iterations: int
    history: list = field(default_factory=list)  # (evaluation index, value)


class _Tracker:
    """Wraps an objective: counts evaluations, keeps the best point."""

    def __init__(self, f):
        self.f = f
        self.count = 0
        self.history = []
        self.best_value = math.inf
        self.best_theta = None

    def __call__(self, theta):
        value = float(self.f(np.asarray(theta, dtype=float)))
        if not math.isfinite(value):
            raise ValueError(f"objective returned non-finite value {value!r}")
        self.count += 1
        self.history.append((self.count, value))
        if value < self.best_value:
            self.best_value = value
            self.best_theta = np.array(theta, dtype=float)
        return value

    def result(self, iterations) -> OptResult:
        return OptResult(
            self.best_theta, self.best_value, self.count, iterations, self.history
        )


@dataclass(frozen=True)
class SpsaGains:
    """Gain schedule a_k = a/(k+1+A)^alpha, c_k = c/(k+1)^gamma."""

    a: float = 0.2
    c: float = 0.1
    stability: float | None = None  # defaults to max_iter / 10
    alpha: float = 0.602
    gamma: float = 0.101


def spsa_minimize(
    f,
    theta0,
    max_iter: int,
    gains: SpsaGains | None = None,
    rng: np.random.Generator | None = None,
) -> OptResult:
    """Simultaneous-perturbation descent with Rademacher probes.

    ``max_iter`` counts update iterations; each one spends two objective
    evaluations, both tracked for the best-so-far result.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    gains = gains or SpsaGains()
    rng = rng or np.random.default_rng(0)
    stability = gains.stability if gains.stability is not None else max_iter / 10.0
    track = _Tracker(f)
    theta = np.asarray(theta0, dtype=float).copy()
    if theta.ndim != 1:
        raise ValueError("theta0 must be a flat parameter vector")
    for k in range(max_iter):
        ak = gains.a / (k + 1 + stability) ** gains.alpha
        ck = gains.c / (k + 1) ** gains.gamma
        delta = rng.integers(0, 2, size=theta.shape[0]) * 2.0 - 1.0
        y_plus = track(theta + ck * delta)
        y_minus = track(theta - ck * delta)
        grad = (y_plus - y_minus) / (2.0 * ck) * delta
        theta = theta - ak * grad
    return track.result(max_iter)


def simplex_minimize(f, theta0, max_iter: int) -> OptResult:
    """Nelder-Mead with standard coefficients and initial simplex edge 0.1.

    ``max_iter`` caps objective evaluations; there is no early convergence
    exit, so a constant objective simply runs out the budget.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    track = _Tracker(f)
    x0 = np.asarray(theta0, dtype=float).copy()
    if x0.ndim != 1:
        raise ValueError("theta0 must be a flat parameter vector")
    ndim = x0.shape[0]
    if ndim == 0:
        raise ValueError("simplex needs at least one parameter")
    reflect, expand, contract, shrink = 1.0, 2.0, 0.5, 0.5
    edge = 0.1
    feval = _capped(track, max_iter)

    points = [x0] + [x0 + edge * np.eye(ndim)[j] for j in range(ndim)]
    values = []
    iterations = 0
    try:
        for p in points:
            values.append(feval(p))
        while True:
            iterations += 1
            order = np.argsort(values, kind="stable")
            points = [points[i] for i in order]
            values = [values[i] for i in order]
            centroid = np.mean(points[:-1], axis=0)
            worst = points[-1]
            xr = centroid + reflect * (centroid - worst)
            fr = feval(xr)
            if values[0] <= fr < values[-2]:
                points[-1], values[-1] = xr, fr
                continue
            if fr < values[0]:
                xe = centroid + expand * (xr - centroid)
                fe = feval(xe)
                if fe < fr:
                    points[-1], values[-1] = xe, fe
                else:
                    points[-1], values[-1] = xr, fr
                continue
            if fr < values[-1]:
                xc = centroid + contract * (xr - centroid)
            else:
                xc = centroid + contract * (worst - centroid)
            fc = feval(xc)
            if fc < min(fr, values[-1]):
                points[-1], values[-1] = xc, fc
                continue
            for j in range(1, ndim + 1):
                points[j] = points[0] + shrink * (points[j] - points[0])
                values[j] = feval(points[j])
    except _BudgetExhausted:
        pass
    return track.result(iterations)


class _BudgetExhausted(Exception):
    pass


def _capped(track: _Tracker, cap: int):
    def call(theta):
        if track.count >= cap:
            raise _BudgetExhausted
        return track(theta)

    return call
