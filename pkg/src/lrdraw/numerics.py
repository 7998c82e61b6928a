"""Numeric checks behind the width bounds, plus a power-law fitter.

All quantities are plain float64.  ``q`` below is always ``1/(1-p)``, and
the geometric ratio of the ruler weights is ``r = 2^(-(1-p)/p)``, so that
``2^i * (r^i a)^q == r^i * a^q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .family import phi_for

AGREE_TOL = 1e-12
HOLDER_RTOL = 1e-9
EXPONENT_BRACKET = (0.8, 2.0)
FIT_B_RANGE = (0.2, 0.8)


@dataclass
class LambdaReport:
    p: float
    h: int
    a0: float
    a: list[float]
    b: list[float]
    rho: float
    lam: float
    gamma: float | None = None
    istar: int | None = None
    lam_simplified: float | None = None
    target: float = 1.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        total = sum(self.a) + sum(self.b)
        if abs(total - 1.0) > AGREE_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        if min(self.a + self.b) <= 0:
            raise ValueError("all weights must be positive")

    @property
    def bound_ok(self) -> bool:
        """lambda < 1, or lambda^(1-p) below the requested target when one is set."""
        if self.target < 1.0:
            return self.lam ** (1 - self.p) < self.target
        return self.lam < 1.0


def ruler_ratio(p: float) -> float:
    return 2.0 ** (-(1.0 - p) / p)


def ruler_weights(p: float, a0: float, h: int) -> tuple[list[float], list[float], float]:
    """a_i = b_i = r^i a0 for i >= 1; b_0 takes the rest.  Returns (a, b, rho)."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if a0 <= 0:
        raise ValueError("a0 must be positive")
    if h < 0:
        raise ValueError("h must be nonnegative")
    r = ruler_ratio(p)
    a = [a0 * r ** i for i in range(h + 1)]
    rho = 1.0 + 2.0 * sum(a[1:]) / a0
    b0 = 1.0 - rho * a0
    if b0 <= 0:
        raise ValueError(f"rho * a0 = {rho * a0:.6g} >= 1")
    return a, [b0] + a[1:], rho


def lambda_base(p: float, a0: float, h: int, target: float = 1.0) -> LambdaReport:
    q = 1.0 / (1.0 - p)
    a, b, rho = ruler_weights(p, a0, h)
    b0 = b[0]
    general = (
        a[0] ** q
        + 2 * b0 ** q
        + (1 - b0) ** q
        + sum(2 ** i * a[i] ** q for i in range(1, h + 1))
        + sum(2 ** i * b[i] ** q for i in range(1, h + 1))
    )
    simple = rho * a0 ** q + 2 * (1 - rho * a0) ** q + (rho * a0) ** q
    if abs(general - simple) > AGREE_TOL:
        raise ArithmeticError(f"lambda forms disagree: {general!r} vs {simple!r}")
    return LambdaReport(p=p, h=h, a0=a0, a=a, b=b, rho=rho, lam=general, lam_simplified=simple, target=target)


def lambda_refined(p: float, gamma: float, h: int, a0: float, istar: int, target: float = 1.0) -> LambdaReport:
    if not 1 <= istar <= h + 1:
        raise ValueError(f"istar must lie in 1..{h + 1}")
    if not 0 <= gamma < 1:
        raise ValueError("gamma must lie in [0, 1)")
    q = 1.0 / (1.0 - p)
    a, b, rho = ruler_weights(p, a0, h)
    head = range(0, istar)
    tail = range(istar, h + 1)
    lam = (
        sum(2 ** i * a[i] ** q for i in range(h + 1))
        + sum(2 ** i * b[i] ** q for i in head)
        + sum(b[i] for i in head) ** q
        + sum((2 ** i - 1 + (1 - gamma) ** q) * b[i] ** q for i in tail)
        + (sum(a) + (1 + gamma ** q) ** (1 - p) * sum(b[i] for i in tail)) ** q
    )
    return LambdaReport(p=p, h=h, a0=a0, a=a, b=b, rho=rho, lam=lam, gamma=gamma, istar=istar, target=target)


def scan_lambda_base(p: float, h: int, grid: int = 4000) -> tuple[float, float]:
    """Grid minimum of lambda_base over a0 in (0, 1/rho): (a0, lambda)."""
    _, _, rho = ruler_weights(p, 1e-9, h)
    best = (math.nan, math.inf)
    for t in range(1, grid):
        a0 = t / (grid * rho)
        lam = lambda_base(p, a0, h).lam
        if lam < best[1]:
            best = (a0, lam)
    return best


def holder_check(c, X, p: float) -> bool:
    """sum c_i X_i^p <= (sum c_i^(1/(1-p)))^(1-p) (sum X_i)^p, up to relative 1e-9."""
    c = np.asarray(c, dtype=float)
    X = np.asarray(X, dtype=float)
    lhs = float(np.sum(c * X ** p))
    rhs = float(np.sum(c ** (1.0 / (1.0 - p))) ** (1.0 - p) * np.sum(X) ** p)
    return lhs <= rhs * (1 + HOLDER_RTOL) + 1e-300


def refined_step_check(beta: float, R: float, gamma: float, p: float) -> bool:
    """(1-g)B^p + g B^p + (R-B)^p <= (1-g)B^p + (g^q + 1)^(1-p) R^p for 0 < B < R."""
    q = 1.0 / (1.0 - p)
    lhs = (1 - gamma) * beta ** p + gamma * beta ** p + (R - beta) ** p
    rhs = (1 - gamma) * beta ** p + (gamma ** q + 1) ** (1 - p) * R ** p
    return lhs <= rhs * (1 + HOLDER_RTOL)


def holder_fuzz(count: int, seed: int = 0, max_terms: int = 64) -> tuple[int, int]:
    """Random instances of both inequalities; returns (holder failures, refined-step failures)."""
    rng = np.random.default_rng(seed)
    bad_holder = bad_step = 0
    for _ in range(count):
        p = rng.uniform(0.05, 0.95)
        m = int(rng.integers(1, max_terms + 1))
        c = rng.exponential(size=m) * (rng.random(m) < 0.9)
        X = rng.exponential(size=m) * 10.0 ** rng.uniform(-3, 3, size=m)
        if not holder_check(c, X, p):
            bad_holder += 1
        R = 10.0 ** rng.uniform(0, 6)
        beta = R * rng.uniform(1e-9, 1 - 1e-9)
        if not refined_step_check(beta, R, rng.uniform(0, 1), p):
            bad_step += 1
    return bad_holder, bad_step


def exponent_residual(x: float) -> float:
    return 1.0 - 2.0 ** (-x) - (2.0 ** (1.0 / x) - 1.0) ** x


def lower_bound_exponent() -> tuple[float, float]:
    """Root x of 1 - 2^-x = (2^(1/x) - 1)^x in [0.8, 2], and p = 1/(1+x)."""
    lo, hi = EXPONENT_BRACKET
    if exponent_residual(lo) * exponent_residual(hi) > 0:
        raise ArithmeticError("no sign change on the bracket")
    x = bisect(exponent_residual, lo, hi, xtol=1e-15, maxiter=200)
    if abs(exponent_residual(x)) >= 1e-12:
        raise ArithmeticError(f"residual {exponent_residual(x):.3g} too large")
    return x, 1.0 / (1.0 + x)


def family_params(p: float) -> tuple[float, float]:
    """mu maximising phi^p + mu^p along the linear constraint, with its phi."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    mu_max = 0.5 * (1.0 - ruler_ratio(p))  # phi hits 0 here

    def neg(mu: float) -> float:
        return -(max(phi_for(p, mu), 0.0) ** p + mu ** p)

    res = minimize_scalar(neg, bounds=(0.0, mu_max), method="bounded", options={"xatol": 1e-10})
    mu = float(res.x)
    return mu, phi_for(p, mu)


def power_fit(points) -> tuple[float, float, float]:
    """Least-squares a, b, c for width ~ a n^b - c.

    For a fixed ``b`` the problem is linear in ``(a, c)``; ``b`` itself is
    searched on [0.2, 0.8].
    """
    pts = [(float(n), float(w)) for n, w in points]
    if len(pts) < 4:
        raise ValueError("need at least 4 points")
    n = np.array([p[0] for p in pts])
    w = np.array([p[1] for p in pts])
    if np.any(n <= 0):
        raise ValueError("n must be positive")
    if len(np.unique(n)) < 2:
        raise ValueError("degenerate data: all n equal")

    def solve(b: float):
        A = np.column_stack([n ** b, -np.ones_like(n)])
        coef, *_ = np.linalg.lstsq(A, w, rcond=None)
        resid = A @ coef - w
        return float(resid @ resid), coef

    res = minimize_scalar(lambda b: solve(b)[0], bounds=FIT_B_RANGE, method="bounded",
                          options={"xatol": 1e-12})
    b = float(res.x)
    _, (a, c) = solve(b)
    return float(a), b, float(c)


def loglog_slope(ns, ws) -> float:
    """Least-squares slope of log w against log n."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(ws, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
