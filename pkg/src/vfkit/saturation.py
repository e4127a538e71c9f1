"""Detection saturation under correlated tests.

Tests that fail on the same solutions are redundant: with mean per-test
detection probability p and mean pairwise correlation rho between detection
events, a suite of n tests behaves like roughly n_eff = n / (1 + (n-1) rho)
independent ones, giving the approximate detection ceiling
1 - (1-p)^n_eff and, as n grows, the finite limit 1 - (1-p)^(1/rho).

For simulation the correlated detection events are realized as an
exchangeable Beta mixture: each trial draws a solution-specific detection
probability q ~ Beta(alpha, beta) with alpha = p(1/rho - 1) and
beta = (1-p)(1/rho - 1), then n conditionally independent Bernoulli(q)
tests.  That construction matches the target mean and pairwise correlation
exactly, and P(no detection among n) has the closed form
B(alpha, beta + n) / B(alpha, beta).  The n_eff curve is an approximation
of this mixture, not an identity; the two are reported side by side.

rho = 0 is plain independence and is accepted by the forward formulas,
but the asymptotic limit is 1 there and asking for it is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

_SIM_CHUNK_ELEMS = 8_000_000
_ANALYTIC_PRODUCT_MAX_N = 100_000
_FIT_GRID = 64
_FIT_LOCAL = 17
_FIT_TOL = 1e-4


class SaturationDomainError(ValueError):
    pass


class NoFitError(ValueError):
    pass


@dataclass(frozen=True)
class SaturationParams:
    p_bar: float
    rho_eff: float
    n: int

    def __post_init__(self):
        if not 0.0 < self.p_bar < 1.0:
            raise SaturationDomainError(f"p_bar must lie in (0, 1), got {self.p_bar}")
        if not 0.0 <= self.rho_eff <= 1.0:
            raise SaturationDomainError(f"rho_eff must lie in [0, 1], got {self.rho_eff}")
        if self.n < 1:
            raise SaturationDomainError(f"n must be >= 1, got {self.n}")


def n_eff(n: float, rho: float) -> float:
    """Effective number of independent tests among n with pairwise
    correlation rho.  rho=0 gives n, rho=1 gives 1."""
    if n < 1:
        raise SaturationDomainError(f"n must be >= 1, got {n}")
    if not 0.0 <= rho <= 1.0:
        raise SaturationDomainError(f"rho must lie in [0, 1], got {rho}")
    return n / (1.0 + (n - 1.0) * rho)


def dr_upper_bound(params: SaturationParams) -> float:
    """Approximate detection ceiling 1 - (1-p)^n_eff for a suite of size n."""
    return 1.0 - (1.0 - params.p_bar) ** n_eff(params.n, params.rho_eff)


def asymptotic_limit(p_bar: float, rho_eff: float) -> float:
    """Large-n limit 1 - (1-p)^(1/rho) of the detection ceiling."""
    if not 0.0 < p_bar < 1.0:
        raise SaturationDomainError(f"p_bar must lie in (0, 1), got {p_bar}")
    if rho_eff == 0.0:
        raise SaturationDomainError(
            "asymptotic limit is 1 in the independence regime (rho = 0); no finite ceiling to report"
        )
    if not 0.0 < rho_eff <= 1.0:
        raise SaturationDomainError(f"rho_eff must lie in (0, 1], got {rho_eff}")
    return 1.0 - (1.0 - p_bar) ** (1.0 / rho_eff)


def beta_params_from(p_bar: float, rho: float) -> tuple[float, float]:
    """Beta(alpha, beta) whose mixture of Bernoullis has mean p_bar and
    pairwise correlation rho.  Needs 0 < p < 1 and 0 < rho < 1."""
    if not 0.0 < p_bar < 1.0:
        raise SaturationDomainError(f"p_bar must lie in (0, 1), got {p_bar}")
    if not 0.0 < rho < 1.0:
        raise SaturationDomainError(f"rho must lie in (0, 1) for a Beta mixture, got {rho}")
    s = 1.0 / rho - 1.0
    return p_bar * s, (1.0 - p_bar) * s


def analytic_no_detection(p_bar: float, rho: float, n: int) -> float:
    """P(none of n exchangeable tests detects) in closed form:
    B(alpha, beta+n)/B(alpha, beta) for the Beta mixture, (1-p)^n at rho=0,
    1-p at rho=1 (all tests share one coin)."""
    if n < 0:
        raise SaturationDomainError(f"n must be >= 0, got {n}")
    if not 0.0 <= p_bar <= 1.0:
        raise SaturationDomainError(f"p_bar must lie in [0, 1], got {p_bar}")
    if n == 0:
        return 1.0
    if p_bar == 0.0:
        return 1.0
    if p_bar == 1.0:
        return 0.0
    if rho == 0.0:
        return (1.0 - p_bar) ** n
    if rho == 1.0:
        return 1.0 - p_bar
    alpha, beta = beta_params_from(p_bar, rho)
    s = alpha + beta
    if not math.isfinite(s):
        # 1/rho overflowed: indistinguishable from independence
        return (1.0 - p_bar) ** n
    if n <= _ANALYTIC_PRODUCT_MAX_N:
        # B(alpha, beta+n)/B(alpha, beta) telescopes for integer n; the
        # product stays finite for any rho, unlike lgamma of 1/rho
        log_q = 0.0
        for i in range(n):
            log_q += math.log((beta + i) / (s + i))
        return math.exp(log_q)
    value = float(math.exp(betaln(alpha, beta + n) - betaln(alpha, beta)))
    if math.isnan(value):
        # correlation too weak for the lgamma route to resolve
        return (1.0 - p_bar) ** n
    return min(1.0, max(0.0, value))


@dataclass
class SimCurve:
    points: list[tuple[int, float]]  # (n, empirical detection rate), n = 1..n_max
    trials: int
    seed: int
    generator: dict | None = None    # how q was drawn; None only for degenerate p


def simulate_exchangeable(n_max: int, p_bar: float, rho: float, trials: int, seed: int) -> SimCurve:
    """Simulate the exchangeable mixture and return the empirical detection
    rate as a function of suite size n = 1..n_max.

    Each trial draws q once, then n_max conditionally independent tests;
    dr(n) uses the first n of them, so the curve is nondecreasing by
    construction.  Boundary p values short-circuit to the degenerate
    constant curves.
    """
    if n_max < 1:
        raise SaturationDomainError(f"n_max must be >= 1, got {n_max}")
    if trials < 1:
        raise SaturationDomainError(f"trials must be >= 1, got {trials}")
    if not 0.0 <= p_bar <= 1.0:
        raise SaturationDomainError(f"p_bar must lie in [0, 1], got {p_bar}")
    if not 0.0 <= rho <= 1.0:
        raise SaturationDomainError(f"rho must lie in [0, 1], got {rho}")

    if p_bar == 0.0:
        return SimCurve([(n, 0.0) for n in range(1, n_max + 1)], trials, seed, None)
    if p_bar == 1.0:
        return SimCurve([(n, 1.0) for n in range(1, n_max + 1)], trials, seed, None)

    if rho == 0.0:
        generator = {"family": "point", "p": p_bar}
    elif rho == 1.0:
        generator = {"family": "bernoulli", "p": p_bar}
    else:
        alpha, beta = beta_params_from(p_bar, rho)
        if math.isfinite(alpha + beta):
            generator = {"family": "beta", "alpha": alpha, "beta": beta}
        else:
            # 1/rho overflowed: indistinguishable from independence
            generator = {"family": "point", "p": p_bar}

    rng = np.random.default_rng(seed)
    counts = np.zeros(n_max, dtype=np.int64)
    remaining = trials
    chunk = max(1, _SIM_CHUNK_ELEMS // n_max)
    while remaining > 0:
        c = min(chunk, remaining)
        if generator["family"] == "point":
            draws = rng.random((c, n_max)) < p_bar
        elif generator["family"] == "bernoulli":
            q = (rng.random(c) < p_bar).astype(float)
            draws = rng.random((c, n_max)) < q[:, None]
        else:
            q = rng.beta(generator["alpha"], generator["beta"], size=c)
            draws = rng.random((c, n_max)) < q[:, None]
        counts += np.maximum.accumulate(draws, axis=1).sum(axis=0)
        remaining -= c
    points = [(n, counts[n - 1] / trials) for n in range(1, n_max + 1)]
    return SimCurve(points=points, trials=trials, seed=seed, generator=generator)


@dataclass
class FitResult:
    p_hat: float
    rho_hat: float
    rmse: float


def _curve_points(curve) -> list[tuple[int, float]]:
    if isinstance(curve, SimCurve):
        return curve.points
    return list(curve)


def fit_saturation(curve) -> FitResult:
    """Least-squares fit of dr(n) = 1 - (1-p)^(n/(1+(n-1)rho)) to an
    observed detection curve.

    Deterministic: a coarse 64x64 grid over (p, rho) followed by shrinking
    local grid refinement down to a 1e-4 step.  Needs at least three points
    with strictly increasing n and dr values in [0, 1); an identically-zero
    curve pins p at 0 and leaves rho meaningless, so it is rejected.
    """
    points = _curve_points(curve)
    if len(points) < 3:
        raise NoFitError(f"need at least 3 curve points, got {len(points)}")
    ns = np.array([float(n) for n, _ in points])
    drs = np.array([float(v) for _, v in points])
    if np.any(ns < 1) or np.any(np.diff(ns) <= 0):
        raise NoFitError("curve points must have strictly increasing n >= 1")
    if np.any((drs < 0.0) | (drs >= 1.0)):
        raise NoFitError("dr values must lie in [0, 1)")
    if np.all(drs == 0.0):
        raise NoFitError("degenerate all-zero curve: p is 0 and rho is unidentifiable")

    def sse(ps: np.ndarray, rhos: np.ndarray) -> np.ndarray:
        neff = ns[None, None, :] / (1.0 + (ns[None, None, :] - 1.0) * rhos[None, :, None])
        pred = 1.0 - (1.0 - ps[:, None, None]) ** neff
        return ((pred - drs[None, None, :]) ** 2).sum(axis=-1)

    ps = (np.arange(_FIT_GRID) + 0.5) / _FIT_GRID
    rhos = (np.arange(_FIT_GRID) + 1.0) / _FIT_GRID
    grid = sse(ps, rhos)
    flat = int(np.argmin(grid))
    best_p = float(ps[flat // _FIT_GRID])
    best_rho = float(rhos[flat % _FIT_GRID])

    hw = 1.0 / _FIT_GRID
    while hw / (_FIT_LOCAL // 2) > _FIT_TOL / 4:
        ps = np.clip(best_p + np.linspace(-hw, hw, _FIT_LOCAL), 1e-9, 1 - 1e-9)
        rhos = np.clip(best_rho + np.linspace(-hw, hw, _FIT_LOCAL), 1e-9, 1.0)
        local = sse(ps, rhos)
        flat = int(np.argmin(local))
        best_p = float(ps[flat // _FIT_LOCAL])
        best_rho = float(rhos[flat % _FIT_LOCAL])
        hw /= 4.0
    final = math.sqrt(float(sse(np.array([best_p]), np.array([best_rho]))[0, 0]) / len(points))
    return FitResult(p_hat=best_p, rho_hat=best_rho, rmse=final)
