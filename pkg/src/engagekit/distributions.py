"""Motivation priors over user activity counts.

A motivation distribution models how many activities a user is willing to
complete before running out of steam. The badge engine consumes it through
a small functional surface: density, survival, hazard (and its inverse),
truncated first moments, quantiles, and seeded sampling.

Built-in families (uniform, exponential) are closed-form and vectorized.
Other continuous families can subclass :class:`MotivationDistribution` and
inherit numeric fallbacks: quadrature moments, bisection quantiles and
hazard inversion, plus a grid-based log-concavity scan. Supports are
restricted to the nonnegative reals because motivation counts activities.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "MotivationDistribution",
    "UniformMotivation",
    "ExponentialMotivation",
    "LogConcavityReport",
    "parse_distribution",
]

NORMALIZATION_TOL = 1e-9
LOG_CONCAVITY_TOL = 1e-9
# effective support for grid-based checks: [quantile(EDGE), quantile(1 - EDGE)]
EDGE_QUANTILE = 1e-6


def _maybe_scalar(t, values):
    """Return a float for scalar input, the array otherwise."""
    if np.ndim(t) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class LogConcavityReport:
    """Outcome of a grid scan for concavity of the log density.

    ``max_violation`` is the largest positive second difference of log f
    observed on the grid (+inf when an interior grid point has zero
    density, which breaks concavity outright). ``skipped`` records any
    zero-density points that had to be left out of the differencing.
    """

    is_log_concave: bool
    grid: np.ndarray
    max_violation: float
    skipped: tuple[float, ...] = ()


class MotivationDistribution(ABC):
    """Continuous prior over how many activities a user completes unprompted.

    Subclasses must provide :meth:`pdf`, :meth:`cdf` and :attr:`support`;
    everything else has numeric defaults that the closed-form families
    override. Instantiating a subclass validates the support and, for
    families without exact normalization, numerically checks that the
    density integrates to 1 (tolerance 1e-9).

    All methods are pure. Sampling takes a caller-owned ``numpy`` Generator,
    so concurrent use just needs one generator per thread.
    """

    kind: str = "custom"
    # None means unknown: the optimizer will run check_log_concavity once.
    log_concave_family: bool | None = None
    _exact_normalization = False

    def __init__(self):
        lo, hi = self.support
        if lo < 0 or not lo < hi:
            raise ValueError(f"support must satisfy 0 <= lo < hi, got ({lo}, {hi})")
        if not self._exact_normalization:
            total, _ = quad(lambda v: float(self.pdf(v)), lo, hi, limit=200)
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise ValueError(
                    f"density integrates to {total!r}, not 1, over the support"
                )

    # ------------------------------------------------------------------
    # required surface
    # ------------------------------------------------------------------

    @property
    @abstractmethod
    def support(self) -> tuple[float, float]:
        """(lo, hi) support bounds; hi may be math.inf."""

    @abstractmethod
    def pdf(self, t):
        """Density at t (0 outside the support). Accepts scalars or arrays."""

    @abstractmethod
    def cdf(self, t):
        """P(V <= t). Accepts scalars or arrays."""

    # ------------------------------------------------------------------
    # derived functionals (numeric defaults; builtins override)
    # ------------------------------------------------------------------

    def survival(self, t):
        """P(V > t) = 1 - cdf(t)."""
        return 1.0 - self.cdf(t)

    def mean(self) -> float:
        lo, hi = self.support
        value, _ = quad(lambda v: v * float(self.pdf(v)), lo, hi, limit=200)
        return value

    def truncated_mean_below(self, t: float) -> float:
        """E[V 1{V < t}], the mass of work done by users who stop before t."""
        lo, hi = self.support
        if t <= lo:
            return 0.0
        value, _ = quad(lambda v: v * float(self.pdf(v)), lo, min(t, hi), limit=200)
        return value

    def quantile(self, q: float) -> float:
        """Inverse CDF by bisection (subclasses override with closed forms)."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {q}")
        lo, hi = self.support
        if q == 0.0:
            return lo
        if q == 1.0:
            return hi
        b = hi
        if math.isinf(b):
            b = lo + 1.0
            while float(self.cdf(b)) < q:
                b = lo + 2.0 * (b - lo)
                if b > 1e18:
                    raise ValueError("quantile bracket exceeded 1e18")
        a = lo
        for _ in range(200):
            m = 0.5 * (a + b)
            if float(self.cdf(m)) < q:
                a = m
            else:
                b = m
            if b - a <= 1e-14 * max(1.0, abs(b)):
                break
        return 0.5 * (a + b)

    def hazard(self, t: float) -> float:
        """Instantaneous dropout rate pdf(t)/survival(t)."""
        s = float(self.survival(t))
        if s <= 0.0:
            raise ValueError(f"hazard undefined at t={t}: survival is zero")
        return float(self.pdf(t)) / s

    def inverse_hazard(self, r: float) -> float:
        """Return t with hazard(t) = r.

        Requires a monotone hazard on the support (guaranteed for
        log-concave families). Raises ``ValueError("no preimage ...")``
        when r falls outside the hazard's range.
        """
        if not math.isfinite(r):
            raise ValueError(f"no preimage: hazard rate must be finite, got {r}")
        lo, hi = self.support
        hi_eff = self.quantile(1.0 - 1e-12)
        h_lo = self.hazard(lo) if float(self.survival(lo)) > 0 else self.hazard(hi_eff)
        h_hi = self.hazard(hi_eff)
        a, b = sorted((h_lo, h_hi))
        if not a <= r <= b:
            raise ValueError(
                f"no preimage: hazard rate {r} outside observed range [{a}, {b}]"
            )
        increasing = h_hi >= h_lo
        ta, tb = lo, hi_eff
        for _ in range(200):
            m = 0.5 * (ta + tb)
            below = self.hazard(m) < r
            if below == increasing:
                ta = m
            else:
                tb = m
            if tb - ta <= 1e-13 * max(1.0, abs(tb)):
                break
        return 0.5 * (ta + tb)

    def sample(self, rng: np.random.Generator, size=None):
        """Draw from the distribution via inverse-CDF of rng.random()."""
        u = rng.random(size)
        if size is None:
            return self.quantile(float(u))
        return np.array([self.quantile(float(ui)) for ui in np.ravel(u)]).reshape(
            np.shape(u)
        )

    # ------------------------------------------------------------------
    # structure checks
    # ------------------------------------------------------------------

    def check_log_concavity(self, grid_size: int = 1024) -> LogConcavityReport:
        """Scan second differences of log pdf on a uniform grid.

        The grid spans [quantile(1e-6), quantile(1 - 1e-6)]. Grid points
        with zero density are skipped and recorded; a zero-density point
        strictly between positive-density points is itself a violation
        (the log density dips to -inf), reported as max_violation = +inf.
        """
        if grid_size < 3:
            raise ValueError(f"grid_size must be >= 3, got {grid_size}")
        lo = self.quantile(EDGE_QUANTILE)
        hi = self.quantile(1.0 - EDGE_QUANTILE)
        grid = np.linspace(lo, hi, grid_size)
        dens = np.asarray(self.pdf(grid), dtype=float)
        positive = dens > 0.0
        skipped = tuple(float(x) for x in grid[~positive])
        idx = np.nonzero(positive)[0]
        if len(idx) < 3:
            return LogConcavityReport(False, grid, math.inf, skipped)
        interior_gap = bool((np.diff(idx) > 1).any())
        if interior_gap:
            return LogConcavityReport(False, grid, math.inf, skipped)
        logf = np.log(dens[idx])
        second = logf[2:] - 2.0 * logf[1:-1] + logf[:-2]
        max_violation = float(second.max()) if len(second) else 0.0
        return LogConcavityReport(
            max_violation <= LOG_CONCAVITY_TOL, grid, max_violation, skipped
        )

    def literal(self) -> str:
        """CLI/config literal for this distribution, e.g. 'uniform:0,5'."""
        raise NotImplementedError(f"no literal syntax for kind {self.kind!r}")


@dataclass(frozen=True)
class UniformMotivation(MotivationDistribution):
    """Uniform motivation on [lo, hi], 0 <= lo < hi."""

    lo: float
    hi: float

    kind = "uniform"
    log_concave_family = True
    _exact_normalization = True

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("uniform bounds must be finite")
        MotivationDistribution.__init__(self)

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def _width(self) -> float:
        return self.hi - self.lo

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.lo) & (t <= self.hi)
        return _maybe_scalar(t, np.where(inside, 1.0 / self._width, 0.0))

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return _maybe_scalar(t, np.clip((t - self.lo) / self._width, 0.0, 1.0))

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return _maybe_scalar(t, np.clip((self.hi - t) / self._width, 0.0, 1.0))

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def truncated_mean_below(self, t: float) -> float:
        if t <= self.lo:
            return 0.0
        t = min(t, self.hi)
        return (t * t - self.lo * self.lo) / (2.0 * self._width)

    def quantile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {q}")
        return self.lo + q * self._width

    def hazard(self, t: float) -> float:
        if t >= self.hi:
            raise ValueError(f"hazard undefined at t={t}: survival is zero")
        if t < self.lo:
            return 0.0
        return 1.0 / (self.hi - t)

    def inverse_hazard(self, r: float) -> float:
        # hazard on the support is 1/(hi - t), range [1/(hi - lo), inf)
        if not math.isfinite(r) or r < 1.0 / self._width:
            raise ValueError(
                f"no preimage: hazard rate {r} below minimum {1.0 / self._width}"
            )
        return self.hi - 1.0 / r

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        return self.lo + u * self._width

    def literal(self) -> str:
        return f"uniform:{self.lo:g},{self.hi:g}"


@dataclass(frozen=True)
class ExponentialMotivation(MotivationDistribution):
    """Exponential motivation with the given rate (mean 1/rate).

    Memoryless, so the hazard is flat: this is the degenerate family for
    which refreshing motivation provably adds nothing. Kept as a built-in
    precisely because it makes a sharp test fixture.
    """

    rate: float

    kind = "exponential"
    log_concave_family = True
    _exact_normalization = True

    def __post_init__(self):
        object.__setattr__(self, "rate", float(self.rate))
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be a positive real, got {self.rate}")
        MotivationDistribution.__init__(self)

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, math.inf)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            vals = np.where(t >= 0.0, self.rate * np.exp(-self.rate * np.maximum(t, 0.0)), 0.0)
        return _maybe_scalar(t, vals)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        vals = np.where(t >= 0.0, -np.expm1(-self.rate * np.maximum(t, 0.0)), 0.0)
        return _maybe_scalar(t, vals)

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        vals = np.where(t >= 0.0, np.exp(-self.rate * np.maximum(t, 0.0)), 1.0)
        return _maybe_scalar(t, vals)

    def mean(self) -> float:
        return 1.0 / self.rate

    def truncated_mean_below(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        return 1.0 / self.rate - (t + 1.0 / self.rate) * math.exp(-self.rate * t)

    def quantile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile level must be in [0, 1], got {q}")
        if q == 1.0:
            return math.inf
        return -math.log1p(-q) / self.rate

    def hazard(self, t: float) -> float:
        # memoryless: constant on the whole support
        if t < 0.0:
            return 0.0
        return self.rate

    def inverse_hazard(self, r: float) -> float:
        # hazard range is the single point {rate}; smallest preimage is 0
        if math.isfinite(r) and abs(r - self.rate) <= 1e-12 * max(1.0, self.rate):
            return 0.0
        raise ValueError(f"no preimage: constant hazard {self.rate} != {r}")

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        return -np.log1p(-u) / self.rate

    def literal(self) -> str:
        return f"exponential:{self.rate:g}"


def parse_distribution(text: str) -> MotivationDistribution:
    """Parse a distribution literal: 'uniform:LO,HI' or 'exponential:RATE'.

    Decimal numbers, no whitespace.
    """
    kind, sep, args = text.partition(":")
    if not sep:
        raise ValueError(f"invalid distribution literal {text!r}: missing ':'")
    try:
        params = [float(p) for p in args.split(",")] if args else []
    except ValueError:
        raise ValueError(f"invalid distribution literal {text!r}: bad number") from None
    if kind == "uniform":
        if len(params) != 2:
            raise ValueError(f"uniform takes LO,HI, got {args!r}")
        return UniformMotivation(params[0], params[1])
    if kind == "exponential":
        if len(params) != 1:
            raise ValueError(f"exponential takes RATE, got {args!r}")
        return ExponentialMotivation(params[0])
    raise ValueError(f"unknown distribution kind {kind!r}")
