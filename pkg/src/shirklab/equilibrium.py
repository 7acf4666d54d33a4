"""Replacement-cost curves and the principal's credibility threshold.

The principal can replace fired workers, but replacements differ in cost.
Given a per-replacement cost schedule q(z) over a unit mass of candidates,
the least total cost of replacing a measure x of workers is the integral
of the ascending rearrangement of q from 0 to x.  That least-cost function
r(x) starts at zero and is convex: cheap replacements are used first, so
each additional replacement costs weakly more.

Punishing is worthwhile only while the output gained by deterring
shirking exceeds the expected replacement bill.  With minimal firing rate
gamma_bar, the condition is linear-versus-convex in the technology reach
h, so the credible region is an interval [0, h_tilde].  This module
solves for h_tilde by bisection, evaluates the principal's value in both
regimes, and provides the closed-form output and welfare comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace as dc_replace
from typing import Callable, Iterable

import numpy as np

from .errors import InvalidCurveError
from .model import (
    AgentStrategy,
    ModelParams,
    agent_payoff,
    gamma_bar,
    require_admissible,
)

#: Default number of evaluation nodes for closed-form schedules.
DEFAULT_RESOLUTION = 100_000

EFFORT = "effort"
SHIRK = "shirk"


@dataclass(frozen=True)
class ReplacementCostCurve:
    """Least-cost replacement function induced by a cost schedule.

    values -- per-replacement costs sorted ascending.  For a closed-form
        schedule these are its values on a uniform grid of nodes and the
        induced r(x) integrates their piecewise-linear interpolant; for a
        finite sample each cost carries measure 1/len(values) and r(x) is
        the exact prefix sum.
    kind -- "nodes" (closed-form schedule) or "steps" (finite sample).
    """

    values: np.ndarray
    kind: str
    description: str = "schedule"

    def __post_init__(self) -> None:
        if self.kind not in ("nodes", "steps"):
            raise InvalidCurveError(f"unknown curve kind {self.kind!r}")
        if len(self.values) < (2 if self.kind == "nodes" else 1):
            raise InvalidCurveError("schedule needs at least one cost sample")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_function(
        cls,
        q: Callable[[np.ndarray], np.ndarray],
        resolution: int = DEFAULT_RESOLUTION,
        description: str = "custom function",
    ) -> "ReplacementCostCurve":
        """Build from a closed-form schedule q(z) evaluated on [0, 1]."""
        if resolution < 2:
            raise InvalidCurveError("resolution must be at least 2")
        grid = np.linspace(0.0, 1.0, resolution + 1)
        raw = np.asarray(q(grid), dtype=float)
        if raw.shape != grid.shape:
            raw = np.broadcast_to(raw, grid.shape).astype(float)
        _check_nonnegative(raw, grid)
        return cls(values=np.sort(raw), kind="nodes", description=description)

    @classmethod
    def from_samples(
        cls, costs: Iterable[float], description: str = "sampled costs"
    ) -> "ReplacementCostCurve":
        """Build from a finite sample of per-replacement costs."""
        raw = np.asarray(list(costs), dtype=float)
        _check_nonnegative(raw, None)
        return cls(values=np.sort(raw), kind="steps", description=description)

    @classmethod
    def linear(cls, scale: float = 1.0, resolution: int = DEFAULT_RESOLUTION) -> "ReplacementCostCurve":
        return cls.from_function(lambda z: scale * z, resolution, f"linear scale={scale:g}")

    @classmethod
    def power(
        cls, scale: float = 1.0, exponent: float = 2.0, resolution: int = DEFAULT_RESOLUTION
    ) -> "ReplacementCostCurve":
        if exponent < 0:
            raise InvalidCurveError("exponent must be nonnegative")
        return cls.from_function(
            lambda z: scale * z**exponent, resolution, f"power scale={scale:g} exponent={exponent:g}"
        )

    @classmethod
    def constant(cls, level: float = 1.0, resolution: int = DEFAULT_RESOLUTION) -> "ReplacementCostCurve":
        return cls.from_function(lambda z: np.full_like(z, float(level)), resolution, f"constant level={level:g}")

    @classmethod
    def from_file(cls, path: str) -> "ReplacementCostCurve":
        """Load a two-column text file of (z, q(z)) samples.

        Each row is one replacement candidate of equal measure; the first
        column carries the original labels and must lie in [0, 1].
        """
        data = np.loadtxt(path, ndmin=2)
        if data.shape[1] != 2:
            raise InvalidCurveError(f"{path}: expected two columns (z, cost), got {data.shape[1]}")
        z, costs = data[:, 0], data[:, 1]
        if np.any(z < 0.0) or np.any(z > 1.0):
            raise InvalidCurveError(f"{path}: z values must lie in [0, 1]")
        return cls.from_samples(costs, description=f"file {path}")

    # -- operations -----------------------------------------------------

    def cost(self, x: float) -> float:
        """Least total cost r(x) of replacing a measure x of workers."""
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"replacement measure must lie in [0, 1], got {x}")
        cumulative = self._cumulative()
        n = len(self.values) if self.kind == "steps" else len(self.values) - 1
        position = x * n
        j = min(int(position), n - 1)
        t = x - j / n
        if self.kind == "steps":
            # integrate the ascending step function: slope is the j-th cost
            return float(cumulative[j] + self.values[j] * t)
        # integrate the piecewise-linear interpolant of the sorted nodes
        y0 = self.values[j]
        y1 = self.values[j + 1]
        return float(cumulative[j] + y0 * t + (y1 - y0) * t * t * n / 2.0)

    @property
    def marginal_cost_at_zero(self) -> float:
        """One-sided derivative r'(0): the cheapest available replacement."""
        return float(self.values[0])

    def total_cost(self) -> float:
        """r(1): cost of replacing the entire workforce."""
        return float(self._cumulative()[-1])

    def scaled(self, factor: float) -> "ReplacementCostCurve":
        """Uniformly scale every per-replacement cost."""
        if factor < 0.0:
            raise InvalidCurveError("scale factor must be nonnegative")
        return dc_replace(
            self,
            values=self.values * factor,
            description=f"{self.description} x{factor:g}",
        )

    def validate(self, tol: float = 1e-9) -> None:
        """Check the structural invariants; raise ``InvalidCurveError`` if broken.

        The induced r is convex exactly when the stored costs are sorted
        ascending, so a violation means the construction was tampered with.
        """
        values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise InvalidCurveError("cost schedule contains non-finite values")
        if np.any(values < 0.0):
            raise InvalidCurveError("cost schedule contains negative costs")
        if np.any(np.diff(values) < -tol):
            raise InvalidCurveError("cost schedule is not sorted ascending; induced r(x) would not be convex")

    def _cumulative(self) -> np.ndarray:
        cached = getattr(self, "_cumulative_cache", None)
        if cached is None or len(cached) != self._expected_cumulative_len():
            if self.kind == "steps":
                n = len(self.values)
                cached = np.concatenate(([0.0], np.cumsum(self.values) / n))
            else:
                n = len(self.values) - 1
                segment = (self.values[:-1] + self.values[1:]) / (2.0 * n)
                cached = np.concatenate(([0.0], np.cumsum(segment)))
            object.__setattr__(self, "_cumulative_cache", cached)
        return cached

    def _expected_cumulative_len(self) -> int:
        return len(self.values) + 1 if self.kind == "steps" else len(self.values)


def _check_nonnegative(raw: np.ndarray, grid: np.ndarray | None) -> None:
    if not np.all(np.isfinite(raw)):
        raise InvalidCurveError("cost schedule contains non-finite values")
    bad = np.flatnonzero(raw < 0.0)
    if bad.size:
        where = f" at z={grid[bad[0]]:g}" if grid is not None else f" at sample {bad[0]}"
        raise InvalidCurveError(f"cost schedule is negative{where}")


def replacement_cost(curve: ReplacementCostCurve, x: float) -> float:
    """Least total cost of replacing a measure ``x`` of workers."""
    return curve.cost(x)


def credibility_slope(p: ModelParams) -> float:
    """Slope of the punishment-worthwhile condition in the technology reach.

    Per unit of reach, deterring shirking is worth
    (1-pi)(1-eps) - pi*eps*g in expected output, while the replacement
    bill is paid only in the failure state, which has probability
    (1-pi)*eps.  The condition "slope * h >= r(gamma_bar * h)" compares
    the two.  With eps = 0 punishment is never actually carried out in
    an effort equilibrium, so the slope is infinite.
    """
    gain = (1.0 - p.pi) * (1.0 - p.eps) - p.pi * p.eps * p.g
    if p.eps == 0.0:
        return math.inf
    return gain / ((1.0 - p.pi) * p.eps)


def punish_feasible(
    h: float,
    p: ModelParams,
    curve: ReplacementCostCurve,
    gamma: float | None = None,
) -> bool:
    """Whether committing to punish failures at reach ``h`` pays for itself."""
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    if p.eps == 0.0:
        # failures never happen by mistake, so the threat costs nothing
        return True
    rate = gamma_bar(p) if gamma is None else gamma
    return credibility_slope(p) * h >= curve.cost(rate * h)


@dataclass(frozen=True)
class EquilibriumSolution:
    """Solved effort-equilibrium objects.

    The policy rule is the threshold pair (gamma_bar, h_tilde) plus the
    boundary decision: punish at rate gamma_bar below the threshold, do
    not punish above it, and at exactly h_tilde punish only if that is
    still credible there (``boundary_punish``).
    """

    gamma_bar: float
    h_tilde: float
    feasible_set_nonempty: bool
    marginal_cost_at_zero: float
    boundary_punish: bool
    degenerate_credibility: bool
    tol: float

    @property
    def policy_params(self) -> dict[str, float | bool]:
        return {
            "gamma_bar": self.gamma_bar,
            "h_tilde": self.h_tilde,
            "boundary_punish": self.boundary_punish,
        }


def solve_threshold(
    p: ModelParams,
    curve: ReplacementCostCurve,
    tol: float = 1e-10,
    max_iterations: int = 200,
) -> EquilibriumSolution:
    """Find the largest technology reach at which punishment stays credible.

    The feasible set is an interval [0, h_tilde] (linear benefit versus
    convex cost, both zero at the origin), so bisection on the
    feasibility predicate converges to its supremum.  The returned
    h_tilde is the last point confirmed feasible, within ``tol`` of the
    true boundary and clamped to 1 when the condition holds everywhere.
    """
    require_admissible(p)
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    curve.validate()
    gb = gamma_bar(p)
    marginal = curve.marginal_cost_at_zero

    if p.eps == 0.0:
        return EquilibriumSolution(
            gamma_bar=gb,
            h_tilde=1.0,
            feasible_set_nonempty=True,
            marginal_cost_at_zero=marginal,
            boundary_punish=True,
            degenerate_credibility=True,
            tol=tol,
        )

    slope = credibility_slope(p)
    threshold_ratio = math.inf if gb == 0.0 else slope / gb
    nonempty = threshold_ratio > marginal

    if punish_feasible(1.0, p, curve, gamma=gb):
        h_tilde = 1.0
    else:
        feasible, infeasible = 0.0, 1.0
        for _ in range(max_iterations):
            if infeasible - feasible <= tol:
                break
            mid = 0.5 * (feasible + infeasible)
            if punish_feasible(mid, p, curve, gamma=gb):
                feasible = mid
            else:
                infeasible = mid
        h_tilde = feasible

    return EquilibriumSolution(
        gamma_bar=gb,
        h_tilde=h_tilde,
        feasible_set_nonempty=nonempty,
        marginal_cost_at_zero=marginal,
        boundary_punish=punish_feasible(h_tilde, p, curve, gamma=gb),
        degenerate_credibility=False,
        tol=tol,
    )


def policy(h: float, sol: EquilibriumSolution) -> float:
    """The threshold firing policy: gamma_bar below h_tilde, zero above."""
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    if h < sol.h_tilde:
        return sol.gamma_bar
    if h > sol.h_tilde:
        return 0.0
    return sol.gamma_bar if sol.boundary_punish else 0.0


def principal_value(
    h: float,
    punish: bool,
    p: ModelParams,
    curve: ReplacementCostCurve,
    wage_accounting: str = "full_reach",
) -> float:
    """Expected value to the principal of each policy regime at reach ``h``.

    Under punishment every worker with access researches and follows the
    signal; the principal collects that output, pays the wage bill, and
    in the failure state replaces a fraction gamma_bar of the failed
    workers.  Without punishment all workers with access adopt blindly.

    The default accounting charges the wage premium on the whole measure
    ``h`` in both regimes, mirroring the closed-form comparison in which
    the wage bill cancels.  ``wage_accounting="wage_on_use"`` instead
    charges the premium only on expected adopters under effort.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    if wage_accounting not in ("full_reach", "wage_on_use"):
        raise ValueError(f"unknown wage accounting {wage_accounting!r}")
    if not punish:
        return (1.0 - h) + h * (p.pi * (1.0 + p.g) - p.w)
    wage_measure = h * p.signal_good_prob() if wage_accounting == "wage_on_use" else h
    expected_replacements = (1.0 - p.pi) * p.eps * curve.cost(gamma_bar(p) * h)
    effort_output = (
        p.pi * (1.0 - p.eps) * (1.0 + p.g)
        + p.pi * p.eps
        + (1.0 - p.pi) * (1.0 - p.eps)
    )
    return (1.0 - h) + h * effort_output - expected_replacements - p.w * wage_measure


def expected_output(h: float, regime: str, p: ModelParams) -> float:
    """Expected aggregate output per unit mass of workers at reach ``h``.

    effort -- everyone with access researches and follows the signal
        (the first-best adoption pattern).
    shirk  -- everyone with access adopts without researching.
    """
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    if regime == EFFORT:
        return (1.0 - h) + h * ((1.0 + p.pi * p.g) * (1.0 - p.eps) + p.pi * p.eps)
    if regime == SHIRK:
        return (1.0 - h) + h * p.pi * (1.0 + p.g)
    raise ValueError(f"regime must be 'effort' or 'shirk', got {regime!r}")


def output_drop(h: float, p: ModelParams) -> float:
    """Output lost when reach ``h`` of workers shirk instead of researching."""
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    return h * ((1.0 - p.eps) * (1.0 - p.pi) - p.pi * p.g * p.eps)


def welfare_loss(h: float, p: ModelParams) -> float:
    """Welfare lost to shirking at reach ``h``: the output drop net of saved effort.

    Welfare is output minus effort costs (wages and continuation values
    are transfers), and shirkers do save the effort cost, so the loss is
    h * [(1-eps)(1-pi) - pi*g*eps - c].  Positive whenever research is
    efficient.
    """
    return output_drop(h, p) - h * p.c


@dataclass(frozen=True)
class VerificationCheck:
    name: str
    passed: bool
    witness: str


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[VerificationCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> tuple[VerificationCheck, ...]:
        return tuple(check for check in self.checks if not check.passed)


def verify_equilibrium(
    sol: EquilibriumSolution,
    p: ModelParams,
    curve: ReplacementCostCurve,
    samples: int = 9,
    payoff_tol: float = 1e-9,
) -> VerificationReport:
    """Independently re-check a solved equilibrium.

    (a) at the solution's firing rate, researching and blind adoption
        give the same expected payoff (the rate's defining property);
    (b) punishing is credible at sampled reaches below the threshold and
        not credible above it;
    (c) the policy has the threshold shape.

    Failures are reported with witnesses, never raised.
    """
    checks: list[VerificationCheck] = []

    eff = agent_payoff(AgentStrategy.EFFORT_FOLLOW_SIGNAL, min(sol.gamma_bar, 1.0), p)
    shirk = agent_payoff(AgentStrategy.SHIRK_USE, min(sol.gamma_bar, 1.0), p)
    gap = eff - shirk
    checks.append(
        VerificationCheck(
            "indifference_at_gamma_bar",
            abs(gap) <= payoff_tol,
            f"payoff gap {gap:.6g} at gamma={sol.gamma_bar:.12g}",
        )
    )

    fractions = [(i + 1) / (samples + 1) for i in range(samples)]

    below_witness = ""
    below_ok = True
    for u in fractions:
        h = sol.h_tilde * u
        if not punish_feasible(h, p, curve):
            below_ok = False
            below_witness = f"infeasible at h={h:.12g} < h_tilde={sol.h_tilde:.12g}"
            break
    checks.append(
        VerificationCheck(
            "feasible_below_threshold",
            below_ok,
            below_witness or f"{samples} samples in (0, h_tilde) feasible",
        )
    )

    above_witness = ""
    above_ok = True
    if sol.h_tilde < 1.0 and not sol.degenerate_credibility:
        for u in fractions:
            h = sol.h_tilde + (1.0 - sol.h_tilde) * u
            if punish_feasible(h, p, curve):
                above_ok = False
                above_witness = f"feasible at h={h:.12g} > h_tilde={sol.h_tilde:.12g}"
                break
    checks.append(
        VerificationCheck(
            "infeasible_above_threshold",
            above_ok,
            above_witness or "no feasible point above h_tilde",
        )
    )

    shape_ok = True
    shape_witness = "threshold rule holds on sampled reaches"
    for u in fractions:
        h_low = sol.h_tilde * u
        if policy(h_low, sol) != sol.gamma_bar:
            shape_ok = False
            shape_witness = f"policy({h_low:.12g}) != gamma_bar below threshold"
            break
        h_high = sol.h_tilde + (1.0 - sol.h_tilde) * u
        if h_high > sol.h_tilde and policy(h_high, sol) != 0.0:
            shape_ok = False
            shape_witness = f"policy({h_high:.12g}) != 0 above threshold"
            break
    boundary_expected = sol.gamma_bar if sol.boundary_punish else 0.0
    if shape_ok and policy(sol.h_tilde, sol) != boundary_expected:
        shape_ok = False
        shape_witness = "policy at h_tilde contradicts boundary_punish"
    checks.append(VerificationCheck("threshold_policy_shape", shape_ok, shape_witness))

    return VerificationReport(tuple(checks))
