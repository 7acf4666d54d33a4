"""Finite-agent execution of the adoption game with Monte Carlo estimation.

Each episode walks the one-shot timeline: the firing policy is fixed, a
technology of latent quality arrives for the first ``round(h * n)``
agents, those agents research or shirk, observe signals, choose adoption,
wages are paid (prospectively on adoption, or as realized output), output
is realized, failures are punished, and survivors collect the
continuation value.

Episode randomness comes from a single generator per trial with a fixed
draw order: one uniform for quality, then the signal-error draws (one
shared uniform under common correlation, one per access agent under
independent), then one firing uniform per access agent.  Firing uniforms
are consumed even when the punishment mode ignores them so matched
scenarios see identical production paths.  Trials use counter-derived
substreams of the root seed, so results are reproducible bit-for-bit and
independent of execution order.

Nash checks never sample: deviation payoffs are exact expectations over
quality, signals, and the firing rule, including the seniority selector.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace as dc_replace
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolationError, InvalidParamsError
from .equilibrium import (
    EFFORT,
    SHIRK,
    ReplacementCostCurve,
    expected_output,
    policy,
    solve_threshold,
)
from .model import (
    ALL_STRATEGIES,
    AgentOutcome,
    AgentStrategy,
    BAD,
    GOOD,
    ModelParams,
    PROSPECTIVE,
    REALIZED,
    agent_payoff,
    require_admissible,
)

COMMON = "common"
INDEPENDENT = "independent"
UNIFORM_RANDOM = "uniform_random"
SENIORITY = "seniority"

_N_STRATEGIES = len(ALL_STRATEGIES)
_EFFORT_TABLE = np.array([s.exerts_effort for s in ALL_STRATEGIES])
# adoption rule per strategy: 0 never, 1 always, 2 follow signal, 3 contrarian
_USE_RULE = np.array([0, 1, 2, 1, 0, 3], dtype=np.int8)


@dataclass(frozen=True)
class SimConfig:
    """Configuration of a finite-agent run."""

    params: ModelParams
    n_agents: int
    n_trials: int
    seed: int
    h: float
    signal_correlation: str = COMMON
    compensation: str = PROSPECTIVE
    punishment_mode: str = UNIFORM_RANDOM

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise InvalidParamsError(f"n_agents must be >= 1, got {self.n_agents}")
        if self.n_trials < 1:
            raise InvalidParamsError(f"n_trials must be >= 1, got {self.n_trials}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParamsError("seed must be a nonnegative 64-bit integer")
        if not 0.0 <= self.h <= 1.0:
            raise InvalidParamsError(f"h must lie in [0, 1], got {self.h}")
        if self.signal_correlation not in (COMMON, INDEPENDENT):
            raise InvalidParamsError(f"unknown signal correlation {self.signal_correlation!r}")
        if self.compensation not in (PROSPECTIVE, REALIZED):
            raise InvalidParamsError(f"unknown compensation mode {self.compensation!r}")
        if self.punishment_mode not in (UNIFORM_RANDOM, SENIORITY):
            raise InvalidParamsError(f"unknown punishment mode {self.punishment_mode!r}")

    @property
    def access_count(self) -> int:
        """Number of agents with access: h * n rounded to nearest integer."""
        return int(math.floor(self.h * self.n_agents + 0.5))


class StrategyProfile:
    """Per-agent pure strategy assignment; agents without access are inert."""

    __slots__ = ("codes",)

    def __init__(self, codes: Sequence[int] | np.ndarray):
        array = np.asarray(codes, dtype=np.int8)
        if array.ndim != 1:
            raise ContractViolationError("strategy profile must be one-dimensional")
        if array.size and (array.min() < 0 or array.max() >= _N_STRATEGIES):
            raise ContractViolationError("strategy profile contains unknown strategy codes")
        self.codes = array

    @classmethod
    def symmetric(cls, strategy: AgentStrategy, n_agents: int) -> "StrategyProfile":
        return cls(np.full(n_agents, int(strategy), dtype=np.int8))

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StrategyProfile) and np.array_equal(self.codes, other.codes)

    def __hash__(self) -> int:
        return hash(self.codes.tobytes())

    def __repr__(self) -> str:
        counts = np.bincount(self.codes, minlength=_N_STRATEGIES)
        parts = [
            f"{AgentStrategy(i).label}={counts[i]}"
            for i in range(_N_STRATEGIES)
            if counts[i]
        ]
        return f"StrategyProfile({', '.join(parts)})"

    def strategy_of(self, agent: int) -> AgentStrategy:
        return AgentStrategy(int(self.codes[agent]))

    def with_strategy(self, agent: int, strategy: AgentStrategy) -> "StrategyProfile":
        codes = self.codes.copy()
        codes[agent] = int(strategy)
        return StrategyProfile(codes)


@dataclass(frozen=True)
class SeniorityOrder:
    """A commonly known strict ordering used to single out one failure.

    ``rank[i]`` is agent i's seniority rank (0 is most senior).  The
    selector maps any nonempty failing set to its most senior member, so
    the selected agent always belongs to the set.
    """

    rank: np.ndarray

    def __post_init__(self) -> None:
        ranks = np.asarray(self.rank, dtype=np.int64)
        if sorted(ranks.tolist()) != list(range(len(ranks))):
            raise ContractViolationError("seniority ranks must form a permutation")
        object.__setattr__(self, "rank", ranks)

    @classmethod
    def identity(cls, n_agents: int) -> "SeniorityOrder":
        return cls(np.arange(n_agents))

    @classmethod
    def from_permutation(cls, most_senior_first: Sequence[int]) -> "SeniorityOrder":
        """Build from a listing of agent indices, most senior first."""
        perm = np.asarray(most_senior_first, dtype=np.int64)
        rank = np.empty_like(perm)
        rank[perm] = np.arange(len(perm))
        return cls(rank)

    def selector(self, failing: Sequence[int] | np.ndarray) -> int:
        failing = np.asarray(failing, dtype=np.int64)
        if failing.size == 0:
            raise ContractViolationError("selector requires a nonempty failing set")
        return int(failing[np.argmin(self.rank[failing])])


@dataclass(frozen=True)
class EpisodeOutcome:
    """One realized play: per-access-agent arrays plus per-unit aggregates.

    Aggregates are normalized to the unit workforce: ``output``,
    ``wages``, ``effort_cost`` and ``welfare`` are per-agent means, and
    ``replacement_cost`` is the least-cost bill for the fired measure
    (fired count / n), on the same per-unit-mass scale.
    """

    quality: str
    used: np.ndarray
    exerted_effort: np.ndarray
    produced: np.ndarray
    wage_paid: np.ndarray
    fired: np.ndarray
    output: float
    wages: float
    effort_cost: float
    welfare: float
    replacement_cost: float
    fired_count: int
    failure_event: bool
    payoff_sum_by_strategy: np.ndarray
    count_by_strategy: np.ndarray
    n_agents: int

    @property
    def access_count(self) -> int:
        return len(self.used)

    def agent_outcomes(self, compensation: str = PROSPECTIVE) -> list[AgentOutcome]:
        """Materialize per-agent outcomes for the whole workforce."""
        outcomes = [
            AgentOutcome(
                used=bool(self.used[i]),
                exerted_effort=bool(self.exerted_effort[i]),
                produced=float(self.produced[i]),
                wage_paid=float(self.wage_paid[i]),
                fired=bool(self.fired[i]),
            )
            for i in range(self.access_count)
        ]
        inert_wage = 1.0 if compensation == REALIZED else 0.0
        inert = AgentOutcome(False, False, 1.0, inert_wage, False)
        outcomes.extend([inert] * (self.n_agents - self.access_count))
        return outcomes


def _adoption(codes: np.ndarray, signal_good: np.ndarray | bool) -> np.ndarray:
    """Vectorized adoption choice given strategy codes and signal readings."""
    rule = _USE_RULE[codes]
    use = rule == 1
    follow = rule == 2
    contrarian = rule == 3
    if np.isscalar(signal_good):
        if signal_good:
            use = use | follow
        else:
            use = use | contrarian
    else:
        use = use | (follow & signal_good) | (contrarian & ~signal_good)
    return use


def run_episode(
    cfg: SimConfig,
    profile: StrategyProfile,
    policy_gamma: float,
    curve: ReplacementCostCurve,
    rng: np.random.Generator,
    seniority: SeniorityOrder | None = None,
) -> EpisodeOutcome:
    """Play the timeline once and account for every agent.

    Under ``uniform_random`` punishment each failing agent is fired
    independently with probability ``policy_gamma``; under ``seniority``
    the selector's choice from the failing set is fired with certainty
    and ``policy_gamma`` is ignored.
    """
    if len(profile) != cfg.n_agents:
        raise ContractViolationError(
            f"profile length {len(profile)} does not match n_agents {cfg.n_agents}"
        )
    if not 0.0 <= policy_gamma <= 1.0:
        raise ValueError(f"policy_gamma must lie in [0, 1], got {policy_gamma}")
    p = cfg.params
    n = cfg.n_agents
    m = cfg.access_count
    codes = profile.codes[:m]

    good = bool(rng.random() < p.pi)
    if cfg.signal_correlation == COMMON:
        wrong = bool(rng.random() < p.eps)
        signal_good: np.ndarray | bool = good != wrong
    else:
        wrong_draws = rng.random(m) < p.eps
        signal_good = np.where(wrong_draws, not good, good)
    fire_draws = rng.random(m)

    effort = _EFFORT_TABLE[codes]
    use = _adoption(codes, signal_good)
    produced = np.where(use, (1.0 + p.g) if good else 0.0, 1.0)
    failed = use & (not good)

    fired = np.zeros(m, dtype=bool)
    if cfg.punishment_mode == UNIFORM_RANDOM:
        fired = failed & (fire_draws < policy_gamma)
    elif failed.any():
        chosen = (seniority or SeniorityOrder.identity(n)).selector(np.flatnonzero(failed))
        fired[chosen] = True

    if cfg.compensation == PROSPECTIVE:
        wage = np.where(use, p.w, 0.0)
        inert_wages = 0.0
    else:
        wage = produced.copy()
        inert_wages = float(n - m)

    payoffs = wage - p.c * effort + p.v_c * (~fired)
    fired_count = int(fired.sum())

    output = ((n - m) + float(produced.sum())) / n
    wages = (float(wage.sum()) + inert_wages) / n
    effort_cost = p.c * float(effort.sum()) / n
    return EpisodeOutcome(
        quality=GOOD if good else BAD,
        used=use,
        exerted_effort=effort,
        produced=produced,
        wage_paid=wage,
        fired=fired,
        output=output,
        wages=wages,
        effort_cost=effort_cost,
        welfare=output - effort_cost,
        replacement_cost=curve.cost(fired_count / n),
        fired_count=fired_count,
        failure_event=bool(failed.any()),
        payoff_sum_by_strategy=np.bincount(codes, weights=payoffs, minlength=_N_STRATEGIES),
        count_by_strategy=np.bincount(codes, minlength=_N_STRATEGIES),
        n_agents=n,
    )


@dataclass(frozen=True)
class MeanSE:
    """A Monte Carlo estimate with its standard error across trials."""

    mean: float
    se: float


@dataclass(frozen=True)
class SimResult:
    """Across-trial summary of a Monte Carlo run.

    ``output``, ``wages`` and ``welfare`` are per-agent means;
    ``replacement_cost`` is on the per-unit-workforce scale;
    ``per_strategy_payoff`` averages realized payoffs of the access
    agents playing each strategy.
    """

    output: MeanSE
    wages: MeanSE
    replacement_cost: MeanSE
    welfare: MeanSE
    failure_frequency: float
    per_strategy_payoff: dict[str, MeanSE]
    n_agents: int
    n_trials: int
    seed: int
    policy_gamma: float

    def summary(self) -> str:
        lines = [
            f"agents {self.n_agents}  trials {self.n_trials}  seed {self.seed}  "
            f"gamma {_fmt(self.policy_gamma)}",
            f"output/agent       {_fmt(self.output.mean)} +- {_fmt(self.output.se)}",
            f"wages/agent        {_fmt(self.wages.mean)} +- {_fmt(self.wages.se)}",
            f"replacement cost   {_fmt(self.replacement_cost.mean)} +- {_fmt(self.replacement_cost.se)}",
            f"welfare/agent      {_fmt(self.welfare.mean)} +- {_fmt(self.welfare.se)}",
            f"failure frequency  {_fmt(self.failure_frequency)}",
        ]
        for label in sorted(self.per_strategy_payoff):
            stat = self.per_strategy_payoff[label]
            lines.append(f"payoff[{label}]  {_fmt(stat.mean)} +- {_fmt(stat.se)}")
        return "\n".join(lines)

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["metric", "mean", "se"]]
        for name, stat in (
            ("output", self.output),
            ("wages", self.wages),
            ("replacement_cost", self.replacement_cost),
            ("welfare", self.welfare),
        ):
            rows.append([name, _fmt(stat.mean), _fmt(stat.se)])
        rows.append(["failure_frequency", _fmt(self.failure_frequency), ""])
        for label in sorted(self.per_strategy_payoff):
            stat = self.per_strategy_payoff[label]
            rows.append([f"payoff_{label}", _fmt(stat.mean), _fmt(stat.se)])
        return rows


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def _mean_se(values: np.ndarray) -> MeanSE:
    mean = float(values.mean())
    if len(values) < 2:
        return MeanSE(mean, 0.0)
    return MeanSE(mean, float(values.std(ddof=1) / math.sqrt(len(values))))


def monte_carlo(
    cfg: SimConfig,
    profile: StrategyProfile,
    policy_gamma: float,
    curve: ReplacementCostCurve,
    seniority: SeniorityOrder | None = None,
    threads: int = 1,
    trace_path: str | None = None,
) -> SimResult:
    """Average ``run_episode`` over ``cfg.n_trials`` substreams.

    Trials are independent and may run on several threads; per-trial
    statistics land in preallocated slots and are reduced in trial order,
    so the result is identical for any thread count.
    """
    trials = cfg.n_trials
    outputs = np.empty(trials)
    wages = np.empty(trials)
    repl = np.empty(trials)
    welfare = np.empty(trials)
    failures = np.empty(trials, dtype=bool)
    qualities = np.empty(trials, dtype=object) if trace_path else None
    fired_counts = np.empty(trials, dtype=np.int64) if trace_path else None
    payoff_sums = np.empty((trials, _N_STRATEGIES))
    counts = np.bincount(profile.codes[: cfg.access_count], minlength=_N_STRATEGIES)

    def run_block(area: range) -> None:
        for t in area:
            episode = run_episode(cfg, profile, policy_gamma, curve, _trial_rng(cfg.seed, t), seniority)
            outputs[t] = episode.output
            wages[t] = episode.wages
            repl[t] = episode.replacement_cost
            welfare[t] = episode.welfare
            failures[t] = episode.failure_event
            payoff_sums[t] = episode.payoff_sum_by_strategy
            if qualities is not None:
                qualities[t] = episode.quality
                fired_counts[t] = episode.fired_count

    threads = max(1, threads)
    if threads == 1:
        run_block(range(trials))
    else:
        chunk = (trials + threads - 1) // threads
        blocks = [range(start, min(start + chunk, trials)) for start in range(0, trials, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_block, blocks))

    per_strategy: dict[str, MeanSE] = {}
    for code in range(_N_STRATEGIES):
        if counts[code] > 0:
            per_strategy[AgentStrategy(code).label] = _mean_se(payoff_sums[:, code] / counts[code])

    if trace_path:
        with open(trace_path, "w", encoding="utf-8") as handle:
            for t in range(trials):
                handle.write(
                    json.dumps(
                        {
                            "trial": t,
                            "quality": qualities[t],
                            "output": outputs[t],
                            "welfare": welfare[t],
                            "fired": int(fired_counts[t]),
                            "failure": bool(failures[t]),
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )

    return SimResult(
        output=_mean_se(outputs),
        wages=_mean_se(wages),
        replacement_cost=_mean_se(repl),
        welfare=_mean_se(welfare),
        failure_frequency=float(failures.mean()),
        per_strategy_payoff=per_strategy,
        n_agents=cfg.n_agents,
        n_trials=trials,
        seed=cfg.seed,
        policy_gamma=policy_gamma,
    )


# -- exact deviation payoffs ---------------------------------------------


def _use_prob_given_quality(code: int, good: bool, p: ModelParams) -> float:
    signal_good_prob = (1.0 - p.eps) if good else p.eps
    rule = _USE_RULE[code]
    if rule == 0:
        return 0.0
    if rule == 1:
        return 1.0
    if rule == 2:
        return signal_good_prob
    return 1.0 - signal_good_prob


def _expected_wage(code: int, p: ModelParams, compensation: str) -> float:
    use_good = _use_prob_given_quality(code, True, p)
    use_bad = _use_prob_given_quality(code, False, p)
    if compensation == PROSPECTIVE:
        return p.w * (p.pi * use_good + (1.0 - p.pi) * use_bad)
    expected_good = use_good * (1.0 + p.g) + (1.0 - use_good)
    expected_bad = 1.0 - use_bad
    return p.pi * expected_good + (1.0 - p.pi) * expected_bad


def _deviation_payoff_matrix(
    cfg: SimConfig,
    profile: StrategyProfile,
    policy_gamma: float,
    seniority: SeniorityOrder | None,
) -> np.ndarray:
    """Expected payoff of every (access agent, strategy) pair, others fixed.

    Analytic expectations over quality, signals, and the firing rule; no
    sampling, so deviation gains carry no Monte Carlo noise.
    """
    p = cfg.params
    m = cfg.access_count
    matrix = np.empty((m, _N_STRATEGIES))
    if m == 0:
        return matrix

    if cfg.punishment_mode == UNIFORM_RANDOM:
        # firing is independent across agents, so payoffs decouple
        row = np.array(
            [agent_payoff(s, policy_gamma, p, cfg.compensation) for s in ALL_STRATEGIES]
        )
        matrix[:] = row
        return matrix

    order = seniority or SeniorityOrder.identity(cfg.n_agents)
    ranks = order.rank[:m]
    codes = profile.codes[:m]
    effort_cost = np.where(_EFFORT_TABLE, p.c, 0.0)

    if cfg.signal_correlation == COMMON:
        # enumerate the four (quality, signal-error) states exactly
        matrix[:] = 0.0
        for good in (True, False):
            for wrong in (False, True):
                prob = (p.pi if good else 1.0 - p.pi) * (p.eps if wrong else 1.0 - p.eps)
                if prob == 0.0:
                    continue
                signal_good = good != wrong
                use_now = _adoption(codes, signal_good)
                failing = use_now & (not good)
                failing_ranks = ranks[failing]
                if failing_ranks.size == 0:
                    min1, min2 = math.inf, math.inf
                elif failing_ranks.size == 1:
                    min1, min2 = float(failing_ranks[0]), math.inf
                else:
                    two = np.partition(failing_ranks, 1)[:2]
                    min1, min2 = float(two.min()), float(two.max())
                # most senior OTHER failure, from each agent's point of view
                min_other = np.where(failing & (ranks == min1), min2, min1)
                produced_value = (1.0 + p.g) if good else 0.0
                for s in ALL_STRATEGIES:
                    code = int(s)
                    rule = _USE_RULE[code]
                    use_dev = bool(
                        rule == 1 or (rule == 2 and signal_good) or (rule == 3 and not signal_good)
                    )
                    produced = produced_value if use_dev else 1.0
                    wage = (p.w if use_dev else 0.0) if cfg.compensation == PROSPECTIVE else produced
                    base = wage - effort_cost[code] + p.v_c
                    if use_dev and not good:
                        # the deviator fails and loses v_c when most senior
                        fired = ranks < min_other
                        matrix[:, code] += prob * (base - p.v_c * fired)
                    else:
                        matrix[:, code] += prob * base
        return matrix

    # independent signals: failures are independent across agents given a
    # bad technology, so the chance no more-senior agent fails is a
    # prefix product over seniority ranks
    pfail_bad = np.array([_use_prob_given_quality(int(c), False, p) for c in codes])
    by_rank = np.argsort(ranks, kind="stable")
    survive = 1.0 - pfail_bad[by_rank]
    prefix = np.ones(m)
    prefix[by_rank[1:]] = np.cumprod(survive[:-1])
    for s in ALL_STRATEGIES:
        code = int(s)
        fired_prob = (1.0 - p.pi) * _use_prob_given_quality(code, False, p) * prefix
        wage = _expected_wage(code, p, cfg.compensation)
        matrix[:, code] = wage - effort_cost[code] + p.v_c * (1.0 - fired_prob)
    return matrix


@dataclass(frozen=True)
class Deviation:
    """A profitable unilateral deviation found by the Nash check."""

    agent: int
    current: AgentStrategy
    better: AgentStrategy
    gain: float


def nash_check(
    cfg: SimConfig,
    profile: StrategyProfile,
    policy_gamma: float,
    curve: ReplacementCostCurve | None = None,
    seniority: SeniorityOrder | None = None,
    tol: float = 1e-12,
) -> list[Deviation]:
    """List every profitable unilateral deviation; empty means Nash.

    Payoffs are exact expectations, so a gain above ``tol`` is a real
    deviation rather than sampling noise.  The replacement-cost curve
    does not enter worker payoffs and is accepted only for interface
    symmetry with the episode runner.
    """
    if len(profile) != cfg.n_agents:
        raise ContractViolationError(
            f"profile length {len(profile)} does not match n_agents {cfg.n_agents}"
        )
    if not 0.0 <= policy_gamma <= 1.0:
        raise ValueError(f"policy_gamma must lie in [0, 1], got {policy_gamma}")
    matrix = _deviation_payoff_matrix(cfg, profile, policy_gamma, seniority)
    deviations: list[Deviation] = []
    codes = profile.codes[: cfg.access_count]
    for pos in range(cfg.access_count):
        current = int(codes[pos])
        best = int(np.argmax(matrix[pos]))
        gain = float(matrix[pos, best] - matrix[pos, current])
        if gain > tol:
            deviations.append(
                Deviation(
                    agent=pos,
                    current=AgentStrategy(current),
                    better=AgentStrategy(best),
                    gain=gain,
                )
            )
    return deviations


@dataclass(frozen=True)
class BestResponseTrace:
    """Synchronous best-response iteration record.

    ``profiles[0]`` is the initial profile and each later entry is the
    profile after a round that changed somebody; ``changed[k]`` lists the
    access agents who switched in round k+1.  ``converged`` is False only
    if the round cap was hit, which is reported rather than raised so a
    failing dynamic can be inspected as a counterexample.
    """

    profiles: list[StrategyProfile]
    changed: list[list[int]]
    converged: bool

    @property
    def rounds(self) -> int:
        return len(self.profiles) - 1

    @property
    def final(self) -> StrategyProfile:
        return self.profiles[-1]


def iterated_best_response(
    cfg: SimConfig,
    initial: StrategyProfile,
    seniority: SeniorityOrder | None = None,
    max_rounds: int | None = None,
    tol: float = 1e-12,
) -> BestResponseTrace:
    """Iterate synchronous best responses until a fixed point.

    Intended for the seniority punishment mode, where the most senior
    member of any would-be shirking group prefers effort, flipping one
    agent per round until everyone with access researches.  Agents keep
    their current strategy when it remains among the best responses.
    """
    if len(initial) != cfg.n_agents:
        raise ContractViolationError(
            f"profile length {len(initial)} does not match n_agents {cfg.n_agents}"
        )
    cap = 10 * cfg.n_agents if max_rounds is None else max_rounds
    profiles = [initial]
    changed: list[list[int]] = []
    current = initial
    for _ in range(cap):
        matrix = _deviation_payoff_matrix(cfg, current, 0.0, seniority)
        codes = current.codes.copy()
        switched: list[int] = []
        for pos in range(cfg.access_count):
            row = matrix[pos]
            best_value = float(row.max())
            if row[codes[pos]] >= best_value - tol:
                continue
            codes[pos] = int(np.argmax(row))
            switched.append(pos)
        if not switched:
            return BestResponseTrace(profiles, changed, True)
        current = StrategyProfile(codes)
        profiles.append(current)
        changed.append(switched)
    return BestResponseTrace(profiles, changed, False)


BASELINE = "baseline"
VARIABLE_COMPENSATION = "variable_compensation"
SENIORITY_SCENARIO = "seniority"


@dataclass(frozen=True)
class ScenarioResult:
    """One arm of a policy experiment."""

    name: str
    gamma: float
    profile_label: str
    equilibrium_confirmed: bool
    deviation_count: int
    result: SimResult
    target_output: float
    target_welfare: float
    unraveling_rounds: int | None = None

    def summary(self) -> str:
        status = "equilibrium" if self.equilibrium_confirmed else f"{self.deviation_count} deviations"
        lines = [
            f"scenario {self.name}: profile {self.profile_label} at gamma {_fmt(self.gamma)} ({status})",
            f"  output/agent  {_fmt(self.result.output.mean)} +- {_fmt(self.result.output.se)}"
            f"  target {_fmt(self.target_output)}",
            f"  welfare/agent {_fmt(self.result.welfare.mean)} +- {_fmt(self.result.welfare.se)}"
            f"  target {_fmt(self.target_welfare)}",
            f"  replacement cost {_fmt(self.result.replacement_cost.mean)}",
        ]
        if self.unraveling_rounds is not None:
            lines.append(f"  unraveled to effort in {self.unraveling_rounds} rounds")
        return "\n".join(lines)


@dataclass(frozen=True)
class ExperimentReport:
    """Matched comparison of a baseline against a policy treatment."""

    h: float
    scenarios: tuple[ScenarioResult, ...]

    def summary(self) -> str:
        parts = [f"technology reach h = {_fmt(self.h)}"]
        parts.extend(s.summary() for s in self.scenarios)
        return "\n".join(parts)


def _scenario_run(
    cfg: SimConfig,
    name: str,
    gamma: float,
    profile: StrategyProfile,
    curve: ReplacementCostCurve,
    seniority: SeniorityOrder | None,
    threads: int,
    unraveling_rounds: int | None = None,
) -> ScenarioResult:
    deviations = nash_check(cfg, profile, gamma, curve, seniority)
    sim = monte_carlo(cfg, profile, gamma, curve, seniority, threads=threads)
    access_codes = profile.codes[: cfg.access_count]
    if cfg.access_count and np.all(access_codes == access_codes[0]):
        label = AgentStrategy(int(access_codes[0])).label
        regime = EFFORT if AgentStrategy(int(access_codes[0])) == AgentStrategy.EFFORT_FOLLOW_SIGNAL else SHIRK
    else:
        label = "mixed"
        regime = SHIRK
    target_output = expected_output(cfg.h, regime, cfg.params)
    effort_share = float(_EFFORT_TABLE[access_codes].sum()) / cfg.n_agents if cfg.access_count else 0.0
    target_welfare = target_output - cfg.params.c * effort_share
    return ScenarioResult(
        name=name,
        gamma=gamma,
        profile_label=label,
        equilibrium_confirmed=not deviations,
        deviation_count=len(deviations),
        result=sim,
        target_output=target_output,
        target_welfare=target_welfare,
        unraveling_rounds=unraveling_rounds,
    )


def policy_experiment(
    cfg: SimConfig,
    scenario: str,
    curve: ReplacementCostCurve,
    seniority: SeniorityOrder | None = None,
    threads: int = 1,
    tol: float = 1e-10,
) -> ExperimentReport:
    """Compare the baseline policy against one treatment at matched seeds.

    baseline -- prospective pay, random firing at the solved threshold
        policy rate for ``cfg.h``; the equilibrium profile is effort when
        punishment is credible there, blind adoption otherwise.
    variable_compensation -- workers are paid realized production and the
        principal never fires; effort should be an equilibrium on its own.
    seniority -- prospective pay with the seniority selector; the
        equilibrium profile is found by best-response unraveling from
        universal blind adoption.

    All arms share the root seed, so arms with the same strategy profile
    see identical production paths.
    """
    if scenario not in (BASELINE, VARIABLE_COMPENSATION, SENIORITY_SCENARIO):
        raise ValueError(f"unknown scenario {scenario!r}")
    require_admissible(cfg.params)
    sol = solve_threshold(cfg.params, curve, tol=tol)
    base_gamma = policy(cfg.h, sol)
    base_cfg = dc_replace(cfg, compensation=PROSPECTIVE, punishment_mode=UNIFORM_RANDOM)
    base_strategy = (
        AgentStrategy.EFFORT_FOLLOW_SIGNAL if base_gamma > 0.0 else AgentStrategy.SHIRK_USE
    )
    base_profile = StrategyProfile.symmetric(base_strategy, cfg.n_agents)
    scenarios = [
        _scenario_run(base_cfg, BASELINE, base_gamma, base_profile, curve, seniority, threads)
    ]

    if scenario == VARIABLE_COMPENSATION:
        treat_cfg = dc_replace(cfg, compensation=REALIZED, punishment_mode=UNIFORM_RANDOM)
        profile = StrategyProfile.symmetric(AgentStrategy.EFFORT_FOLLOW_SIGNAL, cfg.n_agents)
        scenarios.append(
            _scenario_run(treat_cfg, VARIABLE_COMPENSATION, 0.0, profile, curve, seniority, threads)
        )
    elif scenario == SENIORITY_SCENARIO:
        treat_cfg = dc_replace(cfg, compensation=PROSPECTIVE, punishment_mode=SENIORITY)
        start = StrategyProfile.symmetric(AgentStrategy.SHIRK_USE, cfg.n_agents)
        trace = iterated_best_response(treat_cfg, start, seniority)
        scenarios.append(
            _scenario_run(
                treat_cfg,
                SENIORITY_SCENARIO,
                0.0,
                trace.final,
                curve,
                seniority,
                threads,
                unraveling_rounds=trace.rounds,
            )
        )

    return ExperimentReport(h=cfg.h, scenarios=tuple(scenarios))


# -- report serialization --------------------------------------------------


def write_sim_result_csv(result: SimResult, destination: str) -> None:
    with open(destination, "w", encoding="utf-8", newline="") as handle:
        for row in result.to_csv_rows():
            handle.write(",".join(row) + "\n")


def deviations_to_rows(deviations: Iterable[Deviation]) -> list[list[str]]:
    rows = [["agent", "current", "better", "gain"]]
    for d in deviations:
        rows.append([str(d.agent), d.current.label, d.better.label, _fmt(d.gain)])
    return rows


def write_deviations_csv(deviations: Iterable[Deviation], destination: str) -> None:
    with open(destination, "w", encoding="utf-8", newline="") as handle:
        for row in deviations_to_rows(deviations):
            handle.write(",".join(row) + "\n")


def deviations_summary(deviations: Sequence[Deviation]) -> str:
    if not deviations:
        return "no profitable deviations: profile is a Nash equilibrium"
    lines = [f"{len(deviations)} profitable deviations"]
    for d in deviations[:10]:
        lines.append(
            f"  agent {d.agent}: {d.current.label} -> {d.better.label} gains {_fmt(d.gain)}"
        )
    if len(deviations) > 10:
        lines.append(f"  ... and {len(deviations) - 10} more")
    return "\n".join(lines)
