"""Pipeline driver: split constraints into singleton subsets, solve each
through the black-box backend, mine the solutions for repeated contexts,
synthesize loop counts on category growth, stitch, and verify.

A subset whose solution shows no repeated context is retained: if no
stitched solution ever verifies, a retained solution that happens to
satisfy every constraint (or one final whole-problem solve) becomes the
direct fallback answer.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field, replace

from .semantics import DEFAULT_FUEL, EvalError, evaluate
from .solver import (
    BUILTIN,
    SolveBudget,
    SolveTimeout,
    SolverChoice,
    SolverFailure,
    solve_pbe,
)
from .stitch import RecursiveSolution, build_recursive_solution, solution_size, verify
from .sygus import SygusProblem
from .terms import normalize, values_equal
from .unroll import CategoryRegistry, decompose
from .loopcount import synthesize_loop_count

ORDER_POLICIES = ("given", "reversed", "random")

FAIL_TIMEOUT = "timeout"
FAIL_NO_PATTERN = "no-pattern-found"
FAIL_EXHAUSTED = "all-categories-exhausted"
FAIL_INFEASIBLE = "base-solver-infeasible"


@dataclass
class PipelineConfig:
    solver: SolverChoice = BUILTIN
    subset_budget: SolveBudget = field(default_factory=SolveBudget)
    loop_budget: SolveBudget = field(default_factory=lambda: SolveBudget(timeout=10.0, max_size=60))
    timeout: float = 60.0  # global wall clock
    fuel: int = DEFAULT_FUEL
    order: str = "given"
    seed: int = 0
    fallback: bool = True
    prefer: str = "recursive"  # or "direct"

    def __post_init__(self):
        if self.timeout <= 0 or self.fuel <= 0:
            raise ValueError("timeout and fuel must be positive")
        if self.timeout < max(self.subset_budget.timeout, self.loop_budget.timeout):
            raise ValueError("global timeout must cover every single solve budget")
        if self.order not in ORDER_POLICIES:
            raise ValueError(f"unknown order policy: {self.order}")
        if self.prefer not in ("recursive", "direct"):
            raise ValueError(f"unknown preference: {self.prefer}")
        self.solver.validate()


@dataclass
class PipelineStats:
    subsets_solved: int = 0
    categories_formed: int = 0
    loop_synth_attempts: int = 0
    wall_time: float = 0.0
    solution_size: int | None = None


@dataclass
class DirectSolution:
    term: object


@dataclass
class SynthesisResult:
    outcome: "RecursiveSolution | DirectSolution | None"
    failure: str | None
    stats: PipelineStats

    @property
    def ok(self) -> bool:
        return self.outcome is not None

    @property
    def kind(self) -> str:
        if isinstance(self.outcome, RecursiveSolution):
            return "recursive"
        if isinstance(self.outcome, DirectSolution):
            return "direct"
        return "failure"


def split(problem: SygusProblem, order: str = "given", seed: int = 0) -> list:
    """Singleton subsets (as index tuples) under the given order policy."""
    subsets = [(i,) for i in range(len(problem.examples))]
    if order == "reversed":
        subsets.reverse()
    elif order == "random":
        random.Random(seed).shuffle(subsets)
    elif order != "given":
        raise ValueError(f"unknown order policy: {order}")
    return subsets


class _Clock:
    def __init__(self, timeout: float):
        self.start = time.monotonic()
        self.timeout = timeout

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.start

    @property
    def remaining(self) -> float:
        return self.timeout - self.elapsed

    def clip(self, budget: SolveBudget) -> SolveBudget:
        return replace(budget, timeout=max(min(budget.timeout, self.remaining), 0.001))


def _satisfies_all(term, problem: SygusProblem) -> bool:
    try:
        for ex in problem.examples:
            if not values_equal(evaluate(term, problem.env_for(ex)), ex.output):
                return False
    except EvalError:
        return False
    return True


def run(problem: SygusProblem, config: PipelineConfig | None = None) -> SynthesisResult:
    """Run the full pipeline and return the first verified solution.

    Recursive solutions are preferred by default; with prefer="direct" a
    whole-problem solve is attempted first and the pipeline only runs if
    it fails.
    """
    config = config or PipelineConfig()
    clock = _Clock(config.timeout)
    stats = PipelineStats()

    def finish(outcome, failure=None):
        stats.wall_time = clock.elapsed
        if outcome is not None:
            stats.solution_size = solution_size(
                outcome.term if isinstance(outcome, DirectSolution) else outcome
            )
        return SynthesisResult(outcome, failure, stats)

    direct_already_failed = False
    if config.prefer == "direct" and config.fallback and problem.examples:
        try:
            term = baseline_direct_solve(problem, config, clock)
            return finish(DirectSolution(term))
        except SolveTimeout:
            if clock.remaining <= 0:
                return finish(None, FAIL_TIMEOUT)
            direct_already_failed = True
        except SolverFailure:
            direct_already_failed = True

    registry = CategoryRegistry()
    solved: dict = {}

    for subset in split(problem, config.order, config.seed):
        if clock.remaining <= 0:
            return finish(None, FAIL_TIMEOUT)
        idx = subset[0]
        examples = [problem.examples[i] for i in subset]
        try:
            raw = solve_pbe(
                problem.grammar,
                problem.target.params,
                problem.target.return_sort,
                examples,
                clock.clip(config.subset_budget),
                config.solver,
                fn_name=problem.target.name,
            )
        except SolverFailure:
            continue
        stats.subsets_solved += 1
        term = normalize(raw)
        solved[idx] = term

        decomposition = decompose(term, source=idx)
        if decomposition is None:
            continue
        category, grew = registry.admit(decomposition)
        stats.categories_formed = len(registry)
        if not grew or category.state == "exhausted":
            continue

        if clock.remaining <= 0:
            return finish(None, FAIL_TIMEOUT)
        stats.loop_synth_attempts += 1
        try:
            loop_count = synthesize_loop_count(
                category, problem, clock.clip(config.loop_budget), config.solver
            )
        except SolverFailure:
            continue
        category.state = "loop-synthesized"

        solution = build_recursive_solution(category.key, loop_count, problem)
        report = verify(solution, problem, config.fuel)
        if report.ok:
            _recheck(solution, problem, config.fuel)
            return finish(solution)

    if config.fallback:
        for idx in sorted(solved):
            if _satisfies_all(solved[idx], problem):
                return finish(DirectSolution(solved[idx]))
        if problem.examples and clock.remaining > 0 and not direct_already_failed:
            try:
                term = baseline_direct_solve(problem, config, clock)
                return finish(DirectSolution(term))
            except SolverFailure:
                pass

    if clock.remaining <= 0:
        return finish(None, FAIL_TIMEOUT)
    if stats.subsets_solved == 0 and problem.examples:
        return finish(None, FAIL_INFEASIBLE)
    if len(registry) == 0:
        return finish(None, FAIL_NO_PATTERN)
    return finish(None, FAIL_EXHAUSTED)


def _recheck(solution: RecursiveSolution, problem: SygusProblem, fuel: int):
    # Defense in depth: a solution never leaves the pipeline unverified.
    report = verify(solution, problem, fuel)
    if not report.ok:
        raise AssertionError("stitched solution failed re-verification")


def baseline_direct_solve(
    problem: SygusProblem, config: PipelineConfig | None = None, clock: _Clock | None = None
):
    """Whole-problem solve over all constraints at once.

    This is what a standalone solver does; the benchmark harness uses it
    as the comparison column.
    """
    config = config or PipelineConfig()
    budget = replace(config.subset_budget, timeout=config.timeout)
    if clock is not None:
        budget = clock.clip(budget)
    return solve_pbe(
        problem.grammar,
        problem.target.params,
        problem.target.return_sort,
        list(problem.examples),
        budget,
        config.solver,
        fn_name=problem.target.name,
    )
