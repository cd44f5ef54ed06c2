"""Stitching: turn (skeleton, context, base) plus a loop count into a
recursive wrapper/helper pair, and verify it against every constraint.

The helper accumulates: g(params..., b, n) returns b when n <= 0 and
otherwise applies the repeated context once around the recursive call
with n - 1. The wrapper plugs g(params..., base, loop_count) into the
skeleton's hole, so for any input where the loop count evaluates to
R >= 0 the wrapper computes skeleton[context^R[base]].
"""

from __future__ import annotations

from dataclasses import dataclass

from .semantics import (
    Defs,
    FuelCounter,
    FunctionDef,
    DEFAULT_FUEL,
    EvalError,
    SortError,
    evaluate,
    infer_sort,
)
from .sygus import SygusProblem
from .terms import (
    App,
    INT,
    Term,
    Var,
    apply_context,
    ast_size,
    compose,
    contains_hole,
    lit,
    values_equal,
)
from .unroll import CategoryKey


class SortMismatch(SortError):
    pass


@dataclass
class RecursiveSolution:
    wrapper: FunctionDef  # original signature; calls the helper at the hole
    helper: FunctionDef  # recursive; (params..., accumulator, count)
    loop_count: object  # Term over the original parameters, embedded in wrapper
    category: CategoryKey | None = None

    def defs(self) -> Defs:
        return {self.wrapper.name: self.wrapper, self.helper.name: self.helper}


@dataclass(frozen=True)
class ExampleCheck:
    index: int
    ok: bool
    produced: object = None
    error: str | None = None


@dataclass
class VerifyReport:
    checks: list
    ok: bool
    max_fuel_used: int = 0


def _fresh(name: str, taken) -> str:
    candidate = name
    suffix = 0
    while candidate in taken:
        suffix += 1
        candidate = f"{name}{suffix}"
    return candidate


def build_recursive_solution(key: CategoryKey, loop_count, problem: SygusProblem) -> RecursiveSolution:
    """Construct the wrapper/helper pair for a category key and loop count."""
    skeleton, context, base = key.skeleton, key.context, key.base
    if contains_hole(base):
        raise ValueError("base must be hole-free")

    target = problem.target
    param_sorts = dict(target.params)
    base_sort = infer_sort(base, param_sorts)
    context_sort = infer_sort(context, param_sorts)
    if base_sort != context_sort:
        raise SortMismatch(
            f"base has sort {base_sort} but the repeated context produces {context_sort}"
        )
    count_sort = infer_sort(loop_count, param_sorts)
    if count_sort != INT:
        raise SortMismatch(f"loop count has sort {count_sort}, expected Int")

    taken = set(target.param_names) | {target.name}
    helper_name = _fresh("g" if target.name != "g" else "g_rec", taken)
    taken.add(helper_name)
    acc_name = _fresh("b", taken)
    taken.add(acc_name)
    count_name = _fresh("n", taken)

    params = list(target.param_names)
    recursive_call = App(
        helper_name,
        tuple(Var(p) for p in params) + (Var(acc_name), App("-", (Var(count_name), lit(1)))),
    )
    helper_body = App(
        "ite",
        (
            App("<=", (Var(count_name), lit(0))),
            Var(acc_name),
            apply_context(context, recursive_call),
        ),
    )
    helper = FunctionDef(
        helper_name,
        tuple(target.params) + ((acc_name, base_sort), (count_name, INT)),
        base_sort,
        helper_body,
        recursive=True,
    )

    wrapper_call = App(
        helper_name, tuple(Var(p) for p in params) + (base, loop_count)
    )
    wrapper_body = apply_context(skeleton, wrapper_call)
    if contains_hole(wrapper_body):
        raise ValueError("wrapper body still contains a hole")
    wrapper = FunctionDef(target.name, target.params, target.return_sort, wrapper_body)

    solution = RecursiveSolution(wrapper, helper, loop_count, key)
    defs = solution.defs()
    helper_scope = dict(helper.params)
    helper_sort = infer_sort(helper_body, helper_scope, defs)
    if helper_sort != base_sort:
        raise SortMismatch(f"helper body has sort {helper_sort}, expected {base_sort}")
    wrapper_sort = infer_sort(wrapper_body, param_sorts, defs)
    if wrapper_sort != target.return_sort:
        raise SortMismatch(
            f"stitched wrapper has sort {wrapper_sort}, expected {target.return_sort}"
        )
    return solution


def verify(solution: RecursiveSolution, problem: SygusProblem, fuel: int = DEFAULT_FUEL) -> VerifyReport:
    """Evaluate the wrapper on every constraint example.

    Evaluation errors (including fuel exhaustion from a divergent or
    too-deep recursion) count as a failed example, not a crash.
    """
    defs = solution.defs()
    checks = []
    max_fuel = 0
    for i, ex in enumerate(problem.examples):
        counter = FuelCounter(fuel)
        try:
            produced = evaluate(
                App(solution.wrapper.name, tuple(lit(v) for v in ex.inputs)),
                {},
                defs,
                counter,
            )
        except EvalError as exc:
            checks.append(ExampleCheck(i, False, error=f"{type(exc).__name__}: {exc}"))
            max_fuel = max(max_fuel, counter.used)
            continue
        max_fuel = max(max_fuel, counter.used)
        ok = values_equal(produced, ex.output)
        checks.append(ExampleCheck(i, ok, produced=produced))
    return VerifyReport(checks, all(c.ok for c in checks), max_fuel)


def unroll_equivalence_check(
    solution: RecursiveSolution,
    key: CategoryKey,
    inputs,
    reps: int,
    problem: SygusProblem,
    fuel: int = DEFAULT_FUEL,
) -> bool:
    """Consistency check: the stitched wrapper agrees with the literal
    R-fold unrolling on one member's inputs."""
    env = dict(zip(problem.target.param_names, inputs))
    unrolled = compose(key.skeleton, key.context, key.base, reps)
    try:
        direct = evaluate(unrolled, env, fuel=fuel)
        stitched = evaluate(
            App(solution.wrapper.name, tuple(lit(v) for v in inputs)),
            {},
            solution.defs(),
            fuel,
        )
    except EvalError:
        return False
    return values_equal(direct, stitched)


def solution_size(solution) -> int:
    """Node count of a solution: body nodes plus one per defined function."""
    if isinstance(solution, RecursiveSolution):
        return ast_size(solution.wrapper.body) + ast_size(solution.helper.body) + 2
    return ast_size(solution) + 1
