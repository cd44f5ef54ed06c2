"""Black-box PBE solving: a built-in enumerative solver and an external
solver subprocess adapter.

The built-in solver enumerates grammar terms bottom-up by increasing node
count with observational-equivalence pruning: candidates that produce
identical output vectors on the example inputs are merged, keeping the
smaller term (ties broken by lexicographically earlier print form). The
first start-symbol candidate matching every example output is returned,
which makes the result minimal and deterministic.

External solvers are untrusted: whatever they return is re-checked against
the examples and against grammar membership before being accepted.
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from dataclasses import dataclass
from itertools import product

from .semantics import evaluate
from .sygus import (
    FunctionSignature,
    Grammar,
    InfeasibleOutput,
    SygusError,
    SygusProblem,
    parse_solver_output,
    print_problem,
)
from .terms import App, Lit, Term, Var, ast_size, positions, print_term, replace_at, sort_of_value, values_equal


class SolverFailure(Exception):
    """Base for expected solve failures (not programming errors)."""


class SolveTimeout(SolverFailure):
    pass


class Infeasible(SolverFailure):
    pass


class ExternalSolverError(SolverFailure):
    pass


@dataclass(frozen=True)
class SolveBudget:
    timeout: float = 10.0  # wall seconds
    max_size: int = 200  # node count ceiling for candidates
    max_candidates: int = 2_000_000

    def __post_init__(self):
        if self.timeout <= 0 or self.max_size <= 0 or self.max_candidates <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class SolverChoice:
    kind: str  # "builtin" | "external"
    path: str | None = None
    extra_args: tuple = ()

    @staticmethod
    def external(path: str, extra_args=()) -> "SolverChoice":
        return SolverChoice("external", path, tuple(extra_args))

    def validate(self):
        if self.kind == "external":
            if not self.path or not os.path.isfile(self.path):
                raise ExternalSolverError(f"external solver not found: {self.path}")
        elif self.kind != "builtin":
            raise ValueError(f"unknown solver kind: {self.kind}")


BUILTIN = SolverChoice("builtin")


def _tagged(value):
    return (sort_of_value(value), value)


def _output_vector(term, envs):
    return tuple(_tagged(evaluate(term, env)) for env in envs)


class _TemplateInfo:
    """Pre-analyzed grammar production: nonterminal slots and fixed size."""

    __slots__ = ("term", "slots", "slot_nts", "base_size")

    def __init__(self, term, grammar: Grammar):
        self.term = term
        self.slots = []
        self.slot_nts = []
        for path, sub in positions(term):
            if isinstance(sub, Var) and grammar.is_nonterminal(sub.name):
                self.slots.append(path)
                self.slot_nts.append(sub.name)
        self.base_size = ast_size(term) - len(self.slots)

    def instantiate(self, fillers):
        t = self.term
        for path, filler in zip(self.slots, fillers):
            t = replace_at(t, path, filler)
        return t


def _compositions(total: int, parts: int):
    """All ways to write total as an ordered sum of ``parts`` positives."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Deadline:
    def __init__(self, seconds: float):
        self.at = time.monotonic() + seconds

    def check(self):
        if time.monotonic() > self.at:
            raise SolveTimeout("solve budget exceeded")


def builtin_enumerate(
    grammar: Grammar,
    params,
    examples,
    budget: SolveBudget,
) -> Term:
    """Bottom-up enumerative search for the smallest satisfying grammar term.

    ``params`` is the ((name, sort), ...) tuple the example inputs bind to.
    Raises SolveTimeout / Infeasible.
    """
    if not examples:
        raise ValueError("examples must be nonempty")
    names = [name for name, _ in params]
    envs = [dict(zip(names, ex.inputs)) for ex in examples]
    target_vec = tuple(_tagged(ex.output) for ex in examples)

    templates = {
        nt: [_TemplateInfo(p, grammar) for p in grammar.productions[nt]]
        for nt, _ in grammar.nonterminals
    }
    # Unit productions (a bare nonterminal reference) consume pool entries
    # of the same size, so those grammars need a fixpoint pass per level.
    needs_fixpoint = any(
        info.base_size == 0 for infos in templates.values() for info in infos
    )
    pools: dict = {}  # (nt, size) -> list[Term]
    seen: dict = {nt: set() for nt, _ in grammar.nonterminals}
    deadline = _Deadline(budget.timeout)
    candidates = 0

    for size in range(1, budget.max_size + 1):
        for nt, _ in grammar.nonterminals:
            pools[(nt, size)] = []
        grew = True
        while grew:
            grew = False
            for nt, _ in grammar.nonterminals:
                # vec -> (print form, term); keeps the lexicographically
                # earliest representative among same-size candidates.
                fresh: dict = {}
                for info in templates[nt]:
                    k = len(info.slots)
                    if k == 0:
                        if info.base_size == size:
                            _consider(fresh, seen[nt], info.term, envs)
                        continue
                    for comp in _compositions(size - info.base_size, k):
                        pool_lists = [
                            pools.get((slot_nt, n), ())
                            for slot_nt, n in zip(info.slot_nts, comp)
                        ]
                        if any(not p for p in pool_lists):
                            continue
                        for fillers in product(*pool_lists):
                            candidates += 1
                            if candidates % 512 == 0:
                                deadline.check()
                            if candidates > budget.max_candidates:
                                raise SolveTimeout("candidate budget exceeded")
                            _consider(fresh, seen[nt], info.instantiate(fillers), envs)
                deadline.check()
                if fresh:
                    grew = True
                    for vec, (_, term) in sorted(fresh.items(), key=lambda kv: kv[1][0]):
                        seen[nt].add(vec)
                        pools[(nt, size)].append(term)
                    if nt == grammar.start and target_vec in fresh:
                        return fresh[target_vec][1]
            if not needs_fixpoint:
                break
    raise Infeasible(f"no solution within {budget.max_size} nodes")


def _consider(fresh: dict, seen_vecs: set, cand, envs):
    vec = _output_vector(cand, envs)
    if vec in seen_vecs:
        return
    text = print_term(cand)
    prev = fresh.get(vec)
    if prev is None or text < prev[0]:
        fresh[vec] = (text, cand)


def external_solve(
    choice: SolverChoice,
    problem: SygusProblem,
    budget: SolveBudget,
) -> Term:
    """Run an external SyGuS solver on a serialized problem file."""
    choice.validate()
    text = print_problem(problem)
    with tempfile.NamedTemporaryFile("w", suffix=".sl", delete=False) as handle:
        handle.write(text)
        path = handle.name
    try:
        cmd = [choice.path, *choice.extra_args, path]
        try:
            proc = subprocess.run(
                cmd, capture_output=True, text=True, timeout=budget.timeout
            )
        except subprocess.TimeoutExpired:
            raise SolveTimeout(f"external solver exceeded {budget.timeout}s")
        output = proc.stdout
        try:
            return parse_solver_output(output, problem.target)
        except InfeasibleOutput as exc:
            raise Infeasible(str(exc)) from exc
        except SygusError as exc:
            detail = output.strip() or proc.stderr.strip()
            raise ExternalSolverError(f"unparseable solver output ({exc}): {detail[:200]}") from exc
    finally:
        os.unlink(path)


def grammar_generates(grammar: Grammar, term, nt: str | None = None) -> bool:
    """Check that a term is derivable from the grammar (membership)."""
    nt = nt or grammar.start
    in_progress: set = set()

    def derives(t, symbol) -> bool:
        key = (t, symbol)
        if key in in_progress:
            return False
        in_progress.add(key)
        try:
            for prod in grammar.productions.get(symbol, ()):
                if matches(t, prod):
                    return True
            return False
        finally:
            in_progress.discard(key)

    def matches(t, template) -> bool:
        if isinstance(template, Var) and grammar.is_nonterminal(template.name):
            return derives(t, template.name)
        if isinstance(template, Var):
            return t == template
        if isinstance(template, Lit):
            return t == template
        if isinstance(template, App):
            return (
                isinstance(t, App)
                and t.op == template.op
                and len(t.args) == len(template.args)
                and all(matches(a, b) for a, b in zip(t.args, template.args))
            )
        return False

    return derives(term, nt)


def solve_pbe(
    grammar: Grammar,
    params,
    return_sort: str,
    examples,
    budget: SolveBudget,
    choice: SolverChoice = BUILTIN,
    fn_name: str = "f",
) -> Term:
    """Solve one PBE instance through the chosen backend.

    Every returned term is re-checked against all examples regardless of
    backend; external results must additionally be grammar members.
    """
    if not examples:
        raise ValueError("examples must be nonempty")
    if grammar.start_sort != return_sort:
        raise ValueError(
            f"grammar start sort {grammar.start_sort} does not match output sort {return_sort}"
        )
    if choice.kind == "builtin":
        term = builtin_enumerate(grammar, params, examples, budget)
    else:
        signature = FunctionSignature(fn_name, tuple(params), return_sort)
        problem = SygusProblem("SLIA", signature, grammar, tuple(examples))
        term = external_solve(choice, problem, budget)
        if not grammar_generates(grammar, term):
            raise ExternalSolverError(f"solver output is not generated by the grammar: {print_term(term)}")

    names = [name for name, _ in params]
    for ex in examples:
        got = evaluate(term, dict(zip(names, ex.inputs)))
        if not values_equal(got, ex.output):
            if choice.kind == "builtin":
                raise AssertionError(
                    f"builtin solver returned an unsound term {print_term(term)}"
                )
            raise ExternalSolverError(
                f"solver output fails example {ex.inputs!r} -> {ex.output!r}: got {got!r}"
            )
    return term
