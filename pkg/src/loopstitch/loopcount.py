"""Loop-count synthesis: fit an integer function to a category's
(input, repetition count) pairs by delegating to the PBE solver over an
integer-rooted grammar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .solver import BUILTIN, SolveBudget, SolverChoice, SolverFailure, solve_pbe
from .sygus import ConstraintExample, Grammar, SygusProblem
from .terms import App, INT, STRING, Var, lit
from .unroll import Category


@dataclass(frozen=True)
class CountExample:
    inputs: tuple  # the original example inputs
    count: int  # repetition count observed in that example's solution


def build_count_examples(category: Category, problem: SygusProblem) -> list:
    """One CountExample per member, preserving member order."""
    if not category.members:
        raise ValueError("category has no members")
    out = []
    for idx, reps in category.members:
        out.append(CountExample(problem.examples[idx].inputs, reps))
    return out


def default_int_grammar(problem: SygusProblem) -> Grammar:
    """Fallback grammar: small constants, lengths of string parameters,
    and +/- over those."""
    taken = set(problem.target.param_names)
    int_nt = _fresh("I", taken)
    str_nt = _fresh("S", taken | {int_nt})
    string_params = [Var(name) for name, sort in problem.target.params if sort == STRING]
    int_prods = [lit(0), lit(1), lit(2)]
    nts = [(int_nt, INT)]
    productions = {}
    if string_params:
        int_prods.append(App("str.len", (Var(str_nt),)))
        nts.append((str_nt, STRING))
        productions[str_nt] = tuple(string_params)
    int_prods.append(App("+", (Var(int_nt), Var(int_nt))))
    int_prods.append(App("-", (Var(int_nt), Var(int_nt))))
    productions[int_nt] = tuple(int_prods)
    return Grammar(tuple(nts), int_nt, productions)


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "0"
    return name


def derive_int_grammar(grammar: Grammar, problem: SygusProblem) -> Grammar:
    """Re-root the problem grammar at its first Int nonterminal, or fall
    back to the default integer grammar when it has none."""
    for nt, sort in grammar.nonterminals:
        if sort == INT:
            return Grammar(grammar.nonterminals, nt, grammar.productions)
    return default_int_grammar(problem)


def synthesize_loop_count(
    category: Category,
    problem: SygusProblem,
    budget: SolveBudget,
    choice: SolverChoice = BUILTIN,
):
    """Synthesize h with evaluate(h, inputs_i) = reps_i for every member.

    On failure the category is marked exhausted so the pipeline does not
    retry it until it grows.
    """
    count_examples = build_count_examples(category, problem)
    int_grammar = derive_int_grammar(problem.grammar, problem)
    examples = [ConstraintExample(ex.inputs, ex.count) for ex in count_examples]
    try:
        return solve_pbe(
            int_grammar,
            problem.target.params,
            INT,
            examples,
            budget,
            choice,
            fn_name=_count_fn_name(problem),
        )
    except SolverFailure:
        category.state = "exhausted"
        raise


def _count_fn_name(problem: SygusProblem) -> str:
    return _fresh("h", {problem.target.name, *problem.target.param_names})
