import random
from pathlib import Path

import pytest

from loopstitch import (
    INT,
    STRING,
    FunctionSignature,
    app,
    evaluate,
    lit,
    parse_definitions,
    parse_problem,
    parse_solver_output,
    print_problem,
    print_solution,
    var,
)
from loopstitch.sexpr import SexprError
from loopstitch.sygus import (
    InfeasibleOutput,
    NonPbeConstraint,
    SygusFormatError,
    UnsupportedConstruct,
)

from gen import random_derivation, random_grammar

BENCH = Path(__file__).parent.parent / "benchmarks"

SIG_X = FunctionSignature("f", (("x", STRING),), STRING)


def test_parse_motivating_benchmark():
    problem = parse_problem((BENCH / "1.sl").read_text())
    assert problem.logic == "SLIA"
    assert problem.target == SIG_X
    assert len(problem.examples) == 3
    assert problem.examples[0].inputs == ("synth",)
    assert problem.examples[0].output == "synth" * 5
    assert problem.grammar.start == "Start"
    assert problem.grammar.start_sort == STRING
    # declaration order is preserved; used by the integer re-rooting rule
    assert [s for _, s in problem.grammar.nonterminals] == [STRING, "Bool", INT]


def test_parse_zero_constraint_file():
    text = """
(set-logic SLIA)
(synth-fun f ((x String)) String ((S String)) ((S String (x))))
(check-synth)
"""
    problem = parse_problem(text)
    assert problem.examples == ()


NON_PBE = [
    '(constraint (= (f "a") (f "b")))',
    '(constraint (str.prefixof (f "a") "ab"))',
    '(constraint (= (f x) "ab"))',
    "(constraint (= (f (str.++ \"a\" \"b\")) \"ab\"))",
    '(constraint (= "a" "a"))',
    "(constraint true)",
]


@pytest.mark.parametrize("bad", NON_PBE)
def test_non_pbe_constraints_rejected(bad):
    text = (
        "(set-logic SLIA)\n"
        "(synth-fun f ((x String)) String ((S String)) ((S String (x))))\n"
        + bad
        + "\n(check-synth)\n"
    )
    with pytest.raises(NonPbeConstraint):
        parse_problem(text)


def test_random_non_pbe_constraints_rejected():
    # Property: anything other than target-on-literals = literal must fail.
    rng = random.Random(90210)
    operators = ["str.++", "str.len", "not", "f"]
    for _ in range(200):
        shape = rng.choice(["nested", "var-arg", "no-eq", "both-calls"])
        if shape == "nested":
            bad = '(constraint (= (f (f "a")) "b"))'
        elif shape == "var-arg":
            bad = f'(constraint (= (f {rng.choice(["x", "y", "(str.++ x x)"])}) "b"))'
        elif shape == "no-eq":
            op = rng.choice(["str.prefixof", "str.contains"])
            bad = f'(constraint ({op} (f "a") "b"))'
        else:
            bad = '(constraint (= (f "a") (f "a")))'
        text = (
            "(set-logic SLIA)\n"
            "(synth-fun f ((x String)) String ((S String)) ((S String (x))))\n"
            + bad
            + "\n(check-synth)\n"
        )
        with pytest.raises(NonPbeConstraint):
            parse_problem(text)


def test_constraint_arity_and_sort_mismatches():
    base = "(set-logic SLIA)\n(synth-fun f ((x String)) String ((S String)) ((S String (x))))\n"
    with pytest.raises(SygusFormatError):
        parse_problem(base + '(constraint (= (f "a" "b") "c"))')
    with pytest.raises(SygusFormatError):
        parse_problem(base + '(constraint (= (f 3) "c"))')
    with pytest.raises(SygusFormatError):
        parse_problem(base + '(constraint (= (f "a") 3))')


def test_unsupported_forms_rejected():
    with pytest.raises(UnsupportedConstruct):
        parse_problem("(set-logic LIA)")
    with pytest.raises(UnsupportedConstruct):
        parse_problem('(set-logic SLIA)(declare-datatype T ((t)))')
    with pytest.raises(UnsupportedConstruct):
        parse_problem(
            "(set-logic SLIA)(synth-fun f ((x String)) String ((S String)) ((S String ((str.to_int x)))))"
        )
    with pytest.raises(UnsupportedConstruct):
        # synth-fun without an inline grammar
        parse_problem("(set-logic SLIA)(synth-fun f ((x String)) String)")
    with pytest.raises(UnsupportedConstruct):
        parse_problem(
            "(set-logic SLIA)(synth-fun f ((x Int)) Int ((S Int)) ((S Int ((* S S)))))"
        )


def test_declared_vars_and_check_synth():
    text = """
(set-logic SLIA)
(synth-fun f ((x String)) String ((S String)) ((S String (x))))
(declare-var w String)
(check-synth)
"""
    problem = parse_problem(text)
    assert problem.declared_vars == (("w", STRING),)


def test_print_problem_parse_round_trip():
    problem = parse_problem((BENCH / "1.sl").read_text())
    reparsed = parse_problem(print_problem(problem))
    assert reparsed == problem
    # fixpoint: printing the reparse changes nothing
    assert print_problem(reparsed) == print_problem(problem)


def test_print_plain_identity_solution():
    text = print_solution(var("x"), SIG_X)
    assert text == "(define-fun f ((x String)) String x)"


def test_parse_solver_output_plain():
    term = parse_solver_output('(define-fun f ((x String)) String (str.++ x x))', SIG_X)
    assert term == app("str.++", var("x"), var("x"))


def test_parse_solver_output_renames_positionally():
    term = parse_solver_output('(define-fun f ((arg0 String)) String (str.++ arg0 arg0))', SIG_X)
    assert term == app("str.++", var("x"), var("x"))


def test_parse_solver_output_cvc4_style_wrapper():
    # Verified against the parenthesized list form CVC4 prints.
    wrapped = '(\n(define-fun f ((x String)) String (str.++ x x))\n)'
    plain = '(define-fun f ((x String)) String (str.++ x x))'
    assert parse_solver_output(wrapped, SIG_X) == parse_solver_output(plain, SIG_X)


@pytest.mark.parametrize("token", ["infeasible", "unsat", "fail", "unknown"])
def test_parse_solver_output_failure_tokens(token):
    with pytest.raises(InfeasibleOutput):
        parse_solver_output(token, SIG_X)


def test_parse_solver_output_rejects_garbage():
    with pytest.raises((SygusFormatError, SexprError)):
        parse_solver_output("(define-fun g ((x String)) String x)", SIG_X)
    with pytest.raises((SygusFormatError, SexprError)):
        parse_solver_output("((((", SIG_X)


def test_print_parse_round_trip_on_random_grammar_terms():
    # print then parse yields an alpha-equivalent (here: identical) body
    rng = random.Random(31337)
    params = (("x", STRING),)
    sig = FunctionSignature("f", params, STRING)
    checked = 0
    while checked < 1000:
        grammar = random_grammar(rng, params)
        term = random_derivation(rng, grammar, "Start", depth=4)
        text = print_solution(term, sig)
        assert parse_solver_output(text, sig) == term
        checked += 1


def test_recursive_solution_round_trip_evaluates_identically():
    text = (
        "(define-fun-rec g ((x String) (b String) (n Int)) String"
        " (ite (<= n 0) b (str.++ x (g x b (- n 1)))))\n"
        "(define-fun f ((x String)) String (g x x (- (str.len x) 1)))"
    )
    defs = parse_definitions(text)
    assert defs["g"].recursive and not defs["f"].recursive
    for s in ("synth", "prog", "program"):
        assert evaluate(app("f", lit(s)), {}, defs) == s * len(s)
