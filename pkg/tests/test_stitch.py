from pathlib import Path

import pytest

from loopstitch import (
    HOLE,
    INT,
    STRING,
    FunctionSignature,
    app,
    evaluate,
    lit,
    parse_problem,
    print_solution,
    solution_size,
    var,
)
from loopstitch.semantics import SortError
from loopstitch.stitch import (
    build_recursive_solution,
    unroll_equivalence_check,
    verify,
)
from loopstitch.sygus import Grammar, SygusProblem, parse_definitions
from loopstitch.unroll import CategoryKey, category_key, decompose

BENCH = Path(__file__).parent.parent / "benchmarks"

X = var("x")


def motivating_problem():
    return parse_problem((BENCH / "1.sl").read_text())


def chain(n):
    t = X
    for _ in range(n - 1):
        t = app("str.++", X, t)
    return t


def motivating_key():
    return category_key(decompose(chain(5)))


def length_minus_one():
    return app("-", app("str.len", X), lit(1))


def test_build_matches_published_shape():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), length_minus_one(), problem)
    text = print_solution(sol)
    assert text == (
        "(define-fun-rec g ((x String) (b String) (n Int)) String "
        "(ite (<= n 0) b (str.++ x (g x b (- n 1)))))\n"
        "(define-fun f ((x String)) String (g x x (- (str.len x) 1)))"
    )
    assert solution_size(sol) == 22
    # printed text round-trips into definitions that evaluate correctly
    defs = parse_definitions(text)
    for ex in problem.examples:
        assert evaluate(app("f", lit(ex.inputs[0])), {}, defs) == ex.output


def test_zero_count_returns_base_value():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), lit(0), problem)
    assert evaluate(app("f", lit("q")), {}, sol.defs()) == "q"


def test_count_one_single_unrolling():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), lit(1), problem)
    assert evaluate(app("f", lit("ab")), {}, sol.defs()) == "abab"


def test_negative_count_safe():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), lit(-3), problem)
    assert evaluate(app("f", lit("ab")), {}, sol.defs()) == "ab"


def test_sort_mismatch_rejected():
    problem = motivating_problem()
    key = category_key(decompose(app("+", lit(1), app("+", lit(1), lit(2)))))
    # Int-sorted base/context under a String-returning target
    with pytest.raises(SortError):
        build_recursive_solution(key, length_minus_one(), problem)
    with pytest.raises(SortError):
        build_recursive_solution(motivating_key(), lit("four"), problem)


def test_helper_names_avoid_collisions():
    grammar = Grammar((("S", STRING),), "S", {"S": (var("g"),)})
    target = FunctionSignature("f", (("g", STRING), ("b", STRING), ("n", INT)), STRING)
    problem = SygusProblem("SLIA", target, grammar, ())
    ctx = app("str.++", var("g"), HOLE)
    key = CategoryKey("?", "(str.++ g ?)", "g", HOLE, ctx, var("g"))
    sol = build_recursive_solution(key, app("str.len", var("g")), problem)
    names = {sol.wrapper.name, sol.helper.name}
    assert len(names) == 2
    helper_params = [p for p, _ in sol.helper.params]
    assert len(set(helper_params)) == len(helper_params)
    value = evaluate(app("f", lit("ab"), lit("zz"), lit(7)), {}, sol.defs())
    assert value == "ab" * 3  # h = len("ab") = 2 applications around the base


def test_verify_motivating_solution_passes():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), length_minus_one(), problem)
    report = verify(sol, problem)
    assert report.ok
    assert [c.ok for c in report.checks] == [True, True, True]
    assert report.max_fuel_used == 8  # f plus g at n = 6..0 on "program"


def test_verify_constant_count_mis_stitch_fails_on_prog():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), lit(4), problem)
    report = verify(sol, problem)
    assert not report.ok
    by_index = {c.index: c for c in report.checks}
    assert by_index[0].ok  # "synth" really repeats 5 times
    assert not by_index[1].ok  # "prog" gets 5 copies, expected 4
    assert by_index[1].produced == "prog" * 5


def test_verify_zero_examples_vacuous():
    problem = motivating_problem()
    empty = SygusProblem(problem.logic, problem.target, problem.grammar, ())
    sol = build_recursive_solution(motivating_key(), length_minus_one(), empty)
    report = verify(sol, empty)
    assert report.ok and report.checks == []


def test_verify_fuel_exhaustion_is_a_failed_example():
    problem = motivating_problem()
    sol = build_recursive_solution(motivating_key(), length_minus_one(), problem)
    report = verify(sol, problem, fuel=3)
    assert not report.ok
    assert any(c.error and "FuelExhausted" in c.error for c in report.checks)


def test_unroll_equivalence_check():
    problem = motivating_problem()
    key = motivating_key()
    sol = build_recursive_solution(key, length_minus_one(), problem)
    assert unroll_equivalence_check(sol, key, ("synth",), 4, problem)
    assert not unroll_equivalence_check(sol, key, ("synth",), 7, problem)  # corrupted count
    assert unroll_equivalence_check(sol, key, ("prog",), 3, problem)


def test_solution_size_independent_of_member_counts():
    problem = motivating_problem()
    h = length_minus_one()
    sizes = set()
    for copies in (3, 5, 9):
        key = category_key(decompose(chain(copies)))
        sizes.add(solution_size(build_recursive_solution(key, h, problem)))
    assert len(sizes) == 1


def test_unrolling_soundness_property():
    from properties import run_unrolling_soundness

    run_unrolling_soundness(cases=60, seed=9090)
