"""SyGuS v2 front end: parse the supported subset, print solutions back.

Supported input: ``set-logic`` (SLIA or S), exactly one ``synth-fun`` with
an inline grammar, ``declare-var``, programming-by-example ``constraint``
forms (an equality between the target applied to literal arguments and a
literal output), and ``check-synth``. Anything else is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sexpr import Symbol, parse_all, to_text
from .semantics import FunctionDef, infer_sort, is_operator, validate_defs
from .terms import (
    App,
    BOOL,
    INT,
    Lit,
    STRING,
    Term,
    Var,
    lit,
    print_term,
    substitute,
)

SUPPORTED_LOGICS = ("SLIA", "S")
SUPPORTED_SORTS = (STRING, INT, BOOL)

# Accepted with more than two arguments and desugared to right-nested
# binary applications, mirroring normalize().
CHAINABLE_OPS = ("str.++", "+", "and", "or")


class SygusError(Exception):
    pass


class SygusFormatError(SygusError):
    pass


class NonPbeConstraint(SygusError):
    pass


class UnsupportedConstruct(SygusError):
    pass


class InfeasibleOutput(SygusError):
    """The external solver reported unsat/infeasible instead of a solution."""


@dataclass(frozen=True)
class FunctionSignature:
    name: str
    params: tuple  # ((name, sort), ...)
    return_sort: str

    @property
    def param_names(self):
        return tuple(name for name, _ in self.params)

    @property
    def param_sorts(self):
        return tuple(sort for _, sort in self.params)


@dataclass(frozen=True)
class ConstraintExample:
    inputs: tuple
    output: object


@dataclass
class Grammar:
    nonterminals: tuple  # ((symbol, sort), ...) in declaration order
    start: str
    productions: dict  # symbol -> tuple of production Terms

    def sort_of(self, nt: str) -> str:
        for name, sort in self.nonterminals:
            if name == nt:
                return sort
        raise KeyError(nt)

    def is_nonterminal(self, name: str) -> bool:
        return any(name == n for n, _ in self.nonterminals)

    @property
    def start_sort(self) -> str:
        return self.sort_of(self.start)


@dataclass
class SygusProblem:
    logic: str
    target: FunctionSignature
    grammar: Grammar
    examples: tuple  # ConstraintExample, in file order
    declared_vars: tuple = ()

    def env_for(self, example: ConstraintExample) -> dict:
        return dict(zip(self.target.param_names, example.inputs))


def _expect_symbol(sx, what: str) -> str:
    if not isinstance(sx, Symbol):
        raise SygusFormatError(f"expected {what}, got {to_text(sx)}")
    return sx.text


def _parse_sort(sx) -> str:
    name = _expect_symbol(sx, "a sort")
    if name not in SUPPORTED_SORTS:
        raise UnsupportedConstruct(f"unsupported sort: {name}")
    return name


def _parse_literal(sx):
    """Return a Lit for a literal s-expression, or None if it is not one."""
    if isinstance(sx, bool):
        return lit(sx)
    if isinstance(sx, int):
        return lit(sx)
    if isinstance(sx, str):
        return lit(sx)
    if isinstance(sx, Symbol):
        if sx.text == "true":
            return lit(True)
        if sx.text == "false":
            return lit(False)
        return None
    if (
        isinstance(sx, list)
        and len(sx) == 2
        and isinstance(sx[0], Symbol)
        and sx[0].text == "-"
        and isinstance(sx[1], int)
    ):
        return lit(-sx[1])
    return None


def term_from_sexpr(sx, var_sorts: dict, functions: dict | None = None) -> Term:
    """Parse an s-expression into a Term.

    ``var_sorts`` names the variables in scope (parameters and, for
    grammar productions, nonterminal symbols). ``functions`` names
    defined functions that may be applied.
    """
    functions = functions or {}
    literal = _parse_literal(sx)
    if literal is not None and not (isinstance(sx, Symbol) and sx.text in var_sorts):
        return literal
    if isinstance(sx, Symbol):
        if sx.text in var_sorts:
            return Var(sx.text)
        raise SygusFormatError(f"unknown symbol: {sx.text}")
    if not isinstance(sx, list) or not sx or not isinstance(sx[0], Symbol):
        raise SygusFormatError(f"cannot parse term: {to_text(sx)}")
    op = sx[0].text
    args = [term_from_sexpr(a, var_sorts, functions) for a in sx[1:]]
    if op in CHAINABLE_OPS and len(args) > 2:
        result = args[-1]
        for a in reversed(args[:-1]):
            result = App(op, (a, result))
        return result
    if is_operator(op) or op in functions:
        return App(op, tuple(args))
    raise UnsupportedConstruct(f"unsupported operator: {op}")


def _parse_signature(sx_params, sx_ret, name: str) -> FunctionSignature:
    params = []
    for p in sx_params:
        if not isinstance(p, list) or len(p) != 2:
            raise SygusFormatError(f"malformed parameter declaration in {name}")
        params.append((_expect_symbol(p[0], "a parameter name"), _parse_sort(p[1])))
    return FunctionSignature(name, tuple(params), _parse_sort(sx_ret))


def _check_linear_multiplication(term):
    if isinstance(term, App):
        if term.op == "*" and not any(isinstance(a, Lit) for a in term.args):
            raise UnsupportedConstruct("multiplication in a grammar must have a literal operand")
        for a in term.args:
            _check_linear_multiplication(a)


def _parse_grammar(sx_decls, sx_rules, signature: FunctionSignature) -> Grammar:
    decls = []
    for d in sx_decls:
        if not isinstance(d, list) or len(d) != 2:
            raise SygusFormatError("malformed nonterminal declaration")
        decls.append((_expect_symbol(d[0], "a nonterminal"), _parse_sort(d[1])))
    if not decls:
        raise SygusFormatError("grammar declares no nonterminals")

    scope = dict(signature.params)
    for nt, sort in decls:
        scope[nt] = sort

    productions = {}
    for rule in sx_rules:
        if not isinstance(rule, list) or len(rule) != 3 or not isinstance(rule[2], list):
            raise SygusFormatError("malformed grammar rule group")
        nt = _expect_symbol(rule[0], "a nonterminal")
        sort = _parse_sort(rule[1])
        if (nt, sort) not in decls:
            raise SygusFormatError(f"grammar rule for undeclared nonterminal {nt}")
        prods = []
        for p in rule[2]:
            term = term_from_sexpr(p, scope)
            got = infer_sort(term, scope)
            if got != sort:
                raise SygusFormatError(
                    f"production {print_term(term)} for {nt} has sort {got}, expected {sort}"
                )
            _check_linear_multiplication(term)
            prods.append(term)
        productions[nt] = tuple(prods)
    for nt, _ in decls:
        if nt not in productions:
            raise SygusFormatError(f"nonterminal {nt} has no rule group")

    grammar = Grammar(tuple(decls), decls[0][0], productions)
    if grammar.start_sort != signature.return_sort:
        raise SygusFormatError(
            f"start symbol sort {grammar.start_sort} does not match return sort {signature.return_sort}"
        )
    return grammar


def _parse_constraint(sx, target: FunctionSignature) -> ConstraintExample:
    if not (isinstance(sx, list) and len(sx) == 3 and isinstance(sx[0], Symbol) and sx[0].text == "="):
        raise NonPbeConstraint(f"non-PBE constraint: {to_text(sx)}")

    def as_call(side):
        return (
            isinstance(side, list)
            and side
            and isinstance(side[0], Symbol)
            and side[0].text == target.name
        )

    lhs, rhs = sx[1], sx[2]
    if as_call(lhs) and not as_call(rhs):
        call, out = lhs, rhs
    elif as_call(rhs) and not as_call(lhs):
        call, out = rhs, lhs
    else:
        raise NonPbeConstraint(f"non-PBE constraint: {to_text(sx)}")

    inputs = []
    for a in call[1:]:
        v = _parse_literal(a)
        if v is None:
            raise NonPbeConstraint(f"non-PBE constraint: argument {to_text(a)} is not a literal")
        inputs.append(v)
    output = _parse_literal(out)
    if output is None:
        raise NonPbeConstraint(f"non-PBE constraint: output {to_text(out)} is not a literal")

    if len(inputs) != len(target.params):
        raise SygusFormatError(
            f"constraint applies {target.name} to {len(inputs)} arguments, expected {len(target.params)}"
        )
    for v, (pname, sort) in zip(inputs, target.params):
        if v.sort != sort:
            raise SygusFormatError(f"argument for {pname} has sort {v.sort}, expected {sort}")
    if output.sort != target.return_sort:
        raise SygusFormatError(
            f"constraint output has sort {output.sort}, expected {target.return_sort}"
        )
    return ConstraintExample(tuple(v.value for v in inputs), output.value)


def parse_problem(text: str) -> SygusProblem:
    """Parse a SyGuS file into a SygusProblem."""
    forms = parse_all(text)
    logic = None
    target = None
    grammar = None
    examples = []
    declared = []
    for form in forms:
        if not isinstance(form, list) or not form or not isinstance(form[0], Symbol):
            raise SygusFormatError(f"unexpected top-level form: {to_text(form)}")
        head = form[0].text
        if head == "set-logic":
            if len(form) != 2:
                raise SygusFormatError("malformed set-logic")
            logic = _expect_symbol(form[1], "a logic name")
            if logic not in SUPPORTED_LOGICS:
                raise UnsupportedConstruct(f"unsupported logic: {logic}")
        elif head == "synth-fun":
            if target is not None:
                raise UnsupportedConstruct("multiple synth-fun forms")
            if len(form) != 6:
                raise UnsupportedConstruct("synth-fun must carry an inline grammar")
            name = _expect_symbol(form[1], "a function name")
            if not isinstance(form[2], list):
                raise SygusFormatError("malformed synth-fun parameter list")
            target = _parse_signature(form[2], form[3], name)
            if not isinstance(form[4], list) or not isinstance(form[5], list):
                raise SygusFormatError("malformed synth-fun grammar")
            grammar = _parse_grammar(form[4], form[5], target)
        elif head == "declare-var":
            if len(form) != 3:
                raise SygusFormatError("malformed declare-var")
            declared.append((_expect_symbol(form[1], "a variable name"), _parse_sort(form[2])))
        elif head == "constraint":
            if target is None:
                raise SygusFormatError("constraint before synth-fun")
            if len(form) != 2:
                raise SygusFormatError("malformed constraint")
            examples.append(_parse_constraint(form[1], target))
        elif head == "check-synth":
            pass
        else:
            raise UnsupportedConstruct(f"unsupported top-level form: {head}")
    if target is None or grammar is None:
        raise SygusFormatError("missing synth-fun")
    return SygusProblem(logic or "SLIA", target, grammar, tuple(examples), tuple(declared))


def format_function(keyword: str, name: str, params, return_sort: str, body) -> str:
    plist = " ".join(f"({p} {s})" for p, s in params)
    return f"({keyword} {name} ({plist}) {return_sort} {print_term(body)})"


def print_solution(sol, target: FunctionSignature | None = None) -> str:
    """Emit SMT-LIB text for a stitched recursive solution or a plain Term.

    A plain Term is printed as one define-fun under ``target``'s
    signature; a recursive solution prints its helper (define-fun-rec)
    followed by its wrapper.
    """
    from .stitch import RecursiveSolution

    if isinstance(sol, RecursiveSolution):
        g, f = sol.helper, sol.wrapper
        return (
            format_function("define-fun-rec", g.name, g.params, g.return_sort, g.body)
            + "\n"
            + format_function("define-fun", f.name, f.params, f.return_sort, f.body)
        )
    if target is None:
        raise TypeError("printing a plain Term requires the target signature")
    return format_function("define-fun", target.name, target.params, target.return_sort, sol)


def print_problem(problem: SygusProblem) -> str:
    """Serialize a problem back to SyGuS text (used for external solvers)."""
    lines = [f"(set-logic {problem.logic})"]
    g = problem.grammar
    decls = " ".join(f"({nt} {sort})" for nt, sort in g.nonterminals)
    rules = " ".join(
        "({} {} ({}))".format(nt, sort, " ".join(print_term(p) for p in g.productions[nt]))
        for nt, sort in g.nonterminals
    )
    t = problem.target
    plist = " ".join(f"({p} {s})" for p, s in t.params)
    lines.append(f"(synth-fun {t.name} ({plist}) {t.return_sort} ({decls}) ({rules}))")
    for name, sort in problem.declared_vars:
        lines.append(f"(declare-var {name} {sort})")
    for ex in problem.examples:
        args = " ".join(print_term(lit(v)) for v in ex.inputs)
        call = f"({t.name} {args})" if args else f"({t.name})"
        lines.append(f"(constraint (= {call} {print_term(lit(ex.output))}))")
    lines.append("(check-synth)")
    return "\n".join(lines) + "\n"


FAILURE_TOKENS = ("infeasible", "unsat", "fail", "unknown")


def parse_solver_output(text: str, target: FunctionSignature) -> Term:
    """Parse external solver stdout into the solution body Term.

    Parameters are rebound positionally to the target signature, so the
    solver may name them however it likes. A bare failure token raises
    InfeasibleOutput.
    """
    stripped = text.strip()
    if not stripped:
        raise SygusFormatError("empty solver output")
    first_word = stripped.split(None, 1)[0].strip("()")
    if first_word in FAILURE_TOKENS:
        raise InfeasibleOutput(first_word)

    forms = parse_all(stripped)
    defs = []

    def collect(form):
        if not isinstance(form, list):
            return
        if form and isinstance(form[0], Symbol) and form[0].text in ("define-fun", "define-fun-rec"):
            defs.append(form)
            return
        for sub in form:
            collect(sub)

    for form in forms:
        collect(form)
    matching = [d for d in defs if len(d) >= 2 and isinstance(d[1], Symbol) and d[1].text == target.name]
    if len(matching) != 1:
        raise SygusFormatError(
            f"expected exactly one define-fun for {target.name}, found {len(matching)}"
        )
    form = matching[0]
    if len(form) != 5:
        raise SygusFormatError("malformed define-fun")
    sig = _parse_signature(form[2], form[3], target.name)
    if len(sig.params) != len(target.params) or sig.param_sorts != target.param_sorts:
        raise SygusFormatError("solver output signature does not match the target")
    if sig.return_sort != target.return_sort:
        raise SygusFormatError("solver output return sort does not match the target")
    body = term_from_sexpr(form[4], dict(sig.params))
    renaming = {old: Var(new) for old, new in zip(sig.param_names, target.param_names)}
    return substitute(body, renaming)


def parse_definitions(text: str) -> dict:
    """Parse a sequence of define-fun / define-fun-rec forms into Defs."""
    forms = parse_all(text)
    defs: dict = {}
    for form in forms:
        if not (isinstance(form, list) and len(form) == 5 and isinstance(form[0], Symbol)):
            raise SygusFormatError(f"expected a function definition, got {to_text(form)}")
        keyword = form[0].text
        if keyword not in ("define-fun", "define-fun-rec"):
            raise SygusFormatError(f"expected a function definition, got {keyword}")
        name = _expect_symbol(form[1], "a function name")
        sig = _parse_signature(form[2], form[3], name)
        recursive = keyword == "define-fun-rec"
        known = dict(defs)
        if recursive:
            known[name] = None  # allow self-reference while parsing the body
        body = term_from_sexpr(form[4], dict(sig.params), functions=known)
        defs[name] = FunctionDef(name, sig.params, sig.return_sort, body, recursive)
    validate_defs(defs)
    return defs
