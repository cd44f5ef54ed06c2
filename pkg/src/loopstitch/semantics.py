"""Evaluation semantics for the strings + linear integer arithmetic subset.

String operators follow SMT-LIB 2.6: out-of-range ``str.at``/``str.substr``
yield "", ``str.indexof`` misses yield -1, ``str.replace`` rewrites the
first occurrence only (prepends when the pattern is empty). Recursive
defined functions are evaluated under a fuel budget so divergence turns
into a detectable failure instead of a hang.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    App,
    BOOL,
    Hole,
    INT,
    Lit,
    STRING,
    Var,
    values_equal,
)

DEFAULT_FUEL = 100_000


class EvalError(Exception):
    pass


class FuelExhausted(EvalError):
    pass


class UnboundVariable(EvalError):
    pass


class SortError(EvalError):
    pass


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple  # ((name, sort), ...)
    return_sort: str
    body: object
    recursive: bool = False


# Defs: name -> FunctionDef
Defs = dict


def _substr(s: str, start: int, length: int) -> str:
    if start < 0 or start >= len(s) or length <= 0:
        return ""
    return s[start : start + length]


def _at(s: str, i: int) -> str:
    return s[i] if 0 <= i < len(s) else ""


def _indexof(s: str, t: str, i: int) -> int:
    if i < 0 or i > len(s):
        return -1
    return s.find(t, i)


def _replace(s: str, t: str, u: str) -> str:
    if t == "":
        return u + s
    return s.replace(t, u, 1)


# op -> (argument sorts, result sort, implementation). 'ite' and '='
# are polymorphic and handled separately.
OPERATORS = {
    "str.++": ((STRING, STRING), STRING, lambda a, b: a + b),
    "str.len": ((STRING,), INT, len),
    "str.at": ((STRING, INT), STRING, _at),
    "str.substr": ((STRING, INT, INT), STRING, _substr),
    "str.indexof": ((STRING, STRING, INT), INT, _indexof),
    "str.replace": ((STRING, STRING, STRING), STRING, _replace),
    "str.contains": ((STRING, STRING), BOOL, lambda s, t: t in s),
    "str.prefixof": ((STRING, STRING), BOOL, lambda s, t: t.startswith(s)),
    "+": ((INT, INT), INT, lambda a, b: a + b),
    "-": ((INT, INT), INT, lambda a, b: a - b),
    "*": ((INT, INT), INT, lambda a, b: a * b),
    "<=": ((INT, INT), BOOL, lambda a, b: a <= b),
    "<": ((INT, INT), BOOL, lambda a, b: a < b),
    ">=": ((INT, INT), BOOL, lambda a, b: a >= b),
    ">": ((INT, INT), BOOL, lambda a, b: a > b),
    "not": ((BOOL,), BOOL, lambda a: not a),
    "and": ((BOOL, BOOL), BOOL, lambda a, b: a and b),
    "or": ((BOOL, BOOL), BOOL, lambda a, b: a or b),
}

POLYMORPHIC_OPS = ("ite", "=")


def is_operator(op: str) -> bool:
    return op in OPERATORS or op in POLYMORPHIC_OPS


class FuelCounter:
    """Mutable budget of defined-function applications."""

    def __init__(self, limit: int = DEFAULT_FUEL):
        if limit <= 0:
            raise ValueError("fuel must be positive")
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise FuelExhausted(f"fuel limit of {self.limit} function applications exceeded")


def evaluate(term, env: dict, defs: Defs | None = None, fuel=DEFAULT_FUEL):
    """Evaluate a Hole-free term under ``env``.

    ``fuel`` may be an int or a FuelCounter (pass a counter to observe
    consumption). Each application of a defined function costs one unit;
    primitive operators are free.
    """
    counter = fuel if isinstance(fuel, FuelCounter) else FuelCounter(fuel)
    if not defs:
        return _eval_plain(term, env)
    return _eval_defs(term, env, defs, counter)


def _eval_plain(term, env):
    # Fast recursive path for definition-free terms; depth is bounded by
    # the term itself, which enumeration keeps small.
    if isinstance(term, Lit):
        return term.value
    if isinstance(term, Var):
        if term.name not in env:
            raise UnboundVariable(term.name)
        return env[term.name]
    if isinstance(term, Hole):
        raise EvalError("cannot evaluate a term containing a Hole")
    op = term.op
    if op == "ite":
        cond = _eval_plain(term.args[0], env)
        return _eval_plain(term.args[1] if cond else term.args[2], env)
    if op == "=":
        return values_equal(_eval_plain(term.args[0], env), _eval_plain(term.args[1], env))
    if op in OPERATORS:
        _, _, fn = OPERATORS[op]
        return fn(*(_eval_plain(a, env) for a in term.args))
    raise EvalError(f"unknown operator or function: {op}")


_EVAL, _ITE, _APPLY, _CALL = range(4)


def _eval_defs(term, env, defs, counter):
    # Explicit-stack machine so recursion depth is limited by fuel (which
    # may be large) rather than by the Python call stack.
    todo = [(_EVAL, term, env)]
    values = []
    while todo:
        kind, a, b = todo.pop()
        if kind == _EVAL:
            node, env = a, b
            if isinstance(node, Lit):
                values.append(node.value)
            elif isinstance(node, Var):
                if node.name not in env:
                    raise UnboundVariable(node.name)
                values.append(env[node.name])
            elif isinstance(node, Hole):
                raise EvalError("cannot evaluate a term containing a Hole")
            else:
                op = node.op
                if op == "ite":
                    todo.append((_ITE, node.args[1:], env))
                    todo.append((_EVAL, node.args[0], env))
                elif op in OPERATORS or op == "=":
                    todo.append((_APPLY, op, len(node.args)))
                    for arg in reversed(node.args):
                        todo.append((_EVAL, arg, env))
                elif op in defs:
                    fdef = defs[op]
                    if len(node.args) != len(fdef.params):
                        raise SortError(
                            f"{op} expects {len(fdef.params)} arguments, got {len(node.args)}"
                        )
                    todo.append((_CALL, fdef, None))
                    for arg in reversed(node.args):
                        todo.append((_EVAL, arg, env))
                else:
                    raise EvalError(f"unknown operator or function: {op}")
        elif kind == _ITE:
            branches, env = a, b
            cond = values.pop()
            todo.append((_EVAL, branches[0] if cond else branches[1], env))
        elif kind == _APPLY:
            op, arity = a, b
            args = values[-arity:]
            del values[-arity:]
            if op == "=":
                values.append(values_equal(args[0], args[1]))
            else:
                _, _, fn = OPERATORS[op]
                values.append(fn(*args))
        else:  # _CALL
            fdef = a
            arity = len(fdef.params)
            args = values[-arity:]
            del values[-arity:]
            counter.spend()
            call_env = {name: v for (name, _), v in zip(fdef.params, args)}
            todo.append((_EVAL, fdef.body, call_env))
    assert len(values) == 1
    return values[0]


def infer_sort(term, var_sorts: dict, defs: Defs | None = None):
    """Infer the sort of a term, raising SortError on any mismatch.

    Holes have unknown sort and unify with anything (returned as None
    when the whole term is a bare Hole).
    """
    defs = defs or {}

    def go(t):
        if isinstance(t, Hole):
            return None
        if isinstance(t, Lit):
            return t.sort
        if isinstance(t, Var):
            if t.name not in var_sorts:
                raise SortError(f"unknown variable {t.name}")
            return var_sorts[t.name]
        op = t.op
        if op == "ite":
            if len(t.args) != 3:
                raise SortError("ite expects 3 arguments")
            c = go(t.args[0])
            if c not in (None, BOOL):
                raise SortError(f"ite condition has sort {c}, expected Bool")
            a, b = go(t.args[1]), go(t.args[2])
            if a is not None and b is not None and a != b:
                raise SortError(f"ite branches disagree: {a} vs {b}")
            return a if a is not None else b
        if op == "=":
            if len(t.args) != 2:
                raise SortError("= expects 2 arguments")
            a, b = go(t.args[0]), go(t.args[1])
            if a is not None and b is not None and a != b:
                raise SortError(f"= compares {a} with {b}")
            return BOOL
        if op in OPERATORS:
            arg_sorts, result, _ = OPERATORS[op]
            if len(t.args) != len(arg_sorts):
                raise SortError(f"{op} expects {len(arg_sorts)} arguments, got {len(t.args)}")
            for expected, arg in zip(arg_sorts, t.args):
                got = go(arg)
                if got is not None and got != expected:
                    raise SortError(f"{op} argument has sort {got}, expected {expected}")
            return result
        if op in defs:
            fdef = defs[op]
            if len(t.args) != len(fdef.params):
                raise SortError(f"{op} expects {len(fdef.params)} arguments, got {len(t.args)}")
            for (_, expected), arg in zip(fdef.params, t.args):
                got = go(arg)
                if got is not None and got != expected:
                    raise SortError(f"{op} argument has sort {got}, expected {expected}")
            return fdef.return_sort
        raise SortError(f"unknown operator or function: {op}")

    return go(term)


def validate_defs(defs: Defs):
    """Reject mutual recursion and self-reference without the recursive flag."""
    for name, fdef in defs.items():
        called = _called_functions(fdef.body, defs)
        if name in called and not fdef.recursive:
            raise SortError(f"{name} references itself but is not marked recursive")
        for other in called - {name}:
            if name in _called_functions(defs[other].body, defs):
                raise SortError(f"mutual recursion between {name} and {other} is not supported")


def _called_functions(term, defs) -> set:
    if isinstance(term, App):
        out = set()
        if term.op in defs:
            out.add(term.op)
        for a in term.args:
            out |= _called_functions(a, defs)
        return out
    return set()
