"""Term AST over the strings + linear integer arithmetic theory.

Terms are immutable and hashable. A ``Hole`` is a placeholder node used
only inside one-hole contexts and skeletons; it never appears in a
solution handed to evaluation or verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

STRING = "String"
INT = "Int"
BOOL = "Bool"

Value = "str | int | bool"
Path = tuple  # child-index path from the root; () is the root itself


def sort_of_value(v) -> str:
    if isinstance(v, bool):  # must precede int: bool subclasses int
        return BOOL
    if isinstance(v, int):
        return INT
    if isinstance(v, str):
        return STRING
    raise TypeError(f"not a theory value: {v!r}")


def values_equal(a, b) -> bool:
    """Sort-aware equality (1 and true are different values)."""
    return sort_of_value(a) == sort_of_value(b) and a == b


@dataclass(frozen=True)
class Lit:
    value: "str | int | bool"
    sort: str

    def __repr__(self) -> str:
        return f"Lit({self.value!r})"


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class App:
    op: str
    args: tuple

    def __repr__(self) -> str:
        return f"App({self.op!r}, {list(self.args)!r})"


@dataclass(frozen=True)
class Hole:
    def __repr__(self) -> str:
        return "Hole"


HOLE = Hole()

Term = "Lit | Var | App | Hole"


def lit(value) -> Lit:
    return Lit(value, sort_of_value(value))


def var(name: str) -> Var:
    return Var(name)


def app(op: str, *args) -> App:
    return App(op, tuple(args))


def ast_size(t) -> int:
    """Node count; every Lit, Var, App and Hole node counts as one."""
    if isinstance(t, App):
        return 1 + sum(ast_size(a) for a in t.args)
    return 1


def contains_hole(t) -> bool:
    if isinstance(t, Hole):
        return True
    if isinstance(t, App):
        return any(contains_hole(a) for a in t.args)
    return False


def hole_count(t) -> int:
    if isinstance(t, Hole):
        return 1
    if isinstance(t, App):
        return sum(hole_count(a) for a in t.args)
    return 0


def subterm_at(t, path: Path):
    for i in path:
        if not isinstance(t, App) or i >= len(t.args):
            raise KeyError(f"no subterm at path {path}")
        t = t.args[i]
    return t


def replace_at(t, path: Path, replacement):
    if not path:
        return replacement
    if not isinstance(t, App):
        raise KeyError(f"no subterm at path {path}")
    i = path[0]
    new_args = list(t.args)
    new_args[i] = replace_at(t.args[i], path[1:], replacement)
    return App(t.op, tuple(new_args))


def positions(t) -> list:
    """All (path, subterm) pairs in preorder."""
    out = []

    def walk(node, path):
        out.append((path, node))
        if isinstance(node, App):
            for i, a in enumerate(node.args):
                walk(a, path + (i,))

    walk(t, ())
    return out


class HoleCountError(ValueError):
    pass


def hole_path(context) -> Path:
    """Path to the unique Hole of a one-hole context."""
    found = [p for p, s in positions(context) if isinstance(s, Hole)]
    if len(found) != 1:
        raise HoleCountError(f"context has {len(found)} holes, expected exactly 1")
    return found[0]


def apply_context(context, filler):
    """Plug ``filler`` into the unique Hole of ``context``."""
    return replace_at(context, hole_path(context), filler)


def compose(skeleton, context, base, reps: int):
    """Build skeleton[context^reps[base]]."""
    body = base
    for _ in range(reps):
        body = apply_context(context, body)
    return apply_context(skeleton, body)


def free_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        out = set()
        for a in t.args:
            out |= free_vars(a)
        return out
    return set()


def substitute(t, mapping: dict):
    """Replace free variables by terms."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(t.op, tuple(substitute(a, mapping) for a in t.args))
    return t


# Operators whose nested applications are flattened and re-associated to
# the right by normalize(). '-' is not associative and stays untouched.
ASSOCIATIVE_OPS = ("str.++", "+", "and", "or")


def normalize(t):
    """Canonical form: associative chains re-associated rightward.

    No commutative reordering and no constant folding, so the result is
    semantics-preserving node-for-node; idempotent by construction.
    """
    if not isinstance(t, App):
        return t
    args = [normalize(a) for a in t.args]
    if t.op in ASSOCIATIVE_OPS:
        flat = []

        def collect(node):
            if isinstance(node, App) and node.op == t.op:
                for child in node.args:
                    collect(child)
            else:
                flat.append(node)

        for a in args:
            collect(a)
        return reduce(lambda right, left: App(t.op, (left, right)), reversed(flat))
    return App(t.op, tuple(args))


def print_term(t) -> str:
    """Render a term as SMT-LIB text. Holes print as '?'."""
    if isinstance(t, Hole):
        return "?"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        if t.sort == BOOL:
            return "true" if t.value else "false"
        if t.sort == INT:
            return str(t.value) if t.value >= 0 else f"(- {-t.value})"
        return '"' + t.value.replace('"', '""') + '"'
    parts = " ".join(print_term(a) for a in t.args)
    return f"({t.op} {parts})" if t.args else f"({t.op})"
