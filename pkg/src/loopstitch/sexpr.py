"""S-expression reader/writer for SMT-LIB style text.

Atoms are represented as Python values: ``Symbol`` for identifiers and
operators, ``str`` for string literals, ``int`` for numerals. Lists are
Python lists. ``true``/``false`` stay symbols at this layer; sort-aware
interpretation happens in the SyGuS front end.
"""

from __future__ import annotations

from dataclasses import dataclass


class SexprError(Exception):
    """Lex or parse error carrying a 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Symbol:
    text: str

    def __repr__(self) -> str:
        return f"Symbol({self.text!r})"


SExpr = "Symbol | str | int | list"

_SYMBOL_EXTRA = set("~!@$%^&*_-+=<>.?/")


def _is_symbol_char(ch: str) -> bool:
    return ch.isalnum() or ch in _SYMBOL_EXTRA


def tokenize(text: str):
    """Yield (token, line, column) triples. Comments run from ';' to EOL."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch in " \t\r":
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        elif ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n:
                    raise SexprError("unterminated string literal", start_line, start_col)
                c = text[i]
                if c == '"':
                    if i + 1 < n and text[i + 1] == '"':
                        buf.append('"')
                        i += 2
                        col += 2
                        continue
                    i += 1
                    col += 1
                    break
                if c == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                buf.append(c)
                i += 1
            yield StringToken("".join(buf)), start_line, start_col
        elif _is_symbol_char(ch):
            start_line, start_col = line, col
            j = i
            while j < n and _is_symbol_char(text[j]):
                j += 1
            word = text[i:j]
            col += j - i
            i = j
            yield word, start_line, start_col
        else:
            raise SexprError(f"unexpected character {ch!r}", line, col)


@dataclass(frozen=True)
class StringToken:
    """Marks a lexed string literal so '(' / 'abc' words don't collide."""

    value: str


def _atom(word: str):
    # Numerals, including the '-5' form some solvers print.
    if word.isdigit() or (word[0] == "-" and len(word) > 1 and word[1:].isdigit()):
        return int(word)
    return Symbol(word)


def parse_all(text: str) -> list:
    """Parse a whole character stream into a list of top-level s-expressions."""
    stack: list[list] = []
    top: list = []
    opens: list[tuple[int, int]] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append(top)
            opens.append((line, col))
            top = []
        elif tok == ")":
            if not stack:
                raise SexprError("unmatched ')'", line, col)
            done = top
            top = stack.pop()
            opens.pop()
            top.append(done)
        elif isinstance(tok, StringToken):
            top.append(tok.value)
        else:
            top.append(_atom(tok))
    if stack:
        line, col = opens[-1]
        raise SexprError("unclosed '('", line, col)
    return top


def parse_one(text: str):
    forms = parse_all(text)
    if len(forms) != 1:
        raise SexprError(f"expected exactly one s-expression, got {len(forms)}", 1, 1)
    return forms[0]


def to_text(expr) -> str:
    """Render an s-expression back to SMT-LIB text."""
    if isinstance(expr, Symbol):
        return expr.text
    if isinstance(expr, bool):  # before int: bool is an int subclass
        return "true" if expr else "false"
    if isinstance(expr, int):
        return str(expr) if expr >= 0 else f"(- {-expr})"
    if isinstance(expr, str):
        return '"' + expr.replace('"', '""') + '"'
    if isinstance(expr, list):
        return "(" + " ".join(to_text(e) for e in expr) + ")"
    raise TypeError(f"not an s-expression: {expr!r}")
