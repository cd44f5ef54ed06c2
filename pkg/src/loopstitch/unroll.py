"""Detection of unrolled loops in solution ASTs.

A solution contains an unrolled loop when some one-hole context repeats
consecutively down a spine: the subtree at a position p, with its subtree
at a relative path q cut out, reappears at p+q, p+q+q, and so on. The
decomposition splits the term into a skeleton H (everything above p), the
repeated context C, the base B left at the bottom, and the repetition
count R, such that the term equals H[C^R[B]].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import (
    App,
    HOLE,
    Hole,
    Term,
    ast_size,
    compose,
    positions,
    print_term,
    replace_at,
    subterm_at,
)

MIN_REPS = 2  # a single context application is not evidence of a loop


@dataclass(frozen=True)
class Decomposition:
    skeleton: object  # Term with exactly one Hole
    context: object  # Term with exactly one Hole, never a bare Hole
    base: object  # Hole-free Term
    reps: int
    source: int = 0  # index of the originating example

    def recompose(self):
        return compose(self.skeleton, self.context, self.base, self.reps)


@dataclass(frozen=True)
class CategoryKey:
    skeleton_text: str
    context_text: str
    base_text: str
    skeleton: object = field(compare=False, repr=False, default=None)
    context: object = field(compare=False, repr=False, default=None)
    base: object = field(compare=False, repr=False, default=None)


def category_key(d: Decomposition) -> CategoryKey:
    """Canonical (skeleton, context, base) key; repetition count excluded."""
    return CategoryKey(
        print_term(d.skeleton),
        print_term(d.context),
        print_term(d.base),
        d.skeleton,
        d.context,
        d.base,
    )


def _equal_except_at(a, b, skip: tuple) -> bool:
    """Structural equality of two terms ignoring the subtree at ``skip``."""
    if skip == ():
        return True
    if not (isinstance(a, App) and isinstance(b, App)):
        return False
    if a.op != b.op or len(a.args) != len(b.args):
        return False
    i = skip[0]
    for j, (x, y) in enumerate(zip(a.args, b.args)):
        if j == i:
            if not _equal_except_at(x, y, skip[1:]):
                return False
        elif x != y:
            return False
    return True


def _has_path(t, path: tuple) -> bool:
    for i in path:
        if not isinstance(t, App) or i >= len(t.args):
            return False
        t = t.args[i]
    return True


def decompose(term, source: int = 0) -> Decomposition | None:
    """Find the best repeated-context decomposition of a normalized term.

    Considers every position p and every proper sub-position q below it;
    the context is the subtree at p with the subtree at q replaced by a
    hole, and the repetition count is the number of consecutive times
    that context applies walking down the q-spine. Returns the
    decomposition maximizing (reps, smallest context size, leftmost p in
    preorder, leftmost q), or None when no context repeats at least
    MIN_REPS times.
    """
    best = None  # (reps, context_size, p_index, q_index, p_path, rel_path)
    for p_index, (p_path, sub) in enumerate(positions(term)):
        if not isinstance(sub, App):
            continue
        for q_index, (rel, _) in enumerate(positions(sub)):
            if rel == ():
                continue
            reps = 0
            cur = sub
            while True:
                nxt = subterm_at(cur, rel)
                if not _equal_except_at(cur, sub, rel):
                    break
                reps += 1
                cur = nxt
                if not _has_path(cur, rel):
                    break
            if reps < MIN_REPS:
                continue
            context_size = ast_size(sub) - ast_size(subterm_at(sub, rel)) + 1
            rank = (-reps, context_size, p_index, q_index)
            if best is None or rank < best[0]:
                best = (rank, p_path, rel, reps)
    if best is None:
        return None
    _, p_path, rel, reps = best
    sub = subterm_at(term, p_path)
    context = replace_at(sub, rel, HOLE)
    base = sub
    for _ in range(reps):
        base = subterm_at(base, rel)
    skeleton = replace_at(term, p_path, HOLE)
    return Decomposition(skeleton, context, base, reps, source)


@dataclass
class Category:
    key: CategoryKey
    members: list = field(default_factory=list)  # (example index, reps)
    state: str = "fresh"  # fresh | loop-synthesized | exhausted


class CategoryRegistry:
    """Groups solved examples whose decompositions share a key."""

    def __init__(self):
        self.categories: dict = {}

    def __len__(self):
        return len(self.categories)

    def __iter__(self):
        return iter(self.categories.values())

    def admit(self, d: Decomposition):
        """Add a decomposition; returns (category, grew).

        grew is False only when the exact (example, reps) member is
        already present. A category that grows sheds any exhausted mark
        so loop-count synthesis can be retried with the new member.
        """
        key = category_key(d)
        cat = self.categories.get(key)
        if cat is None:
            cat = Category(key, [(d.source, d.reps)])
            self.categories[key] = cat
            return cat, True
        for i, (idx, reps) in enumerate(cat.members):
            if idx == d.source:
                if reps == d.reps:
                    return cat, False
                cat.members[i] = (d.source, d.reps)
                if cat.state == "exhausted":
                    cat.state = "fresh"
                return cat, True
        cat.members.append((d.source, d.reps))
        if cat.state == "exhausted":
            cat.state = "fresh"
        return cat, True
