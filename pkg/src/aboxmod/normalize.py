"""TBox normalization into NNF, simple-form GCIs.

Every GCI ends up with both sides in negation normal form, existentials
written as ``min(1, R, C)``, no disjunction at the top of a left-hand side and
no quantifier nested under another quantifier. Nested fillers are replaced by
fresh ``_N<k>`` names defined through a pair of GCIs.

Value and at-most restrictions on a right-hand side also get a *companion*:
the equivalent left-hand ``min`` form, e.g. ``C1 ⊑ all(inv(R), C2)`` gives
``min(1, R, C1) ⊑ C2``. Companions are bookkeeping for the trigger index and
are not part of the reasoning TBox.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .model import (
    BOTTOM,
    FRESH_PREFIX,
    TOP,
    All,
    And,
    Atomic,
    Bottom,
    Concept,
    Max,
    Min,
    Or,
    RESTRICTIONS,
    SubClassOf,
    SubRoleOf,
    Top,
    Transitive,
    concept_names,
    conj,
    disj,
    disjuncts,
    negate,
    nnf,
    quantifier_depth,
)


@dataclass(frozen=True)
class NormalizedTBox:
    gcis: tuple  # SubClassOf, NNF and simple form
    origins: tuple  # source axiom index per GCI
    subroles: tuple  # SubRoleOf
    transitive: tuple  # role names
    companions: tuple = ()  # SubClassOf with a single min on the left
    companion_origins: tuple = ()
    definitions: dict = field(default_factory=dict)  # fresh name -> filler

    def __iter__(self):
        yield from self.subroles
        yield from (Transitive(r) for r in self.transitive)
        yield from self.gcis

    def axioms(self) -> list:
        return list(self)


def simplify(c: Concept) -> Concept:
    """Absorb top/bottom inside conjunctions and disjunctions."""
    if isinstance(c, And):
        left, right = simplify(c.left), simplify(c.right)
        if isinstance(left, Bottom) or isinstance(right, Bottom):
            return BOTTOM
        if isinstance(left, Top):
            return right
        if isinstance(right, Top) or left == right:
            return left
        return And(left, right)
    if isinstance(c, Or):
        left, right = simplify(c.left), simplify(c.right)
        if isinstance(left, Top) or isinstance(right, Top):
            return TOP
        if isinstance(left, Bottom):
            return right
        if isinstance(right, Bottom) or left == right:
            return left
        return Or(left, right)
    if isinstance(c, RESTRICTIONS):
        return type(c)(*_restriction_args(c, simplify(c.filler)))
    return c


def _restriction_args(c, filler):
    if isinstance(c, (Min, Max)):
        return (c.n, c.role, filler)
    return (c.role, filler)


class _Normalizer:
    def __init__(self, start: int):
        self.counter = start
        self.names: dict = {}
        self.definitions: dict = {}
        self.gcis: list = []
        self.origins: list = []
        self.pending: deque = deque()

    def fresh(self, filler: Concept, origin: int) -> Atomic:
        if filler not in self.names:
            name = f"{FRESH_PREFIX}{self.counter}"
            self.counter += 1
            self.names[filler] = name
            self.definitions[name] = filler
            self.pending.append((Atomic(name), filler, origin))
            self.pending.append((filler, Atomic(name), origin))
        return Atomic(self.names[filler])

    def lift(self, c: Concept, origin: int) -> Concept:
        if isinstance(c, (And, Or)):
            return type(c)(self.lift(c.left, origin), self.lift(c.right, origin))
        if isinstance(c, RESTRICTIONS) and quantifier_depth(c.filler) >= 1:
            return type(c)(*_restriction_args(c, self.fresh(c.filler, origin)))
        return c

    def add(self, lhs: Concept, rhs: Concept, origin: int):
        lhs = self.lift(simplify(nnf(lhs)), origin)
        rhs = self.lift(simplify(nnf(rhs)), origin)
        if isinstance(rhs, Top):
            return
        for part in disjuncts(lhs):
            if isinstance(part, Bottom) or part == rhs:
                continue
            self.gcis.append(SubClassOf(part, rhs))
            self.origins.append(origin)

    def run(self, items):
        for lhs, rhs, origin in items:
            self.add(lhs, rhs, origin)
            while self.pending:
                self.add(*self.pending.popleft())


def companions_of(gci: SubClassOf) -> list[SubClassOf]:
    """Left-hand ``min`` forms equivalent to the right-hand value and
    at-most restrictions of ``gci``."""
    out = []

    def walk(c: Concept, ctx: Concept):
        if isinstance(c, And):
            walk(c.left, ctx)
            walk(c.right, ctx)
        elif isinstance(c, Or):
            parts = disjuncts(c)
            for i, d in enumerate(parts):
                rest = disj(parts[:i] + parts[i + 1:])
                walk(d, simplify(conj([ctx, negate(rest)])))
        elif isinstance(c, All):
            out.append(SubClassOf(Min(1, c.role.inv(), ctx), c.filler))
        elif isinstance(c, Max):
            out.append(SubClassOf(Min(c.n + 1, c.role, c.filler), negate(ctx)))

    walk(gci.rhs, gci.lhs)
    return out


def normalize(tbox) -> NormalizedTBox:
    """Normalize a TBox (a list of axioms or an already normalized TBox)."""
    axioms = list(tbox)
    used = [
        int(m.group(1))
        for ax in axioms
        if isinstance(ax, SubClassOf)
        for side in (ax.lhs, ax.rhs)
        for name in concept_names(side)
        if (m := re.fullmatch(re.escape(FRESH_PREFIX) + r"(\d+)", name))
    ]
    norm = _Normalizer(max(used, default=-1) + 1)
    subroles, transitive = [], []
    items = []
    for idx, ax in enumerate(axioms):
        if isinstance(ax, SubClassOf):
            items.append((ax.lhs, ax.rhs, idx))
        elif isinstance(ax, SubRoleOf):
            subroles.append(ax)
        elif isinstance(ax, Transitive):
            if ax.role not in transitive:
                transitive.append(ax.role)
        else:
            raise TypeError(f"not an axiom: {ax!r}")
    norm.run(items)
    comps, comp_origins = [], []
    for gci, origin in zip(norm.gcis, norm.origins):
        for c in companions_of(gci):
            comps.append(c)
            comp_origins.append(origin)
    return NormalizedTBox(
        gcis=tuple(norm.gcis),
        origins=tuple(norm.origins),
        subroles=tuple(subroles),
        transitive=tuple(transitive),
        companions=tuple(comps),
        companion_origins=tuple(comp_origins),
        definitions=dict(norm.definitions),
    )


def as_normalized(tbox) -> NormalizedTBox:
    return tbox if isinstance(tbox, NormalizedTBox) else normalize(tbox)


__all__ = ["NormalizedTBox", "normalize", "as_normalized", "companions_of", "simplify"]
