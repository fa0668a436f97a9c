"""Bounded finite-model search, used as an independent check on the tableau.

A SHIQ knowledge base is encoded as a 0/1 integer program over a domain of
``d`` elements and handed to HiGHS through ``scipy.optimize.milp``. Concept
occurrences get one-directional indicator variables (``v[C, e] = 1`` forces
``e`` into ``C``), which is enough for satisfiability of NNF concepts. Role
variables are exact, so hierarchy, inverses and transitivity are encoded
directly.

A feasible program is a genuine model, so ``has_model`` is sound for
satisfiability. It is incomplete: a satisfiable KB may need more than ``d``
elements.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from aboxmod.model import (
    All,
    And,
    Atomic,
    Bottom,
    ClassAssertion,
    Concept,
    Different,
    Max,
    Min,
    Not,
    Or,
    Role,
    RoleAssertion,
    SubClassOf,
    SubRoleOf,
    Top,
    Transitive,
    negate,
    nnf,
)


class _Program:
    def __init__(self, d):
        self.d = d
        self.nvars = 0
        self.rows = []  # (coeffs dict, lo, hi)
        self.cache = {}

    def var(self, key=None):
        if key is not None and key in self.cache:
            return self.cache[key]
        v = self.nvars
        self.nvars += 1
        if key is not None:
            self.cache[key] = v
        return v

    def row(self, coeffs, lo=-np.inf, hi=np.inf):
        self.rows.append((coeffs, lo, hi))

    def le(self, terms, rhs):
        """sum(coef * var) <= rhs"""
        c = {}
        for v, k in terms:
            c[v] = c.get(v, 0) + k
        self.row(c, hi=rhs)

    def solve(self) -> bool:
        n = self.nvars
        if not self.rows:
            return True
        a = np.zeros((len(self.rows), n))
        lo = np.empty(len(self.rows))
        hi = np.empty(len(self.rows))
        for i, (c, l, h) in enumerate(self.rows):
            for v, k in c.items():
                a[i, v] = k
            lo[i], hi[i] = l, h
        res = milp(
            c=np.zeros(n),
            constraints=LinearConstraint(a, lo, hi),
            integrality=np.ones(n),
            bounds=Bounds(0, 1),
        )
        return res.status == 0


class _Encoder:
    def __init__(self, tbox, d):
        self.p = _Program(d)
        self.d = d
        self.tbox = list(tbox)
        self.subroles = [ax for ax in self.tbox if isinstance(ax, SubRoleOf)]
        self.transitive = [ax.role for ax in self.tbox if isinstance(ax, Transitive)]

    def role(self, r, e, f):
        if r.inverse:
            e, f = f, e
        return self.p.var(("role", r.name, e, f))

    def concept(self, c: Concept, e: int) -> int:
        """Indicator variable forcing ``e`` into NNF concept ``c``."""
        p = self.p
        key = ("c", c, e)
        if key in p.cache:
            return p.cache[key]
        v = p.var(key)
        d = self.d
        if isinstance(c, Atomic):
            p.le([(v, 1), (p.var(("atom", c.name, e)), -1)], 0)
        elif isinstance(c, Not):
            p.le([(v, 1), (p.var(("atom", c.operand.name, e)), 1)], 1)
        elif isinstance(c, Top):
            pass
        elif isinstance(c, Bottom):
            p.le([(v, 1)], 0)
        elif isinstance(c, And):
            for part in (c.left, c.right):
                p.le([(v, 1), (self.concept(part, e), -1)], 0)
        elif isinstance(c, Or):
            p.le([(v, 1), (self.concept(c.left, e), -1), (self.concept(c.right, e), -1)], 0)
        elif isinstance(c, All):
            for f in range(d):
                p.le([(v, 1), (self.role(c.role, e, f), 1), (self.concept(c.filler, f), -1)], 1)
        elif isinstance(c, Min):
            ws = []
            for f in range(d):
                w = p.var()
                p.le([(w, 1), (self.role(c.role, e, f), -1)], 0)
                p.le([(w, 1), (self.concept(c.filler, f), -1)], 0)
                ws.append(w)
            # sum(w) >= n * v
            p.le([(w, -1) for w in ws] + [(v, c.n)], 0)
        elif isinstance(c, Max):
            notc = negate(c.filler)
            us = []
            for f in range(d):
                u = p.var()
                # role(e,f) <= u + v[not C, f]
                p.le([(self.role(c.role, e, f), 1), (u, -1), (self.concept(notc, f), -1)], 0)
                us.append(u)
            # sum(u) <= n + d * (1 - v)
            p.le([(u, 1) for u in us] + [(v, d)], c.n + d)
        else:
            raise TypeError(c)
        return v

    def encode_tbox(self):
        p, d = self.p, self.d
        for ax in self.subroles:
            for e, f in itertools.product(range(d), repeat=2):
                p.le([(self.role(ax.sub, e, f), 1), (self.role(ax.sup, e, f), -1)], 0)
        for name in self.transitive:
            r = Role(name)
            for e, f, g in itertools.product(range(d), repeat=3):
                p.le([(self.role(r, e, f), 1), (self.role(r, f, g), 1), (self.role(r, e, g), -1)], 1)
        for ax in self.tbox:
            if isinstance(ax, SubClassOf):
                c = nnf(Or(Not(ax.lhs), ax.rhs))
                for e in range(d):
                    p.row({self.concept(c, e): 1}, lo=1)

    def place(self, ind):
        p = self.p
        vs = [p.var(("ind", ind, e)) for e in range(self.d)]
        if ("placed", ind) not in p.cache:
            p.cache[("placed", ind)] = True
            p.row({v: 1 for v in vs}, lo=1, hi=1)
        return vs

    def assert_concept(self, ind, c: Concept):
        c = nnf(c)
        for e, x in enumerate(self.place(ind)):
            self.p.le([(x, 1), (self.concept(c, e), -1)], 0)

    def encode_abox(self, abox):
        p, d = self.p, self.d
        for a in abox:
            if isinstance(a, ClassAssertion):
                self.assert_concept(a.individual, Atomic(a.concept))
            elif isinstance(a, RoleAssertion):
                xs, ys = self.place(a.subject), self.place(a.object)
                for e, f in itertools.product(range(d), repeat=2):
                    p.le([(xs[e], 1), (ys[f], 1), (self.role(a.role, e, f), -1)], 1)
            elif isinstance(a, Different):
                xs, ys = self.place(a.first), self.place(a.second)
                for e in range(d):
                    p.le([(xs[e], 1), (ys[e], 1)], 1)


def has_model(onto, d: int, extra=(), extra_roles=(), same=()) -> bool:
    """Is there a model of ``onto`` with exactly ``d`` elements (elements may
    be unused by individuals) satisfying the extra class assertions
    ``(ind, concept)``, the negated role assertions ``(role, a, b)`` and
    the equalities ``(a, b)``?"""
    enc = _Encoder(onto.tbox, d)
    enc.encode_tbox()
    enc.encode_abox(onto.abox)
    for ind in onto.individuals:
        enc.place(ind)
    for ind, c in extra:
        enc.assert_concept(ind, c)
    for r, a, b in extra_roles:
        xs, ys = enc.place(a), enc.place(b)
        for e, f in itertools.product(range(d), repeat=2):
            enc.p.le([(xs[e], 1), (ys[f], 1), (enc.role(r, e, f), 1)], 2)
    for a, b in same:
        xs, ys = enc.place(a), enc.place(b)
        for e in range(d):
            enc.p.le([(xs[e], 1), (ys[e], -1)], 0)
    return enc.p.solve()


def find_model(onto, max_d: int, **kw) -> bool:
    return any(has_model(onto, d, **kw) for d in range(1, max_d + 1))
