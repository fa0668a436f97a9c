"""Reference tableau reasoner for SHIQ ontologies with ABoxes.

This is a straightforward completion-graph procedure with pairwise blocking
(a blocker may be any earlier generated node, not only an ancestor),
the usual SHIQ expansion rules (including the choose rule and merging of
named individuals), dependency sets for backjumping, and lazy unfolding of
GCIs whose left side is a concept name, a conjunction of names or an
existential with a named filler. Everything else is internalized.

Dependency sets double as a certainty marker: a label entry whose dependency
set is empty was derived without any nondeterministic choice and is therefore
entailed. That lets instance checks skip the refutation run in the common
case.
"""

from __future__ import annotations

import itertools
import time
from collections import deque
from functools import lru_cache

from .model import (
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
    Ontology,
    Or,
    Role,
    RoleAssertion,
    Some,
    Top,
    ValidationError,
    nnf,
)
from .normalize import NormalizedTBox, as_normalized
from .roles import RoleHierarchy, build_hierarchy

EMPTY = frozenset()
TOP_I = ("T",)
BOT_I = ("F",)


class InconsistentOntologyError(Exception):
    """The ontology has no model, so entailment questions are not answered."""


class NonSimpleRoleError(ValidationError):
    pass


class OracleTimeout(RuntimeError):
    pass


class Clash(Exception):
    def __init__(self, deps):
        self.deps = deps


# -- internal concept encoding ---------------------------------------------
# ('A', n) / ('N', n) literals, ('T',), ('F',), ('and', *cs), ('or', *cs),
# ('all', role, c), ('min', n, role, c), ('max', n, role, c); roles are
# (name, inverted) pairs.


def _role(r: Role):
    return (r.name, r.inverse)


def _inv(r):
    return (r[0], not r[1])


def encode(c: Concept):
    """Internal form of ``nnf(c)``."""
    return _encode(nnf(c))


def _encode(c):
    if isinstance(c, Atomic):
        return ("A", c.name)
    if isinstance(c, Not):
        return ("N", c.operand.name)
    if isinstance(c, Top):
        return TOP_I
    if isinstance(c, Bottom):
        return BOT_I
    if isinstance(c, (And, Or)):
        tag = "and" if isinstance(c, And) else "or"
        parts = []
        for p in (_encode(c.left), _encode(c.right)):
            if p[0] == tag:
                parts.extend(p[1:])
            elif p not in parts:
                parts.append(p)
        return _mk(tag, parts)
    if isinstance(c, Some):
        return ("min", 1, _role(c.role), _encode(c.filler))
    if isinstance(c, All):
        return ("all", _role(c.role), _encode(c.filler))
    if isinstance(c, Min):
        return TOP_I if c.n == 0 else ("min", c.n, _role(c.role), _encode(c.filler))
    if isinstance(c, Max):
        if c.n == 0:
            return ("all", _role(c.role), neg(_encode(c.filler)))
        return ("max", c.n, _role(c.role), _encode(c.filler))
    raise TypeError(f"not a concept: {c!r}")


def _mk(tag, parts):
    flat = []
    for p in parts:
        for q in (p[1:] if p[0] == tag else (p,)):
            if q not in flat:
                flat.append(q)
    parts = flat
    if tag == "and":
        parts = [p for p in parts if p != TOP_I]
        if BOT_I in parts:
            return BOT_I
        if not parts:
            return TOP_I
    else:
        parts = [p for p in parts if p != BOT_I]
        if TOP_I in parts:
            return TOP_I
        if not parts:
            return BOT_I
    if len(parts) == 1:
        return parts[0]
    return (tag, *parts)


@lru_cache(maxsize=None)
def neg(c):
    tag = c[0]
    if tag == "A":
        return ("N", c[1])
    if tag == "N":
        return ("A", c[1])
    if tag == "T":
        return BOT_I
    if tag == "F":
        return TOP_I
    if tag == "and":
        return _mk("or", [neg(p) for p in c[1:]])
    if tag == "or":
        return _mk("and", [neg(p) for p in c[1:]])
    if tag == "all":
        return ("min", 1, c[1], neg(c[2]))
    if tag == "min":
        if c[1] == 1:
            return ("all", c[2], neg(c[3]))
        return ("max", c[1] - 1, c[2], c[3])
    if tag == "max":
        return ("min", c[1] + 1, c[2], c[3])
    raise ValueError(c)


def _conjuncts(c):
    return list(c[1:]) if c[0] == "and" else [c]


def _roles_in(c):
    if c[0] in ("and", "or"):
        for p in c[1:]:
            yield from _roles_in(p)
    elif c[0] == "all":
        yield ("all", 1, c[1])
        yield from _roles_in(c[2])
    elif c[0] in ("min", "max"):
        yield (c[0], c[1], c[2])
        yield from _roles_in(c[3])


# -- compiled TBox ------------------------------------------------------------


class CompiledTBox:
    """Absorbed and internalized form of a normalized TBox."""

    def __init__(self, tbox, hierarchy: RoleHierarchy | None = None):
        self.source: NormalizedTBox = as_normalized(tbox)
        self.hierarchy = hierarchy or build_hierarchy(self.source)
        h = self.hierarchy
        self.supers = {_role(r): frozenset(_role(s) for s in h.super_roles(r)) for r in h.roles}
        trans = {_role(t) for t in h.transitive_roles}
        self.trans_subs = {
            _role(r): tuple(sorted(_role(s) for s in h.sub_roles(r) if _role(s) in trans))
            for r in h.roles
        }
        self.unfold: dict = {}
        self.conj_rules: dict = {}
        self.universal: list = []
        for gci in self.source.gcis:
            self._absorb(_encode(gci.lhs), _encode(gci.rhs))
        for c in self.universal + [x for v in self.unfold.values() for x in v]:
            self.check_simple(c)
        for _, c in (x for v in self.conj_rules.values() for x in v):
            self.check_simple(c)

    def role_supers(self, r):
        s = self.supers.get(r)
        if s is None:
            s = self.supers[r] = frozenset((r,))
        return s

    def transitive_subs(self, r):
        return self.trans_subs.get(r, ())

    def check_simple(self, c):
        for kind, n, r in _roles_in(c):
            if kind == "max" or (kind == "min" and n > 1):
                if self.transitive_subs(r):
                    raise NonSimpleRoleError(
                        f"role {Role(r[0], r[1])} has a transitive sub-role and "
                        "cannot be used in a cardinality restriction"
                    )

    def _absorb(self, lhs, rhs):
        if rhs == TOP_I or lhs == BOT_I:
            return
        parts = _conjuncts(lhs)
        if lhs[0] == "A":
            self.unfold.setdefault(lhs[1], []).append(rhs)
            return
        if lhs[0] == "and" and all(p[0] == "A" for p in parts):
            atoms = frozenset(p[1] for p in parts)
            for a in atoms:
                self.conj_rules.setdefault(a, []).append((atoms, rhs))
            return
        for i, p in enumerate(parts):
            if p[0] == "min" and p[1] == 1 and p[3][0] in ("A", "T"):
                rest = parts[:i] + parts[i + 1:]
                body = _mk("or", [neg(q) for q in rest] + [rhs])
                rule = ("all", _inv(p[2]), body)
                if p[3][0] == "A":
                    self.unfold.setdefault(p[3][1], []).append(rule)
                else:
                    self.universal.append(rule)
                return
        self.universal.append(_mk("or", [neg(lhs), rhs]))


_compiled_cache: dict = {}


def compile_tbox(tbox, hierarchy=None) -> CompiledTBox:
    if isinstance(tbox, CompiledTBox):
        return tbox
    key = id(tbox)
    hit = _compiled_cache.get(key)
    if hit is not None and hit[0] is tbox and hierarchy is None:
        return hit[1]
    ct = CompiledTBox(tbox, hierarchy)
    if hierarchy is None:
        _compiled_cache[key] = (tbox, ct)
        if len(_compiled_cache) > 256:
            _compiled_cache.pop(next(iter(_compiled_cache)))
    return ct


# -- completion graph ---------------------------------------------------------
#
# All mutations go through a handful of primitives that record an undo entry
# on a trail while a branch point is open; backtracking unwinds the trail.

_LAB, _ADJNEW, _ADJ, _INEQ, _ORNEW, _ORPOP, _ORSET, _SETADD, _NAME, _NODE, _REMOVE = range(11)


class _Branch:
    __slots__ = ("bid", "mark", "next_id", "alts", "idx", "base", "failed")

    def __init__(self, bid, mark, next_id, alts, base):
        self.bid = bid
        self.mark = mark
        self.next_id = next_id
        self.alts = alts
        self.idx = 0
        self.base = base
        self.failed = EMPTY


class Tableau:
    """One satisfiability run over a TBox, ABox and extra node labels."""

    def __init__(self, ctbox: CompiledTBox, individuals, class_facts=(), role_facts=(),
                 different=(), extra=(), timeout: float | None = None):
        self.t = ctbox
        self.deadline = None if timeout is None else time.monotonic() + timeout
        self.queue = deque()
        self.stack: list = []
        self.trail: list = []
        self.next_bid = 0
        self.steps = 0
        self.labels: dict = {}
        self.adj: dict = {}
        self.parent: dict = {}
        self.ineq: dict = {}
        self.names: dict = {}
        self.name_deps: dict = {}
        self.roots: set = set()
        self.next_id = 0
        self.open_or: dict = {}
        self.has_min: set = set()
        self.has_max: set = set()
        self.max_ok: set = set()  # at-most nodes with nothing to do since their last change
        self.sigs: dict = {}  # node -> frozenset of its label, dropped on change
        self._init = (list(individuals), list(class_facts), list(role_facts),
                      list(different), list(extra))
        self.result = None

    # logged primitives

    def _set_label(self, x, c, deps):
        lab = self.labels[x]
        if self.stack:
            self.trail.append((_LAB, x, c, lab.get(c)))
        lab[c] = deps
        self.sigs.pop(x, None)
        if self.max_ok:
            self.max_ok.discard(x)
            self.max_ok.difference_update(self.adj[x])

    def _set_adj(self, x, y, r, deps):
        self.max_ok.discard(x)
        row = self.adj[x]
        roles = row.get(y)
        if roles is None:
            roles = row[y] = {}
            if self.stack:
                self.trail.append((_ADJNEW, x, y))
        if self.stack:
            self.trail.append((_ADJ, x, y, r, roles.get(r)))
        roles[r] = deps

    def _set_ineq(self, x, y, deps):
        if self.stack:
            self.trail.append((_INEQ, x, y, self.ineq[x].get(y)))
        self.ineq[x][y] = deps
        self.ineq[y][x] = deps

    def _or_append(self, x, c):
        lst = self.open_or.get(x)
        if lst is None:
            lst = self.open_or[x] = []
            if self.stack:
                self.trail.append((_ORNEW, x))
        lst.append(c)
        if self.stack:
            self.trail.append((_ORPOP, x))

    def _or_replace(self, x, keep):
        if self.stack:
            self.trail.append((_ORSET, x, self.open_or[x]))
        self.open_or[x] = keep

    def _set_add(self, s, x):
        if x not in s:
            s.add(x)
            if self.stack:
                self.trail.append((_SETADD, s, x))

    def _set_name(self, name, node, deps):
        if self.stack:
            self.trail.append((_NAME, name, self.names.get(name), self.name_deps.get(name, EMPTY)))
        self.names[name] = node
        self.name_deps[name] = deps

    def _undo(self, mark):
        self.max_ok.clear()
        self.sigs.clear()
        trail = self.trail
        while len(trail) > mark:
            e = trail.pop()
            k = e[0]
            if k == _LAB:
                _, x, c, old = e
                if old is None:
                    del self.labels[x][c]
                else:
                    self.labels[x][c] = old
            elif k == _ADJ:
                _, x, y, r, old = e
                if old is None:
                    del self.adj[x][y][r]
                else:
                    self.adj[x][y][r] = old
            elif k == _ADJNEW:
                del self.adj[e[1]][e[2]]
            elif k == _INEQ:
                _, x, y, old = e
                if old is None:
                    del self.ineq[x][y]
                    del self.ineq[y][x]
                else:
                    self.ineq[x][y] = self.ineq[y][x] = old
            elif k == _ORPOP:
                self.open_or[e[1]].pop()
            elif k == _ORNEW:
                del self.open_or[e[1]]
            elif k == _ORSET:
                self.open_or[e[1]] = e[2]
            elif k == _SETADD:
                e[1].discard(e[2])
            elif k == _NAME:
                if e[2] is None:
                    del self.names[e[1]]
                else:
                    self.names[e[1]] = e[2]
                self.name_deps[e[1]] = e[3]
            elif k == _NODE:
                x = e[1]
                for d in (self.labels, self.adj, self.ineq, self.parent, self.open_or):
                    d.pop(x, None)
                self.roots.discard(x)
            elif k == _REMOVE:
                self._restore(e[1], e[2])

    # node and edge operations

    def new_node(self, parent=None):
        x = self.next_id
        self.next_id += 1
        self.labels[x] = {TOP_I: EMPTY}
        self.adj[x] = {}
        self.ineq[x] = {}
        if parent is None:
            self.roots.add(x)
        else:
            self.parent[x] = parent
        if self.stack:
            self.trail.append((_NODE, x))
        for c in self.t.universal:
            self.add(x, c, EMPTY)
        return x

    def add(self, x, c, deps):
        lab = self.labels[x]
        old = lab.get(c)
        if old is not None:
            if old and not deps:
                self._set_label(x, c, EMPTY)
                self.queue.append((0, x, c))
            return
        tag = c[0]
        if tag == "F":
            raise Clash(deps)
        if tag == "A":
            other = lab.get(("N", c[1]))
            if other is not None:
                raise Clash(deps | other)
        elif tag == "N":
            other = lab.get(("A", c[1]))
            if other is not None:
                raise Clash(deps | other)
        elif tag == "min":
            self._set_add(self.has_min, x)
        elif tag == "max":
            self._set_add(self.has_max, x)
        self._set_label(x, c, deps)
        self.queue.append((0, x, c))

    def add_edge(self, x, y, r, deps):
        roles = self.adj[x].get(y)
        old = None if roles is None else roles.get(r)
        if old is not None and (not old or deps):
            return
        self._set_adj(x, y, r, deps)
        self._set_adj(y, x, _inv(r), deps)
        self.queue.append((1, x, y))

    def set_ineq(self, x, y, deps):
        if x == y:
            raise Clash(deps)
        old = self.ineq[x].get(y)
        if old is None or (old and not deps):
            self._set_ineq(x, y, deps)

    def edge_deps(self, x, y, s):
        """Dependencies of ``y`` being an ``s``-neighbor of ``x`` (None if not)."""
        roles = self.adj[x].get(y)
        if not roles:
            return None
        best = None
        for r, d in roles.items():
            if s in self.t.role_supers(r):
                if not d:
                    return EMPTY
                if best is None:
                    best = d
        return best

    def neighbors(self, x, s):
        out = []
        supers = self.t.supers
        for y, roles in self.adj[x].items():
            best = None
            for r, d in roles.items():
                if r == s or s in supers.get(r, ()):
                    if not d:
                        best = EMPTY
                        break
                    if best is None:
                        best = d
            if best is not None:
                out.append((y, best))
        return out

    # deterministic expansion

    def close(self):
        q = self.queue
        while q:
            kind, x, c = q.popleft()
            self.steps += 1
            if self.deadline is not None and not self.steps & 1023:
                if time.monotonic() > self.deadline:
                    raise OracleTimeout("tableau run exceeded its time budget")
            if kind == 1:
                self.edge_event(x, c)
            else:
                self.expand(x, c)

    def expand(self, x, c):
        lab = self.labels.get(x)
        if lab is None or c not in lab:
            return
        deps = lab[c]
        tag = c[0]
        if tag == "A":
            for d in self.t.unfold.get(c[1], ()):
                self.add(x, d, deps)
            for atoms, d in self.t.conj_rules.get(c[1], ()):
                if all(("A", a) in lab for a in atoms):
                    dd = deps
                    for a in atoms:
                        dd = dd | lab[("A", a)]
                    self.add(x, d, dd)
        elif tag == "and":
            for p in c[1:]:
                self.add(x, p, deps)
        elif tag == "or":
            if not any(p in lab for p in c[1:]):
                self._or_append(x, c)
        elif tag == "all":
            for y in list(self.adj[x]):
                self.apply_all(x, c, deps, y)
        self.bcp(x)

    def edge_event(self, x, y):
        if x not in self.labels or y not in self.labels or y not in self.adj[x]:
            return
        for a, b in ((x, y), (y, x)):
            for c, d in list(self.labels[a].items()):
                if c[0] == "all":
                    self.apply_all(a, c, d, b)

    def apply_all(self, x, c, deps, y):
        s, filler = c[1], c[2]
        d = self.edge_deps(x, y, s)
        if d is not None:
            self.add(y, filler, deps | d)
        for t in self.t.transitive_subs(s):
            d = self.edge_deps(x, y, t)
            if d is not None:
                self.add(y, ("all", t, filler), deps | d)

    def bcp(self, x):
        ors = self.open_or.get(x)
        if not ors:
            return
        lab = self.labels[x]
        keep = []
        forced = []
        for c in ors:
            if any(p in lab for p in c[1:]):
                continue
            viable = []
            dd = lab[c]
            for p in c[1:]:
                n = lab.get(neg(p))
                if n is None:
                    viable.append(p)
                else:
                    dd = dd | n
            if not viable:
                raise Clash(dd)
            if len(viable) == 1:
                forced.append((viable[0], dd))
                continue
            keep.append(c)
        if len(keep) != len(ors):
            self._or_replace(x, keep)
        for p, dd in forced:
            self.add(x, p, dd)

    # nondeterministic and generating rules

    def blocking(self):
        """Pairwise anywhere blocking: a generated node is blocked by an
        earlier, unblocked generated node with the same label, the same
        parent label and the same incoming edge label. Returns
        node -> 1 (directly blocked) or 2 (a predecessor is blocked)."""
        if not self.parent:
            return {}
        status = {}
        seen = {}
        sig = self.sigs

        def label_sig(n):
            s = sig.get(n)
            if s is None:
                s = sig[n] = frozenset(self.labels[n])
            return s

        for x in sorted(self.parent):
            p = self.parent[x]
            if status.get(p):
                status[x] = 2
                continue
            key = (label_sig(x), label_sig(p), frozenset(self.adj[p][x]))
            if key in seen:
                status[x] = 1
            else:
                status[x] = 0
                seen[key] = x
        return status

    def saturated_min(self, x, c):
        n, s, filler = c[1], c[2], c[3]
        cands = [y for y, _ in self.neighbors(x, s) if filler in self.labels[y]]
        if len(cands) < n:
            return False
        if n == 1:
            return True
        ineq = self.ineq
        for combo in itertools.combinations(cands, n):
            if all(b in ineq[a] for a, b in itertools.combinations(combo, 2)):
                return True
        return False

    def step(self):
        """Apply the nondeterministic rules, then one generating round.
        Returns False once no rule is applicable."""
        status = self.blocking()
        if self._max_rules(status):
            return True
        branched = False
        for x in list(self.open_or):
            while status.get(x) != 2 and self.open_or.get(x):
                c = self.open_or[x][0]
                lab = self.labels[x]
                dd = lab[c]
                viable = []
                for p in c[1:]:
                    n_ = lab.get(neg(p))
                    if n_ is None:
                        viable.append(p)
                    else:
                        dd = dd | n_
                # semantic branching: later alternatives exclude earlier ones
                alts = [("add", x, _mk("and", [neg(q) for q in viable[:i]] + [p]))
                        for i, p in enumerate(viable)]
                self.branch(alts, dd)
                self.close()
                branched = True
        if branched:
            return True
        applied = False
        for x in sorted(self.has_min):
            if x not in self.labels or status.get(x):
                continue
            for c, dc in list(self.labels[x].items()):
                if c[0] == "min" and not self.saturated_min(x, c):
                    self.generate(x, c, dc)
                    applied = True
        return applied

    def _max_rules(self, status):
        for x in sorted(self.has_max - self.max_ok):
            if x not in self.labels or status.get(x) == 2:
                continue
            lab = self.labels[x]
            for c, dc in list(lab.items()):
                if c[0] != "max":
                    continue
                n, s, filler = c[1], c[2], c[3]
                nbrs = self.neighbors(x, s)
                nf = neg(filler)
                for y, de in nbrs:
                    ly = self.labels[y]
                    if filler not in ly and nf not in ly:
                        self.branch([("add", y, filler), ("add", y, nf)], dc | de)
                        return True
                members = [(y, de | self.labels[y][filler]) for y, de in nbrs
                           if filler in self.labels[y]]
                if len(members) <= n:
                    continue
                pairs = []
                dd = dc
                for (y, dy), (z, dz) in itertools.combinations(members, 2):
                    if z in self.ineq[y]:
                        dd = dd | self.ineq[y][z]
                    else:
                        pairs.append((y, z, dy | dz))
                if not pairs:
                    for _, dy in members:
                        dd = dd | dy
                    raise Clash(dd)
                base = dc
                for _, _, d in pairs:
                    base = base | d
                self.branch([("merge", y, z, x) for y, z, _ in pairs], base)
                return True
            self.max_ok.add(x)
        return False

    def generate(self, x, c, deps):
        n, s, filler = c[1], c[2], c[3]
        made = []
        for _ in range(n):
            y = self.new_node(parent=x)
            self.add_edge(x, y, s, deps)
            self.add(y, filler, deps)
            made.append(y)
        for a, b in itertools.combinations(made, 2):
            self.set_ineq(a, b, deps)

    def branch(self, alts, base):
        bid = self.next_bid
        self.next_bid += 1
        br = _Branch(bid, len(self.trail), self.next_id, alts, base)
        self.stack.append(br)
        self.apply_alt(br)

    def apply_alt(self, br):
        last = br.idx == len(br.alts) - 1
        deps = br.base | br.failed
        if not last:
            deps = deps | {br.bid}
        alt = br.alts[br.idx]
        if alt[0] == "add":
            self.add(alt[1], alt[2], deps)
        else:
            self.merge(alt[1], alt[2], alt[3], deps)

    def backtrack(self, deps):
        while self.stack:
            br = self.stack[-1]
            if br.bid not in deps:
                self._undo(br.mark)
                self.stack.pop()
                continue
            br.failed = br.failed | (deps - {br.bid})
            br.idx += 1
            self._undo(br.mark)
            self.next_id = br.next_id
            self.queue.clear()
            if br.idx >= len(br.alts):
                deps = br.base | br.failed
                self.stack.pop()
                continue
            try:
                self.apply_alt(br)
                return True
            except Clash as e:
                deps = e.deps
                self.queue.clear()
        return False

    def merge(self, y, z, x, deps):
        """Merge node ``z`` into ``y``; ``x`` is the node whose at-most
        restriction forced the merge."""
        roots = self.roots
        if z in roots and y not in roots:
            y, z = z, y
        elif y in roots and z in roots:
            if z < y:
                y, z = z, y
        elif y not in roots and z not in roots and self.parent.get(x) == z:
            y, z = z, y
        if z in self.ineq[y]:
            raise Clash(deps | self.ineq[y][z])
        for c, d in list(self.labels[z].items()):
            self.add(y, c, d | deps)
        for w, roles in list(self.adj[z].items()):
            if w not in self.labels:
                continue
            if w != y and w != z and self.parent.get(w) == z:
                self.prune(w)
                continue
            target = y if w in (z, y) else w
            for r, d in list(roles.items()):
                self.add_edge(y, target, r, d | deps)
        for w, d in list(self.ineq[z].items()):
            self.set_ineq(y, w, d | deps)
        for name, node in list(self.names.items()):
            if node == z:
                self._set_name(name, y, self.name_deps.get(name, EMPTY) | deps)
        self.remove(z)

    def prune(self, w):
        stack = [w]
        doomed = []
        while stack:
            n = stack.pop()
            if n not in self.labels:
                continue
            doomed.append(n)
            stack.extend(c for c in self.adj[n] if self.parent.get(c) == n)
        for n in doomed:
            self.remove(n)

    def remove(self, z):
        saved = {
            "labels": self.labels.pop(z),
            "adj": self.adj.pop(z),
            "ineq": self.ineq.pop(z),
            "parent": self.parent.pop(z, None),
            "open_or": self.open_or.pop(z, None),
            "root": z in self.roots,
            "min": z in self.has_min,
            "max": z in self.has_max,
        }
        back_adj = {}
        for w in saved["adj"]:
            if w != z and w in self.adj:
                back_adj[w] = self.adj[w].pop(z)
        back_ineq = {}
        for w in saved["ineq"]:
            if w in self.ineq:
                back_ineq[w] = self.ineq[w].pop(z)
        saved["back_adj"] = back_adj
        saved["back_ineq"] = back_ineq
        self.roots.discard(z)
        self.has_min.discard(z)
        self.has_max.discard(z)
        if self.stack:
            self.trail.append((_REMOVE, z, saved))

    def _restore(self, z, saved):
        self.labels[z] = saved["labels"]
        self.adj[z] = saved["adj"]
        self.ineq[z] = saved["ineq"]
        if saved["parent"] is not None:
            self.parent[z] = saved["parent"]
        if saved["open_or"] is not None:
            self.open_or[z] = saved["open_or"]
        if saved["root"]:
            self.roots.add(z)
        if saved["min"]:
            self.has_min.add(z)
        if saved["max"]:
            self.has_max.add(z)
        for w, roles in saved["back_adj"].items():
            self.adj[w][z] = roles
        for w, d in saved["back_ineq"].items():
            self.ineq[w][z] = d

    # driver

    def _load(self):
        individuals, classes, roles, different, extra = self._init
        names = self.names
        for name in individuals:
            if name not in names:
                names[name] = self.new_node()
        for name, c in classes:
            self.add(names[name], c, EMPTY)
        for r, a, b in roles:
            self.add_edge(names[a], names[b], r, EMPTY)
        for a, b in different:
            self.set_ineq(names[a], names[b], EMPTY)
        for name, c in extra:
            self.t.check_simple(c)
            self.add(names[name], c, EMPTY)

    def run(self) -> bool:
        if self.result is not None:
            return self.result
        try:
            self._load()
        except Clash:
            self.result = False
            return False
        while True:
            try:
                self.close()
                if not self.step():
                    self.result = True
                    return True
            except Clash as e:
                self.queue.clear()
                if not self.backtrack(e.deps):
                    self.result = False
                    return False

    # model inspection (valid after a successful run)

    def node(self, name):
        return self.names.get(name)

    def label(self, name) -> dict:
        return self.labels[self.names[name]]

    def certain(self, name, c) -> bool | None:
        """None if ``c`` is not in the label of ``name``'s node; True if it
        got there without any choice (including the choice of node)."""
        deps = self.label(name).get(c)
        if deps is None:
            return None
        return not deps and not self.name_deps.get(name)

    def role_candidates(self, a, r):
        """Named individuals related to ``a`` by ``r`` in the constructed model,
        each with a flag telling whether the connection is choice-free."""
        x = self.names[a]
        base_certain = not self.name_deps.get(a)
        reach = {}
        for y, d in self.neighbors(x, r):
            reach[y] = not d
        for t in self.t.transitive_subs(r):
            seen = {}
            todo = [(y, not d) for y, d in self.neighbors(x, t)]
            while todo:
                u, certain = todo.pop()
                if u in seen and (seen[u] or not certain):
                    continue
                seen[u] = certain
                for v, d in self.neighbors(u, t):
                    todo.append((v, certain and not d))
            for v, certain in seen.items():
                reach[v] = reach.get(v, False) or certain
        out = {}
        for name, node in self.names.items():
            if node in reach:
                out[name] = reach[node] and base_certain and not self.name_deps.get(name)
        return out


# -- public reasoning interface ----------------------------------------------


def _abox_facts(onto: Ontology):
    classes, roles, diffs = [], [], []
    for a in onto.abox:
        if isinstance(a, ClassAssertion):
            classes.append((a.individual, ("A", a.concept)))
        elif isinstance(a, RoleAssertion):
            roles.append((_role(a.role), a.subject, a.object))
        elif isinstance(a, Different):
            diffs.append((a.first, a.second))
    return classes, roles, diffs


class Reasoner:
    """Reasoning over one ontology. The model built by the first consistency
    check is reused to answer instance checks without a refutation run when
    it can (absent from the model: no; derived without choices: yes)."""

    def __init__(self, onto: Ontology, tbox=None, timeout: float | None = None):
        self.onto = onto
        self.ctbox = compile_tbox(tbox if tbox is not None else _cached_normalize(onto.tbox))
        self.timeout = timeout
        self.individuals = onto.individuals
        self.classes, self.roles, self.diffs = _abox_facts(onto)
        self._model = None

    def _tableau(self, extra=(), more_individuals=(), different=()):
        inds = list(self.individuals) + [i for i in more_individuals if i not in self.individuals]
        t = Tableau(self.ctbox, inds, self.classes, self.roles,
                    list(self.diffs) + list(different), extra, timeout=self.timeout)
        return t

    @property
    def model(self) -> Tableau:
        if self._model is None:
            self._model = self._tableau()
            self._model.run()
        return self._model

    def consistent(self) -> bool:
        return self.model.result

    def _require_consistent(self):
        if not self.consistent():
            raise InconsistentOntologyError("ontology is inconsistent")

    def entails_class(self, a: str, concept) -> bool:
        """``K ⊨ C(a)``; ``concept`` is a name or a Concept."""
        self._require_consistent()
        c = ("A", concept) if isinstance(concept, str) else encode(concept)
        if c == TOP_I:
            return True
        m = self.model
        if m.node(a) is not None:
            known = m.certain(a, c)
            if known is None and c[0] == "A":
                return False
            if known:
                return True
        t = self._tableau(extra=[(a, neg(c))], more_individuals=[a])
        return not t.run()

    def entailed_classes(self, a: str, names=None) -> set:
        """All concept names ``A`` (from ``names`` or the signature) with ``K ⊨ A(a)``."""
        self._require_consistent()
        names = sorted(self.onto.concept_names() if names is None else names)
        return {n for n in names if self.entails_class(a, n)}

    def entails_role(self, a: str, role: Role, b: str) -> bool:
        self._require_consistent()
        r = _role(role)
        m = self.model
        if m.node(a) is not None and m.node(b) is not None:
            cands = m.role_candidates(a, r)
            if b not in cands:
                return False
            if cands[b]:
                return True
        marker = ("A", "__role_probe__")
        t = self._tableau(extra=[(a, ("all", r, marker)), (b, neg(marker))],
                          more_individuals=[a, b])
        return not t.run()

    def entailed_roles(self, a: str, roles, individuals=None) -> set:
        """Pairs ``(role, b)`` with ``K ⊨ role(a, b)``."""
        self._require_consistent()
        individuals = self.individuals if individuals is None else individuals
        out = set()
        m = self.model
        if m.node(a) is None:
            return out
        for role in roles:
            cands = m.role_candidates(a, _role(role))
            for b, certain in cands.items():
                if b not in individuals:
                    continue
                if certain or self.entails_role(a, role, b):
                    out.add((role, b))
        return out

    def entails_same(self, a: str, b: str) -> bool:
        self._require_consistent()
        if a == b:
            return True
        m = self.model
        if m.node(a) != m.node(b):
            return False
        if not m.name_deps.get(a) and not m.name_deps.get(b):
            return True
        t = self._tableau(different=[(a, b)])
        return not t.run()


_norm_cache: dict = {}


def _cached_normalize(tbox):
    key = tbox
    hit = _norm_cache.get(key)
    if hit is None:
        hit = _norm_cache[key] = as_normalized(tbox)
        if len(_norm_cache) > 256:
            _norm_cache.pop(next(iter(_norm_cache)))
    return hit


def consistent(onto: Ontology, timeout: float | None = None) -> bool:
    return Reasoner(onto, timeout=timeout).consistent()


def entails_class(onto: Ontology, a: str, concept, timeout: float | None = None) -> bool:
    return Reasoner(onto, timeout=timeout).entails_class(a, concept)


def entails_role(onto: Ontology, a: str, role: Role, b: str, timeout: float | None = None) -> bool:
    return Reasoner(onto, timeout=timeout).entails_role(a, role, b)


def subsumed(tbox, c: Concept, d: Concept, timeout: float | None = None) -> bool:
    """``T ⊨ C ⊑ D``."""
    ct = compile_tbox(tbox if not isinstance(tbox, Ontology) else tbox.tbox)
    probe = _mk("and", [encode(c), neg(encode(d))])
    t = Tableau(ct, ["__probe__"], extra=[("__probe__", probe)], timeout=timeout)
    return not t.run()
