"""ABox modularization.

Every individual starts with its property-preserving assertions (incident
role assertions, role paths under a common transitive super-role and its
inequality assertions) plus its own class assertions. Modules are then united
on a union-find whenever a role assertion may carry a classification
entailment across (a syntactic trigger fires), and again wherever an at-most
restriction could force two named individuals to be equal.
"""

from __future__ import annotations

import hashlib
import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from .model import (
    TOP,
    Atomic,
    ClassAssertion,
    Concept,
    Different,
    Ontology,
    Role,
    RoleAssertion,
    conj,
)
from .normalize import as_normalized
from .oracle import subsumed
from .parser import serialize
from .roles import RoleHierarchy, build_hierarchy
from .triggers import Trigger, TriggerIndex, build_trigger_index

OPT_LEVELS = ("base", "opt1", "opt2", "opt3")
COMBINATION_CAP = 12
INDEX_HEADER = "aboxmod-index v1"


class UnionFind:
    """Union-find whose representative is always the smallest member name."""

    def __init__(self, items=()):
        self.parent = {}
        self.members = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.members[x] = [x]

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        small, large = (ra, rb) if len(self.members[ra]) < len(self.members[rb]) else (rb, ra)
        self.members[large].extend(self.members.pop(small))
        self.parent[small] = large
        # keep the lexicographically smallest name as the representative
        keep = min(ra, rb)
        if keep != large:
            self.members[keep] = self.members.pop(large)
            self.parent[large] = keep
            self.parent[keep] = keep
        return True

    def groups(self) -> dict:
        return {r: sorted(m) for r, m in self.members.items()}


@dataclass(frozen=True)
class Module:
    signature: frozenset
    assertions: frozenset


@dataclass(frozen=True)
class MergeDirective:
    source: str
    target: Optional[str]
    action: str  # "merge", "import" or "include"
    assertions: frozenset
    trigger: Optional[Trigger] = None


@dataclass(frozen=True)
class EqualityCandidateSet:
    anchor: str
    role: Role
    candidates: frozenset
    floor: int
    observed_max: float  # may be inf when anonymous successors can merge in
    anonymous: bool = False


@dataclass
class ModulePartition:
    union_find: dict  # individual -> root
    root_assertions: dict  # root -> frozenset of assertion ids
    root_signature: dict  # root -> frozenset of individuals
    opt_level: str
    ontology_sha256: str = ""
    merges: frozenset = frozenset()  # unordered individual pairs united by triggers
    equalities: tuple = ()
    elapsed: Optional[float] = field(default=None, compare=False)

    def root_of(self, ind):
        return self.union_find.get(ind)

    def module(self, root) -> Module:
        return Module(self.root_signature[root], self.root_assertions[root])

    @property
    def roots(self) -> list:
        return sorted(self.root_signature)

    def __eq__(self, other):
        if not isinstance(other, ModulePartition):
            return NotImplemented
        return (self.union_find, self.root_assertions, self.root_signature, self.opt_level) == (
            other.union_find, other.root_assertions, other.root_signature, other.opt_level)


class _Graph:
    """Per-individual view of role assertions in both directions."""

    def __init__(self, o: Ontology, h: RoleHierarchy):
        self.o = o
        self.h = h
        self.views = {}
        for a in o.abox:
            if isinstance(a, RoleAssertion):
                self.views.setdefault(a.subject, []).append((a.role, a.object, a.id))
                self.views.setdefault(a.object, []).append((a.role.inv(), a.subject, a.id))

    def edges(self, x):
        return self.views.get(x, ())

    def neighbors(self, x, r: Role) -> dict:
        """R-neighbors of ``x`` (through any sub-role, either direction) -> ids."""
        out = {}
        for role, y, aid in self.edges(x):
            if self.h.is_subrole(role, r):
                out.setdefault(y, set()).add(aid)
        return out

    def paths(self, x, t: Role):
        """Individuals reachable from ``x`` along ``t``-edges, and the ids of
        every assertion walked on the way."""
        seen = {x}
        ids = set()
        reached = set()
        todo = [x]
        while todo:
            u = todo.pop()
            for role, v, aid in self.edges(u):
                if self.h.is_subrole(role, t):
                    ids.add(aid)
                    reached.add(v)
                    if v not in seen:
                        seen.add(v)
                        todo.append(v)
        return reached, ids


def _context(o, h, graph):
    h = h or build_hierarchy(o)
    return h, graph or _Graph(o, h)


def property_module(o: Ontology, h: RoleHierarchy, a: str, graph: _Graph | None = None) -> set:
    """Assertions needed to derive every role assertion about ``a``."""
    h, graph = _context(o, h, graph)
    ids = set(o.role_assertions_of.get(a, ()))
    ids.update(o.different_of.get(a, ()))
    for t in _transitive_from(h, graph, a):
        ids |= graph.paths(a, t)[1]
    return ids


def _transitive_from(h, graph, a):
    ts = set()
    for role, _, _ in graph.edges(a):
        ts |= h.transitive_supers(role)
    return sorted(ts)


def _explicit_classes(o: Ontology, a: str) -> frozenset:
    return frozenset(o.by_id[i].concept for i in o.class_assertions_of.get(a, ()))


class _Gates:
    """Memoized TBox subsumption tests behind the optimization gates."""

    def __init__(self, tbox):
        self.tbox = tbox
        self.cache = {}

    def entails(self, classes: frozenset, target: Concept) -> bool:
        key = (classes, target)
        hit = self.cache.get(key)
        if hit is None:
            lhs = conj([Atomic(c) for c in sorted(classes)]) if classes else TOP
            hit = self.cache[key] = subsumed(self.tbox, lhs, target)
        return hit


def classification_merges(o: Ontology, h: RoleHierarchy, idx: TriggerIndex, a: str,
                          opt_level: str = "base", graph: _Graph | None = None,
                          gates: _Gates | None = None) -> list:
    """Directives for the role assertions of ``a`` that fire a trigger."""
    if opt_level not in OPT_LEVELS:
        raise ValueError(f"unknown optimization level {opt_level!r}")
    h, graph = _context(o, h, graph)
    gates = gates or _Gates(as_normalized(o.tbox))
    use_opt1 = opt_level in ("opt1", "opt3")
    use_opt2 = opt_level in ("opt2", "opt3")
    out = []
    edges = [(r, b, frozenset((aid,))) for r, b, aid in graph.edges(a)]
    for t in _transitive_from(h, graph, a):
        if idx.triggers(t):
            reached, ids = graph.paths(a, t)
            for c in sorted(reached):
                edges.append((t, c, frozenset(ids)))
    mine = _explicit_classes(o, a)
    counts = {}
    for r0, b, ids in edges:
        for trig in idx.triggers(r0):
            extra = frozenset()
            if trig.n > 1:
                if trig.role not in counts:
                    nbrs = graph.neighbors(a, trig.role)
                    diffs = {
                        i for y in nbrs for i in o.different_of.get(y, ())
                        if set(o.by_id[i].individuals) <= set(nbrs)
                    }
                    counts[trig.role] = (len(nbrs), frozenset(diffs))
                count, extra = counts[trig.role]
                # anonymous successors may make up the missing neighbors
                if count < trig.n and not idx.has_anonymous_neighbors(trig.role):
                    continue
            out.append(MergeDirective(a, b, "include", ids | extra, trig))
            if use_opt1 and trig.consequent is not None and gates.entails(mine, Atomic(trig.consequent)):
                continue
            theirs = _explicit_classes(o, b)
            if use_opt2 and trig.filler is not None and gates.entails(theirs, trig.filler):
                out.append(MergeDirective(a, b, "import", frozenset(o.class_assertions_of.get(b, ())), trig))
                continue
            out.append(MergeDirective(a, b, "merge", frozenset(), trig))
    return out


def _max_union(groups, k, cap=COMBINATION_CAP):
    """Largest union over ``k``-subsets of ``groups`` (a list of sets)."""
    if len(groups) <= k:
        return len(set().union(*groups)) if groups else 0
    if len(groups) > cap:
        return len(set().union(*groups))
    best = 0
    for combo in itertools.combinations(groups, k):
        best = max(best, len(set().union(*combo)))
    return best


def potential_equivalents(o: Ontology, h: RoleHierarchy, idx: TriggerIndex,
                          graph: _Graph | None = None) -> list:
    """Candidate sets of named individuals that an at-most restriction could
    force together, computed to a fixpoint.

    Individuals already grouped by an earlier candidate set are counted
    together: an anchor inside a group of ``m'`` members with floor ``n'``
    may coincide with up to ``m' - n' + 1`` of them, so its neighbor count is
    the largest neighborhood over such combinations that contain it. When a
    sub-role of ``R`` can receive anonymous successors, any named neighbor may
    be identified with one of them, so the count is unbounded.
    """
    h, graph = _context(o, h, graph)
    floors = idx.at_most_floor
    if not floors:
        return []
    inds = o.individuals
    eq = UnionFind(inds)
    group_floor = {}  # root -> smallest floor among the sets merged into it
    found = {}
    cache = {}

    def nbrs(x, r):
        hit = cache.get((x, r))
        if hit is None:
            hit = cache[x, r] = frozenset(graph.neighbors(x, r))
        return hit

    def differs(y, z):
        return any(set(o.by_id[i].individuals) == {y, z} for i in o.different_of.get(y, ()))

    def observed(x, r):
        own = nbrs(x, r)
        members = eq.members[eq.find(x)]
        if len(members) == 1:
            return len(own), own
        others = [nbrs(y, r) for y in members if y != x]
        union = own.union(*others)
        k = len(members) - group_floor.get(eq.find(x), 1) + 1
        if len(members) > COMBINATION_CAP or k >= len(members):
            return len(union), union
        best = max(len(own.union(*c)) for c in itertools.combinations(others, k - 1))
        return best, union

    changed = True
    while changed:
        changed = False
        for r in sorted(floors):
            n = floors[r]
            anon_ok = idx.has_anonymous_neighbors(r)
            for x in inds:
                m, union = observed(x, r)
                anonymous = anon_ok and bool(union)
                if anonymous:
                    cands = set(union)
                elif m > n:
                    cands = {y for y in union if any(z != y and not differs(y, z) for z in union)}
                else:
                    continue
                if not cands:
                    continue
                found[x, r] = EqualityCandidateSet(
                    anchor=x, role=r, candidates=frozenset(cands), floor=n,
                    observed_max=float("inf") if anonymous else m, anonymous=anonymous,
                )
                first = min(cands)
                floor = min([n] + [group_floor.get(eq.find(y), n) for y in cands])
                for y in cands:
                    changed |= eq.union(first, y)
                group_floor[eq.find(first)] = floor
    return [found[k] for k in sorted(found, key=lambda k: (k[0], k[1].name, k[1].inverse))]


def modularize(o: Ontology, h: RoleHierarchy | None = None, idx: TriggerIndex | None = None,
               opt_level: str = "base") -> ModulePartition:
    if opt_level not in OPT_LEVELS:
        raise ValueError(f"unknown optimization level {opt_level!r}")
    started = time.perf_counter()
    norm = as_normalized(o.tbox)
    h = h or build_hierarchy(o)
    idx = idx or build_trigger_index(norm, h)
    graph = _Graph(o, h)
    gates = _Gates(norm)
    inds = o.individuals
    uf = UnionFind(inds)
    own = {}
    prop_sig = {}
    merges = set()
    for a in inds:
        ids = property_module(o, h, a, graph)
        ids.update(o.class_assertions_of.get(a, ()))
        prop_sig[a] = {i for aid in ids for i in o.by_id[aid].individuals if isinstance(o.by_id[aid], (RoleAssertion, Different))}
        own[a] = ids
    if idx:
        for a in inds:
            for d in classification_merges(o, h, idx, a, opt_level, graph, gates):
                if d.action == "merge":
                    uf.union(a, d.target)
                    merges.add(frozenset((a, d.target)))
                else:
                    own[a].update(d.assertions)
    equalities = potential_equivalents(o, h, idx, graph) if idx.at_most_floor else []
    for cs in equalities:
        for y in sorted(cs.candidates):
            uf.union(cs.anchor, y)
            for z in sorted(prop_sig.get(y, ())):
                uf.union(cs.anchor, z)
    union_find = {a: uf.find(a) for a in inds}
    root_assertions = {}
    root_signature = {}
    for root, members in uf.groups().items():
        # small-into-large accumulation of assertion ids
        acc = set()
        for m in sorted(members, key=lambda x: -len(own[x])):
            if len(own[m]) > len(acc):
                acc, other = set(own[m]), acc
                acc |= other
            else:
                acc |= own[m]
        root_assertions[root] = frozenset(acc)
        root_signature[root] = frozenset(members)
    return ModulePartition(
        union_find=union_find,
        root_assertions=root_assertions,
        root_signature=root_signature,
        opt_level=opt_level,
        ontology_sha256=ontology_digest(o),
        merges=frozenset(merges),
        equalities=tuple(equalities),
        elapsed=time.perf_counter() - started,
    )


def module_of(p: ModulePartition, s) -> Module:
    """Union of the modules of the given individuals (unknown ones add nothing)."""
    if isinstance(s, str):
        s = (s,)
    roots = {p.union_find[i] for i in s if i in p.union_find}
    sig, ids = set(), set()
    for r in roots:
        sig |= p.root_signature[r]
        ids |= p.root_assertions[r]
    return Module(frozenset(sig), frozenset(ids))


def module_ontology(o: Ontology, m: Module) -> Ontology:
    """The ontology (T, M) for a module."""
    return o.restrict(m.assertions)


# -- persisted index ---------------------------------------------------------


def ontology_digest(o: Ontology) -> str:
    return hashlib.sha256(serialize(o).encode("utf-8")).hexdigest()


def format_index(p: ModulePartition) -> str:
    lines = [INDEX_HEADER, f"ontology-sha256: {p.ontology_sha256}", f"opt: {p.opt_level}"]
    for root in p.roots:
        sig = ",".join(sorted(p.root_signature[root]))
        ast = ",".join(str(i) for i in sorted(p.root_assertions[root]))
        lines.append(f"module {root} | sig: {sig} | ast: {ast}")
    return "".join(line + "\n" for line in lines)


def write_index(p: ModulePartition, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_index(p))


class IndexFormatError(ValueError):
    pass


def parse_index(text: str) -> ModulePartition:
    lines = text.splitlines()
    if len(lines) < 3 or lines[0] != INDEX_HEADER:
        raise IndexFormatError("not a module index (bad header)")
    if not lines[1].startswith("ontology-sha256: "):
        raise IndexFormatError("line 2: expected 'ontology-sha256: <hex>'")
    if not lines[2].startswith("opt: "):
        raise IndexFormatError("line 3: expected 'opt: <level>'")
    sha = lines[1][len("ontology-sha256: "):]
    opt = lines[2][len("opt: "):]
    if opt not in OPT_LEVELS:
        raise IndexFormatError(f"line 3: unknown optimization level {opt!r}")
    union_find, root_assertions, root_signature = {}, {}, {}
    for n, line in enumerate(lines[3:], start=4):
        parts = line.split(" | ")
        if len(parts) != 3 or not parts[0].startswith("module ") or not parts[1].startswith("sig: ") \
                or not parts[2].startswith("ast: "):
            raise IndexFormatError(f"line {n}: malformed module line")
        root = parts[0][len("module "):]
        sig = [s for s in parts[1][len("sig: "):].split(",") if s]
        ast = parts[2][len("ast: "):]
        try:
            ids = frozenset(int(i) for i in ast.split(",") if i)
        except ValueError:
            raise IndexFormatError(f"line {n}: assertion ids must be integers") from None
        if root not in sig or root in root_signature:
            raise IndexFormatError(f"line {n}: module root {root!r} must head its own signature once")
        if any(s in union_find for s in sig):
            raise IndexFormatError(f"line {n}: signatures overlap")
        root_signature[root] = frozenset(sig)
        root_assertions[root] = ids
        for s in sig:
            union_find[s] = root
    return ModulePartition(union_find, root_assertions, root_signature, opt, sha)


def read_index(path) -> ModulePartition:
    with open(path, encoding="utf-8") as fh:
        return parse_index(fh.read())
