"""Reflexive-transitive role hierarchy over named and inverse roles."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .model import Role, RoleAssertion, SubRoleOf, Transitive, concept_roles, SubClassOf


@dataclass(frozen=True)
class RoleHierarchy:
    supers: dict  # role -> frozenset of super-roles (reflexive)
    transitive_roles: frozenset
    subs: dict = field(repr=False, default_factory=dict)

    def is_subrole(self, r1: Role, r2: Role) -> bool:
        if r1 == r2:
            return True
        return r2 in self.supers.get(r1, ())

    def super_roles(self, r: Role) -> frozenset:
        return self.supers.get(r, frozenset((r,)))

    def sub_roles(self, r: Role) -> frozenset:
        return self.subs.get(r, frozenset((r,)))

    def transitive_supers(self, r: Role) -> frozenset:
        return frozenset(t for t in self.super_roles(r) if t in self.transitive_roles)

    def is_transitive(self, r: Role) -> bool:
        return r in self.transitive_roles

    def is_simple(self, r: Role) -> bool:
        """Neither transitive nor with a transitive sub-role."""
        return not any(s in self.transitive_roles for s in self.sub_roles(r))

    @property
    def roles(self) -> frozenset:
        return frozenset(self.supers)


def build_hierarchy(axioms, extra_roles=()) -> RoleHierarchy:
    """Close declared ``SubRoleOf`` axioms under inverses, reflexivity and
    transitivity. ``axioms`` may be a plain axiom list, a normalized TBox or
    an ontology; roles mentioned anywhere in them are included."""
    if hasattr(axioms, "tbox"):
        extra_roles = list(extra_roles) + [
            a.role for a in axioms.abox if isinstance(a, RoleAssertion)
        ]
        axioms = axioms.tbox
    edges = defaultdict(set)
    roles = set()
    transitive = set()
    for ax in axioms:
        if isinstance(ax, SubRoleOf):
            for sub, sup in ((ax.sub, ax.sup), (ax.sub.inv(), ax.sup.inv())):
                edges[sub].add(sup)
                roles.update((sub, sup))
        elif isinstance(ax, Transitive):
            transitive.update((Role(ax.role), Role(ax.role, True)))
        elif isinstance(ax, SubClassOf):
            roles |= concept_roles(ax.lhs) | concept_roles(ax.rhs)
    roles |= set(extra_roles) | transitive
    roles |= {r.inv() for r in roles}

    supers = {}
    for r in roles:
        seen = {r}
        stack = [r]
        while stack:
            for s in edges.get(stack.pop(), ()):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        supers[r] = frozenset(seen)
    subs = defaultdict(set)
    for r, ss in supers.items():
        for s in ss:
            subs[s].add(r)
    return RoleHierarchy(
        supers=supers,
        transitive_roles=frozenset(transitive),
        subs={r: frozenset(v) for r, v in subs.items()},
    )
