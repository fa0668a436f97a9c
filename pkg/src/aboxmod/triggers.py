"""Syntactic index of left-hand ``min`` restrictions.

A trigger on role ``R`` says that an ``R``-neighbor may change the
classification of an individual: the normalized TBox contains
``min(n, R, filler) ⊓ ... ⊑ consequent`` either directly or as the
companion of a right-hand value/at-most restriction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import All, And, Atomic, Concept, Max, Min, Or, Role, conjuncts
from .normalize import NormalizedTBox, as_normalized
from .roles import RoleHierarchy


@dataclass(frozen=True)
class Trigger:
    role: Role
    n: int
    filler: Optional[Concept]
    consequent: Optional[str]
    origin: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("trigger cardinality must be at least 1")


def _restrictions(c: Concept):
    """Restrictions reachable through and/or (fillers are not entered)."""
    if isinstance(c, (And, Or)):
        yield from _restrictions(c.left)
        yield from _restrictions(c.right)
    elif isinstance(c, (Min, Max, All)):
        yield c


@dataclass
class TriggerIndex:
    by_role: dict  # role -> tuple of triggers declared on exactly that role
    at_most_floor: dict  # role -> smallest k >= 1 with min(k+1, role, .) on a left side
    generative: frozenset  # roles that may receive anonymous successors
    hierarchy: RoleHierarchy
    _closed: dict = field(default_factory=dict, repr=False)

    def triggers(self, r0: Role) -> tuple:
        """All triggers declared on a super-role of ``r0``."""
        hit = self._closed.get(r0)
        if hit is None:
            found = []
            for r in sorted(self.hierarchy.super_roles(r0)):
                found.extend(self.by_role.get(r, ()))
            hit = self._closed[r0] = tuple(found)
        return hit

    def has_anonymous_neighbors(self, r: Role) -> bool:
        """Whether some sub-role of ``r`` occurs in a generating restriction."""
        return any(s in self.generative for s in self.hierarchy.sub_roles(r))

    def __bool__(self) -> bool:
        return any(self.by_role.values())

    @property
    def roles(self) -> frozenset:
        return frozenset(r for r, ts in self.by_role.items() if ts)


def build_trigger_index(tbox, h: RoleHierarchy) -> TriggerIndex:
    tbox: NormalizedTBox = as_normalized(tbox)
    by_role: dict = {}
    floors: dict = {}
    generative = set()

    def add(role, n, filler, consequent, origin):
        by_role.setdefault(role, []).append(Trigger(role, n, filler, consequent, origin))
        if n >= 2:
            floors[role] = min(floors.get(role, n - 1), n - 1)

    for gci, origin in zip(tbox.gcis, tbox.origins):
        consequent = gci.rhs.name if isinstance(gci.rhs, Atomic) else None
        top_level = set(conjuncts(gci.lhs))
        for r in _restrictions(gci.lhs):
            if isinstance(r, Min):
                add(r.role, r.n, r.filler, consequent if r in top_level else None, origin)
            else:
                generative.add(r.role)
        for r in _restrictions(gci.rhs):
            if isinstance(r, Min):
                generative.add(r.role)
    for comp, origin in zip(tbox.companions, tbox.companion_origins):
        m = comp.lhs
        consequent = comp.rhs.name if isinstance(comp.rhs, Atomic) else None
        add(m.role, m.n, m.filler, consequent, origin)
    return TriggerIndex(
        by_role={r: tuple(ts) for r, ts in by_role.items()},
        at_most_floor=floors,
        generative=frozenset(generative),
        hierarchy=h,
    )
