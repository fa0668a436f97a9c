"""Core SHIQ vocabulary: roles, concepts, axioms, assertions and ontologies.

Concepts are immutable expression trees built from frozen dataclasses, so they
hash and compare structurally and can be used as dictionary keys.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

FRESH_PREFIX = "_N"


class ValidationError(ValueError):
    """Raised for well-formed but semantically invalid input."""


@dataclass(frozen=True, order=True)
class Role:
    name: str
    inverse: bool = False

    def inv(self) -> "Role":
        return Role(self.name, not self.inverse)

    def __str__(self) -> str:
        return f"inv({self.name})" if self.inverse else self.name


def inv(r: Role) -> Role:
    """Inverse of a role; ``inv(inv(r)) == r``."""
    return r.inv()


class Concept:
    """Base class of all concept expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Atomic(Concept):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Top(Concept):
    def __str__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bottom(Concept):
    def __str__(self) -> str:
        return "bottom"


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class Not(Concept):
    operand: Concept

    def __str__(self) -> str:
        return f"not({self.operand})"


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept

    def __str__(self) -> str:
        return f"and({self.left}, {self.right})"


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept

    def __str__(self) -> str:
        return f"or({self.left}, {self.right})"


@dataclass(frozen=True)
class Some(Concept):
    role: Role
    filler: Concept

    def __str__(self) -> str:
        return f"some({self.role}, {self.filler})"


@dataclass(frozen=True)
class All(Concept):
    role: Role
    filler: Concept

    def __str__(self) -> str:
        return f"all({self.role}, {self.filler})"


@dataclass(frozen=True)
class Min(Concept):
    n: int
    role: Role
    filler: Concept

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"negative cardinality in min({self.n}, ...)")

    def __str__(self) -> str:
        return f"min({self.n}, {self.role}, {self.filler})"


@dataclass(frozen=True)
class Max(Concept):
    n: int
    role: Role
    filler: Concept

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"negative cardinality in max({self.n}, ...)")

    def __str__(self) -> str:
        return f"max({self.n}, {self.role}, {self.filler})"


Restriction = Union[Some, All, Min, Max]
RESTRICTIONS = (Some, All, Min, Max)


def conj(parts: Iterable[Concept]) -> Concept:
    """Right-nested conjunction; ``top`` for no parts."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Concept]) -> Concept:
    parts = list(parts)
    if not parts:
        return BOTTOM
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def conjuncts(c: Concept) -> list[Concept]:
    if isinstance(c, And):
        return conjuncts(c.left) + conjuncts(c.right)
    return [c]


def disjuncts(c: Concept) -> list[Concept]:
    if isinstance(c, Or):
        return disjuncts(c.left) + disjuncts(c.right)
    return [c]


def nnf(c: Concept) -> Concept:
    """Negation normal form. Existentials become ``min(1, R, C)``,
    ``min(0, ...)`` becomes top and ``max(0, R, C)`` becomes ``all(R, not C)``.
    """
    if isinstance(c, (Atomic, Top, Bottom)):
        return c
    if isinstance(c, And):
        return And(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return Or(nnf(c.left), nnf(c.right))
    if isinstance(c, Some):
        return Min(1, c.role, nnf(c.filler))
    if isinstance(c, All):
        return All(c.role, nnf(c.filler))
    if isinstance(c, Min):
        return TOP if c.n == 0 else Min(c.n, c.role, nnf(c.filler))
    if isinstance(c, Max):
        if c.n == 0:
            return All(c.role, negate(c.filler))
        return Max(c.n, c.role, nnf(c.filler))
    if isinstance(c, Not):
        return negate(c.operand)
    raise TypeError(f"not a concept: {c!r}")


def negate(c: Concept) -> Concept:
    """NNF of ``not(c)``."""
    if isinstance(c, Atomic):
        return Not(c)
    if isinstance(c, Top):
        return BOTTOM
    if isinstance(c, Bottom):
        return TOP
    if isinstance(c, Not):
        return nnf(c.operand)
    if isinstance(c, And):
        return Or(negate(c.left), negate(c.right))
    if isinstance(c, Or):
        return And(negate(c.left), negate(c.right))
    if isinstance(c, Some):
        return All(c.role, negate(c.filler))
    if isinstance(c, All):
        return Min(1, c.role, negate(c.filler))
    if isinstance(c, Min):
        if c.n == 0:
            return BOTTOM
        if c.n == 1:
            return All(c.role, negate(c.filler))
        return Max(c.n - 1, c.role, nnf(c.filler))
    if isinstance(c, Max):
        return Min(c.n + 1, c.role, nnf(c.filler))
    raise TypeError(f"not a concept: {c!r}")


def is_nnf(c: Concept) -> bool:
    if isinstance(c, Not):
        return isinstance(c.operand, Atomic)
    if isinstance(c, (And, Or)):
        return is_nnf(c.left) and is_nnf(c.right)
    if isinstance(c, RESTRICTIONS):
        return is_nnf(c.filler)
    return True


def quantifier_depth(c: Concept) -> int:
    if isinstance(c, RESTRICTIONS):
        return 1 + quantifier_depth(c.filler)
    if isinstance(c, Not):
        return quantifier_depth(c.operand)
    if isinstance(c, (And, Or)):
        return max(quantifier_depth(c.left), quantifier_depth(c.right))
    return 0


def is_simple_form(c: Concept) -> bool:
    return quantifier_depth(c) < 2


def subconcepts(c: Concept) -> Iterator[Concept]:
    yield c
    if isinstance(c, Not):
        yield from subconcepts(c.operand)
    elif isinstance(c, (And, Or)):
        yield from subconcepts(c.left)
        yield from subconcepts(c.right)
    elif isinstance(c, RESTRICTIONS):
        yield from subconcepts(c.filler)


def concept_names(c: Concept) -> set[str]:
    return {s.name for s in subconcepts(c) if isinstance(s, Atomic)}


def concept_roles(c: Concept) -> set[Role]:
    return {s.role for s in subconcepts(c) if isinstance(s, RESTRICTIONS)}


# -- axioms -----------------------------------------------------------------


@dataclass(frozen=True)
class SubClassOf:
    lhs: Concept
    rhs: Concept

    def __str__(self) -> str:
        return f"SubClassOf({self.lhs}, {self.rhs})"


@dataclass(frozen=True)
class SubRoleOf:
    sub: Role
    sup: Role

    def __str__(self) -> str:
        return f"SubRoleOf({self.sub}, {self.sup})"


@dataclass(frozen=True)
class Transitive:
    role: str

    def __str__(self) -> str:
        return f"Transitive({self.role})"


Axiom = Union[SubClassOf, SubRoleOf, Transitive]


# -- assertions -------------------------------------------------------------


@dataclass(frozen=True)
class ClassAssertion:
    id: int
    concept: str
    individual: str

    @property
    def individuals(self) -> tuple[str, ...]:
        return (self.individual,)

    def __str__(self) -> str:
        return f"ClassAssertion({self.concept}, {self.individual})"


@dataclass(frozen=True)
class RoleAssertion:
    id: int
    role: Role
    subject: str
    object: str

    @property
    def individuals(self) -> tuple[str, ...]:
        return (self.subject, self.object)

    def __str__(self) -> str:
        return f"RoleAssertion({self.role}, {self.subject}, {self.object})"


@dataclass(frozen=True)
class Different:
    id: int
    first: str
    second: str

    @property
    def individuals(self) -> tuple[str, ...]:
        return (self.first, self.second)

    def __str__(self) -> str:
        return f"Different({self.first}, {self.second})"


Assertion = Union[ClassAssertion, RoleAssertion, Different]


def _freeze(index: dict) -> Mapping:
    return MappingProxyType({k: tuple(v) for k, v in index.items()})


@dataclass(frozen=True, eq=False)
class Ontology:
    """A TBox plus an ABox with per-individual and per-role indexes.

    Assertion ids are kept as given; an ontology restricted to a module keeps
    the ids of the source ontology.
    """

    tbox: tuple
    abox: tuple
    role_assertions_of: Mapping = field(init=False, repr=False)
    class_assertions_of: Mapping = field(init=False, repr=False)
    different_of: Mapping = field(init=False, repr=False)
    assertions_by_role: Mapping = field(init=False, repr=False)
    by_id: Mapping = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "tbox", tuple(self.tbox))
        object.__setattr__(self, "abox", tuple(self.abox))
        roles, classes, diffs, by_role = (defaultdict(list) for _ in range(4))
        by_id = {}
        for a in self.abox:
            if a.id in by_id:
                raise ValidationError(f"duplicate assertion id {a.id}")
            by_id[a.id] = a
            if isinstance(a, RoleAssertion):
                roles[a.subject].append(a.id)
                if a.object != a.subject:
                    roles[a.object].append(a.id)
                by_role[a.role.name].append(a.id)
            elif isinstance(a, ClassAssertion):
                classes[a.individual].append(a.id)
            else:
                diffs[a.first].append(a.id)
                if a.second != a.first:
                    diffs[a.second].append(a.id)
        object.__setattr__(self, "role_assertions_of", _freeze(roles))
        object.__setattr__(self, "class_assertions_of", _freeze(classes))
        object.__setattr__(self, "different_of", _freeze(diffs))
        object.__setattr__(self, "assertions_by_role", _freeze(by_role))
        object.__setattr__(self, "by_id", MappingProxyType(by_id))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ontology):
            return NotImplemented
        return self.tbox == other.tbox and self.abox == other.abox

    def __hash__(self) -> int:
        return hash((self.tbox, self.abox))

    @property
    def individuals(self) -> list[str]:
        seen = dict.fromkeys(i for a in self.abox for i in a.individuals)
        return sorted(seen)

    def concept_names(self) -> set[str]:
        names = set()
        for ax in self.tbox:
            if isinstance(ax, SubClassOf):
                names |= concept_names(ax.lhs) | concept_names(ax.rhs)
        names.update(a.concept for a in self.abox if isinstance(a, ClassAssertion))
        return names

    def role_names(self) -> set[str]:
        names = set()
        for ax in self.tbox:
            if isinstance(ax, SubClassOf):
                names |= {r.name for r in concept_roles(ax.lhs) | concept_roles(ax.rhs)}
            elif isinstance(ax, SubRoleOf):
                names |= {ax.sub.name, ax.sup.name}
            else:
                names.add(ax.role)
        names.update(a.role.name for a in self.abox if isinstance(a, RoleAssertion))
        return names

    def restrict(self, ids: Iterable[int]) -> "Ontology":
        """The same TBox with only the given assertions (source ids kept)."""
        by_id = self.by_id
        return Ontology(self.tbox, tuple(by_id[i] for i in sorted(set(ids)) if i in by_id))

    def with_assertions(self, extra: Iterable) -> "Ontology":
        """Append assertions, renumbering them after the current maximum id."""
        nxt = max((a.id for a in self.abox), default=-1) + 1
        added = []
        for a in extra:
            added.append(_with_id(a, nxt))
            nxt += 1
        return Ontology(self.tbox, self.abox + tuple(added))


def _with_id(a: Assertion, new_id: int) -> Assertion:
    if isinstance(a, ClassAssertion):
        return ClassAssertion(new_id, a.concept, a.individual)
    if isinstance(a, RoleAssertion):
        return RoleAssertion(new_id, a.role, a.subject, a.object)
    return Different(new_id, a.first, a.second)


def build_ontology(tbox: Iterable, abox: Iterable) -> Ontology:
    """Number assertions densely in the given order."""
    return Ontology(tuple(tbox), tuple(_with_id(a, i) for i, a in enumerate(abox)))
