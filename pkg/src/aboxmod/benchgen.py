"""Deterministic synthetic ontologies.

Three profiles:

* ``university``: departments with faculty, students, courses, research
  groups and publications over a LUBM-flavoured TBox. ``scale`` is the number
  of departments (about 1,600 assertions each).
* ``hubheavy``: a shallow TBox and a handful of hub individuals that collect
  thousands of incident assertions. ``scale`` is thousands of entities.
* ``flat``: no left-hand restrictions at all, so the trigger index is empty.
  ``scale`` is thousands of entities.

Every entity draws from its own generator seeded by ``(seed, kind, index)``,
so growing ``scale`` appends new entities without disturbing existing ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model import (
    TOP,
    All,
    And,
    Atomic,
    ClassAssertion,
    Different,
    Max,
    Min,
    Not,
    Or,
    Role,
    RoleAssertion,
    Some,
    SubClassOf,
    SubRoleOf,
    Transitive,
    build_ontology,
)
from .parser import serialize

PROFILES = ("university", "hubheavy", "flat")


@dataclass(frozen=True)
class GenParams:
    profile: str = "university"
    scale: int = 1
    seed: int = 0
    trigger_density: float | None = None  # None: the profile's default
    transitive_count: int = 1

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.scale < 1:
            raise ValueError("scale must be at least 1")
        if self.trigger_density is not None and not 0.0 <= self.trigger_density <= 1.0:
            raise ValueError("trigger density must lie in [0, 1]")
        if self.transitive_count < 0:
            raise ValueError("transitive count must be non-negative")


def _rng(seed, kind, index) -> random.Random:
    return random.Random(f"{seed}/{kind}/{index}")


def _sub(a, b):
    return SubClassOf(Atomic(a), Atomic(b))


def _defined(name, role, filler, context="Person", inverse=False):
    """``context ⊓ ∃role.filler ⊑ name``"""
    some = Some(Role(role, inverse), Atomic(filler) if filler else TOP)
    lhs = And(Atomic(context), some) if context else some
    return SubClassOf(lhs, Atomic(name))


# -- university ---------------------------------------------------------------

UNIVERSITY_POOL = 20
DEPTS_PER_UNIVERSITY = 15

# Restriction-defined concepts grouped by the role they restrict, in the
# order roles are switched on as the trigger density grows.
_UNIVERSITY_DEFINITIONS = (
    ("takesCourse", [
        _defined("Student", "takesCourse", "Course"),
        _defined("GraduateLevelStudent", "takesCourse", "GraduateCourse", context=None),
    ]),
    ("worksFor", [
        _defined("Employee", "worksFor", "Organization"),
        _defined("ResearchAssistant", "worksFor", "ResearchGroup"),
    ]),
    ("headOf", [
        _defined("Chair", "headOf", "Department"),
        SubClassOf(Atomic("Chair"), Some(Role("headOf"), Atomic("Department"))),
    ]),
    ("teacherOf", [
        _defined("Teacher", "teacherOf", "Course", context=None),
        SubClassOf(TOP, All(Role("teacherOf"), Atomic("Course"))),
    ]),
    ("publicationAuthor", [
        _defined("Author", "publicationAuthor", "Publication", context=None, inverse=True),
    ]),
    ("degreeFrom", [
        _defined("Alumnus", "degreeFrom", "University"),
    ]),
    ("subOrganizationOf", [
        _defined("UniversityUnit", "subOrganizationOf", "University", context=None),
    ]),
    ("teachingAssistantOf", [
        _defined("TeachingAssistant", "teachingAssistantOf", "Course"),
    ]),
    ("advisor", [
        _defined("AdvisedStudent", "advisor", "Professor", context=None),
    ]),
    ("memberOf", [
        _defined("DepartmentMember", "memberOf", "Department", context=None),
    ]),
)

_UNIVERSITY_ROLES = (
    "worksFor", "headOf", "memberOf", "subOrganizationOf", "takesCourse",
    "teacherOf", "teachingAssistantOf", "advisor", "publicationAuthor",
    "degreeFrom", "undergraduateDegreeFrom", "doctoralDegreeFrom", "hasAlumnus",
    "prerequisite", "coAuthorOf", "researchProject", "affiliatedWith",
    "supervises", "reviewer", "listedCourse", "orgPublication", "emailDomain",
    "telephoneBlock", "officeIn", "hasMember",
)

# only the first few of these roles carry restriction-defined concepts by
# default, mirroring LUBM, where few properties define concepts
UNIVERSITY_DEFAULT_DENSITY = len(_UNIVERSITY_DEFINITIONS) / len(_UNIVERSITY_ROLES)

_UNIVERSITY_TRANSITIVE = ("subOrganizationOf", "prerequisite", "coAuthorOf")

# people known only through an existential with a disjunctive filler; their
# membership in the defined concepts holds in every model but not in every
# branch, so instance checks on them need a refutation
_SPECIALS = (
    ("Contractor", "worksFor", False, ("Department", "ResearchGroup")),
    ("Auditor", "takesCourse", False, ("Course", "GraduateCourse")),
    ("Ghostwriter", "publicationAuthor", True, ("Article", "TechnicalReport")),
    ("Tutor", "teacherOf", False, ("GraduateCourse", "Course")),
)


def university_tbox(p: GenParams) -> list:
    density = UNIVERSITY_DEFAULT_DENSITY if p.trigger_density is None else p.trigger_density
    n_defined = min(len(_UNIVERSITY_DEFINITIONS), round(density * len(_UNIVERSITY_ROLES)))
    tbox = []
    for name in _UNIVERSITY_TRANSITIVE[:max(1, p.transitive_count)]:
        tbox.append(Transitive(name))
    tbox += [
        SubRoleOf(Role("headOf"), Role("worksFor")),
        SubRoleOf(Role("worksFor"), Role("memberOf")),
        SubRoleOf(Role("undergraduateDegreeFrom"), Role("degreeFrom")),
        SubRoleOf(Role("doctoralDegreeFrom"), Role("degreeFrom")),
        SubRoleOf(Role("degreeFrom", True), Role("hasAlumnus")),
        SubRoleOf(Role("hasAlumnus"), Role("degreeFrom", True)),
        SubRoleOf(Role("memberOf", True), Role("hasMember")),
    ]
    for a, b in [
        ("FullProfessor", "Professor"), ("AssociateProfessor", "Professor"),
        ("AssistantProfessor", "Professor"), ("VisitingProfessor", "Faculty"),
        ("Professor", "Faculty"), ("Lecturer", "Faculty"), ("Faculty", "Person"),
        ("UndergraduateStudent", "Person"), ("GraduateStudent", "Person"),
        ("GraduateCourse", "Course"), ("University", "Organization"),
        ("Department", "Organization"), ("ResearchGroup", "Organization"),
        ("Article", "Publication"), ("TechnicalReport", "Publication"),
        ("Chair", "Professor"), ("Student", "Person"), ("Employee", "Person"),
        ("UndergraduateStudent", "Student"),
    ]:
        tbox.append(_sub(a, b))
    # a little non-determinism, as in real schemas
    tbox.append(SubClassOf(Atomic("VisitingProfessor"),
                           Or(Atomic("FullProfessor"), Atomic("AssociateProfessor"))))
    for kind, role, inverse, (a, b) in _SPECIALS:
        tbox.append(_sub(kind, "Person"))
        tbox.append(SubClassOf(Atomic(kind), Some(Role(role, inverse), Or(Atomic(a), Atomic(b)))))
    tbox.append(SubClassOf(Atomic("Person"), Not(Atomic("Organization"))))
    tbox.append(SubClassOf(Atomic("Course"), Not(Atomic("Person"))))
    tbox.append(SubClassOf(Atomic("Faculty"), Some(Role("worksFor"), Atomic("Department"))))
    tbox.append(SubClassOf(Atomic("Department"), Max(1, Role("headOf", True), Atomic("Person"))))
    for _, axioms in _UNIVERSITY_DEFINITIONS[:n_defined]:
        tbox.extend(axioms)
    return tbox


def _department(p: GenParams, d: int) -> list:
    rng = _rng(p.seed, "department", d)
    out = []
    ca = lambda c, i: out.append(ClassAssertion(0, c, i))  # noqa: E731
    ra = lambda r, a, b, inv=False: out.append(RoleAssertion(0, Role(r, inv), a, b))  # noqa: E731
    dept = f"Dept{d}"
    univ = f"Univ{(d // DEPTS_PER_UNIVERSITY) % UNIVERSITY_POOL}"
    ca("Department", dept)
    ra("subOrganizationOf", dept, univ)
    groups = [f"{dept}.Group{g}" for g in range(rng.randint(6, 10))]
    for g in groups:
        ca("ResearchGroup", g)
        ra("subOrganizationOf", g, dept)

    faculty = []
    ranks = [("FullProfessor", 7), ("AssociateProfessor", 9), ("AssistantProfessor", 7), ("Lecturer", 5)]
    for rank, count in ranks:
        for k in range(count + rng.randint(-1, 1)):
            faculty.append((f"{dept}.{rank}{k}", rank))
    visiting = None
    if rng.random() < 0.5:
        visiting = f"{dept}.VisitingProfessor0"
        faculty.append((visiting, "VisitingProfessor"))

    undergrad_courses, grad_courses = [], []
    for f, rank in faculty:
        ca(rank, f)
        ra("worksFor", f, dept)
        ra("undergraduateDegreeFrom", f, f"Univ{rng.randrange(UNIVERSITY_POOL)}")
        if rank != "Lecturer":
            ra("doctoralDegreeFrom", f, f"Univ{rng.randrange(UNIVERSITY_POOL)}")
        for k in range(rng.randint(1, 2)):
            c = f"{f}.Course{k}"
            undergrad_courses.append(c)
            # some courses are typed only through the range of teacherOf
            if rng.random() < 0.9:
                ca("Course", c)
            ra("teacherOf", f, c)
        if rank != "Lecturer":
            c = f"{f}.GraduateCourse0"
            grad_courses.append(c)
            ca("GraduateCourse", c)
            ra("teacherOf", f, c)
    chair = faculty[0][0]
    ra("headOf", chair, dept)
    if rng.random() < 0.05:
        # the chair recorded a second time under another name
        alias = f"{dept}.ChairAlias"
        ca("FullProfessor", alias)
        ra("headOf", alias, dept)
    for c in undergrad_courses:
        if rng.random() < 0.15:
            ra("prerequisite", c, rng.choice(undergrad_courses))

    professors = [f for f, rank in faculty if rank.endswith("Professor") and f != visiting]
    grads = []
    for f, _ in faculty:
        for k in range(rng.randint(1, 2)):
            g = f"{f}.GradStudent{k}"
            grads.append(g)
            ca("GraduateStudent", g)
            ra("memberOf", g, dept)
            ra("undergraduateDegreeFrom", g, f"Univ{rng.randrange(UNIVERSITY_POOL)}")
            for c in rng.sample(grad_courses, min(len(grad_courses), rng.randint(1, 3))):
                ra("takesCourse", g, c)
            ra("advisor", g, rng.choice(professors))
            if rng.random() < 0.25:
                for c in rng.sample(undergrad_courses, 1 if rng.random() < 0.8 else 2):
                    ra("teachingAssistantOf", g, c)
            if rng.random() < 0.3:
                ra("worksFor", g, rng.choice(groups))
        for k in range(rng.randint(4, 7)):
            s = f"{f}.Undergrad{k}"
            ca("UndergraduateStudent", s)
            ra("memberOf", s, dept)
            for c in rng.sample(undergrad_courses, min(len(undergrad_courses), rng.randint(2, 4))):
                ra("takesCourse", s, c)
            if rng.random() < 0.2:
                ra("advisor", s, rng.choice(professors))
        for k in range(rng.randint(3, 7)):
            pub = f"{f}.Publication{k}"
            ca("Article" if rng.random() < 0.7 else "TechnicalReport", pub)
            ra("publicationAuthor", pub, f)
            if grads and rng.random() < 0.4:
                ra("publicationAuthor", pub, rng.choice(grads))
    if visiting:
        ca("GraduateStudent", f"{visiting}.Visitor")
        ra("advisor", f"{visiting}.Visitor", visiting)
    for kind, _, _, _ in _SPECIALS:
        if rng.random() < 0.3:
            ca(kind, f"{dept}.{kind}")
    # two chairs of the same department are never the same person
    if len(faculty) > 1:
        out.append(Different(0, chair, faculty[1][0]))
    return out


def _university(p: GenParams):
    abox = [ClassAssertion(0, "University", f"Univ{u}") for u in range(UNIVERSITY_POOL)]
    for d in range(p.scale):
        abox.extend(_department(p, d))
    return university_tbox(p), abox


# -- hub-heavy ----------------------------------------------------------------

HUBS = ("Country0", "Country1", "Country2", "Genre0", "Genre1")


def hubheavy_tbox(p: GenParams) -> list:
    tbox = [
        _sub("Actor", "Person"), _sub("Writer", "Person"), _sub("Athlete", "Person"),
        _sub("Film", "Work"), _sub("Book", "Work"), _sub("City", "Place"),
        _sub("Country", "Place"), _sub("Person", "Agent"),
        SubClassOf(Atomic("Person"), Not(Atomic("Place"))),
        SubRoleOf(Role("birthPlace"), Role("relatedPlace")),
        SubRoleOf(Role("locatedIn"), Role("relatedPlace")),
    ]
    for name in ("locatedIn",)[:p.transitive_count]:
        tbox.append(Transitive(name))
    density = 0.2 if p.trigger_density is None else p.trigger_density
    defs = [
        _defined("Performer", "starring", None, context=None, inverse=True),
        _defined("Local", "birthPlace", "City", context=None),
        _defined("Author", "author", "Book", context=None, inverse=True),
    ]
    tbox.extend(defs[:round(density * 10)])
    return tbox


def _hub_entity(p: GenParams, i: int) -> list:
    rng = _rng(p.seed, "entity", i)
    out = []
    name = f"E{i}"
    kind = rng.choice(("Actor", "Writer", "Athlete", "Film", "Book", "City"))
    out.append(ClassAssertion(0, kind, name))
    # Zipf-like choice of hub: most entities point at the first few hubs
    hub = HUBS[min(int(rng.paretovariate(1.2)) - 1, len(HUBS) - 1)]
    if kind in ("Actor", "Writer", "Athlete"):
        city = f"E{rng.randrange(max(1, i))}"
        out.append(RoleAssertion(0, Role("birthPlace"), name, city))
        out.append(RoleAssertion(0, Role("nationality"), name, hub))
    elif kind == "City":
        out.append(RoleAssertion(0, Role("locatedIn"), name, hub))
    else:
        out.append(RoleAssertion(0, Role("genre"), name, hub))
        if i > 0:
            other = f"E{rng.randrange(i)}"
            role = "starring" if kind == "Film" else "author"
            out.append(RoleAssertion(0, Role(role), name, other))
    return out


def _hubheavy(p: GenParams):
    abox = [ClassAssertion(0, "Country" if h.startswith("Country") else "Genre", h) for h in HUBS]
    for i in range(p.scale * 1000):
        abox.extend(_hub_entity(p, i))
    return hubheavy_tbox(p), abox


# -- flat ---------------------------------------------------------------------


def flat_tbox(p: GenParams) -> list:
    tbox = [
        _sub("Person", "Agent"), _sub("Organisation", "Agent"), _sub("Historian", "Person"),
        _sub("Event", "Situation"), _sub("Battle", "Event"), _sub("Treaty", "Event"),
        _sub("Location", "Situation"),
        SubClassOf(Atomic("Agent"), Not(Atomic("Situation"))),
        SubClassOf(Atomic("Battle"), Some(Role("involves"), Atomic("Agent"))),
        SubClassOf(Atomic("Treaty"), Or(Atomic("PeaceTreaty"), Atomic("TradeTreaty"))),
        SubRoleOf(Role("leads"), Role("involvedIn")),
    ]
    return tbox


def _flat_entity(p: GenParams, i: int) -> list:
    rng = _rng(p.seed, "entity", i)
    name = f"V{i}"
    kind = rng.choice(("Person", "Historian", "Organisation", "Battle", "Treaty", "Location"))
    out = [ClassAssertion(0, kind, name)]
    for _ in range(rng.randint(1, 4)):
        role = rng.choice(("involvedIn", "leads", "locatedAt", "relatedTo"))
        out.append(RoleAssertion(0, Role(role), name, f"V{rng.randrange(max(1, i))}"))
    return out


def _flat(p: GenParams):
    abox = []
    for i in range(p.scale * 1000):
        abox.extend(_flat_entity(p, i))
    return flat_tbox(p), abox


_BUILDERS = {"university": _university, "hubheavy": _hubheavy, "flat": _flat}


def generate_ontology(p: GenParams):
    tbox, abox = _BUILDERS[p.profile](p)
    return build_ontology(tbox, abox)


def generate(p: GenParams) -> str:
    """The ontology for ``p`` as ``.shiq`` text."""
    return serialize(generate_ontology(p))
