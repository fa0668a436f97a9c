import pytest

from aboxmod.model import ClassAssertion, Different, Role, RoleAssertion, SubClassOf, SubRoleOf, Transitive
from aboxmod.parser import (
    ParseError,
    SpannedValidationError,
    dump,
    load,
    parse,
    parse_assertion,
    parse_concept,
    serialize,
)
from randomkb import random_kb

SAMPLE = """
# a tiny university
Transitive(subOrganizationOf)
SubRoleOf(headOf, worksFor)
SubClassOf(Chair, some(headOf, Department))
EquivalentClasses(Student, some(takesCourse, Course))
ClassAssertion(Chair, alice)
RoleAssertion(headOf, alice, cs)
RoleAssertion(inv(advisor), alice, bob)
Different(alice, bob)
"""


def test_sample_document():
    o = parse(SAMPLE)
    assert o.tbox[0] == Transitive("subOrganizationOf")
    assert o.tbox[1] == SubRoleOf(Role("headOf"), Role("worksFor"))
    assert len([a for a in o.tbox if isinstance(a, SubClassOf)]) == 3
    assert o.abox == (
        ClassAssertion(0, "Chair", "alice"),
        RoleAssertion(1, Role("headOf"), "alice", "cs"),
        RoleAssertion(2, Role("advisor", True), "alice", "bob"),
        Different(3, "alice", "bob"),
    )


def test_concept_syntax():
    c = parse_concept("and(A, or(not(B), max(2, inv(R), top)))")
    assert str(c) == "and(A, or(not(B), max(2, inv(R), top)))"
    assert str(parse_concept("bottom")) == "bottom"


def test_single_assertion():
    assert parse_assertion("ClassAssertion(A, a)") == ClassAssertion(0, "A", "a")
    with pytest.raises(ValueError):
        parse_assertion("ClassAssertion(A, a) ClassAssertion(B, a)")


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("ClassAssertion(A a)", 1, 18),
        ("\nSubClassOf(A, frob(B))", 2, 15),
        ("SubClassOf(A, min(x, R, B))", 1, 19),
        ("Transitive(R", 1, 13),
        ("Bogus(A)", 1, 1),
    ],
)
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert (err.value.span.line, err.value.span.column) == (line, column)


def test_complex_class_assertion_is_rejected_with_span():
    with pytest.raises(SpannedValidationError) as err:
        parse("ClassAssertion(and(A, B), a)")
    assert err.value.span.column == 16


@pytest.mark.parametrize("seed", range(40))
def test_round_trip(seed):
    o = random_kb(seed, depth=3)
    text = serialize(o)
    again = parse(text)
    assert again == o
    assert serialize(again) == text


def test_file_round_trip(tmp_path):
    o = parse(SAMPLE)
    path = tmp_path / "u.shiq"
    dump(o, path)
    assert load(path) == o
