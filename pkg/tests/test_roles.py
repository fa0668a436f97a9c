import itertools

from hypothesis import given, settings, strategies as st

from aboxmod.model import Role, SubRoleOf, Transitive
from aboxmod.roles import build_hierarchy

R, S, T, U = (Role(x) for x in "RSTU")


def test_inverse_closure():
    h = build_hierarchy([SubRoleOf(R, S), SubRoleOf(S.inv(), T)])
    assert h.is_subrole(R, S)
    assert h.is_subrole(R.inv(), S.inv())
    assert h.is_subrole(R.inv(), T)
    assert h.is_subrole(R, T.inv())
    assert not h.is_subrole(S, R)


def test_reflexive_and_unknown_roles():
    h = build_hierarchy([])
    assert h.is_subrole(R, R)
    assert h.super_roles(U) == frozenset({U})
    assert h.sub_roles(U) == frozenset({U})


def test_simple_roles():
    h = build_hierarchy([Transitive("T"), SubRoleOf(T, S), SubRoleOf(R, S)])
    assert h.is_transitive(T) and h.is_transitive(T.inv())
    assert not h.is_simple(S) and not h.is_simple(S.inv())
    assert h.is_simple(R)
    assert h.transitive_supers(T) == frozenset({T})


def test_cycles_make_equivalent_roles():
    h = build_hierarchy([SubRoleOf(R, S), SubRoleOf(S, R.inv())])
    assert h.is_subrole(R, R.inv()) and h.is_subrole(R.inv(), R)


ROLE_NAMES = ["R", "S", "T", "U"]
role_st = st.builds(Role, st.sampled_from(ROLE_NAMES), st.booleans())


def brute_force(edges):
    """Warshall closure over all 8 roles."""
    roles = [Role(n, i) for n in ROLE_NAMES for i in (False, True)]
    rel = {(a, b) for a in roles for b in roles if a == b}
    for a, b in edges:
        rel.add((a, b))
        rel.add((a.inv(), b.inv()))
    for k, i, j in itertools.product(roles, roles, roles):
        if (i, k) in rel and (k, j) in rel:
            rel.add((i, j))
    return roles, rel


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(role_st, role_st), max_size=8))
def test_closure_matches_brute_force(edges):
    h = build_hierarchy([SubRoleOf(a, b) for a, b in edges], [Role(n) for n in ROLE_NAMES])
    roles, rel = brute_force(edges)
    for a in roles:
        for b in roles:
            assert h.is_subrole(a, b) == ((a, b) in rel)
        assert h.sub_roles(a) == frozenset(x for x in roles if (x, a) in rel)
