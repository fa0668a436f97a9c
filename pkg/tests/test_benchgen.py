import pytest

from aboxmod.benchgen import PROFILES, GenParams, generate, generate_ontology
from aboxmod.extractor import modularize
from aboxmod.harness import restriction_defined_concepts
from aboxmod.oracle import Reasoner
from aboxmod.parser import parse
from aboxmod.roles import build_hierarchy
from aboxmod.triggers import build_trigger_index


def test_same_parameters_same_bytes():
    p = GenParams("university", scale=1, seed=7)
    assert generate(p) == generate(p)
    assert generate(p) != generate(GenParams("university", scale=1, seed=8))


@pytest.mark.parametrize("scale", [1, 3])
def test_flat_profile_has_no_triggers(scale):
    o = generate_ontology(GenParams("flat", scale=scale))
    idx = build_trigger_index(o.tbox, build_hierarchy(o))
    assert not idx and not idx.at_most_floor


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("scale", [1, 2, 4])
def test_doubling_scale_doubles_size(profile, scale):
    small = len(generate_ontology(GenParams(profile, scale=scale, seed=1)).abox)
    big = len(generate_ontology(GenParams(profile, scale=2 * scale, seed=1)).abox)
    assert 1.8 <= big / small <= 2.2


@pytest.mark.parametrize("profile", PROFILES)
def test_scaling_extends_the_population(profile):
    small = {str(a) for a in generate_ontology(GenParams(profile, scale=1, seed=3)).abox}
    big = {str(a) for a in generate_ontology(GenParams(profile, scale=2, seed=3)).abox}
    assert small <= big


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("seed", [0, 1])
def test_small_instances_are_consistent(profile, seed):
    assert Reasoner(generate_ontology(GenParams(profile, seed=seed)), timeout=120).consistent()


@pytest.mark.parametrize("profile", PROFILES)
def test_round_trip(profile):
    text = generate(GenParams(profile, seed=2))
    assert generate(GenParams(profile, seed=2)) == text
    o = parse(text)
    assert o == generate_ontology(GenParams(profile, seed=2))


def test_university_shape():
    o = generate_ontology(GenParams("university", scale=1))
    h = build_hierarchy(o)
    assert h.transitive_roles
    defined = restriction_defined_concepts(o)
    assert len(defined) >= 10
    idx = build_trigger_index(o.tbox, h)
    used = {r.name for r in idx.roles}
    assert used and used < o.role_names()


def test_hubs_collect_many_assertions():
    o = generate_ontology(GenParams("hubheavy", scale=2))
    counts = {}
    for a in o.abox:
        for i in set(a.individuals):
            counts[i] = counts.get(i, 0) + 1
    assert max(counts.values()) >= 1000
    assert sorted(counts.values())[len(counts) // 2] < 20


def test_trigger_density_controls_definitions():
    none = generate_ontology(GenParams("university", trigger_density=0.0))
    full = generate_ontology(GenParams("university", trigger_density=1.0))
    assert len(restriction_defined_concepts(none)) < len(restriction_defined_concepts(full))


def test_transitive_count():
    for k, want in ((0, 1), (1, 1), (2, 2), (3, 3)):
        o = generate_ontology(GenParams("university", transitive_count=k))
        assert len(build_hierarchy(o).transitive_roles) == 2 * want


@pytest.mark.parametrize("bad", [
    dict(profile="lubm"), dict(scale=0), dict(trigger_density=1.5), dict(transitive_count=-1),
])
def test_parameters_are_validated(bad):
    with pytest.raises(ValueError):
        GenParams(**bad)


def test_flat_partition_is_singleton():
    p = modularize(generate_ontology(GenParams("flat", scale=1)))
    assert all(len(s) == 1 for s in p.root_signature.values())
