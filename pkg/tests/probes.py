"""Shared property probes used by unit and acceptance tests."""

from __future__ import annotations

import random
import time

from aboxmod.model import Atomic, ClassAssertion, Different, Min, Role, RoleAssertion, build_ontology, conj
from aboxmod.oracle import OracleTimeout, Reasoner
from aboxmod.roles import build_hierarchy
from aboxmod.triggers import build_trigger_index
from randomkb import random_kb


def _entailed_at_p(tbox, n, r0, b, c, names, timeout):
    """Atomic consequences of ``min(n, r0, and(b)) and and(c)`` (or of
    ``and(c)`` alone when ``n`` is 0), with ``b`` and ``c`` lists of concept
    names, computed on a small ABox that realizes the concept at ``p``.
    Returns None when the concept is unsatisfiable."""
    abox = []
    abox += [ClassAssertion(0, x, "p") for x in c]
    succ = [f"q{i}" for i in range(n)]
    for q in succ:
        abox.append(RoleAssertion(0, r0, "p", q))
        abox += [ClassAssertion(0, x, q) for x in b]
    abox += [Different(0, x, y) for i, x in enumerate(succ) for y in succ[i + 1:]]
    r = Reasoner(build_ontology(tbox, abox), timeout=timeout)
    if not r.consistent():
        return None
    return r.entailed_classes("p", names)


def trigger_probe(seed, samples=12, timeout=10.0, budget=None):
    """Check that every role able to fire a subsumption has a trigger.

    For random ``min(n, R0, B) and C`` (``B`` and ``C`` conjunctions of up
    to three names) on a random TBox, every atomic ``D``
    that the concept entails but ``C`` alone does not must come with a
    trigger on ``R0``. Unsatisfiable antecedents are skipped. Returns
    ``(checked, violations)``."""
    kb = random_kb(seed, n_axioms=(3, 10), depth=2)
    tbox = kb.tbox
    h = build_hierarchy(tbox)
    idx = build_trigger_index(tbox, h)
    rng = random.Random(f"probe/{seed}")
    names = sorted(kb.concept_names()) or ["A0"]
    roles = sorted(r for r in h.roles if not r.name.startswith("_")) or [Role("R0")]
    simple = [r for r in roles if h.is_simple(r)]
    checked, bad = 0, []
    stop = None if budget is None else time.monotonic() + budget
    for _ in range(samples):
        if stop is not None and time.monotonic() > stop:
            break
        n = rng.randint(1, 3) if simple else 1
        r0 = rng.choice(roles if n == 1 else simple)
        b = rng.sample(names, min(len(names), rng.randint(0, 3)))
        c = rng.sample(names, min(len(names), rng.randint(0, 2)))
        try:
            with_r = _entailed_at_p(tbox, n, r0, b, c, names, timeout)
            if with_r is None:
                continue
            alone = _entailed_at_p(tbox, 0, r0, b, c, names, timeout)
        except OracleTimeout:
            continue
        fired = with_r - (alone or set())
        if not fired:
            continue
        checked += 1
        if not idx.triggers(r0):
            bad.append((seed, str(Min(n, r0, conj(map(Atomic, b)))), str(conj(map(Atomic, c))),
                        sorted(fired), bool(idx.triggers(r0.inv()))))
    return checked, bad


def module_check(kb, levels=("base", "opt1", "opt2", "opt3"), timeout=10.0, same=False):
    """Compare entailments about each individual on its module with those on
    the whole ontology. Returns ``(checks, mismatches)``, or None when the
    ontology is inconsistent. Atomic classes, role assertions in both
    directions over the asserted vocabulary and, with ``same``, equalities
    between individuals are compared."""
    from aboxmod.extractor import modularize, module_of

    whole = Reasoner(kb, timeout=timeout)
    if not whole.consistent():
        return None
    names = sorted(kb.concept_names())
    roles = [Role(x, i) for x in sorted(kb.role_names()) for i in (False, True)]
    inds = kb.individuals

    def facts(r, a):
        return frozenset(r.entailed_classes(a, names)), frozenset(r.entailed_roles(a, roles, inds))

    truth = {a: facts(whole, a) for a in inds}
    cache = {}
    checks, bad = 0, []
    for level in levels:
        p = modularize(kb, opt_level=level)
        for a in inds:
            m = module_of(p, a)
            rm = cache.get(m.assertions)
            if rm is None:
                rm = cache[m.assertions] = Reasoner(kb.restrict(m.assertions), timeout=timeout)
            checks += 1
            got = facts(rm, a)
            if got != truth[a]:
                bad.append((level, a, truth[a], got))
        if same:
            for i, a in enumerate(inds):
                for b in inds[i + 1:]:
                    m = module_of(p, (a, b))
                    rm = cache.get(m.assertions)
                    if rm is None:
                        rm = cache[m.assertions] = Reasoner(kb.restrict(m.assertions), timeout=timeout)
                    checks += 1
                    want = whole.entails_same(a, b)
                    if (a in m.signature and b in m.signature and rm.entails_same(a, b)) != want:
                        bad.append((level, (a, b), want))
    return checks, bad


def equality_scenario(index):
    """An ABox whose individuals are forced equal by at-most restrictions.

    An anchor ``x`` has ``k`` R-neighbors in ``C`` under ``max(n, R, C)``
    (floor ``n`` in 1..2, ``k`` up to 5), neighbors carry classes and
    S-edges whose consequences flow through the forced equalities, some
    neighbor pairs may be explicitly different, and odd scenarios add a
    second level where the neighbors are themselves anchors."""
    from aboxmod.parser import parse

    rng = random.Random(f"equality/{index}")
    n = rng.randint(1, 2)
    k = rng.randint(n + 1, 5)
    lines = [
        f"SubClassOf(Anchor, max({n}, R, C))",
        "SubClassOf(D, all(S, E))",
        "SubClassOf(and(C, G), F)",
        "SubClassOf(some(S, H), K)",
        "SubClassOf(Anchor2, max(1, R2, C))",
        "ClassAssertion(Anchor, x)",
    ]
    ys = [f"y{j}" for j in range(k)]
    for y in ys:
        lines.append(f"RoleAssertion(R, x, {y})")
        lines.append(f"ClassAssertion(C, {y})")
        for cls in ("D", "G"):
            if rng.random() < 0.3:
                lines.append(f"ClassAssertion({cls}, {y})")
        if rng.random() < 0.5:
            w = f"w_{y}"
            lines.append(f"RoleAssertion(S, {y}, {w})")
            if rng.random() < 0.5:
                lines.append(f"ClassAssertion(H, {w})")
    if rng.random() < 0.5:
        for _ in range(rng.randint(1, k - 1)):
            a, b = rng.sample(ys, 2)
            lines.append(f"Different({a}, {b})")
    if index % 2:
        for y in ys[:2]:
            lines.append(f"ClassAssertion(Anchor2, {y})")
            for j in range(2):
                z = f"z_{y}_{j}"
                lines.append(f"RoleAssertion(R2, {y}, {z})")
                lines.append(f"ClassAssertion(C, {z})")
                if rng.random() < 0.4:
                    lines.append(f"ClassAssertion(D, {z})")
                if rng.random() < 0.4:
                    lines.append(f"RoleAssertion(S, {z}, v_{z})")
    return parse("\n".join(lines))
