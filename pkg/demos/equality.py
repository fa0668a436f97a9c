"""At-most restrictions can force two named individuals together; their
modules must then be combined.

    python demos/equality.py
"""

from aboxmod import Reasoner, modularize, module_of, parse, potential_equivalents
from aboxmod.extractor import module_ontology
from aboxmod.roles import build_hierarchy
from aboxmod.triggers import build_trigger_index

k = parse("""
SubClassOf(Anchor, max(1, R, C))
SubClassOf(D, all(S, E))
ClassAssertion(Anchor, x)
RoleAssertion(R, x, y1)
RoleAssertion(R, x, y2)
ClassAssertion(C, y1)
ClassAssertion(C, y2)
ClassAssertion(D, y1)
RoleAssertion(S, y2, w)
""")

h = build_hierarchy(k)
for cs in potential_equivalents(k, h, build_trigger_index(k.tbox, h)):
    print(f"anchor {cs.anchor}: {sorted(cs.candidates)} may coincide "
          f"(floor {cs.floor}, observed {cs.observed_max})")

p = modularize(k)
m = module_of(p, "w")
print("module of w:", sorted(m.signature))
print("w is an E (whole):", Reasoner(k).entails_class("w", "E"))
print("w is an E (module):", Reasoner(module_ontology(k, m)).entails_class("w", "E"))
