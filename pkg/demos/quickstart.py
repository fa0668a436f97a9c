"""Parse a small ontology, split its ABox into modules and query them.

    python demos/quickstart.py
"""

from pathlib import Path

from aboxmod import Reasoner, load, modularize, module_of, retrieve_complete, retrieve_modular
from aboxmod.extractor import module_ontology

k = load(Path(__file__).with_name("university.shiq"))

for level in ("base", "opt3"):
    p = modularize(k, opt_level=level)
    print(f"{level}: {len(p.roots)} modules")
    for root in p.roots:
        m = p.module(root)
        print(f"  {','.join(sorted(m.signature)):<22} {len(m.assertions)} assertions")

p = modularize(k, opt_level="opt3")

# alice and alan both head cs, which admits a single head: they are the same
# person, so their modules were combined
m = module_of(p, "alice")
print("alan in alice's module:", "alan" in m.signature)
print("same person:", Reasoner(k).entails_same("alice", "alan"))

# each module answers questions about its own individuals
local = Reasoner(module_ontology(k, module_of(p, "bob")))
print("bob is a Student (module only):", local.entails_class("bob", "Student"))

for concept in ("Chair", "Student"):
    print(concept, sorted(retrieve_complete(k, concept)), sorted(retrieve_modular(k, p, concept)))
