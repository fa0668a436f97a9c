"""Generate a synthetic university, modularize it and print partition stats.

    python demos/benchmark_stats.py [scale]
"""

import sys
import time

from aboxmod import GenParams, generate_ontology, modularize, stats

scale = int(sys.argv[1]) if len(sys.argv) > 1 else 4
k = generate_ontology(GenParams("university", scale=scale, seed=0))
print(f"{len(k.abox)} assertions, {len(k.individuals)} individuals")
for level in ("base", "opt1", "opt2", "opt3"):
    t0 = time.perf_counter()
    p = modularize(k, opt_level=level)
    report = stats(p, timings=time.perf_counter() - t0)
    print(f"\n== {level}")
    print(report.format())
