"""Retrieval over modules, partition statistics and the ``aboxmod`` CLI."""

from __future__ import annotations

import argparse
import json
import os
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .benchgen import PROFILES, GenParams, generate
from .extractor import (
    OPT_LEVELS,
    IndexFormatError,
    ModulePartition,
    module_of,
    modularize,
    ontology_digest,
    read_index,
    write_index,
)
from .model import Atomic, ClassAssertion, Different, Min, Ontology, RoleAssertion, SubClassOf, subconcepts
from .normalize import as_normalized
from .oracle import InconsistentOntologyError, OracleTimeout, Reasoner, Tableau, _abox_facts, compile_tbox
from .parser import ParseError, load, parse_assertion

SIGNATURE_BINS = ((1, 1), (2, 5), (6, 20), (21, 50), (51, 200), (201, 600), (601, None))


def _bin_label(lo, hi):
    if hi is None:
        return f"{lo}+"
    return str(lo) if lo == hi else f"{lo}-{hi}"


# -- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class StatsReport:
    assertion_count: int
    individual_count: int
    module_count: int
    max_assertions_per_module: int
    avg_assertions_per_module: float
    max_signature_size: int
    avg_signature_size: float
    percent_modules_le10_assertions: float
    percent_singleton_signatures: float
    signature_histogram: dict
    avg_extraction_ms_per_individual: Optional[float] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def format(self) -> str:
        lines = [
            f"assertions            {self.assertion_count}",
            f"individuals           {self.individual_count}",
            f"modules               {self.module_count}",
            f"assertions/module     max {self.max_assertions_per_module}"
            f"  avg {self.avg_assertions_per_module:.2f}",
            f"signature size        max {self.max_signature_size}  avg {self.avg_signature_size:.2f}",
            f"modules with <=10     {self.percent_modules_le10_assertions:.2f}%",
            f"singleton signatures  {self.percent_singleton_signatures:.2f}%",
        ]
        if self.avg_extraction_ms_per_individual is not None:
            lines.append(f"extraction/individual {self.avg_extraction_ms_per_individual:.4f} ms")
        lines.append("signature sizes:")
        for label, count in self.signature_histogram.items():
            lines.append(f"  {label:>8} {count}")
        return "\n".join(lines)


def stats(p: ModulePartition, timings: Optional[float] = None) -> StatsReport:
    """Aggregate a partition. ``timings`` is the total extraction time in
    seconds; it is not stored in the index, so it must be passed in."""
    roots = p.roots
    sizes = [len(p.root_assertions[r]) for r in roots]
    sigs = [len(p.root_signature[r]) for r in roots]
    all_ids = set()
    for r in roots:
        all_ids |= p.root_assertions[r]
    k = len(roots)
    hist = {}
    for lo, hi in SIGNATURE_BINS:
        hist[_bin_label(lo, hi)] = sum(1 for s in sigs if s >= lo and (hi is None or s <= hi))
    n_ind = len(p.union_find)
    return StatsReport(
        assertion_count=len(all_ids),
        individual_count=n_ind,
        module_count=k,
        max_assertions_per_module=max(sizes, default=0),
        avg_assertions_per_module=sum(sizes) / k if k else 0.0,
        max_signature_size=max(sigs, default=0),
        avg_signature_size=sum(sigs) / k if k else 0.0,
        percent_modules_le10_assertions=100.0 * sum(1 for s in sizes if s <= 10) / k if k else 0.0,
        percent_singleton_signatures=100.0 * sum(1 for s in sigs if s == 1) / k if k else 0.0,
        signature_histogram=hist,
        avg_extraction_ms_per_individual=(
            None if timings is None or not n_ind else 1000.0 * timings / n_ind),
    )


# -- retrieval ----------------------------------------------------------------


class RetrievalFailed(RuntimeError):
    pass


def restriction_defined_concepts(o: Ontology) -> list:
    """Atomic names that some axiom derives from a role restriction on its
    left side (the concepts whose instances depend on role assertions)."""
    out = set()
    norm = as_normalized(o.tbox)
    for ax in norm.gcis + norm.companions:
        if any(isinstance(c, Min) for c in subconcepts(ax.lhs)):
            out |= {n for n in _atoms(ax.rhs) if not n.startswith("_")}
    return sorted(out)


def _atoms(c):
    return [x.name for x in subconcepts(c) if isinstance(x, Atomic)]


def select_concepts(o: Ontology, n: int, seed: int) -> list:
    pool = restriction_defined_concepts(o)
    return sorted(random.Random(seed).sample(pool, min(n, len(pool))))


def retrieve_complete(k: Ontology, concept: str, reasoner: Reasoner | None = None,
                      timeout: float | None = None) -> set:
    """Instances of ``concept`` by instance checking every individual on the
    whole ontology."""
    r = reasoner or Reasoner(k, timeout=timeout)
    if not r.consistent():
        raise InconsistentOntologyError("ontology is inconsistent")
    return {a for a in r.individuals if r.entails_class(a, concept)}


def _module_tasks(k: Ontology, p: ModulePartition):
    """(root, module ontology, signature) in root order."""
    for root in p.roots:
        m = p.module(root)
        yield root, k.restrict(m.assertions), sorted(m.signature)


def _check_module(onto, tbox, signature, concepts, timeout):
    """Instance checks for one module; returns ({concept: members}, [ms])."""
    r = Reasoner(onto, tbox=tbox, timeout=timeout)
    if not r.consistent():
        raise RetrievalFailed("a module of a consistent ontology is inconsistent")
    found, times = {}, []
    for c in concepts:
        hits = []
        for a in signature:
            t0 = time.perf_counter()
            if r.entails_class(a, c):
                hits.append(a)
            times.append(1000.0 * (time.perf_counter() - t0))
        found[c] = hits
    return found, times


_WORKER = {}


def _worker_init(text, root_assertions, root_signature, concepts, timeout):
    from .parser import parse
    k = parse(text)
    _WORKER.update(k=k, tbox=as_normalized(k.tbox), ra=root_assertions, rs=root_signature,
                   concepts=concepts, timeout=timeout)


def _worker_run(roots):
    w = _WORKER
    out = []
    for root in roots:
        onto = w["k"].restrict(w["ra"][root])
        out.append(_check_module(onto, w["tbox"], sorted(w["rs"][root]), w["concepts"], w["timeout"]))
    return out


def retrieve_modular_many(k: Ontology, p: ModulePartition, concepts, workers: int = 1,
                          timeout: float | None = None):
    """Instances of every concept in ``concepts`` using one reasoner per
    module. Returns ({concept: set}, [instance-check ms])."""
    concepts = list(concepts)
    results = {c: set() for c in concepts}
    times = []
    if workers <= 1:
        tbox = as_normalized(k.tbox)
        outs = (_check_module(onto, tbox, sig, concepts, timeout) for _, onto, sig in _module_tasks(k, p))
        for found, ts in outs:
            for c, hits in found.items():
                results[c].update(hits)
            times.extend(ts)
        return results, times
    from .parser import serialize
    roots = p.roots
    chunk = max(1, len(roots) // (workers * 8))
    batches = [roots[i:i + chunk] for i in range(0, len(roots), chunk)]
    ra = {r: p.root_assertions[r] for r in roots}
    rs = {r: p.root_signature[r] for r in roots}
    with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                             initargs=(serialize(k), ra, rs, concepts, timeout)) as pool:
        for batch in pool.map(_worker_run, batches):
            for found, ts in batch:
                for c, hits in found.items():
                    results[c].update(hits)
                times.extend(ts)
    return results, times


def retrieve_modular(k: Ontology, p: ModulePartition, concept: str, workers: int = 1,
                     timeout: float | None = None) -> set:
    """Union over modules of the signature members that the module alone
    shows to be instances of ``concept``."""
    return retrieve_modular_many(k, p, [concept], workers, timeout)[0][concept]


@dataclass
class RetrievalReport:
    concept: str
    result: list
    complete_ms: Optional[float] = None
    modular_ms: Optional[float] = None
    parallel_ms: Optional[float] = None
    ic_max_ms: Optional[float] = None
    ic_avg_ms: Optional[float] = None
    failed: bool = False
    notes: list = field(default_factory=list)

    def format(self) -> str:
        lines = [f"concept {self.concept}: {len(self.result)} instance(s)"
                 + ("  FAILED" if self.failed else "")]
        for label, v in (("complete", self.complete_ms), ("modular (sequential)", self.modular_ms),
                         ("modular (parallel)", self.parallel_ms)):
            if v is not None:
                lines.append(f"  {label:<22} {v:10.1f} ms")
        if self.ic_max_ms is not None:
            lines.append(f"  module instance check   max {self.ic_max_ms:.3f} ms  avg {self.ic_avg_ms:.3f} ms")
        lines.extend(f"  {n}" for n in self.notes)
        lines.extend(f"  {a}" for a in self.result)
        return "\n".join(lines)


def _median_ms(fn, repeat):
    times, value = [], None
    for _ in range(max(1, repeat)):
        t0 = time.monotonic()
        value = fn()
        times.append(1000.0 * (time.monotonic() - t0))
    return value, statistics.median(times)


def compare_retrieval(k: Ontology, p: ModulePartition, concept: str, workers: int = 1,
                      repeat: int = 3, timeout: float | None = None) -> RetrievalReport:
    complete, t_complete = _median_ms(lambda: retrieve_complete(k, concept, timeout=timeout), repeat)
    (found, ics), t_mod = _median_ms(
        lambda: retrieve_modular_many(k, p, [concept], 1, timeout), repeat)
    modular = found[concept]
    rep = RetrievalReport(concept, sorted(complete), complete_ms=t_complete, modular_ms=t_mod,
                          ic_max_ms=max(ics, default=0.0),
                          ic_avg_ms=statistics.fmean(ics) if ics else 0.0)
    if workers > 1:
        (pfound, _), rep.parallel_ms = _median_ms(
            lambda: retrieve_modular_many(k, p, [concept], workers, timeout), repeat)
        if pfound[concept] != modular:
            rep.failed = True
            rep.notes.append("parallel and sequential modular results differ")
    if modular != complete:
        rep.failed = True
        rep.notes.append(f"modular-only: {sorted(modular - complete)}; "
                         f"complete-only: {sorted(complete - modular)}")
    return rep


# -- CLI ----------------------------------------------------------------------


def _load_partition(index_path, k: Ontology) -> ModulePartition:
    p = read_index(index_path)
    if p.ontology_sha256 != ontology_digest(k):
        raise SystemExit(f"error: index {index_path} was built from a different ontology")
    return p


def cmd_extract(args):
    k = load(args.file)
    t0 = time.perf_counter()
    p = modularize(k, opt_level=args.opt)
    elapsed = time.perf_counter() - t0
    write_index(p, args.out)
    print(f"{len(p.roots)} modules over {len(p.union_find)} individuals "
          f"({1000 * elapsed:.1f} ms) -> {args.out}")


def cmd_stats(args):
    report = stats(read_index(args.index))
    print(report.to_json() if args.json else report.format())


def cmd_module(args):
    p = read_index(args.index)
    names = [s.strip() for s in args.ind.split(",") if s.strip()]
    unknown = [n for n in names if n not in p.union_find]
    m = module_of(p, names)
    print("signature: " + ",".join(sorted(m.signature)))
    print("assertions: " + ",".join(str(i) for i in sorted(m.assertions)))
    if unknown:
        print("unknown individuals: " + ",".join(unknown), file=sys.stderr)


def cmd_retrieve(args):
    k = load(args.file)
    p = _load_partition(args.index, k) if args.index else modularize(k, opt_level=args.opt)
    concepts = args.concept or []
    if args.random:
        concepts += select_concepts(k, args.random, args.seed)
    if not concepts:
        raise SystemExit("error: give --concept or --random")
    workers = args.workers or os.cpu_count() or 1
    failed = False
    for c in concepts:
        if args.compare:
            rep = compare_retrieval(k, p, c, workers=workers, repeat=args.repeat)
        else:
            found, ics = retrieve_modular_many(k, p, [c], workers)
            rep = RetrievalReport(c, sorted(found[c]), ic_max_ms=max(ics, default=0.0),
                                  ic_avg_ms=statistics.fmean(ics) if ics else 0.0)
        failed |= rep.failed
        print(rep.format())
    return 1 if failed else 0


def cmd_oracle_check(args):
    k = load(args.file)
    a = parse_assertion(args.assertion)
    r = Reasoner(k, timeout=args.timeout)
    if not r.consistent():
        print("inconsistent-ontology")
        return 0
    if isinstance(a, ClassAssertion):
        ok = r.entails_class(a.individual, a.concept)
    elif isinstance(a, RoleAssertion):
        ok = r.entails_role(a.subject, a.role, a.object)
    elif isinstance(a, Different):
        ok = _entails_different(k, a, args.timeout)
    print("entailed" if ok else "not-entailed")
    return 0


def _entails_different(k, a, timeout):
    """``a ≉ b`` holds iff identifying the two is inconsistent."""
    classes, roles, diffs = _abox_facts(k)
    rename = {a.second: a.first}
    classes = [(rename.get(i, i), c) for i, c in classes]
    roles = [(r, rename.get(x, x), rename.get(y, y)) for r, x, y in roles]
    diffs = [(rename.get(x, x), rename.get(y, y)) for x, y in diffs]
    inds = sorted({rename.get(i, i) for i in k.individuals})
    if any(x == y for x, y in diffs):
        return True
    t = Tableau(compile_tbox(as_normalized(k.tbox)), inds, classes, roles, diffs, timeout=timeout)
    return not t.run()


def cmd_gen(args):
    text = generate(GenParams(args.profile, args.scale, args.seed,
                              args.trigger_density, args.transitive_count))
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"{text.count(chr(10))} statements -> {args.out}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aboxmod", description="ABox modularization for SHIQ ontologies")
    sub = ap.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("extract", help="compute modules and write an index")
    s.add_argument("file")
    s.add_argument("--opt", choices=OPT_LEVELS, default="base")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_extract)

    s = sub.add_parser("stats", help="module statistics of an index")
    s.add_argument("index")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_stats)

    s = sub.add_parser("module", help="print the module of some individuals")
    s.add_argument("index")
    s.add_argument("--ind", required=True, help="comma-separated individual names")
    s.set_defaults(fn=cmd_module)

    s = sub.add_parser("retrieve", help="instance retrieval over modules")
    s.add_argument("file")
    s.add_argument("--concept", action="append", help="atomic concept (repeatable)")
    s.add_argument("--random", type=int, default=0, metavar="N",
                   help="also query N randomly chosen restriction-defined concepts")
    s.add_argument("--seed", type=int, default=0, help="seed for --random")
    s.add_argument("--index")
    s.add_argument("--opt", choices=OPT_LEVELS, default="opt3", help="level when no index is given")
    s.add_argument("--workers", type=int, default=0, help="worker processes (default: logical cores)")
    s.add_argument("--compare", action="store_true", help="also run complete retrieval and compare")
    s.add_argument("--repeat", type=int, default=3, help="timing repetitions (median is reported)")
    s.set_defaults(fn=cmd_retrieve)

    s = sub.add_parser("oracle-check", help="decide one assertion with the tableau")
    s.add_argument("file")
    s.add_argument("--assert", dest="assertion", required=True)
    s.add_argument("--timeout", type=float, default=None)
    s.set_defaults(fn=cmd_oracle_check)

    s = sub.add_parser("gen", help="generate a synthetic ontology")
    s.add_argument("--profile", choices=PROFILES, required=True)
    s.add_argument("--scale", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--trigger-density", type=float, default=None)
    s.add_argument("--transitive-count", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args) or 0
    except (OSError, ParseError, IndexFormatError, ValueError, InconsistentOntologyError,
            OracleTimeout, RetrievalFailed) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
