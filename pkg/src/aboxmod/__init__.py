"""ABox modules for SHIQ ontologies: extraction, a reference tableau, synthetic
benchmarks and a retrieval harness."""

from .benchgen import GenParams, generate, generate_ontology
from .extractor import (
    EqualityCandidateSet,
    MergeDirective,
    Module,
    ModulePartition,
    UnionFind,
    classification_merges,
    modularize,
    module_of,
    potential_equivalents,
    property_module,
    read_index,
    write_index,
)
from .harness import RetrievalReport, StatsReport, retrieve_complete, retrieve_modular, stats
from .model import Ontology, Role, build_ontology, inv
from .normalize import NormalizedTBox, normalize
from .oracle import (
    InconsistentOntologyError,
    NonSimpleRoleError,
    OracleTimeout,
    Reasoner,
    consistent,
    entails_class,
    entails_role,
    subsumed,
)
from .parser import ParseError, SourceSpan, load, parse, serialize
from .roles import RoleHierarchy, build_hierarchy
from .triggers import Trigger, TriggerIndex, build_trigger_index

__all__ = [
    "EqualityCandidateSet", "GenParams", "InconsistentOntologyError", "MergeDirective", "Module",
    "ModulePartition", "NonSimpleRoleError", "NormalizedTBox", "Ontology", "OracleTimeout",
    "ParseError", "Reasoner", "RetrievalReport", "Role", "RoleHierarchy", "SourceSpan",
    "StatsReport", "Trigger", "TriggerIndex", "UnionFind", "build_hierarchy", "build_ontology",
    "build_trigger_index", "classification_merges", "consistent", "entails_class", "entails_role",
    "generate", "generate_ontology", "inv", "load", "modularize", "module_of", "normalize", "parse",
    "potential_equivalents", "property_module", "read_index", "retrieve_complete",
    "retrieve_modular", "serialize", "stats", "subsumed", "write_index",
]
