"""Ontology-guided sequential pattern mining over web access logs.

The pipeline runs in stages, each persisting a plain-text artifact:

    access log --preprocess--> sessions --map--> instance sequences
        --mine--> frequent sequences --> sequential rules --> recommendations
"""

from ontorec.logs import LogEntry, Session, clean_entries, parse_log_line, sessionize
from ontorec.mapper import (
    SemanticObject,
    SemanticSequence,
    SequenceDatabase,
    build_sequence_database,
    map_session,
)
from ontorec.miner import (
    FrequentSequence,
    MinerParams,
    apriori_join,
    count_support,
    is_subsequence,
    onto_spm,
)
from ontorec.ontology import (
    UNREACHABLE,
    AnnotationMap,
    Ontology,
    SemanticDistanceMatrix,
    build_distance_matrix,
    concept_distance,
    load_annotations,
    load_ontology,
)
from ontorec.rules import Recommendation, RuleBase, SequentialRule, generate_rules, recommend

__version__ = "0.1.0"

__all__ = [
    "UNREACHABLE",
    "AnnotationMap",
    "FrequentSequence",
    "LogEntry",
    "MinerParams",
    "Ontology",
    "Recommendation",
    "RuleBase",
    "SemanticDistanceMatrix",
    "SemanticObject",
    "SemanticSequence",
    "SequenceDatabase",
    "SequentialRule",
    "Session",
    "apriori_join",
    "build_distance_matrix",
    "build_sequence_database",
    "clean_entries",
    "concept_distance",
    "count_support",
    "generate_rules",
    "is_subsequence",
    "load_annotations",
    "load_ontology",
    "map_session",
    "onto_spm",
    "parse_log_line",
    "recommend",
    "sessionize",
]
