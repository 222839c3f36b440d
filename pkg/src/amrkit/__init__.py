"""Toolkit for Abstract Meaning Representation graphs.

Modules:

- ``graph``: immutable AMR graph model and triple decomposition
- ``penman``: PENMAN parsing, wiki stripping, canonical serialization
- ``validate``: structural and frame-argument quality checks
- ``smatch``: Smatch scoring (hill-climbing and exact search)
- ``corpus``: AMR corpus files, filtering, splitting, statistics
- ``cli``: the ``amrkit`` command-line interface
"""

from .graph import AmrGraph, Concept, Constant, Edge, Triple, Variable
from .penman import (
    DiagnosticCode,
    ParseDiagnostic,
    ParseError,
    canonicalize,
    parse,
    serialize_canonical,
    strip_wiki,
)
from .validate import (
    FrameEntry,
    FrameLexicon,
    LexiconError,
    Rule,
    ValidationReport,
    Violation,
    check_and_operands,
    check_frame_args,
    default_frame_lexicon,
    load_frame_lexicon,
    validate,
)
from .smatch import (
    MatchConfig,
    SmatchScore,
    VarMapping,
    match_exact,
    match_hillclimb,
    matched_triples,
    score_corpus,
    score_pair,
)
from .corpus import (
    CorpusEntry,
    CorpusFormatError,
    FilterOutcome,
    NodeFrequencyTable,
    entries_from_text,
    filter_corpus,
    format_amr_document,
    read_amr_file,
    sample_corpus,
    split_corpus,
    top_node_stats,
    write_amr_file,
)

__version__ = "0.1.0"

__all__ = [
    "AmrGraph",
    "Concept",
    "Constant",
    "Edge",
    "Triple",
    "Variable",
    "DiagnosticCode",
    "ParseDiagnostic",
    "ParseError",
    "canonicalize",
    "parse",
    "serialize_canonical",
    "strip_wiki",
    "FrameEntry",
    "FrameLexicon",
    "LexiconError",
    "Rule",
    "ValidationReport",
    "Violation",
    "check_and_operands",
    "check_frame_args",
    "default_frame_lexicon",
    "load_frame_lexicon",
    "validate",
    "MatchConfig",
    "SmatchScore",
    "VarMapping",
    "match_exact",
    "match_hillclimb",
    "matched_triples",
    "score_corpus",
    "score_pair",
    "CorpusEntry",
    "CorpusFormatError",
    "FilterOutcome",
    "NodeFrequencyTable",
    "entries_from_text",
    "filter_corpus",
    "format_amr_document",
    "read_amr_file",
    "sample_corpus",
    "split_corpus",
    "top_node_stats",
    "write_amr_file",
    "__version__",
]
