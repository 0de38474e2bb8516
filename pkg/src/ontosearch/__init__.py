"""Semantic text search with named-entity and WordNet-word annotation, relation-constrained query expansion and TREC-style evaluation."""

__version__ = "0.3.0"

from .ontology_store import (
    ConceptRef,
    ClassNode,
    EntityRecord,
    Synset,
    Fact,
    RelationPhraseEntry,
    OntologyStore,
    OntologyError,
    OntologyParseError,
    DanglingReferenceError,
    CycleError,
    UnknownIdError,
    NoCommonHypernymError,
    DataFormatError,
    load_store,
)

from .wsd import (
    PPRConfig,
    SenseGraph,
    DisambiguationResult,
    Resolved,
    Tied,
    Unresolved,
    build_sense_graph,
    personalized_pagerank,
    disambiguate,
)

from .model_registry import (
    ModelConfig,
    PRESETS,
    get_preset,
    load_model_config,
    create_model_registry,
    get_model_from_registry,
    update_model_registry,
)

from .annotation import (
    NETriple,
    WWSense,
    WWForm,
    WWPair,
    Keyword,
    NEAnnotation,
    WWAnnotation,
    AnnotatedDocument,
    QueryRepresentation,
    AnnotationWarning,
    parse_term,
    tokenize_and_filter,
    recognize_entities,
    expand_ne_features,
    expand_ww_features,
    annotate_document,
    map_interrogative,
    represent_query,
)

from .vsm_index import (
    Vocabulary,
    InvertedIndex,
    ScoredDoc,
    SearchResult,
    IndexCompatibilityError,
    build_index,
    search,
    score_document,
    save_index,
    load_index,
)

from .rcsa import (
    RelationMention,
    ConceptMention,
    QueryTriple,
    OntologyEdge,
    LatentConcept,
    recognize_relation_phrases,
    recognize_initial_concepts,
    form_triples,
    derive_latent_concepts,
    render_latent_concepts,
    csa_expand,
    noise_concepts,
    expand_query,
)

from .evaluation import (
    MetricReport,
    QrelsWarning,
    average_precision,
    mean_average_precision,
    interpolated_pr_and_f,
    randomization_test,
    evaluate,
    read_qrels,
    read_run,
    write_run,
)

from .corpus import read_corpus, read_topics
from .get_fixture_data import get_fixture_paths, get_fixture_store

__all__ = [
    "__version__",
    "ConceptRef",
    "ClassNode",
    "EntityRecord",
    "Synset",
    "Fact",
    "RelationPhraseEntry",
    "OntologyStore",
    "OntologyError",
    "OntologyParseError",
    "DanglingReferenceError",
    "CycleError",
    "UnknownIdError",
    "NoCommonHypernymError",
    "DataFormatError",
    "load_store",
    "PPRConfig",
    "SenseGraph",
    "DisambiguationResult",
    "Resolved",
    "Tied",
    "Unresolved",
    "build_sense_graph",
    "personalized_pagerank",
    "disambiguate",
    "ModelConfig",
    "PRESETS",
    "get_preset",
    "load_model_config",
    "create_model_registry",
    "get_model_from_registry",
    "update_model_registry",
    "NETriple",
    "WWSense",
    "WWForm",
    "WWPair",
    "Keyword",
    "NEAnnotation",
    "WWAnnotation",
    "AnnotatedDocument",
    "QueryRepresentation",
    "AnnotationWarning",
    "parse_term",
    "tokenize_and_filter",
    "recognize_entities",
    "expand_ne_features",
    "expand_ww_features",
    "annotate_document",
    "map_interrogative",
    "represent_query",
    "Vocabulary",
    "InvertedIndex",
    "ScoredDoc",
    "SearchResult",
    "IndexCompatibilityError",
    "build_index",
    "search",
    "score_document",
    "save_index",
    "load_index",
    "RelationMention",
    "ConceptMention",
    "QueryTriple",
    "OntologyEdge",
    "LatentConcept",
    "recognize_relation_phrases",
    "recognize_initial_concepts",
    "form_triples",
    "derive_latent_concepts",
    "render_latent_concepts",
    "csa_expand",
    "noise_concepts",
    "expand_query",
    "MetricReport",
    "QrelsWarning",
    "average_precision",
    "mean_average_precision",
    "interpolated_pr_and_f",
    "randomization_test",
    "evaluate",
    "read_qrels",
    "read_run",
    "write_run",
    "read_corpus",
    "read_topics",
    "get_fixture_paths",
    "get_fixture_store",
]
