# -*- coding: utf-8 -*-
"""
Collection of functions to turn document and query text into generalized terms:
named-entity triples, WordNet-word features and keywords.
"""
import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib.resources import files

from .ontology_store import normalize_name
from .wsd import Resolved, Tied, Unresolved, disambiguate
from .model_registry import ModelConfig


class AnnotationWarning(Warning):
    pass


warnings.filterwarnings("always", category=AnnotationWarning)


INTERROGATIVE_CLASSES = {
    "where": "Location",
    "who": "Person",
    "when": "TimeInterval",
    "what": None,
    "which": None,
    "how": None,
}


def _escape(value):
    return value.replace("%", "%25").replace("/", "%2F").replace("*", "%2A")


def _unescape(value):
    return value.replace("%2A", "*").replace("%2F", "/").replace("%25", "%")


@dataclass(frozen=True)
class NETriple:
    """
    Named-entity triple pattern (name/class/id). Absent fields are wildcards.
    """

    name: str = None
    class_id: str = None
    entity_id: str = None

    def __post_init__(self):
        for value in (self.name, self.class_id, self.entity_id):
            if value is not None and not value.strip():
                raise ValueError("NETriple fields must be None or nonempty strings.")
        if self.name is None and self.class_id is None and self.entity_id is None:
            raise ValueError("NETriple requires at least one bound field.")
        if self.name is not None:
            object.__setattr__(self, "name", normalize_name(self.name))

    def __str__(self):
        fields = (self.name, self.class_id, self.entity_id)
        return "ne:" + "/".join("*" if f is None else _escape(f) for f in fields)


@dataclass(frozen=True)
class WWSense:
    synset_id: str

    def __str__(self):
        return f"ws:{self.synset_id}"


@dataclass(frozen=True)
class WWForm:
    form: str

    def __str__(self):
        return f"wf:{self.form}"


@dataclass(frozen=True)
class WWPair:
    form: str
    synset_id: str

    def __str__(self):
        return f"wp:{_escape(self.form)}/{self.synset_id}"


@dataclass(frozen=True)
class Keyword:
    stem: str

    def __str__(self):
        return f"kw:{self.stem}"


def parse_term(text):
    """
    Parse a serialized generalized term.

    Parameters
    ----------
    text : str
        Serialized term, e.g. "ne:*/FootballClub/*", "ws:S_MOVE1", "wp:movement/S_ACT".

    Returns
    -------
    NETriple, WWSense, WWForm, WWPair or Keyword
        The term.

    Raises
    ------
    ValueError
        If the prefix is unknown or the body is malformed.
    """
    prefix, sep, body = text.partition(":")
    if not sep or not body:
        raise ValueError(f"Malformed term {text!r}.")
    if prefix == "ne":
        parts = body.split("/")
        if len(parts) != 3:
            raise ValueError(f"Malformed NE triple {text!r}.")
        return NETriple(*(None if p == "*" else _unescape(p) for p in parts))
    if prefix == "ws":
        return WWSense(body)
    if prefix == "wf":
        return WWForm(body)
    if prefix == "wp":
        form, _, synset_id = body.rpartition("/")
        if not form or not synset_id:
            raise ValueError(f"Malformed WW pair {text!r}.")
        return WWPair(_unescape(form), synset_id)
    if prefix == "kw":
        return Keyword(body)
    raise ValueError(f"Unknown term prefix {prefix!r} in {text!r}.")


@dataclass(frozen=True)
class NEAnnotation:
    span: tuple
    name: str = None
    class_id: str = None
    entity_id: str = None


@dataclass(frozen=True)
class WWAnnotation:
    span: tuple
    form: str
    resolution: object


@dataclass
class AnnotatedDocument:
    doc_id: str
    terms: Counter
    source_length: int


@dataclass
class QueryRepresentation:
    query_id: str
    terms: list
    latent_terms: list = field(default_factory=list)


@lru_cache(maxsize=None)
def load_stop_words():
    """
    Load the bundled stop-word list.

    Returns
    -------
    frozenset of str
        The stop words.
    """
    text = (files("ontosearch") / "data" / "stop_words.txt").read_text(encoding="utf-8")
    return frozenset(line.strip().lower() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=None)
def load_lemmas():
    """
    Load the bundled lemma dictionary (surface<TAB>lemma).

    Returns
    -------
    dict
        Mapping surface form -> lemma.
    """
    text = (files("ontosearch") / "data" / "lemmas.tsv").read_text(encoding="utf-8")
    lemmas = {}
    for line in text.splitlines():
        if line.strip():
            surface, lemma = line.split("\t")
            lemmas[surface.strip().lower()] = lemma.strip().lower()
    return lemmas


def lemmatize(token):
    return load_lemmas().get(token, token)


def raw_tokens(text):
    """
    Lowercase the text and split it on non-alphanumeric characters.
    """
    return re.findall(r"[0-9a-z]+", text.lower())


def split_sentences(text):
    return [s for s in re.split(r"[.!?]+", text) if s.strip()]


def tokenize_and_filter(text):
    """
    Tokenize a text, remove stop words and lemmatize the remaining tokens.

    Parameters
    ----------
    text : str
        The text.

    Returns
    -------
    list of str
        The lemmatized tokens, in text order.
    """
    stop_words = load_stop_words()
    return [lemmatize(token) for token in raw_tokens(text) if token not in stop_words]


@dataclass(frozen=True)
class _Gazetteer:
    names: dict
    labels: dict
    forms: dict
    max_length: int


@lru_cache(maxsize=8)
def _gazetteer(store):
    names = {}
    for entity in sorted(store.entities.values(), key=lambda e: e.entity_id):
        for name in [entity.main_name, *sorted(entity.aliases)]:
            key = tuple(tokenize_and_filter(name))
            if key:
                display, ids = names.get(key, (normalize_name(name), frozenset()))
                names[key] = (display, ids | {entity.entity_id})
    labels = {}
    for node in store.classes.values():
        key = tuple(tokenize_and_filter(node.label))
        if key:
            labels.setdefault(key, node.class_id)
    forms = {}
    for form in store.forms():
        key = tuple(tokenize_and_filter(form))
        if key:
            forms.setdefault(key, form)
    max_length = max((len(k) for k in [*names, *labels, *forms]), default=0)
    return _Gazetteer(names, labels, forms, max_length)


def _longest_matches(tokens, table, max_length, blocked=()):
    blocked = set(blocked)
    matches = []
    position = 0
    while position < len(tokens):
        for length in range(min(max_length, len(tokens) - position), 0, -1):
            span = range(position, position + length)
            if blocked.intersection(span):
                continue
            key = tuple(tokens[position : position + length])
            if key in table:
                matches.append(((position, position + length), table[key]))
                position += length
                break
        else:
            position += 1
    return matches


def recognize_entities(tokens, store):
    """
    Recognize named entities and class mentions with a left-to-right longest-match gazetteer.

    A name held by a single entity gives name, class and id; a name shared by several entities
    gives the name only; a class label gives the class only.

    Parameters
    ----------
    tokens : list of str
        Filtered and lemmatized tokens.
    store : OntologyStore
        The loaded store.

    Returns
    -------
    list of NEAnnotation
        Non-overlapping annotations in token order.
    """
    gazetteer = _gazetteer(store)
    table = {key: ("class", class_id) for key, class_id in gazetteer.labels.items()}
    table.update({key: ("name", value) for key, value in gazetteer.names.items()})
    annotations = []
    for span, (kind, value) in _longest_matches(tokens, table, gazetteer.max_length):
        if kind == "class":
            annotations.append(NEAnnotation(span, class_id=value))
            continue
        display, ids = value
        if len(ids) == 1:
            entity = store.entity(next(iter(ids)))
            annotations.append(
                NEAnnotation(span, normalize_name(entity.main_name), entity.class_id, entity.entity_id)
            )
        else:
            annotations.append(NEAnnotation(span, name=display))
    return annotations


def recognize_word_forms(tokens, store, blocked=()):
    """
    Find lexicon word forms (possibly multi-word) with a longest match that skips blocked positions.

    Returns
    -------
    list of (span, form)
        Non-overlapping matches in token order.
    """
    gazetteer = _gazetteer(store)
    return _longest_matches(tokens, gazetteer.forms, gazetteer.max_length, blocked)


def expand_ne_features(ann, store):
    """
    Get the implied NE triple patterns of an annotation.

    For a fully recognized entity (n, c, id) these are (n/*/*), (*/c/*), (n/c/*), (alias/*/*),
    (*/super/*), (n/super/*), (alias/c/*), (alias/super/*) and (*/*/id), over every alias and
    every ancestor class. Partially recognized annotations get the patterns whose inputs exist.

    Parameters
    ----------
    ann : NEAnnotation
        The annotation.
    store : OntologyStore
        The loaded store.

    Returns
    -------
    set of NETriple
        The patterns.
    """
    names = [ann.name] if ann.name is not None else []
    if ann.entity_id is not None:
        names += sorted(store.entity(ann.entity_id).aliases)
    classes = []
    if ann.class_id is not None:
        classes = [ann.class_id, *store.super_classes(ann.class_id)]

    terms = {NETriple(name=n) for n in names}
    terms |= {NETriple(class_id=c) for c in classes}
    terms |= {NETriple(name=n, class_id=c) for n in names for c in classes}
    if ann.entity_id is not None:
        terms.add(NETriple(entity_id=ann.entity_id))
    return terms


def expand_ww_features(ann, store):
    """
    Get the implied WW features of a disambiguated word.

    A Resolved sense s gives s, every form of s, every direct hypernym h of s with its forms,
    and the pairs form(s)/h. A Tied word with apparent form f and common hypernym m gives f, f/m,
    the forms of m, m itself, every direct hypernym of m with its forms, and the pairs f/hypernym(m).
    A Tied word without common hypernym falls back to its apparent form.

    Parameters
    ----------
    ann : WWAnnotation
        The annotation.
    store : OntologyStore
        The loaded store.

    Returns
    -------
    set of WWSense, WWForm and WWPair
        The features.

    Raises
    ------
    ValueError
        If the annotation is Unresolved.
    """
    resolution = ann.resolution
    if isinstance(resolution, Resolved):
        synset = store.synset(resolution.synset_id)
        terms = {WWSense(synset.synset_id)} | {WWForm(f) for f in synset.forms}
        for hypernym_id in synset.hypernym_ids:
            hypernym = store.synset(hypernym_id)
            terms.add(WWSense(hypernym_id))
            terms |= {WWForm(f) for f in hypernym.forms}
            terms |= {WWPair(f, hypernym_id) for f in synset.forms}
        return terms
    if isinstance(resolution, Tied):
        if resolution.msc is None:
            warnings.warn(
                f"Senses {sorted(resolution.senses)} of {ann.form!r} have no common hypernym, only the form is kept.",
                AnnotationWarning,
                stacklevel=2,
            )
            return {WWForm(ann.form)}
        msc = store.synset(resolution.msc)
        terms = {WWForm(ann.form), WWPair(ann.form, msc.synset_id), WWSense(msc.synset_id)}
        terms |= {WWForm(f) for f in msc.forms}
        for hypernym_id in msc.hypernym_ids:
            terms.add(WWSense(hypernym_id))
            terms |= {WWForm(f) for f in store.synset(hypernym_id).forms}
            terms.add(WWPair(ann.form, hypernym_id))
        return terms
    raise ValueError(f"Cannot expand the unresolved word {ann.form!r}.")


def most_specific_ne_term(ann):
    """
    Get the single most specific triple of an annotation: (*/*/id), else (n/c/*), else (n/*/*) or (*/c/*).
    """
    if ann.entity_id is not None:
        return NETriple(entity_id=ann.entity_id)
    return NETriple(name=ann.name, class_id=ann.class_id)


def most_specific_ww_term(ann):
    resolution = ann.resolution
    if isinstance(resolution, Resolved):
        return WWSense(resolution.synset_id)
    if isinstance(resolution, Tied) and resolution.msc is not None:
        return WWPair(ann.form, resolution.msc)
    return WWForm(ann.form)


def map_interrogative(token, table=None):
    """
    Map an interrogative word to an NE class.

    Parameters
    ----------
    token : str
        The word.
    table : dict, optional
        Override of the interrogative table. Default is INTERROGATIVE_CLASSES.

    Returns
    -------
    str or None
        The class id or label, or None if the word is not mapped.
    """
    if table is None:
        table = INTERROGATIVE_CLASSES
    return table.get(token.lower())


def _context_forms(ww_spans, target_index, window):
    target_start = ww_spans[target_index][0][0]
    return [
        form
        for i, ((start, _), form) in enumerate(ww_spans)
        if i != target_index and (window is None or abs(start - target_start) <= window)
    ]


def annotate_text(text, store, graph, config):
    """
    Run the annotation steps on every sentence of a text.

    Returns
    -------
    list of (kind, annotation)
        kind is "ne", "ww" or "kw"; kw annotations are lemmatized tokens. Sentence and token order are kept.
    """
    annotations = []
    for sentence in split_sentences(text):
        tokens = tokenize_and_filter(sentence)
        sentence_annotations = []
        ne_annotations = recognize_entities(tokens, store) if config.use_ne else []
        blocked = {i for ann in ne_annotations for i in range(*ann.span)}
        sentence_annotations += [(ann.span[0], "ne", ann) for ann in ne_annotations]

        ww_spans = recognize_word_forms(tokens, store, blocked) if config.use_ww else []
        for i, (span, form) in enumerate(ww_spans):
            context = _context_forms(ww_spans, i, config.wsd.context_window)
            result = disambiguate(context, form, graph, store, config.wsd)
            if isinstance(result.outcome, Unresolved):
                continue
            blocked |= set(range(*span))
            sentence_annotations.append((span[0], "ww", WWAnnotation(span, form, result.outcome)))

        sentence_annotations += [
            (i, "kw", token) for i, token in enumerate(tokens) if i not in blocked
        ]
        annotations += [(kind, ann) for _, kind, ann in sorted(sentence_annotations, key=lambda a: a[0])]
    return annotations


def annotate_document(doc_id, text, store, graph, config=None):
    """
    Annotate a document and add the implied NE and WW features as virtual terms.

    Each occurrence counts its original term once and each of its implied terms
    virtual_term_weight times.

    Parameters
    ----------
    doc_id : str
        The document id.
    text : str
        The document text.
    store : OntologyStore
        The loaded store.
    graph : SenseGraph
        The sense graph of store.
    config : ModelConfig, optional
        Model configuration; use_ne and use_ww gate the NE and WW annotation.
        Default is ModelConfig().

    Returns
    -------
    AnnotatedDocument
        The document with its term multiset.
    """
    if config is None:
        config = ModelConfig()
    terms = Counter()
    source_length = 0
    for kind, ann in annotate_text(text, store, graph, config):
        if kind == "kw":
            source_length += 1
            terms[Keyword(ann)] += 1
            continue
        source_length += ann.span[1] - ann.span[0]
        if kind == "ne":
            original = most_specific_ne_term(ann)
            implied = expand_ne_features(ann, store)
        else:
            original = most_specific_ww_term(ann)
            implied = expand_ww_features(ann, store)
        terms[original] += 1
        for term in implied - {original}:
            terms[term] += config.virtual_term_weight
    return AnnotatedDocument(doc_id, terms, source_length)


def represent_query(query_id, text, store, graph, config=None):
    """
    Represent a query by the most specific term of each of its entities and words.

    An interrogative first word mapped to a class is replaced by the class triple (*/class/*),
    placed first. Latent terms are left empty.

    Parameters
    ----------
    query_id : str
        The query id.
    text : str
        The query text.
    store : OntologyStore
        The loaded store.
    graph : SenseGraph
        The sense graph of store.
    config : ModelConfig, optional
        Model configuration. Default is ModelConfig().

    Returns
    -------
    QueryRepresentation
        The query terms, in text order.
    """
    if config is None:
        config = ModelConfig()
    terms = []
    first = raw_tokens(text)[:1]
    if config.use_ne and first:
        class_id = map_interrogative(first[0], config.interrogatives)
        if class_id is not None and class_id not in store.classes:
            class_id = store.class_by_label(class_id)
        if class_id is not None:
            terms.append(NETriple(class_id=class_id))
    for kind, ann in annotate_text(text, store, graph, config):
        if kind == "kw":
            terms.append(Keyword(ann))
        elif kind == "ne":
            terms.append(most_specific_ne_term(ann))
        else:
            terms.append(most_specific_ww_term(ann))
    return QueryRepresentation(query_id, terms)
