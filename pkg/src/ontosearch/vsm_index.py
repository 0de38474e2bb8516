# -*- coding: utf-8 -*-
"""
Collection of functions for the generalized vector space model: vocabulary, inverted index and cosine retrieval.
"""
import json
import math
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .model_registry import model_config_to_dict
from .ontology_store import DataFormatError


class IndexCompatibilityError(ValueError):
    pass


DOCUMENT_SIDE_KEYS = ("use_ne", "use_ww", "virtual_term_weight", "wsd")


class Vocabulary:
    """
    Bijective map between serialized terms and dense integer term ids.
    """

    def __init__(self, terms=()):
        self._terms = []
        self._ids = {}
        for term in terms:
            self.add(term)

    def add(self, term):
        term = str(term)
        if term not in self._ids:
            self._ids[term] = len(self._terms)
            self._terms.append(term)
        return self._ids[term]

    def term_id(self, term):
        return self._ids.get(str(term))

    def term(self, term_id):
        return self._terms[term_id]

    def __contains__(self, term):
        return str(term) in self._ids

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)


@dataclass
class InvertedIndex:
    vocabulary: Vocabulary
    postings: dict
    doc_freq: dict
    doc_norms: dict
    doc_count: int
    idf_floor: float = 0.01
    meta: dict = field(default_factory=dict)

    def idf(self, term_id):
        """
        Get max(ln(N / df), idf_floor) for a term id.
        """
        return max(math.log(self.doc_count / self.doc_freq[term_id]), self.idf_floor)


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: str
    score: float


@dataclass
class SearchResult:
    """
    Ranked documents of a search. no_effective_terms is set when no query term is in the vocabulary.
    """

    hits: list
    no_effective_terms: bool = False

    def __iter__(self):
        return iter(self.hits)

    def __len__(self):
        return len(self.hits)

    def __getitem__(self, item):
        return self.hits[item]

    @property
    def doc_ids(self):
        return [hit.doc_id for hit in self.hits]


def tf_weight(tf):
    """
    Sublinear term-frequency weight 1 + ln(tf). Fractional frequencies below 1 are kept linear.
    """
    if tf <= 0:
        return 0.0
    return 1.0 + math.log(tf) if tf >= 1 else float(tf)


def build_index(docs, idf_floor=0.01, meta=None):
    """
    Build the inverted index of annotated documents with w(t, d) = (1 + ln tf) * max(ln(N / df), idf_floor).

    Term ids are assigned in sorted order of the serialized terms, so the index does not depend
    on the order of docs.

    Parameters
    ----------
    docs : list of AnnotatedDocument
        The documents.
    idf_floor : float, optional
        Lower bound of the idf (default is 0.01).
    meta : dict, optional
        Extra metadata (preset, model configuration, run manifest) kept with the index.

    Returns
    -------
    InvertedIndex
        The index.

    Raises
    ------
    ValueError
        If two documents share a doc_id.
    """
    frequencies = {}
    for doc in docs:
        if doc.doc_id in frequencies:
            raise ValueError(f"Duplicate doc_id {doc.doc_id!r}.")
        frequencies[doc.doc_id] = Counter({str(t): float(tf) for t, tf in doc.terms.items() if tf > 0})

    vocabulary = Vocabulary(sorted({t for terms in frequencies.values() for t in terms}))
    postings = defaultdict(list)
    for doc_id in sorted(frequencies):
        for term, tf in frequencies[doc_id].items():
            postings[vocabulary.term_id(term)].append((doc_id, tf))
    postings = {term_id: sorted(postings[term_id]) for term_id in sorted(postings)}
    doc_freq = {term_id: len(plist) for term_id, plist in postings.items()}

    index = InvertedIndex(
        vocabulary, postings, doc_freq, {}, len(frequencies), idf_floor, dict(meta or {})
    )
    for doc_id in sorted(frequencies):
        weights = [
            tf_weight(tf) * index.idf(vocabulary.term_id(term))
            for term, tf in frequencies[doc_id].items()
        ]
        index.doc_norms[doc_id] = float(np.linalg.norm(weights)) if weights else 0.0
    return index


def query_frequencies(query, latent_term_weight=1.0):
    """
    Count the query terms. Every latent term adds latent_term_weight to its frequency.

    Returns
    -------
    Counter
        Serialized term -> frequency.
    """
    frequencies = Counter(str(term) for term in query.terms)
    for term, _ in query.latent_terms:
        frequencies[str(term)] += latent_term_weight
    return frequencies


def _query_weights(index, query, latent_term_weight):
    weights = {}
    for term, tf in query_frequencies(query, latent_term_weight).items():
        term_id = index.vocabulary.term_id(term)
        if term_id is not None and tf > 0:
            weights[term_id] = tf_weight(tf) * index.idf(term_id)
    return weights


def search(index, query, k=10, latent_term_weight=1.0):
    """
    Rank the indexed documents by cosine similarity with the query.

    Matching is exact on serialized terms; query terms absent from the vocabulary contribute 0.

    Parameters
    ----------
    index : InvertedIndex
        The index.
    query : QueryRepresentation
        The query, latent terms included.
    k : int, optional
        Maximum number of documents (default is 10).
    latent_term_weight : float, optional
        Frequency multiplier of the latent terms (default is 1.0).

    Returns
    -------
    SearchResult
        Documents with a positive score, sorted by (score desc, doc_id asc).
        no_effective_terms is True if the query vector is empty.

    Raises
    ------
    ValueError
        If k < 1.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}.")
    weights = _query_weights(index, query, latent_term_weight)
    query_norm = float(np.linalg.norm(list(weights.values()))) if weights else 0.0
    if query_norm == 0.0:
        return SearchResult([], no_effective_terms=True)

    dots = defaultdict(float)
    for term_id, query_weight in weights.items():
        idf = index.idf(term_id)
        for doc_id, tf in index.postings[term_id]:
            dots[doc_id] += query_weight * tf_weight(tf) * idf

    hits = [
        ScoredDoc(doc_id, dot / (query_norm * index.doc_norms[doc_id]))
        for doc_id, dot in dots.items()
        if dot > 0
    ]
    hits.sort(key=lambda hit: (-hit.score, hit.doc_id))
    return SearchResult(hits[:k])


def score_document(doc, query, index, latent_term_weight=1.0):
    """
    Compute the cosine between a document and a query with dense vectors over the whole vocabulary,
    without the postings.

    Parameters
    ----------
    doc : AnnotatedDocument
        A document that was part of the index build.
    query : QueryRepresentation
        The query.
    index : InvertedIndex
        The index, used for the vocabulary and the document frequencies only.
    latent_term_weight : float, optional
        Frequency multiplier of the latent terms (default is 1.0).

    Returns
    -------
    float
        The cosine similarity, 0 if either vector is empty.

    Raises
    ------
    ValueError
        If the document is not indexed.
    """
    if doc.doc_id not in index.doc_norms:
        raise ValueError(f"Document {doc.doc_id!r} is not in the index.")
    n_terms = len(index.vocabulary)
    idf = np.array([index.idf(term_id) for term_id in range(n_terms)])

    doc_vector = np.zeros(n_terms)
    for term, tf in doc.terms.items():
        if tf <= 0:
            continue
        term_id = index.vocabulary.term_id(term)
        if term_id is None:
            raise ValueError(f"Term {term} of document {doc.doc_id!r} is not in the index.")
        doc_vector[term_id] = tf_weight(tf)
    query_vector = np.zeros(n_terms)
    for term, tf in query_frequencies(query, latent_term_weight).items():
        term_id = index.vocabulary.term_id(term)
        if term_id is not None:
            query_vector[term_id] = tf_weight(tf)
    doc_vector *= idf
    query_vector *= idf

    norms = np.linalg.norm(doc_vector) * np.linalg.norm(query_vector)
    if norms == 0:
        return 0.0
    return float(doc_vector @ query_vector / norms)


def check_index_compatibility(index, config, store=None):
    """
    Check that an index was built with the document-side settings of a model configuration,
    and with the ontology files of a store.

    Parameters
    ----------
    index : InvertedIndex
        The index, with its "model_config" and "ontology_digest" metadata.
    config : ModelConfig
        The configuration used for searching.
    store : OntologyStore, optional
        The store used for searching. Its digest is compared when both sides have one.

    Raises
    ------
    IndexCompatibilityError
        If a document-side setting or the ontology differs.
    """
    built = index.meta.get("model_config")
    if built is not None:
        wanted = model_config_to_dict(config)
        for key in DOCUMENT_SIDE_KEYS:
            if built.get(key) != wanted[key]:
                raise IndexCompatibilityError(
                    f"Index was built with {key}={built.get(key)!r} (preset {index.meta.get('preset')!r}), "
                    f"but the search model uses {key}={wanted[key]!r}."
                )

    built_digest = index.meta.get("ontology_digest")
    if store is not None and store.digest is not None and built_digest is not None and built_digest != store.digest:
        raise IndexCompatibilityError(
            f"Index was built with other ontology files (digest {built_digest[:12]}), "
            f"but the search store was loaded from {sorted(store.paths.values())} (digest {store.digest[:12]})."
        )


def save_index(index, path):
    """
    Persist an index as vocab.tsv, postings.tsv and meta.tsv in a directory.
    The output is byte-identical for identical indexes.

    Parameters
    ----------
    index : InvertedIndex
        The index.
    path : str
        Output directory, created if needed.

    Returns
    -------
    None
    """
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, "vocab.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for term_id, term in enumerate(index.vocabulary):
            f.write(f"{term_id}\t{term}\n")
    with open(os.path.join(path, "postings.tsv"), "w", encoding="utf-8", newline="\n") as f:
        for term_id in sorted(index.postings):
            for doc_id, tf in index.postings[term_id]:
                f.write(f"{term_id}\t{doc_id}\t{tf!r}\n")
    with open(os.path.join(path, "meta.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write(f"#doc_count\t{index.doc_count}\n")
        f.write(f"#idf_floor\t{index.idf_floor!r}\n")
        for key in sorted(index.meta):
            f.write(f"#{key}\t{json.dumps(index.meta[key], sort_keys=True)}\n")
        for doc_id in sorted(index.doc_norms):
            f.write(f"{doc_id}\t{index.doc_norms[doc_id]!r}\n")


def _read_columns(path, n_columns):
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            columns = line.split("\t")
            if len(columns) != n_columns:
                raise DataFormatError(path, line_number, f"expected {n_columns} tab-separated columns.")
            yield line_number, columns


def load_index(path):
    """
    Load an index persisted by save_index.

    Parameters
    ----------
    path : str
        The index directory.

    Returns
    -------
    InvertedIndex
        The index.

    Raises
    ------
    DataFormatError
        If a line of the persisted files does not parse.
    """
    vocab_path = os.path.join(path, "vocab.tsv")
    terms = []
    for line_number, (term_id, term) in _read_columns(vocab_path, 2):
        if term_id != str(len(terms)):
            raise DataFormatError(vocab_path, line_number, f"expected term id {len(terms)}, got {term_id}.")
        terms.append(term)
    vocabulary = Vocabulary(terms)

    postings_path = os.path.join(path, "postings.tsv")
    postings = defaultdict(list)
    for line_number, (term_id, doc_id, tf) in _read_columns(postings_path, 3):
        try:
            postings[int(term_id)].append((doc_id, float(tf)))
        except ValueError:
            raise DataFormatError(postings_path, line_number, "term id and tf must be numbers.") from None
    postings = {term_id: sorted(plist) for term_id, plist in sorted(postings.items())}

    meta_path = os.path.join(path, "meta.tsv")
    doc_norms, meta = {}, {}
    doc_count, idf_floor = None, 0.01
    for line_number, (key, value) in _read_columns(meta_path, 2):
        try:
            if key == "#doc_count":
                doc_count = int(value)
            elif key == "#idf_floor":
                idf_floor = float(value)
            elif key.startswith("#"):
                meta[key[1:]] = json.loads(value)
            else:
                doc_norms[key] = float(value)
        except ValueError:
            raise DataFormatError(meta_path, line_number, f"cannot parse value of {key!r}.") from None
    if doc_count is None:
        raise DataFormatError(meta_path, 1, "missing #doc_count header.")

    doc_freq = {term_id: len(plist) for term_id, plist in postings.items()}
    return InvertedIndex(vocabulary, postings, doc_freq, doc_norms, doc_count, idf_floor, meta)


def matched_terms(index, query, doc_id, latent_term_weight=1.0):
    """
    Get the serialized query terms that a document contains, sorted.
    """
    return sorted(
        index.vocabulary.term(term_id)
        for term_id in _query_weights(index, query, latent_term_weight)
        if any(d == doc_id for d, _ in index.postings[term_id])
    )
