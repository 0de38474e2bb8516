import math
import os
from collections import Counter
from functools import cache

import numpy as np
from ontosearch import (
    PRESETS,
    AnnotatedDocument,
    DataFormatError,
    IndexCompatibilityError,
    Keyword,
    NETriple,
    QueryRepresentation,
    annotate_document,
    build_index,
    build_sense_graph,
    expand_query,
    get_fixture_paths,
    get_fixture_store,
    get_preset,
    load_index,
    read_corpus,
    read_topics,
    represent_query,
    save_index,
    score_document,
    search,
)
from ontosearch.annotation import split_sentences, tokenize_and_filter
from ontosearch.vsm_index import check_index_compatibility, matched_terms, tf_weight
from pytest import approx, raises


def _doc(doc_id, *terms, **weighted):
    counts = Counter(Keyword(t) for t in terms)
    for term, tf in weighted.items():
        counts[Keyword(term)] += tf
    return AnnotatedDocument(doc_id, counts, len(terms))


docs = [
    _doc("d1", "tsunami", "tsunami", "indonesia"),
    _doc("d2", "indonesia", "wave"),
    _doc("d3", "laos", "coffee"),
    _doc("d4", "tsunami", "warning", "asia", virtual=0.5),
]


def test_tf_weight():
    """
    Test the sublinear term-frequency weight.
    """
    assert tf_weight(0) == 0.0
    assert tf_weight(1) == 1.0
    assert tf_weight(3) == approx(1 + math.log(3))
    assert tf_weight(0.5) == 0.5


def test_build_index():
    """
    Test vocabulary, postings, document frequencies and norms.
    """
    index = build_index(docs)
    assert index.doc_count == 4
    assert list(index.vocabulary) == sorted(index.vocabulary)
    tsunami = index.vocabulary.term_id("kw:tsunami")
    assert index.postings[tsunami] == [("d1", 2.0), ("d4", 1.0)]
    assert index.doc_freq[tsunami] == 2
    assert index.idf(tsunami) == approx(math.log(2))

    expected_norm = math.hypot((1 + math.log(2)) * math.log(2), math.log(2))
    assert index.doc_norms["d1"] == approx(expected_norm)

    with raises(ValueError):
        build_index(docs + [_doc("d1", "laos")])


def test_idf_floor():
    """
    Test that a term in every document keeps a positive idf.
    """
    index = build_index([_doc("a", "x"), _doc("b", "x")], idf_floor=0.05)
    assert index.idf(index.vocabulary.term_id("kw:x")) == 0.05


def test_index_order_independent():
    """
    Test that the index does not depend on the order of the documents.
    """
    forward = build_index(docs)
    backward = build_index(docs[::-1])
    assert list(forward.vocabulary) == list(backward.vocabulary)
    assert forward.postings == backward.postings
    assert forward.doc_norms == backward.doc_norms


def test_search_ranking():
    """
    Test cosine ranking, tie-breaking by doc_id and the positive score filter.
    """
    index = build_index(docs)
    query = QueryRepresentation("q", [Keyword("tsunami"), Keyword("indonesia")])
    result = search(index, query, k=10)
    assert result.doc_ids[0] == "d1"
    assert set(result.doc_ids) == {"d1", "d2", "d4"}
    scores = [hit.score for hit in result]
    assert scores == sorted(scores, reverse=True)
    assert all(0 < s <= 1 + 1e-12 for s in scores)

    assert len(search(index, query, k=1)) == 1
    with raises(ValueError):
        search(index, query, k=0)

    tie_index = build_index([_doc("b", "x"), _doc("a", "x"), _doc("c", "y")])
    assert search(tie_index, QueryRepresentation("q", [Keyword("x")])).doc_ids == ["a", "b"]


def test_search_no_effective_terms():
    """
    Test a query whose terms are all outside the vocabulary.
    """
    index = build_index(docs)
    result = search(index, QueryRepresentation("q", [NETriple(entity_id="gotham")]))
    assert result.no_effective_terms
    assert result.hits == []


def test_search_matches_dense_scoring():
    """
    Test that postings-based scores equal the dense cosine computation.
    """
    index = build_index(docs)
    query = QueryRepresentation(
        "q",
        [Keyword("tsunami"), Keyword("asia")],
        latent_terms=[(Keyword("indonesia"), "{}"), (Keyword("virtual"), "{}")],
    )
    for latent_term_weight in (1.0, 0.3):
        result = search(index, query, latent_term_weight=latent_term_weight)
        by_id = {hit.doc_id: hit.score for hit in result}
        for doc in docs:
            dense = score_document(doc, query, index, latent_term_weight)
            assert by_id.get(doc.doc_id, 0.0) == approx(dense, abs=1e-12)


def test_latent_term_weight():
    """
    Test that the latent weight changes the ranking.
    """
    index = build_index(docs)
    query = QueryRepresentation("q", [Keyword("wave")], latent_terms=[(Keyword("tsunami"), "{}")])
    assert search(index, query, latent_term_weight=0.01).doc_ids[0] == "d2"
    assert search(index, query, latent_term_weight=0.0).doc_ids == ["d2"]


def test_matched_terms():
    """
    Test the terms explaining a hit.
    """
    index = build_index(docs)
    query = QueryRepresentation("q", [Keyword("tsunami"), Keyword("laos")])
    assert matched_terms(index, query, "d1") == ["kw:tsunami"]
    assert matched_terms(index, query, "d2") == []


def test_save_and_load(tmp_path):
    """
    Test that a saved index loads back identical and that saving is deterministic.
    """
    index = build_index(docs, meta={"preset": "lexical"})
    save_index(index, tmp_path / "a")
    save_index(build_index(docs[::-1], meta={"preset": "lexical"}), tmp_path / "b")
    for name in ["vocab.tsv", "postings.tsv", "meta.tsv"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    loaded = load_index(tmp_path / "a")
    assert list(loaded.vocabulary) == list(index.vocabulary)
    assert loaded.postings == index.postings
    assert loaded.doc_norms == index.doc_norms
    assert loaded.doc_count == index.doc_count
    assert loaded.meta == {"preset": "lexical"}

    query = QueryRepresentation("q", [Keyword("tsunami")])
    assert search(loaded, query).hits == search(index, query).hits


def test_load_corrupted(tmp_path):
    """
    Test that a corrupted postings file reports its line.
    """
    save_index(build_index(docs), tmp_path)
    with open(os.path.join(tmp_path, "postings.tsv"), "a") as f:
        f.write("zero\td1\t1.0\n")
    with raises(DataFormatError) as err:
        load_index(tmp_path)
    assert "postings.tsv" in str(err.value)


def test_index_compatibility():
    """
    Test the document-side configuration check.
    """
    semantic = get_preset("semantic")
    meta = {"model_config": {"use_ne": True, "use_ww": True, "virtual_term_weight": 1.0}}
    meta["model_config"]["wsd"] = {
        "damping": semantic.wsd.damping,
        "max_iterations": semantic.wsd.max_iterations,
        "epsilon": semantic.wsd.epsilon,
        "tie_ratio": semantic.wsd.tie_ratio,
        "context_window": semantic.wsd.context_window,
    }
    index = build_index(docs, meta=meta)
    check_index_compatibility(index, semantic)
    with raises(IndexCompatibilityError):
        check_index_compatibility(index, get_preset("lexical"))

    # An index without model metadata is accepted
    check_index_compatibility(build_index(docs), get_preset("lexical"))

    store = get_fixture_store()
    index = build_index(docs, meta={"ontology_digest": store.digest})
    check_index_compatibility(index, get_preset("lexical"), store)
    with raises(IndexCompatibilityError):
        check_index_compatibility(build_index(docs, meta={"ontology_digest": "0" * 64}), get_preset("lexical"), store)


fixture_store = get_fixture_store()
fixture_graph = build_sense_graph(fixture_store)
fixture_corpus = read_corpus(get_fixture_paths()["corpus"])
fixture_topics = read_topics(get_fixture_paths()["topics"])


@cache
def _fixture_docs(preset):
    config = get_preset(preset)
    return [annotate_document(d, t, fixture_store, fixture_graph, config) for d, t in fixture_corpus]


def _fixture_queries(preset):
    config = get_preset(preset)
    queries = []
    for query_id, text in fixture_topics:
        query = represent_query(query_id, text, fixture_store, fixture_graph, config)
        expand_query(query, text, fixture_store, fixture_graph, config)
        queries.append(query)
    return queries


def test_fixture_search_matches_dense_scoring():
    """
    Test postings-based scores against the dense cosine for every fixture topic and document,
    with virtual and latent terms.
    """
    for preset in ["semantic", "rcsa"]:
        config = get_preset(preset)
        fixture_docs = _fixture_docs(preset)
        index = build_index(fixture_docs, idf_floor=config.idf_floor)
        queries = _fixture_queries(preset)
        assert any(query.latent_terms for query in queries)
        for query in queries:
            result = search(index, query, k=len(fixture_docs), latent_term_weight=config.latent_term_weight)
            by_id = {hit.doc_id: hit.score for hit in result}
            for doc in fixture_docs:
                dense = score_document(doc, query, index, config.latent_term_weight)
                assert by_id.get(doc.doc_id, 0.0) == approx(dense, abs=1e-10)


def test_fixture_index_shuffled_corpus(tmp_path):
    """
    Test that shuffling the fixture corpus gives an identical persisted index.
    """
    fixture_docs = _fixture_docs("semantic")
    shuffled = [fixture_docs[i] for i in np.random.default_rng(7).permutation(len(fixture_docs))]
    assert [doc.doc_id for doc in shuffled] != [doc.doc_id for doc in fixture_docs]
    save_index(build_index(fixture_docs), tmp_path / "ordered")
    save_index(build_index(shuffled), tmp_path / "shuffled")
    for name in ["vocab.tsv", "postings.tsv", "meta.tsv"]:
        assert (tmp_path / "ordered" / name).read_bytes() == (tmp_path / "shuffled" / name).read_bytes()


def _keyword_bag(text):
    return Counter(token for sentence in split_sentences(text) for token in tokenize_and_filter(sentence))


def test_lexical_preset_matches_keyword_cosine():
    """
    Test the lexical preset against a plain tf-idf cosine over the keywords of the fixture.
    """
    bags = {doc_id: _keyword_bag(text) for doc_id, text in fixture_corpus}
    doc_freq = Counter(token for bag in bags.values() for token in bag)
    idf = {token: max(math.log(len(bags) / df), 0.01) for token, df in doc_freq.items()}

    def vector(bag):
        return {token: (1 + math.log(tf)) * idf[token] for token, tf in bag.items() if token in idf}

    def norm(vec):
        return math.sqrt(sum(w * w for w in vec.values()))

    index = build_index(_fixture_docs("lexical"))
    for query, (_, text) in zip(_fixture_queries("lexical"), fixture_topics):
        query_vector = vector(_keyword_bag(text))
        by_id = {hit.doc_id: hit.score for hit in search(index, query, k=len(bags))}
        for doc_id, bag in bags.items():
            doc_vector = vector(bag)
            dot = sum(w * doc_vector.get(token, 0.0) for token, w in query_vector.items())
            expected = dot / (norm(query_vector) * norm(doc_vector)) if dot > 0 else 0.0
            assert by_id.get(doc_id, 0.0) == approx(expected, abs=1e-10)


def test_presets_give_distinct_results():
    """
    Test that the seven presets rank the fixture differently.
    """
    document_side = {"csa": "lexical", "rcsa": "lexical"}
    rankings = {}
    for preset in PRESETS:
        config = get_preset(preset)
        index = build_index(_fixture_docs(document_side.get(preset, preset)), idf_floor=config.idf_floor)
        rankings[preset] = tuple(
            (query.query_id, tuple((hit.doc_id, round(hit.score, 9)) for hit in search(index, query, k=30)))
            for query in _fixture_queries(preset)
        )
    assert len(PRESETS) == 7
    assert len(set(rankings.values())) == 7
