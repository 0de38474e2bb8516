from ontosearch import (
    AnnotationWarning,
    Keyword,
    ModelConfig,
    NEAnnotation,
    NETriple,
    Resolved,
    Tied,
    WWAnnotation,
    WWForm,
    WWPair,
    WWSense,
    annotate_document,
    build_sense_graph,
    expand_ne_features,
    expand_ww_features,
    get_fixture_store,
    get_preset,
    map_interrogative,
    parse_term,
    recognize_entities,
    represent_query,
    tokenize_and_filter,
)
from pytest import raises, warns

store = get_fixture_store()
graph = build_sense_graph(store)


def test_tokenize_and_filter():
    """
    Test stop-word removal and lemmatization.
    """
    assert tokenize_and_filter("The movement of the people") == ["movement", "people"]
    assert tokenize_and_filter("Cities were built") == ["city", "build"]
    assert tokenize_and_filter("") == []


def test_term_serialization():
    """
    Test the string form of every term kind and its parsing.
    """
    assert str(NETriple(class_id="FootballClub")) == "ne:*/FootballClub/*"
    assert str(NETriple(name="FC  Barcelona", class_id="FootballClub")) == "ne:fc barcelona/FootballClub/*"
    assert str(NETriple(entity_id="barca")) == "ne:*/*/barca"
    assert str(WWSense("S_MOVE1")) == "ws:S_MOVE1"
    assert str(WWForm("movement")) == "wf:movement"
    assert str(WWPair("movement", "S_ACT")) == "wp:movement/S_ACT"
    assert str(Keyword("tsunami")) == "kw:tsunami"

    for term in [
        NETriple(name="ac/dc", entity_id="acdc"),
        NETriple(name="100% *"),
        WWPair("high-tech defence", "S_DEFENCE"),
        WWSense("S_MOVE2"),
        Keyword("barca"),
    ]:
        assert parse_term(str(term)) == term

    with raises(ValueError):
        parse_term("xx:foo")
    with raises(ValueError):
        parse_term("ne:*/*")


def test_ne_triple_validation():
    """
    Test that a triple needs at least one nonempty field.
    """
    with raises(ValueError):
        NETriple()
    with raises(ValueError):
        NETriple(name=" ")


def test_recognize_entities():
    """
    Test the gazetteer on unique names, shared names and class labels.
    """
    assert recognize_entities(["barca", "play"], store) == [
        NEAnnotation((0, 1), "barcelona", "FootballClub", "barca")
    ]
    assert recognize_entities(["barcelona", "play"], store) == [NEAnnotation((0, 1), name="barcelona")]
    assert recognize_entities(["football", "club"], store) == [NEAnnotation((0, 2), class_id="FootballClub")]

    # Longest match wins over the shorter alias
    annotations = recognize_entities(tokenize_and_filter("The United States of America"), store)
    assert annotations == [NEAnnotation((0, 3), "united states", "Country", "usa")]
    annotations = recognize_entities(tokenize_and_filter("Paris Hilton in Paris"), store)
    assert [a.entity_id for a in annotations] == ["philton", None]


def test_expand_ne_features():
    """
    Test the implied patterns of a fully and a partially recognized entity.
    """
    terms = expand_ne_features(NEAnnotation((0, 1), "barcelona", "FootballClub", "barca"), store)
    assert len(terms) == 16
    assert NETriple(name="barca", class_id="Organization") in terms
    assert NETriple(name="fc barcelona") in terms
    assert NETriple(class_id="Thing") in terms
    assert NETriple(entity_id="barca") in terms
    assert all(t.entity_id is None or t == NETriple(entity_id="barca") for t in terms)

    assert expand_ne_features(NEAnnotation((0, 1), name="barcelona"), store) == {NETriple(name="barcelona")}
    assert expand_ne_features(NEAnnotation((0, 1), class_id="City"), store) == {
        NETriple(class_id="City"),
        NETriple(class_id="Location"),
        NETriple(class_id="Thing"),
    }


def test_expand_ww_resolved():
    """
    Test the implied features of a resolved sense.
    """
    terms = expand_ww_features(WWAnnotation((0, 1), "movement", Resolved("S_MOVE2")), store)
    assert terms == {
        WWSense("S_MOVE2"),
        WWForm("movement"),
        WWForm("crusade"),
        WWSense("S_VENTURE"),
        WWForm("venture"),
        WWForm("undertaking"),
        WWPair("movement", "S_VENTURE"),
        WWPair("crusade", "S_VENTURE"),
    }


def test_expand_ww_tied():
    """
    Test the implied features of a tied word and the fallback without common hypernym.
    """
    tied = Tied(frozenset({"S_MOVE1", "S_MOVE2"}), "S_ACT")
    terms = expand_ww_features(WWAnnotation((0, 1), "movement", tied), store)
    assert terms == {
        WWForm("movement"),
        WWPair("movement", "S_ACT"),
        WWSense("S_ACT"),
        WWForm("act"),
        WWSense("S_EVENT"),
        WWForm("event"),
        WWPair("movement", "S_EVENT"),
    }
    assert WWSense("S_MOVE1") not in terms

    with warns(AnnotationWarning):
        terms = expand_ww_features(WWAnnotation((0, 1), "bank", Tied(frozenset({"S_A", "S_B"}))), store)
    assert terms == {WWForm("bank")}


def test_annotate_document_counts():
    """
    Test that original terms count once and implied terms count virtual_term_weight.
    """
    config = ModelConfig(virtual_term_weight=0.5)
    doc = annotate_document("d1", "Barca announced a venture movement.", store, graph, config)
    assert doc.doc_id == "d1"
    assert doc.terms[NETriple(entity_id="barca")] == 1
    assert doc.terms[NETriple(name="barca")] == 0.5
    assert doc.terms[WWSense("S_MOVE2")] == 1
    assert doc.terms[WWSense("S_MOVE1")] == 0
    assert doc.terms[WWSense("S_VENTURE")] == 1.5
    assert doc.terms[Keyword("announce")] == 1
    assert doc.source_length == 4


def test_annotate_document_tied():
    """
    Test that a tied word is indexed under its pair with the msc hypernym.
    """
    doc = annotate_document("d29", "A new movement emerged.", store, graph)
    assert doc.terms[WWPair("movement", "S_ACT")] == 1
    assert doc.terms[WWSense("S_ACT")] == 1
    assert WWSense("S_MOVE1") not in doc.terms


def test_annotate_document_lexical():
    """
    Test that a keyword-only model indexes keywords only.
    """
    doc = annotate_document("d1", "Barca announced a venture movement.", store, graph, get_preset("lexical"))
    assert set(doc.terms) == {Keyword("barca"), Keyword("announce"), Keyword("venture"), Keyword("movement")}


def test_map_interrogative():
    """
    Test the interrogative table and its override.
    """
    assert map_interrogative("Where") == "Location"
    assert map_interrogative("who") == "Person"
    assert map_interrogative("what") is None
    assert map_interrogative("football") is None
    assert map_interrogative("where", {"where": "City"}) == "City"


def test_represent_query():
    """
    Test the query representation with an interrogative word.
    """
    query = represent_query("q02", "Where was George Washington born?", store, graph)
    assert query.terms == [NETriple(class_id="Location"), NETriple(entity_id="gwashington"), WWSense("S_BORN")]
    assert query.latent_terms == []

    query = represent_query("q02", "Where was George Washington born?", store, graph, get_preset("lexical"))
    assert query.terms == [Keyword("george"), Keyword("washington"), Keyword("born")]

    query = represent_query("q01", "football clubs", store, graph)
    assert query.terms == [NETriple(class_id="FootballClub")]


def test_interrogative_class_label():
    """
    Test that an interrogative mapped to a class label resolves to the class id.
    """
    config = ModelConfig(interrogatives={"which": "football  club", "who": "Spaceship"})
    query = represent_query("q", "Which won the cup?", store, graph, config)
    assert query.terms[0] == NETriple(class_id="FootballClub")
    query = represent_query("q", "Who won the cup?", store, graph, config)
    assert NETriple(class_id="Spaceship") not in query.terms


def test_entity_names_match_their_documents():
    """
    Test that the query terms of every fixture entity name are among the terms of a document made of that name.
    """
    config = get_preset("semantic")
    for entity in store.entities.values():
        for name in sorted({entity.main_name, *entity.aliases}):
            doc = annotate_document("d", name, store, graph, config)
            query = represent_query("q", name, store, graph, config)
            assert query.terms, name
            for term in query.terms:
                assert doc.terms[term] >= 1, (name, str(term))
