# -*- coding: utf-8 -*-
"""
Collection of functions to discover latent query concepts by relation-constrained spreading activation (RCSA),
and its unconstrained one-hop baseline (CSA).
"""
import json
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .annotation import (
    Keyword,
    NETriple,
    WWForm,
    load_stop_words,
    recognize_entities,
    recognize_word_forms,
    lemmatize,
    raw_tokens,
    tokenize_and_filter,
)
from .model_registry import ModelConfig
from .ontology_store import ConceptRef, Fact
from .wsd import Resolved, disambiguate


PART_OF_RELATION = "isPartOf"
LOCATION_CLASS = "Location"


@dataclass(frozen=True)
class RelationMention:
    span: tuple
    relation: str
    is_spatial: bool
    verb_relation: str = None


@dataclass(frozen=True)
class ConceptMention:
    span: tuple
    concept: ConceptRef


@dataclass(frozen=True)
class QueryTriple:
    c1: ConceptRef
    relation: str
    c2: ConceptRef
    c2_kind: str
    r_spatial: str = None
    r_fact: str = None


@dataclass(frozen=True)
class OntologyEdge:
    """
    A class or hypernym link of the ontologies, as opposed to a stored fact.
    kind is "instanceOf" (an entity whose class is parent or one of its subclasses)
    or "hyponymOf" (a synset with parent among its strict hypernyms).
    """

    kind: str
    child: ConceptRef
    parent: ConceptRef

    def __str__(self):
        return f"{self.child} {self.kind} {self.parent}"

    def holds(self, store):
        if self.kind == "instanceOf":
            return store.is_subclass(store.entity(self.child.id).class_id, self.parent.id)
        if self.kind == "hyponymOf":
            return store.is_hyponym(self.child.id, self.parent.id)
        raise ValueError(f"Ontology edge kind {self.kind} not valid. Must be instanceOf or hyponymOf.")


@dataclass(frozen=True)
class LatentConcept:
    """
    A concept derived from a query triple.

    edge_fact is the stored fact linking it to C2 in the located-entity branches and in CSA,
    ontology_edge the class or hypernym link to C2 in the class and synset branches.
    support_fact is the stored fact linking C1 to it.
    """

    concept: ConceptRef
    branch: str
    edge_fact: Fact = None
    support_fact: Fact = None
    ontology_edge: OntologyEdge = None

    def provenance(self):
        return {
            "concept": str(self.concept),
            "branch": self.branch,
            "edge_fact": None if self.edge_fact is None else str(self.edge_fact),
            "support_fact": None if self.support_fact is None else str(self.support_fact),
            "ontology_edge": None if self.ontology_edge is None else str(self.ontology_edge),
        }

    def replays(self, store):
        """
        Check that every fact of the provenance is in the fact store and that the ontology edge holds.
        """
        facts = [fact for fact in (self.edge_fact, self.support_fact) if fact is not None]
        if not all(store.has_fact(fact) for fact in facts):
            return False
        return self.ontology_edge is None or self.ontology_edge.holds(store)


def recognize_relation_phrases(tokens, store, fusion_window=4):
    """
    Find the relation phrases of a token sequence with a longest-match dictionary scan.

    The scan runs on unfiltered tokens since stop words such as "in" carry relations.
    A non-spatial phrase followed by a spatial phrase at most fusion_window tokens later
    is fused into one spatial mention whose verb_relation is the first phrase's relation.

    Parameters
    ----------
    tokens : list of str
        Lowercase raw tokens, stop words kept.
    store : OntologyStore
        The loaded store.
    fusion_window : int, optional
        Maximum number of tokens between the verb phrase and the spatial phrase (default is 4).

    Returns
    -------
    list of RelationMention
        The mentions, in token order.
    """
    found = []
    position = 0
    while position < len(tokens):
        match = store.longest_relation_phrase(tokens, position)
        if match is None:
            position += 1
            continue
        entry, length = match
        found.append(RelationMention((position, position + length), entry.relation, entry.is_spatial))
        position += length

    mentions = []
    for mention in found:
        previous = mentions[-1] if mentions else None
        if (
            mention.is_spatial
            and previous is not None
            and not previous.is_spatial
            and mention.span[0] - previous.span[1] <= fusion_window
        ):
            mentions[-1] = RelationMention(
                (previous.span[0], mention.span[1]), mention.relation, True, previous.relation
            )
        else:
            mentions.append(mention)
    return mentions


def recognize_initial_concepts(tokens, store, graph=None, config=None):
    """
    Map the words of a query to entities, classes and synsets.

    Entity and class matches take precedence over synset matches. A name shared by several
    entities is skipped. A form with several senses is disambiguated when a sense graph is given
    and skipped otherwise, or when its senses are tied.

    Parameters
    ----------
    tokens : list of str
        Lowercase raw tokens, stop words kept.
    store : OntologyStore
        The loaded store.
    graph : SenseGraph, optional
        Sense graph used to disambiguate polysemous forms.
    config : PPRConfig, optional
        Disambiguation parameters.

    Returns
    -------
    list of ConceptMention
        Concepts with their raw token spans, ordered by position.
    """
    stop_words = load_stop_words()
    kept = [i for i, token in enumerate(tokens) if token not in stop_words]
    filtered = [lemmatize(tokens[i]) for i in kept]

    def raw_span(span):
        return kept[span[0]], kept[span[1] - 1] + 1

    mentions = []
    blocked = set()
    for ann in recognize_entities(filtered, store):
        blocked |= set(range(*ann.span))
        if ann.entity_id is not None:
            mentions.append(ConceptMention(raw_span(ann.span), ConceptRef("entity", ann.entity_id)))
        elif ann.class_id is not None:
            mentions.append(ConceptMention(raw_span(ann.span), ConceptRef("class", ann.class_id)))

    ww_spans = recognize_word_forms(filtered, store, blocked)
    for span, form in ww_spans:
        senses = store.synsets_for_form(form)
        if len(senses) == 1:
            synset_id = senses[0].synset_id
        elif graph is not None:
            context = [f for s, f in ww_spans if s != span]
            outcome = disambiguate(context, form, graph, store, config).outcome
            if not isinstance(outcome, Resolved):
                continue
            synset_id = outcome.synset_id
        else:
            continue
        mentions.append(ConceptMention(raw_span(span), ConceptRef("synset", synset_id)))
    return sorted(mentions, key=lambda m: m.span)


def _is_located_entity(ref, store):
    if ref.kind != "entity" or LOCATION_CLASS not in store.classes:
        return False
    return store.is_subclass(store.entity(ref.id).class_id, LOCATION_CLASS)


def form_triples(concepts, mentions, store):
    """
    Present each relation mention as a triple C1 R C2 by token adjacency.

    C1 is the nearest concept ending before the mention, C2 the nearest concept starting after it.
    When C1 is a class and C2 is not, the class takes the C2 slot ("cities ... of Thailand").
    Mentions lacking either side, or whose C2 is neither a location entity, a class nor a synset,
    give no triple.

    Parameters
    ----------
    concepts : list of ConceptMention
        Output of recognize_initial_concepts.
    mentions : list of RelationMention
        Output of recognize_relation_phrases over the same tokens.
    store : OntologyStore
        The loaded store.

    Returns
    -------
    list of QueryTriple
        The triples, in mention order.
    """
    triples = []
    for mention in mentions:
        if any(c.span[0] < mention.span[1] and mention.span[0] < c.span[1] for c in concepts):
            continue
        left = [c for c in concepts if c.span[1] <= mention.span[0]]
        right = [c for c in concepts if c.span[0] >= mention.span[1]]
        if not left or not right:
            continue
        c1 = max(left, key=lambda c: c.span[1]).concept
        c2 = min(right, key=lambda c: c.span[0]).concept
        if c1.kind == "class" and c2.kind != "class":
            c1, c2 = c2, c1

        if c2.kind == "class":
            c2_kind = "ne_class"
        elif c2.kind == "synset":
            c2_kind = "ww"
        elif _is_located_entity(c2, store):
            c2_kind = "located_entity"
        else:
            continue

        if mention.is_spatial:
            triples.append(
                QueryTriple(c1, mention.relation, c2, c2_kind, mention.relation, mention.verb_relation)
            )
        else:
            triples.append(QueryTriple(c1, mention.relation, c2, c2_kind))
    return triples


def derive_latent_concepts(triple, store):
    """
    Derive the latent concepts C4 of a query triple, following one fact hop whose relation appears in the query.

    (a) spatial relation to a location entity: C4 R_S C2 and C1 R_F C4;
    (b) other relation to a location entity: C4 isPartOf C2 and C1 R C4;
    (c) class C2: C4 an instance of C2 or of a descendant, and C1 R C4;
    (d) synset C2: C4 a hyponym (at any depth) of C2, and C1 R C4.

    Parameters
    ----------
    triple : QueryTriple
        The triple.
    store : OntologyStore
        The loaded store.

    Returns
    -------
    list of LatentConcept
        The latent concepts, in sorted concept order. May be empty.
    """
    latents = []
    if triple.c2_kind == "located_entity" and triple.r_spatial is not None:
        if triple.r_fact is None:
            return []
        for edge in store.facts_matching(relation=triple.r_spatial, object=triple.c2):
            support = Fact(triple.c1, triple.r_fact, edge.subject)
            if store.has_fact(support):
                latents.append(LatentConcept(edge.subject, "a", edge, support))
    elif triple.c2_kind == "located_entity":
        for edge in store.facts_matching(relation=PART_OF_RELATION, object=triple.c2):
            support = Fact(triple.c1, triple.relation, edge.subject)
            if store.has_fact(support):
                latents.append(LatentConcept(edge.subject, "b", edge, support))
    elif triple.c2_kind == "ne_class":
        for support in store.facts_matching(subject=triple.c1, relation=triple.relation):
            candidate = support.object
            if candidate.kind != "entity":
                continue
            class_id = store.entity(candidate.id).class_id
            if store.is_subclass(class_id, triple.c2.id):
                edge = OntologyEdge("instanceOf", candidate, triple.c2)
                latents.append(LatentConcept(candidate, "c", support_fact=support, ontology_edge=edge))
    elif triple.c2_kind == "ww":
        for support in store.facts_matching(subject=triple.c1, relation=triple.relation):
            candidate = support.object
            if candidate.kind != "synset" or candidate == triple.c2:
                continue
            if store.is_hyponym(candidate.id, triple.c2.id):
                edge = OntologyEdge("hyponymOf", candidate, triple.c2)
                latents.append(LatentConcept(candidate, "d", support_fact=support, ontology_edge=edge))
    return sorted(latents, key=lambda latent: latent.concept)


def rcsa_concepts(text, store, graph=None, config=None, fusion_window=4):
    """
    Run the whole RCSA pipeline on a query text.

    Each triple is processed independently and the results are merged, keeping the first
    provenance of a concept. Concepts already in the query are never returned.

    Returns
    -------
    list of LatentConcept
        The latent concepts.
    """
    tokens = raw_tokens(text)
    concepts = recognize_initial_concepts(tokens, store, graph, config)
    mentions = recognize_relation_phrases(tokens, store, fusion_window)
    initial = {c.concept for c in concepts}
    latents = {}
    for triple in form_triples(concepts, mentions, store):
        for latent in derive_latent_concepts(triple, store):
            if latent.concept not in initial:
                latents.setdefault(latent.concept, latent)
    return list(latents.values())


def render_latent_concepts(latents, store, entity_keywords=False, synset_keywords=False):
    """
    Render latent concepts as generalized terms: an entity by its main name (name/*/*),
    a synset by each of its forms, a class by its class triple (*/class/*).

    Parameters
    ----------
    latents : list of LatentConcept or ConceptRef
        The concepts.
    store : OntologyStore
        The loaded store.
    entity_keywords : bool, optional
        Render entities and classes as the keywords of their name instead (default is False).
    synset_keywords : bool, optional
        Render synsets as the keywords of their forms instead (default is False).

    Returns
    -------
    list of generalized terms
        Deduplicated terms, in order of first appearance.
    """
    terms = []
    for latent in latents:
        concept = getattr(latent, "concept", latent)
        if concept.kind == "entity":
            name = store.entity(concept.id).main_name
            rendered = _keywords(name) if entity_keywords else [NETriple(name=name)]
        elif concept.kind == "class":
            label = store.class_node(concept.id).label
            rendered = _keywords(label) if entity_keywords else [NETriple(class_id=concept.id)]
        else:
            forms = store.synset(concept.id).forms
            if synset_keywords:
                rendered = [k for form in forms for k in _keywords(form)]
            else:
                rendered = [WWForm(form) for form in forms]
        terms += rendered
    return list(dict.fromkeys(terms))


def _keywords(text):
    return [Keyword(token) for token in tokenize_and_filter(text)]


def csa_neighbors(concepts, store, hop_limit=1):
    """
    Get every concept within hop_limit fact hops of the initial concepts, in either direction and whatever the relation.

    Returns
    -------
    list of LatentConcept
        Neighbors with the fact that reached them (branch "csa"), initial concepts excluded.
    """
    initial = set(concepts)
    neighborhood = store.fact_graph.to_undirected(as_view=True)
    reached = {}
    for source in sorted(c for c in initial if c in neighborhood):
        for node, neighbor in nx.bfs_edges(neighborhood, source, depth_limit=hop_limit, sort_neighbors=sorted):
            if neighbor in initial or neighbor in reached:
                continue
            reached[neighbor] = LatentConcept(neighbor, "csa", store.facts_between(node, neighbor)[0])
    return sorted(reached.values(), key=lambda latent: latent.concept)


def noise_concepts(concepts, store, size, seed=0):
    """
    Draw concepts of the fact store uniformly at random, as an expansion baseline unrelated to the query meaning.

    Parameters
    ----------
    concepts : list of ConceptRef
        The initial concepts, never drawn.
    store : OntologyStore
        The loaded store.
    size : int
        Number of concepts to draw. Fewer are returned if the fact store has fewer candidates.
    seed : int, optional
        Seed of numpy.random.default_rng (default is 0).

    Returns
    -------
    list of LatentConcept
        The drawn concepts (branch "noise", no provenance fact), in sorted concept order.
    """
    if size < 0:
        raise ValueError(f"size must be nonnegative, got {size}.")
    initial = set(concepts)
    candidates = sorted(c for c in store.fact_graph if c not in initial)
    rng = np.random.default_rng(seed)
    drawn = rng.choice(len(candidates), size=min(size, len(candidates)), replace=False)
    return sorted((LatentConcept(candidates[i], "noise") for i in drawn), key=lambda latent: latent.concept)


def csa_expand(concepts, store, hop_limit=1, entity_keywords=False, synset_keywords=False):
    """
    Expand the initial concepts with all their direct fact neighbors, rendered as in render_latent_concepts.

    Parameters
    ----------
    concepts : list of ConceptRef
        The initial concepts.
    store : OntologyStore
        The loaded store.
    hop_limit : int, optional
        Number of fact hops (default is 1).

    Returns
    -------
    list of generalized terms
        The rendered neighbors.
    """
    return render_latent_concepts(
        csa_neighbors(concepts, store, hop_limit), store, entity_keywords, synset_keywords
    )


def expand_query(query, text, store, graph=None, config=None):
    """
    Fill the latent terms of a query representation according to the model expansion.

    Parameters
    ----------
    query : QueryRepresentation
        The query representation, modified in place.
    text : str
        The query text.
    store : OntologyStore
        The loaded store.
    graph : SenseGraph, optional
        Sense graph used to disambiguate polysemous query words.
    config : ModelConfig, optional
        Model configuration. Its expansion is "none", "csa", "rcsa" or "noise".
        The noise baseline draws as many random concepts as CSA would add.

    Returns
    -------
    list of LatentConcept
        The latent concepts behind the latent terms.
    """
    if config is None:
        config = ModelConfig()
    if config.expansion == "none":
        return []
    if config.expansion in ("csa", "noise"):
        tokens = raw_tokens(text)
        initial = [c.concept for c in recognize_initial_concepts(tokens, store, graph, config.wsd)]
        latents = csa_neighbors(initial, store)
        if config.expansion == "noise":
            latents = noise_concepts(initial, store, len(latents), config.noise_seed)
    else:
        latents = rcsa_concepts(text, store, graph, config.wsd, config.fusion_window)

    entity_keywords = config.keyword_latents or not config.use_ne
    synset_keywords = config.keyword_latents or not config.use_ww
    for latent in latents:
        provenance = json.dumps(latent.provenance(), sort_keys=True)
        for term in render_latent_concepts([latent], store, entity_keywords, synset_keywords):
            query.latent_terms.append((term, provenance))
    return latents
