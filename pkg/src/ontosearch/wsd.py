# -*- coding: utf-8 -*-
"""
Collection of functions to disambiguate word forms with Personalized PageRank over the synset graph.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .ontology_store import NoCommonHypernymError


@dataclass(frozen=True)
class PPRConfig:
    """
    Parameters of the Personalized PageRank power iteration and of the tie rule.

    context_window is a token radius around the target word; None means the whole sentence.
    """

    damping: float = 0.85
    max_iterations: int = 100
    epsilon: float = 1e-9
    tie_ratio: float = 1.0 + 1e-6
    context_window: int = None

    def __post_init__(self):
        if not 0 < self.damping < 1:
            raise ValueError(f"damping must be in (0, 1), got {self.damping}.")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}.")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}.")
        if self.tie_ratio < 1:
            raise ValueError(f"tie_ratio must be at least 1, got {self.tie_ratio}.")
        if self.context_window is not None and self.context_window < 0:
            raise ValueError(f"context_window must be None or nonnegative, got {self.context_window}.")


@dataclass(frozen=True)
class Resolved:
    synset_id: str


@dataclass(frozen=True)
class Tied:
    """
    Senses sharing the highest rank. msc is None when they have no common hypernym.
    """

    senses: frozenset
    msc: str = None


@dataclass(frozen=True)
class Unresolved:
    pass


@dataclass(frozen=True)
class DisambiguationResult:
    form: str
    ranked: tuple
    outcome: object


@dataclass(eq=False)
class SenseGraph:
    nodes: tuple
    edges: frozenset
    adjacency: sparse.csr_matrix
    index: dict = field(default_factory=dict)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_edges(self):
        return len(self.edges)


def build_sense_graph(store):
    """
    Build the undirected synset graph with one unit-weight edge per related synset pair,
    whatever the relation (hypernym, hyponym, holonym, meronym or similarity).

    Parameters
    ----------
    store : OntologyStore
        The loaded store.

    Returns
    -------
    SenseGraph
        Symmetric graph without self-loops whose node set is the synset store.
    """
    nodes = tuple(sorted(store.synsets))
    index = {synset_id: i for i, synset_id in enumerate(nodes)}
    edges = set()
    for synset in store.synsets.values():
        targets = set(synset.hypernym_ids) | {target for _, target in synset.other_edges}
        for target in targets:
            if target != synset.synset_id:
                edges.add(frozenset((synset.synset_id, target)))

    rows, cols = [], []
    for edge in edges:
        a, b = sorted(edge)
        rows += [index[a], index[b]]
        cols += [index[b], index[a]]
    adjacency = sparse.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(nodes), len(nodes))
    )
    return SenseGraph(nodes, frozenset(edges), adjacency, index)


def _teleport_vector(graph, teleport):
    if isinstance(teleport, dict):
        vector = np.zeros(graph.n_nodes)
        for synset_id, mass in teleport.items():
            vector[graph.index[synset_id]] = mass
    else:
        vector = np.asarray(teleport, dtype=float)
    if vector.shape != (graph.n_nodes,):
        raise ValueError(
            f"Teleport vector has shape {vector.shape}, expected ({graph.n_nodes},)."
        )
    if np.any(vector < 0):
        raise ValueError("Teleport vector has negative entries.")
    if abs(vector.sum() - 1.0) > 1e-12:
        raise ValueError(f"Teleport vector must sum to 1, got {vector.sum()!r}.")
    return vector


def personalized_pagerank(graph, teleport, config=None):
    """
    Run the Personalized PageRank power iteration v <- (1 - d) * t + d * W v,
    where W is the column-stochastic transition matrix of the graph.
    The mass of dangling nodes is sent back to the teleport vector.

    Parameters
    ----------
    graph : SenseGraph
        The nonempty sense graph.
    teleport : numpy.ndarray or dict
        Teleport distribution, either a vector aligned with graph.nodes or a mapping synset_id -> mass.
    config : PPRConfig, optional
        Iteration parameters. Default is PPRConfig().

    Returns
    -------
    numpy.ndarray
        The score vector, aligned with graph.nodes, summing to 1.

    Raises
    ------
    ValueError
        If the graph is empty or the teleport has negative entries or does not sum to 1.
    """
    if config is None:
        config = PPRConfig()
    if graph.n_nodes == 0:
        raise ValueError("Cannot run PageRank on an empty graph.")
    teleport = _teleport_vector(graph, teleport)

    degree = np.asarray(graph.adjacency.sum(axis=0)).ravel()
    dangling = degree == 0
    inverse_degree = np.divide(1.0, degree, out=np.zeros_like(degree), where=~dangling)
    transition = graph.adjacency @ sparse.diags(inverse_degree)

    scores = teleport.copy()
    for _ in range(config.max_iterations):
        spread = transition @ scores + scores[dangling].sum() * teleport
        updated = (1 - config.damping) * teleport + config.damping * spread
        change = np.abs(updated - scores).sum()
        scores = updated
        if change < config.epsilon:
            break
    return scores / scores.sum()


def disambiguate(context_tokens, target_form, graph, store, config=None):
    """
    Choose the sense of a word form in its context.

    The teleport mass is spread uniformly over every synset of every context form, except the
    target's own synsets. Without any context synset, the teleport is uniform over the graph.
    The top sense is Resolved if its score exceeds tie_ratio times the runner-up score; otherwise
    all senses within tie_ratio of the top are Tied and their most specific common hypernym is attached.

    Parameters
    ----------
    context_tokens : list of str
        Lemmatized context forms.
    target_form : str
        The form to disambiguate.
    graph : SenseGraph
        The sense graph built from store.
    store : OntologyStore
        The loaded store.
    config : PPRConfig, optional
        Iteration and tie parameters. Default is PPRConfig().

    Returns
    -------
    DisambiguationResult
        Ranked senses and the outcome. The outcome is Unresolved only if the form has no synset.
    """
    if config is None:
        config = PPRConfig()
    candidates = [s.synset_id for s in store.synsets_for_form(target_form)]
    if not candidates:
        return DisambiguationResult(target_form, (), Unresolved())
    if len(candidates) == 1:
        return DisambiguationResult(target_form, ((candidates[0], 1.0),), Resolved(candidates[0]))

    own = set(candidates)
    context_synsets = sorted(
        {
            synset.synset_id
            for token in context_tokens
            for synset in store.synsets_for_form(token)
        }
        - own
    )
    if context_synsets:
        teleport = {s: 1.0 / len(context_synsets) for s in context_synsets}
    else:
        teleport = np.full(graph.n_nodes, 1.0 / graph.n_nodes)
    scores = personalized_pagerank(graph, teleport, config)

    ranked = tuple(
        sorted(
            ((s, float(scores[graph.index[s]])) for s in candidates),
            key=lambda item: (-item[1], item[0]),
        )
    )
    top_score = ranked[0][1]
    if top_score > config.tie_ratio * ranked[1][1]:
        return DisambiguationResult(target_form, ranked, Resolved(ranked[0][0]))

    tied = frozenset(s for s, score in ranked if score * config.tie_ratio >= top_score)
    try:
        msc = store.msc_hypernym(tied)
    except NoCommonHypernymError:
        msc = None
    return DisambiguationResult(target_form, ranked, Tied(tied, msc))
