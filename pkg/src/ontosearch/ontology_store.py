# -*- coding: utf-8 -*-
"""
Collection of functions and types to load and query the NE ontology, the WW lexicon,
the fact store and the relation-phrase dictionary.
"""
import hashlib
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field

import networkx as nx


CONCEPT_PREFIXES = {"ent": "entity", "ww": "synset", "cls": "class"}
SYNSET_EDGE_TYPES = ("hypernym", "hyponym", "holonym", "meronym", "similarity")


class DataFormatError(ValueError):
    """
    A line of an input file does not parse. The message starts with "path:line_number:".
    """

    def __init__(self, path, line_number, message):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class OntologyError(ValueError):
    pass


class OntologyParseError(OntologyError, DataFormatError):
    pass


class DanglingReferenceError(OntologyError):
    def __init__(self, unresolved_id, context=""):
        self.unresolved_id = unresolved_id
        super().__init__(
            f"Unresolved reference {unresolved_id!r}" + (f" in {context}" if context else "")
        )


class CycleError(OntologyError):
    def __init__(self, cycle, graph_name):
        self.cycle = list(cycle)
        self.member = self.cycle[0]
        super().__init__(f"Cycle detected in the {graph_name} graph: {' -> '.join(self.cycle + self.cycle[:1])}.")


class UnknownIdError(OntologyError):
    pass


class NoCommonHypernymError(OntologyError):
    pass


def normalize_name(name):
    """
    Lowercase a name and collapse its whitespace.

    Parameters
    ----------
    name : str
        The raw name.

    Returns
    -------
    str
        The normalized name.
    """
    return " ".join(name.lower().split())


@dataclass(frozen=True, order=True)
class ConceptRef:
    kind: str
    id: str

    def __post_init__(self):
        if self.kind not in CONCEPT_PREFIXES.values():
            raise ValueError(
                f"Concept kind {self.kind} not valid. Must be one of {list(CONCEPT_PREFIXES.values())}."
            )

    @property
    def prefix(self):
        return {kind: prefix for prefix, kind in CONCEPT_PREFIXES.items()}[self.kind]

    def __str__(self):
        return f"{self.prefix}:{self.id}"

    @classmethod
    def parse(cls, text):
        """
        Parse a prefixed concept reference such as "ent:barca", "ww:S_MOVE1" or "cls:City".

        Parameters
        ----------
        text : str
            The prefixed reference.

        Returns
        -------
        ConceptRef
            The parsed reference.

        Raises
        ------
        ValueError
            If the prefix is missing or unknown.
        """
        prefix, sep, identifier = text.partition(":")
        if not sep or prefix not in CONCEPT_PREFIXES or not identifier:
            raise ValueError(
                f"Concept reference {text!r} must be prefixed by one of {[p + ':' for p in CONCEPT_PREFIXES]}."
            )
        return cls(CONCEPT_PREFIXES[prefix], identifier)


@dataclass(frozen=True)
class ClassNode:
    class_id: str
    label: str
    parent_ids: frozenset = frozenset()


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    main_name: str
    aliases: frozenset
    class_id: str

    @property
    def ref(self):
        return ConceptRef("entity", self.entity_id)


@dataclass(frozen=True)
class Synset:
    synset_id: str
    forms: tuple
    hypernym_ids: frozenset = frozenset()
    other_edges: frozenset = frozenset()

    @property
    def ref(self):
        return ConceptRef("synset", self.synset_id)


@dataclass(frozen=True, order=True)
class Fact:
    subject: ConceptRef
    relation: str
    object: ConceptRef

    def __str__(self):
        return f"{self.subject} {self.relation} {self.object}"


@dataclass(frozen=True)
class RelationPhraseEntry:
    phrase: tuple
    relation: str
    is_spatial: bool


def phrase_tokens(phrase):
    """
    Split a phrase into lowercase alphanumeric tokens.

    Parameters
    ----------
    phrase : str
        The phrase.

    Returns
    -------
    tuple of str
        The tokens.
    """
    return tuple(token for token in re.split(r"[^0-9a-z]+", phrase.lower()) if token)


@dataclass(eq=False)
class OntologyStore:
    """
    Immutable view over the three ontologies and the relation-phrase dictionary.
    Built by load_store(); every read method is safe to call from several threads.

    class_graph and hypernym_graph are directed from the more general node to the more specific one.
    fact_graph holds one edge subject -> object per fact, keyed by the relation.
    digest is the SHA-256 of the loaded files, None for a store built in memory.
    """

    classes: dict
    entities: dict
    synsets: dict
    facts: tuple
    phrases: dict
    class_graph: nx.DiGraph = None
    hypernym_graph: nx.DiGraph = None
    paths: dict = field(default_factory=dict)
    digest: str = None

    def __post_init__(self):
        if self.class_graph is None:
            self.class_graph = _hierarchy_graph({c: n.parent_ids for c, n in self.classes.items()}, "class")
        if self.hypernym_graph is None:
            self.hypernym_graph = _hierarchy_graph(
                {s: synset.hypernym_ids for s, synset in self.synsets.items()}, "hypernym"
            )
        self._root_depths = {}
        for node in nx.topological_sort(self.hypernym_graph):
            self._root_depths[node] = max(
                (self._root_depths[parent] + 1 for parent in self.hypernym_graph.predecessors(node)),
                default=0,
            )

        self._names = defaultdict(set)
        for entity in self.entities.values():
            for name in {entity.main_name, *entity.aliases}:
                self._names[normalize_name(name)].add(entity.entity_id)
        self._forms = defaultdict(set)
        for synset in self.synsets.values():
            for form in synset.forms:
                self._forms[normalize_name(form)].add(synset.synset_id)
        self._labels = {
            normalize_name(node.label): node.class_id for node in self.classes.values()
        }

        self.fact_graph = nx.MultiDiGraph()
        self._facts_by_relation = defaultdict(list)
        for fact in self.facts:
            self.fact_graph.add_edge(fact.subject, fact.object, key=fact.relation, fact=fact)
            self._facts_by_relation[fact.relation].append(fact)
        self._max_phrase_length = max((len(p) for p in self.phrases), default=0)

    # NE ontology

    def entity(self, entity_id):
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownIdError(f"Unknown entity id {entity_id!r}.") from None

    def class_node(self, class_id):
        try:
            return self.classes[class_id]
        except KeyError:
            raise UnknownIdError(f"Unknown class id {class_id!r}.") from None

    def entities_by_name(self, name):
        """
        Get every entity whose main name or one of its aliases equals the given name
        after lowercasing and whitespace normalization.

        Parameters
        ----------
        name : str
            The name to look up.

        Returns
        -------
        set of EntityRecord
            The matching entities, empty if none.
        """
        return {self.entities[i] for i in self._names.get(normalize_name(name), ())}

    def class_by_label(self, label):
        """
        Get the class id whose label equals the given label (case and whitespace insensitive), or None.
        """
        return self._labels.get(normalize_name(label))

    def super_classes(self, class_id):
        """
        Get all strict ancestors of a class, deduplicated, in breadth-first order.

        Parameters
        ----------
        class_id : str
            The class id.

        Returns
        -------
        list of str
            The ancestors, nearest first. Parents of a same node are visited in sorted order.

        Raises
        ------
        UnknownIdError
            If the class id is unknown.
        """
        self.class_node(class_id)
        return [
            parent
            for _, parent in nx.bfs_edges(self.class_graph, class_id, reverse=True, sort_neighbors=sorted)
        ]

    def is_subclass(self, class_id, ancestor_id):
        """
        Check whether class_id equals ancestor_id or descends from it.
        """
        self.class_node(class_id)
        return class_id == ancestor_id or ancestor_id in nx.ancestors(self.class_graph, class_id)

    # WW lexicon

    def synset(self, synset_id):
        try:
            return self.synsets[synset_id]
        except KeyError:
            raise UnknownIdError(f"Unknown synset id {synset_id!r}.") from None

    def synsets_for_form(self, form):
        """
        Get all synsets having the given form (the possible senses of the form).

        Parameters
        ----------
        form : str
            A lemmatized word form. Lowercased and whitespace normalized before lookup.

        Returns
        -------
        list of Synset
            The synsets, sorted by synset id.
        """
        ids = self._forms.get(normalize_name(form), ())
        return [self.synsets[i] for i in sorted(ids)]

    def forms(self):
        """
        Get every normalized word form known to the store.
        """
        return sorted(self._forms)

    def hypernym_closure(self, synset_id):
        """
        Get the reflexive-transitive hypernym closure of a synset.

        Parameters
        ----------
        synset_id : str
            The synset id.

        Returns
        -------
        set of (str, int)
            Pairs of (ancestor id, length of the shortest hypernym path). The synset itself has depth 0.

        Raises
        ------
        UnknownIdError
            If the synset id is unknown.
        """
        self.synset(synset_id)
        upward = self.hypernym_graph.reverse(copy=False)
        return set(nx.single_source_shortest_path_length(upward, synset_id).items())

    def is_hyponym(self, synset_id, ancestor_id):
        """
        Check whether ancestor_id is a strict hypernym of synset_id at any depth.
        """
        self.synset(synset_id)
        return ancestor_id in nx.ancestors(self.hypernym_graph, synset_id)

    def root_depth(self, synset_id):
        """
        Get the depth of a synset measured from the root, i.e. the length of its longest hypernym path.
        """
        self.synset(synset_id)
        return self._root_depths[synset_id]

    def msc_hypernym(self, senses):
        """
        Get the most specific common hypernym of a set of senses.

        The closures are reflexive, so the msc hypernym of a singleton is the sense itself.
        Among the common ancestors, the deepest one from the root wins; ties are broken by the smallest synset id.

        Parameters
        ----------
        senses : iterable of str
            Nonempty set of synset ids.

        Returns
        -------
        str
            The id of the most specific common hypernym.

        Raises
        ------
        ValueError
            If senses is empty.
        NoCommonHypernymError
            If the senses share no ancestor.
        """
        senses = sorted(set(senses))
        if not senses:
            raise ValueError("msc_hypernym requires at least one sense.")
        for sense in senses:
            self.synset(sense)
        common = set.intersection(
            *({sense} | nx.ancestors(self.hypernym_graph, sense) for sense in senses)
        )
        if not common:
            raise NoCommonHypernymError(f"No common hypernym for senses {senses}.")
        return min(common, key=lambda s: (-self._root_depths[s], s))

    # Fact ontology

    def facts_matching(self, subject=None, relation=None, object=None):
        """
        Get all facts matching every bound position.

        Parameters
        ----------
        subject : ConceptRef, optional
            The subject to match.
        relation : str, optional
            The relation id to match.
        object : ConceptRef, optional
            The object to match.

        Returns
        -------
        list of Fact
            Matching facts in sorted (subject, relation, object) order.

        Raises
        ------
        ValueError
            If no position is bound.
        """
        if subject is None and relation is None and object is None:
            raise ValueError("At least one of subject, relation or object must be bound.")
        if subject is not None:
            if subject not in self.fact_graph:
                return []
            candidates = (fact for _, _, fact in self.fact_graph.out_edges(subject, data="fact"))
        elif object is not None:
            if object not in self.fact_graph:
                return []
            candidates = (fact for _, _, fact in self.fact_graph.in_edges(object, data="fact"))
        else:
            candidates = self._facts_by_relation.get(relation, [])
        return sorted(
            fact
            for fact in candidates
            if (subject is None or fact.subject == subject)
            and (relation is None or fact.relation == relation)
            and (object is None or fact.object == object)
        )

    def facts_between(self, a, b):
        """
        Get the facts linking two concepts in either direction, sorted.
        """
        facts = []
        for subject, object in ((a, b), (b, a)):
            edges = self.fact_graph.get_edge_data(subject, object) or {}
            facts += [data["fact"] for data in edges.values()]
        return sorted(set(facts))

    def has_fact(self, fact):
        return self.fact_graph.has_edge(fact.subject, fact.object, key=fact.relation)

    # Relation phrases

    def longest_relation_phrase(self, tokens, start=0):
        """
        Find the longest relation phrase starting at a token position.

        Parameters
        ----------
        tokens : sequence of str
            Lowercase tokens.
        start : int, optional
            The token position to match at. Default is 0.

        Returns
        -------
        tuple or None
            (RelationPhraseEntry, number of matched tokens), or None if no entry matches.
        """
        tokens = [token.lower() for token in tokens]
        for length in range(min(self._max_phrase_length, len(tokens) - start), 0, -1):
            entry = self.phrases.get(tuple(tokens[start : start + length]))
            if entry is not None:
                return entry, length
        return None

    def map_relation_phrase(self, tokens):
        """
        Map a token sequence to its relation when the whole sequence is a dictionary phrase.

        Returns
        -------
        tuple or None
            (relation_id, is_spatial), or None if the tokens are not a known phrase.
        """
        entry = self.phrases.get(tuple(token.lower() for token in tokens))
        if entry is None:
            return None
        return entry.relation, entry.is_spatial


def _read_jsonl(path, required_keys):
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise OntologyParseError(path, line_number, f"invalid JSON ({err.msg}).") from None
            if not isinstance(record, dict):
                raise OntologyParseError(path, line_number, "expected a JSON object.")
            missing = [key for key in required_keys if key not in record]
            if missing:
                raise OntologyParseError(path, line_number, f"missing keys {missing}.")
            records.append((line_number, record))
    return records


def _read_tsv(path, n_columns):
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) != n_columns:
                raise OntologyParseError(
                    path, line_number, f"expected {n_columns} tab-separated columns, got {len(columns)}."
                )
            rows.append((line_number, [c.strip() for c in columns]))
    return rows


def _hierarchy_graph(parents, graph_name):
    """
    Build the parent -> child graph of a hierarchy, raising CycleError with the members of one cycle if it has any.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(parents))
    graph.add_edges_from((parent, child) for child in sorted(parents) for parent in sorted(parents[child]))
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleError([parent for parent, _ in nx.find_cycle(graph)], graph_name)
    return graph


def _load_classes(path):
    classes = {}
    labels = {}
    rows = _read_jsonl(path, ["id", "label", "parents"])
    for line_number, record in rows:
        class_id = record["id"]
        if class_id in classes:
            raise OntologyParseError(path, line_number, f"duplicate class id {class_id!r}.")
        label = normalize_name(record["label"])
        if label in labels:
            raise OntologyParseError(
                path, line_number, f"class label {record['label']!r} already used by {labels[label]!r}."
            )
        labels[label] = class_id
        classes[class_id] = ClassNode(class_id, record["label"], frozenset(record["parents"]))
    for node in classes.values():
        for parent in node.parent_ids:
            if parent not in classes:
                raise DanglingReferenceError(parent, f"parents of class {node.class_id!r}")
    graph = _hierarchy_graph({c: n.parent_ids for c, n in classes.items()}, "class")
    return classes, graph


def _load_entities(path, classes):
    entities = {}
    for line_number, record in _read_jsonl(path, ["id", "name", "aliases", "class"]):
        entity_id = record["id"]
        if entity_id in entities:
            raise OntologyParseError(path, line_number, f"duplicate entity id {entity_id!r}.")
        if not str(record["name"]).strip():
            raise OntologyParseError(path, line_number, "empty entity name.")
        if record["class"] not in classes:
            raise DanglingReferenceError(record["class"], f"class of entity {entity_id!r}")
        aliases = frozenset(a for a in record["aliases"] if a != record["name"])
        entities[entity_id] = EntityRecord(entity_id, record["name"], aliases, record["class"])
    return entities


def _load_synsets(path):
    raw = {}
    for line_number, record in _read_jsonl(path, ["id", "forms", "hypernyms"]):
        synset_id = record["id"]
        if synset_id in raw:
            raise OntologyParseError(path, line_number, f"duplicate synset id {synset_id!r}.")
        if not record["forms"]:
            raise OntologyParseError(path, line_number, f"synset {synset_id!r} has no forms.")
        edges = []
        for edge in record.get("edges", []):
            if edge.get("type") not in SYNSET_EDGE_TYPES:
                raise OntologyParseError(
                    path, line_number, f"edge type {edge.get('type')!r} not in {list(SYNSET_EDGE_TYPES)}."
                )
            edges.append((edge["type"], edge["target"]))
        raw[synset_id] = (record["forms"], set(record["hypernyms"]), edges)

    for synset_id, (_, hypernyms, edges) in raw.items():
        for target in list(hypernyms) + [t for _, t in edges]:
            if target not in raw:
                raise DanglingReferenceError(target, f"edges of synset {synset_id!r}")

    # Hypernym and hyponym declarations are folded into a single hypernym relation
    hypernyms = {synset_id: set(h) for synset_id, (_, h, _) in raw.items()}
    for synset_id, (_, _, edges) in raw.items():
        for edge_type, target in edges:
            if edge_type == "hypernym":
                hypernyms[synset_id].add(target)
            elif edge_type == "hyponym":
                hypernyms[target].add(synset_id)
    graph = _hierarchy_graph(hypernyms, "hypernym")

    synsets = {}
    for synset_id, (forms, _, edges) in raw.items():
        other = frozenset(
            (edge_type, target)
            for edge_type, target in edges
            if edge_type not in ("hypernym", "hyponym")
        )
        other |= frozenset(("hyponym", h) for h in graph.successors(synset_id))
        synsets[synset_id] = Synset(
            synset_id,
            tuple(dict.fromkeys(normalize_name(f) for f in forms)),
            frozenset(hypernyms[synset_id]),
            other,
        )
    return synsets, graph


def _load_facts(path, stores):
    facts = set()
    for line_number, (subject, relation, obj) in _read_tsv(path, 3):
        refs = []
        for text in (subject, obj):
            try:
                ref = ConceptRef.parse(text)
            except ValueError as err:
                raise OntologyParseError(path, line_number, str(err)) from None
            if ref.id not in stores[ref.kind]:
                raise DanglingReferenceError(text, f"{path}:{line_number}")
            refs.append(ref)
        if not relation:
            raise OntologyParseError(path, line_number, "empty relation.")
        facts.add(Fact(refs[0], relation, refs[1]))
    return tuple(sorted(facts))


def _load_phrases(path):
    phrases = {}
    for line_number, (phrase, relation, spatial) in _read_tsv(path, 3):
        tokens = phrase_tokens(phrase)
        if not tokens:
            raise OntologyParseError(path, line_number, "empty relation phrase.")
        if spatial not in ("0", "1"):
            raise OntologyParseError(path, line_number, f"spatial flag must be 0 or 1, got {spatial!r}.")
        if tokens in phrases:
            raise OntologyParseError(path, line_number, f"duplicate relation phrase {phrase!r}.")
        phrases[tokens] = RelationPhraseEntry(tokens, relation, spatial == "1")
    return phrases


def _files_digest(paths):
    """
    Get the SHA-256 digest of the concatenated contents of files, in the given order.
    """
    sha = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as f:
            sha.update(f.read())
    return sha.hexdigest()


def load_store(entity_path, class_path, synset_path, fact_path, phrase_dict_path):
    """
    Load the three ontologies and the relation-phrase dictionary, validating every invariant.
    Loading stops at the first violation and nothing is returned.

    Parameters
    ----------
    entity_path : str
        Path to entities.jsonl.
    class_path : str
        Path to classes.jsonl.
    synset_path : str
        Path to synsets.jsonl.
    fact_path : str
        Path to facts.tsv.
    phrase_dict_path : str
        Path to relation_phrases.tsv.

    Returns
    -------
    OntologyStore
        The loaded store.

    Raises
    ------
    OntologyParseError
        If a line does not parse. The message carries the file and line number.
    DanglingReferenceError
        If an id does not resolve.
    CycleError
        If the class graph or the hypernym graph has a cycle.
    """
    classes, class_graph = _load_classes(class_path)
    entities = _load_entities(entity_path, classes)
    synsets, hypernym_graph = _load_synsets(synset_path)
    facts = _load_facts(fact_path, {"entity": entities, "synset": synsets, "class": classes})
    phrases = _load_phrases(phrase_dict_path)
    return OntologyStore(
        classes=classes,
        entities=entities,
        synsets=synsets,
        facts=facts,
        phrases=phrases,
        class_graph=class_graph,
        hypernym_graph=hypernym_graph,
        paths={
            "entities": str(entity_path),
            "classes": str(class_path),
            "synsets": str(synset_path),
            "facts": str(fact_path),
            "relation_phrases": str(phrase_dict_path),
        },
        digest=_files_digest([entity_path, class_path, synset_path, fact_path, phrase_dict_path]),
    )
