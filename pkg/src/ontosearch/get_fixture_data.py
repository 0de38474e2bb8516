from importlib.resources import files

from .ontology_store import load_store

FIXTURE_FILES = {
    "entities": "entities.jsonl",
    "classes": "classes.jsonl",
    "synsets": "synsets.jsonl",
    "facts": "facts.tsv",
    "relation_phrases": "relation_phrases.tsv",
    "corpus": "corpus.jsonl",
    "topics": "topics.jsonl",
    "qrels": "qrels.txt",
}


def get_fixture_paths():
    """
    Get the paths of the bundled desk fixture: ontologies, relation phrases, corpus, topics and qrels.

    Returns
    -------
    paths : dict
        File role -> path string.
    """
    fixture = files("ontosearch") / "data" / "fixture"
    return {role: str(fixture / name) for role, name in FIXTURE_FILES.items()}


def get_fixture_store():
    """
    Load the ontology store of the bundled fixture.

    Returns
    -------
    store : OntologyStore
        The fixture store.
    """
    paths = get_fixture_paths()
    return load_store(
        paths["entities"],
        paths["classes"],
        paths["synsets"],
        paths["facts"],
        paths["relation_phrases"],
    )
