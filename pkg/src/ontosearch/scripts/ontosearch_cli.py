"""
Command-line entry point: index a corpus, search it, expand queries, write runs, evaluate and compare models.
"""
import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field

from ontosearch.annotation import annotate_document, represent_query
from ontosearch.corpus import read_corpus, read_topics
from ontosearch.evaluation import (
    compare_reports,
    evaluate,
    load_report,
    randomization_test,
    read_manifest,
    read_qrels,
    read_run,
    save_report,
    write_run,
)
from ontosearch.get_fixture_data import get_fixture_paths
from ontosearch.model_registry import PRESETS, load_model_config, model_config_to_dict
from ontosearch.ontology_store import DataFormatError, OntologyError, load_store
from ontosearch.rcsa import expand_query
from ontosearch.vsm_index import (
    IndexCompatibilityError,
    build_index,
    check_index_compatibility,
    load_index,
    matched_terms,
    save_index,
    search,
)
from ontosearch.wsd import build_sense_graph


EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_DATA_ERROR = 2

ONTOLOGY_FILES = {
    "entities": "entities.jsonl",
    "classes": "classes.jsonl",
    "synsets": "synsets.jsonl",
    "facts": "facts.tsv",
    "relation_phrases": "relation_phrases.tsv",
}


class EmptyQueryError(ValueError):
    pass


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    corpus: str = None
    ontology: dict = field(default_factory=dict)
    preset: str = None
    index: str = None
    topics: str = None
    qrels: str = None
    seed: int = None


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def ontology_paths(directory=None):
    """
    Get the five ontology file paths of a directory, or of the bundled fixture if directory is None.
    """
    if directory is None:
        fixture = get_fixture_paths()
        return {role: fixture[role] for role in ONTOLOGY_FILES}
    return {role: os.path.join(directory, name) for role, name in ONTOLOGY_FILES.items()}


def _load_store(paths):
    return load_store(
        paths["entities"], paths["classes"], paths["synsets"], paths["facts"], paths["relation_phrases"]
    )


def cmd_index(config, corpus, ontology, out, preset="semantic", manifest=None):
    """
    Annotate a corpus according to the model configuration, then build and persist its index.

    Parameters
    ----------
    config : ModelConfig
        The model configuration.
    corpus : str
        Corpus path (JSONL or TREC SGML).
    ontology : dict
        Ontology file paths, as returned by ontology_paths().
    out : str
        Index output directory.
    preset : str, optional
        Preset name recorded with the index (default is "semantic").
    manifest : RunManifest, optional
        Manifest recorded with the index.

    Returns
    -------
    InvertedIndex
        The built index.
    """
    store = _load_store(ontology)
    graph = build_sense_graph(store)
    docs = [
        annotate_document(doc_id, text, store, graph, config) for doc_id, text in read_corpus(corpus)
    ]
    meta = {
        "preset": preset,
        "model_config": model_config_to_dict(config),
        "ontology_digest": store.digest,
        "manifest": asdict(manifest) if manifest is not None else {},
    }
    index = build_index(docs, idf_floor=config.idf_floor, meta=meta)
    save_index(index, out)
    return index


def cmd_search(index, query_text, config, store, k=10, query_id="query", graph=None):
    """
    Represent a query with the model configuration, expand it and search the index.

    Parameters
    ----------
    index : InvertedIndex
        The loaded index.
    query_text : str
        The query.
    config : ModelConfig
        The model configuration; its document-side settings must match the index.
    store : OntologyStore
        The loaded store.
    k : int, optional
        Number of documents (default is 10).
    query_id : str, optional
        Identifier of the query (default is "query").
    graph : SenseGraph, optional
        Sense graph of store, built if not given.

    Returns
    -------
    result : SearchResult
        The ranked documents.
    query : QueryRepresentation
        The query representation, latent terms included.

    Raises
    ------
    IndexCompatibilityError
        If the index was built with other document-side settings or other ontology files.
    EmptyQueryError
        If no query term is effective.
    """
    check_index_compatibility(index, config, store)
    if graph is None:
        graph = build_sense_graph(store)
    query = represent_query(query_id, query_text, store, graph, config)
    expand_query(query, query_text, store, graph, config)
    result = search(index, query, k, latent_term_weight=config.latent_term_weight)
    if result.no_effective_terms:
        raise EmptyQueryError(f"Query {query_text!r} has no effective term.")
    return result, query


def cmd_eval(run_file, qrels_file, out=None, manifest=None):
    """
    Evaluate a run file against qrels and write the JSON and TSV reports.

    Returns
    -------
    MetricReport
        The report.
    """
    run_manifest = read_manifest(run_file)
    run_manifest.update({k: v for k, v in (manifest or {}).items() if v is not None})
    report = evaluate(read_run(run_file), read_qrels(qrels_file), manifest=run_manifest)
    if out is not None:
        save_report(report, out)
    return report


def _load_or_evaluate(path, qrels):
    if path.endswith(".json"):
        return load_report(path)
    if qrels is None:
        raise UsageError(f"{path} is not a report (.json): --qrels is required to evaluate run files.")
    return evaluate(read_run(path), qrels, manifest=read_manifest(path))


def cmd_compare(report_a, report_b, permutations=100000, seed=0):
    """
    Compare two metric reports: both MAPs, the relative improvement of A over B and the two-sided p-value.
    """
    return compare_reports(report_a, report_b, permutations, seed)


def _manifest(args, **kwargs):
    return RunManifest(preset=args.preset, seed=args.seed, **kwargs)


def _print_manifest(manifest):
    print(f"# manifest {json.dumps(asdict(manifest), sort_keys=True)}")


def _run_index(args, config):
    ontology = ontology_paths(args.ontology)
    manifest = _manifest(args, corpus=args.corpus, ontology=ontology, index=args.out)
    index = cmd_index(config, args.corpus, ontology, args.out, args.preset, manifest)
    _print_manifest(manifest)
    print(f"Indexed {index.doc_count} documents, {len(index.vocabulary)} terms, into {args.out}.")


def _run_search(args, config):
    index = load_index(args.index)
    ontology = ontology_paths(args.ontology)
    store = _load_store(ontology)
    result, query = cmd_search(index, args.query, config, store, args.k)
    _print_manifest(_manifest(args, ontology=ontology, index=args.index))
    for rank, hit in enumerate(result, start=1):
        print(f"{rank}\t{hit.doc_id}\t{hit.score:.6f}")
        if args.explain:
            terms = matched_terms(index, query, hit.doc_id, config.latent_term_weight)
            print(f"\tmatched: {', '.join(terms)}")
    if args.explain:
        for provenance in dict.fromkeys(p for _, p in query.latent_terms):
            print(provenance)


def _run_expand(args, config):
    store = _load_store(ontology_paths(args.ontology))
    graph = build_sense_graph(store)
    query = represent_query("query", args.query, store, graph, config)
    for latent in expand_query(query, args.query, store, graph, config):
        print(json.dumps(latent.provenance(), sort_keys=True))


def _run_run(args, config):
    index = load_index(args.index)
    ontology = ontology_paths(args.ontology)
    store = _load_store(ontology)
    graph = build_sense_graph(store)
    results = {}
    for query_id, text in read_topics(args.topics):
        try:
            results[query_id], _ = cmd_search(index, text, config, store, args.k, query_id, graph)
        except EmptyQueryError as err:
            print(f"Skipping {query_id}: {err}", file=sys.stderr)
    manifest = _manifest(
        args,
        corpus=index.meta.get("manifest", {}).get("corpus"),
        ontology=ontology,
        index=args.index,
        topics=args.topics,
    )
    write_run(results, args.out, tag=args.preset, manifest=asdict(manifest))
    print(f"Wrote {sum(len(r) for r in results.values())} results for {len(results)} queries to {args.out}.")


def _run_eval(args, config):
    report = cmd_eval(args.run, args.qrels, args.out, {"qrels": args.qrels, "seed": args.seed})
    print(f"# manifest {json.dumps(report.manifest, sort_keys=True)}")
    for query_id, ap in sorted(report.per_query_ap.items()):
        print(f"{query_id}\tAP\t{ap:.4f}")
    print(f"all\tMAP\t{report.map:.4f}")
    if args.plot is not None:
        from ontosearch.plotters import plot_pr_and_f_curves, savefig

        reports = [report] + [load_report(path) for path in args.overlay]
        fig, _ = plot_pr_and_f_curves(reports)
        savefig(fig, args.plot)


def _run_compare(args, config):
    qrels = read_qrels(args.qrels) if args.qrels is not None else None
    report_a = _load_or_evaluate(args.a, qrels)
    report_b = _load_or_evaluate(args.b, qrels)
    comparison = cmd_compare(report_a, report_b, args.permutations, args.seed)
    _print_manifest(_manifest(args, qrels=args.qrels))
    print(f"MAP A\t{comparison['map_a']:.4f}")
    print(f"MAP B\t{comparison['map_b']:.4f}")
    print(f"Improvement\t{100 * comparison['improvement']:.1f}%")
    print(f"p-value\t{comparison['p_value']:.4f}")
    if args.plot is not None:
        from ontosearch.plotters import plot_null_distribution, savefig

        queries = sorted(report_a.per_query_ap)
        ap_a = [report_a.per_query_ap[q] for q in queries]
        ap_b = [report_b.per_query_ap[q] for q in queries]
        p_value, statistics = randomization_test(
            ap_a, ap_b, args.permutations, args.seed, return_distribution=True
        )
        observed = abs(sum(ap_a) - sum(ap_b)) / len(queries)
        fig, _ = plot_null_distribution(statistics, observed, p_value)
        savefig(fig, args.plot)


def _global_options(parser, suppress):
    default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
    parser.add_argument("--config", default=default(None), help="JSON or YAML file overriding the preset.")
    parser.add_argument(
        "--preset", default=default("semantic"), choices=list(PRESETS), help="Search model preset."
    )
    parser.add_argument("--seed", type=int, default=default(0), help="Seed of the randomization test.")
    parser.add_argument(
        "--explain", action="store_true", default=default(False), help="Print matched terms and provenance."
    )


def build_parser():
    """
    Build the argument parser of the ontosearch command.
    """
    parser = _ArgumentParser(prog="ontosearch", description=__doc__.strip())
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    subparsers = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)
    subparsers.required = True

    p = subparsers.add_parser("index", parents=[common], help="Annotate and index a corpus.")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ontology", help="Directory holding the five ontology files (default: bundled fixture).")
    p.add_argument("--out", required=True, help="Index output directory.")
    p.set_defaults(handler=_run_index)

    p = subparsers.add_parser("search", parents=[common], help="Search an index.")
    p.add_argument("query")
    p.add_argument("--index", required=True)
    p.add_argument("--ontology")
    p.add_argument("-k", type=int, default=10)
    p.set_defaults(handler=_run_search)

    p = subparsers.add_parser("expand", parents=[common], help="Print the latent concepts of a query.")
    p.add_argument("query")
    p.add_argument("--ontology")
    p.set_defaults(handler=_run_expand)

    p = subparsers.add_parser("run", parents=[common], help="Search every topic and write a TREC run.")
    p.add_argument("--index", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--ontology")
    p.add_argument("--out", required=True)
    p.add_argument("-k", type=int, default=1000)
    p.set_defaults(handler=_run_run)

    p = subparsers.add_parser("eval", parents=[common], help="Evaluate a TREC run against qrels.")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--out", help="JSON report path; the curves go to the same path with a .tsv suffix.")
    p.add_argument("--plot", help="P-R and F-R curve figure path.")
    p.add_argument("--overlay", nargs="*", default=[], help="Other JSON reports drawn on the figure.")
    p.set_defaults(handler=_run_eval)

    p = subparsers.add_parser("compare", parents=[common], help="Compare two reports or runs.")
    p.add_argument("a", help="Report (.json) or run file of system A.")
    p.add_argument("b", help="Report (.json) or run file of system B.")
    p.add_argument("--qrels", help="Qrels, required when comparing run files.")
    p.add_argument("--permutations", type=int, default=100000)
    p.add_argument("--plot", help="Null distribution figure path.")
    p.set_defaults(handler=_run_compare)
    return parser


def main(argv=None):
    """
    Run the ontosearch command and return its exit code: 0 success, 1 usage error, 2 data error.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_model_config(args.config, args.preset)
        args.handler(args, config)
    except UsageError as err:
        print(f"ontosearch: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (
        DataFormatError,
        OntologyError,
        IndexCompatibilityError,
        EmptyQueryError,
        ValueError,
        OSError,
    ) as err:
        print(f"ontosearch: error: {err}", file=sys.stderr)
        return EXIT_DATA_ERROR
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
