# -*- coding: utf-8 -*-
"""
Collection of functions to evaluate retrieval runs: average precision, MAP, interpolated
precision-recall and F-measure curves, and the paired randomization test.
"""
import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .ontology_store import DataFormatError


class QrelsWarning(Warning):
    pass


warnings.filterwarnings("always", category=QrelsWarning)


RECALL_LEVELS = tuple(i / 10 for i in range(11))


@dataclass
class MetricReport:
    per_query_ap: dict = field(default_factory=dict)
    map: float = 0.0
    pr_curve: list = field(default_factory=list)
    f_curve: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)


def read_qrels(path):
    """
    Read a TREC qrels file ("query_id 0 doc_id rel", rel in {0, 1}).

    Queries without any relevant document are excluded with a QrelsWarning.

    Parameters
    ----------
    path : str
        The qrels file.

    Returns
    -------
    dict
        query_id -> set of relevant doc_ids.

    Raises
    ------
    DataFormatError
        If a line is malformed, a relevance is not 0 or 1, or a (query, doc) pair is repeated.
    """
    judged = {}
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            columns = line.split()
            if len(columns) != 4:
                raise DataFormatError(path, line_number, "expected 'query_id 0 doc_id rel'.")
            query_id, _, doc_id, rel = columns
            if rel not in ("0", "1"):
                raise DataFormatError(path, line_number, f"relevance must be 0 or 1, got {rel!r}.")
            if (query_id, doc_id) in seen:
                raise DataFormatError(path, line_number, f"duplicate judgment for ({query_id}, {doc_id}).")
            seen.add((query_id, doc_id))
            judged.setdefault(query_id, set())
            if rel == "1":
                judged[query_id].add(doc_id)

    empty = sorted(q for q, relevant in judged.items() if not relevant)
    if empty:
        warnings.warn(
            f"Queries {empty} have no relevant document in {path} and are excluded.",
            QrelsWarning,
            stacklevel=2,
        )
    return {q: relevant for q, relevant in judged.items() if relevant}


def read_run(path):
    """
    Read a TREC run file ("query_id Q0 doc_id rank score tag"). Lines starting with "#" are skipped.

    Parameters
    ----------
    path : str
        The run file.

    Returns
    -------
    dict
        query_id -> list of doc_ids in rank order.

    Raises
    ------
    DataFormatError
        If a line is malformed or a document is repeated within a query.
    """
    entries = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            columns = line.split()
            if len(columns) != 6:
                raise DataFormatError(path, line_number, "expected 'query_id Q0 doc_id rank score tag'.")
            query_id, _, doc_id, rank, score, _ = columns
            try:
                rank, score = int(rank), float(score)
            except ValueError:
                raise DataFormatError(path, line_number, "rank and score must be numbers.") from None
            ranked = entries.setdefault(query_id, {})
            if doc_id in ranked:
                raise DataFormatError(path, line_number, f"document {doc_id} repeated for query {query_id}.")
            ranked[doc_id] = (rank, -score)
    return {
        query_id: sorted(ranked, key=lambda d: (ranked[d], d))
        for query_id, ranked in entries.items()
    }


def write_run(results, path, tag, manifest=None):
    """
    Write search results as a TREC run file, preceded by a "# manifest" comment line.

    Parameters
    ----------
    results : dict
        query_id -> ranked list of ScoredDoc.
    path : str
        The output file.
    tag : str
        The run tag, e.g. the preset name.
    manifest : dict, optional
        Run manifest to embed.

    Returns
    -------
    None
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if manifest is not None:
            f.write(f"# manifest {json.dumps(manifest, sort_keys=True)}\n")
        for query_id in sorted(results):
            for rank, hit in enumerate(results[query_id], start=1):
                f.write(f"{query_id} Q0 {hit.doc_id} {rank} {hit.score:.10f} {tag}\n")


def average_precision(ranking, relevant_set):
    """
    Compute the average precision of a ranking.

    Parameters
    ----------
    ranking : list
        Ranked doc ids, without duplicates.
    relevant_set : set
        Nonempty set of relevant doc ids.

    Returns
    -------
    float
        Mean over the relevant documents of the precision at their rank; unretrieved ones count 0.

    Raises
    ------
    ValueError
        If relevant_set is empty or ranking has duplicates.
    """
    if not relevant_set:
        raise ValueError("Average precision requires at least one relevant document.")
    if len(set(ranking)) != len(ranking):
        raise ValueError("Ranking contains duplicate documents.")
    hits = 0
    total = 0.0
    for rank, doc_id in enumerate(ranking, start=1):
        if doc_id in relevant_set:
            hits += 1
            total += hits / rank
    return total / len(relevant_set)


def _evaluated_queries(run, qrels):
    if not qrels:
        raise ValueError("No judged query to evaluate.")
    if not set(run) & set(qrels):
        raise ValueError("The run and the qrels share no query.")
    unjudged = sorted(set(run) - set(qrels))
    if unjudged:
        warnings.warn(
            f"Queries {unjudged} of the run have no relevance judgment and are ignored.",
            QrelsWarning,
            stacklevel=3,
        )
    return sorted(qrels)


def mean_average_precision(run, qrels):
    """
    Compute the per-query average precision and their unweighted mean over the judged queries.
    Judged queries missing from the run score 0.

    Parameters
    ----------
    run : dict
        query_id -> ranked doc ids.
    qrels : dict
        query_id -> set of relevant doc ids.

    Returns
    -------
    MetricReport
        Report with per_query_ap and map set.

    Raises
    ------
    ValueError
        If the run and the qrels share no query.
    """
    queries = _evaluated_queries(run, qrels)
    per_query_ap = {q: average_precision(run.get(q, []), qrels[q]) for q in queries}
    return MetricReport(per_query_ap=per_query_ap, map=float(np.mean(list(per_query_ap.values()))))


def interpolated_precision(ranking, relevant_set):
    """
    Get the interpolated precision of one query at the eleven recall levels 0.0, 0.1, ..., 1.0,
    i.e. the maximum precision at any recall at least equal to the level.

    Returns
    -------
    numpy.ndarray
        The eleven interpolated precisions.
    """
    points = []
    hits = 0
    for rank, doc_id in enumerate(ranking, start=1):
        if doc_id in relevant_set:
            hits += 1
            points.append((hits / len(relevant_set), hits / rank))
    return np.array(
        [
            max((p for r, p in points if r >= level - 1e-12), default=0.0)
            for level in RECALL_LEVELS
        ]
    )


def interpolated_pr_and_f(run, qrels):
    """
    Compute the average interpolated precision-recall curve and the F-measure-recall curve.

    F at level R is 2 P R / (P + R) with P the averaged interpolated precision, 0 when P + R = 0.

    Parameters
    ----------
    run : dict
        query_id -> ranked doc ids.
    qrels : dict
        query_id -> set of relevant doc ids.

    Returns
    -------
    MetricReport
        Report with pr_curve and f_curve set, as lists of (recall level, value).
    """
    queries = _evaluated_queries(run, qrels)
    precision = np.mean([interpolated_precision(run.get(q, []), qrels[q]) for q in queries], axis=0)
    recall = np.array(RECALL_LEVELS)
    denominator = precision + recall
    f_measure = np.divide(
        2 * precision * recall, denominator, out=np.zeros_like(denominator), where=denominator > 0
    )
    return MetricReport(
        pr_curve=[(float(r), float(p)) for r, p in zip(recall, precision)],
        f_curve=[(float(r), float(f)) for r, f in zip(recall, f_measure)],
    )


def evaluate(run, qrels, manifest=None):
    """
    Compute the full report of a run: per-query AP, MAP and both curves.

    Returns
    -------
    MetricReport
        The report.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", QrelsWarning)
        curves = interpolated_pr_and_f(run, qrels)
    report = mean_average_precision(run, qrels)
    report.pr_curve = curves.pr_curve
    report.f_curve = curves.f_curve
    report.manifest = dict(manifest or {})
    return report


def randomization_test(ap_a, ap_b, permutations=100000, seed=None, return_distribution=False):
    """
    Two-sided paired randomization test of the mean difference between two systems.

    Each permutation flips the sign of every per-query difference with probability 1/2.
    The p-value is (number of permuted |mean| >= observed |mean|, plus 1) / (permutations + 1).
    Draws are made in blocks of 10,000 permutations from one seeded generator.

    Parameters
    ----------
    ap_a : array-like
        Per-query values of system A.
    ap_b : array-like
        Per-query values of system B, paired with ap_a.
    permutations : int, optional
        Number of permutations (default is 100000).
    seed : int, optional
        Seed of the generator.
    return_distribution : bool, optional
        If True, also return the permuted |mean| values (default is False).

    Returns
    -------
    float or (float, numpy.ndarray)
        The p-value, and the permuted statistics if requested.

    Raises
    ------
    ValueError
        If the inputs are empty or of different lengths, or permutations < 1.
    """
    if len(ap_a) != len(ap_b):
        raise ValueError(f"Paired values have different lengths ({len(ap_a)} and {len(ap_b)}).")
    differences = np.asarray(ap_a, dtype=float) - np.asarray(ap_b, dtype=float)
    if len(differences) == 0:
        raise ValueError("Randomization test requires at least one pair.")
    if permutations < 1:
        raise ValueError(f"permutations must be at least 1, got {permutations}.")

    rng = np.random.default_rng(seed)
    observed = abs(differences.mean())
    statistics = np.empty(permutations)
    block = 10000
    for start in range(0, permutations, block):
        size = min(block, permutations - start)
        signs = rng.integers(0, 2, size=(size, len(differences)), dtype=np.int8) * 2 - 1
        statistics[start : start + size] = np.abs(signs @ differences) / len(differences)

    # Ties with the observed value count as extreme
    count = int(np.count_nonzero(statistics >= observed - 1e-12))
    p_value = (count + 1) / (permutations + 1)
    if return_distribution:
        return p_value, statistics
    return p_value


def relative_improvement(map_a, map_b):
    """
    Get (map_a - map_b) / map_b; 0 when both are 0 and inf when only map_b is 0.
    """
    if map_b == 0:
        return 0.0 if map_a == 0 else float("inf")
    return (map_a - map_b) / map_b


def compare_reports(report_a, report_b, permutations=100000, seed=None):
    """
    Compare two reports over the same query set.

    Parameters
    ----------
    report_a : MetricReport
        Report of system A.
    report_b : MetricReport
        Report of system B.
    permutations : int, optional
        Number of permutations of the randomization test (default is 100000).
    seed : int, optional
        Seed of the randomization test.

    Returns
    -------
    dict
        Both MAPs, the relative improvement of A over B and the two-sided p-value.

    Raises
    ------
    ValueError
        If the reports do not cover the same queries.
    """
    if set(report_a.per_query_ap) != set(report_b.per_query_ap):
        raise ValueError(
            "Reports cover different queries: "
            f"{sorted(set(report_a.per_query_ap) ^ set(report_b.per_query_ap))}."
        )
    queries = sorted(report_a.per_query_ap)
    p_value = randomization_test(
        [report_a.per_query_ap[q] for q in queries],
        [report_b.per_query_ap[q] for q in queries],
        permutations,
        seed,
    )
    return {
        "map_a": report_a.map,
        "map_b": report_b.map,
        "improvement": relative_improvement(report_a.map, report_b.map),
        "p_value": p_value,
        "permutations": permutations,
        "seed": seed,
    }


def save_report(report, path):
    """
    Save a report as JSON, and its curves as TSV next to it (same path with a .tsv suffix).

    Parameters
    ----------
    report : MetricReport
        The report.
    path : str
        The JSON output path.

    Returns
    -------
    str
        The path of the TSV file.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(asdict(report), f, indent=2, sort_keys=True)
        f.write("\n")
    tsv_path = (path[: -len(".json")] if path.endswith(".json") else path) + ".tsv"
    with open(tsv_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# manifest {json.dumps(report.manifest, sort_keys=True)}\n")
        f.write("recall\tprecision\tf_measure\n")
        for (recall, precision), (_, f_measure) in zip(report.pr_curve, report.f_curve):
            f.write(f"{recall:.1f}\t{precision:.10f}\t{f_measure:.10f}\n")
    return tsv_path


def load_report(path):
    """
    Load a report saved by save_report.

    Raises
    ------
    DataFormatError
        If the file is not a report.
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            content = json.load(f)
        except json.JSONDecodeError as err:
            raise DataFormatError(path, err.lineno, f"invalid JSON ({err.msg}).") from None
    if not isinstance(content, dict) or "per_query_ap" not in content or "map" not in content:
        raise DataFormatError(path, 1, "not a metric report (missing per_query_ap or map).")
    return MetricReport(
        per_query_ap={q: float(ap) for q, ap in content["per_query_ap"].items()},
        map=float(content["map"]),
        pr_curve=[tuple(point) for point in content.get("pr_curve", [])],
        f_curve=[tuple(point) for point in content.get("f_curve", [])],
        manifest=content.get("manifest", {}),
    )


def read_manifest(path):
    """
    Get the run manifest embedded in a "# manifest {json}" comment line of a run file, or an empty dict.
    """
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if line.startswith("# manifest "):
                return json.loads(line[len("# manifest ") :])
    return {}
