import json
import os
import shutil

from ontosearch import get_fixture_paths
from ontosearch.evaluation import load_report, read_manifest
from ontosearch.scripts.ontosearch_cli import EXIT_DATA_ERROR, EXIT_SUCCESS, EXIT_USAGE, main
from pytest import raises

fixture = get_fixture_paths()


def _index(tmp_path, preset, name=None):
    out = str(tmp_path / (name or f"index_{preset}"))
    assert main(["index", "--corpus", fixture["corpus"], "--out", out, "--preset", preset]) == EXIT_SUCCESS
    return out


def _map(tmp_path, preset, index):
    run = str(tmp_path / f"run_{preset}.txt")
    report = str(tmp_path / f"report_{preset}.json")
    argv = ["--preset", preset, "run", "--index", index, "--topics", fixture["topics"], "--out", run]
    assert main(argv) == EXIT_SUCCESS
    assert main(["eval", "--run", run, "--qrels", fixture["qrels"], "--out", report]) == EXIT_SUCCESS
    return load_report(report).map


def test_index_deterministic(tmp_path):
    """
    Test that indexing twice gives byte-identical files.
    """
    out = _index(tmp_path, "semantic")
    first = {name: (tmp_path / "index_semantic" / name).read_bytes() for name in ["vocab.tsv", "postings.tsv", "meta.tsv"]}
    _index(tmp_path, "semantic")
    for name, content in first.items():
        assert (tmp_path / "index_semantic" / name).read_bytes() == content
    assert "ne:*/*/barca" in (tmp_path / "index_semantic" / "vocab.tsv").read_text()
    assert out.endswith("index_semantic")


def test_search(tmp_path, capsys):
    """
    Test a semantic search and its printed ranking.
    """
    index = _index(tmp_path, "semantic")
    capsys.readouterr()
    assert main(["search", "tsunami in Southeast Asia", "--index", index, "--explain"]) == EXIT_SUCCESS
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# manifest ")
    ranked = [line.split("\t")[1] for line in lines if line[:1].isdigit()]
    assert set(ranked) == {"d01", "d02", "d06"}
    assert any('"branch": "b"' in line for line in lines)


def test_expand(capsys):
    """
    Test the printed latent concepts of a query.
    """
    assert main(["expand", "cities that are tourist destinations of Thailand"]) == EXIT_SUCCESS
    provenance = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [p["concept"] for p in provenance] == ["ent:chiangmai", "ent:phuket"]
    assert provenance[0]["support_fact"] == "ent:thailand hasTouristDestination ent:chiangmai"


def test_model_ordering(tmp_path):
    """
    Test the expected ordering of the models on the fixture.
    """
    keyword_index = _index(tmp_path, "lexical")
    semantic = _map(tmp_path, "semantic", _index(tmp_path, "semantic"))
    lexical = _map(tmp_path, "lexical", keyword_index)
    csa = _map(tmp_path, "csa", keyword_index)
    rcsa = _map(tmp_path, "rcsa", keyword_index)
    assert semantic > lexical
    assert rcsa > csa
    assert read_manifest(str(tmp_path / "run_rcsa.txt"))["preset"] == "rcsa"


def test_compare(tmp_path, capsys):
    """
    Test comparing two runs and two reports.
    """
    keyword_index = _index(tmp_path, "lexical")
    _map(tmp_path, "rcsa", keyword_index)
    _map(tmp_path, "csa", keyword_index)
    capsys.readouterr()
    argv = [
        "compare",
        str(tmp_path / "report_rcsa.json"),
        str(tmp_path / "report_csa.json"),
        "--permutations",
        "2000",
    ]
    assert main(argv) == EXIT_SUCCESS
    out = capsys.readouterr().out
    assert "p-value" in out

    runs = [str(tmp_path / "run_rcsa.txt"), str(tmp_path / "run_csa.txt")]
    assert main(["compare", *runs, "--permutations", "2000"]) == EXIT_USAGE
    assert main(["compare", *runs, "--qrels", fixture["qrels"], "--permutations", "2000"]) == EXIT_SUCCESS


def test_exit_codes(tmp_path):
    """
    Test usage and data error exit codes.
    """
    with raises(SystemExit) as err:
        main(["search"])
    assert err.value.code == EXIT_USAGE
    with raises(SystemExit) as err:
        main(["index", "--corpus", fixture["corpus"], "--out", str(tmp_path), "--preset", "bm25"])
    assert err.value.code == EXIT_USAGE

    missing = str(tmp_path / "missing.jsonl")
    assert main(["index", "--corpus", missing, "--out", str(tmp_path / "idx")]) == EXIT_DATA_ERROR
    assert main(["expand", "tsunami", "--ontology", str(tmp_path)]) == EXIT_DATA_ERROR

    keyword_index = _index(tmp_path, "lexical")
    assert main(["search", "tsunami", "--index", keyword_index, "--preset", "semantic"]) == EXIT_DATA_ERROR
    assert main(["search", "the of", "--index", keyword_index, "--preset", "lexical"]) == EXIT_DATA_ERROR
    assert main(["search", "tsunami", "--index", keyword_index, "--preset", "lexical"]) == EXIT_SUCCESS


def test_search_rejects_other_ontology(tmp_path):
    """
    Test that searching with ontology files other than those of the index is a data error.
    """
    index = _index(tmp_path, "semantic")
    ontology = tmp_path / "ontology"
    shutil.copytree(os.path.dirname(fixture["facts"]), ontology)
    assert main(["search", "tsunami", "--index", index, "--ontology", str(ontology)]) == EXIT_SUCCESS

    with open(ontology / "facts.tsv", "a") as f:
        f.write("ent:laos\tisPartOf\tent:thailand\n")
    assert main(["search", "tsunami", "--index", index, "--ontology", str(ontology)]) == EXIT_DATA_ERROR
