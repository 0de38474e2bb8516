# -*- coding: utf-8 -*-
"""
Collection of functions to read document collections and topic files.
"""
import json
import re

from .ontology_store import DataFormatError


_DOC_PATTERN = re.compile(r"<DOC>(.*?)</DOC>", re.DOTALL | re.IGNORECASE)
_DOCNO_PATTERN = re.compile(r"<DOCNO>\s*(.*?)\s*</DOCNO>", re.DOTALL | re.IGNORECASE)
_TEXT_PATTERN = re.compile(r"<TEXT>(.*?)</TEXT>", re.DOTALL | re.IGNORECASE)
_TAG_PATTERN = re.compile(r"<[^>]+>")


def _read_jsonl_pairs(path, id_key, text_key):
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as err:
                raise DataFormatError(path, line_number, f"invalid JSON ({err.msg}).") from None
            if not isinstance(record, dict) or id_key not in record or text_key not in record:
                raise DataFormatError(path, line_number, f"expected an object with {id_key!r} and {text_key!r}.")
            pairs.append((line_number, str(record[id_key]), str(record[text_key])))
    return pairs


def _read_trec_sgml(path):
    with open(path, "r", encoding="utf-8") as f:
        content = f.read()
    documents = []
    for match in _DOC_PATTERN.finditer(content):
        line_number = content.count("\n", 0, match.start()) + 1
        docno = _DOCNO_PATTERN.search(match.group(1))
        if docno is None:
            raise DataFormatError(path, line_number, "document without <DOCNO>.")
        texts = _TEXT_PATTERN.findall(match.group(1))
        text = " ".join(_TAG_PATTERN.sub(" ", t) for t in texts)
        documents.append((line_number, docno.group(1), " ".join(text.split())))
    return documents


def read_corpus(path):
    """
    Read a document collection, either JSONL ({"docno", "text"} per line, selected by the .jsonl suffix)
    or TREC SGML (<DOC><DOCNO>...</DOCNO><TEXT>...</TEXT></DOC>).

    Parameters
    ----------
    path : str
        The collection file.

    Returns
    -------
    list of (str, str)
        (doc_id, text) pairs in file order.

    Raises
    ------
    DataFormatError
        If a record does not parse or a doc_id is repeated.
    """
    if str(path).endswith(".jsonl"):
        documents = _read_jsonl_pairs(path, "docno", "text")
    else:
        documents = _read_trec_sgml(path)
    seen = {}
    for line_number, doc_id, _ in documents:
        if doc_id in seen:
            raise DataFormatError(
                path, line_number, f"duplicate document {doc_id!r}, first seen on line {seen[doc_id]}."
            )
        seen[doc_id] = line_number
    return [(doc_id, text) for _, doc_id, text in documents]


def read_topics(path):
    """
    Read a topic file, either JSONL ({"qid", "text"} per line) or TSV (qid<TAB>text).

    Returns
    -------
    list of (str, str)
        (query_id, text) pairs in file order.
    """
    if str(path).endswith(".jsonl"):
        return [(query_id, text) for _, query_id, text in _read_jsonl_pairs(path, "qid", "text")]
    topics = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip() or line.startswith("#"):
                continue
            query_id, sep, text = line.rstrip("\n").partition("\t")
            if not sep:
                raise DataFormatError(path, line_number, "expected 'qid<TAB>text'.")
            topics.append((query_id.strip(), text.strip()))
    return topics
