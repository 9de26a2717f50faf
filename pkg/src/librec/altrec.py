"""Alternative package recommendation: code-to-text summaries retrieved
against a TF-IDF index of library descriptions.

The built-in summarizer is a text heuristic (docstrings, comments,
identifier words) so the default build has no model dependency; a remote
summarization service can be plugged in over HTTP.
"""
from __future__ import annotations

import json
import keyword
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import requests

from .complement import Recommendation
from .corpus import extract_imports
from .errors import EmptyIndexError, SummarizerUnavailableError

logger = logging.getLogger(__name__)

# Lucene's classic English stop list.
STOP_WORDS = (
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if",
    "in", "into", "is", "it", "no", "not", "of", "on", "or", "such", "that",
    "the", "their", "then", "there", "these", "they", "this", "to", "was",
    "will", "with",
)

_WORD_RE = re.compile(r"[a-z0-9]+")
_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")
_STRING_PREFIX_CHARS = "rRbBuUfF"

Summarizer = Callable[[str], "CodeSummary"]


@dataclass
class LibraryCatalog:
    """Package name -> description text; the retrieval corpus."""

    entries: dict[str, str]


@dataclass(frozen=True)
class TokenizerConfig:
    min_token_len: int = 2
    stop_words: tuple[str, ...] = STOP_WORDS


@dataclass
class TfIdfIndex:
    terms: dict[str, int]
    idf: list[float]
    doc_vectors: dict[str, dict[int, float]]   # package -> {term_id: weight}, unit L2
    tokenizer_config: TokenizerConfig


@dataclass
class CodeSummary:
    """Natural-language rendering of a piece of code, with provenance spans."""

    text: str
    source_spans: list[tuple[str, str]] = field(default_factory=list)


def tokenize(text: str, config: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Lowercased alphanumeric tokens, length-filtered and stop-listed."""
    stop = set(config.stop_words)
    return [t for t in _WORD_RE.findall(text.lower())
            if len(t) >= config.min_token_len and t not in stop]


def load_catalog(path: str | Path) -> LibraryCatalog:
    """Read a JSON-lines catalog: {"package": name, "description": text}."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            name = obj["package"]
            description = obj["description"].strip()
            if name in entries:
                raise ValueError(f"duplicate catalog package: {name}")
            if not description:
                logger.warning("catalog entry %s has an empty description; dropped", name)
                continue
            entries[name] = description
    return LibraryCatalog(entries=entries)


# ---------------------------------------------------------------------------
# Code-to-text heuristic summarizer
# ---------------------------------------------------------------------------

def _scan_source(text: str):
    """One pass over source text: locate strings and comments.

    Returns (code_blanked, string_spans, comment_texts) where code_blanked
    has string/comment characters replaced by spaces (newlines kept) and
    string_spans is a list of (start, end, content, statement_initial).
    """
    n = len(text)
    out = list(text)
    string_spans: list[tuple[int, int, str, bool]] = []
    comment_texts: list[str] = []
    i = 0
    only_ws_on_line = True

    def _blank(a: int, b: int) -> None:
        for p in range(a, b):
            if out[p] != "\n":
                out[p] = " "

    while i < n:
        ch = text[i]
        if ch == "\n":
            only_ws_on_line = True
            i += 1
            continue
        if ch == "#":
            j = text.find("\n", i)
            j = n if j < 0 else j
            comment_texts.append(text[i + 1:j])
            _blank(i, j)
            i = j
            continue
        start = i
        quote_at = i
        if ch in _STRING_PREFIX_CHARS:
            # r"...", rb'...' etc: the prefix belongs to the string literal.
            j = i
            while j < n and j - i < 2 and text[j] in _STRING_PREFIX_CHARS:
                j += 1
            if j < n and text[j] in "\"'":
                quote_at = j
            else:
                quote_at = -1
        elif ch not in "\"'":
            quote_at = -1
        if quote_at >= 0:
            stmt_initial = only_ws_on_line
            quote = text[quote_at]
            if text[quote_at:quote_at + 3] == quote * 3:
                body_start = quote_at + 3
                close = text.find(quote * 3, body_start)
                if close < 0:
                    content, end = text[body_start:], n
                else:
                    content, end = text[body_start:close], close + 3
            else:
                j = quote_at + 1
                while j < n and text[j] not in (quote, "\n"):
                    if text[j] == "\\":
                        j += 1
                    j += 1
                content = text[quote_at + 1:j]
                end = min(j + 1, n)
            string_spans.append((start, end, content, stmt_initial))
            _blank(start, end)
            only_ws_on_line = False
            i = end
            continue
        if not ch.isspace():
            only_ws_on_line = False
        i += 1
    return "".join(out), string_spans, comment_texts


def _docstring_spans(text: str):
    """Spans of string literals in docstring position.

    Heuristic: a statement-initial string whose nearest preceding
    significant code line either does not exist (module head) or opens a
    def/class block (first word def/class/async, ends with ':').
    """
    code_blanked, string_spans, _ = _scan_source(text)
    line_offsets = [0]
    for m in re.finditer("\n", text):
        line_offsets.append(m.end())
    code_lines = code_blanked.split("\n")

    def line_of(pos: int) -> int:
        lo, hi = 0, len(line_offsets) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if line_offsets[mid] <= pos:
                lo = mid
            else:
                hi = mid - 1
        return lo

    spans = []
    for start, end, content, stmt_initial in string_spans:
        if not stmt_initial:
            continue
        ln = line_of(start)
        prev = None
        for li in range(ln - 1, -1, -1):
            if code_lines[li].strip():
                prev = code_lines[li].rstrip()
                break
        if prev is None:
            spans.append((start, end, content))
        elif prev.endswith(":") and prev.lstrip().split(" ", 1)[0] in ("def", "class", "async"):
            spans.append((start, end, content))
    return spans


def _words(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def _identifier_words(code_blanked: str) -> list[str]:
    words: list[str] = []
    for ident in _IDENTIFIER_RE.findall(code_blanked):
        if keyword.iskeyword(ident):
            continue
        for part in _CAMEL_RE.findall(ident):
            words.append(part.lower())
    return words


def summarize_heuristic(source_text: str, unit_id: str = "") -> CodeSummary:
    """Summary from docstrings, then comments, then identifier words.

    Everything is lowercased and reduced to word tokens, so the result
    feeds straight into the TF-IDF tokenizer.
    """
    code_blanked, _, comment_texts = _scan_source(source_text)
    doc_spans = _docstring_spans(source_text)

    parts: list[str] = []
    spans: list[tuple[str, str]] = []
    for _, _, content in doc_spans:
        ws = _words(content)
        if ws:
            parts.append(" ".join(ws))
            spans.append((unit_id, "docstring"))
    for comment in comment_texts:
        ws = _words(comment)
        if ws:
            parts.append(" ".join(ws))
            spans.append((unit_id, "comment"))
    ident_ws = _identifier_words(code_blanked)
    if ident_ws:
        parts.append(" ".join(ident_ws))
        spans.append((unit_id, "identifiers"))
    return CodeSummary(text=" ".join(parts), source_spans=spans)


def split_docstrings(source_text: str) -> tuple[str, str]:
    """(docstring words, source with docstrings blanked).

    Used by the soft-label evaluation: docstrings become ground truth and
    must not leak into the prediction side.
    """
    doc_spans = _docstring_spans(source_text)
    words: list[str] = []
    chars = list(source_text)
    for start, end, content in doc_spans:
        words.extend(_words(content))
        for p in range(start, end):
            if chars[p] != "\n":
                chars[p] = " "
    return " ".join(words), "".join(chars)


def summarize_remote(source_text: str, endpoint: str, timeout: float = 10.0,
                     fallback: bool = False, unit_id: str = "") -> CodeSummary:
    """Ask an external service to describe the code.

    Wire contract: POST {endpoint}/summarize with {"code": text}, response
    {"summary": text}. On failure, either degrade to the heuristic summary
    (fallback=True) or raise SummarizerUnavailableError with the cause.
    """
    url = endpoint.rstrip("/") + "/summarize"
    try:
        resp = requests.post(url, json={"code": source_text}, timeout=timeout)
        resp.raise_for_status()
        summary = resp.json()["summary"]
        if not isinstance(summary, str):
            raise ValueError(f"summarizer returned non-text summary: {summary!r}")
    except (requests.RequestException, ValueError, KeyError) as exc:
        if fallback:
            logger.warning("remote summarizer failed (%s); using heuristic", exc)
            return summarize_heuristic(source_text, unit_id=unit_id)
        raise SummarizerUnavailableError(f"summarizer at {endpoint} failed: {exc}",
                                         cause=exc) from exc
    return CodeSummary(text=summary, source_spans=[(unit_id, "external_summary")])


# ---------------------------------------------------------------------------
# TF-IDF index
# ---------------------------------------------------------------------------

def build_index(catalog: LibraryCatalog,
                config: TokenizerConfig = TokenizerConfig()) -> TfIdfIndex:
    """Index the catalog with tf = 1 + ln(count), idf = ln((1+D)/(1+df)) + 1.

    Document vectors are L2-normalized so ranking reduces to dot products.
    Descriptions that tokenize to nothing are left out of the index.
    """
    if not catalog.entries:
        raise EmptyIndexError("catalog is empty")
    doc_tokens: dict[str, list[str]] = {}
    for package in sorted(catalog.entries):
        tokens = tokenize(catalog.entries[package], config)
        if tokens:
            doc_tokens[package] = tokens
        else:
            logger.warning("description of %s has no indexable tokens; skipped", package)
    if not doc_tokens:
        raise EmptyIndexError("no catalog description survived tokenization")

    df: dict[str, int] = {}
    for tokens in doc_tokens.values():
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    terms = {term: i for i, term in enumerate(sorted(df))}
    n_docs = len(doc_tokens)
    idf = [0.0] * len(terms)
    for term, tid in terms.items():
        idf[tid] = math.log((1 + n_docs) / (1 + df[term])) + 1.0

    doc_vectors: dict[str, dict[int, float]] = {}
    for package, tokens in doc_tokens.items():
        counts: dict[int, int] = {}
        for term in tokens:
            tid = terms[term]
            counts[tid] = counts.get(tid, 0) + 1
        vec = {tid: (1.0 + math.log(c)) * idf[tid] for tid, c in counts.items()}
        norm = math.sqrt(sum(w * w for w in vec.values()))
        doc_vectors[package] = {tid: w / norm for tid, w in vec.items()}
    return TfIdfIndex(terms=terms, idf=idf, doc_vectors=doc_vectors,
                      tokenizer_config=config)


def _vectorize_query(index: TfIdfIndex, text: str) -> dict[int, float]:
    counts: dict[int, int] = {}
    for token in tokenize(text, index.tokenizer_config):
        tid = index.terms.get(token)
        if tid is not None:
            counts[tid] = counts.get(tid, 0) + 1
    if not counts:
        return {}
    vec = {tid: (1.0 + math.log(c)) * index.idf[tid] for tid, c in counts.items()}
    norm = math.sqrt(sum(w * w for w in vec.values()))
    return {tid: w / norm for tid, w in vec.items()}


def query_index(index: TfIdfIndex, text: str, k: int) -> list[Recommendation]:
    """Rank catalog packages by cosine to the query; zero scores are dropped."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query = _vectorize_query(index, text)
    if not query:
        return []
    scored: list[tuple[float, str]] = []
    for package, doc in index.doc_vectors.items():
        score = 0.0
        for tid, qw in query.items():
            dw = doc.get(tid)
            if dw is not None:
                score += qw * dw
        if score > 0.0:
            scored.append((-score, package))
    scored.sort()
    return [Recommendation(package=package, score=-neg, kind="alternative", rank=r)
            for r, (neg, package) in enumerate(scored[:k], start=1)]


def recommend_alternative(source_text: str, index: TfIdfIndex,
                          summarizer: Summarizer | None = None,
                          k: int = 5) -> list[Recommendation]:
    """Summarize the code, retrieve against the catalog, flag own imports.

    Packages the code already imports stay in the list but are annotated
    already_imported; dropping them is the caller's policy decision.
    """
    summarizer = summarizer or summarize_heuristic
    summary = summarizer(source_text)
    recommendations = query_index(index, summary.text, k)
    imported = extract_imports(source_text)
    for rec in recommendations:
        rec.already_imported = rec.package in imported
    return recommendations
