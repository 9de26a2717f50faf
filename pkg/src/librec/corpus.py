"""Source ingestion: reduce scripts and notebooks to their imported packages.

The import extractor is deliberately statement-grammar based rather than a
full language parse: the live recommendation loop sends half-typed cells on
every keystroke, so inputs are routinely syntactically broken. Anything that
does not look like an import statement is skipped silently.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal

from .errors import EmptyCorpusError, NotebookFormatError

SourceKind = Literal["script", "notebook"]

# One dotted module path, optionally aliased: "pkg.sub as p"
_IMPORT_CHUNK_RE = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_]*)(\.[A-Za-z_][A-Za-z0-9_]*)*"
    r"(\s+as\s+[A-Za-z_][A-Za-z0-9_]*)?$"
)
_DOTTED_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")
_FROM_RE = re.compile(r"^from\s+(\S+)\s+import(?=[\s(]|$)")
_CANONICAL_NAME_RE = re.compile(r"^[a-z_][a-z0-9_]*$")


@dataclass
class SourceUnit:
    """One analyzable file: a script or a notebook, with raw contents."""

    id: str
    path: str
    kind: SourceKind
    text: str


@dataclass
class ImportRecord:
    """A source unit reduced to its set of imported top-level packages."""

    unit_id: str
    packages: set[str]


@dataclass
class Corpus:
    records: list[ImportRecord]
    source_root: str
    n_warnings: int = 0


def _strip_trailing_comment(line: str) -> str:
    # Inside an import statement '#' always starts a comment (no string
    # literals can legally appear), so a plain cut is safe.
    idx = line.find("#")
    return line if idx < 0 else line[:idx]


def _starts_import_statement(stripped: str) -> bool:
    for kw in ("import", "from"):
        if stripped.startswith(kw):
            rest = stripped[len(kw):]
            if rest == "" or rest[0].isspace() or rest[0] == "\\":
                return True
    return False


def _logical_import_lines(source_text: str) -> Iterator[str]:
    """Yield candidate import statements with continuations joined.

    Backslash continuations and unbalanced parentheses (the multi-line
    ``from x import (a, b)`` form) pull in following physical lines;
    per-line comments are stripped before joining.
    """
    lines = source_text.split("\n")
    i = 0
    n = len(lines)
    while i < n:
        stripped = lines[i].strip()
        if not _starts_import_statement(stripped):
            # A statement can also start after a ';' mid-line. No
            # continuation joining there; the segment grammar rejects any
            # trailing junk (e.g. quotes from string literals).
            if ";" in stripped:
                yield _strip_trailing_comment(stripped).rstrip()
            i += 1
            continue
        buf = _strip_trailing_comment(stripped).rstrip()
        i += 1
        # Join continuations, but never across the start of a new import
        # statement: 'import'/'from' are reserved words, so no legal
        # continuation line begins with one. This keeps extraction monotone
        # under concatenation of broken snippets.
        while i < n and not _starts_import_statement(lines[i].strip()):
            if buf.endswith("\\"):
                buf = buf[:-1].rstrip() + " " + _strip_trailing_comment(lines[i].strip()).rstrip()
                i += 1
            elif buf.count("(") > buf.count(")"):
                buf = buf + " " + _strip_trailing_comment(lines[i].strip()).rstrip()
                i += 1
            else:
                break
        yield buf


def _parse_import_segment(segment: str) -> set[str]:
    """Parse one ';'-delimited segment against the import grammar.

    Returns the top-level package names it contributes; segments (or
    individual comma chunks) that fail the grammar contribute nothing.
    """
    seg = segment.strip()
    found: set[str] = set()
    if seg.startswith("import") and (len(seg) == 6 or seg[6].isspace()):
        body = seg[6:].strip()
        for chunk in body.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            m = _IMPORT_CHUNK_RE.match(chunk)
            if m:
                name = m.group(1).lower()
                if _CANONICAL_NAME_RE.match(name):
                    found.add(name)
        return found
    m = _FROM_RE.match(seg)
    if m:
        module = m.group(1)
        if module.startswith("."):
            return found  # relative import: dropped by contract
        if _DOTTED_NAME_RE.match(module):
            name = module.split(".", 1)[0].lower()
            if _CANONICAL_NAME_RE.match(name):
                found.add(name)
    return found


def extract_imports(source_text: str) -> set[str]:
    """Extract top-level package names from ``import``/``from`` statements.

    Dotted paths are truncated to their first segment, aliases are ignored,
    relative imports are dropped, and imports nested inside any block are
    included. Unparseable text yields the empty set, never an error.
    """
    packages: set[str] = set()
    for logical in _logical_import_lines(source_text):
        for segment in logical.split(";"):
            packages |= _parse_import_segment(segment)
    return packages


def extract_notebook_sources(json_text: str) -> list[str]:
    """Return the source text of each code cell, in document order.

    List-valued cell sources are joined without separators, per the v4
    notebook schema. Malformed JSON or a missing cells array raises
    NotebookFormatError.
    """
    try:
        doc = json.loads(json_text)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise NotebookFormatError(f"notebook is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
        raise NotebookFormatError("notebook JSON has no cells array")
    sources: list[str] = []
    for cell in doc["cells"]:
        if not isinstance(cell, dict) or cell.get("cell_type") != "code":
            continue
        source = cell.get("source", "")
        if isinstance(source, list):
            source = "".join(part for part in source if isinstance(part, str))
        elif not isinstance(source, str):
            source = ""
        sources.append(source)
    return sources


def notebook_code_text(json_text: str) -> str:
    """All code cells of a notebook as one script-like text."""
    # Cells are joined on a newline so statements never merge across cells.
    return "\n".join(extract_notebook_sources(json_text))


def iter_source_units(root: str | Path, include_notebooks: bool = False) -> Iterator[SourceUnit]:
    """Yield source units under ``root`` in deterministic path order.

    Unreadable files are skipped silently; a missing root raises OSError.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus root is not a readable directory: {root}")
    patterns = ["*.py"] + (["*.ipynb"] if include_notebooks else [])
    paths: list[Path] = []
    for pattern in patterns:
        paths.extend(p for p in root.rglob(pattern) if p.is_file())
    for path in sorted(paths, key=lambda p: p.relative_to(root).as_posix()):
        rel = path.relative_to(root).as_posix()
        kind: SourceKind = "notebook" if path.suffix == ".ipynb" else "script"
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError:
            continue
        yield SourceUnit(id=rel, path=str(path), kind=kind, text=text)


def load_corpus(root: str | Path, include_notebooks: bool = False) -> Corpus:
    """Scan ``root`` recursively and build a corpus of import records.

    Only files contributing at least one package are kept; unreadable files
    and malformed notebooks are skipped and counted in the warnings tally.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus root is not a readable directory: {root}")
    records: list[ImportRecord] = []
    n_warnings = 0
    patterns = ["*.py"] + (["*.ipynb"] if include_notebooks else [])
    paths: list[Path] = []
    for pattern in patterns:
        paths.extend(p for p in root.rglob(pattern) if p.is_file())
    for path in sorted(paths, key=lambda p: p.relative_to(root).as_posix()):
        rel = path.relative_to(root).as_posix()
        try:
            text = path.read_text(encoding="utf-8", errors="replace")
        except OSError:
            n_warnings += 1
            continue
        if path.suffix == ".ipynb":
            try:
                text = notebook_code_text(text)
            except NotebookFormatError:
                n_warnings += 1
                continue
        packages = extract_imports(text)
        if packages:
            records.append(ImportRecord(unit_id=rel, packages=packages))
    if not records:
        raise EmptyCorpusError(f"no file under {root} yielded any import")
    return Corpus(records=records, source_root=str(root), n_warnings=n_warnings)


def write_records(corpus: Corpus, path: str | Path) -> None:
    """Write import records as JSON lines (sorted package lists)."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in corpus.records:
            fh.write(json.dumps(
                {"unit_id": record.unit_id, "packages": sorted(record.packages)},
                sort_keys=True,
            ))
            fh.write("\n")


def read_records(path: str | Path) -> Corpus:
    """Load a corpus previously written by ``write_records``."""
    records: list[ImportRecord] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append(ImportRecord(unit_id=obj["unit_id"], packages=set(obj["packages"])))
    if not records:
        raise EmptyCorpusError(f"no import records in {path}")
    return Corpus(records=records, source_root=str(path))
