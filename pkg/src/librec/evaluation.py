"""Evaluation protocols: leave-one-out for complementary recommendations,
hard/soft labels for alternative recommendations.

Per-file randomness is seeded from (seed, file index), so results are
deterministic and order-independent even if files are scored in parallel.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .altrec import Summarizer, TfIdfIndex, query_index, recommend_alternative, split_docstrings
from .complement import recommend_complementary
from .corpus import Corpus, SourceUnit, notebook_code_text
from .embed import EmbeddingModel
from .errors import (
    LabelResolutionError,
    NoEvaluableFilesError,
    NoKnownImportsError,
    NotebookFormatError,
)


@dataclass
class EvalConfig:
    ks: list[int] = field(default_factory=lambda: [5, 10])
    seed: int = 0
    min_imports: int = 2

    def __post_init__(self):
        if not self.ks or sorted(self.ks) != self.ks:
            raise ValueError(f"ks must be non-empty and sorted ascending, got {self.ks}")
        if self.min_imports < 2:
            raise ValueError(f"min_imports must be >= 2, got {self.min_imports}")


@dataclass
class EvalReport:
    protocol: str
    metrics: dict[str, float]
    n_evaluated: int
    n_skipped: int
    seed: int | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "metrics": self.metrics,
            "n_evaluated": self.n_evaluated,
            "n_skipped": self.n_skipped,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = [f"protocol: {self.protocol}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        lines.append(f"evaluated: {self.n_evaluated}   skipped: {self.n_skipped}")
        for name in sorted(self.metrics):
            lines.append(f"  {name:<10} {self.metrics[name]:.4f}")
        if self.notes:
            lines.append(f"note: {self.notes}")
        return "\n".join(lines)


@dataclass
class HardLabelSet:
    """Manually annotated (file path, expected packages) pairs."""

    entries: list[tuple[str, set[str]]]


def load_hard_labels(path: str | Path) -> HardLabelSet:
    """Read JSON lines of {"path": text, "expected": [names]}."""
    entries: list[tuple[str, set[str]]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            expected = set(obj["expected"])
            if not expected:
                raise ValueError(f"empty expected set for {obj['path']}")
            entries.append((obj["path"], expected))
    return HardLabelSet(entries=entries)


def eval_complementary_leave_one_out(corpus: Corpus, model: EmbeddingModel,
                                     cfg: EvalConfig) -> EvalReport:
    """Remove one random in-vocabulary import per file; score top-k recovery.

    Files with fewer than min_imports in-vocabulary imports are skipped.
    Keeping the training and evaluation corpora disjoint (or declaring the
    overlap) is the caller's responsibility; say so in the report notes.
    """
    k_max = max(cfg.ks)
    hits = {k: 0 for k in cfg.ks}
    n_evaluated = 0
    n_skipped = 0
    for idx, record in enumerate(corpus.records):
        in_vocab = sorted(p for p in record.packages if p in model.vocab.index)
        if len(in_vocab) < cfg.min_imports:
            n_skipped += 1
            continue
        rng = np.random.default_rng([cfg.seed, idx])
        removed = in_vocab[int(rng.integers(len(in_vocab)))]
        remainder = set(record.packages) - {removed}
        try:
            recs = recommend_complementary(remainder, model, k=k_max)
        except NoKnownImportsError:
            n_skipped += 1
            continue
        ranked = [r.package for r in recs]
        for k in cfg.ks:
            if removed in ranked[:k]:
                hits[k] += 1
        n_evaluated += 1
    if n_evaluated == 0:
        raise NoEvaluableFilesError(
            f"no file had >= {cfg.min_imports} in-vocabulary imports")
    metrics = {f"top{k}": hits[k] / n_evaluated for k in cfg.ks}
    return EvalReport(protocol="leave_one_out", metrics=metrics,
                      n_evaluated=n_evaluated, n_skipped=n_skipped, seed=cfg.seed,
                      notes="train/eval split declared by caller")


def _unit_code(unit: SourceUnit) -> str | None:
    if unit.kind == "notebook":
        try:
            return notebook_code_text(unit.text)
        except NotebookFormatError:
            return None
    return unit.text


def eval_alternative_soft(units: list[SourceUnit], index: TfIdfIndex,
                          summarizer: Summarizer | None = None,
                          k: int = 5, k_truth: int = 5) -> EvalReport:
    """Docstrings become ground truth; predictions run on docstring-free code.

    Hit metric: the top-k prediction list intersects the top-k_truth list
    retrieved from the docstrings alone. Units without docstrings (or whose
    docstrings retrieve nothing) are skipped.
    """
    if k_truth < 1:
        raise ValueError(f"k_truth must be >= 1, got {k_truth}")
    hits = 0
    n_evaluated = 0
    n_skipped = 0
    for unit in units:
        code = _unit_code(unit)
        if code is None:
            n_skipped += 1
            continue
        doc_text, stripped = split_docstrings(code)
        if not doc_text.strip():
            n_skipped += 1
            continue
        truth = {r.package for r in query_index(index, doc_text, k_truth)}
        if not truth:
            n_skipped += 1
            continue
        predicted = {r.package for r in recommend_alternative(stripped, index, summarizer, k)}
        if truth & predicted:
            hits += 1
        n_evaluated += 1
    if n_evaluated == 0:
        raise NoEvaluableFilesError("no unit had usable docstrings")
    metrics = {f"top{k}": hits / n_evaluated}
    return EvalReport(protocol="soft_label", metrics=metrics,
                      n_evaluated=n_evaluated, n_skipped=n_skipped, seed=None,
                      notes=f"hit = non-empty top-{k} intersection with docstring "
                            f"top-{k_truth} retrieval")


def eval_alternative_hard(labels: HardLabelSet, index: TfIdfIndex,
                          summarizer: Summarizer | None = None,
                          k: int = 5, root: str | Path | None = None) -> EvalReport:
    """Score predictions against manually annotated expected packages."""
    base = Path(root) if root is not None else Path(".")
    offenders = []
    resolved: list[tuple[Path, set[str]]] = []
    for rel, expected in labels.entries:
        path = Path(rel) if Path(rel).is_absolute() else base / rel
        if not path.is_file():
            offenders.append(str(rel))
        else:
            resolved.append((path, expected))
    if offenders:
        raise LabelResolutionError(
            f"{len(offenders)} hard-label path(s) cannot be resolved", offenders)
    if not resolved:
        raise NoEvaluableFilesError("hard-label set is empty")
    hits = 0
    for path, expected in resolved:
        text = path.read_text(encoding="utf-8", errors="replace")
        if path.suffix == ".ipynb":
            text = notebook_code_text(text)
        predicted = {r.package for r in recommend_alternative(text, index, summarizer, k)}
        if predicted & expected:
            hits += 1
    metrics = {f"top{k}": hits / len(resolved)}
    return EvalReport(protocol="hard_label", metrics=metrics,
                      n_evaluated=len(resolved), n_skipped=0, seed=None)
