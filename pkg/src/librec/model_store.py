"""Model persistence. Embeddings are stored bit-exactly in a small binary
format; everything discrete goes to JSON/TSV for inspectability.

embeddings.bin layout (all little-endian):
  bytes 0-3   magic "LIBV"
  bytes 4-7   u32 format version
  bytes 8-11  u32 vocabulary size V
  bytes 12-15 u32 dimension d
  then V*d float32 target rows, then V*d float32 context rows, row-major.
"""
from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .altrec import LibraryCatalog, TfIdfIndex, TokenizerConfig
from .cooccur import Vocabulary
from .embed import EmbeddingModel, TrainConfig
from .errors import FormatError

MAGIC = b"LIBV"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIII")


@dataclass
class ModelBundle:
    vocab: Vocabulary
    model: EmbeddingModel
    index: TfIdfIndex | None = None
    catalog: LibraryCatalog | None = None
    format_version: int = FORMAT_VERSION


def _write_embeddings(path: Path, model: EmbeddingModel) -> None:
    V, d = model.target_vectors.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, V, d))
        fh.write(np.ascontiguousarray(model.target_vectors, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(model.context_vectors, dtype="<f4").tobytes())


def _read_embeddings(path: Path, expect_v: int, expect_d: int) -> tuple[np.ndarray, np.ndarray]:
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: too short for a header")
    magic, version, V, d = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version > FORMAT_VERSION:
        raise FormatError(f"{path}: format version {version} is newer than supported "
                          f"({FORMAT_VERSION})")
    if (V, d) != (expect_v, expect_d):
        raise FormatError(f"{path}: shape ({V}, {d}) does not match manifest "
                          f"({expect_v}, {expect_d})")
    expected_len = _HEADER.size + 2 * V * d * 4
    if len(data) != expected_len:
        raise FormatError(f"{path}: {len(data)} bytes, expected {expected_len}")
    floats = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    U = floats[: V * d].reshape(V, d).copy()
    C = floats[V * d:].reshape(V, d).copy()
    return U, C


def save_bundle(bundle: ModelBundle, directory: str | Path) -> None:
    """Write manifest, vocab, embeddings, and (if present) catalog/index."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    model = bundle.model
    vocab = bundle.vocab
    manifest = {
        "format_version": bundle.format_version,
        "vocab_size": len(vocab),
        "dim": model.dim,
        "min_count": vocab.min_count,
        "config": asdict(model.config),
        "epoch_losses": model.epoch_losses,
        "has_index": bundle.index is not None,
        "has_catalog": bundle.catalog is not None,
    }
    (directory / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    with open(directory / "vocab.tsv", "w", encoding="utf-8") as fh:
        for i, name in enumerate(vocab.packages):
            fh.write(f"{i}\t{name}\t{vocab.freq[i]}\n")
    _write_embeddings(directory / "embeddings.bin", model)
    if bundle.catalog is not None:
        with open(directory / "catalog.jsonl", "w", encoding="utf-8") as fh:
            for package in sorted(bundle.catalog.entries):
                fh.write(json.dumps(
                    {"package": package, "description": bundle.catalog.entries[package]},
                    sort_keys=True))
                fh.write("\n")
    if bundle.index is not None:
        index = bundle.index
        doc = {
            "terms": index.terms,
            "idf": index.idf,
            "doc_vectors": {
                pkg: sorted([tid, w] for tid, w in vec.items())
                for pkg, vec in index.doc_vectors.items()
            },
            "tokenizer_config": {
                "min_token_len": index.tokenizer_config.min_token_len,
                "stop_words": list(index.tokenizer_config.stop_words),
            },
        }
        (directory / "tfidf.json").write_text(
            json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")


def load_bundle(directory: str | Path) -> ModelBundle:
    """Load a bundle, validating version and shapes before trusting data."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no manifest.json in {directory}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    version = manifest.get("format_version")
    if not isinstance(version, int) or version < 1:
        raise FormatError(f"{manifest_path}: missing or invalid format_version")
    if version > FORMAT_VERSION:
        raise FormatError(f"{manifest_path}: format version {version} is newer than "
                          f"supported ({FORMAT_VERSION})")

    packages: list[str] = []
    freqs: list[int] = []
    with open(directory / "vocab.tsv", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"vocab.tsv: malformed line {line!r}")
            packages.append(parts[1])
            freqs.append(int(parts[2]))
    if len(packages) != manifest["vocab_size"]:
        raise FormatError(f"vocab.tsv has {len(packages)} entries, manifest says "
                          f"{manifest['vocab_size']}")
    vocab = Vocabulary(packages=packages,
                       index={name: i for i, name in enumerate(packages)},
                       freq=freqs, min_count=manifest.get("min_count", 1))

    U, C = _read_embeddings(directory / "embeddings.bin",
                            manifest["vocab_size"], manifest["dim"])
    config = TrainConfig(**manifest["config"])
    model = EmbeddingModel(vocab=vocab, target_vectors=U, context_vectors=C,
                           config=config,
                           epoch_losses=list(manifest.get("epoch_losses", [])))

    catalog = None
    if manifest.get("has_catalog") and (directory / "catalog.jsonl").is_file():
        entries: dict[str, str] = {}
        with open(directory / "catalog.jsonl", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    obj = json.loads(line)
                    entries[obj["package"]] = obj["description"]
        catalog = LibraryCatalog(entries=entries)

    index = None
    if manifest.get("has_index") and (directory / "tfidf.json").is_file():
        doc = json.loads((directory / "tfidf.json").read_text(encoding="utf-8"))
        config_doc = doc["tokenizer_config"]
        index = TfIdfIndex(
            terms={t: int(i) for t, i in doc["terms"].items()},
            idf=[float(x) for x in doc["idf"]],
            doc_vectors={
                pkg: {int(tid): float(w) for tid, w in pairs}
                for pkg, pairs in doc["doc_vectors"].items()
            },
            tokenizer_config=TokenizerConfig(
                min_token_len=config_doc["min_token_len"],
                stop_words=tuple(config_doc["stop_words"]),
            ),
        )
    return ModelBundle(vocab=vocab, model=model, index=index, catalog=catalog,
                       format_version=version)
