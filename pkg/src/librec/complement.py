"""Complementary package recommendation by cosine ranking over embeddings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import EmbeddingModel
from .errors import NoKnownImportsError, ZeroVectorError


@dataclass
class Recommendation:
    """One ranked suggestion; ``kind`` tells which route produced it."""

    package: str
    score: float
    kind: str   # "complementary" | "alternative"
    rank: int
    already_imported: bool = False


def recommend_complementary(imports: set[str], model: EmbeddingModel,
                            k: int, min_freq: int = 0) -> list[Recommendation]:
    """Rank every non-imported vocabulary package by mean cosine to the imports.

    Mean aggregation over the known imports rewards candidates compatible
    with the whole context. Ties break toward higher corpus frequency, then
    lexicographic name. Returns fewer than k items when the candidate pool
    is smaller.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    vocab = model.vocab
    known_ids = sorted(vocab.index[p] for p in imports if p in vocab.index)
    if not known_ids:
        raise NoKnownImportsError(
            f"none of the {len(imports)} imports are in the {len(vocab)}-package vocabulary")

    U = model.target_vectors.astype(np.float64)
    norms = np.linalg.norm(U, axis=1)
    if np.any(norms == 0.0):
        zero = vocab.packages[int(np.argmin(norms))]
        raise ZeroVectorError(f"package {zero} has a zero embedding")
    unit = U / norms[:, None]
    # score(c) = mean over known imports s of cos(U_c, U_s)
    scores = unit @ unit[known_ids].mean(axis=0)

    candidates = []
    for idx, name in enumerate(vocab.packages):
        if name in imports:
            continue
        if vocab.freq[idx] < min_freq:
            continue
        candidates.append((-float(np.clip(scores[idx], -1.0, 1.0)),
                           -vocab.freq[idx], name))
    candidates.sort()
    return [
        Recommendation(package=name, score=-neg_score, kind="complementary", rank=r)
        for r, (neg_score, _neg_freq, name) in enumerate(candidates[:k], start=1)
    ]
