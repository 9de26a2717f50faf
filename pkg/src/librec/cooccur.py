"""Vocabulary and co-occurrence statistics over import records.

Positive training pairs are unordered package pairs that appeared together
in at least one file; negatives are drawn from a smoothed frequency
distribution and rejected while their observed co-occurrence exceeds a
threshold (default: any co-occurrence at all).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .corpus import Corpus
from .errors import DegenerateSamplerError, EmptyVocabularyError


@dataclass
class Vocabulary:
    """Packages retained after frequency thresholding, with stable ids.

    Ordering is deterministic: descending file frequency, ties broken
    lexicographically; ids run 0..V-1 in that order.
    """

    packages: list[str]
    index: dict[str, int]
    freq: list[int]
    min_count: int

    def __len__(self) -> int:
        return len(self.packages)

    def __contains__(self, name: str) -> bool:
        return name in self.index


@dataclass
class PairStats:
    """Sparse symmetric co-occurrence counts; only i < j is stored."""

    counts: dict[tuple[int, int], int] = field(default_factory=dict)
    total_pairs: int = 0

    def get(self, i: int, j: int) -> int:
        if i == j:
            return 0
        if i > j:
            i, j = j, i
        return self.counts.get((i, j), 0)


def build_vocabulary(corpus: Corpus, min_count: int = 1,
                     stop_list: set[str] | None = None) -> Vocabulary:
    """Retain packages appearing in at least ``min_count`` distinct files."""
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    stop_list = stop_list or set()
    file_freq: Counter[str] = Counter()
    for record in corpus.records:
        file_freq.update(record.packages)
    kept = [(name, n) for name, n in file_freq.items()
            if n >= min_count and name not in stop_list]
    if not kept:
        raise EmptyVocabularyError(
            f"no package passed min_count={min_count} with a {len(stop_list)}-entry stop list")
    kept.sort(key=lambda item: (-item[1], item[0]))
    packages = [name for name, _ in kept]
    return Vocabulary(
        packages=packages,
        index={name: i for i, name in enumerate(packages)},
        freq=[n for _, n in kept],
        min_count=min_count,
    )


def build_pair_stats(corpus: Corpus, vocab: Vocabulary) -> PairStats:
    """Count, per file, every unordered pair of distinct in-vocabulary packages.

    Each file contributes at most 1 to a pair (import sets are deduplicated
    by construction), so counts are file frequencies of co-occurrence.
    """
    if len(vocab) == 0:
        raise EmptyVocabularyError("cannot build pair stats over an empty vocabulary")
    counts: dict[tuple[int, int], int] = {}
    total = 0
    for record in corpus.records:
        ids = sorted(vocab.index[p] for p in record.packages if p in vocab.index)
        for i, j in combinations(ids, 2):
            counts[(i, j)] = counts.get((i, j), 0) + 1
            total += 1
    return PairStats(counts=counts, total_pairs=total)


class NegativeSampler:
    """Seeded sampler of negative packages for a given target.

    Candidates are drawn with probability proportional to freq**exponent and
    rejected while they equal the target or co-occur with it more than
    ``reject_threshold`` times. After ``max_tries`` rejections the
    lowest-co-occurrence candidate seen is accepted and counted in
    ``fallback_count``.

    Holds mutable RNG state: use one instance per worker, never shared.
    """

    def __init__(self, vocab: Vocabulary, stats: PairStats, exponent: float,
                 seed: int, reject_threshold: int = 0, max_tries: int = 100):
        if not 0 < exponent <= 1:
            raise ValueError(f"exponent must be in (0, 1], got {exponent}")
        if len(vocab) < 2:
            raise DegenerateSamplerError(
                "negative sampling needs at least 2 packages in the vocabulary")
        self.vocab = vocab
        self.stats = stats
        self.exponent = exponent
        self.reject_threshold = reject_threshold
        self.max_tries = max_tries
        self.fallback_count = 0
        weights = np.asarray(vocab.freq, dtype=np.float64) ** exponent
        self._cumulative = np.cumsum(weights / weights.sum())
        self._rng = np.random.default_rng(seed)

    def sample(self) -> int:
        """One draw from the smoothed frequency marginal (no rejection)."""
        u = self._rng.random()
        return int(np.searchsorted(self._cumulative, u, side="right"))

    def sample_batch(self, n: int) -> np.ndarray:
        """``n`` independent marginal draws (no rejection)."""
        u = self._rng.random(n)
        return np.searchsorted(self._cumulative, u, side="right")

    def sample_negative(self, target: int) -> int:
        """Draw a negative for ``target`` honoring the rejection rule."""
        best: int | None = None
        best_count = -1
        for _ in range(self.max_tries):
            candidate = self.sample()
            if candidate == target:
                continue
            count = self.stats.get(target, candidate)
            if count <= self.reject_threshold:
                return candidate
            if best is None or count < best_count:
                best, best_count = candidate, count
        self.fallback_count += 1
        if best is not None:
            return best
        # Every try hit the target itself; fall back to the least
        # co-occurring other package, deterministically.
        others = [i for i in range(len(self.vocab)) if i != target]
        return min(others, key=lambda i: (self.stats.get(target, i), i))


def make_negative_sampler(vocab: Vocabulary, stats: PairStats,
                          exponent: float = 0.75, seed: int = 0,
                          reject_threshold: int = 0,
                          max_tries: int = 100) -> NegativeSampler:
    """Construct the seeded negative sampler used during training."""
    return NegativeSampler(vocab, stats, exponent, seed,
                           reject_threshold=reject_threshold, max_tries=max_tries)
