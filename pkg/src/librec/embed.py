"""Skip-gram-with-negative-sampling embeddings over co-occurrence pairs.

Training walks positive pairs (weighted by log(1 + count), rounded up) in a
seeded shuffled order, updating both directions of every pair since file
co-occurrence is symmetric. Target vectors (U) carry recommendation
similarity; context vectors (C) exist for the objective and persistence.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cooccur import NegativeSampler, PairStats, Vocabulary, make_negative_sampler
from .errors import (
    DimensionError,
    NoKnownNeighborsError,
    TrainingDivergedError,
    ZeroVectorError,
)

logger = logging.getLogger(__name__)

LR_SCHEDULES = ("constant", "linear_decay")
# Linear decay never reaches zero so the last visits still move weights.
_LR_FLOOR_FRACTION = 1e-4


@dataclass
class TrainConfig:
    dim: int = 64
    epochs: int = 10
    learning_rate: float = 0.025
    lr_schedule: str = "linear_decay"
    negatives_per_positive: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.lr_schedule not in LR_SCHEDULES:
            raise ValueError(f"lr_schedule must be one of {LR_SCHEDULES}")
        # 0 negatives is a degenerate mode for positive-only fixtures
        # (e.g. a two-package corpus where every candidate co-occurs).
        if self.negatives_per_positive < 0:
            raise ValueError("negatives_per_positive must be >= 0")


@dataclass
class EmbeddingModel:
    """Trained package embeddings: one target and one context row per package."""

    vocab: Vocabulary
    target_vectors: np.ndarray   # (V, d) float32
    context_vectors: np.ndarray  # (V, d) float32
    config: TrainConfig
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return int(self.target_vectors.shape[1])

    def vector(self, package: str) -> np.ndarray:
        return self.target_vectors[self.vocab.index[package]]


@dataclass
class ProjectionRequest:
    """Neighbors of an out-of-vocabulary package with co-occurrence weights."""

    neighbors: list[tuple[str, int]]

    def __post_init__(self):
        if not self.neighbors:
            raise ValueError("projection request needs at least one neighbor")
        for name, weight in self.neighbors:
            if weight < 1:
                raise ValueError(f"neighbor weight must be >= 1, got {weight} for {name}")


def _softplus(x: np.ndarray | float) -> np.ndarray | float:
    # log(1 + e^x) without overflow on either tail.
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def _sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    # Branch on sign so exp never overflows.
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def _scalar_sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    ex = math.exp(x)
    return ex / (1.0 + ex)


def _check_dims(u: np.ndarray, v: np.ndarray, negs) -> None:
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionError(f"target/context shape mismatch: {u.shape} vs {v.shape}")
    for n in negs:
        if n.shape != u.shape:
            raise DimensionError(f"negative shape mismatch: {n.shape} vs {u.shape}")


def sgns_loss(u: np.ndarray, v: np.ndarray, negs: list[np.ndarray]) -> float:
    """-log sigmoid(u.v) - sum_n log sigmoid(-u.v_n), stably evaluated.

    Uses the softplus form, so dots up to +-500 cannot overflow.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    negs = [np.asarray(n, dtype=np.float64) for n in negs]
    _check_dims(u, v, negs)
    loss = float(_softplus(-np.dot(u, v)))
    for n in negs:
        loss += float(_softplus(np.dot(u, n)))
    return loss


def sgns_gradients(u: np.ndarray, v: np.ndarray,
                   negs: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Analytic gradients of sgns_loss with respect to u, v, and each negative."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    negs = [np.asarray(n, dtype=np.float64) for n in negs]
    _check_dims(u, v, negs)
    g_pos = _sigmoid(np.dot(u, v)) - 1.0
    grad_u = g_pos * v
    grad_v = g_pos * u
    grad_negs = []
    for n in negs:
        g_neg = _sigmoid(np.dot(u, n))
        grad_u = grad_u + g_neg * n
        grad_negs.append(g_neg * u)
    return grad_u, grad_v, grad_negs


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def train(stats: PairStats, vocab: Vocabulary, config: TrainConfig,
          sampler: NegativeSampler | None = None) -> EmbeddingModel:
    """Train embeddings by SGD over the positive pairs of ``stats``.

    Deterministic for a fixed (stats, vocab, config): initialization, visit
    shuffling, and negative draws all derive from config.seed. Per-epoch
    mean loss is recorded on the returned model.
    """
    if stats.total_pairs == 0 or not stats.counts:
        raise ValueError("pair statistics are empty; nothing to train on")
    d = config.dim
    V = len(vocab)
    k = config.negatives_per_positive
    rng = np.random.default_rng(config.seed)
    scale = 0.5 / d
    U = rng.uniform(-scale, scale, size=(V, d)).astype(np.float32)
    C = rng.uniform(-scale, scale, size=(V, d)).astype(np.float32)

    if sampler is None and k > 0:
        sampler = make_negative_sampler(vocab, stats, exponent=0.75,
                                        seed=config.seed + 1)

    pairs = sorted(stats.counts.items())
    pair_ids = np.array([[i, j] for (i, j), _ in pairs], dtype=np.int64)
    multiplicity = np.array([math.ceil(math.log1p(c)) for _, c in pairs], dtype=np.int64)
    visits = np.repeat(np.arange(len(pairs)), multiplicity)
    total_steps = config.epochs * len(visits)
    lr0 = config.learning_rate

    epoch_losses: list[float] = []
    step = 0
    for epoch in range(config.epochs):
        order = visits.copy()
        rng.shuffle(order)
        loss_sum = 0.0
        n_steps = 0
        for visit in order:
            i, j = int(pair_ids[visit, 0]), int(pair_ids[visit, 1])
            if config.lr_schedule == "linear_decay":
                lr = lr0 * max(1.0 - step / total_steps, _LR_FLOOR_FRACTION)
            else:
                lr = lr0
            for t, c in ((i, j), (j, i)):
                u = U[t]
                v = C[c]
                dot = float(u @ v)
                loss = float(_softplus(-dot))
                g_pos = np.float32(_scalar_sigmoid(dot) - 1.0)
                grad_u = g_pos * v
                if k > 0:
                    neg_ids = np.array([sampler.sample_negative(t) for _ in range(k)],
                                       dtype=np.int64)
                    neg_vecs = C[neg_ids]
                    neg_dots = neg_vecs @ u
                    loss += float(np.sum(_softplus(neg_dots.astype(np.float64))))
                    g_negs = np.asarray(_sigmoid(neg_dots), dtype=np.float32)
                    grad_u = grad_u + neg_vecs.T @ g_negs
                    np.add.at(C, neg_ids, (-lr) * np.outer(g_negs, u))
                C[c] = v - lr * (g_pos * u)
                U[t] = u - lr * grad_u
                if not math.isfinite(loss):
                    raise TrainingDivergedError(
                        f"non-finite loss at epoch {epoch}, pair "
                        f"({vocab.packages[i]}, {vocab.packages[j]})",
                        epoch=epoch, pair=(vocab.packages[i], vocab.packages[j]))
                loss_sum += float(loss)
                n_steps += 1
            step += 1
        epoch_losses.append(loss_sum / max(n_steps, 1))
        logger.debug("epoch %d mean loss %.6f", epoch, epoch_losses[-1])

    if not (np.isfinite(U).all() and np.isfinite(C).all()):
        raise TrainingDivergedError("non-finite entries after training",
                                    epoch=config.epochs - 1, pair=("", ""))
    return EmbeddingModel(vocab=vocab, target_vectors=U, context_vectors=C,
                          config=config, epoch_losses=epoch_losses)


def project_out_of_sample(req: ProjectionRequest, model: EmbeddingModel) -> np.ndarray:
    """Place an unseen package at the co-occurrence-weighted average of its neighbors.

    Unknown neighbor names are dropped (logged with a count); if none remain
    the request fails with NoKnownNeighborsError. The result is a convex
    combination of the known neighbors' target vectors, computed in float64.
    """
    known = [(name, w) for name, w in req.neighbors if name in model.vocab.index]
    n_dropped = len(req.neighbors) - len(known)
    if n_dropped:
        logger.warning("projection dropped %d unknown neighbor(s)", n_dropped)
    if not known:
        raise NoKnownNeighborsError(
            f"none of the {len(req.neighbors)} neighbors are in the vocabulary")
    acc = np.zeros(model.dim, dtype=np.float64)
    total_weight = 0
    for name, w in known:
        acc += w * model.vector(name).astype(np.float64)
        total_weight += w
    return acc / total_weight


def insert_package(model: EmbeddingModel, name: str, vector: np.ndarray,
                   freq: int | None = None) -> None:
    """Add a projected package to the model's vocabulary in place.

    The context row is set to the same vector (no training signal exists for
    it). ``freq`` defaults to the vocabulary's min_count so ordering
    invariants keep holding.
    """
    if name in model.vocab.index:
        raise ValueError(f"package already in vocabulary: {name}")
    vec = np.asarray(vector, dtype=np.float32).reshape(1, -1)
    if vec.shape[1] != model.dim:
        raise DimensionError(f"vector has dim {vec.shape[1]}, model has {model.dim}")
    model.vocab.index[name] = len(model.vocab.packages)
    model.vocab.packages.append(name)
    model.vocab.freq.append(model.vocab.min_count if freq is None else freq)
    model.target_vectors = np.concatenate([model.target_vectors, vec], axis=0)
    model.context_vectors = np.concatenate([model.context_vectors, vec], axis=0)
