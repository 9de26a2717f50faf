"""Loss, gradients, cosine, out-of-sample projection, and the trainer."""
import math

import numpy as np
import pytest

from librec.cooccur import build_pair_stats, build_vocabulary
from librec.corpus import Corpus, ImportRecord
from librec.embed import (
    EmbeddingModel,
    ProjectionRequest,
    TrainConfig,
    cosine,
    insert_package,
    project_out_of_sample,
    sgns_gradients,
    sgns_loss,
    train,
)
from librec.errors import DimensionError, NoKnownNeighborsError, ZeroVectorError


def _scalar_loss_oracle(u, v, negs):
    # Independent scalar re-implementation: plain log/sigmoid, no softplus.
    def sigmoid(x):
        return 1.0 / (1.0 + math.exp(-x))

    dot = sum(a * b for a, b in zip(u, v))
    loss = -math.log(sigmoid(dot))
    for n in negs:
        dot_n = sum(a * b for a, b in zip(u, n))
        loss += -math.log(sigmoid(-dot_n))
    return loss


def test_sgns_loss_zero_vectors():
    z = np.zeros(4)
    assert sgns_loss(z, z, [z]) == pytest.approx(-math.log(0.5) * 2, abs=1e-12)


def test_sgns_loss_saturated_limit():
    # dot(u, v) = +40 and dot(u, n) = -40: loss should vanish
    u = np.array([40.0, 0.0])
    v = np.array([1.0, 0.0])
    n = np.array([-1.0, 0.0])
    assert sgns_loss(u, v, [n]) < 1e-6


def test_sgns_loss_no_overflow_at_extreme_dots():
    u = np.array([500.0, 0.0])
    v = np.array([1.0, 0.0])
    assert math.isfinite(sgns_loss(u, v, [v]))
    assert math.isfinite(sgns_loss(u, -v, [-v]))


def test_sgns_loss_matches_scalar_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        u = rng.normal(size=8)
        v = rng.normal(size=8)
        negs = [rng.normal(size=8) for _ in range(3)]
        assert sgns_loss(u, v, negs) == pytest.approx(
            _scalar_loss_oracle(u, v, negs), abs=1e-12)


def test_sgns_loss_dimension_mismatch():
    with pytest.raises(DimensionError):
        sgns_loss(np.zeros(3), np.zeros(4), [])
    with pytest.raises(DimensionError):
        sgns_loss(np.zeros(3), np.zeros(3), [np.zeros(2)])


def test_sgns_gradients_match_central_differences():
    rng = np.random.default_rng(1234)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        u = rng.normal(size=8)
        v = rng.normal(size=8)
        negs = [rng.normal(size=8) for _ in range(4)]
        gu, gv, gnegs = sgns_gradients(u, v, negs)

        def numeric(vec, apply):
            grad = np.zeros_like(vec)
            for i in range(vec.size):
                bump = np.zeros_like(vec)
                bump[i] = h
                grad[i] = (apply(vec + bump) - apply(vec - bump)) / (2 * h)
            return grad

        nu = numeric(u, lambda x: sgns_loss(x, v, negs))
        nv = numeric(v, lambda x: sgns_loss(u, x, negs))
        for analytic, numeric_grad in [(gu, nu), (gv, nv)] + [
            (gnegs[i], numeric(negs[i],
                               lambda x, i=i: sgns_loss(u, v, negs[:i] + [x] + negs[i + 1:])))
            for i in range(len(negs))
        ]:
            err = np.linalg.norm(analytic - numeric_grad) / max(
                np.linalg.norm(analytic), np.linalg.norm(numeric_grad), 1e-8)
            worst = max(worst, err)
    assert worst < 1e-4, f"max relative gradient error {worst}"


def test_cosine_values():
    assert cosine(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 1.0
    assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0
    expected = 32.0 / math.sqrt(14.0 * 77.0)  # hand computation
    assert cosine(np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0, 6.0])) == \
        pytest.approx(expected, abs=1e-15)


def test_cosine_zero_vector():
    with pytest.raises(ZeroVectorError):
        cosine(np.zeros(3), np.ones(3))


def test_cosine_scale_invariance():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.normal(size=6)
        b = rng.normal(size=6)
        alpha, beta = rng.uniform(0.01, 100, size=2)
        assert cosine(alpha * a, beta * b) == pytest.approx(cosine(a, b), abs=1e-12)


def test_cosine_clamped():
    a = np.array([1.0, 1e-8])
    assert -1.0 <= cosine(a, a) <= 1.0


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def _tiny_corpus(n_files=30):
    return Corpus(records=[ImportRecord(f"f{i}.py", {"a", "b"}) for i in range(n_files)],
                  source_root="test")


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(dim=1)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainConfig(lr_schedule="exponential")


def test_train_two_package_convergence():
    # a and b always co-occur; with no negatives the objective can only pull
    # target and context rows together.
    corpus = _tiny_corpus()
    vocab = build_vocabulary(corpus, min_count=1)
    stats = build_pair_stats(corpus, vocab)
    config = TrainConfig(dim=8, epochs=300, learning_rate=0.1,
                         negatives_per_positive=0, seed=5)
    model = train(stats, vocab, config)
    ia, ib = vocab.index["a"], vocab.index["b"]
    assert cosine(model.target_vectors[ia], model.context_vectors[ib]) > 0.9


def test_train_deterministic_bitwise():
    corpus = Corpus(records=[ImportRecord(f"f{i}.py", {f"p{i % 5}", f"p{(i + 1) % 5}"})
                             for i in range(40)], source_root="test")
    vocab = build_vocabulary(corpus, min_count=1)
    stats = build_pair_stats(corpus, vocab)
    config = TrainConfig(dim=16, epochs=3, seed=11)
    m1 = train(stats, vocab, config)
    m2 = train(stats, vocab, config)
    assert np.array_equal(m1.target_vectors, m2.target_vectors)
    assert np.array_equal(m1.context_vectors, m2.context_vectors)
    assert m1.epoch_losses == m2.epoch_losses


def test_train_records_epoch_losses_and_stays_finite():
    corpus = _tiny_corpus()
    vocab = build_vocabulary(corpus, min_count=1)
    stats = build_pair_stats(corpus, vocab)
    model = train(stats, vocab, TrainConfig(dim=8, epochs=4,
                                            negatives_per_positive=0, seed=1))
    assert len(model.epoch_losses) == 4
    assert np.isfinite(model.target_vectors).all()
    assert np.isfinite(model.context_vectors).all()


def test_train_empty_stats_rejected():
    corpus = Corpus(records=[ImportRecord("a.py", {"solo"})], source_root="t")
    vocab = build_vocabulary(corpus, min_count=1)
    stats = build_pair_stats(corpus, vocab)
    with pytest.raises(ValueError):
        train(stats, vocab, TrainConfig(dim=4, epochs=1, negatives_per_positive=0))


# ---------------------------------------------------------------------------
# Out-of-sample projection
# ---------------------------------------------------------------------------

def _toy_model():
    corpus = Corpus(records=[ImportRecord("f.py", {"p", "q"})], source_root="t")
    vocab = build_vocabulary(corpus, min_count=1)
    U = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=np.float32)
    return EmbeddingModel(vocab=vocab, target_vectors=U, context_vectors=U.copy(),
                          config=TrainConfig(dim=2))


def test_projection_single_neighbor_identity():
    model = _toy_model()
    vec = project_out_of_sample(ProjectionRequest([("p", 5)]), model)
    assert np.array_equal(vec, model.vector("p").astype(np.float64))


def test_projection_equal_weights_midpoint():
    model = _toy_model()
    vec = project_out_of_sample(ProjectionRequest([("p", 1), ("q", 1)]), model)
    assert np.allclose(vec, [0.5, 0.5], atol=0)


def test_projection_weighted_hand_case():
    model = _toy_model()
    vec = project_out_of_sample(ProjectionRequest([("p", 3), ("q", 1)]), model)
    assert abs(vec[0] - 0.75) < 1e-12
    assert abs(vec[1] - 0.25) < 1e-12


def test_projection_drops_unknown_neighbors():
    model = _toy_model()
    vec = project_out_of_sample(ProjectionRequest([("p", 2), ("ghost", 9)]), model)
    assert np.array_equal(vec, model.vector("p").astype(np.float64))


def test_projection_all_unknown():
    model = _toy_model()
    with pytest.raises(NoKnownNeighborsError):
        project_out_of_sample(ProjectionRequest([("ghost", 1)]), model)


def test_projection_request_validation():
    with pytest.raises(ValueError):
        ProjectionRequest([])
    with pytest.raises(ValueError):
        ProjectionRequest([("p", 0)])


def test_projection_convex_combination():
    rng = np.random.default_rng(21)
    corpus = Corpus(records=[ImportRecord("f.py", {f"p{i}" for i in range(8)})],
                    source_root="t")
    vocab = build_vocabulary(corpus, min_count=1)
    U = rng.normal(size=(8, 5)).astype(np.float32)
    model = EmbeddingModel(vocab=vocab, target_vectors=U, context_vectors=U.copy(),
                           config=TrainConfig(dim=5))
    for _ in range(100):
        size = int(rng.integers(1, 9))
        names = list(rng.choice(vocab.packages, size=size, replace=False))
        weights = [int(w) for w in rng.integers(1, 50, size=size)]
        vec = project_out_of_sample(ProjectionRequest(list(zip(names, weights))), model)
        rows = np.array([model.vector(n) for n in names], dtype=np.float64)
        assert np.all(vec >= rows.min(axis=0))
        assert np.all(vec <= rows.max(axis=0))


def test_insert_package_extends_model():
    model = _toy_model()
    vec = project_out_of_sample(ProjectionRequest([("p", 1), ("q", 1)]), model)
    insert_package(model, "newpkg", vec)
    assert "newpkg" in model.vocab.index
    assert model.target_vectors.shape[0] == 3
    assert np.allclose(model.vector("newpkg"), vec.astype(np.float32))
    with pytest.raises(ValueError):
        insert_package(model, "newpkg", vec)
