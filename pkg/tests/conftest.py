"""Shared fixtures: a small trained bundle over the synthetic cluster corpus."""
import pytest

from librec.altrec import LibraryCatalog, build_index
from librec.cooccur import build_pair_stats, build_vocabulary
from librec.embed import TrainConfig, train
from librec.model_store import ModelBundle
from librec.synthetic import generate_cluster_corpus


@pytest.fixture(scope="session")
def small_synthetic_bundle():
    corpus = generate_cluster_corpus(n_files=400, seed=42)
    vocab = build_vocabulary(corpus, min_count=1)
    stats = build_pair_stats(corpus, vocab)
    model = train(stats, vocab, TrainConfig(dim=16, epochs=3, seed=42))
    topics = ["parsing", "charting", "caching", "networking", "testing",
              "imaging", "auditing", "streaming", "indexing", "routing"]
    catalog = LibraryCatalog({
        name: f"library {name} provides {topics[int(name[1:3]) % len(topics)]} "
              f"utilities member {name[-2:]}"
        for name in vocab.packages
    })
    index = build_index(catalog)
    return ModelBundle(vocab=vocab, model=model, index=index, catalog=catalog)
