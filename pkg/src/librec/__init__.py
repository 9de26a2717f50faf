"""librec: recommend complementary and alternative library packages for code.

Two recommendation routes share one trained artifact:

- complementary packages, by cosine ranking over co-occurrence embeddings
  trained with skip-gram negative sampling on import co-occurrence;
- alternative packages, by TF-IDF retrieval of library descriptions against
  a natural-language summary of the code.
"""

from .altrec import (
    CodeSummary,
    LibraryCatalog,
    TfIdfIndex,
    TokenizerConfig,
    build_index,
    load_catalog,
    query_index,
    recommend_alternative,
    summarize_heuristic,
    summarize_remote,
    tokenize,
)
from .complement import Recommendation, recommend_complementary
from .cooccur import (
    NegativeSampler,
    PairStats,
    Vocabulary,
    build_pair_stats,
    build_vocabulary,
    make_negative_sampler,
)
from .corpus import (
    Corpus,
    ImportRecord,
    SourceUnit,
    extract_imports,
    extract_notebook_sources,
    load_corpus,
    notebook_code_text,
)
from .embed import (
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
from .evaluation import (
    EvalConfig,
    EvalReport,
    HardLabelSet,
    eval_alternative_hard,
    eval_alternative_soft,
    eval_complementary_leave_one_out,
    load_hard_labels,
)
from .model_store import ModelBundle, load_bundle, save_bundle
from .synthetic import generate_cluster_corpus

__version__ = "0.1.0"

__all__ = [
    "CodeSummary", "LibraryCatalog", "TfIdfIndex", "TokenizerConfig",
    "build_index", "load_catalog", "query_index", "recommend_alternative",
    "summarize_heuristic", "summarize_remote", "tokenize",
    "Recommendation", "recommend_complementary",
    "NegativeSampler", "PairStats", "Vocabulary",
    "build_pair_stats", "build_vocabulary", "make_negative_sampler",
    "Corpus", "ImportRecord", "SourceUnit",
    "extract_imports", "extract_notebook_sources", "load_corpus",
    "notebook_code_text",
    "EmbeddingModel", "ProjectionRequest", "TrainConfig",
    "cosine", "insert_package", "project_out_of_sample",
    "sgns_gradients", "sgns_loss", "train",
    "EvalConfig", "EvalReport", "HardLabelSet",
    "eval_alternative_hard", "eval_alternative_soft",
    "eval_complementary_leave_one_out", "load_hard_labels",
    "ModelBundle", "load_bundle", "save_bundle",
    "generate_cluster_corpus",
]
