"""dxsim: a cross-domain case-similarity engine.

Embeds company DX case documents, ranks them by cosine similarity under
same-company/same-domain exclusion filters, extracts the salient terms two
matched cases share, and serves the whole loop to analysts over a CLI and an
HTTP API.
"""

from dxsim._kernels import KERNEL_BACKEND
from dxsim.corpus import CaseDocument, Corpus, ingest_corpus, load_corpus
from dxsim.embedding import (
    EmbeddingBackendConfig,
    EmbeddingCache,
    EmbeddingSet,
    EmbeddingVector,
    embed_corpus,
    embed_text,
    hashed_projection_embed,
    l2_normalize,
)
from dxsim.preprocess import (
    NormalizationConfig,
    ProcessedText,
    StopwordList,
    TokenSequence,
    normalize_text,
    preprocess,
    remove_stopwords,
    tokenize,
)
from dxsim.similarity import (
    RankedMatch,
    SimilarityFilters,
    cosine_similarity,
    similarity_matrix,
    top_k_for_text,
    top_k_similar,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "CaseDocument",
    "Corpus",
    "ingest_corpus",
    "load_corpus",
    "EmbeddingBackendConfig",
    "EmbeddingCache",
    "EmbeddingSet",
    "EmbeddingVector",
    "embed_corpus",
    "embed_text",
    "hashed_projection_embed",
    "l2_normalize",
    "NormalizationConfig",
    "ProcessedText",
    "StopwordList",
    "TokenSequence",
    "normalize_text",
    "preprocess",
    "remove_stopwords",
    "tokenize",
    "RankedMatch",
    "SimilarityFilters",
    "cosine_similarity",
    "similarity_matrix",
    "top_k_for_text",
    "top_k_similar",
    "__version__",
]
