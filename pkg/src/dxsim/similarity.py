"""Cosine similarity, pairwise matrices, and filtered exact top-k retrieval.

Search is exact brute force: at corpus scale (hundreds of documents) an
approximate index buys nothing and exactness keeps oracle testing meaningful.
The scoring inner loop runs through the compiled kernel (numpy fallback) over
a contiguous matrix cached on the EmbeddingSet, with a dot-product fast path
for normalized vectors, so a 10k-document query still completes in
milliseconds.

Default filters exclude the target's own company and its sub-industry but
not its whole industry: a beverage maker and a chemical maker are different
business domains even when both are classified "Manufacturing".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dxsim._kernels import pairwise_block, score_block, score_rows
from dxsim.corpus import CaseDocument, Corpus
from dxsim.embedding import EmbeddingSet, EmbeddingVector
from dxsim.errors import DimensionMismatch, EmptyCandidatePool, UnknownId


def clamp_score(value: float) -> float:
    """Clamp to [-1, 1]; floating error can push a cosine past 1 by ~1e-16."""
    return max(-1.0, min(1.0, value))


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    When both inputs are unit length the denominator is skipped; the two
    routes agree within 1e-6 by the normalization guarantee.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot compare dim {a.dim} with dim {b.dim}")
    av = a.as_array()
    bv = b.as_array()
    if a.normalized and b.normalized:
        return clamp_score(float(av @ bv))
    denom = float(np.linalg.norm(av)) * float(np.linalg.norm(bv))
    if not np.isfinite(denom) or denom < 1e-150:
        # Tiny or huge magnitudes under/overflow the norm product; cosine is
        # scale-invariant, so rescale each vector by its largest entry.
        av = av / np.max(np.abs(av))
        bv = bv / np.max(np.abs(bv))
        denom = float(np.linalg.norm(av)) * float(np.linalg.norm(bv))
    return clamp_score(float(av @ bv) / denom)


@dataclass(frozen=True)
class SimilarityFilters:
    """What to exclude from the candidate pool.

    The three booleans bind to the target document's own attributes and are
    only meaningful when a target exists; ad-hoc text queries instead use the
    explicit exclude_* values.
    """

    exclude_company_of_target: bool = True
    exclude_same_sub_industry: bool = True
    exclude_same_industry: bool = False
    min_score: float | None = None
    allowed_years: frozenset[int] | None = None
    exclude_company: str | None = None
    exclude_sub_industry: str | None = None
    exclude_industry: str | None = None

    def __post_init__(self) -> None:
        if self.min_score is not None and not -1.0 <= self.min_score <= 1.0:
            raise ValueError("min_score must be in [-1, 1]")
        if self.allowed_years is not None:
            object.__setattr__(self, "allowed_years", frozenset(self.allowed_years))


DEFAULT_FILTERS = SimilarityFilters()


@dataclass(frozen=True)
class RankedMatch:
    doc_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class SimilarityMatrix:
    ids: tuple[str, ...]
    values: np.ndarray  # (n, n), symmetric, clamped

    def score(self, id_a: str, id_b: str) -> float:
        for doc_id in (id_a, id_b):
            if doc_id not in self.ids:
                raise UnknownId(doc_id)
        return float(self.values[self.ids.index(id_a), self.ids.index(id_b)])


def similarity_matrix(emb_set: EmbeddingSet) -> SimilarityMatrix:
    """All-pairs cosine matrix: unit diagonal within 1e-6, exactly symmetric."""
    if len(emb_set) == 0:
        raise ValueError("embedding set is empty")
    ids, matrix = emb_set.dense()
    values = np.clip(pairwise_block(matrix), -1.0, 1.0)
    return SimilarityMatrix(ids=tuple(ids), values=values)


def _metadata_eligible(doc: CaseDocument, target: CaseDocument | None, filters: SimilarityFilters) -> bool:
    if target is not None:
        if filters.exclude_company_of_target and doc.company == target.company:
            return False
        if filters.exclude_same_sub_industry and doc.sub_industry == target.sub_industry:
            return False
        if filters.exclude_same_industry and doc.industry == target.industry:
            return False
    if filters.exclude_company is not None and doc.company == filters.exclude_company:
        return False
    if filters.exclude_sub_industry is not None and doc.sub_industry == filters.exclude_sub_industry:
        return False
    if filters.exclude_industry is not None and doc.industry == filters.exclude_industry:
        return False
    if filters.allowed_years is not None and doc.year not in filters.allowed_years:
        return False
    return True


def _rank_candidates(
    query: np.ndarray,
    emb_set: EmbeddingSet,
    corpus: Corpus,
    filters: SimilarityFilters,
    k: int,
    skip_id: str | None,
    target: CaseDocument | None,
) -> list[RankedMatch]:
    if k < 1:
        raise ValueError("k must be >= 1")
    ids, matrix = emb_set.dense()
    rows: list[int] = []
    row_ids: list[str] = []
    for row, doc_id in enumerate(ids):
        if doc_id == skip_id or doc_id not in corpus:
            continue
        if _metadata_eligible(corpus.get_case(doc_id), target, filters):
            rows.append(row)
            row_ids.append(doc_id)
    if not rows:
        raise EmptyCandidatePool("all candidates were excluded by the active filters")

    if len(rows) == len(ids):
        scores = score_block(matrix, query)
    else:
        scores = score_rows(matrix, query, np.asarray(rows, dtype=np.int64))
    scores = np.clip(scores, -1.0, 1.0)

    if filters.min_score is not None:
        keep = scores >= filters.min_score
        if not np.any(keep):
            raise EmptyCandidatePool(f"no candidate scored at least {filters.min_score}")
        scores = scores[keep]
        row_ids = [doc_id for doc_id, ok in zip(row_ids, keep) if ok]

    # Full sort: descending score, ties by ascending id for total determinism.
    order = np.lexsort((np.asarray(row_ids), -scores))
    top = order[: min(k, len(order))]
    return [
        RankedMatch(doc_id=row_ids[i], score=float(scores[i]), rank=rank)
        for rank, i in enumerate(top, start=1)
    ]


def top_k_similar(
    target_id: str,
    emb_set: EmbeddingSet,
    corpus: Corpus,
    filters: SimilarityFilters = DEFAULT_FILTERS,
    k: int = 2,
) -> list[RankedMatch]:
    """The k most similar eligible documents to an existing case.

    The target itself is always excluded; the remaining pool is narrowed by
    the filters before ranking. Raises EmptyCandidatePool rather than
    returning a silently empty result.
    """
    target = corpus.get_case(target_id)
    if target_id not in emb_set.by_id:
        raise UnknownId(target_id)
    query = emb_set.by_id[target_id].as_array()
    return _rank_candidates(query, emb_set, corpus, filters, k, skip_id=target_id, target=target)


def top_k_for_text(
    query_vector: EmbeddingVector,
    emb_set: EmbeddingSet,
    corpus: Corpus,
    filters: SimilarityFilters = DEFAULT_FILTERS,
    k: int = 2,
) -> list[RankedMatch]:
    """Top-k for an ad-hoc query vector.

    No self-exclusion applies, and company/industry exclusions only fire when
    the filters name explicit values.
    """
    if query_vector.dim != emb_set.dim:
        raise DimensionMismatch(f"query dim {query_vector.dim} != index dim {emb_set.dim}")
    return _rank_candidates(
        query_vector.as_array(), emb_set, corpus, filters, k, skip_id=None, target=None
    )
