"""Shared salient terms between matched cases.

Where a human analyst would hand-write the common features of two cases, this
module intersects their term sets and ranks the intersection by summed TF-IDF
weight. That is an interpretation of "what the cases share", chosen because
it is deterministic, explainable, and auditable, not a reproduction of any
hand-curated list.

TF is the in-document relative frequency; IDF is smoothed as
ln((1 + D) / (1 + df)) + 1 so it never divides by zero and a term present in
every document keeps a positive weight.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from dxsim.corpus import Corpus
from dxsim.errors import CorpusTooSmall, UnknownId
from dxsim.preprocess import ProcessedText, StopwordList, tokenize

TermStore = Mapping[str, Sequence[str]]


@dataclass(frozen=True)
class TermWeight:
    term: str
    weight: float


@dataclass(frozen=True)
class FeatureOverlap:
    doc_a: str
    doc_b: str
    shared_terms: tuple[TermWeight, ...]
    jaccard: float


def extract_terms(
    processed: ProcessedText,
    stopwords: StopwordList | None = None,
    include_bigrams: bool = False,
) -> list[str]:
    """Terms of one document: its surviving tokens, optionally plus adjacent
    bigrams.

    A bigram counts only when both constituents survive stopword removal AND
    were adjacent in the original token sequence, so stopword deletion cannot
    fabricate adjacency.
    """
    terms = list(processed.tokens)
    if include_bigrams:
        if stopwords is None:
            raise ValueError("bigram mining needs the stopword list used in preprocessing")
        original = tuple(tokenize(processed.normalized_text))
        for left, right in zip(original, original[1:]):
            if left not in stopwords and right not in stopwords:
                terms.append(f"{left} {right}")
    return terms


def document_frequencies(term_store: TermStore) -> dict[str, int]:
    """Number of documents containing each term; computed once per corpus."""
    df: Counter[str] = Counter()
    for terms in term_store.values():
        df.update(set(terms))
    return dict(df)


def _idf(doc_count: int, term_df: int) -> float:
    return math.log((1 + doc_count) / (1 + term_df)) + 1.0


def _tf_idf(terms: Sequence[str], df: Mapping[str, int], doc_count: int) -> dict[str, float]:
    total = len(terms)
    counts = Counter(terms)
    return {
        term: (count / total) * _idf(doc_count, df.get(term, 0))
        for term, count in counts.items()
    }


def _require_doc(doc_id: str, corpus: Corpus, term_store: TermStore) -> None:
    if doc_id not in corpus or doc_id not in term_store:
        raise UnknownId(doc_id)


def salient_terms(
    doc_id: str,
    corpus: Corpus,
    term_store: TermStore,
    n: int,
    df: Mapping[str, int] | None = None,
) -> list[TermWeight]:
    """Top-n terms of a document by TF-IDF, ties broken by term string."""
    if len(corpus) < 2:
        raise CorpusTooSmall("IDF needs a corpus of at least 2 documents")
    _require_doc(doc_id, corpus, term_store)
    if n < 1:
        raise ValueError("n must be >= 1")
    if df is None:
        df = document_frequencies(term_store)
    weights = _tf_idf(term_store[doc_id], df, len(corpus))
    ranked = sorted(weights.items(), key=lambda kv: (-kv[1], kv[0]))
    return [TermWeight(term, weight) for term, weight in ranked[:n]]


def common_features(
    doc_a: str,
    doc_b: str,
    corpus: Corpus,
    term_store: TermStore,
    n: int,
    df: Mapping[str, int] | None = None,
) -> FeatureOverlap:
    """Terms present in both documents, ranked by their summed TF-IDF.

    The jaccard index is computed over the full (untruncated) term sets; an
    empty intersection is a valid result, not an error.
    """
    if len(corpus) < 2:
        raise CorpusTooSmall("IDF needs a corpus of at least 2 documents")
    _require_doc(doc_a, corpus, term_store)
    _require_doc(doc_b, corpus, term_store)
    if n < 1:
        raise ValueError("n must be >= 1")
    if df is None:
        df = document_frequencies(term_store)
    overlap = shared_term_weights(term_store[doc_a], term_store[doc_b], df, len(corpus), n)
    jaccard = jaccard_index(set(term_store[doc_a]), set(term_store[doc_b]))
    return FeatureOverlap(doc_a=doc_a, doc_b=doc_b, shared_terms=tuple(overlap), jaccard=jaccard)


def shared_term_weights(
    terms_a: Sequence[str],
    terms_b: Sequence[str],
    df: Mapping[str, int],
    doc_count: int,
    n: int,
) -> list[TermWeight]:
    """Intersection of two term lists ranked by summed TF-IDF weight.

    Also used directly for ad-hoc query text, which has no corpus id.
    """
    weights_a = _tf_idf(terms_a, df, doc_count)
    weights_b = _tf_idf(terms_b, df, doc_count)
    shared = set(weights_a) & set(weights_b)
    ranked = sorted(shared, key=lambda term: (-(weights_a[term] + weights_b[term]), term))
    return [TermWeight(term, weights_a[term] + weights_b[term]) for term in ranked[:n]]


def jaccard_index(set_a: set[str], set_b: set[str]) -> float:
    union = set_a | set_b
    if not union:
        return 0.0
    return len(set_a & set_b) / len(union)
