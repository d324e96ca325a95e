#!/usr/bin/env python3
"""Benchmark the compiled scoring kernel against the numpy fallback.

Times the raw kernels (row scoring and the full pairwise matrix) and one
end-to-end filtered top-k query on a synthetic 10,000-doc corpus. Run:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import statistics
import time

import numpy as np

from dxsim._kernels import _score_py

try:
    from dxsim._kernels import _score_cy
except ImportError:
    _score_cy = None

from dxsim.corpus import CaseDocument, Corpus
from dxsim.embedding import EmbeddingSet, EmbeddingVector
from dxsim.similarity import SimilarityFilters, top_k_similar


def time_call(fn, repeats: int = 7) -> float:
    """Median wall time in milliseconds."""
    samples = []
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - started) * 1000.0)
    return statistics.median(samples)


def build_corpus(n_docs: int, dim: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(n_docs, dim))
    matrix /= np.linalg.norm(matrix, axis=1, keepdims=True)
    docs = []
    by_id = {}
    for row in range(n_docs):
        doc_id = f"doc-{row:05d}"
        docs.append(
            CaseDocument(
                id=doc_id,
                company=f"company-{row % (n_docs // 3 or 1)}",
                industry=f"industry-{row % 6}",
                sub_industry=f"sub-{row % 20}",
                year=2019 + row % 4,
                text=f"synthetic {row}",
            )
        )
        by_id[doc_id] = EmbeddingVector(dim=dim, values=tuple(map(float, matrix[row])), normalized=True)
    return Corpus(docs), EmbeddingSet(by_id=by_id, dim=dim, backend_fingerprint="bench"), matrix


def main() -> None:
    n_docs, dim = 10_000, 256
    pairwise_n = 350

    corpus, emb, matrix = build_corpus(n_docs, dim)
    query = np.ascontiguousarray(matrix[0])
    small = np.ascontiguousarray(matrix[:pairwise_n])

    kernels = [("numpy", _score_py)]
    if _score_cy is not None:
        kernels.append(("cython", _score_cy))
    else:
        print("compiled kernel not built; benchmarking the fallback only")

    print(f"score_block: {n_docs} x {dim} row dot products")
    for name, impl in kernels:
        ms = time_call(lambda impl=impl: impl.score_block(matrix, query))
        print(f"  {name:<7} {ms:8.3f} ms")

    # The filtered path is what real queries hit: most rows eligible, some
    # excluded. The fallback must gather-copy the submatrix; the compiled
    # kernel scores the subset in place.
    eligible = np.asarray(
        [row for row in range(n_docs) if row % 20 != 0], dtype=np.int64
    )
    print(f"score_rows: {len(eligible)} of {n_docs} rows at dim {dim}")
    for name, impl in kernels:
        ms = time_call(lambda impl=impl: impl.score_rows(matrix, query, eligible))
        print(f"  {name:<7} {ms:8.3f} ms")

    print(f"pairwise_block: {pairwise_n} x {pairwise_n} matrix at dim {dim}")
    for name, impl in kernels:
        ms = time_call(lambda impl=impl: impl.pairwise_block(small))
        print(f"  {name:<7} {ms:8.3f} ms")

    # End-to-end query timing uses whichever kernel dxsim selected at import
    # (set DXSIM_KERNEL=numpy to force the fallback for the second run).
    from dxsim._kernels import KERNEL_BACKEND

    top_k_similar("doc-00000", emb, corpus, SimilarityFilters(), k=2)  # warm index
    ms = time_call(lambda: top_k_similar("doc-00001", emb, corpus, SimilarityFilters(), k=2))
    print(f"top_k_similar end-to-end over {n_docs} docs ({KERNEL_BACKEND} kernel): {ms:.3f} ms")


if __name__ == "__main__":
    main()
