"""HTTP API for interactive exploration.

Embeddings and the document-frequency table are computed once at startup;
after that the state is immutable shared data, so request handling needs no
locking and repeated queries return identical bodies (modulo generated_at).
Responses reuse the exact report structures the CLI prints, keeping the two
interfaces schema-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from dxsim import analysis
from dxsim.corpus import Corpus, load_corpus
from dxsim.embedding import EmbeddingBackendConfig, EmbeddingCache, EmbeddingSet, embed_corpus, embed_text, embedding_input
from dxsim.errors import (
    BackendUnavailable,
    DegenerateVector,
    EmptyCandidatePool,
    EmptyText,
    ProtocolError,
    UnknownId,
)
from dxsim.preprocess import (
    DEFAULT_CONFIG,
    NormalizationConfig,
    StopwordList,
    normalize_text,
    preprocess,
    remove_stopwords,
    tokenize,
)
from dxsim.report import build_query_report, build_report, report_to_dict
from dxsim.similarity import SimilarityFilters, top_k_for_text, top_k_similar

MAX_PAGE_SIZE = 200
DEFAULT_K = 2
DEFAULT_FEATURE_COUNT = 6


@dataclass
class ServiceState:
    corpus: Corpus
    embeddings: EmbeddingSet
    term_store: Mapping[str, list[str]]
    df_table: Mapping[str, int]
    backend: EmbeddingBackendConfig
    config: NormalizationConfig
    stopwords: StopwordList
    embed_uses_preprocessed: bool = False


def build_state(
    corpus: Corpus,
    backend: EmbeddingBackendConfig,
    cache: EmbeddingCache | None = None,
    config: NormalizationConfig = DEFAULT_CONFIG,
    stopwords: StopwordList | None = None,
    parallelism: int = 1,
    embed_uses_preprocessed: bool = False,
) -> ServiceState:
    """Embed the corpus and precompute term statistics for query time."""
    if stopwords is None:
        stopwords = StopwordList.builtin(config)
    embeddings = embed_corpus(
        backend,
        corpus,
        cache=cache,
        config=config,
        stopwords=stopwords,
        use_preprocessed=embed_uses_preprocessed,
        parallelism=parallelism,
    )
    term_store = {
        doc.id: analysis.extract_terms(preprocess(doc, config, stopwords)) for doc in corpus
    }
    df_table = analysis.document_frequencies(term_store)
    return ServiceState(
        corpus=corpus,
        embeddings=embeddings,
        term_store=term_store,
        df_table=df_table,
        backend=backend,
        config=config,
        stopwords=stopwords,
        embed_uses_preprocessed=embed_uses_preprocessed,
    )


class FiltersBody(BaseModel):
    exclude_company_of_target: bool = True
    exclude_same_sub_industry: bool = True
    exclude_same_industry: bool = False
    min_score: float | None = None
    allowed_years: list[int] | None = None
    exclude_company: str | None = None
    exclude_sub_industry: str | None = None
    exclude_industry: str | None = None

    def to_filters(self) -> SimilarityFilters:
        return SimilarityFilters(
            exclude_company_of_target=self.exclude_company_of_target,
            exclude_same_sub_industry=self.exclude_same_sub_industry,
            exclude_same_industry=self.exclude_same_industry,
            min_score=self.min_score,
            allowed_years=frozenset(self.allowed_years) if self.allowed_years else None,
            exclude_company=self.exclude_company,
            exclude_sub_industry=self.exclude_sub_industry,
            exclude_industry=self.exclude_industry,
        )


class SimilarBody(BaseModel):
    target: str
    k: int = Field(default=DEFAULT_K, ge=1)
    features: int = Field(default=DEFAULT_FEATURE_COUNT, ge=1)
    filters: FiltersBody = Field(default_factory=FiltersBody)


class WhatIfBody(BaseModel):
    text: str
    k: int = Field(default=DEFAULT_K, ge=1)
    features: int = Field(default=DEFAULT_FEATURE_COUNT, ge=1)
    filters: FiltersBody = Field(default_factory=FiltersBody)


def build_similar_report(state: ServiceState, target_id: str, k: int, features: int, filters: SimilarityFilters):
    """Compose ranking + shared-term extraction + report assembly.

    Shared by the /api/similar handler and the CLI `similar` subcommand so
    the two interfaces cannot drift apart.
    """
    matches = top_k_similar(target_id, state.embeddings, state.corpus, filters, k)
    overlaps = [
        analysis.common_features(
            target_id, m.doc_id, state.corpus, state.term_store, features, df=state.df_table
        )
        for m in matches
    ]
    return build_report(
        target_id,
        matches,
        overlaps,
        state.corpus,
        filters=filters,
        backend_fingerprint=state.embeddings.backend_fingerprint,
    )


def build_whatif_report(state: ServiceState, text: str, k: int, features: int, filters: SimilarityFilters):
    """Embed ad-hoc text and rank it against the corpus; the text is never
    persisted."""
    query_input = embedding_input(
        text,
        config=state.config,
        stopwords=state.stopwords,
        use_preprocessed=state.embed_uses_preprocessed,
    )
    if not query_input.strip():
        raise EmptyText("query text is empty after normalization")
    query_vector = embed_text(state.backend, query_input)
    matches = top_k_for_text(query_vector, state.embeddings, state.corpus, filters, k)
    query_terms = list(
        remove_stopwords(tokenize(normalize_text(text, state.config)), state.stopwords)
    )
    overlaps = []
    for m in matches:
        shared = analysis.shared_term_weights(
            query_terms, list(state.term_store[m.doc_id]), state.df_table, len(state.corpus), features
        )
        overlaps.append(
            analysis.FeatureOverlap(
                doc_a="(what-if)",
                doc_b=m.doc_id,
                shared_terms=tuple(shared),
                jaccard=analysis.jaccard_index(set(query_terms), set(state.term_store[m.doc_id])),
            )
        )
    return build_query_report(
        "what-if query",
        matches,
        overlaps,
        state.corpus,
        filters=filters,
        backend_fingerprint=state.embeddings.backend_fingerprint,
    )


def create_app(
    state: ServiceState,
    cors_origins: list[str] | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="dxsim", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def error(status: int, payload: dict) -> JSONResponse:
        return JSONResponse(status_code=status, content=payload)

    @app.exception_handler(UnknownId)
    async def unknown_id_handler(_: Request, exc: UnknownId):
        return error(404, {"error": "unknown_id", "id": exc.doc_id})

    @app.exception_handler(EmptyCandidatePool)
    async def empty_pool_handler(_: Request, exc: EmptyCandidatePool):
        return error(422, {"error": "empty_candidate_pool", "detail": str(exc)})

    @app.exception_handler(EmptyText)
    async def empty_text_handler(_: Request, exc: EmptyText):
        return error(422, {"error": "empty_text", "detail": str(exc)})

    @app.exception_handler(BackendUnavailable)
    async def backend_down_handler(_: Request, exc: BackendUnavailable):
        return error(502, {"error": "backend_unavailable", "detail": str(exc)})

    @app.exception_handler(ProtocolError)
    async def protocol_error_handler(_: Request, exc: ProtocolError):
        return error(502, {"error": "backend_protocol_error", "detail": str(exc)})

    @app.exception_handler(DegenerateVector)
    async def degenerate_handler(_: Request, exc: DegenerateVector):
        return error(422, {"error": "degenerate_vector", "detail": str(exc)})

    @app.get("/api/health")
    async def health():
        return {
            "status": "ok",
            "corpus_size": len(state.corpus),
            "dim": state.embeddings.dim,
            "backend_fingerprint": state.embeddings.backend_fingerprint,
        }

    @app.get("/api/cases")
    async def list_cases(
        industry: str | None = None,
        page: int = Query(default=1),
        page_size: int = Query(default=50),
    ):
        if page < 1 or page_size < 1:
            return error(400, {"error": "bad_pagination", "detail": "page and page_size must be >= 1"})
        page_size = min(page_size, MAX_PAGE_SIZE)
        cases = state.corpus.list_cases(industry_filter=industry)
        start = (page - 1) * page_size
        chunk = cases[start : start + page_size]
        return {
            "cases": [c._asdict() for c in chunk],
            "page": page,
            "page_size": page_size,
            "total": len(cases),
        }

    @app.get("/api/cases/{doc_id}")
    async def get_case(doc_id: str):
        doc = state.corpus.get_case(doc_id)
        return {
            "id": doc.id,
            "company": doc.company,
            "industry": doc.industry,
            "sub_industry": doc.sub_industry,
            "year": doc.year,
            "text": doc.text,
        }

    @app.post("/api/similar")
    async def similar(body: SimilarBody):
        report = build_similar_report(state, body.target, body.k, body.features, body.filters.to_filters())
        return report_to_dict(report)

    @app.post("/api/whatif")
    async def whatif(body: WhatIfBody):
        report = build_whatif_report(state, body.text, body.k, body.features, body.filters.to_filters())
        return report_to_dict(report)

    @app.get("/api/common-features")
    async def common_features_endpoint(
        a: str,
        b: str,
        n: int = Query(default=DEFAULT_FEATURE_COUNT, ge=1),
    ):
        overlap = analysis.common_features(a, b, state.corpus, state.term_store, n, df=state.df_table)
        return {
            "doc_a": overlap.doc_a,
            "doc_b": overlap.doc_b,
            "shared_terms": [{"term": t.term, "weight": t.weight} for t in overlap.shared_terms],
            "jaccard": overlap.jaccard,
        }

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def build_state_from_paths(
    corpus_path: str,
    backend: EmbeddingBackendConfig,
    cache_path: str | None = None,
    stopwords_path: str | None = None,
    config: NormalizationConfig = DEFAULT_CONFIG,
    parallelism: int = 1,
    embed_uses_preprocessed: bool = False,
) -> ServiceState:
    corpus = load_corpus(corpus_path)
    cache = EmbeddingCache(cache_path) if cache_path else None
    stopwords = StopwordList.load(stopwords_path, config) if stopwords_path else StopwordList.builtin(config)
    return build_state(
        corpus,
        backend,
        cache=cache,
        config=config,
        stopwords=stopwords,
        parallelism=parallelism,
        embed_uses_preprocessed=embed_uses_preprocessed,
    )
