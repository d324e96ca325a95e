"""Document embedding: pluggable backends plus a persistent cache.

Two backends exist behind one config type. The remote backend speaks a small
HTTP/JSON protocol to an external inference service (POST {endpoint}/embed).
The hashed backend is a deterministic local stand-in: each token contributes
a reproducible ±1 sign vector derived from a counter-mode SHA-256 stream, so
the whole pipeline is testable with no model and identical results on every
platform.

Every vector leaving this module is L2-normalized, which lets the similarity
layer use plain dot products.
"""

from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import httpx
import numpy as np

from dxsim.corpus import Corpus
from dxsim.errors import (
    BackendUnavailable,
    DegenerateVector,
    DimensionMismatch,
    EmptyText,
    ProtocolError,
    ZeroVector,
)
from dxsim.preprocess import (
    DEFAULT_CONFIG,
    NormalizationConfig,
    StopwordList,
    TokenSequence,
    normalize_text,
    remove_stopwords,
    tokenize,
)

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-dimension real vector; normalized means unit Euclidean length."""

    dim: int
    values: tuple[float, ...]
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.dim < 1 or len(self.values) != self.dim:
            raise ValueError(f"expected {self.dim} values, got {len(self.values)}")
        arr = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector values must be finite")
        if not np.any(arr):
            raise ValueError("vector must not be all-zero")
        if self.normalized and abs(float(np.linalg.norm(arr)) - 1.0) > NORM_TOLERANCE:
            raise ValueError("normalized flag set but norm is not 1")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


def l2_normalize(values: Sequence[float] | np.ndarray) -> EmbeddingVector:
    """Scale a raw vector to unit length. Raises ZeroVector on an all-zero
    or non-finite input."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ZeroVector("expected a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ZeroVector("vector has non-finite entries")
    norm = float(np.linalg.norm(arr))
    if not np.isfinite(norm) or norm < 1e-150:
        # Tiny or huge entries make the squared sum underflow into the
        # subnormal range (losing precision) or overflow to inf; rescale by
        # the largest magnitude and retry.
        scale = float(np.max(np.abs(arr)))
        if scale == 0.0:
            raise ZeroVector("cannot normalize the zero vector")
        arr = arr / scale
        norm = float(np.linalg.norm(arr))
    out = arr / norm
    return EmbeddingVector(dim=out.size, values=tuple(float(v) for v in out), normalized=True)


# --- hashed projection backend ---------------------------------------------


def _token_signs(token: str, seed: int, dim: int) -> np.ndarray:
    """Deterministic ±1 vector for one token.

    A per-token key seeds a counter-mode SHA-256 stream; each bit becomes one
    sign. No RNG library is involved, so results are bit-identical across
    platforms and library versions.
    """
    seed = seed & 0xFFFFFFFFFFFFFFFF
    key = hashlib.sha256(f"{seed}\x1f".encode("utf-8") + token.encode("utf-8")).digest()
    out = np.empty(dim, dtype=np.float64)
    filled = 0
    counter = 0
    while filled < dim:
        block = hashlib.sha256(key + counter.to_bytes(8, "big")).digest()
        bits = np.unpackbits(np.frombuffer(block, dtype=np.uint8))
        take = min(dim - filled, bits.size)
        out[filled : filled + take] = bits[:take].astype(np.float64) * 2.0 - 1.0
        filled += take
        counter += 1
    return out


def hashed_projection_embed(tokens: TokenSequence, dim: int, seed: int) -> EmbeddingVector:
    """Sum per-token sign vectors weighted by token count, then normalize.

    Depends only on the token multiset, so permuted inputs embed identically.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if len(tokens) == 0:
        raise EmptyText("no tokens to embed")
    counts: dict[str, int] = {}
    for tok in tokens:
        counts[tok] = counts.get(tok, 0) + 1
    acc = np.zeros(dim, dtype=np.float64)
    for tok in sorted(counts):
        acc += counts[tok] * _token_signs(tok, seed, dim)
    if not np.any(acc):
        raise DegenerateVector("token sign vectors cancelled exactly")
    return l2_normalize(acc)


# --- backend configuration ---------------------------------------------------


@dataclass(frozen=True)
class EmbeddingBackendConfig:
    """Which backend to use and how to reach/parameterize it."""

    kind: str  # "hashed" | "remote"
    dim: int
    endpoint: str | None = None
    model_name: str | None = None
    seed: int = 0
    timeout: float = 10.0

    def __post_init__(self) -> None:
        if self.kind not in ("hashed", "remote"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.kind == "remote":
            if not self.endpoint:
                raise ValueError("remote backend requires an endpoint")
            if not self.model_name:
                raise ValueError("remote backend requires a model name")

    @property
    def fingerprint(self) -> str:
        if self.kind == "hashed":
            return f"hashed:seed={self.seed & 0xFFFFFFFFFFFFFFFF}:dim={self.dim}"
        return f"remote:model={self.model_name}:dim={self.dim}"


# --- remote wire protocol ----------------------------------------------------


def request_embeddings(
    endpoint: str,
    model_name: str,
    texts: Sequence[str],
    timeout: float = 10.0,
) -> list[list[float]]:
    """POST a batch of texts to {endpoint}/embed and validate the response.

    Returns one raw (unnormalized) vector per text, in request order.
    """
    if not texts:
        raise ValueError("texts batch must be non-empty")
    for text in texts:
        if not text.strip():
            raise EmptyText("cannot embed empty text")
    url = endpoint.rstrip("/") + "/embed"
    try:
        response = httpx.post(url, json={"model": model_name, "texts": list(texts)}, timeout=timeout)
    except httpx.HTTPError as exc:
        raise BackendUnavailable(f"embedding service unreachable: {exc}") from exc
    if response.status_code != 200:
        raise BackendUnavailable(f"embedding service returned HTTP {response.status_code}")
    try:
        body = response.json()
    except ValueError as exc:
        raise ProtocolError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(body, dict) or "vectors" not in body or "dim" not in body:
        raise ProtocolError("response missing 'dim' or 'vectors'")
    vectors = body["vectors"]
    if not isinstance(vectors, list) or not all(isinstance(v, list) for v in vectors):
        raise ProtocolError("'vectors' must be a list of lists")
    if len(vectors) != len(texts):
        raise ProtocolError(f"requested {len(texts)} embeddings, got {len(vectors)}")
    dim = body["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ProtocolError(f"invalid 'dim' value {dim!r}")
    for vec in vectors:
        if len(vec) != dim:
            raise DimensionMismatch(f"vector of length {len(vec)} in a dim={dim} response")
    return vectors


def embed_text(backend: EmbeddingBackendConfig, text: str) -> EmbeddingVector:
    """Embed one text with the configured backend; output is unit length."""
    if not text.strip():
        raise EmptyText("cannot embed empty text")
    if backend.kind == "hashed":
        tokens = tokenize(text)
        if len(tokens) == 0:
            raise EmptyText("text has no tokens")
        return hashed_projection_embed(tokens, backend.dim, backend.seed)
    vectors = request_embeddings(backend.endpoint, backend.model_name, [text], timeout=backend.timeout)
    raw = vectors[0]
    if len(raw) != backend.dim:
        raise DimensionMismatch(f"backend returned dim {len(raw)}, expected {backend.dim}")
    return l2_normalize(raw)


# --- persistent cache --------------------------------------------------------


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class EmbeddingCache:
    """Append-only JSONL store keyed by (backend fingerprint, text digest).

    Writes are serialized with a lock; any preprocessing or backend change
    produces a different key, so stale entries are never served.
    """

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], EmbeddingVector] = {}
        self._load()

    def _load(self) -> None:
        try:
            fh = open(self.path, encoding="utf-8")
        except FileNotFoundError:
            return
        with fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                vec = EmbeddingVector(
                    dim=rec["dim"],
                    values=tuple(rec["values"]),
                    normalized=True,
                )
                self._entries[(rec["fingerprint"], rec["text_sha256"])] = vec

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, fingerprint: str, digest: str) -> EmbeddingVector | None:
        return self._entries.get((fingerprint, digest))

    def put(self, fingerprint: str, digest: str, vector: EmbeddingVector) -> None:
        with self._lock:
            if (fingerprint, digest) in self._entries:
                return
            self._entries[(fingerprint, digest)] = vector
            record = {
                "fingerprint": fingerprint,
                "text_sha256": digest,
                "dim": vector.dim,
                "values": list(vector.values),
            }
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")


# --- corpus embedding --------------------------------------------------------


@dataclass
class EmbeddingSet:
    """One vector per document id, all of the same dimension."""

    by_id: dict[str, EmbeddingVector]
    dim: int
    backend_fingerprint: str
    _dense: tuple[list[str], np.ndarray] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        for doc_id, vec in self.by_id.items():
            if vec.dim != self.dim:
                raise DimensionMismatch(f"vector for {doc_id!r} has dim {vec.dim}, expected {self.dim}")

    def __len__(self) -> int:
        return len(self.by_id)

    def dense(self) -> tuple[list[str], np.ndarray]:
        """Ids plus a C-contiguous (n, dim) float64 matrix, built lazily."""
        if self._dense is None:
            ids = list(self.by_id)
            matrix = np.empty((len(ids), self.dim), dtype=np.float64)
            for row, doc_id in enumerate(ids):
                matrix[row, :] = self.by_id[doc_id].values
            self._dense = (ids, matrix)
        return self._dense


def embedding_input(
    text: str,
    config: NormalizationConfig = DEFAULT_CONFIG,
    stopwords: StopwordList | None = None,
    use_preprocessed: bool = False,
) -> str:
    """The exact string handed to the backend for a document text.

    By default this is the normalized text; with use_preprocessed the
    stopword-filtered tokens are joined instead. The cache digests this
    string, so changing either knob invalidates naturally.
    """
    normalized = normalize_text(text, config)
    if not use_preprocessed:
        return normalized
    if stopwords is None:
        stopwords = StopwordList.builtin(config)
    return " ".join(remove_stopwords(tokenize(normalized), stopwords))


def embed_corpus(
    backend: EmbeddingBackendConfig,
    corpus: Corpus,
    cache: EmbeddingCache | None = None,
    config: NormalizationConfig = DEFAULT_CONFIG,
    stopwords: StopwordList | None = None,
    use_preprocessed: bool = False,
    parallelism: int = 1,
) -> EmbeddingSet:
    """Embed every document, serving repeats from the cache.

    Backend failures abort the whole call (annotated with the failing
    document id); a partial EmbeddingSet is never returned. The result is
    independent of request order or parallelism.
    """
    inputs: dict[str, str] = {}
    for doc in corpus:
        inputs[doc.id] = embedding_input(
            doc.text, config=config, stopwords=stopwords, use_preprocessed=use_preprocessed
        )

    fingerprint = backend.fingerprint
    vectors: dict[str, EmbeddingVector] = {}
    missing: list[str] = []
    for doc_id, text in inputs.items():
        if not text.strip():
            raise EmptyText(f"document {doc_id!r} is empty after preprocessing")
        cached = cache.get(fingerprint, text_digest(text)) if cache is not None else None
        if cached is not None:
            vectors[doc_id] = cached
        else:
            missing.append(doc_id)

    def embed_one(doc_id: str) -> tuple[str, EmbeddingVector]:
        try:
            return doc_id, embed_text(backend, inputs[doc_id])
        except (EmptyText, DegenerateVector, DimensionMismatch, BackendUnavailable, ProtocolError) as exc:
            raise type(exc)(f"document {doc_id!r}: {exc}") from exc

    if parallelism > 1 and len(missing) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            vectors.update(pool.map(embed_one, missing))
    else:
        vectors.update(map(embed_one, missing))

    if cache is not None:
        for doc_id in missing:
            cache.put(fingerprint, text_digest(inputs[doc_id]), vectors[doc_id])

    ordered = {doc.id: vectors[doc.id] for doc in corpus}
    return EmbeddingSet(by_id=ordered, dim=backend.dim, backend_fingerprint=fingerprint)
