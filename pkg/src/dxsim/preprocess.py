"""Deterministic text normalization, tokenization, and stopword removal.

Normalization folds full-width/half-width variants via Unicode NFKC, which is
the dominant concern for Japanese corporate text; everything else (casing,
whitespace, punctuation) is config-toggled. No morphological analysis happens
here: tokens are whitespace runs further split at Han/kana vs Latin/digit
script boundaries, which is enough for stopword removal and term overlap.
The embedding backend does its own subword handling.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from dxsim.corpus import CaseDocument
from dxsim.errors import EmptyAfterPreprocessing

_WS_RUN = re.compile(r"\s+")

# Small default list; production runs load a curated file via --stopwords.
BUILTIN_STOPWORDS = (
    "a an the and or of to in on at for with by from as is are was were be "
    "been it its this that these those we our they their has have had will "
    "would can could into over under also such not no but if than then"
).split()


@dataclass(frozen=True)
class NormalizationConfig:
    unicode_form: bool = True
    lowercase: bool = True
    collapse_whitespace: bool = True
    strip_punctuation: bool = True


DEFAULT_CONFIG = NormalizationConfig()


def _strip_punctuation(text: str) -> str:
    # Punctuation is replaced by a space, not deleted, so that "A・B" cannot
    # silently merge into one token.
    out = []
    for ch in text:
        if unicodedata.category(ch).startswith("P"):
            out.append(" ")
        else:
            out.append(ch)
    return "".join(out)


def _normalize_once(text: str, config: NormalizationConfig) -> str:
    if config.unicode_form:
        text = unicodedata.normalize("NFKC", text)
    if config.lowercase:
        text = text.lower()
    if config.strip_punctuation:
        text = _strip_punctuation(text)
    if config.collapse_whitespace:
        text = _WS_RUN.sub(" ", text).strip()
    return text


def normalize_text(text: str, config: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Normalize text under the given config; idempotent by construction.

    The pass is iterated to a fixed point because character removal can make
    previously separated combining marks adjacent, which a later NFKC pass
    would compose differently.
    """
    for _ in range(8):
        after = _normalize_once(text, config)
        if after == text:
            return after
        text = after
    raise RuntimeError("normalization did not reach a fixed point")


# Script classes for token splitting. OTHER glues to the surrounding run.
_LATIN = 1
_CJK = 2
_OTHER = 0

_CJK_RANGES = (
    (0x3040, 0x30FF),  # hiragana + katakana (includes the prolonged sound mark)
    (0x31F0, 0x31FF),  # katakana phonetic extensions
    (0x3400, 0x4DBF),  # CJK extension A
    (0x4E00, 0x9FFF),  # CJK unified ideographs
    (0xF900, 0xFAFF),  # CJK compatibility ideographs
    (0xFF66, 0xFF9D),  # halfwidth katakana (survives only when NFKC is off)
    (0x20000, 0x2FA1F),  # CJK extensions B+
)
_LATIN_RANGES = (
    (0x00C0, 0x024F),  # accented Latin
    (0x1E00, 0x1EFF),  # Latin extended additional
)


def _char_class(ch: str) -> int:
    if ch.isascii():
        return _LATIN if ch.isalnum() else _OTHER
    cp = ord(ch)
    for lo, hi in _CJK_RANGES:
        if lo <= cp <= hi:
            return _CJK
    for lo, hi in _LATIN_RANGES:
        if lo <= cp <= hi:
            return _LATIN
    return _OTHER


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        for tok in self.tokens:
            if not tok or _WS_RUN.search(tok):
                raise ValueError(f"invalid token {tok!r}")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def _split_scripts(chunk: str) -> list[str]:
    parts: list[str] = []
    current: list[str] = []
    current_class = _OTHER
    for ch in chunk:
        cls = _char_class(ch)
        if cls != _OTHER and current_class != _OTHER and cls != current_class:
            parts.append("".join(current))
            current = []
        current.append(ch)
        if cls != _OTHER:
            current_class = cls
    if current:
        parts.append("".join(current))
    return parts


def tokenize(text: str) -> TokenSequence:
    """Split on whitespace, then at Han/kana vs Latin/digit boundaries.

    Joining the tokens with single separators loses no non-whitespace
    character of the input.
    """
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_scripts(chunk))
    return TokenSequence(tuple(tokens))


@dataclass(frozen=True)
class StopwordList:
    """Set of stopword tokens, stored in normalized form."""

    words: frozenset[str]
    source: str = "builtin"

    @classmethod
    def builtin(cls, config: NormalizationConfig = DEFAULT_CONFIG) -> StopwordList:
        return cls.from_words(BUILTIN_STOPWORDS, config=config, source="builtin")

    @classmethod
    def empty(cls) -> StopwordList:
        return cls(frozenset(), source="empty")

    @classmethod
    def from_words(
        cls,
        words,
        config: NormalizationConfig = DEFAULT_CONFIG,
        source: str = "inline",
    ) -> StopwordList:
        normalized = {normalize_text(w, config) for w in words}
        normalized.discard("")
        return cls(frozenset(normalized), source=source)

    @classmethod
    def load(cls, path: str, config: NormalizationConfig = DEFAULT_CONFIG) -> StopwordList:
        words = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                words.append(line)
        return cls.from_words(words, config=config, source=path)

    def __contains__(self, token: str) -> bool:
        return token in self.words


def remove_stopwords(tokens: TokenSequence, stopwords: StopwordList) -> TokenSequence:
    return TokenSequence(tuple(t for t in tokens if t not in stopwords))


@dataclass(frozen=True)
class ProcessedText:
    normalized_text: str
    tokens: TokenSequence


def preprocess(
    doc: CaseDocument,
    config: NormalizationConfig = DEFAULT_CONFIG,
    stopwords: StopwordList | None = None,
) -> ProcessedText:
    """Normalize, tokenize, and stopword-filter one document's text."""
    if stopwords is None:
        stopwords = StopwordList.builtin(config)
    normalized = normalize_text(doc.text, config)
    tokens = remove_stopwords(tokenize(normalized), stopwords)
    if len(tokens) == 0:
        raise EmptyAfterPreprocessing(doc.id)
    return ProcessedText(normalized_text=normalized, tokens=tokens)
