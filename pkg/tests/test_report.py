from __future__ import annotations

import json
import re
from datetime import datetime, timezone
from pathlib import Path

import pytest

from dxsim.analysis import FeatureOverlap, TermWeight
from dxsim.corpus import CaseDocument, Corpus
from dxsim.errors import MisalignedOverlaps, UnknownId
from dxsim.report import (
    build_query_report,
    build_report,
    format_score,
    render_report,
    report_to_dict,
)
from dxsim.similarity import RankedMatch, SimilarityFilters

GOLDEN_PATH = Path(__file__).parent / "data" / "golden_report.txt"
FIXED_TIME = datetime(2025, 1, 15, 12, 0, 0, tzinfo=timezone.utc)
SCORE_SHAPE = re.compile(r"^-?[01]\.\d{6}$")


def corpus3() -> Corpus:
    return Corpus(
        [
            CaseDocument(id="t", company="TargetCo", industry="Manufacturing", sub_industry="pharma", year=2021, text="ai"),
            CaseDocument(id="b", company="BevCo", industry="Manufacturing", sub_industry="beverage", year=2021, text="ai rpa"),
            CaseDocument(id="c", company="ChemCo", industry="Manufacturing", sub_industry="chemical", year=2022, text="ai cloud"),
        ]
    )


def overlap(a: str, b: str, *terms: str) -> FeatureOverlap:
    return FeatureOverlap(
        doc_a=a, doc_b=b, shared_terms=tuple(TermWeight(t, 0.5) for t in terms), jaccard=0.25
    )


def sample_report(score_b=0.954170, score_c=0.951046):
    matches = [RankedMatch("b", score_b, 1), RankedMatch("c", score_c, 2)]
    overlaps = [overlap("t", "b", "ai", "platform"), overlap("t", "c", "ai")]
    return build_report(
        "t",
        matches,
        overlaps,
        corpus3(),
        filters=SimilarityFilters(),
        backend_fingerprint="hashed:seed=42:dim=256",
        generated_at=FIXED_TIME,
    )


class TestBuildReport:
    def test_rows_follow_rank_order(self):
        report = sample_report()
        assert [r.doc_id for r in report.rows] == ["b", "c"]
        assert [r.rank for r in report.rows] == [1, 2]
        assert report.target.id == "t"
        assert report.target.sub_industry == "pharma"

    def test_unknown_target(self):
        with pytest.raises(UnknownId):
            build_report(
                "zz",
                [],
                [],
                corpus3(),
                filters=SimilarityFilters(),
                backend_fingerprint="fp",
            )

    def test_overlap_count_mismatch(self):
        matches = [RankedMatch("b", 0.9, 1)]
        with pytest.raises(MisalignedOverlaps):
            build_report("t", matches, [], corpus3(), filters=SimilarityFilters(), backend_fingerprint="fp")

    def test_overlap_wrong_pairing(self):
        matches = [RankedMatch("b", 0.9, 1)]
        bad = [overlap("t", "c", "ai")]  # pairs target with the wrong doc
        with pytest.raises(MisalignedOverlaps):
            build_report("t", matches, bad, corpus3(), filters=SimilarityFilters(), backend_fingerprint="fp")

    def test_empty_matches_allowed(self):
        report = build_report("t", [], [], corpus3(), filters=SimilarityFilters(), backend_fingerprint="fp")
        assert report.rows == ()


class TestRender:
    def test_six_decimal_scores_in_text(self):
        text = render_report(sample_report(), "text").decode("utf-8")
        assert "0.954170" in text
        assert "0.951046" in text

    def test_score_one_renders_fixed_width(self):
        assert format_score(1.0) == "1.000000"
        assert format_score(0.0) == "0.000000"
        assert format_score(-0.25) == "-0.250000"

    def test_score_shape_regex(self):
        for value in (1.0, 0.9541695, -0.000001, 0.5, -1.0):
            assert SCORE_SHAPE.match(format_score(value)), value

    def test_json_round_trip(self):
        report = sample_report()
        parsed = json.loads(render_report(report, "json").decode("utf-8"))
        assert parsed == report_to_dict(report)
        assert parsed["matches"][0]["score"] == 0.954170
        assert parsed["generated_at"] == "2025-01-15T12:00:00+00:00"

    def test_json_keeps_full_precision(self):
        score = 0.12345678901234567
        report = sample_report(score_b=score)
        parsed = json.loads(render_report(report, "json").decode("utf-8"))
        assert parsed["matches"][0]["score"] == score

    def test_markdown_row_count(self):
        md = render_report(sample_report(), "markdown").decode("utf-8")
        data_rows = [l for l in md.splitlines() if l.startswith("| ") and not l.startswith("| Rank") and not l.startswith("| ---")]
        assert len(data_rows) == 2

    def test_empty_report_has_marker(self):
        report = build_report("t", [], [], corpus3(), filters=SimilarityFilters(), backend_fingerprint="fp")
        text = render_report(report, "text").decode("utf-8")
        assert "no eligible matches" in text

    def test_row_order_consistent_across_formats(self):
        report = sample_report()
        js = json.loads(render_report(report, "json").decode("utf-8"))
        md = render_report(report, "markdown").decode("utf-8")
        text = render_report(report, "text").decode("utf-8")
        assert [m["company"] for m in js["matches"]] == ["BevCo", "ChemCo"]
        assert md.index("BevCo") < md.index("ChemCo")
        assert text.index("BevCo") < text.index("ChemCo")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render_report(sample_report(), "pdf")


class TestQueryReport:
    def test_target_has_no_corpus_identity(self):
        report = build_query_report(
            "what-if query",
            [RankedMatch("b", 0.7, 1)],
            [overlap("(what-if)", "b", "ai")],
            corpus3(),
            filters=SimilarityFilters(),
            backend_fingerprint="fp",
            generated_at=FIXED_TIME,
        )
        payload = report_to_dict(report)
        assert payload["target"]["id"] is None
        assert payload["target"]["company"] == "what-if query"
        text = render_report(report, "text").decode("utf-8")
        assert "what-if" in text


class TestGolden:
    def test_text_report_is_byte_identical_to_golden(self, fixture_corpus, fixture_embeddings):
        from dxsim.preprocess import StopwordList, preprocess
        from dxsim.analysis import common_features, extract_terms
        from dxsim.similarity import top_k_similar

        stopwords = StopwordList.builtin()
        term_store = {
            doc.id: extract_terms(preprocess(doc, stopwords=stopwords)) for doc in fixture_corpus
        }
        matches = top_k_similar("pharma-a", fixture_embeddings, fixture_corpus, SimilarityFilters(), k=2)
        overlaps = [
            common_features("pharma-a", m.doc_id, fixture_corpus, term_store, 6) for m in matches
        ]
        report = build_report(
            "pharma-a",
            matches,
            overlaps,
            fixture_corpus,
            filters=SimilarityFilters(),
            backend_fingerprint=fixture_embeddings.backend_fingerprint,
            generated_at=FIXED_TIME,
        )
        rendered = render_report(report, "text")
        assert rendered == GOLDEN_PATH.read_bytes()
