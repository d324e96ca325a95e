"""Assemble match results into self-describing reports and render them.

Text and markdown outputs are aligned ranking tables with scores fixed at six
decimal places; JSON keeps full float precision because display rounding must
never leak into downstream tooling. Reports echo the filters and backend
fingerprint that produced them, so any report can be reproduced exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone

from dxsim.analysis import FeatureOverlap
from dxsim.corpus import Corpus
from dxsim.errors import MisalignedOverlaps
from dxsim.similarity import RankedMatch, SimilarityFilters

RENDER_FORMATS = ("text", "json", "markdown")


@dataclass(frozen=True)
class ReportTarget:
    id: str | None
    company: str | None
    sub_industry: str | None


@dataclass(frozen=True)
class ReportRow:
    doc_id: str
    rank: int
    company: str
    industry: str
    sub_industry: str
    score: float
    common_features: tuple[str, ...]


@dataclass(frozen=True)
class AnalysisReport:
    target: ReportTarget
    rows: tuple[ReportRow, ...]
    filters: SimilarityFilters
    backend_fingerprint: str
    generated_at: datetime


def format_score(score: float) -> str:
    """Exactly six decimals, round-half-to-even."""
    return f"{score:.6f}"


def build_report(
    target_id: str,
    matches: list[RankedMatch],
    overlaps: list[FeatureOverlap],
    corpus: Corpus,
    filters: SimilarityFilters,
    backend_fingerprint: str,
    generated_at: datetime | None = None,
) -> AnalysisReport:
    """One row per match, in rank order, with that match's shared terms.

    overlaps[i] must pair the target with matches[i]; anything else raises
    MisalignedOverlaps.
    """
    target = corpus.get_case(target_id)
    if len(overlaps) != len(matches):
        raise MisalignedOverlaps(f"{len(matches)} matches but {len(overlaps)} overlaps")
    rows = []
    for match, overlap in zip(matches, overlaps):
        if {overlap.doc_a, overlap.doc_b} != {target_id, match.doc_id}:
            raise MisalignedOverlaps(
                f"overlap ({overlap.doc_a!r}, {overlap.doc_b!r}) does not pair "
                f"target {target_id!r} with match {match.doc_id!r}"
            )
        rows.append(_row_for_match(match, overlap, corpus))
    return AnalysisReport(
        target=ReportTarget(id=target.id, company=target.company, sub_industry=target.sub_industry),
        rows=tuple(rows),
        filters=filters,
        backend_fingerprint=backend_fingerprint,
        generated_at=generated_at or datetime.now(timezone.utc),
    )


def build_query_report(
    query_label: str,
    matches: list[RankedMatch],
    overlaps: list[FeatureOverlap],
    corpus: Corpus,
    filters: SimilarityFilters,
    backend_fingerprint: str,
    generated_at: datetime | None = None,
) -> AnalysisReport:
    """Report for an ad-hoc text query; the target has no corpus identity."""
    if len(overlaps) != len(matches):
        raise MisalignedOverlaps(f"{len(matches)} matches but {len(overlaps)} overlaps")
    rows = tuple(
        _row_for_match(match, overlap, corpus) for match, overlap in zip(matches, overlaps)
    )
    return AnalysisReport(
        target=ReportTarget(id=None, company=query_label, sub_industry=None),
        rows=rows,
        filters=filters,
        backend_fingerprint=backend_fingerprint,
        generated_at=generated_at or datetime.now(timezone.utc),
    )


def _row_for_match(match: RankedMatch, overlap: FeatureOverlap, corpus: Corpus) -> ReportRow:
    doc = corpus.get_case(match.doc_id)
    return ReportRow(
        doc_id=doc.id,
        rank=match.rank,
        company=doc.company,
        industry=doc.industry,
        sub_industry=doc.sub_industry,
        score=match.score,
        common_features=tuple(tw.term for tw in overlap.shared_terms),
    )


def report_to_dict(report: AnalysisReport) -> dict:
    """Lossless mapping used for the JSON render and the HTTP responses."""
    filters = report.filters
    return {
        "target": {
            "id": report.target.id,
            "company": report.target.company,
            "sub_industry": report.target.sub_industry,
        },
        "matches": [
            {
                "id": row.doc_id,
                "rank": row.rank,
                "company": row.company,
                "industry": row.industry,
                "sub_industry": row.sub_industry,
                "score": row.score,
                "common_features": list(row.common_features),
            }
            for row in report.rows
        ],
        "filters": {
            "exclude_company_of_target": filters.exclude_company_of_target,
            "exclude_same_sub_industry": filters.exclude_same_sub_industry,
            "exclude_same_industry": filters.exclude_same_industry,
            "min_score": filters.min_score,
            "allowed_years": sorted(filters.allowed_years) if filters.allowed_years else None,
            "exclude_company": filters.exclude_company,
            "exclude_sub_industry": filters.exclude_sub_industry,
            "exclude_industry": filters.exclude_industry,
        },
        "backend_fingerprint": report.backend_fingerprint,
        "generated_at": report.generated_at.isoformat(),
    }


def _text_table(report: AnalysisReport) -> str:
    header = ["Rank", "Company", "Industry", "Cos Similarity", "Common Features"]
    rows = [
        [
            str(row.rank),
            row.company,
            row.industry,
            format_score(row.score),
            ", ".join(row.common_features),
        ]
        for row in report.rows
    ]
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i]) for i in range(5)]
    lines = []
    target_label = report.target.id if report.target.id is not None else "(what-if query)"
    lines.append(f"Similar cases for target: {target_label} ({report.target.company})")
    lines.append("")
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip())
    lines.append("  ".join("-" * widths[i] for i in range(5)))
    if rows:
        for r in rows:
            lines.append("  ".join(r[i].ljust(widths[i]) for i in range(5)).rstrip())
    else:
        lines.append("(no eligible matches)")
    lines.append("")
    lines.append(f"backend: {report.backend_fingerprint}")
    lines.append(f"filters: {_filters_summary(report.filters)}")
    lines.append(f"generated_at: {report.generated_at.isoformat()}")
    return "\n".join(lines) + "\n"


def _markdown_table(report: AnalysisReport) -> str:
    target_label = report.target.id if report.target.id is not None else "(what-if query)"
    lines = [
        f"## Similar cases for target: {target_label} ({report.target.company})",
        "",
        "| Rank | Company | Industry | Cos Similarity | Common Features |",
        "| --- | --- | --- | --- | --- |",
    ]
    for row in report.rows:
        features = ", ".join(row.common_features)
        lines.append(
            f"| {row.rank} | {row.company} | {row.industry} | {format_score(row.score)} | {features} |"
        )
    if not report.rows:
        lines.append("| - | (no eligible matches) | - | - | - |")
    lines.extend(
        [
            "",
            f"- backend: `{report.backend_fingerprint}`",
            f"- filters: {_filters_summary(report.filters)}",
            f"- generated_at: {report.generated_at.isoformat()}",
        ]
    )
    return "\n".join(lines) + "\n"


def _filters_summary(filters: SimilarityFilters) -> str:
    parts = [
        f"exclude_company_of_target={filters.exclude_company_of_target}",
        f"exclude_same_sub_industry={filters.exclude_same_sub_industry}",
        f"exclude_same_industry={filters.exclude_same_industry}",
    ]
    if filters.min_score is not None:
        parts.append(f"min_score={filters.min_score}")
    if filters.allowed_years:
        parts.append(f"allowed_years={sorted(filters.allowed_years)}")
    for label, value in (
        ("exclude_company", filters.exclude_company),
        ("exclude_sub_industry", filters.exclude_sub_industry),
        ("exclude_industry", filters.exclude_industry),
    ):
        if value is not None:
            parts.append(f"{label}={value}")
    return " ".join(parts)


def render_report(report: AnalysisReport, format: str = "text") -> bytes:
    if format == "json":
        return (json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if format == "text":
        return _text_table(report).encode("utf-8")
    if format == "markdown":
        return _markdown_table(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")
