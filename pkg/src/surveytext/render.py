"""Markdown and JSON renderings of the analysis reports.

Markdown tables follow fixed column layouts so that reports from
different runs and datasets line up; numbers are rendered to two
decimals, undefined values as an en dash. All functions are pure
string/dict builders, which keeps command output byte-reproducible.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .asr_eval import DeletionAnalysis, WerReport
from .corpus import CorpusStats, ModalityStats
from .topic_compare import TopicMatchReport
from .topics import CoherenceSweep, TopicModel

DASH = "–"


def fmt2(value: float | None) -> str:
    return DASH if value is None else f"{value:.2f}"


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


# --- modality statistics -------------------------------------------------

_STAT_ROWS: tuple[tuple[str, str], ...] = (
    ("# responses", "response_count"),
    ("median # words", "median_words"),
    ("average # words", "mean_words"),
    ("max # words", "max_words"),
    ("total # words", "total_words"),
    ("median # content words", "median_content_words"),
    ("average # content words", "mean_content_words"),
    ("total # content words", "total_content_words"),
    ("percentage content words", "pct_content_words"),
)


def _stat_cell(stats: ModalityStats, attr: str) -> str:
    value = getattr(stats, attr)
    if attr == "pct_content_words":
        return DASH if value is None else f"{value:.2f}%"
    if attr in ("mean_words", "mean_content_words"):
        return fmt2(value)
    if attr in ("median_words", "median_content_words"):
        return f"{value:g}"
    return str(value)


def stats_markdown(stats: CorpusStats) -> str:
    modalities = ["speech", "keyboard"] + sorted(
        m for m in stats.by_modality if m not in ("speech", "keyboard")
    )
    header = [""] + [m.capitalize() for m in modalities]
    rows = []
    for label, attr in _STAT_ROWS:
        rows.append(
            [label] + [_stat_cell(stats.by_modality.get(m, ModalityStats()), attr) for m in modalities]
        )
    return _table(header, rows)


def stats_dict(stats: CorpusStats) -> dict:
    return {
        modality: {
            "response_count": s.response_count,
            "median_words": s.median_words,
            "mean_words": s.mean_words,
            "max_words": s.max_words,
            "total_words": s.total_words,
            "median_content_words": s.median_content_words,
            "mean_content_words": s.mean_content_words,
            "total_content_words": s.total_content_words,
            "pct_content_words": s.pct_content_words,
        }
        for modality, s in sorted(stats.by_modality.items())
    }


# --- word error rate -----------------------------------------------------


def wer_markdown(reports: Mapping[str, WerReport]) -> str:
    header = ["Label", "WER", "subs", "del", "ins"]
    rows = [
        [label, fmt2(r.wer), fmt2(r.sub_rate), fmt2(r.del_rate), fmt2(r.ins_rate)]
        for label, r in reports.items()
    ]
    return _table(header, rows)


def wer_dict(report: WerReport) -> dict:
    return {
        "wer": report.wer,
        "sub_rate": report.sub_rate,
        "del_rate": report.del_rate,
        "ins_rate": report.ins_rate,
        "substitutions": report.S,
        "deletions": report.D,
        "insertions": report.I,
        "correct": report.C,
        "n_ref": report.n_ref,
        "per_utterance": [
            {"id": rid, "S": r.S, "D": r.D, "I": r.I, "C": r.C, "n_ref": r.n_ref}
            for rid, r in report.per_utterance
        ],
    }


def deletions_markdown(analysis: DeletionAnalysis) -> str:
    lines = [
        f"Top {analysis.top_k} deletions cover "
        f"{fmt2(analysis.top_deletions[-1][2] if analysis.top_deletions else 0.0)}% "
        f"of {analysis.total_deletions} deletions; "
        f"{fmt2(analysis.monosyllabic_top_share)}% of them are monosyllabic.",
        "",
        _table(
            ["Deleted token", "Count", "Cumulative %"],
            [[tok, str(count), fmt2(pct)] for tok, count, pct in analysis.top_deletions],
        ),
        f"Deleted words missing from all recognizer output: "
        f"{fmt2(analysis.deleted_oov_pct)}% of distinct deleted words "
        f"({fmt2(analysis.oov_share_of_all_deletions)}% of deletion instances).",
        f"Substituted reference words missing from all recognizer output: "
        f"{fmt2(analysis.substituted_ref_oov_pct)}% of distinct substituted words "
        f"({fmt2(analysis.oov_share_of_all_substitutions)}% of substitution instances).",
    ]
    return "\n".join(lines) + "\n"


def deletions_dict(analysis: DeletionAnalysis) -> dict:
    return {
        "top_deletions": [
            {"token": tok, "count": count, "cumulative_pct": pct}
            for tok, count, pct in analysis.top_deletions
        ],
        "top_k": analysis.top_k,
        "total_deletions": analysis.total_deletions,
        "total_substitutions": analysis.total_substitutions,
        "monosyllabic_top_share": analysis.monosyllabic_top_share,
        "deleted_oov_pct": analysis.deleted_oov_pct,
        "substituted_ref_oov_pct": analysis.substituted_ref_oov_pct,
        "oov_share_of_all_deletions": analysis.oov_share_of_all_deletions,
        "oov_share_of_all_substitutions": analysis.oov_share_of_all_substitutions,
    }


# --- rater agreement ------------------------------------------------------


def agreement_markdown(
    kappa_humans: float,
    perfect_humans: int,
    kappa_with_machine: float | None,
    perfect_with_machine: int | None,
    n_items: int,
    prf_rows: Sequence[tuple[str, float | None, float | None, float | None]],
    excluded_questions: Sequence[tuple[str, float]] = (),
) -> str:
    lines = [
        f"Human raters: kappa = {kappa_humans:.2f}, "
        f"perfect agreement on {perfect_humans} of {n_items} answers.",
    ]
    if kappa_with_machine is not None:
        lines.append(
            f"Humans plus automatic rater: kappa = {kappa_with_machine:.2f}, "
            f"perfect agreement on {perfect_with_machine} of {n_items} answers."
        )
    if excluded_questions:
        lines.append("")
        lines.append("Questions excluded for predominantly neutral answers:")
        for question, pct in excluded_questions:
            lines.append(f"- {question}: {fmt2(pct)}% neutral")
    lines.append("")
    lines.append(
        _table(
            ["Label", "Precision", "Recall", "F1"],
            [
                [label.capitalize(), fmt2(p), fmt2(r), fmt2(f1)]
                for label, p, r, f1 in prf_rows
            ],
        )
    )
    return "\n".join(lines)


# --- topics ---------------------------------------------------------------


def topics_markdown(model: TopicModel, sweep: CoherenceSweep | None = None, k: int = 5) -> str:
    lines = [
        f"{model.n_topics} topics over {model.m_total_answers} answers "
        f"({len(model.outlier_ids)} outliers), minimum cluster size "
        f"{model.min_cluster_size}"
        + (f", u_mass coherence {model.coherence_umass:.4f}." if model.coherence_umass is not None else "."),
        "",
        _table(
            ["Topic", "Size", f"Top {k} words"],
            [
                [str(t.topic_id), str(len(t.member_ids)), ", ".join(t.top_terms(k))]
                for t in model.topics
            ],
        ),
    ]
    if sweep is not None:
        lines.append(
            _table(
                ["Min cluster size", "# topics", "u_mass"],
                [
                    [str(size), str(n), DASH if score is None else f"{score:.4f}"]
                    for size, n, score in sweep.evaluated
                ],
            )
        )
    return "\n".join(lines)


def sweep_dict(sweep: CoherenceSweep) -> dict:
    return {
        "selected_min_cluster_size": sweep.selected,
        "evaluated": [
            {"min_cluster_size": size, "n_topics": n, "coherence_umass": score}
            for size, n, score in sweep.evaluated
        ],
    }


# --- topic comparison ------------------------------------------------------


def compare_markdown(reports: Mapping[str, TopicMatchReport]) -> str:
    header = [
        "Answer set",
        "# topics manual",
        "# topics automatic",
        "# topics similar",
        "% texts in similar cluster",
    ]
    rows = [
        [
            name.capitalize(),
            str(r.n_topics_a),
            str(r.n_topics_b),
            str(r.n_similar),
            f"{r.pct_texts_similar:.0f}%",
        ]
        for name, r in reports.items()
    ]
    return _table(header, rows)


def compare_dict(report: TopicMatchReport) -> dict:
    return {
        "n_topics_manual": report.n_topics_a,
        "n_topics_automatic": report.n_topics_b,
        "n_similar": report.n_similar,
        "n_similar_pairs_raw": report.n_similar_pairs_raw,
        "pct_texts_similar": report.pct_texts_similar,
        "pct_texts_similar_nonoutlier": report.pct_texts_similar_nonoutlier,
        "n_comparison_answers": report.n_comparison_answers,
        "rho_threshold": report.rho_threshold,
        "p_threshold": report.p_threshold,
        "matched": [list(pair) for pair in report.matched],
        "unmatched_manual": list(report.unmatched_a),
        "unmatched_automatic": list(report.unmatched_b),
        "pairs": [
            {
                "topic_manual": p.topic_a,
                "topic_automatic": p.topic_b,
                "rho": p.rho,
                "p": p.p,
                "n_union": p.n_union,
                "similar": p.similar,
            }
            for p in report.pairs
        ],
    }
