"""Transcript quality scoring: edit alignment, WER and error breakdowns.

Reference transcripts (manually corrected) are aligned token by token
against hypothesis transcripts (raw recognizer output) with a minimal
unit-cost edit alignment, and the substitution/deletion/insertion
counts are pooled into a corpus word error rate. The deletion analysis
digs into what the recognizer drops: the most frequent deletions, how
many of them are monosyllables, and how many error tokens never occur
anywhere in the recognizer's output at all.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import ComputationError

CORRECT = "correct"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"


@dataclass(frozen=True)
class AlignmentResult:
    """Token-level edit alignment between one reference and one hypothesis.

    ``ops`` replays the reference into the hypothesis left to right;
    counts satisfy C + S + D = len(ref) and C + S + I = len(hyp).
    """

    ops: tuple[tuple[str, str | None, str | None], ...]
    S: int
    D: int
    I: int
    C: int
    n_ref: int

    @property
    def edit_count(self) -> int:
        return self.S + self.D + self.I


def align(ref: Sequence[str], hyp: Sequence[str]) -> AlignmentResult:
    """Minimal unit-cost edit alignment of hypothesis against reference.

    Dynamic programming with cost 0 for a match and 1 for substitute,
    delete (reference token lost) and insert (spurious hypothesis
    token). When several alignments are minimal the backtrace prefers,
    at every step, correct over substitute over delete over insert, so
    the emitted op sequence is identical across implementations.
    """
    n, m = len(ref), len(hyp)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row = dist[i]
        prev = dist[i - 1]
        r = ref[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (0 if r == hyp[j - 1] else 1)
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)

    ops: list[tuple[str, str | None, str | None]] = []
    i, j = n, m
    while i > 0 or j > 0:
        d = dist[i][j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dist[i - 1][j - 1] == d:
            ops.append((CORRECT, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and ref[i - 1] != hyp[j - 1] and dist[i - 1][j - 1] + 1 == d:
            ops.append((SUBSTITUTE, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i - 1][j] + 1 == d:
            ops.append((DELETE, ref[i - 1], None))
            i -= 1
        else:
            ops.append((INSERT, None, hyp[j - 1]))
            j -= 1
    ops.reverse()

    counts = Counter(op[0] for op in ops)
    return AlignmentResult(
        ops=tuple(ops),
        S=counts[SUBSTITUTE],
        D=counts[DELETE],
        I=counts[INSERT],
        C=counts[CORRECT],
        n_ref=n,
    )


@dataclass(frozen=True)
class WerReport:
    """Pooled word error rate with the per-utterance alignments retained."""

    per_utterance: tuple[tuple[str, AlignmentResult], ...]
    S: int
    D: int
    I: int
    C: int
    n_ref: int

    @property
    def wer(self) -> float:
        return 100.0 * (self.S + self.D + self.I) / self.n_ref

    @property
    def sub_rate(self) -> float:
        return 100.0 * self.S / self.n_ref

    @property
    def del_rate(self) -> float:
        return 100.0 * self.D / self.n_ref

    @property
    def ins_rate(self) -> float:
        return 100.0 * self.I / self.n_ref


def wer(per_utterance: Sequence[tuple[str, Sequence[str], Sequence[str]]]) -> WerReport:
    """Pool alignments over utterances into a corpus WER.

    Pooled WER = 100 * (S + D + I) / total reference length. An empty
    reference against a non-empty hypothesis contributes pure
    insertions, so the pooled WER may exceed 100%. A corpus whose
    references are all empty has no defined WER.
    """
    results = tuple((rid, align(ref, hyp)) for rid, ref, hyp in per_utterance)
    total_ref = sum(r.n_ref for _, r in results)
    if total_ref == 0:
        raise ComputationError("WER undefined: all reference transcripts are empty")
    return WerReport(
        per_utterance=results,
        S=sum(r.S for _, r in results),
        D=sum(r.D for _, r in results),
        I=sum(r.I for _, r in results),
        C=sum(r.C for _, r in results),
        n_ref=total_ref,
    )


_VOWELS = frozenset("aeiouy")


def syllable_count(token: str) -> int:
    """Estimate syllables as maximal vowel runs, with Dutch "ij" as one nucleus.

    Tokens without any vowel run count as one syllable. This is a rough
    heuristic meant only to separate monosyllables from longer words.
    """
    collapsed = token.replace("ij", "\x00")
    runs = 0
    in_run = False
    for ch in collapsed:
        if ch in _VOWELS or ch == "\x00":
            if not in_run:
                runs += 1
                in_run = True
        else:
            in_run = False
    return max(runs, 1)


@dataclass(frozen=True)
class DeletionAnalysis:
    """What the recognizer drops and mangles, corpus-wide.

    ``top_deletions`` ranks deleted reference tokens by count with the
    cumulative share of all deletion instances. The *oov* figures look
    up error tokens in the full concatenated hypothesis text: a deleted
    or substituted reference word is out-of-vocabulary when it occurs
    nowhere in anything the recognizer produced.
    """

    top_deletions: tuple[tuple[str, int, float], ...]
    top_k: int
    total_deletions: int
    total_substitutions: int
    monosyllabic_top_share: float
    deleted_oov_pct: float
    substituted_ref_oov_pct: float
    oov_share_of_all_deletions: float
    oov_share_of_all_substitutions: float


def deletion_analysis(report: WerReport, top_k: int = 25) -> DeletionAnalysis:
    """Rank deletions and measure hypothesis-vocabulary coverage of errors."""
    deleted: Counter[str] = Counter()
    substituted: Counter[str] = Counter()
    hyp_vocab: set[str] = set()
    for _, result in report.per_utterance:
        for kind, ref_tok, hyp_tok in result.ops:
            if hyp_tok is not None:
                hyp_vocab.add(hyp_tok)
            if kind == DELETE:
                deleted[ref_tok] += 1
            elif kind == SUBSTITUTE:
                substituted[ref_tok] += 1

    total_del = sum(deleted.values())
    total_sub = sum(substituted.values())

    ranked = sorted(deleted.items(), key=lambda kv: (-kv[1], kv[0]))[:top_k]
    top: list[tuple[str, int, float]] = []
    running = 0
    for token, count in ranked:
        running += count
        top.append((token, count, 100.0 * running / total_del))

    mono_share = (
        100.0 * sum(1 for token, _, _ in top if syllable_count(token) == 1) / len(top)
        if top
        else 0.0
    )

    def oov_stats(counter: Counter[str]) -> tuple[float, float]:
        if not counter:
            return 0.0, 0.0
        oov_types = [tok for tok in counter if tok not in hyp_vocab]
        type_pct = 100.0 * len(oov_types) / len(counter)
        instance_pct = 100.0 * sum(counter[tok] for tok in oov_types) / sum(counter.values())
        return type_pct, instance_pct

    del_type_pct, del_instance_pct = oov_stats(deleted)
    sub_type_pct, sub_instance_pct = oov_stats(substituted)

    return DeletionAnalysis(
        top_deletions=tuple(top),
        top_k=top_k,
        total_deletions=total_del,
        total_substitutions=total_sub,
        monosyllabic_top_share=mono_share,
        deleted_oov_pct=del_type_pct,
        substituted_ref_oov_pct=sub_type_pct,
        oov_share_of_all_deletions=del_instance_pct,
        oov_share_of_all_substitutions=sub_instance_pct,
    )
