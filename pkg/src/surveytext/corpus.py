"""Response corpora: ingestion, normalization, tokenization and statistics.

A corpus is a flat list of answers to open survey questions. Each answer
arrives through one input modality (spoken or typed) and, for spoken
answers, as either a raw automatic transcript or a manually corrected
one. The functions here are all pure: same input, same output, so
per-answer work can be parallelized freely.
"""

from __future__ import annotations

import csv
import json
import unicodedata
from dataclasses import dataclass, field
from statistics import median
from typing import Iterable, Mapping, Sequence

from .errors import DataError
from .hashing import SplitMix64, fnv1a64

MODALITIES = ("speech", "keyboard")
TRANSCRIPT_SOURCES = ("automatic", "manual", "typed")


@dataclass(frozen=True)
class Response:
    """One answer to one question, as it arrived.

    ``modality`` is the input channel; ``transcript_source`` says where
    the text came from. Typed answers are always their own transcript,
    spoken answers are either raw recognizer output or a manual
    correction of it.
    """

    id: str
    question_id: str
    modality: str
    transcript_source: str
    raw_text: str

    def __post_init__(self) -> None:
        if self.modality not in MODALITIES:
            raise DataError(f"unknown modality {self.modality!r} for response {self.id!r}")
        if self.transcript_source not in TRANSCRIPT_SOURCES:
            raise DataError(
                f"unknown transcript_source {self.transcript_source!r} for response {self.id!r}"
            )
        if self.modality == "keyboard" and self.transcript_source != "typed":
            raise DataError(f"keyboard response {self.id!r} must have transcript_source=typed")
        if self.modality == "speech" and self.transcript_source == "typed":
            raise DataError(
                f"speech response {self.id!r} must have transcript_source automatic or manual"
            )


@dataclass(frozen=True)
class TokenizedAnswer:
    """Normalized token sequence of one answer plus per-token content flags."""

    response_id: str
    tokens: tuple[str, ...]
    content_flags: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.content_flags):
            raise DataError(f"answer {self.response_id!r}: flags do not match tokens")
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise DataError(f"answer {self.response_id!r}: empty or whitespace token {tok!r}")

    @property
    def n_words(self) -> int:
        return len(self.tokens)

    @property
    def n_content_words(self) -> int:
        return sum(self.content_flags)


@dataclass(frozen=True)
class ModalityStats:
    response_count: int = 0
    median_words: float = 0.0
    mean_words: float = 0.0
    max_words: int = 0
    total_words: int = 0
    median_content_words: float = 0.0
    mean_content_words: float = 0.0
    total_content_words: int = 0
    pct_content_words: float | None = None  # None when total_words == 0


@dataclass(frozen=True)
class CorpusStats:
    """Word-count statistics per input modality."""

    by_modality: dict[str, ModalityStats]


@dataclass(frozen=True)
class NoiseSpec:
    """Synthetic transcription noise: per-token deletion/substitution rates
    and a per-gap insertion rate, with a seeded deterministic stream."""

    del_rate: float
    sub_rate: float
    ins_rate: float
    seed: int
    substitution_vocab: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("del_rate", "sub_rate", "ins_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise DataError(f"{name} must be in [0, 1], got {rate}")
        if self.del_rate + self.sub_rate > 1.0:
            raise DataError("del_rate + sub_rate must not exceed 1")
        if not 0 <= self.seed < 2**64:
            raise DataError("seed must be an unsigned 64-bit integer")
        if (self.sub_rate > 0 or self.ins_rate > 0) and not self.substitution_vocab:
            raise DataError("substitution_vocab required when sub_rate or ins_rate > 0")


_REQUIRED_FIELDS = ("id", "question_id", "modality", "transcript_source", "text")


def _response_from_record(record: Mapping[str, object], line_no: int) -> Response:
    missing = [key for key in _REQUIRED_FIELDS if record.get(key) is None]
    if missing:
        raise DataError(f"line {line_no}: missing field(s) {', '.join(missing)}")
    return Response(
        id=str(record["id"]),
        question_id=str(record["question_id"]),
        modality=str(record["modality"]),
        transcript_source=str(record["transcript_source"]),
        raw_text=str(record["text"]),
    )


def ingest(path: str, format: str = "jsonl") -> list[Response]:
    """Read a responses file (one answer per record) in input order.

    The same answer id may appear once per transcript source (a spoken
    answer has a manual and an automatic transcript); a repeated
    (id, transcript_source) pair is an error.
    """
    if format not in ("jsonl", "csv"):
        raise DataError(f"unknown responses format {format!r}")
    responses: list[Response] = []
    seen: set[tuple[str, str]] = set()

    if format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
                if not isinstance(record, dict):
                    raise DataError(f"line {line_no}: expected a JSON object")
                responses.append(_response_from_record(record, line_no))
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or set(_REQUIRED_FIELDS) - set(reader.fieldnames):
                raise DataError(f"csv header must contain {', '.join(_REQUIRED_FIELDS)}")
            for line_no, record in enumerate(reader, start=2):
                responses.append(_response_from_record(record, line_no))

    for resp in responses:
        key = (resp.id, resp.transcript_source)
        if key in seen:
            raise DataError(f"duplicate response id {resp.id!r} for source {resp.transcript_source!r}")
        seen.add(key)
    return responses


def write_jsonl(responses: Iterable[Response], path: str) -> None:
    """Write responses in the same JSONL schema ``ingest`` reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for resp in responses:
            fh.write(
                json.dumps(
                    {
                        "id": resp.id,
                        "question_id": resp.question_id,
                        "modality": resp.modality,
                        "transcript_source": resp.transcript_source,
                        "text": resp.raw_text,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def _is_letter(ch: str) -> bool:
    return unicodedata.category(ch).startswith("L")


def _is_digit(ch: str) -> bool:
    return unicodedata.category(ch) == "Nd"


def normalize(raw_text: str) -> str:
    """Normalize raw answer text into a canonical lowercase form.

    The exact rules, in order, so any reimplementation agrees byte for
    byte: NFC; lowercase; every character that is not a letter, decimal
    digit, apostrophe (U+0027), hyphen-minus or whitespace becomes one
    space; apostrophes and hyphens survive only between two letters
    (judged on the string before any removals, in one pass); whitespace
    runs collapse to single spaces; leading/trailing space is stripped.
    """
    text = unicodedata.normalize("NFC", raw_text).lower()
    replaced = []
    for ch in text:
        if _is_letter(ch) or _is_digit(ch) or ch in "'-" or ch.isspace():
            replaced.append(ch)
        else:
            replaced.append(" ")
    kept = []
    for i, ch in enumerate(replaced):
        if ch in "'-":
            before = replaced[i - 1] if i > 0 else ""
            after = replaced[i + 1] if i + 1 < len(replaced) else ""
            if not (before and _is_letter(before) and after and _is_letter(after)):
                continue
        kept.append(ch)
    return " ".join("".join(kept).split())


def tokenize(normalized: str, stopwords: frozenset[str] | set[str] = frozenset(),
             response_id: str = "") -> TokenizedAnswer:
    """Split normalized text on spaces and flag content words.

    A token is a content word when it is not a stopword and contains at
    least one letter; a digits-only token is never a content word.
    """
    tokens = tuple(normalized.split(" ")) if normalized else ()
    flags = tuple(
        tok not in stopwords and any(_is_letter(ch) for ch in tok) for tok in tokens
    )
    return TokenizedAnswer(response_id=response_id, tokens=tokens, content_flags=flags)


def parse_pattern(pattern: str) -> tuple[tuple[str, bool], ...]:
    """Parse a non-response pattern into (token, optional) items.

    Tokens are space-separated; ``(tok)`` marks an optional token.
    """
    items: list[tuple[str, bool]] = []
    for piece in pattern.split():
        optional = piece.startswith("(") and piece.endswith(")")
        token = piece[1:-1] if optional else piece
        if not token or "(" in token or ")" in token:
            raise DataError(f"malformed pattern token {piece!r} in {pattern!r}")
        items.append((token, optional))
    if not items:
        raise DataError("empty non-response pattern")
    return tuple(items)


def _matches(items: Sequence[tuple[str, bool]], tokens: Sequence[str]) -> bool:
    if not items:
        return not tokens
    token, optional = items[0]
    if tokens and tokens[0] == token and _matches(items[1:], tokens[1:]):
        return True
    return optional and _matches(items[1:], tokens)


def filter_nonresponses(
    answers: Sequence[TokenizedAnswer], blocklist: Sequence[str]
) -> list[TokenizedAnswer]:
    """Drop answers whose full token sequence matches a blocklist pattern.

    Matching is exact over the whole sequence (optional tokens may be
    present or absent); answers merely containing a pattern are kept.
    """
    parsed = [parse_pattern(p) for p in blocklist]
    return [ans for ans in answers if not any(_matches(p, ans.tokens) for p in parsed)]


def corpus_stats(
    answers: Sequence[TokenizedAnswer], modality_of: Mapping[str, str]
) -> CorpusStats:
    """Per-modality word-count statistics over tokenized answers."""
    groups: dict[str, list[TokenizedAnswer]] = {m: [] for m in MODALITIES}
    for ans in answers:
        modality = modality_of.get(ans.response_id)
        if modality is None:
            raise DataError(f"no modality known for response {ans.response_id!r}")
        groups.setdefault(modality, []).append(ans)

    by_modality: dict[str, ModalityStats] = {}
    for modality, group in groups.items():
        if not group:
            by_modality[modality] = ModalityStats()
            continue
        words = [ans.n_words for ans in group]
        content = [ans.n_content_words for ans in group]
        total_words = sum(words)
        total_content = sum(content)
        by_modality[modality] = ModalityStats(
            response_count=len(group),
            median_words=float(median(words)),
            mean_words=total_words / len(group),
            max_words=max(words),
            total_words=total_words,
            median_content_words=float(median(content)),
            mean_content_words=total_content / len(group),
            total_content_words=total_content,
            pct_content_words=(100.0 * total_content / total_words) if total_words else None,
        )
    return CorpusStats(by_modality=by_modality)


def inject_noise(
    answer: TokenizedAnswer,
    spec: NoiseSpec,
    stopwords: frozenset[str] | set[str] = frozenset(),
) -> TokenizedAnswer:
    """Apply synthetic deletion/substitution/insertion noise to one answer.

    The random stream is ``splitmix64`` seeded with
    ``spec.seed XOR fnv1a64(response_id)`` and is consumed in document
    order: for every gap g = 0..n (one before each token plus one at the
    end) first one float draw decides insertion (one extra index draw
    picks the inserted token from the whole vocabulary), then for token
    g (< n) one float draw decides delete (u < del_rate) versus
    substitute (del_rate <= u < del_rate + sub_rate) versus keep, with
    one extra index draw over the vocabulary minus the original token
    choosing the replacement. If the vocabulary offers no token other
    than the original, the token stays. Fixed inputs give a bit-identical
    output on every platform.

    Content flags of kept tokens are preserved; substituted and inserted
    tokens are flagged against ``stopwords``.
    """
    rng = SplitMix64((spec.seed ^ fnv1a64(answer.response_id)) & (2**64 - 1))
    vocab = spec.substitution_vocab
    out_tokens: list[str] = []
    out_flags: list[bool] = []

    def flag_for(token: str) -> bool:
        return token not in stopwords and any(_is_letter(ch) for ch in token)

    n = len(answer.tokens)
    for i in range(n + 1):
        if rng.next_float() < spec.ins_rate:
            inserted = vocab[rng.next_index(len(vocab))]
            out_tokens.append(inserted)
            out_flags.append(flag_for(inserted))
        if i == n:
            break
        token = answer.tokens[i]
        u = rng.next_float()
        if u < spec.del_rate:
            continue
        if u < spec.del_rate + spec.sub_rate:
            choices = [t for t in vocab if t != token]
            if choices:
                replacement = choices[rng.next_index(len(choices))]
                out_tokens.append(replacement)
                out_flags.append(flag_for(replacement))
            else:
                out_tokens.append(token)
                out_flags.append(answer.content_flags[i])
            continue
        out_tokens.append(token)
        out_flags.append(answer.content_flags[i])

    return TokenizedAnswer(
        response_id=answer.response_id,
        tokens=tuple(out_tokens),
        content_flags=tuple(out_flags),
    )


def load_stopwords(path: str) -> frozenset[str]:
    """Read a stopword file: UTF-8, one already-normalized token per line."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


def load_blocklist(path: str) -> list[str]:
    """Read a non-response pattern file, one pattern per line."""
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]
