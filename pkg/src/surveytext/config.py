"""Run configuration for the command line front end.

A run is described by one JSON file (every key optional) plus a few
command line overrides. Defaults reproduce the standard analysis setup:
the shipped Dutch stopword and non-response lists, the four default
question sets with their audio/keyboard id pairs, conservative topic
similarity thresholds, and the sweep range 2..50.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .errors import ConfigError

_QUESTION_ID = re.compile(r"^Q\d+$")

# question sets by their audio-side ids; keyboard ids come from the pairing table
_SET_AUDIO_IDS: dict[str, tuple[str, ...]] = {
    "democracy": ("Q13", "Q14", "Q15"),
    "europe": ("Q20", "Q21", "Q22"),
    "trust": ("Q27", "Q28", "Q29"),
    "marriage": ("Q34", "Q35", "Q36", "Q41", "Q42", "Q43"),
}

# sentiment evaluation uses the opinion-prompting questions of both modalities
SENTIMENT_AUDIO_IDS: tuple[str, ...] = ("Q13", "Q15", "Q20", "Q22", "Q29")


def _data_path(name: str) -> str:
    return str(resources.files("surveytext.data").joinpath(name))


def load_question_pairs(path: str | None = None) -> dict[str, str]:
    """Audio question id -> keyboard question id, from the pairing table."""
    pairs_path = path or _data_path("question_pairs.csv")
    pairs: dict[str, str] = {}
    with open(pairs_path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            pairs[row["audio_id"]] = row["keyboard_id"]
    return pairs


def default_question_sets() -> dict[str, list[str]]:
    pairs = load_question_pairs()
    return {
        name: [qid for audio in audio_ids for qid in (audio, pairs[audio])]
        for name, audio_ids in _SET_AUDIO_IDS.items()
    }


def default_sentiment_questions() -> list[str]:
    pairs = load_question_pairs()
    return [qid for audio in SENTIMENT_AUDIO_IDS for qid in (audio, pairs[audio])]


@dataclass(frozen=True)
class RunConfig:
    # input/output paths
    responses_path: str | None = None
    responses_format: str = "jsonl"
    ratings_path: str | None = None
    vectors_path: str | None = None
    stopwords_path: str = field(default_factory=lambda: _data_path("stopwords_nl.txt"))
    blocklist_path: str = field(default_factory=lambda: _data_path("blocklist_nl.txt"))
    output_dir: str = "out"
    # question selection
    question_sets: dict[str, list[str]] = field(default_factory=default_question_sets)
    sentiment_questions: list[str] = field(default_factory=default_sentiment_questions)
    # thresholds
    rho_threshold: float = 0.7
    p_threshold: float = 0.05
    neutral_pct: float = 50.0
    neutral_label: str = "neutral"
    neutral_mode: str = "majority"
    label_set: tuple[str, ...] = ("positive", "negative", "neutral")
    machine_rater: str | None = None
    # topic pipeline
    sweep_min: int = 2
    sweep_max: int = 50
    min_samples: int | None = None
    embedder: str = "hash"
    dim: int = 512
    tfidf_variant: str = "cluster"
    coherence_top_n: int = 20
    coherence_reference: str = "answers"
    spearman_mode: str = "union"
    workers: int = 1
    # noise defaults: the error profile of the best evaluated recognizer
    noise_del_rate: float = 0.1397
    noise_sub_rate: float = 0.0919
    noise_ins_rate: float = 0.0154
    # statistics
    stats_source: str = "manual"
    # determinism
    seed: int = 0

    def validate(self) -> None:
        if self.responses_format not in ("jsonl", "csv"):
            raise ConfigError(f"responses_format must be jsonl or csv, got {self.responses_format!r}")
        if not 2 <= self.sweep_min <= self.sweep_max <= 10_000:
            raise ConfigError(
                f"sweep range [{self.sweep_min}, {self.sweep_max}] must lie within [2, 10000]"
            )
        if self.embedder not in ("hash", "file"):
            raise ConfigError(f"embedder must be 'hash' or 'file', got {self.embedder!r}")
        if self.dim < 8:
            raise ConfigError(f"dim must be at least 8, got {self.dim}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.tfidf_variant not in ("cluster", "plain"):
            raise ConfigError(f"unknown tfidf_variant {self.tfidf_variant!r}")
        if self.coherence_reference not in ("answers", "clusters"):
            raise ConfigError(f"unknown coherence_reference {self.coherence_reference!r}")
        if self.spearman_mode not in ("union", "intersection"):
            raise ConfigError(f"unknown spearman_mode {self.spearman_mode!r}")
        if self.neutral_mode not in ("majority", "any"):
            raise ConfigError(f"unknown neutral_mode {self.neutral_mode!r}")
        if self.stats_source not in ("manual", "automatic"):
            raise ConfigError(f"stats_source must be manual or automatic, got {self.stats_source!r}")
        if self.neutral_label not in self.label_set:
            raise ConfigError("neutral_label must be part of label_set")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for name, qids in self.question_sets.items():
            for qid in qids:
                if not _QUESTION_ID.match(qid):
                    raise ConfigError(f"question id {qid!r} in set {name!r} must match Q<number>")
        for qid in self.sentiment_questions:
            if not _QUESTION_ID.match(qid):
                raise ConfigError(f"sentiment question id {qid!r} must match Q<number>")

    def require_path(self, attr: str) -> str:
        value = getattr(self, attr)
        if value is None:
            raise ConfigError(f"config is missing required path {attr!r}")
        if not Path(value).exists():
            raise ConfigError(f"{attr} {value!r} does not exist")
        return value

    def echo(self) -> dict:
        """The configuration as written into report files."""
        return {
            "seed": self.seed,
            "embedder": self.embedder,
            "dim": self.dim,
            "sweep": [self.sweep_min, self.sweep_max],
            "min_samples": self.min_samples,
            "tfidf_variant": self.tfidf_variant,
            "coherence_top_n": self.coherence_top_n,
            "coherence_reference": self.coherence_reference,
            "coherence_idf_counts_outliers": True,
            "spearman_mode": self.spearman_mode,
            "rho_threshold": self.rho_threshold,
            "p_threshold": self.p_threshold,
        }


_KEY_ALIASES = {
    "responses": "responses_path",
    "ratings": "ratings_path",
    "vectors": "vectors_path",
    "stopwords": "stopwords_path",
    "blocklist": "blocklist_path",
}


def load_config(path: str | None) -> RunConfig:
    """Read a config JSON file; unknown keys are configuration errors."""
    if path is None:
        config = RunConfig()
        config.validate()
        return config
    if not Path(path).exists():
        raise ConfigError(f"config file {path!r} does not exist")
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config file must hold a JSON object")

    flat: dict[str, object] = {}
    paths = payload.pop("paths", {})
    if not isinstance(paths, dict):
        raise ConfigError("'paths' must be an object")
    for key, value in paths.items():
        if key == "output_dir":
            flat["output_dir"] = value
        elif key in _KEY_ALIASES:
            flat[_KEY_ALIASES[key]] = value
        else:
            raise ConfigError(f"unknown path key {key!r}")
    for key, value in payload.items():
        if key == "label_set":
            value = tuple(value)
        if key not in RunConfig.__dataclass_fields__:
            raise ConfigError(f"unknown config key {key!r}")
        flat[key] = value

    try:
        config = RunConfig(**flat)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    config.validate()
    return config


def apply_overrides(
    config: RunConfig, seed: int | None = None, out: str | None = None
) -> RunConfig:
    if seed is not None:
        config = replace(config, seed=seed)
    if out is not None:
        config = replace(config, output_dir=out)
    config.validate()
    return config
