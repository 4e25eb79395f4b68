"""Workspace builders shared by the command line and acceptance tests.

Everything written here is fully deterministic so that golden-file
comparisons and run-twice byte checks are meaningful.
"""

from __future__ import annotations

import json
from pathlib import Path

from conftest import planted_responses
from surveytext.corpus import Response, write_jsonl

# hand-checked corpus: WER = 4/13 (S=2 via "nee hoor"->"geen idee",
# D=1 "zat", I=1 "wel"); speech totals 13 words / 7 content words
SMALL_CORPUS = [
    Response("s1", "Q13", "speech", "manual", "De kat zat op de mat."),
    Response("s1", "Q13", "speech", "automatic", "de kat op de mat"),
    Response("s2", "Q15", "speech", "manual", "Ik vind het prima zo."),
    Response("s2", "Q15", "speech", "automatic", "ik vind het wel prima zo"),
    Response("s3", "Q15", "speech", "manual", "Nee hoor."),
    Response("s3", "Q15", "speech", "automatic", "geen idee"),
    Response("k1", "Q16", "keyboard", "typed", "Prima geregeld allemaal."),
    Response("k2", "Q16", "keyboard", "typed", "Geen mening."),
]

SENTIMENT_TEXTS_Q15 = {
    "a1": "Heel goed geregeld dit.",
    "a2": "Prachtig initiatief, echt fijn.",
    "a3": "Waardeloos systeem, bagger.",
    "a4": "Best aardig gedaan.",
    "a5": "Gaat wel, denk ik.",
    "a6": "Ik weet het niet.",  # blocklisted non-response
}

# humans reproduce the (3,0)/(3,0)/(0,3)/(2,1) kappa=0.625 fixture on a1..a4;
# a5 is neutral-filtered, a6 blocklisted, Q13 is 75% majority-neutral
SENTIMENT_HUMAN_LABELS = {
    "a1": ("positive", "positive", "positive"),
    "a2": ("positive", "positive", "positive"),
    "a3": ("negative", "negative", "negative"),
    "a4": ("positive", "positive", "negative"),
    "a5": ("positive", "neutral", "positive"),
    "a6": ("neutral", "neutral", "neutral"),
    "b1": ("neutral", "neutral", "neutral"),
    "b2": ("neutral", "neutral", "positive"),
    "b3": ("neutral", "neutral", "neutral"),
    "b4": ("positive", "positive", "positive"),
}

SENTIMENT_AUTO_LABELS = {
    "a1": "positive", "a2": "negative", "a3": "negative", "a4": "positive",
    "a5": "negative", "a6": "negative",
    "b1": "negative", "b2": "positive", "b3": "negative", "b4": "positive",
}


def write_small_corpus(work: Path) -> Path:
    path = work / "small.jsonl"
    write_jsonl(SMALL_CORPUS, str(path))
    return path


def write_sentiment_inputs(work: Path) -> tuple[Path, Path]:
    responses = [
        Response(rid, "Q15", "keyboard", "typed", text)
        for rid, text in SENTIMENT_TEXTS_Q15.items()
    ] + [Response(f"b{i}", "Q13", "keyboard", "typed", f"kenmerk nummer {i}") for i in range(1, 5)]
    responses_path = work / "sent_responses.jsonl"
    write_jsonl(responses, str(responses_path))

    rows = ["item_id,rater_id,label"]
    for item, labels in SENTIMENT_HUMAN_LABELS.items():
        for rater, label in zip(("h1", "h2", "h3"), labels):
            rows.append(f"{item},{rater},{label}")
        rows.append(f"{item},auto,{SENTIMENT_AUTO_LABELS[item]}")
    ratings_path = work / "ratings.csv"
    ratings_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return responses_path, ratings_path


def write_planted_corpus(work: Path) -> Path:
    path = work / "planted.jsonl"
    write_jsonl(planted_responses("Q13"), str(path))
    return path


def write_config(work: Path, **overrides) -> Path:
    payload: dict = {"paths": {"output_dir": str(work / "out")}}
    for key, value in overrides.items():
        if key in ("responses", "ratings", "vectors", "stopwords", "blocklist", "output_dir"):
            payload["paths"][key] = str(value)
        else:
            payload[key] = value
    path = work / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path
