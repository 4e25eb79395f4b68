from __future__ import annotations

import itertools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from surveytext.corpus import Response, TokenizedAnswer

# Three topics with fully disjoint vocabularies; every answer is a distinct
# 3-subset of the topic's tail words plus two core words, so the embedded
# cloud has no duplicate points and clusters cleanly at small sizes.
PLANTED_VOCAB: dict[str, list[str]] = {
    "democracy": ["stemmen", "verkiezingen", "vrijheid", "parlement", "kiezen",
                  "regering", "inspraak", "wetten"],
    "europe": ["unie", "munt", "euro", "grenzen", "samenwerking", "verdrag",
               "brussel", "reizen"],
    "trust": ["vertrouwen", "eerlijk", "beloften", "afspraken", "betrouwbaar",
              "liegen", "oprecht", "nakomen"],
}

PLANTED_MIN_SAMPLES = 5  # decoupled: at mcs=20 a 20-member topic has no 20th in-topic neighbour


def planted_answers(n_per_topic: int = 20) -> tuple[list[TokenizedAnswer], list[int]]:
    answers: list[TokenizedAnswer] = []
    truth: list[int] = []
    for t_idx, (name, words) in enumerate(PLANTED_VOCAB.items()):
        core, rest = words[:2], words[2:]
        subsets = list(itertools.combinations(range(len(rest)), 3))[:n_per_topic]
        for i, subset in enumerate(subsets):
            tokens = tuple(core + [rest[k] for k in subset])
            answers.append(
                TokenizedAnswer(
                    response_id=f"{name}-{i:02d}",
                    tokens=tokens,
                    content_flags=(True,) * len(tokens),
                )
            )
            truth.append(t_idx)
    return answers, truth


def planted_responses(question_id: str = "Q13") -> list[Response]:
    """The planted answers as a speech-input response corpus with manual
    transcripts, for end-to-end command tests."""
    answers, _ = planted_answers()
    return [
        Response(
            id=ans.response_id,
            question_id=question_id,
            modality="speech",
            transcript_source="manual",
            raw_text=" ".join(ans.tokens),
        )
        for ans in answers
    ]


@pytest.fixture()
def planted():
    return planted_answers()


@pytest.fixture()
def planted_corpus():
    return planted_responses()


# --- acceptance reporting -------------------------------------------------
# every test in test_acceptance.py is one acceptance criterion; print one
# pass/fail line per criterion at the end of the run

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].removeprefix("test_")
    if report.when == "call":
        _ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and (report.failed or report.skipped):
        _ACCEPTANCE_RESULTS[name] = "SKIP" if report.skipped else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"  {outcome}  {name}")
