"""Command line front end.

Subcommands mirror the analysis workflows: corpus statistics, transcript
quality scoring, sentiment agreement evaluation, topic modelling per
question set, cross-dataset topic comparison, and synthetic noise
injection. Every command is a pure function of (config, inputs, seed):
running it twice writes byte-identical files.

Exit codes: 0 success, 1 usage/configuration error, 2 data error,
3 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import agreement, asr_eval, corpus, render, topic_compare, topics
from .config import RunConfig, apply_overrides, load_config
from .embeddings import EmbeddingMatrix, hash_embed_matrix, load_vectors
from .errors import ComputationError, ConfigError, DataError, SurveyTextError
from .hashing import derive_seed

DATASETS = ("manual", "automatic")


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _json_dump(payload: object, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _write_report(out_dir: Path, name: str, payload: dict, markdown: str, fmt: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt in ("json", "both"):
        _json_dump(payload, out_dir / f"{name}.json")
    if fmt in ("markdown", "both"):
        (out_dir / f"{name}.md").write_text(markdown, encoding="utf-8")


def _load_responses(config: RunConfig) -> list[corpus.Response]:
    path = config.require_path("responses_path")
    return corpus.ingest(path, config.responses_format)


def _tokenized(responses: Sequence[corpus.Response], stopwords: frozenset[str]):
    return [
        corpus.tokenize(corpus.normalize(r.raw_text), stopwords, response_id=r.id)
        for r in responses
    ]


def _select_dataset(
    responses: Sequence[corpus.Response], speech_source: str
) -> list[corpus.Response]:
    """Keyboard answers plus speech answers from one transcript source."""
    return [
        r
        for r in responses
        if (r.modality == "keyboard") or (r.transcript_source == speech_source)
    ]


# --- commands ----------------------------------------------------------------


def cmd_stats(config: RunConfig, fmt: str) -> int:
    stopwords = corpus.load_stopwords(config.require_path("stopwords_path"))
    responses = _select_dataset(_load_responses(config), config.stats_source)
    answers = _tokenized(responses, stopwords)
    modality_of = {r.id: r.modality for r in responses}
    stats = corpus.corpus_stats(answers, modality_of)
    _write_report(
        Path(config.output_dir) / "stats",
        "stats",
        render.stats_dict(stats),
        render.stats_markdown(stats),
        fmt,
    )
    return 0


def cmd_wer(config: RunConfig, fmt: str) -> int:
    responses = _load_responses(config)
    manual = {r.id: r for r in responses if r.transcript_source == "manual"}
    automatic = {r.id: r for r in responses if r.transcript_source == "automatic"}
    paired_ids = [rid for rid in manual if rid in automatic]
    unmatched = sorted(set(manual) ^ set(automatic))
    if not paired_ids:
        raise DataError("no id is present with both a manual and an automatic transcript")

    utterances = []
    for rid in paired_ids:
        ref = corpus.normalize(manual[rid].raw_text).split()
        hyp = corpus.normalize(automatic[rid].raw_text).split()
        utterances.append((rid, ref, hyp))
    report = asr_eval.wer(utterances)
    analysis = asr_eval.deletion_analysis(report)

    payload = render.wer_dict(report)
    payload["unmatched_ids"] = unmatched
    out_dir = Path(config.output_dir) / "wer"
    _write_report(out_dir, "wer", payload, render.wer_markdown({"automatic": report}), fmt)
    _write_report(
        out_dir, "deletions", render.deletions_dict(analysis),
        render.deletions_markdown(analysis), fmt,
    )
    for rid in unmatched:
        print(f"warning: id {rid!r} lacks its transcript counterpart", file=sys.stderr)
    return 0


def _load_ratings(path: str, label_set: tuple[str, ...]) -> dict[str, dict[str, str]]:
    import csv as _csv

    ratings: dict[str, dict[str, str]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = _csv.DictReader(fh)
        required = {"item_id", "rater_id", "label"}
        if reader.fieldnames is None or required - set(reader.fieldnames):
            raise DataError("ratings csv must have columns item_id, rater_id, label")
        for line_no, row in enumerate(reader, start=2):
            label = row["label"]
            if label not in label_set:
                raise DataError(
                    f"line {line_no}: label {label!r} is outside the declared label set"
                )
            ratings.setdefault(row["rater_id"], {})[row["item_id"]] = label
    if len(ratings) < 2:
        raise DataError("ratings file must contain at least 2 raters")
    return ratings


def cmd_sentiment_eval(config: RunConfig, fmt: str) -> int:
    ratings = _load_ratings(config.require_path("ratings_path"), config.label_set)
    responses = {r.id: r for r in _load_responses(config)}
    stopwords = corpus.load_stopwords(config.require_path("stopwords_path"))
    blocklist = corpus.load_blocklist(config.require_path("blocklist_path"))

    machine = config.machine_rater
    if machine is not None and machine not in ratings:
        raise DataError(f"designated machine rater {machine!r} not present in ratings")
    humans = {rater: marks for rater, marks in ratings.items() if rater != machine}
    if len(humans) < 2:
        raise DataError("need at least 2 human raters")

    all_items = sorted({item for marks in ratings.values() for item in marks})
    for item in all_items:
        if item not in responses:
            raise DataError(f"rated item {item!r} has no response record")

    # non-responses are never scored for sentiment
    tokenized = {
        item: corpus.tokenize(
            corpus.normalize(responses[item].raw_text), stopwords, response_id=item
        )
        for item in all_items
    }
    kept_answers = {
        a.response_id for a in corpus.filter_nonresponses(list(tokenized.values()), blocklist)
    }
    after_blocklist = [item for item in all_items if item in kept_answers]

    # question-level exclusion: a question mostly rated neutral carries no signal
    grouped: dict[str, list[list[str]]] = {}
    for item in after_blocklist:
        labels = [humans[r][item] for r in sorted(humans) if item in humans[r]]
        grouped.setdefault(responses[item].question_id, []).append(labels)
    excluded_questions = agreement.question_neutral_exclusion(
        grouped, config.neutral_pct, config.neutral_label, config.neutral_mode
    )
    excluded_pcts = []
    for question in excluded_questions:
        rows = grouped[question]
        neutral = sum(
            1 for labels in rows
            if (sum(lab == config.neutral_label for lab in labels) * 2 > len(labels))
            or (config.neutral_mode == "any" and config.neutral_label in labels)
        )
        excluded_pcts.append((question, 100.0 * neutral / len(rows)))
    items = [
        i for i in after_blocklist if responses[i].question_id not in excluded_questions
    ]

    kept, dropped = agreement.neutral_filter(
        humans, items, neutral_label=config.neutral_label
    )
    if not kept:
        raise ComputationError("no non-neutral items left to evaluate")

    report = agreement.evaluate_panel(
        ratings, kept, config.label_set,
        machine_rater=machine, neutral_label=config.neutral_label,
    )

    payload = {
        "n_items_rated": len(all_items),
        "n_items_after_blocklist": len(after_blocklist),
        "excluded_questions": [
            {"question_id": q, "pct_neutral": pct} for q, pct in excluded_pcts
        ],
        "n_dropped_neutral": len(dropped),
        "n_items_evaluated": report.n_items,
        "kappa_humans": report.kappa,
        "perfect_agreement_humans": report.perfect_agreement_count,
        "kappa_with_machine": report.kappa_with_machine,
        "perfect_agreement_with_machine": report.perfect_agreement_with_machine,
        "gold_ties": list(report.gold_ties),
        "prf": [
            {"label": label, "precision": p, "recall": r, "f1": f1}
            for label, p, r, f1 in report.per_label_prf
        ],
        "confusion": {f"{g}->{p}": count for g, p, count in report.confusion},
    }
    markdown = render.agreement_markdown(
        report.kappa, report.perfect_agreement_count, report.kappa_with_machine,
        report.perfect_agreement_with_machine, report.n_items, report.per_label_prf,
        excluded_pcts,
    )
    _write_report(Path(config.output_dir) / "sentiment-eval", "agreement", payload, markdown, fmt)
    return 0


def _answers_for_set(
    responses: Sequence[corpus.Response],
    question_ids: Sequence[str],
    speech_source: str,
    stopwords: frozenset[str],
):
    wanted = set(question_ids)
    selected = [
        r for r in _select_dataset(responses, speech_source) if r.question_id in wanted
    ]
    answers = _tokenized(selected, stopwords)
    return [a for a in answers if a.tokens]


def _vectors_for(config: RunConfig, answers) -> EmbeddingMatrix:
    if config.embedder == "hash":
        return hash_embed_matrix(answers, config.dim)
    matrix = load_vectors(config.require_path("vectors_path"))
    index = {id_: k for k, id_ in enumerate(matrix.ids)}
    missing = [a.response_id for a in answers if a.response_id not in index]
    if missing:
        raise DataError(f"vectors file lacks ids: {', '.join(missing[:5])}")
    rows = [index[a.response_id] for a in answers]
    return EmbeddingMatrix(
        ids=tuple(a.response_id for a in answers),
        dim=matrix.dim,
        vectors=matrix.vectors[rows],
        normalized=True,
    )


def cmd_topics(config: RunConfig, fmt: str, dataset: str) -> int:
    if dataset not in DATASETS:
        raise ConfigError(f"dataset must be one of {DATASETS}, got {dataset!r}")
    stopwords = corpus.load_stopwords(config.require_path("stopwords_path"))
    responses = _load_responses(config)
    out_dir = Path(config.output_dir) / "topics" / dataset
    failures = []
    for set_name, question_ids in config.question_sets.items():
        answers = _answers_for_set(responses, question_ids, dataset, stopwords)
        if not answers:
            print(f"warning: question set {set_name!r} selected no answers; skipped",
                  file=sys.stderr)
            continue
        vectors = _vectors_for(config, answers)
        try:
            sweep_record, model = topics.sweep(
                answers,
                vectors,
                sizes=range(config.sweep_min, config.sweep_max + 1),
                min_samples=config.min_samples,
                tfidf_variant=config.tfidf_variant,
                coherence_top_n=config.coherence_top_n,
                coherence_reference=config.coherence_reference,
                workers=config.workers,
            )
        except ComputationError as exc:
            failures.append((set_name, str(exc)))
            out_dir.mkdir(parents=True, exist_ok=True)
            _json_dump({"question_set": set_name, "dataset": dataset, "error": str(exc)},
                       out_dir / f"{set_name}.json")
            continue
        payload = {
            "question_set": set_name,
            "dataset": dataset,
            "config": config.echo(),
            "sweep": render.sweep_dict(sweep_record),
            "model": topics.model_to_dict(model),
        }
        _write_report(out_dir, set_name, payload,
                      render.topics_markdown(model, sweep_record), fmt)
    for set_name, message in failures:
        print(f"warning: question set {set_name!r}: {message}", file=sys.stderr)
    return 3 if failures else 0


def cmd_compare(config: RunConfig, fmt: str) -> int:
    responses = _load_responses(config)
    speech_ids = {
        qid: {r.id for r in responses if r.modality == "speech" and r.question_id == qid}
        for qids in config.question_sets.values()
        for qid in qids
    }
    out_root = Path(config.output_dir)
    reports: dict[str, topic_compare.TopicMatchReport] = {}
    payload: dict[str, object] = {}
    skipped: list[tuple[str, str]] = []
    for set_name, question_ids in config.question_sets.items():
        models = {}
        failed = None
        for dataset in DATASETS:
            path = out_root / "topics" / dataset / f"{set_name}.json"
            if not path.exists():
                raise DataError(f"missing topic model file {path}")
            data = json.loads(path.read_text(encoding="utf-8"))
            if "error" in data:
                failed = f"{dataset} model unavailable: {data['error']}"
                break
            models[dataset] = topics.model_from_dict(data["model"])
        if failed:
            skipped.append((set_name, failed))
            payload[set_name] = {"skipped": failed}
            continue
        comparison_ids = sorted(
            set().union(*(speech_ids[qid] for qid in question_ids))
            & set(models["manual"].answer_ids)
            & set(models["automatic"].answer_ids)
        )
        if not comparison_ids:
            skipped.append((set_name, "no shared speech-input answers"))
            payload[set_name] = {"skipped": "no shared speech-input answers"}
            continue
        report = topic_compare.match_models(
            models["manual"],
            models["automatic"],
            rho_threshold=config.rho_threshold,
            p_threshold=config.p_threshold,
            comparison_ids=comparison_ids,
            mode=config.spearman_mode,
        )
        reports[set_name] = report
        payload[set_name] = render.compare_dict(report)
    markdown = render.compare_markdown(reports)
    _write_report(out_root / "compare", "compare", payload, markdown, fmt)
    for set_name, reason in skipped:
        print(f"warning: question set {set_name!r} skipped: {reason}", file=sys.stderr)
    return 0


def cmd_noise(
    config: RunConfig,
    fmt: str,
    del_rate: float | None = None,
    sub_rate: float | None = None,
    ins_rate: float | None = None,
) -> int:
    responses = _load_responses(config)
    if any(r.transcript_source == "automatic" for r in responses):
        raise DataError("input already contains automatic transcripts")
    stopwords = corpus.load_stopwords(config.require_path("stopwords_path"))
    speech_manual = [r for r in responses if r.transcript_source == "manual"]
    vocab = tuple(
        sorted(
            {
                tok
                for r in speech_manual
                for tok in corpus.normalize(r.raw_text).split()
            }
        )
    )
    spec = corpus.NoiseSpec(
        del_rate=config.noise_del_rate if del_rate is None else del_rate,
        sub_rate=config.noise_sub_rate if sub_rate is None else sub_rate,
        ins_rate=config.noise_ins_rate if ins_rate is None else ins_rate,
        seed=derive_seed(config.seed, "corpus.inject_noise"),
        substitution_vocab=vocab,
    )
    noised: list[corpus.Response] = []
    for r in speech_manual:
        answer = corpus.tokenize(corpus.normalize(r.raw_text), stopwords, response_id=r.id)
        perturbed = corpus.inject_noise(answer, spec, stopwords)
        noised.append(
            corpus.Response(
                id=r.id,
                question_id=r.question_id,
                modality="speech",
                transcript_source="automatic",
                raw_text=" ".join(perturbed.tokens),
            )
        )
    out_dir = Path(config.output_dir) / "noise"
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus.write_jsonl(list(responses) + noised, str(out_dir / "responses.jsonl"))
    return 0


def cmd_all(config: RunConfig, fmt: str) -> int:
    steps: list[tuple[str, bool]] = [
        ("stats", config.responses_path is not None),
        ("wer", config.responses_path is not None),
        ("sentiment-eval", config.ratings_path is not None),
        ("topics", config.responses_path is not None),
        ("compare", config.responses_path is not None),
    ]
    status = 0
    for name, runnable in steps:
        if not runnable:
            print(f"skipping {name}: required input not configured", file=sys.stderr)
            continue
        if name == "topics":
            for dataset in DATASETS:
                status = max(status, cmd_topics(config, fmt, dataset))
        elif name == "stats":
            status = max(status, cmd_stats(config, fmt))
        elif name == "wer":
            status = max(status, cmd_wer(config, fmt))
        elif name == "sentiment-eval":
            status = max(status, cmd_sentiment_eval(config, fmt))
        elif name == "compare":
            status = max(status, cmd_compare(config, fmt))
    return status


def build_parser() -> _Parser:
    parser = _Parser(prog="surveytext", description=__doc__)
    parser.add_argument("--config", help="run configuration JSON file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument(
        "--format", choices=("json", "markdown", "both"), default="both",
        help="report formats to write",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("stats", help="per-modality corpus statistics")
    sub.add_parser("wer", help="manual-vs-automatic transcript quality")
    sub.add_parser("sentiment-eval", help="rater agreement and classifier scoring")
    topics_parser = sub.add_parser("topics", help="topic models per question set")
    topics_parser.add_argument("--dataset", choices=DATASETS, required=True)
    sub.add_parser("compare", help="match manual and automatic topic models")
    noise_parser = sub.add_parser("noise", help="inject synthetic transcription noise")
    noise_parser.add_argument("--del-rate", type=float, default=None)
    noise_parser.add_argument("--sub-rate", type=float, default=None)
    noise_parser.add_argument("--ins-rate", type=float, default=None)
    sub.add_parser("all", help="run every analysis configured")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = apply_overrides(load_config(args.config), args.seed, args.out)
        if args.command == "stats":
            return cmd_stats(config, args.format)
        if args.command == "wer":
            return cmd_wer(config, args.format)
        if args.command == "sentiment-eval":
            return cmd_sentiment_eval(config, args.format)
        if args.command == "topics":
            return cmd_topics(config, args.format, args.dataset)
        if args.command == "compare":
            return cmd_compare(config, args.format)
        if args.command == "noise":
            return cmd_noise(config, args.format, args.del_rate, args.sub_rate, args.ins_rate)
        if args.command == "all":
            return cmd_all(config, args.format)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return 3
    except SurveyTextError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
