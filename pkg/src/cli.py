#!/usr/bin/env python3
"""
premise-forge command-line interface.

Usage:
    premise-forge extract --in questions.jsonl --out premises.jsonl
    premise-forge generate --in questions.jsonl --out qa.jsonl --threshold 0.9
    premise-forge build-qrpe --in questions.jsonl --objects objects.jsonl \\
        --attributes attributes.jsonl --features images.pfv --out tuples.jsonl
    premise-forge train --kind RelQP --in examples.jsonl --questions questions.jsonl \\
        --features images.pfv --model relqp.pmlp
    premise-forge eval --model relqp.pmlp --in test_examples.jsonl --questions questions.jsonl \\
        --features images.pfv
    premise-forge explain --model fpd.pmlp --features images.pfv --image-id 7 \\
        --text "What color is the cat's tie?"
    premise-forge stats --answer-types qa.jsonl
    premise-forge augment --in qa.jsonl --source questions.jsonl --strategy top1k-a --out merged.jsonl
    premise-forge nearest --in questions.jsonl --embeddings words.txt --text "Is the dog old?"

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from .annotation_store import AnnotationStore, load_annotations
from .augmentation import (
    answer_type_distribution,
    apply_strategy,
    merge_training_set,
    source_answers,
)
from .config import PipelineConfig, get_config
from .corpus_io import read_captions, read_jsonl, read_questions, write_jsonl
from .errors import ConfigError, EmptyDatasetError, PremiseForgeError
from .explanation import explain_question
from .features import EmbeddingTable, FeatureStore
from .lexicon import load_resources
from .premise_extraction import extract_premises
from .premise_qgen import generate_for_corpus
from .qrpe_builder import (
    build_dataset,
    dataset_stats,
    fpd_examples,
    nearest_question,
    pair_distance_histogram,
    random_pairs,
    relevance_examples,
    tuple_pairs,
)
from .relevance_nn import (
    LAYOUTS,
    EncodingContext,
    encode_examples,
    evaluate,
    fit_encoding_spec,
    load_model,
    save_model,
    train,
)
from .reports import (
    format_answer_type_report,
    format_dataset_report,
    format_distance_comparison,
    format_evaluation_report,
)
from .schemas import (
    EncoderMode,
    ModelKind,
    PremiseRecord,
    QAPair,
    QrpeTuple,
    Question,
    RelevanceExample,
    Strategy,
)

logger = logging.getLogger("premise_forge")

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageExitParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on bad arguments."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _setup_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _progress() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TimeElapsedColumn(),
        console=err_console,
        transient=True,
    )


def _write_text(path: Optional[str], text: str) -> None:
    if path is None:
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text + "\n", encoding="utf-8")
    console.print(f"[dim]Saved to: {target}[/dim]")


def _require(value: Optional[Path], flag: str) -> Path:
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


def _load_features(config: PipelineConfig) -> FeatureStore:
    path = _require(config.corpus.features, "--features")
    return FeatureStore.load(path, normalize=config.corpus.normalize_features)


def _load_store(config: PipelineConfig) -> AnnotationStore:
    return load_annotations(
        config.corpus.objects,
        config.corpus.attributes,
        lexicon_path=config.resources.exclusion,
        aliases_path=config.resources.aliases,
        classes_path=config.resources.classes,
    )


def _questions_from(args: argparse.Namespace) -> List[Question]:
    if getattr(args, "text", None):
        return [Question(question_id=0, image_id=args.image_id or 0, text=args.text)]
    path = getattr(args, "in_path", None) or getattr(args, "questions", None)
    if path is None:
        raise ConfigError("--in or --text is required")
    return read_questions(path)


# -- subcommands -----------------------------------------------------------


def cmd_extract(args: argparse.Namespace, config: PipelineConfig) -> int:
    resources = load_resources(config.resources)
    questions = read_questions(args.in_path)
    records = [
        PremiseRecord(
            question_id=q.question_id,
            image_id=q.image_id,
            premises=extract_premises(q, strict=args.strict, resources=resources),
        )
        for q in questions
    ]
    write_jsonl(args.out, records)

    orders: Dict[int, int] = {1: 0, 2: 0, 3: 0}
    for record in records:
        for premise in record.premises:
            orders[int(premise.order)] += 1
    table = Table(title="Premise Extraction")
    table.add_column("Questions", justify="right")
    table.add_column("With premises", justify="right")
    table.add_column("First", justify="right")
    table.add_column("Second", justify="right")
    table.add_column("Third", justify="right")
    table.add_row(
        str(len(records)),
        str(sum(1 for r in records if r.premises)),
        str(orders[1]),
        str(orders[2]),
        str(orders[3]),
    )
    console.print(table)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace, config: PipelineConfig) -> int:
    resources = load_resources(config.resources)
    questions = read_questions(args.in_path)
    pairs = generate_for_corpus(questions, config.generation.dedup_threshold, resources)
    write_jsonl(args.out, pairs)
    console.print(format_answer_type_report(answer_type_distribution(pairs)), markup=False, highlight=False)
    return EXIT_OK


def cmd_build_qrpe(args: argparse.Namespace, config: PipelineConfig) -> int:
    resources = load_resources(config.resources)
    questions = _questions_from(args)
    store = _load_store(config)
    features = _load_features(config)

    with _progress() as progress:
        task = progress.add_task("Building tuples...", total=len(questions))
        tuples = build_dataset(
            questions,
            store,
            features,
            strict=args.strict,
            workers=config.workers,
            resources=resources,
            on_question=lambda _q: progress.update(task, advance=1),
        )

    write_jsonl(args.out, tuples)
    stats = dataset_stats(tuples, questions)
    report = format_dataset_report(stats, tuples)
    console.print(report, markup=False, highlight=False)
    _write_text(args.out_stats, report)

    if args.examples_out:
        captions = read_captions(config.corpus.captions) if config.corpus.captions else None
        write_jsonl(args.examples_out, relevance_examples(tuples, captions))
    if args.fpd_out:
        write_jsonl(args.fpd_out, fpd_examples(tuples))
    return EXIT_OK


def _encoding_context(
    kind: ModelKind, config: PipelineConfig, questions_path: Optional[str]
) -> EncodingContext:
    layout = LAYOUTS[kind]
    questions: Dict[int, Question] = {}
    if "q" in layout or ("p" in layout and kind != ModelKind.FPD):
        path = _require(Path(questions_path) if questions_path else None, "--questions")
        questions = {q.question_id: q for q in read_questions(path)}
    return EncodingContext(
        questions=questions,
        features=_load_features(config) if "i" in layout else None,
        captions=read_captions(config.corpus.captions) if config.corpus.captions else {},
        embeddings=EmbeddingTable.load(config.corpus.embeddings) if config.corpus.embeddings else None,
        resources=load_resources(config.resources),
    )


def cmd_train(args: argparse.Namespace, config: PipelineConfig) -> int:
    kind = ModelKind(args.kind)
    examples = read_jsonl(args.in_path, RelevanceExample)
    if not examples:
        raise EmptyDatasetError()
    context = _encoding_context(kind, config, args.questions)
    layout = LAYOUTS[kind]
    mode = EncoderMode(args.question_mode)
    if mode == EncoderMode.MEAN_EMBEDDING and context.embeddings is None:
        raise ConfigError("--question-mode embedding needs --embeddings")

    question_ids = sorted({e.question_id for e in examples})
    texts = [context.question(qid).text for qid in question_ids] if "q" in layout else []
    if kind == ModelKind.FPD:
        premise_lists = [[e.premise] for e in examples if e.premise is not None]
    elif "p" in layout:
        premise_lists = [context.premises_of(qid) for qid in question_ids]
    else:
        premise_lists = []
    captions = (
        [e.caption or context.captions.get(e.image_id, "") for e in examples] if "c" in layout else []
    )
    spec = fit_encoding_spec(
        texts,
        premise_lists,
        image_dim=context.features.dim if context.features is not None else 0,
        question_mode=mode,
        embeddings=context.embeddings,
        captions=captions,
        caption_mode=mode if "c" in layout else None,
    )
    data = encode_examples(kind, spec, examples, context)

    with _progress() as progress:
        task = progress.add_task("Training...", total=config.training.epochs)

        def on_epoch(epoch: int, loss: float) -> None:
            progress.update(task, advance=1, description=f"Epoch {epoch} loss {loss:.4f}")

        model, log = train(data.X, data.y, config.training, config.seed, on_epoch=on_epoch)

    save_model(args.model, model, kind, spec, config.training.threshold)

    table = Table(title=f"Training ({kind.value})")
    table.add_column("Examples", justify="right")
    table.add_column("Input dim", justify="right")
    table.add_column("Final loss", justify="right")
    table.add_column("Train accuracy", justify="right")
    table.add_row(
        str(len(data)),
        str(model.input_dim),
        f"{log.epoch_losses[-1]:.4f}",
        f"{log.final_accuracy * 100:.2f}%",
    )
    console.print(table)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: PipelineConfig) -> int:
    model, card = load_model(args.model)
    examples = read_jsonl(args.in_path, RelevanceExample)
    context = _encoding_context(card.kind, config, args.questions)
    data = encode_examples(card.kind, card.spec, examples, context)
    threshold = args.threshold if args.threshold is not None else card.threshold
    report = evaluate(model, data.X, data.y, data.orders, threshold)
    console.print(format_evaluation_report(report, card.kind), markup=False, highlight=False)
    if args.out:
        _write_text(args.out, report.model_dump_json(indent=2))
    return EXIT_OK


def cmd_explain(args: argparse.Namespace, config: PipelineConfig) -> int:
    questions = _questions_from(args)
    resources = load_resources(config.resources)
    model = card = features = store = None
    if args.model:
        model, card = load_model(args.model)
        if card.kind != ModelKind.FPD:
            raise ConfigError(f"explain needs an FPD model, got {card.kind.value}")
        features = _load_features(config)
    else:
        store = _load_store(config)

    lines: List[str] = []
    for question in questions:
        result = explain_question(
            question,
            image_id=question.image_id,
            image=features.vector(question.image_id) if features is not None else None,
            model=model,
            spec=card.spec if card is not None else None,
            store=store,
            threshold=card.threshold if card is not None else 0.5,
            resources=resources,
        )
        if args.jsonl:
            lines.extend(
                json.dumps(e.model_dump(mode="json"), ensure_ascii=False)
                for e in result.explanations
            )
        else:
            lines.extend(result.to_lines())

    if args.out:
        _write_text(args.out, "\n".join(lines))
    else:
        for line in lines:
            print(line)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace, config: PipelineConfig) -> int:
    if not (args.answer_types or args.tuples):
        raise ConfigError("stats needs --answer-types or --tuples")
    sections: List[str] = []
    if args.answer_types:
        pairs = read_jsonl(args.answer_types, QAPair)
        sections.append(format_answer_type_report(answer_type_distribution(pairs)))
    if args.tuples:
        tuples = read_jsonl(args.tuples, QrpeTuple)
        questions = read_questions(args.questions) if args.questions else None
        sections.append(format_dataset_report(dataset_stats(tuples, questions), tuples))
        if args.histogram:
            features = _load_features(config)
            selected = pair_distance_histogram(tuple_pairs(tuples), features, args.bucket_width)
            baseline = pair_distance_histogram(
                random_pairs(tuples, features.image_ids, config.seed), features, args.bucket_width
            )
            sections.append(format_distance_comparison(selected, baseline))
            _write_text(args.histogram, selected.to_text() + "\n\n" + baseline.to_text())
    report = "\n\n".join(sections)
    console.print(report, markup=False, highlight=False)
    _write_text(args.out, report)
    return EXIT_OK


def cmd_augment(args: argparse.Namespace, config: PipelineConfig) -> int:
    generated = read_jsonl(args.in_path, QAPair)
    source = read_questions(args.source)
    selected = apply_strategy(generated, source_answers(source), Strategy(args.strategy))
    merged = merge_training_set(source, selected)
    write_jsonl(args.out, merged)

    table = Table(title=f"Augmentation ({args.strategy})")
    table.add_column("Source", justify="right")
    table.add_column("Generated", justify="right")
    table.add_column("Selected", justify="right")
    table.add_column("Merged", justify="right")
    table.add_row(str(len(source)), str(len(generated)), str(len(selected)), str(len(merged)))
    console.print(table)
    return EXIT_OK


def cmd_nearest(args: argparse.Namespace, config: PipelineConfig) -> int:
    corpus = read_questions(args.in_path)
    if not corpus:
        raise EmptyDatasetError()
    embeddings = EmbeddingTable.load(_require(config.corpus.embeddings, "--embeddings"))
    query = Question(question_id=0, image_id=0, text=args.text)
    best = nearest_question(query, corpus, embeddings)
    match = next(q for q in corpus if q.question_id == best)
    print(f"{best}\t{match.text}")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file (overrides PREMISE_FORGE_CONFIG)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More log output")
    parser.add_argument("--seed", type=int, help="Root random seed")


def _add_corpus(parser: argparse.ArgumentParser, *names: str) -> None:
    helps = {
        "objects": "Object annotations JSONL",
        "attributes": "Attribute annotations JSONL",
        "lexicon": "Exclusion lexicon (antonyms and sister terms)",
        "features": "Image feature file (PFV1)",
        "embeddings": "Word embedding table",
        "captions": "Image captions JSONL",
    }
    for name in names:
        parser.add_argument(f"--{name}", help=helps[name])


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(
        prog="premise-forge",
        description="Question premises, QRPE datasets and relevance classifiers",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageExitParser)

    p = sub.add_parser("extract", help="Extract premises from questions")
    _add_common(p)
    p.add_argument("--in", dest="in_path", required=True, help="Questions JSONL")
    p.add_argument("--out", required=True, help="Premises JSONL")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True,
                   help="Skip existential and counting questions (default: on)")
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("generate", help="Generate premise QA pairs")
    _add_common(p)
    p.add_argument("--in", dest="in_path", required=True, help="Questions JSONL")
    p.add_argument("--out", required=True, help="QA pairs JSONL")
    p.add_argument("--threshold", type=float, help="SPICE F1 dedup threshold (default 0.9)")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("build-qrpe", help="Build (I+, Q, P, I-) tuples")
    _add_common(p)
    p.add_argument("--in", "--questions", dest="in_path", help="Questions JSONL")
    p.add_argument("--text", help="Single question text instead of --in")
    p.add_argument("--image-id", type=int, help="Image of --text")
    _add_corpus(p, "objects", "attributes", "lexicon", "features", "captions")
    p.add_argument("--normalize", action="store_true", default=None, help="L2-normalize features")
    p.add_argument("--strict", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--workers", type=int, help="Worker threads")
    p.add_argument("--out", required=True, help="Tuples JSONL")
    p.add_argument("--out-stats", help="Write the dataset report here")
    p.add_argument("--examples-out", help="Write relevance examples JSONL here")
    p.add_argument("--fpd-out", help="Write false-premise examples JSONL here")
    p.set_defaults(handler=cmd_build_qrpe)

    p = sub.add_parser("train", help="Train a relevance or false-premise classifier")
    _add_common(p)
    p.add_argument("--kind", required=True, choices=[k.value for k in ModelKind])
    p.add_argument("--in", dest="in_path", required=True, help="Examples JSONL")
    p.add_argument("--questions", help="Questions JSONL")
    _add_corpus(p, "features", "embeddings", "captions")
    p.add_argument("--normalize", action="store_true", default=None, help="L2-normalize features")
    p.add_argument("--question-mode", default=EncoderMode.BAG_OF_WORDS.value,
                   choices=[m.value for m in EncoderMode])
    p.add_argument("--model", required=True, help="Output model file")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch", type=int)
    p.add_argument("--optimizer", choices=["sgd", "adam"])
    p.add_argument("--hidden", help="Hidden layer sizes, e.g. 64 or 64,32")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", help="Evaluate a classifier")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="in_path", required=True, help="Examples JSONL")
    p.add_argument("--questions", help="Questions JSONL")
    _add_corpus(p, "features", "embeddings", "captions")
    p.add_argument("--normalize", action="store_true", default=None, help="L2-normalize features")
    p.add_argument("--threshold", type=float, help="Decision threshold (default from model)")
    p.add_argument("--out", help="Write the report as JSON here")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("explain", help="Explain false premises of questions")
    _add_common(p)
    p.add_argument("--in", dest="in_path", help="Questions JSONL")
    p.add_argument("--text", help="Single question text instead of --in")
    p.add_argument("--image-id", type=int, help="Image of --text")
    p.add_argument("--model", help="FPD model; ground-truth annotations are used without one")
    _add_corpus(p, "objects", "attributes", "lexicon", "features")
    p.add_argument("--normalize", action="store_true", default=None, help="L2-normalize features")
    p.add_argument("--jsonl", action="store_true", help="Emit JSONL explanation records")
    p.add_argument("--out", help="Output file (default stdout)")
    p.set_defaults(handler=cmd_explain)

    p = sub.add_parser("stats", help="Report distributions and distance histograms")
    _add_common(p)
    p.add_argument("--answer-types", help="QA pairs JSONL")
    p.add_argument("--tuples", help="Tuples JSONL")
    p.add_argument("--questions", help="Questions JSONL with split labels")
    p.add_argument("--histogram", help="Write pair distance histograms here (needs --features)")
    p.add_argument("--bucket-width", type=float, default=1.0)
    _add_corpus(p, "features")
    p.add_argument("--normalize", action="store_true", default=None, help="L2-normalize features")
    p.add_argument("--out", help="Write the report here")
    p.set_defaults(handler=cmd_stats)

    p = sub.add_parser("augment", help="Merge generated questions into a training set")
    _add_common(p)
    p.add_argument("--in", dest="in_path", required=True, help="Generated QA pairs JSONL")
    p.add_argument("--source", required=True, help="Source training questions JSONL")
    p.add_argument("--strategy", required=True, choices=[s.value for s in Strategy])
    p.add_argument("--out", required=True, help="Merged questions JSONL")
    p.set_defaults(handler=cmd_augment)

    p = sub.add_parser("nearest", help="Find the most similar corpus question")
    _add_common(p)
    p.add_argument("--in", dest="in_path", required=True, help="Corpus questions JSONL")
    p.add_argument("--text", required=True, help="Query question")
    _add_corpus(p, "embeddings")
    p.set_defaults(handler=cmd_nearest)

    return parser


def _config_for(args: argparse.Namespace) -> PipelineConfig:
    config = get_config(args.config)

    def arg(name: str) -> Any:
        return getattr(args, name, None)

    config.override(
        **{
            "seed": arg("seed"),
            "workers": arg("workers"),
            "generation.dedup_threshold": arg("threshold") if args.command == "generate" else None,
            "corpus.objects": arg("objects"),
            "corpus.attributes": arg("attributes"),
            "corpus.features": arg("features"),
            "corpus.embeddings": arg("embeddings"),
            "corpus.captions": arg("captions"),
            "corpus.normalize_features": arg("normalize"),
            "resources.exclusion": arg("lexicon"),
            "training.epochs": arg("epochs"),
            "training.learning_rate": arg("lr"),
            "training.batch_size": arg("batch"),
            "training.optimizer": arg("optimizer"),
            "training.hidden": arg("hidden"),
        }
    )
    config.validate()
    config.validate_paths()
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    _setup_logging(args.verbose)
    logger.debug("Running %s", args.command)
    handler: Callable[[argparse.Namespace, PipelineConfig], int] = args.handler
    try:
        config = _config_for(args)
        return handler(args, config)
    except (PremiseForgeError, FileNotFoundError, OSError) as e:
        err_console.print(f"Error: {e}", style="red", markup=False, highlight=False)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
