"""Command-line front end: corpus building, screening, and evaluation.

Subcommands mirror the pipeline stages: ``expand`` templates into
description/label pairs, ``generate`` draft letters, ``fill`` identity
placeholders, ``verify`` letters against their gold labels, then
``evaluate``/``stats``/``convert`` for scoring and inspection. Report
commands write delimited tables plus rendered figures next to them.

Exit codes: 0 success, 1 usage, 2 data error, 3 client error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import corpus, plots
from .binning import bin_pragmatic, bin_purist
from .clients import ClientError, HttpTeacherClient, MockTeacherClient, TeacherClient
from .config import RunConfig
from .errors import (
    DataError,
    MalformedDraft,
    MissingIdentity,
    SzfreqError,
    UnresolvedPlaceholder,
)
from .labels import DEFAULT_NORM_CONFIG, NormConfig, format_label, normalize
from .metrics import (
    distribution,
    render_confusion,
    render_distribution,
    render_report,
    report_to_dict,
)
from .pipeline import (
    LetterRecord,
    ScreeningConfig,
    draft_letter,
    render_screening,
    run_screening,
)
from .scoring import PRAGMATIC_CLASSES, PURIST_CLASSES, evaluate_records
from .templates import expand_corpus, fill_placeholders


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for data errors
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_mock_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mock", action="store_true",
                     help="use the deterministic offline client")
    sub.add_argument("--mock-wrong-rate", type=float, default=0.0)
    sub.add_argument("--mock-stubborn-rate", type=float, default=0.0)
    sub.add_argument("--mock-gibberish-rate", type=float, default=0.0)
    sub.add_argument("--mock-salt", default="")
    sub.add_argument("--config", help="run-config JSON (required without --mock)")


def _make_client(args: argparse.Namespace, run_config: RunConfig) -> TeacherClient:
    if args.mock:
        return MockTeacherClient(
            wrong_rate=args.mock_wrong_rate,
            stubborn_rate=args.mock_stubborn_rate,
            gibberish_rate=args.mock_gibberish_rate,
            salt=args.mock_salt,
        )
    if not run_config.client.endpoint:
        raise _UsageError("no client endpoint configured; pass --mock or --config")
    return HttpTeacherClient(run_config.client)


def _run_config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "config", None):
        return RunConfig.from_file(args.config)
    return RunConfig()


def _norm_config(args: argparse.Namespace) -> NormConfig:
    if getattr(args, "norm_config", None):
        return NormConfig.from_file(args.norm_config)
    return DEFAULT_NORM_CONFIG


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_expand(args: argparse.Namespace) -> int:
    templates = corpus.load_templates(args.templates)
    pairs, dropped = expand_corpus(templates)
    corpus.save_pairs(args.out, pairs)
    print(f"wrote {len(pairs)} pairs to {args.out} ({dropped} duplicates dropped)")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    run_config = _run_config(args)
    client = _make_client(args, run_config)
    bases = corpus.load_base_letters(args.base)
    pairs = corpus.load_pairs(args.pairs)
    if not bases:
        raise DataError(f"{args.base}: no base letters")
    if args.limit is not None:
        pairs = pairs[: args.limit]
    drafts: list[LetterRecord] = []
    identities: dict[str, object] = {}
    failures: list[tuple[str, str]] = []
    for i, pair in enumerate(pairs):
        base = bases[i % len(bases)]
        try:
            text, identity = draft_letter(client, base.text, pair)
        except (ClientError, MalformedDraft) as err:
            failures.append((pair.id, str(err)))
            continue
        drafts.append(
            LetterRecord(
                id=pair.id,
                letter_text=text,
                gold_label=pair.label,
                template_id=pair.template_id,
                base_letter_id=base.id,
            )
        )
        identities[pair.id] = identity
    corpus.save_letters(args.out_drafts, drafts)
    corpus.save_identities(args.out_identities, identities)
    print(f"drafted {len(drafts)} letters to {args.out_drafts} "
          f"({len(failures)} failures)")
    for record_id, reason in failures:
        print(f"  failed {record_id}: {reason}", file=sys.stderr)
    if pairs and not drafts:
        raise ClientError("every draft failed")
    return 0


def cmd_fill(args: argparse.Namespace) -> int:
    drafts = corpus.load_letters(args.drafts)
    identities = corpus.load_identities(args.identities)
    filled: list[LetterRecord] = []
    failures: list[tuple[str, str]] = []
    for record in drafts:
        try:
            if record.id not in identities:
                raise MissingIdentity(f"no identity record for {record.id!r}")
            text = fill_placeholders(record.letter_text, identities[record.id])
        except (MissingIdentity, UnresolvedPlaceholder) as err:
            failures.append((record.id, str(err)))
            continue
        filled.append(
            LetterRecord(
                id=record.id,
                letter_text=text,
                gold_label=record.gold_label,
                template_id=record.template_id,
                base_letter_id=record.base_letter_id,
            )
        )
    corpus.save_letters(args.out, filled)
    print(f"filled {len(filled)} letters to {args.out} ({len(failures)} failures)")
    for record_id, reason in failures:
        print(f"  failed {record_id}: {reason}", file=sys.stderr)
    return 2 if failures else 0


def cmd_verify(args: argparse.Namespace) -> int:
    run_config = _run_config(args)
    client = _make_client(args, run_config)
    records = corpus.load_letters(args.letters)
    exemplars = corpus.load_exemplars(args.exemplars) if args.exemplars else []
    screening = run_config.screening
    if args.concurrency is not None:
        screening = ScreeningConfig(
            screening.max_passes_with_exemplar,
            screening.max_passes_without_exemplar,
            args.concurrency,
        )
    result = run_screening(client, records, exemplars, screening)
    corpus.save_letters(args.out_retained, result.retained)
    table = render_screening(result.stats)
    print(table, end="")
    if args.stats_out:
        Path(args.stats_out).write_text(table, encoding="utf-8")
        figure = Path(args.stats_out).with_suffix(".png")
        plots.save_screening_bars(result.stats, figure, title="screening discards")
        print(f"wrote {args.stats_out} and {figure}")
    for record_id, reason in result.failures:
        print(f"  client failure {record_id}: {reason}", file=sys.stderr)
    if records and not result.stats.retained and len(result.failures) == len(records):
        raise ClientError("every verification call failed")
    return 0


def _schemes(arg: str) -> tuple[str, ...]:
    return ("purist", "pragmatic") if arg == "both" else (arg,)


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _norm_config(args)
    golds = corpus.load_gold(args.gold)
    predictions = corpus.load_predictions(args.predictions, default_format=args.format)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    for scheme in _schemes(args.scheme):
        result = evaluate_records(golds, predictions, scheme, cfg)
        print(f"== {scheme} ==")
        doc = {
            "scheme": scheme,
            "scored": result.scored,
            "not_applicable": result.not_applicable,
            "invalid": result.invalid,
            "report": report_to_dict(result.report) if result.report else None,
        }
        json_path = Path(f"{prefix}-{scheme}-report.json")
        json_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        if result.report is None:
            # nothing scorable under this scheme (coarse-only predictions)
            print("-")
            print(f"not applicable: {result.not_applicable}")
            continue
        table = render_report(result.report)
        print(table, end="")
        if result.not_applicable:
            print(f"not applicable: {result.not_applicable}")
        Path(f"{prefix}-{scheme}-report.tsv").write_text(table, encoding="utf-8")
        Path(f"{prefix}-{scheme}-confusion.tsv").write_text(
            render_confusion(result.report), encoding="utf-8"
        )
        plots.save_confusion_heatmap(
            result.report, f"{prefix}-{scheme}-confusion.png", title=f"{scheme} confusion"
        )
        plots.save_f1_bars(
            result.report, f"{prefix}-{scheme}-f1.png", title=f"{scheme} per-class F1"
        )
    print(f"wrote reports under {prefix}-*")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _norm_config(args)
    golds = corpus.load_gold(args.labels)
    prefix = Path(args.out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    for scheme in _schemes(args.scheme):
        classes = PURIST_CLASSES if scheme == "purist" else PRAGMATIC_CLASSES
        names = []
        for gold in golds:
            x = normalize(gold.label, cfg) if gold.label is not None else float(gold.x)
            cls = bin_purist(x) if scheme == "purist" else bin_pragmatic(x)
            names.append(cls.abbrev)
        counts = distribution(names, classes)
        table = render_distribution(counts)
        print(f"== {scheme} ==")
        print(table, end="")
        Path(f"{prefix}-{scheme}-distribution.tsv").write_text(table, encoding="utf-8")
        plots.save_distribution_bars(
            counts, f"{prefix}-{scheme}-distribution.png", title=f"{scheme} classes"
        )
    print(f"wrote distributions under {prefix}-*")
    return 0


def cmd_convert(args: argparse.Namespace) -> int:
    cfg = _norm_config(args)
    golds = corpus.load_gold(args.labels)
    lines = ["id\tlabel\tx\tpurist\tpragmatic"]
    for gold in golds:
        if gold.label is not None:
            label_text = format_label(gold.label)
            x = normalize(gold.label, cfg)
        else:
            label_text = "-"
            x = float(gold.x)
        purist = bin_purist(x).abbrev
        pragmatic = bin_pragmatic(x).abbrev
        x_text = str(int(x)) if float(x).is_integer() else repr(x)
        lines.append(f"{gold.id}\t{label_text}\t{x_text}\t{purist}\t{pragmatic}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(golds)} rows to {args.out}")
    else:
        print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="szfreq",
        description="Seizure-frequency label toolkit: corpus building, "
        "screening, and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="instantiate templates into description/label pairs")
    p.add_argument("--templates", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("generate", help="draft letters around descriptions")
    p.add_argument("--base", required=True, help="base letters JSONL")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out-drafts", required=True)
    p.add_argument("--out-identities", required=True)
    p.add_argument("--limit", type=int)
    _add_mock_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fill", help="replace identity placeholders in drafts")
    p.add_argument("--drafts", required=True)
    p.add_argument("--identities", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("verify", help="multi-pass label verification and screening")
    p.add_argument("--letters", required=True)
    p.add_argument("--exemplars")
    p.add_argument("--out-retained", required=True)
    p.add_argument("--stats-out")
    p.add_argument("--concurrency", type=int)
    _add_mock_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("--gold", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--format", choices=["1", "2", "3", "4"],
                   help="default format for records without one")
    p.add_argument("--scheme", choices=["purist", "pragmatic", "both"], default="both")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--norm-config")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", help="class distribution of a label file")
    p.add_argument("--labels", required=True)
    p.add_argument("--scheme", choices=["purist", "pragmatic", "both"], default="both")
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--norm-config")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("convert", help="canonicalize labels and show their bins")
    p.add_argument("--labels", required=True)
    p.add_argument("--out")
    p.add_argument("--norm-config")
    p.set_defaults(func=cmd_convert)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"szfreq: error: {err}", file=sys.stderr)
        return 1
    except ClientError as err:
        print(f"szfreq: client error: {err}", file=sys.stderr)
        return 3
    except (SzfreqError, OSError) as err:
        print(f"szfreq: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
