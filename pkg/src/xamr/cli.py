"""Command line interface: ``xamr <command> ...``.

Exit status is 0 on success, 1 on usage errors and 2 on data or backend
contract errors; diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .consistency import LanguageOutputs, breakdown_consistency, consistency_matrix
from .corpus import CorpusError, read_corpus
from .mt_quality import SentencePair, corpus_bleu, embedding_cosine_report, load_sentence_embeddings
from .pipeline import (
    AdapterError,
    AdapterSpec,
    CacheCorruptionError,
    PipelineLog,
    read_sentences,
    run_pipeline,
)
from .report import FORMATS, render_breakdown, render_consistency, render_score, render_values
from .s2match import S2Config, S2Metric, load_embeddings
from .smatch import SearchConfig, SmatchMetric, corpus_score, zip_corpora
from .subscores import corpus_breakdown

log = logging.getLogger("xamr")

USAGE_ERROR = 1
DATA_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=4, help="hill-climbing restarts (default 4)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument(
        "--exact-threshold",
        type=int,
        default=6,
        help="use exhaustive search when the smaller graph has at most this many variables",
    )
    p.add_argument("--jobs", type=int, default=1, help="worker processes for corpus scoring")
    p.add_argument("--format", choices=FORMATS, default="text")


def _add_pair(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gold", required=True, type=Path, help="gold AMR corpus file")
    p.add_argument("--pred", required=True, type=Path, help="predicted AMR corpus file")


def _add_embeddings(p: argparse.ArgumentParser, required: bool) -> None:
    p.add_argument("--embeddings", type=Path, required=required, help="word vector file")
    p.add_argument("--tau", type=float, default=0.5, help="similarity threshold (default 0.5)")
    p.add_argument(
        "--exact-top", action="store_true", help="score the root concept triple by exact match only"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xamr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("score", help="corpus Smatch")
    _add_pair(p)
    _add_search(p)

    p = sub.add_parser("s2score", help="corpus S2MATCH with graded concept similarity")
    _add_pair(p)
    _add_embeddings(p, required=True)
    _add_search(p)

    p = sub.add_parser("breakdown", help="fine-grained Smatch breakdown")
    _add_pair(p)
    _add_embeddings(p, required=False)
    _add_search(p)

    p = sub.add_parser("consistency", help="cross-lingual consistency matrix")
    p.add_argument(
        "--inputs", required=True, help="comma-separated LANG=FILE list, one AMR corpus per language"
    )
    p.add_argument("--metric", choices=("smatch", "s2match"), default="smatch")
    p.add_argument("--breakdown", action="store_true", help="add one row per aspect")
    _add_embeddings(p, required=False)
    _add_search(p)

    p = sub.add_parser("bleu", help="corpus BLEU of translations")
    p.add_argument("--hyp", required=True, type=Path, help="translations, one per line")
    p.add_argument("--ref", required=True, type=Path, help="references, one per line")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("embsim", help="mean cosine of sentence embeddings")
    p.add_argument("--hyp-emb", required=True, type=Path)
    p.add_argument("--ref-emb", required=True, type=Path)
    p.add_argument("--format", choices=FORMATS, default="text")

    p = sub.add_parser("pipeline", help="translate, then parse")
    p.add_argument("--input", required=True, type=Path, help="sentences, one per line (id<TAB>text allowed)")
    p.add_argument("--lang", default="xx", help="source language tag")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--translate-cmd", help="translator command (line protocol)")
    g.add_argument("--translate-url", help="translator HTTP endpoint")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--parse-cmd", help="parser command (line in, Penman block out)")
    g.add_argument("--parse-url", help="parser HTTP endpoint")
    p.add_argument("--out", required=True, type=Path, help="predicted AMR corpus to write")
    p.add_argument("--cache", type=Path, default=os.environ.get("XAMR_CACHE"), help="cache directory (default $XAMR_CACHE)")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--translator-version", default="")
    p.add_argument("--parser-version", default="")

    p = sub.add_parser("validate", help="check that every entry of an AMR file parses")
    p.add_argument("--file", required=True, type=Path)
    return parser


def _search(args) -> SearchConfig:
    try:
        return SearchConfig(args.restarts, args.seed, args.exact_threshold)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _metric(args, graded: bool):
    search = _search(args)
    if not graded:
        return SmatchMetric(search)
    try:
        cfg = S2Config(args.tau, search, grade_top=not args.exact_top)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return S2Metric(load_embeddings(args.embeddings), cfg)


def _pairs(args):
    golds = read_corpus(args.gold, strict=True)
    preds = read_corpus(args.pred, strict=True)
    return zip_corpora([e.graph for e in golds], [e.graph for e in preds])


def cmd_score(args, graded=False) -> str:
    metric = _metric(args, graded)
    result = corpus_score(_pairs(args), metric=metric, jobs=args.jobs)
    meta = {"restarts": args.restarts, "seed": args.seed}
    if graded:
        meta["tau"] = args.tau
    return render_score(result, args.format, "s2match" if graded else "smatch", **meta)


def cmd_breakdown(args) -> str:
    graded = args.embeddings is not None
    metric = _metric(args, graded)
    report = corpus_breakdown(_pairs(args), _search(args), metric, jobs=args.jobs)
    return render_breakdown(report, args.format, "s2match" if graded else "smatch")


def _parse_inputs(spec: str) -> list[tuple[str, Path]]:
    out = []
    for item in spec.split(","):
        lang, sep, path = item.partition("=")
        if not sep or not lang.strip() or not path.strip():
            raise UsageError(f"--inputs expects LANG=FILE items, got {item!r}")
        out.append((lang.strip(), Path(path.strip())))
    if len(out) < 2:
        raise UsageError("--inputs needs at least two languages")
    return out


def cmd_consistency(args) -> str:
    graded = args.metric == "s2match"
    if graded and args.embeddings is None:
        raise UsageError("--metric s2match requires --embeddings")
    metric = _metric(args, graded)
    outputs = [
        LanguageOutputs(lang, read_corpus(path, strict=True)) for lang, path in _parse_inputs(args.inputs)
    ]
    if args.breakdown:
        matrices = breakdown_consistency(outputs, metric, _search(args), jobs=args.jobs)
    else:
        matrices = {None: consistency_matrix(outputs, metric, _search(args), jobs=args.jobs)}
    return render_consistency(matrices, args.format, args.metric)


def _lines(path: Path) -> list[str]:
    return path.read_text(encoding="utf-8").splitlines()


def cmd_bleu(args) -> str:
    hyp, ref = _lines(args.hyp), _lines(args.ref)
    if len(hyp) != len(ref):
        raise ValueError(f"line count mismatch: {len(hyp)} hypotheses vs {len(ref)} references")
    score = corpus_bleu([SentencePair.from_text(h, r) for h, r in zip(hyp, ref)], args.max_n)
    return render_values({"BLEU": score}, args.format)


def cmd_embsim(args) -> str:
    mean, std = embedding_cosine_report(
        load_sentence_embeddings(args.hyp_emb), load_sentence_embeddings(args.ref_emb)
    )
    return render_values({"cosine_mean": mean, "cosine_stdev": std}, args.format)


def cmd_pipeline(args) -> str:
    common = {"batch_size": args.batch_size, "timeout": args.timeout}
    try:
        if args.translate_cmd:
            translator = AdapterSpec.subprocess(args.translate_cmd, name="translator", version=args.translator_version, **common)
        else:
            translator = AdapterSpec.http(args.translate_url, name="translator", version=args.translator_version, **common)
        if args.parse_cmd:
            parser = AdapterSpec.subprocess(args.parse_cmd, name="parser", version=args.parser_version, **common)
        else:
            parser = AdapterSpec.http(args.parse_url, name="parser", version=args.parser_version, **common)
    except ValueError as e:
        raise UsageError(str(e)) from None
    stats = PipelineLog()
    records = run_pipeline(
        read_sentences(args.input, args.lang), translator, parser, args.cache, out_path=args.out, stats=stats
    )
    log.info("cache hits %d, misses %d, invocations %d", stats.cache_hits, stats.cache_misses, stats.count())
    return f"wrote {len(records)} graphs to {args.out}\n"


def cmd_validate(args) -> tuple[str, int]:
    errors: list[CorpusError] = []
    entries = read_corpus(args.file, errors=errors)
    for e in errors:
        print(f"INVALID {e}", file=sys.stderr)
    status = 0 if not errors else DATA_ERROR
    return f"{len(entries)} valid, {len(errors)} invalid\n", status


COMMANDS = {
    "score": cmd_score,
    "s2score": lambda a: cmd_score(a, graded=True),
    "breakdown": cmd_breakdown,
    "consistency": cmd_consistency,
    "bleu": cmd_bleu,
    "embsim": cmd_embsim,
    "pipeline": cmd_pipeline,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        out = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"xamr: error: {e}", file=sys.stderr)
        return USAGE_ERROR
    except (CorpusError, AdapterError, CacheCorruptionError, ValueError, OSError) as e:
        print(f"xamr: {e}", file=sys.stderr)
        return DATA_ERROR
    status = 0
    if isinstance(out, tuple):
        out, status = out
    sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
