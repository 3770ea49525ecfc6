"""Command-line entry point: ``scholarlink <subcommand> [options]``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import INPUT_KEYS, ConfigError, PipelineConfig, build_config
from .corpus import (
    Corpus,
    CorpusError,
    CorpusPaths,
    build_doi_index,
    load_corpus,
    write_corpus,
)
from .evaluator import evaluate_per_step, summary_dict
from .matcher import CandidateSet, build_name_tables, run_hierarchy, select_steps
from .oracle import brute_force_match, compare_outcomes
from .reporter import country_summary, discipline_summary, render_tables
from .synth import InvalidParams, SynthParams, generate_synthetic_corpus

log = logging.getLogger("scholarlink")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_STAGE = 4
EXIT_ORACLE = 5

VARIANTS_HEADER = ["owner_id", "kind", "first_name", "last_name", "initials",
                   "first_initial", "first_token"]


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class Run:
    """Holds per-invocation state and the manifest being built."""

    def __init__(self, command: str, cfg: PipelineConfig):
        self.command = command
        self.cfg = cfg
        self.out = cfg.out
        self.stage_seconds: dict[str, float] = {}
        self.row_counts: dict[str, int] = {}
        self.inputs: dict[str, dict] = {}
        self.notes: dict[str, object] = {}
        self.started = datetime.now(timezone.utc)

    def stage(self, name: str, fn, *args):
        t0 = time.perf_counter()
        try:
            result = fn(*args)
        except (ConfigError, CorpusError, StageError):
            raise
        except Exception as exc:  # noqa: BLE001 - categorized for the exit code
            raise StageError(name, exc) from exc
        finally:
            self.stage_seconds[name] = round(time.perf_counter() - t0, 3)
        log.info("%s done in %.2fs", name, self.stage_seconds[name])
        return result

    def write_manifest(self, status: str) -> None:
        manifest = {
            "command": self.command,
            "status": status,
            "version": __version__,
            "started_at": self.started.isoformat(),
            "config": self.cfg.as_dict(),
            "inputs": self.inputs,
            "row_counts": self.row_counts,
            "stage_seconds": self.stage_seconds,
            **self.notes,
        }
        try:
            self.out.mkdir(parents=True, exist_ok=True)
            (self.out / "manifest.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        except OSError as exc:
            log.error("could not write manifest: %s", exc)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _paths(cfg: PipelineConfig) -> CorpusPaths:
    missing = [k for k in ("authors", "works", "events", "tweeters") if getattr(cfg, k) is None]
    if missing:
        raise ConfigError(f"missing input path(s): {', '.join(missing)}")
    return CorpusPaths(cfg.authors, cfg.works, cfg.events, cfg.tweeters, cfg.golden)


# -- stages ---------------------------------------------------------------------


def do_ingest(run: Run) -> Corpus:
    paths = _paths(run.cfg)
    corpus = run.stage("ingest", load_corpus, paths, run.cfg.workers)
    for key in INPUT_KEYS:
        p = getattr(paths, key)
        if p is not None:
            rep = corpus.report.files.get(key)
            run.inputs[key] = {"path": str(p), "sha256": _sha256(Path(p)),
                               "rows_loaded": rep.rows_loaded if rep else 0}
    run.row_counts.update(
        authors=len(corpus.authors), works=len(corpus.works), events=len(corpus.events),
        tweeters=len(corpus.tweeters), golden=len(corpus.golden))
    print(corpus.report.render())
    corpus.report.write(run.out)
    return corpus


def _match(run: Run, corpus: Corpus):
    cfg = run.cfg
    steps = select_steps(cfg.enabled_steps())
    tables = build_name_tables(corpus.authors.values(), corpus.tweeters.values(), cfg.honorifics)
    index = build_doi_index(corpus.works, corpus.events)
    candidates = CandidateSet.from_index(index)
    outcome = run_hierarchy(candidates, tables, steps, workers=cfg.workers)
    return tables, outcome


def write_variants(path: Path, tables) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VARIANTS_HEADER)
        for kind, forms in (("author", tables.authors), ("tweeter", tables.tweeters)):
            for owner in sorted(forms):
                for v in forms[owner].variants:
                    w.writerow([owner, kind, v.first_name, v.last_name, v.initials,
                                v.first_initial, v.first_token])


def do_match(run: Run, corpus: Corpus):
    tables, outcome = run.stage("match", _match, run, corpus)
    render_tables(run.out, outcome=outcome)
    if run.cfg.export_variants:
        write_variants(run.out / "variants.csv", tables)
    run.row_counts.update(candidates=outcome.n_candidates, matched_pairs=len(outcome.combined))
    summary = {
        "candidates": outcome.n_candidates,
        "name_skips": dict(sorted(tables.skips.items())),
        "steps": [
            {"step_id": s.step_id, "criteria": s.criteria.value, "field": s.field.value,
             "new_pairs": len(outcome.new_pairs_by_step[s.step_id]),
             "independent_pairs": len(outcome.independent_by_step[s.step_id]),
             "cumulative_pairs": outcome.cumulative_by_step[s.step_id].pairs}
            for s in outcome.steps
        ],
        "combined_pairs": len(outcome.combined),
    }
    (run.out / "match_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{outcome.n_candidates} candidate pairs, {len(outcome.combined)} matched")
    for s in summary["steps"]:
        print(f"  step {s['step_id']} {s['criteria']}/{s['field']}: {s['new_pairs']} new")
    return outcome


def do_evaluate(run: Run, corpus: Corpus, outcome) -> None:
    tables = run.stage("evaluate", evaluate_per_step, outcome, corpus.golden)
    render_tables(run.out, tables=tables)
    combined = tables.cumulative[-1].report
    summary = {
        "golden_pairs": len(corpus.golden),
        "combined": summary_dict(combined),
        "per_step_conventions": {
            name: {str(r.step_id or "combined"): list(r.report.conventions)
                   for r in rows if r.report.conventions}
            for name, rows in tables.as_dict().items()
        },
    }
    (run.out / "evaluation_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"precision {combined.precision:.3f}  recall {combined.recall:.3f}  "
          f"F {combined.f_score:.3f}")


def do_report(run: Run, corpus: Corpus, outcome) -> None:
    def summaries():
        matched = {p.author_id for p in outcome.combined}
        return (discipline_summary(matched, corpus.works),
                country_summary(matched, corpus.authors, run.cfg.top_countries))

    disciplines, countries = run.stage("report", summaries)
    render_tables(run.out, disciplines=disciplines, countries=countries)


def synth_params(cfg: PipelineConfig) -> SynthParams:
    return SynthParams(
        n_authors=cfg.n_authors, n_planted=cfg.n_planted, n_distractors=cfg.n_distractors,
        homonym_rate=cfg.homonym_rate, n_events=cfg.n_events,
    )


def do_synth(run: Run) -> None:
    def generate():
        return generate_synthetic_corpus(run.cfg.seed, synth_params(run.cfg))

    try:
        synth = run.stage("synth", generate)
    except StageError as exc:
        if isinstance(exc.cause, InvalidParams):
            raise ConfigError(str(exc.cause)) from None
        raise
    paths = write_corpus(synth.corpus, run.out)
    with open(run.out / "truth.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["author_id", "tweeter_id", "step_class"])
        for (a, t), k in sorted(synth.truth.items()):
            w.writerow([a, t, k])
    lines = [f"{key} = {getattr(paths, key).name}" for key in INPUT_KEYS]
    (run.out / "pipeline.cfg").write_text("\n".join(lines) + "\n", encoding="utf-8")
    c = synth.corpus
    run.row_counts.update(authors=len(c.authors), works=len(c.works), events=len(c.events),
                          tweeters=len(c.tweeters), golden=len(c.golden))
    print(f"wrote synthetic corpus to {run.out} ({len(c.authors)} authors, "
          f"{len(c.tweeters)} tweeters, {len(c.events)} events)")


def do_oracle_check(run: Run) -> int:
    try:
        synth = generate_synthetic_corpus(run.cfg.seed, synth_params(run.cfg))
    except InvalidParams as exc:
        raise ConfigError(str(exc)) from None
    corpus = synth.corpus
    steps = select_steps(run.cfg.enabled_steps())

    def fast():
        tables = build_name_tables(corpus.authors.values(), corpus.tweeters.values(),
                                   run.cfg.honorifics)
        cands = CandidateSet.from_index(build_doi_index(corpus.works, corpus.events))
        return run_hierarchy(cands, tables, steps, workers=run.cfg.workers)

    indexed = run.stage("match", fast)
    reference = run.stage("oracle", brute_force_match, corpus, steps, run.cfg.honorifics)
    problems = compare_outcomes(indexed, reference)
    verdict = "EQUAL" if not problems else "MISMATCH"
    run.notes["oracle_verdict"] = verdict
    run.row_counts.update(matched_pairs=len(indexed.combined), candidates=indexed.n_candidates)
    print(f"{verdict}: {len(indexed.combined)} pairs over {indexed.n_candidates} candidates "
          f"(seed {run.cfg.seed})")
    for p in problems:
        print("  " + p)
    return EXIT_OK if not problems else EXIT_ORACLE


def execute(command: str, cfg: PipelineConfig) -> int:
    run = Run(command, cfg)
    status = "failed"
    try:
        try:
            cfg.out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {cfg.out}: {exc}") from None
        if command == "synth":
            do_synth(run)
            code = EXIT_OK
        elif command == "oracle-check":
            code = do_oracle_check(run)
        else:
            corpus = do_ingest(run)
            if command != "ingest":
                outcome = do_match(run, corpus)
                if command in ("evaluate", "report", "all"):
                    do_evaluate(run, corpus, outcome)
                if command in ("report", "all"):
                    do_report(run, corpus, outcome)
            code = EXIT_OK
        status = "ok" if code == EXIT_OK else "oracle mismatch"
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        status = "config error"
        return EXIT_CONFIG
    except CorpusError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        status = "input error"
        return EXIT_INPUT
    except StageError as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        status = f"stage failure: {exc.stage}"
        return EXIT_STAGE
    finally:
        run.write_manifest(status)


COMMANDS = ("ingest", "match", "evaluate", "report", "synth", "oracle-check", "all")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value configuration file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="parallel workers (default 1)")
    common.add_argument("--disable-step", type=int, action="append", dest="disable_steps",
                        metavar="K", help="skip matching step K (repeatable)")
    common.add_argument("--top-countries", type=int, help="named rows in the country table")
    common.add_argument("--seed", type=int, help="seed for synth / oracle-check")
    common.add_argument("--export-variants", action="store_const", const=True,
                        help="also write variants.csv")
    common.add_argument("-v", "--verbose", action="store_true")
    for key in INPUT_KEYS:
        common.add_argument(f"--{key}", help=f"{key} input file")
    synth = common.add_argument_group("synthetic corpus")
    synth.add_argument("--n-authors", type=int)
    synth.add_argument("--n-planted", type=int)
    synth.add_argument("--n-distractors", type=int)
    synth.add_argument("--homonym-rate", type=float)
    synth.add_argument("--n-events", type=int)

    parser = argparse.ArgumentParser(
        prog="scholarlink",
        description="Match scholarly authors to the social-media accounts that tweeted their papers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ingest": "load and validate the input files",
        "match": "ingest, then run the matching hierarchy and write matches.csv",
        "evaluate": "match, then score against the golden pairs",
        "report": "evaluate, then write all tables and summaries",
        "synth": "write a synthetic corpus with planted ground truth",
        "oracle-check": "compare the indexed matcher with the brute-force oracle",
        "all": "ingest, match, evaluate and report",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    cli_values = {
        key: getattr(args, key)
        for key in (*INPUT_KEYS, "out", "workers", "top_countries", "seed", "export_variants",
                    "n_authors", "n_planted", "n_distractors", "homonym_rate", "n_events")
    }
    if args.disable_steps:
        cli_values["disable_steps"] = tuple(args.disable_steps)
    try:
        cfg = build_config(args.config, cli_values)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return execute(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
