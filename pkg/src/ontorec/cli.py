"""Command-line entry point: ``ontorec <stage> [--key value ...]``.

Each stage reads and writes plain-text artifacts in the work directory, so
stages can be rerun independently. Failures exit nonzero with a single
``E_<CODE>: message`` line on stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

from ontorec.config import (
    CONFIG_KEYS,
    FREQUENT_FILE,
    REPORT_FILE,
    SEQUENCES_FILE,
    SESSIONS_FILE,
    SYNTHETIC_ANNOTATIONS,
    SYNTHETIC_LOG,
    SYNTHETIC_ONTOLOGY,
    PipelineConfig,
    apply_settings,
    read_config_file,
)
from ontorec.errors import ConfigError, OntorecError
from ontorec.evaluation import run_sweep
from ontorec.logs import filter_entries, format_sessions, parse_log, read_sessions, sessionize
from ontorec.mapper import build_sequence_database, format_sequence_database, read_sequence_database
from ontorec.miner import MinerParams, format_frequents, onto_spm
from ontorec.ontology import AnnotationMap, SemanticDistanceMatrix, build_distance_matrix, load_annotations, load_ontology
from ontorec.rules import format_rulebase, generate_rules, load_rulebase, recommend
from ontorec.synthetic import SyntheticConfig, generate_synthetic

log = logging.getLogger("ontorec")


class MissingInput(OntorecError):
    code = "E_MISSING_INPUT"


def _read(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise MissingInput(f"no such file: {path}") from None
    except OSError as exc:
        raise MissingInput(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_semantics(cfg: PipelineConfig) -> tuple[AnnotationMap, SemanticDistanceMatrix]:
    onto_path, ann_path = cfg.path("ontology"), cfg.path("annotations")
    o = load_ontology(_read(onto_path), source=str(onto_path))
    ann = load_annotations(_read(ann_path), o, source=str(ann_path))
    return ann, build_distance_matrix(o)


def _miner_params(cfg: PipelineConfig) -> MinerParams:
    return MinerParams(cfg.min_sup, cfg.delta, cfg.max_len)


# -- stages -----------------------------------------------------------------

def cmd_gen_synthetic(cfg: PipelineConfig, out=None) -> int:
    out = out or sys.stdout
    corpus = generate_synthetic(SyntheticConfig(cfg.products, cfg.categories, cfg.sessions,
                                                cfg.mean_session_length, cfg.seed))
    _write(cfg.artifact(SYNTHETIC_ONTOLOGY), corpus.ontology)
    _write(cfg.artifact(SYNTHETIC_ANNOTATIONS), corpus.annotations)
    _write(cfg.artifact(SYNTHETIC_LOG), corpus.log)
    print(f"wrote {cfg.products} products in {cfg.categories} categories, "
          f"{len(corpus.sessions)} sessions, {corpus.log.count(chr(10))} log lines to {cfg.workdir}", file=out)
    return 0


def cmd_preprocess(cfg: PipelineConfig, out=None) -> int:
    out = out or sys.stdout
    log_path = cfg.path("log")
    lines = _read(log_path).splitlines()
    bad: Counter = Counter()
    entries = list(parse_log(lines, cfg.log_format, source=str(log_path), skip_malformed=cfg.skip_malformed,
                             strip_query=cfg.strip_query, errors=bad))
    kept, removed = filter_entries(entries, cfg.asset_suffixes, cfg.crawler_keywords)
    sessions = sessionize(kept, cfg.timeout)
    _write(cfg.artifact(SESSIONS_FILE), format_sessions(sessions))

    print(f"entries read: {len(entries)}", file=out)
    if bad:
        print(f"malformed lines skipped: {sum(bad.values())}", file=out)
    for reason, count in removed.items():
        print(f"removed ({reason}): {count}", file=out)
    print(f"entries kept: {len(kept)}", file=out)
    print(f"sessions: {len(sessions)}", file=out)
    if not sessions:
        log.warning("no sessions produced from %s", log_path)
    return 0


def cmd_mine(cfg: PipelineConfig, out=None) -> int:
    out = out or sys.stdout
    params = _miner_params(cfg)
    ann, M = _load_semantics(cfg)
    sessions_path = cfg.artifact(SESSIONS_FILE)
    sessions = read_sessions(_read(sessions_path), source=str(sessions_path))
    db = build_sequence_database(sessions, ann, cfg.min_len, collapse_duplicates=cfg.collapse_duplicates)
    _write(cfg.artifact(SEQUENCES_FILE), format_sequence_database(db))

    frequents = onto_spm(db, M, params, cfg.workers)
    rb = generate_rules(frequents, cfg.min_conf, min_sup=params.min_sup, delta=params.delta)
    _write(cfg.artifact(FREQUENT_FILE), format_frequents(frequents))
    _write(cfg.path("rules"), format_rulebase(rb))
    print(f"sequences: {len(db)}", file=out)
    print(f"frequent sequences: {len(frequents)}", file=out)
    print(f"rules: {len(rb)}", file=out)
    return 0


def cmd_evaluate(cfg: PipelineConfig, out=None) -> int:
    out = out or sys.stdout
    ann, M = _load_semantics(cfg)
    seq_path = cfg.artifact(SEQUENCES_FILE)
    db = read_sequence_database(_read(seq_path), source=str(seq_path))
    report = run_sweep(db, ann, M, _miner_params(cfg), cfg.window, cfg.threshold_list,
                       folds=cfg.folds, seed=cfg.seed, min_conf=cfg.min_conf,
                       max_results=cfg.max_results, workers=cfg.workers)
    table = report.to_table()
    _write(cfg.artifact(REPORT_FILE), table)
    out.write(table)
    return 0


def cmd_recommend(cfg: PipelineConfig, out=None, stdin=None) -> int:
    out, stdin = out or sys.stdout, stdin or sys.stdin
    ann, M = _load_semantics(cfg)
    rb = load_rulebase(_require(cfg.path("rules")))
    urls = stdin.read().split()
    for r in recommend(urls, rb, ann, M, cfg.window, cfg.threshold, cfg.max_results):
        print(f"{','.join(r.pages)}\t{r.confidence:.6f}\t{r.instance}", file=out)
    return 0


def cmd_serve(cfg: PipelineConfig, out=None) -> int:
    out = out or sys.stdout
    from ontorec.service import RecommendationService, make_server

    ann, M = _load_semantics(cfg)
    rb = load_rulebase(_require(cfg.path("rules")))
    service = RecommendationService(rb, ann, M, cfg.window, cfg.threshold, cfg.max_results)
    server = make_server(service, cfg.host, cfg.port)
    print(f"serving {len(rb)} rules on http://{cfg.host}:{server.server_address[1]}/recommend", file=out)
    out.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _require(path: Path) -> Path:
    if not Path(path).exists():
        raise MissingInput(f"no such file: {path}")
    return path


COMMANDS = {
    "gen-synthetic": (cmd_gen_synthetic, "write a synthetic ontology, annotation file and access log"),
    "preprocess": (cmd_preprocess, "parse, clean and sessionize an access log"),
    "mine": (cmd_mine, "map sessions to instances, mine frequent sequences and rules"),
    "recommend": (cmd_recommend, "recommend pages for urls read from standard input"),
    "evaluate": (cmd_evaluate, "cross-validated precision/coverage threshold sweep"),
    "serve": (cmd_serve, "run the HTTP recommendation endpoint"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("-v", "--verbose", action="store_true")
    group = common.add_argument_group("configuration overrides")
    for key in CONFIG_KEYS:
        group.add_argument(f"--{key.replace('_', '-')}", dest=key, metavar="VALUE", default=None)

    parser = argparse.ArgumentParser(prog="ontorec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    if args.config is not None:
        cfg = apply_settings(cfg, read_config_file(args.config), str(args.config))
    flags = {key: getattr(args, key) for key in CONFIG_KEYS if getattr(args, key) is not None}
    return apply_settings(cfg, flags, "command line").validate()


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command][0](cfg)
    except OntorecError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    except ValueError as exc:
        print(f"E_INVALID: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
