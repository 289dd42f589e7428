"""``kbp`` command-line front end.

Every command writes its outputs plus ``<output>.manifest.json`` recording
the effective config, its hash, input file hashes and timing. Exit codes:
0 success, 1 operational error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .coref import train_gender
from .corpus import Corpus, corpus_files, ingest_corpus
from .evaluation import (
    TemporalScoring, evaluate_clusters, evaluate_coverage, evaluate_links, evaluate_temporal, format_report,
    read_link_labels, read_runs, read_slot_gold, read_temporal_tsv,
)
from .index import RetrievalConfig, build_index, load_index, save_index
from .linking import Linker, LinkerConfig, NilPredictorConfig, link_all, read_queries, write_decisions_tsv
from .slots import (
    FEATURES, SlotFiller, SlotFillingConfig, generate_training, infobox_facts, load_slot_models,
    load_slot_specs, save_slot_models, train_slot_models, write_answers_tsv,
)
from .temporal import load_annotated, temporal_bounds
from .variants import SlotKeywordTable, VariantDictionary, build_dictionary, read_dump

log = logging.getLogger("kbp")


class OperationalError(Exception):
    """Raised for missing artifacts and bad inputs; maps to exit code 1."""


@dataclass
class RunConfig:
    # paths
    corpus: str | None = None
    kb_index: str | None = None
    source_index: str | None = None
    index: str | None = None
    variants: str | None = None
    keywords: str | None = None
    slot_types: str | None = None
    models: str | None = None
    # entity linking
    strategy: str = "variants"
    nil_strategy: str = "top_score"
    alpha: float = 5.9
    beta: float = 0.16
    cluster_threshold: int = 0
    candidates: int = 10
    # retrieval
    top_n: int = 20
    top_n_passages: int = 20
    passage: bool = False
    remove_stopwords: bool = True
    # slot filling
    features: list[str] = field(default_factory=lambda: list(FEATURES))
    coreference: bool = True
    # misc
    seed: int = 0

    PATH_FIELDS = ("corpus", "kb_index", "source_index", "index", "variants", "keywords", "slot_types", "models")

    def validate(self) -> None:
        for name in self.PATH_FIELDS:
            value = getattr(self, name)
            if value is not None and not Path(value).exists():
                raise OperationalError(f"{name}: path does not exist: {value}")
        if self.top_n < 1 or self.top_n_passages < 1 or self.candidates < 1:
            raise OperationalError("top_n, top_n_passages and candidates must be >= 1")
        if self.cluster_threshold < 0:
            raise OperationalError("cluster_threshold must be >= 0")
        unknown = set(self.features) - set(FEATURES)
        if unknown:
            raise OperationalError(f"unknown features: {sorted(unknown)}")

    def retrieval(self) -> RetrievalConfig:
        return RetrievalConfig(self.top_n, self.top_n_passages, self.remove_stopwords)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()


def load_run_config(path: str | None, overrides: dict) -> RunConfig:
    """Config file values, then any flag that was given."""
    base = {}
    if path:
        p = Path(path)
        if not p.exists():
            raise OperationalError(f"config file not found: {path}")
        base = json.loads(p.read_text(encoding="utf-8"))
        known = {f.name for f in fields(RunConfig)}
        extra = set(base) - known
        if extra:
            raise OperationalError(f"unknown config keys: {sorted(extra)}")
    cfg = replace(RunConfig(), **base)
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    cfg.validate()
    return cfg


# -- manifests ----------------------------------------------------------------------------------


def _hash_path(path: Path) -> str:
    h = hashlib.sha256()
    files = sorted(p for p in path.rglob("*") if p.is_file()) if path.is_dir() else [path]
    for f in files:
        h.update(str(f.relative_to(path) if path.is_dir() else f.name).encode())
        h.update(f.read_bytes())
    return h.hexdigest()


def write_manifest(output: Path, command: str, cfg: RunConfig, inputs: list, started: float) -> None:
    manifest = {
        "command": command,
        "config": asdict(cfg),
        "config_hash": cfg.digest(),
        "inputs": {str(p): _hash_path(Path(p)) for p in inputs if p is not None and Path(p).exists()},
        "output": str(output),
        "started_unix": round(started, 3),
        "elapsed_seconds": round(time.time() - started, 3),
    }
    target = output.parent / (output.name + ".manifest.json")
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- shared loaders ------------------------------------------------------------------------------


def _require(value, what: str):
    if value is None:
        raise OperationalError(f"missing required artifact: {what}")
    if not Path(value).exists():
        raise OperationalError(f"{what} not found: {value}")
    return Path(value)


def _corpus_from_index(path: Path) -> Corpus:
    corpus = Corpus()
    for doc in load_index(path).documents.values():
        corpus.add(doc)
    return corpus


def _dictionary(cfg: RunConfig) -> VariantDictionary:
    return VariantDictionary.load_tsv(Path(cfg.variants)) if cfg.variants else VariantDictionary()


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# -- commands ------------------------------------------------------------------------------------


def cmd_build_index(args, cfg: RunConfig) -> int:
    src = Path(args.corpus_dir)
    if not src.is_dir():
        raise OperationalError(f"corpus directory not found: {src}")
    files = corpus_files(src)
    if not files:
        raise OperationalError(f"no corpus files under {src}")
    corpus = ingest_corpus(files)
    if corpus.rejected:
        for reason in corpus.rejected:
            log.error("malformed document: %s", reason)
        raise OperationalError(f"{len(corpus.rejected)} malformed document(s) in {src}")
    index = build_index(corpus, cfg.retrieval(), args.fields)
    out = Path(args.out_dir)
    save_index(index, out)
    write_manifest(out, "build-index", cfg, [src], args.started)
    log.info("indexed %d documents into %s", index.doc_count, out)
    return 0


def cmd_build_variants(args, cfg: RunConfig) -> int:
    dump = _require(args.dump_file, "dump file")
    dictionary = build_dictionary(read_dump(dump))
    out = Path(args.out_tsv)
    dictionary.save_tsv(out)
    write_manifest(out, "build-variants", cfg, [dump], args.started)
    log.info("%d variant pairs written to %s", len(dictionary), out)
    return 0


def cmd_link(args, cfg: RunConfig) -> int:
    queries_path = _require(args.queries, "query file")
    kb = load_index(_require(cfg.kb_index, "KB index"))
    source = _corpus_from_index(Path(cfg.source_index)) if cfg.source_index else None
    linker = Linker(kb, _dictionary(cfg), source, LinkerConfig(
        strategy=cfg.strategy, top_k=cfg.candidates,
        nil=NilPredictorConfig(cfg.nil_strategy, cfg.alpha, cfg.beta),
        cluster_threshold=cfg.cluster_threshold,
    ))
    decisions = link_all(read_queries(queries_path), linker)
    out = Path(args.out)
    write_decisions_tsv(decisions, out)
    write_manifest(out, "link", cfg, [queries_path, cfg.kb_index, cfg.source_index, cfg.variants], args.started)
    failed = sum(d.error is not None for d in decisions)
    if failed:
        log.warning("%d of %d queries failed and were answered NIL", failed, len(decisions))
    return 0


def _read_facts(path: Path, infobox: bool) -> tuple[list[tuple[str, str, str]], dict[str, str]]:
    """``entity<TAB>slot<TAB>value[<TAB>entity_type]``; with ``infobox`` the slot column holds attributes."""
    facts, types = [], {}
    for line in path.read_text(encoding="utf-8").splitlines():
        parts = line.split("\t")
        if len(parts) < 3 or line.startswith("#"):
            continue
        facts.append((parts[0], parts[1], parts[2]))
        if len(parts) > 3 and parts[3]:
            types[parts[0]] = parts[3]
    if infobox:
        facts = list(infobox_facts(facts))
    return facts, types


def cmd_train_sf(args, cfg: RunConfig) -> int:
    facts_path = _require(args.facts, "fact table")
    corpus = _corpus_from_index(_require(cfg.index, "training corpus index"))
    facts, types = _read_facts(facts_path, args.infobox)
    specs = load_slot_specs(Path(cfg.slot_types) if cfg.slot_types else None)
    instances = generate_training(facts, corpus, specs, types, _dictionary(cfg) if cfg.variants else None)
    models = train_slot_models(instances, cfg.features)
    if not models:
        raise OperationalError("no slot had both positive and negative training instances")
    out = Path(args.out)
    save_slot_models(models, out, cfg.features)
    write_manifest(out, "train-sf", cfg, [facts_path, cfg.index], args.started)
    log.info("trained %d slot models from %d instances", len(models), len(instances))
    return 0


def cmd_fill(args, cfg: RunConfig) -> int:
    queries_path = _require(args.queries, "query file")
    index = load_index(_require(cfg.index, "document index"))
    models, features = load_slot_models(_require(cfg.models, "slot models"))
    keywords = SlotKeywordTable.load(Path(cfg.keywords)) if cfg.keywords else SlotKeywordTable.default()
    specs = load_slot_specs(Path(cfg.slot_types) if cfg.slot_types else None)
    filler = SlotFiller(index, _dictionary(cfg), keywords, models, specs, train_gender(), config=SlotFillingConfig(
        cfg.retrieval(), cfg.passage, cfg.coreference, tuple(features)))
    answers = []
    for q in _read_jsonl(queries_path):
        etype = q.get("entity_type", "PER")
        prefix = "per:" if etype == "PER" else "org:"
        slots = q.get("slots") or sorted(s for s in models if s.startswith(prefix))
        answers.extend(filler.fill_slots(q["entity"], etype, slots))
    out = Path(args.out)
    write_answers_tsv(answers, out)
    write_manifest(out, "fill", cfg, [queries_path, cfg.index, cfg.models, cfg.variants, cfg.keywords], args.started)
    failed = [a for a in answers if a.error]
    for a in failed:
        log.warning("%s / %s: %s", a.entity, a.slot, a.error)
    return 0 if len(failed) < len(answers) or not answers else 1


def cmd_temporal(args, cfg: RunConfig) -> int:
    queries_path = _require(args.queries, "query file")
    rows, inputs = [], [queries_path]
    for q in _read_jsonl(queries_path):
        doc_path = Path(q["doc"])
        if not doc_path.is_absolute():
            doc_path = queries_path.parent / doc_path
        try:
            doc = load_annotated(doc_path)
            answer = temporal_bounds(doc, q["value"])
            inputs.append(doc_path)
            if not answer.consistent:
                log.warning("inconsistent temporal graph for %s; bounds left blank", doc_path)
            cells = answer.bounds.cells()
        except (OSError, ValueError, KeyError) as exc:
            log.warning("temporal query %s failed: %s", q, exc)
            cells = [""] * 4
        rows.append("\t".join([q["entity"], q["slot"], q["value"], *cells]))
    out = Path(args.out)
    out.write_text("".join(r + "\n" for r in rows), encoding="utf-8")
    write_manifest(out, "temporal", cfg, inputs, args.started)
    return 0


def cmd_evaluate(args, cfg: RunConfig) -> int:
    system, gold = _require(args.system, "system output"), _require(args.gold, "gold file")
    if args.kind == "el":
        report = evaluate_links(read_link_labels(system), read_link_labels(gold))
    elif args.kind == "clusters":
        report = evaluate_clusters(read_link_labels(system), read_link_labels(gold))
    elif args.kind == "coverage":
        report = evaluate_coverage(read_runs(system), read_slot_gold(gold), args.cutoffs)
    else:
        report = evaluate_temporal(read_temporal_tsv(system), read_temporal_tsv(gold), TemporalScoring())
    report = {"kind": args.kind, **report}
    sys.stdout.write(format_report(report))
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        write_manifest(out, "evaluate", cfg, [system, gold], args.started)
    return 0


# -- argument parsing ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config; flags override its values")
    common.add_argument("--top-n", type=int, dest="top_n", help="documents retrieved per query")
    common.add_argument("--alpha", type=float, help="NIL threshold on the top candidate score")
    common.add_argument("--beta", type=float, help="NIL threshold on the top-two score gap")
    common.add_argument("--strategy", choices=["mention_only", "variants", "variants_plus_doc_entities"],
                        help="entity-linking query formulation")
    common.add_argument("--passage", action="store_true", default=None, help="retrieve passages, not documents")
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="kbp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("build-index", parents=[common], help="ingest a corpus directory and persist an index")
    s.add_argument("corpus_dir")
    s.add_argument("out_dir")
    s.add_argument("--fields", nargs="+", help="index only these field names (e.g. title)")
    s.set_defaults(func=cmd_build_index)

    s = sub.add_parser("build-variants", parents=[common], help="variant-name dictionary from a dump subset")
    s.add_argument("dump_file")
    s.add_argument("out_tsv")
    s.set_defaults(func=cmd_build_variants)

    s = sub.add_parser("link", parents=[common], help="link entity queries to KB nodes or NIL clusters")
    s.add_argument("queries")
    s.add_argument("--kb-index", dest="kb_index")
    s.add_argument("--source-index", dest="source_index", help="index of the query documents")
    s.add_argument("--variants")
    s.add_argument("--nil-strategy", dest="nil_strategy", choices=["top_score", "score_gap"])
    s.add_argument("--cluster-threshold", dest="cluster_threshold", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_link)

    s = sub.add_parser("train-sf", parents=[common], help="train slot classifiers by distant supervision")
    s.add_argument("facts")
    s.add_argument("--index", help="index of the training corpus")
    s.add_argument("--variants")
    s.add_argument("--slot-types", dest="slot_types")
    s.add_argument("--features", nargs="+", choices=FEATURES)
    s.add_argument("--infobox", action="store_true", help="fact table holds infobox attributes, not slots")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_train_sf)

    s = sub.add_parser("fill", parents=[common], help="fill slots for entity queries")
    s.add_argument("queries")
    s.add_argument("--index")
    s.add_argument("--models")
    s.add_argument("--variants")
    s.add_argument("--keywords")
    s.add_argument("--slot-types", dest="slot_types")
    s.add_argument("--no-coreference", dest="coreference", action="store_false", default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_fill)

    s = sub.add_parser("temporal", parents=[common], help="bound slot fills in time")
    s.add_argument("queries", help="JSON lines {entity, slot, value, doc}")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_temporal)

    s = sub.add_parser("evaluate", parents=[common], help="score system output against gold")
    s.add_argument("kind", choices=["el", "clusters", "coverage", "temporal"])
    s.add_argument("system")
    s.add_argument("gold")
    s.add_argument("--cutoffs", type=int, nargs="+", default=[1, 5, 10, 20])
    s.add_argument("--out", help="JSON report path")
    s.set_defaults(func=cmd_evaluate)
    return p


_CONFIG_FLAGS = ("top_n", "alpha", "beta", "strategy", "passage", "seed", "kb_index", "source_index", "index",
                 "variants", "keywords", "slot_types", "models", "nil_strategy", "cluster_threshold",
                 "features", "coreference")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.started = time.time()
    try:
        cfg = load_run_config(args.config, {k: getattr(args, k, None) for k in _CONFIG_FLAGS})
        random.seed(cfg.seed)
        return args.func(args, cfg)
    except (OperationalError, OSError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
