"""Command line front end: ``deftkit {convert,clean,train,tag,evaluate,augment}``.

Every command accepts ``--config FILE`` (JSON, keys named like the long
options; a manifest written by an earlier run also works) and flags that
override it. Each run writes ``manifest.json`` into its output directory.

Exit codes: 0 ok, 1 data error, 2 config error, 3 network error.
"""

import argparse
import hashlib
import json
import logging
import sys
import time
from collections import Counter
from pathlib import Path

from deftkit import __version__
from deftkit.augment import (FetchPolicy, RetryableFetchError, WikiClient, augment_terms,
                             emit_augmented, extract_terms, position_bias, write_skips)
from deftkit.classifier import (NaiveBayesModel, predict_file, read_predictions, train_nb,
                                write_predictions)
from deftkit.cleaning import clean_instances, summarize
from deftkit.corpus import (LABEL_RULES, concat_folder, holdout_split, list_corpus_files,
                            read_file, read_instances, serialize_file, to_classification,
                            write_instances)
from deftkit.errors import ConfigError, DeftError
from deftkit.metrics import CLASS_NAMES, render_report, score_classification, score_tokens
from deftkit.tags import TagSchema
from deftkit.tagger import ChainModel, tag_sentences, train_perceptron, validate_sequence

log = logging.getLogger("deftkit")

EXIT_OK, EXIT_DATA, EXIT_CONFIG, EXIT_NETWORK = 0, 1, 2, 3

DEFAULTS = {
    "convert": {"task": 1, "clean": False, "columns": 8, "schema": None,
                "label_rule": "substring", "pattern": "*.deft"},
    "clean": {},
    "train": {"task": 1, "alpha": 1.0, "epochs": 10, "seed": 0, "holdout": None,
              "columns": 8, "schema": None, "pattern": "*.deft"},
    "tag": {"task": 1, "columns": 8, "pattern": "*.deft"},
    "evaluate": {"task": 1, "exclude": "O", "columns": 8, "schema": None, "pattern": "*.deft"},
    "augment": {"task": 1, "offline": False, "cache": ".wiki_cache", "rate_limit": 1.0,
                "base_url": None, "copula_split": True, "workers": 1, "terms": None,
                "corpus": None, "columns": 8, "schema": None},
}
REQUIRED = {
    "convert": ("input", "out"),
    "clean": ("input", "out"),
    "train": ("input", "out"),
    "tag": ("model", "input", "out"),
    "evaluate": ("gold", "pred"),
    "augment": ("out",),
}
# entries that must exist before the command runs
INPUT_KEYS = ("input", "model", "gold", "pred", "terms", "corpus", "schema")


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _describe(path):
    p = Path(path)
    if p.is_dir():
        files = sorted(q for q in p.rglob("*") if q.is_file())
        return {"path": str(path), "files": {str(q.relative_to(p)): _sha256(q) for q in files}}
    return {"path": str(path), "sha256": _sha256(p)}


def write_manifest(out_dir, command, config, inputs, outputs, stats):
    canonical = json.dumps(config, sort_keys=True)
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "config_hash": hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
        "seed": config.get("seed"),
        "inputs": [_describe(p) for p in inputs],
        "outputs": [_describe(p) for p in outputs],
        "stats": stats,
        "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def resolve_config(command, args):
    """Built-in defaults, then the config file, then explicit flags."""
    config = dict(DEFAULTS[command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as f:
                loaded = json.load(f)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if "command" in loaded and "config" in loaded:
            if loaded["command"] != command:
                raise ConfigError(f"manifest is for {loaded['command']!r}, not {command!r}")
            loaded = loaded["config"]
        known = set(DEFAULTS[command]) | set(REQUIRED[command]) | {"out"}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        config.update(loaded)
    for key, value in vars(args).items():
        if key in ("config", "command", "func", "verbose") or value is None:
            continue
        config[key] = value
    missing = [k for k in REQUIRED[command] if config.get(k) is None]
    if missing:
        raise ConfigError(f"{command}: missing required setting(s) {missing}")
    if "task" in DEFAULTS[command] and config.get("task") not in (1, 2):
        raise ConfigError("task must be 1 or 2")
    for key in INPUT_KEYS:
        if config.get(key) is not None and not Path(config[key]).exists():
            raise ConfigError(f"{key} path does not exist: {config[key]}")
    return config


def _schema(config):
    return TagSchema.from_file(config["schema"]) if config.get("schema") else TagSchema()


def _corpus_paths(path, pattern):
    p = Path(path)
    return list_corpus_files(p, pattern) if p.is_dir() else [str(p)]


def _read_corpus(path, config, schema):
    paths = _corpus_paths(path, config.get("pattern", "*.deft"))
    return concat_folder(paths, schema, config.get("columns", 8),
                         config.get("label_rule", "substring")), paths


def _out_dir(config):
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_convert(config):
    schema = _schema(config)
    out = _out_dir(config)
    paths = _corpus_paths(config["input"], config["pattern"])
    per_file = []
    sentences = []
    for path in paths:
        part = read_file(path, schema, config["columns"], config["label_rule"])
        per_file.append({"path": path, "sentences": len(part),
                         "positives": sum(s.label for s in part)})
        sentences.extend(part)
    labels = Counter(str(s.label) for s in sentences)
    stats = {"files": per_file, "sentences": len(sentences),
             "label_distribution": dict(sorted(labels.items()))}
    if config["task"] == 1:
        instances = to_classification(sentences)
        if config["clean"]:
            instances, reports = clean_instances(instances)
            stats["cleaning"] = summarize(reports)
        target = out / "instances.tsv"
        write_instances(instances, target)
    else:
        target = out / "tokens.deft"
        target.write_bytes(serialize_file(sentences, config["columns"]))
        violations = []
        for i, s in enumerate(sentences):
            violations.extend({"sentence": i, "position": v.position, "tag": v.tag, "reason": v.reason}
                              for v in validate_sequence(s.tags, schema))
        tags = Counter(str(t) for s in sentences for t in s.tags)
        stats["validation"] = {"violations": len(violations), "examples": violations[:20],
                               "tag_counts": dict(sorted(tags.items()))}
    write_manifest(out, "convert", config, paths, [target], stats)
    print(f"converted {len(sentences)} sentences from {len(paths)} file(s) -> {target}")
    return EXIT_OK


def cmd_clean(config):
    out = _out_dir(config)
    instances = read_instances(config["input"])
    cleaned, reports = clean_instances(instances)
    target = out / "instances.tsv"
    write_instances(cleaned, target)
    stats = summarize(reports)
    write_manifest(out, "clean", config, [config["input"]], [target], stats)
    print("processed {sentences} sentences: {enumerations_stripped} enumerations stripped, "
          "{links_removed} links removed, {links_kept} links kept".format(**stats))
    return EXIT_OK


def cmd_train(config):
    out = _out_dir(config)
    stats = {}
    if config["task"] == 1:
        data = read_instances(config["input"])
        inputs = [config["input"]]
        heldout = None
        if config["holdout"]:
            data, heldout = holdout_split(data, config["holdout"], config["seed"])
        model = train_nb(data, config["alpha"])
        model.check()
        target = out / "model.nb"
        model.save(target)
        stats.update(train_size=len(data), vocab_size=len(model.vocab))
        if heldout:
            preds = [model.predict(x.text).label for x in heldout]
            stats["holdout"] = score_classification([x.label for x in heldout], preds).to_dict()
    else:
        schema = _schema(config)
        data, inputs = _read_corpus(config["input"], config, schema)
        heldout = None
        if config["holdout"]:
            data, heldout = holdout_split(data, config["holdout"], config["seed"])
        model = train_perceptron(data, config["epochs"], config["seed"], schema)
        target = out / "model.chain"
        model.save(target)
        stats.update(train_size=len(data), features=len(model.feature_index),
                     mistakes_per_epoch=model.mistakes_per_epoch)
        if heldout:
            pred = [model.tag(s) for s in heldout]
            stats["holdout"] = score_tokens([s.tags for s in heldout], pred, schema=schema).to_dict()
    write_manifest(out, "train", config, inputs, [target], stats)
    print(f"trained task {config['task']} model on {stats['train_size']} examples -> {target}")
    return EXIT_OK


def cmd_tag(config):
    out = _out_dir(config)
    if config["task"] == 1:
        model = NaiveBayesModel.load(config["model"])
        instances = read_instances(config["input"])
        preds = predict_file(model, instances)
        target = out / "predictions.tsv"
        write_predictions(preds, target)
        inputs = [config["model"], config["input"]]
        stats = {"instances": len(preds), "predicted_positive": sum(p.label for p in preds)}
    else:
        model = ChainModel.load(config["model"])
        sentences, paths = _read_corpus(config["input"], config, model.schema)
        tagged = tag_sentences(model, sentences)
        target = out / "predictions.deft"
        target.write_bytes(serialize_file(tagged, config["columns"]))
        inputs = [config["model"]] + paths
        stats = {"sentences": len(tagged), "tokens": sum(len(s) for s in tagged)}
    write_manifest(out, "tag", config, inputs, [target], stats)
    print(f"wrote predictions -> {target}")
    return EXIT_OK


def cmd_evaluate(config):
    if config["task"] == 1:
        gold = read_instances(config["gold"])
        preds = predict_file(config["pred"], gold)
        report = score_classification([g.label for g in gold], [p.label for p in preds])
        names = CLASS_NAMES
    else:
        schema = _schema(config)
        gold, _ = _read_corpus(config["gold"], config, schema)
        pred, _ = _read_corpus(config["pred"], config, schema)
        exclude = [e for e in str(config["exclude"]).split(",") if e]
        report = score_tokens([s.tags for s in gold], [s.tags for s in pred], exclude, schema)
        names = None
    table = render_report(report, names)
    print(table, end="")
    if config.get("out"):
        out = _out_dir(config)
        (out / "report.txt").write_text(table, encoding="utf-8")
        (out / "metrics.txt").write_text(report.to_lines(), encoding="utf-8")
        write_manifest(out, "evaluate", config, [config["gold"], config["pred"]],
                       [out / "report.txt", out / "metrics.txt"], report.to_dict())
    return EXIT_OK


def cmd_augment(config):
    if bool(config.get("terms")) == bool(config.get("corpus")):
        raise ConfigError("augment needs exactly one of --terms or --corpus")
    out = _out_dir(config)
    if config.get("terms"):
        with open(config["terms"], encoding="utf-8") as f:
            terms = [line.strip() for line in f if line.strip()]
        inputs = [config["terms"]]
    else:
        sentences, inputs = _read_corpus(config["corpus"], config, _schema(config))
        terms = extract_terms(sentences)
    policy = FetchPolicy(rate_limit=config["rate_limit"], cache_dir=config["cache"],
                         offline=config["offline"])
    if config.get("base_url"):
        policy.base_url = config["base_url"]
    client = WikiClient(policy)
    examples, skips = augment_terms(terms, client, workers=config["workers"])
    written = emit_augmented(examples, config["task"], out, config["copula_split"])
    write_skips(skips, out / "skipped.tsv")
    bias = position_bias(examples)
    stats = {"terms": len(terms), "examples": len(examples), "skipped": len(skips),
             "skip_reasons": dict(sorted(Counter(s.reason for s in skips).items())),
             "position_bias": {str(k): bias[k] for k in sorted(bias)},
             "network_requests": client.requests_made}
    outputs = [written["examples"], written["position_bias"], out / "skipped.tsv"]
    write_manifest(out, "augment", config, inputs, outputs, stats)
    print(f"{len(examples)} augmented examples, {len(skips)} skipped -> {written['examples']}")
    return EXIT_OK


COMMANDS = {"convert": cmd_convert, "clean": cmd_clean, "train": cmd_train,
            "tag": cmd_tag, "evaluate": cmd_evaluate, "augment": cmd_augment}


def build_parser():
    parser = argparse.ArgumentParser(prog="deftkit", description="Definition extraction toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="JSON config or an earlier manifest.json")
        p.add_argument("--out", help="output directory")
        return p

    def corpus_opts(p):
        p.add_argument("--columns", type=int, help="columns per token line (4-8, default 8)")
        p.add_argument("--schema", help="file with one tag type per line")
        p.add_argument("--pattern", help="glob for corpus files inside a folder (default *.deft)")

    def task_opt(p):
        p.add_argument("--task", type=int, choices=(1, 2), help="1 = sentences, 2 = tokens")

    p = add("convert", "Concatenate a DEFT folder into instances (task 1) or one token file (task 2).")
    p.add_argument("--input", help="corpus folder or file")
    task_opt(p)
    p.add_argument("--clean", action="store_true", default=None, help="clean task-1 text")
    p.add_argument("--label-rule", choices=LABEL_RULES)
    corpus_opts(p)

    p = add("clean", "Strip enumerators and ([link]) placeholders from text<TAB>label instances.")
    p.add_argument("--input", help="instances file")

    p = add("train", "Train the Naive Bayes baseline (task 1) or perceptron tagger (task 2).")
    p.add_argument("--input", help="instances file (task 1) or DEFT file/folder (task 2)")
    task_opt(p)
    p.add_argument("--alpha", type=float, help="Laplace smoothing (default 1.0)")
    p.add_argument("--epochs", type=int, help="perceptron epochs (default 10)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--holdout", type=float, help="score on a held-out fraction, e.g. 0.2")
    corpus_opts(p)

    p = add("tag", "Apply a trained model.")
    p.add_argument("--model")
    p.add_argument("--input", help="instances file (task 1) or DEFT file/folder (task 2)")
    task_opt(p)
    p.add_argument("--columns", type=int)
    p.add_argument("--pattern")

    p = add("evaluate", "Score predictions against gold data.")
    p.add_argument("--gold")
    p.add_argument("--pred", help="label[<TAB>score] lines (task 1) or DEFT file/folder (task 2)")
    task_opt(p)
    p.add_argument("--exclude", help="comma-separated tags left out of overall scores (default O)")
    corpus_opts(p)

    p = add("augment", "Fetch Wikipedia first sentences for terms and label them.")
    p.add_argument("--terms", help="file with one term per line")
    p.add_argument("--corpus", help="DEFT file/folder to take Term spans from instead")
    task_opt(p)
    p.add_argument("--offline", action="store_true", default=None, help="use the cache only")
    p.add_argument("--cache", help="cache directory (default .wiki_cache)")
    p.add_argument("--rate-limit", type=float, help="requests per second (default 1)")
    p.add_argument("--base-url", help="REST API base URL")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-copula-split", dest="copula_split", action="store_false", default=None,
                   help="label only the term in task-2 output")
    corpus_opts(p)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args.command, args)
        return COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RetryableFetchError as exc:
        print(f"network error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except (DeftError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
