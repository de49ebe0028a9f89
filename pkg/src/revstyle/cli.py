"""Command-line entry point exposing the full pipeline as subcommands.

Runs are reproducible: one seed drives all randomness, every artifact
carries a metadata header (version, seed, corpus hash, effective config,
timestamp), and files are written atomically via temp-file-plus-rename.
Option precedence is flags > config file > defaults, where the config file
is flat key=value text. Exit codes: 0 success, 2 usage/validation error,
3 runtime failure.
"""
from __future__ import annotations

import argparse
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .charts import render_line_chart
from .corpus import (
    FIELDS,
    CorpusError,
    classify_gender,
    classify_nativeness,
    corpus_sha256,
    enrich_authors,
    load_corpus,
    dump_corpus,
    read_lookup_table,
    GENDERS,
    ETHNICITIES,
    NATIVENESS,
)
from .detector import (
    DetectorError,
    adoption_series,
    crossval_train,
    evaluate,
    load_detector,
    save_detector,
    temporal_split,
    DEFAULT_TEST_END,
    DEFAULT_TEST_START,
    DEFAULT_TRAIN_END,
)
from .econometrics import (
    EconometricsError,
    assemble_design,
    coefficient_table,
    fit_multinomial_logit,
    fit_ols_fe,
    parse_model_spec,
    TABLE_LAYOUTS,
)
from .features import FeatureError, PrecomputedEmbeddings
from .rules import RULE_NAMES, RuleError, measure_corpus, summarize
from .similarity import SimilarityError, did_statistic, pairwise_series
from .textproc import LexiconError, load_lexicons

_VALIDATION_ERRORS = (
    CorpusError,
    LexiconError,
    RuleError,
    SimilarityError,
    EconometricsError,
    DetectorError,
    FeatureError,
    FileNotFoundError,
    NotADirectoryError,
)


# ---------------------------------------------------------------------------
# Config handling and artifact writing
# ---------------------------------------------------------------------------


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read config file {path}: {exc}") from exc
    pairs = {}
    for line_no, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise CorpusError(f"{path} line {line_no}: expected key=value, got {line!r}")
        key, value = body.split("=", 1)
        pairs[key.strip().replace("-", "_")] = value.strip()
    return pairs


class RunConfig:
    """Effective options for one command: flags > config file > defaults."""

    def __init__(self, args: argparse.Namespace, defaults: dict[str, object]):
        self._flags = vars(args)
        self._file = read_config_file(args.config) if getattr(args, "config", None) else {}
        self._defaults = defaults
        self.used: dict[str, object] = {}

    def get(self, key: str):
        flag = self._flags.get(key)
        if flag is not None:
            value = flag
        elif key in self._file:
            value = self._file[key]
            default = self._defaults.get(key)
            if isinstance(default, bool) or key in ("stopwords", "idf", "hedge_counts", "all_authors"):
                value = str(value).lower() == "true"
            elif isinstance(default, int):
                value = int(value)
            elif isinstance(default, float):
                value = float(value)
        else:
            value = self._defaults.get(key)
        self.used[key] = value
        return value

    def config_echo(self) -> str:
        parts = []
        for key in sorted(self.used):
            value = self.used[key]
            if value is None or key in ("config", "seed"):
                continue
            parts.append(f"{key}={value}")
        return " ".join(parts)


def metadata_header(config: RunConfig, corpus_hash: str | None, xml: bool = False) -> str:
    lines = [
        f"revstyle {__version__}",
        f"seed={config.get('seed')}",
    ]
    if corpus_hash is not None:
        lines.append(f"corpus_sha256={corpus_hash}")
    lines.append(f"config {config.config_echo()}")
    lines.append(f"timestamp={datetime.now(timezone.utc).isoformat()}")
    if xml:
        return "".join(f"<!-- {line} -->\n" for line in lines)
    return "".join(f"# {line}\n" for line in lines)


def atomic_write(path: Path, data: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode, encoding=None if isinstance(data, bytes) else "utf-8") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.get("out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus_from(config: RunConfig):
    corpus_path = config.get("corpus")
    if not corpus_path:
        raise CorpusError("--corpus is required (flag or config file)")
    return load_corpus(corpus_path, fmt=config.get("format") or "jsonl")


def _lexicons_from(config: RunConfig):
    return load_lexicons(config.get("lexicons"))


def _fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _read_series_csv(path: Path) -> list[tuple[str, float | None]]:
    """Read (month, value) pairs from a CSV artifact, skipping '#' headers.

    Uses the 'value' column, falling back to 'adjusted'."""
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise CorpusError(f"{path}: no data rows")
    header = lines[0].split(",")
    if "month" not in header:
        raise CorpusError(f"{path}: no 'month' column in header {header}")
    value_col = "value" if "value" in header else "adjusted" if "adjusted" in header else None
    if value_col is None:
        raise CorpusError(f"{path}: no 'value' or 'adjusted' column")
    m_idx, v_idx = header.index("month"), header.index(value_col)
    pairs = []
    for line in lines[1:]:
        cells = line.split(",")
        raw = cells[v_idx].strip()
        pairs.append((cells[m_idx], float(raw) if raw else None))
    return pairs


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    config = RunConfig(args, {"out": "out", "seed": 0, "format": "jsonl"})
    articles = _load_corpus_from(config)
    gender_table = (
        read_lookup_table(config.get("gender_table"), valid_values=GENDERS)
        if config.get("gender_table")
        else None
    )
    ethnicity_table = (
        read_lookup_table(config.get("ethnicity_table"), valid_values=ETHNICITIES)
        if config.get("ethnicity_table")
        else None
    )
    articles, report = enrich_authors(articles, gender_table, ethnicity_table)
    out = _out_dir(config)
    header = metadata_header(config, corpus_sha256(articles))

    atomic_write(out / "corpus.jsonl", header + dump_corpus(articles))

    lines = [f"articles: {len(articles)}", f"authors: {report.n_authors}"]
    for label, rate in report.match_rates().items():
        lines.append(f"{label} match rate: {rate:.4f}")
    for field_name in FIELDS:
        n = sum(1 for a in articles if a.field == field_name)
        if n:
            lines.append(f"field {field_name}: {n}")
    for label in range(7):
        n = sum(1 for a in articles if a.revision_label == label)
        if n:
            lines.append(f"revision_label {label}: {n}")
    for kind in NATIVENESS:
        lines.append(f"nativeness {kind}: {sum(1 for a in articles if classify_nativeness(a) == kind)}")
    atomic_write(out / "ingest_report.txt", header + "\n".join(lines) + "\n")
    print(f"ingested {len(articles)} articles -> {out / 'corpus.jsonl'}")
    return 0


def cmd_rules(args) -> int:
    config = RunConfig(args, {"out": "out", "seed": 0, "format": "jsonl", "hedge_counts": False})
    articles = _load_corpus_from(config)
    lexicons = _lexicons_from(config)
    rows = measure_corpus(articles, lexicons, hedge_as_count=config.get("hedge_counts"))
    out = _out_dir(config)
    header = metadata_header(config, corpus_sha256(articles))

    body = ["id," + ",".join(RULE_NAMES)]
    mask = ["id,defaulted"]
    for art_id, vec in rows:
        body.append(art_id + "," + ",".join(_fmt_value(v) for v in vec.as_row()))
        mask.append(art_id + "," + ";".join(sorted(vec.defaulted)))
    atomic_write(out / "rules.csv", header + "\n".join(body) + "\n")
    atomic_write(out / "rules_mask.csv", header + "\n".join(mask) + "\n")

    stats = summarize(rows)
    summary = ["rule,mean,sd,p25,p75,min,max"]
    for name in RULE_NAMES:
        s = stats[name]
        summary.append(
            f"{name},{s['mean']:.6f},{s['sd']:.6f},{s['p25']:.6f},{s['p75']:.6f},{s['min']:.6f},{s['max']:.6f}"
        )
    atomic_write(out / "rules_summary.csv", header + "\n".join(summary) + "\n")
    print(f"measured {len(rows)} articles -> {out / 'rules.csv'}")
    return 0


def cmd_similarity(args) -> int:
    config = RunConfig(
        args,
        {
            "out": "out",
            "seed": 0,
            "format": "jsonl",
            "mode": "centroid",
            "group_a": "all",
            "group_b": None,
            "label_a": "a",
            "label_b": "b",
            "stopwords": False,
            "idf": False,
        },
    )
    articles = _load_corpus_from(config)
    mode = config.get("mode")
    series = pairwise_series(
        articles,
        group_a=config.get("group_a"),
        group_b=config.get("group_b") if mode == "centroid" else None,
        mode=mode,
        label_a=config.get("label_a"),
        label_b=config.get("label_b"),
        remove_stopwords=config.get("stopwords"),
        idf_weighting=config.get("idf"),
    )
    out = _out_dir(config)
    header = metadata_header(config, corpus_sha256(articles))
    body = ["month,value,n_a,n_b"]
    for month, value, n_a, n_b in zip(series.months, series.values, series.n_a, series.n_b):
        body.append(f"{month},{_fmt_value(value)},{n_a},{n_b}")
    atomic_write(out / "similarity.csv", header + "\n".join(body) + "\n")
    print(f"{mode} series over {len(series.months)} months -> {out / 'similarity.csv'}")
    return 0


def _adoption_groups(config: RunConfig, articles) -> dict[str, object]:
    by = config.get("by")
    group_specs = config.get("group")
    if by and group_specs:
        raise CorpusError("use either --by or --group, not both")
    if by:
        if by == "field":
            return {f: f"field={f}" for f in FIELDS if any(a.field == f for a in articles)}
        if by == "nativeness":
            return {v: f"nativeness={v}" for v in NATIVENESS}
        if by == "gender":
            present = {classify_gender(a) for a in articles}
            return {v: f"gender={v}" for v in ("male", "female", "mixed", "unknown") if v in present}
        if by == "seniority":
            return {v: f"seniority={v}" for v in ("senior", "junior")}
        raise CorpusError(f"unknown --by dimension {by!r}")
    if group_specs:
        groups = {}
        for item in group_specs if isinstance(group_specs, list) else [group_specs]:
            label, _, spec = item.partition(":")
            groups[label] = spec if spec else label
        return groups
    return {"all": None}


def cmd_adopt(args) -> int:
    config = RunConfig(
        args,
        {
            "out": "out",
            "seed": 0,
            "format": "jsonl",
            "event_month": "2022-11",
            "by": None,
            "group": None,
            "model": None,
            "baseline_window": None,
            "threshold": 0.5,
            "embeddings": None,
        },
    )
    articles = _load_corpus_from(config)
    detector = load_detector(config.get("model")) if config.get("model") else None
    embeddings = PrecomputedEmbeddings(config.get("embeddings")) if config.get("embeddings") else None
    window = config.get("baseline_window")
    groups = _adoption_groups(config, articles)
    series = adoption_series(
        articles,
        detector=detector,
        group_filters=groups,
        event_month=config.get("event_month"),
        baseline_window=int(window) if window is not None else None,
        threshold=float(config.get("threshold")),
        embeddings=embeddings,
    )
    out = _out_dir(config)
    header = metadata_header(config, corpus_sha256(articles))
    body = ["group,month,raw,adjusted,n"]
    for label in sorted(series):
        s = series[label]
        for month, raw, adj, n in zip(s.months, s.raw, s.adjusted, s.counts):
            body.append(f"{label},{month},{_fmt_value(raw)},{_fmt_value(adj)},{n}")
    atomic_write(out / "adoption.csv", header + "\n".join(body) + "\n")
    print(f"adoption series for {len(series)} group(s) -> {out / 'adoption.csv'}")
    return 0


def cmd_regress(args) -> int:
    config = RunConfig(
        args,
        {"out": "out", "seed": 0, "format": "jsonl", "layout": None, "hedge_counts": False},
    )
    articles = _load_corpus_from(config)
    spec_path = config.get("model_spec")
    if not spec_path:
        raise EconometricsError("--model-spec is required")
    spec = parse_model_spec(spec_path)
    lexicons = _lexicons_from(config)

    fits = {}
    if spec.model == "logit":
        design = assemble_design(
            articles, spec.responses[0], spec.regressors, lexicons=lexicons, normalize=spec.normalize
        )
        fit = fit_multinomial_logit(design, baseline_class=spec.baseline_class, vce=spec.vce)
        for cls, result in fit.per_class().items():
            fits[f"Version {cls}"] = result
        layout = config.get("layout") or "logit"
    else:
        for response in spec.responses:
            design = assemble_design(
                articles,
                response,
                spec.regressors,
                lexicons=lexicons,
                normalize=spec.normalize,
                hedge_as_count=config.get("hedge_counts"),
            )
            fits[response] = fit_ols_fe(design, fe=spec.fe, vce=spec.vce)
        layout = config.get("layout") or ("article_fe" if "article" in spec.fe else "time_fe")
    if layout not in TABLE_LAYOUTS:
        raise EconometricsError(f"unknown layout {layout!r} (expected one of {TABLE_LAYOUTS})")

    table = coefficient_table(fits, layout)
    out = _out_dir(config)
    header = metadata_header(config, corpus_sha256(articles))
    atomic_write(out / "coefficients.csv", header + table.to_csv())
    atomic_write(out / "coefficients.txt", header + table.to_text())
    print(f"{spec.model} fit ({len(fits)} column(s), layout {layout}) -> {out / 'coefficients.csv'}")
    return 0


def cmd_train(args) -> int:
    config = RunConfig(
        args,
        {
            "out": "out",
            "seed": 0,
            "format": "jsonl",
            "scope_field": "all",
            "prompt": "multiclass",
            "train_end": DEFAULT_TRAIN_END,
            "test_start": DEFAULT_TEST_START,
            "test_end": DEFAULT_TEST_END,
            "k": 5,
            "patience": 10,
            "l2_grid": "0.1,1.0,10.0",
            "dim_grid": str(2**14) + "," + str(2**18),
            "embeddings": None,
        },
    )
    articles = _load_corpus_from(config)
    lexicons = _lexicons_from(config)
    train, test = temporal_split(
        articles,
        train_end=config.get("train_end"),
        test_start=config.get("test_start"),
        test_end=config.get("test_end"),
    )
    prompt = config.get("prompt")
    scope_prompt = prompt if prompt == "multiclass" else int(prompt)
    embeddings = PrecomputedEmbeddings(config.get("embeddings")) if config.get("embeddings") else None
    seed = int(config.get("seed"))

    detector = crossval_train(
        train,
        scope_field=config.get("scope_field"),
        scope_prompt=scope_prompt,
        k=int(config.get("k")),
        patience=int(config.get("patience")),
        l2_grid=tuple(float(v) for v in str(config.get("l2_grid")).split(",") if v),
        dim_grid=tuple(int(v) for v in str(config.get("dim_grid")).split(",") if v),
        lexicons=lexicons,
        embeddings=embeddings,
        seed=seed,
        meta={
            "train_end": config.get("train_end"),
            "test_start": config.get("test_start"),
            "test_end": config.get("test_end"),
            "corpus_sha256": corpus_sha256(articles),
        },
    )
    out = _out_dir(config)
    model_path = out / "detector.rsd"
    fd, tmp_name = tempfile.mkstemp(dir=out, prefix=".detector.rsd.")
    os.close(fd)
    tmp = Path(tmp_name)
    try:
        save_detector(detector, tmp)
        os.replace(tmp, model_path)
    except BaseException:
        if tmp.exists():
            tmp.unlink()
        raise

    header = metadata_header(config, detector.meta["corpus_sha256"])
    lines = [
        f"scope: field={detector.scope_field} prompt={detector.scope_prompt}",
        f"train articles in scope: {detector.meta['n_train']} (test pool: {len(test)})",
        f"chosen l2: {detector.l2}",
        f"chosen char n-gram dim: {detector.char_dim}",
        f"cv accuracy: {detector.meta['cv_accuracy']:.6f}",
        f"grid evaluations: {detector.meta['evaluations']}",
        f"class counts: {detector.meta['class_counts']}",
    ]
    if "hash_collisions" in detector.meta:
        lines.append(f"hash collisions: {detector.meta['hash_collisions']}")
    atomic_write(out / "train_report.txt", header + "\n".join(lines) + "\n")
    print(f"trained detector (cv accuracy {detector.meta['cv_accuracy']:.4f}) -> {model_path}")
    return 0


def cmd_eval(args) -> int:
    config = RunConfig(
        args,
        {
            "out": "out",
            "seed": 0,
            "format": "jsonl",
            "threshold": 0.5,
            "embeddings": None,
            "test_start": None,
            "test_end": None,
        },
    )
    model_path = config.get("model")
    if not model_path:
        raise DetectorError("--model is required")
    detector = load_detector(model_path)
    articles = _load_corpus_from(config)
    test_start = config.get("test_start") or detector.meta.get("test_start", DEFAULT_TEST_START)
    test_end = config.get("test_end") or detector.meta.get("test_end", DEFAULT_TEST_END)
    test = [a for a in articles if test_start <= a.updated[:10] <= test_end]
    if not test:
        raise DetectorError(f"no articles between {test_start} and {test_end} to evaluate on")
    embeddings = PrecomputedEmbeddings(config.get("embeddings")) if config.get("embeddings") else None
    report = evaluate(detector, test, threshold=float(config.get("threshold")), embeddings=embeddings)

    out = _out_dir(config)
    header = metadata_header(config, corpus_sha256(articles))
    metrics = [
        "precision,recall,accuracy,f1,n_test",
        f"{report.precision:.6f},{report.recall:.6f},{report.accuracy:.6f},{report.f1:.6f},{report.n_test}",
    ]
    atomic_write(out / "eval_metrics.csv", header + "\n".join(metrics) + "\n")
    atomic_write(out / "confusion.txt", header + report.format_confusion())
    preds = ["id,true,pred," + ",".join(f"p{c}" for c in report.classes)]
    for rec in report.records:
        preds.append(
            f"{rec['id']},{rec['true']},{rec['pred']}," + ",".join(f"{p:.6f}" for p in rec["probs"])
        )
    atomic_write(out / "predictions.csv", header + "\n".join(preds) + "\n")
    print(
        f"evaluated {report.n_test} articles: precision {report.precision:.4f} "
        f"recall {report.recall:.4f} accuracy {report.accuracy:.4f} f1 {report.f1:.4f}"
    )
    return 0


def cmd_series(args) -> int:
    config = RunConfig(
        args, {"out": "out", "seed": 0, "event_month": "2022-11", "boot": 1000}
    )
    treated_path, control_path = config.get("treated"), config.get("control")
    if not treated_path or not control_path:
        raise SimilarityError("--treated and --control series CSVs are required")
    treated = _read_series_csv(Path(treated_path))
    control = _read_series_csv(Path(control_path))
    result = did_statistic(
        treated,
        control,
        event_month=config.get("event_month"),
        n_boot=int(config.get("boot")),
        seed=int(config.get("seed")),
    )
    out = _out_dir(config)
    header = metadata_header(config, None)
    body = [
        "estimate,pre_gap,post_gap,ci_low,ci_high,n_pre,n_post,n_boot,event_month",
        f"{result.estimate:.6f},{result.pre_gap:.6f},{result.post_gap:.6f},"
        f"{result.ci_low:.6f},{result.ci_high:.6f},{result.n_pre},{result.n_post},"
        f"{result.n_boot},{result.event_month}",
    ]
    atomic_write(out / "did.csv", header + "\n".join(body) + "\n")
    print(
        f"did estimate {result.estimate:.4f} (95% CI [{result.ci_low:.4f}, {result.ci_high:.4f}]) "
        f"-> {out / 'did.csv'}"
    )
    return 0


def cmd_report(args) -> int:
    config = RunConfig(
        args, {"out": "out", "seed": 0, "event_month": "2022-11", "kind": "similarity", "title": ""}
    )
    input_path = config.get("input")
    if not input_path:
        raise CorpusError("--input CSV is required")
    input_path = Path(input_path)
    kind = config.get("kind")
    out = _out_dir(config)
    header = metadata_header(config, None, xml=True)
    written = []

    if kind == "similarity":
        pairs = _read_series_csv(input_path)
        svg = render_line_chart(
            {"similarity": pairs},
            title=config.get("title") or "Style convergence",
            y_label="cosine similarity",
            event_month=config.get("event_month"),
        )
        path = out / "chart.svg"
        atomic_write(path, header + svg)
        written.append(path)
    elif kind == "adoption":
        lines = [
            ln for ln in input_path.read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")
        ]
        head = lines[0].split(",")
        for col in ("group", "month", "adjusted"):
            if col not in head:
                raise CorpusError(f"{input_path}: adoption CSV needs a {col!r} column")
        g_i, m_i, a_i = head.index("group"), head.index("month"), head.index("adjusted")
        by_group: dict[str, list[tuple[str, float | None]]] = {}
        for line in lines[1:]:
            cells = line.split(",")
            raw = cells[a_i].strip()
            by_group.setdefault(cells[g_i], []).append((cells[m_i], float(raw) if raw else None))
        for group, pairs in sorted(by_group.items()):
            svg = render_line_chart(
                {group: pairs},
                title=config.get("title") or f"Adjusted adoption: {group}",
                y_label="adjusted adoption %",
                event_month=config.get("event_month"),
            )
            safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in group)
            path = out / f"chart_{safe}.svg"
            atomic_write(path, header + svg)
            written.append(path)
    else:
        raise CorpusError(f"unknown report kind {kind!r} (similarity or adoption)")
    print(f"wrote {len(written)} chart(s) to {out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, corpus: bool = True) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--out", help="output directory (default: out)")
    sub.add_argument("--seed", type=int, help="seed for all randomness (default: 0)")
    if corpus:
        sub.add_argument("--corpus", help="corpus file (jsonl or csv)")
        sub.add_argument("--format", choices=["jsonl", "csv"], help="corpus file format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revstyle",
        description="Corpus analytics for LLM-assisted revision of scholarly abstracts.",
    )
    parser.add_argument("--version", action="version", version=f"revstyle {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("ingest", help="validate a corpus and enrich author attributes")
    _add_common(p)
    p.add_argument("--gender-table", dest="gender_table", help="name<TAB>gender lookup table")
    p.add_argument("--ethnicity-table", dest="ethnicity_table", help="name<TAB>ethnicity lookup table")
    p.set_defaults(func=cmd_ingest)

    p = subs.add_parser("rules", help="compute writing-rule metrics per article")
    _add_common(p)
    p.add_argument("--lexicons", help="directory of lexicon .txt files")
    p.add_argument("--hedge-counts", dest="hedge_counts", action="store_const", const=True,
                   help="rule9 as 100 x hedge count instead of presence")
    p.set_defaults(func=cmd_rules)

    p = subs.add_parser("similarity", help="monthly style-similarity series")
    _add_common(p)
    p.add_argument("--mode", choices=["centroid", "article_vs_revision"])
    p.add_argument("--group-a", dest="group_a", help="filter, e.g. adopter=true or seniority=junior")
    p.add_argument("--group-b", dest="group_b", help="second filter (centroid mode)")
    p.add_argument("--label-a", dest="label_a")
    p.add_argument("--label-b", dest="label_b")
    p.add_argument("--stopwords", action="store_const", const=True, help="drop stopwords")
    p.add_argument("--idf", action="store_const", const=True, help="apply IDF weighting")
    p.set_defaults(func=cmd_similarity)

    p = subs.add_parser("adopt", help="baseline-adjusted monthly adoption series")
    _add_common(p)
    p.add_argument("--model", help="trained detector file (otherwise labels are used)")
    p.add_argument("--by", choices=["field", "nativeness", "gender", "seniority"],
                   help="emit one series per category of this dimension")
    p.add_argument("--group", action="append", help="label:filter spec (repeatable)")
    p.add_argument("--event-month", dest="event_month", help="YYYY-MM (default 2022-11)")
    p.add_argument("--baseline-window", dest="baseline_window", type=int,
                   help="number of pre-event months in the baseline (default: all)")
    p.add_argument("--threshold", type=float, help="binary decision threshold (default 0.5)")
    p.add_argument("--embeddings", help="id<TAB>floats embedding file")
    p.set_defaults(func=cmd_adopt)

    p = subs.add_parser("regress", help="fit a model from a spec file and tabulate it")
    _add_common(p)
    p.add_argument("--model-spec", dest="model_spec", help="key=value model specification file")
    p.add_argument("--layout", choices=list(TABLE_LAYOUTS), help="table footer layout")
    p.add_argument("--lexicons", help="directory of lexicon .txt files")
    p.add_argument("--hedge-counts", dest="hedge_counts", action="store_const", const=True)
    p.set_defaults(func=cmd_regress)

    p = subs.add_parser("train", help="train a revision detector with the temporal protocol")
    _add_common(p)
    p.add_argument("--lexicons", help="directory of lexicon .txt files")
    p.add_argument("--scope-field", dest="scope_field", help="discipline scope or 'all'")
    p.add_argument("--prompt", help="1..6 for binary, or 'multiclass'")
    p.add_argument("--train-end", dest="train_end")
    p.add_argument("--test-start", dest="test_start")
    p.add_argument("--test-end", dest="test_end")
    p.add_argument("--k", type=int, help="cross-validation folds (default 5)")
    p.add_argument("--patience", type=int, help="early-stopping patience in evaluations")
    p.add_argument("--l2-grid", dest="l2_grid", help="comma list of L2 strengths")
    p.add_argument("--dim-grid", dest="dim_grid", help="comma list of char n-gram hash dims")
    p.add_argument("--embeddings", help="id<TAB>floats embedding file")
    p.set_defaults(func=cmd_train)

    p = subs.add_parser("eval", help="evaluate a trained detector on the test window")
    _add_common(p)
    p.add_argument("--model", help="trained detector file")
    p.add_argument("--threshold", type=float)
    p.add_argument("--test-start", dest="test_start")
    p.add_argument("--test-end", dest="test_end")
    p.add_argument("--embeddings", help="id<TAB>floats embedding file")
    p.set_defaults(func=cmd_eval)

    p = subs.add_parser("series", help="difference-in-differences between two series CSVs")
    _add_common(p, corpus=False)
    p.add_argument("--treated", help="treated series CSV (month,value)")
    p.add_argument("--control", help="control series CSV (month,value)")
    p.add_argument("--event-month", dest="event_month")
    p.add_argument("--boot", type=int, help="bootstrap resamples (default 1000)")
    p.set_defaults(func=cmd_series)

    p = subs.add_parser("report", help="render series CSVs as SVG line charts")
    _add_common(p, corpus=False)
    p.add_argument("--input", help="series CSV from similarity/adopt")
    p.add_argument("--kind", choices=["similarity", "adoption"])
    p.add_argument("--event-month", dest="event_month")
    p.add_argument("--title")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
