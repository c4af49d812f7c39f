"""Command-line pipeline: extract, analyze, select, evaluate, sweep.

Each stage reads the previous stage's files from ``--out`` (or explicit
paths) and writes its own, so stages can be rerun independently::

    reprofeat extract  --corpus data/demo/corpus --offline --out run/
    reprofeat analyze  --out run/
    reprofeat select   --out run/
    reprofeat evaluate --out run/
    reprofeat sweep    --out run/

Every artifact carries a provenance record: the configuration (minus output
and cache locations) and the seed. Offline runs are byte-for-byte
reproducible.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .analysis import (
    MI_EXTRAS,
    TOP_ANOVA,
    AnalysisReport,
    analyze,
    min_max_normalize,
    sweep_top_features,
)
from .classify import CLASSIFIERS, cross_validate
from .features import (
    CATEGORICAL,
    AsjcTable,
    FeatureMatrix,
    assemble_matrix,
    derive_features,
    read_matrix,
    write_matrix,
)
from .ingest import PaperRecord, RecordError, load_corpus, validate_record
from .matchers import AUTHOR_THRESHOLD, TITLE_THRESHOLD, UNIVERSITY_THRESHOLD, RankTable
from .metaclients import MetadataClient
from .statparse import statistical_features_from_text

logger = logging.getLogger("reprofeat")

COMMANDS = ("extract", "analyze", "select", "evaluate", "sweep")
FEATURE_SETS = ("core", "reduced", "top")

MATRIX_FILE = "features.csv"
MASK_FILE = "features_mask.csv"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    corpus: str | None = None
    out: str = "out"
    cache_dir: str | None = None
    fixtures: str | None = None
    offline: bool = False
    matrix: str | None = None
    seed: int = 42
    now_year: int = field(default_factory=lambda: date.today().year)
    min_real: int = 15
    tau_threshold: float = 0.8
    title_threshold: float = TITLE_THRESHOLD
    author_threshold: float = AUTHOR_THRESHOLD
    university_threshold: float = UNIVERSITY_THRESHOLD
    classifier: list[str] = field(default_factory=list)
    top_k: int | None = None
    repeats: int | None = None
    folds: int = 5
    workers: int = 4

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("tau_threshold", "title_threshold", "author_threshold", "university_threshold"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ConfigError(f"--{name.replace('_', '-')} must lie in (0, 1], got {value}")
        if self.min_real < 0:
            raise ConfigError("--min-real must be >= 0")
        if self.folds < 2:
            raise ConfigError("--folds must be >= 2")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if self.repeats is not None and self.repeats < 1:
            raise ConfigError("--repeats must be >= 1")
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError("--top-k must be >= 1")
        unknown = [c for c in self.classifier if c not in CLASSIFIERS]
        if unknown:
            raise ConfigError(f"unknown classifier(s) {', '.join(unknown)}; choose from {', '.join(CLASSIFIERS)}")
        if self.command == "extract":
            if not self.corpus:
                raise ConfigError("extract needs --corpus")
            if not Path(self.corpus).exists():
                raise ConfigError(f"corpus {self.corpus} does not exist")
            if self.offline and not self.fixture_root().is_dir():
                raise ConfigError(f"offline extraction needs a fixture directory; {self.fixture_root()} not found")

    def fixture_root(self) -> Path:
        if self.fixtures:
            return Path(self.fixtures)
        corpus = Path(self.corpus or ".")
        base = corpus if corpus.is_dir() else corpus.parent
        return base.parent / "fixtures"

    def snapshot(self) -> dict[str, Any]:
        """Configuration recorded in artifacts; output and cache locations are left out."""
        snap = asdict(self)
        for key in ("out", "cache_dir", "workers"):
            snap.pop(key)
        snap["version"] = __version__
        return snap


# --------------------------------------------------------------------------
# file helpers


def _dump_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]], provenance: dict[str, Any]) -> None:
    buf = io.StringIO()
    buf.write("# provenance: " + json.dumps(provenance, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def _num(x: float) -> float | str:
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _matrix_paths(cfg: RunConfig) -> tuple[Path, Path]:
    values = Path(cfg.matrix) if cfg.matrix else Path(cfg.out) / MATRIX_FILE
    return values, values.with_name(values.stem + "_mask" + values.suffix)


def _load_matrix(cfg: RunConfig) -> FeatureMatrix:
    values, mask = _matrix_paths(cfg)
    if not values.is_file():
        raise ConfigError(f"feature matrix {values} not found; run extract first or pass --matrix")
    m = read_matrix(values, mask)
    if sum(label is not None for label in m.labels) < 2:
        raise ConfigError(f"{values} has fewer than two labeled rows")
    return m


def _labeled_matrix(m: FeatureMatrix) -> FeatureMatrix:
    rows = [i for i, lab in enumerate(m.labels) if lab is not None]
    return FeatureMatrix(
        [m.paper_ids[i] for i in rows], list(m.names), m.values[rows], m.mask[rows], [m.labels[i] for i in rows]
    )


# --------------------------------------------------------------------------
# stages


def _extract_one(rec: PaperRecord, client: MetadataClient, cfg: RunConfig, rank: RankTable, asjc: AsjcTable):
    meta = client.fetch_record(rec)
    venue = client.fetch_venue_metrics(rec.venue_issn)
    authors = client.fetch_author_metrics(rec.authors)
    stats, scan = statistical_features_from_text(rec.body_text or "")
    vector = derive_features(
        rec, meta, venue, authors, stats, rank, cfg.now_year,
        graph=client.graph, asjc=asjc,
        author_threshold=cfg.author_threshold, university_threshold=cfg.university_threshold,
    )
    diagnostics = {
        "paper_id": rec.identifier,
        "violations": [str(v) for v in validate_record(rec, cfg.now_year)],
        "statistics": scan.diagnostics(),
        "defaulted_features": sorted(n for n, d in vector.is_default.items() if d),
    }
    return vector, diagnostics


def run_extract(cfg: RunConfig) -> None:
    try:
        records = load_corpus(cfg.corpus)
    except (RecordError, FileNotFoundError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.offline:
        client = MetadataClient.from_fixtures(cfg.fixture_root(), cache_dir=cfg.cache_dir)
    else:
        client = MetadataClient.live(cache_dir=cfg.cache_dir)
    client.title_threshold = cfg.title_threshold
    rank, asjc = RankTable.bundled(), AsjcTable.bundled()
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(lambda r: _extract_one(r, client, cfg, rank, asjc), records))
    vectors = [v for v, _ in results]
    m = assemble_matrix(vectors, [r.label for r in records])
    out = Path(cfg.out)
    provenance = cfg.snapshot()
    write_matrix(m, out / MATRIX_FILE, out / MASK_FILE, provenance=provenance)
    _dump_json(out / "diagnostics.json", {"provenance": provenance, "papers": [d for _, d in results]})
    logger.info("extracted %d x %d feature matrix", *m.shape)


def _analysis(cfg: RunConfig, m: FeatureMatrix) -> AnalysisReport:
    n_anova = cfg.top_k if cfg.top_k is not None else TOP_ANOVA
    return analyze(m, min_real=cfg.min_real, threshold=cfg.tau_threshold, n_anova=n_anova, mi_extras=MI_EXTRAS, seed=cfg.seed)


def run_analyze(cfg: RunConfig) -> None:
    m = _load_matrix(cfg)
    report = _analysis(cfg, m)
    out = Path(cfg.out)
    provenance = cfg.snapshot()
    _dump_json(out / "analysis.json", {"provenance": provenance, **report.to_dict()})
    rows = [
        [name, repr(float(report.anova_f[i])), repr(float(report.anova_f_normalized[i])),
         repr(float(report.mutual_info[i])), repr(float(report.mutual_info_normalized[i]))]
        for i, name in enumerate(report.scored_features)
    ]
    _write_csv(out / "scores.csv", ["feature", "anova_f", "anova_f_normalized", "mutual_info", "mutual_info_normalized"], rows, provenance)


def run_select(cfg: RunConfig) -> None:
    report = _analysis(cfg, _load_matrix(cfg))
    _dump_json(Path(cfg.out) / "selected_features.json", {"provenance": cfg.snapshot(), "selected_features": report.selected_features})


def feature_sets(report: AnalysisReport) -> dict[str, list[str]]:
    return {"core": report.core_features, "reduced": report.reduced_features, "top": report.selected_features}


def run_evaluate(cfg: RunConfig) -> None:
    m = _labeled_matrix(_load_matrix(cfg))
    report = _analysis(cfg, m)
    classifiers = cfg.classifier or list(CLASSIFIERS)
    repeats = cfg.repeats or 1
    y = np.array([int(label) for label in m.labels])
    results, rows = [], []
    for set_name, names in feature_sets(report).items():
        if not names:
            logger.warning("feature set %s is empty; skipped", set_name)
            continue
        sub = m.select(names)
        normalized, _ = min_max_normalize(sub)
        for variant, matrix in ((set_name, sub), (f"{set_name}_norm", normalized)):
            for kind in classifiers:
                res = cross_validate(kind, matrix.values, y, k=cfg.folds, repeats=repeats, seed=cfg.seed)
                results.append({"feature_set": variant, "features": names, **res.to_dict()})
                rows.append([variant, kind, len(names), repr(res.precision), repr(res.recall), repr(res.f1)])
    out = Path(cfg.out)
    provenance = cfg.snapshot()
    _dump_json(out / "cv_results.json", {"provenance": provenance, "results": results})
    _write_csv(out / "cv_metrics.csv", ["feature_set", "classifier", "n_features", "precision", "recall", "f1"], rows, provenance)


def run_sweep(cfg: RunConfig) -> None:
    m = _labeled_matrix(_load_matrix(cfg))
    report = _analysis(cfg, m)
    names = [n for n in report.reduced_features if n not in CATEGORICAL]
    classifier = cfg.classifier[0] if cfg.classifier else "svm_rbf"
    y = np.array([int(label) for label in m.labels])
    points = sweep_top_features(
        m.select(names), y, classifier=classifier, max_k=cfg.top_k, folds=cfg.folds, repeats=cfg.repeats or 5, seed=cfg.seed
    )
    rows = []
    for p in points:
        s = p.summary
        rows.append([p.k, p.features[-1], repr(s["mean"]), repr(s["median"]), repr(s["q1"]), repr(s["q3"])])
    _write_csv(Path(cfg.out) / "sweep.csv", ["k", "added_feature", "f1_mean", "f1_median", "f1_q1", "f1_q3"], rows, cfg.snapshot())


STAGES = {
    "extract": run_extract,
    "analyze": run_analyze,
    "select": run_select,
    "evaluate": run_evaluate,
    "sweep": run_sweep,
}


def run(cfg: RunConfig) -> int:
    """Validate ``cfg``, run one stage and return the exit status."""
    try:
        cfg.validate()
        Path(cfg.out).mkdir(parents=True, exist_ok=True)
        STAGES[cfg.command](cfg)
    except ConfigError as exc:
        print(f"reprofeat: error: {exc}", file=sys.stderr)
        return 2
    return 0


# --------------------------------------------------------------------------
# argument parsing


def demo_corpus() -> Path:
    """Location of the bundled 20-paper demo corpus."""
    return Path(str(resources.files("reprofeat") / "data" / "demo" / "corpus"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", help="manifest file or directory holding manifest.csv")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--cache-dir", help="persistent provider response cache")
    common.add_argument("--offline", action="store_true", help="use fixture providers only")
    common.add_argument("--fixtures", help="offline fixture root (default: <corpus>/../fixtures)")
    common.add_argument("--matrix", help="feature matrix CSV (default: <out>/features.csv)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--now-year", type=int, default=date.today().year, help="reference year for paper age")
    common.add_argument("--min-real", type=int, default=15, help="core filter: minimum real values per feature")
    common.add_argument("--tau-threshold", type=float, default=0.8)
    common.add_argument("--title-threshold", type=float, default=TITLE_THRESHOLD)
    common.add_argument("--author-threshold", type=float, default=AUTHOR_THRESHOLD)
    common.add_argument("--university-threshold", type=float, default=UNIVERSITY_THRESHOLD)
    common.add_argument("--classifier", action="append", default=[], help=f"repeatable; one of {', '.join(CLASSIFIERS)}")
    common.add_argument("--top-k", type=int, help="ANOVA-F picks for select/evaluate; largest k for sweep")
    common.add_argument("--repeats", type=int, help="CV repeats (default: 1 for evaluate, 5 for sweep)")
    common.add_argument("--folds", type=int, default=5)
    common.add_argument("--workers", type=int, default=4, help="parallel extraction workers")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="reprofeat", description="Reproducibility feature pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)
    helps = {
        "extract": "derive the 41-feature matrix and its default mask",
        "analyze": "core filter, tau pruning, ANOVA-F and MI scores",
        "select": "write the selected top features",
        "evaluate": "cross-validate every classifier on each feature set",
        "sweep": "F1 against the number of top ANOVA-F features",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    values = vars(args)
    values.pop("verbose")
    return run(RunConfig(**values))


if __name__ == "__main__":
    sys.exit(main())
