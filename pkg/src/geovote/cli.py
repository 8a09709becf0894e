"""``geovote`` command line: resolve, evaluate, ablate, sweep, categorize."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Optional

from . import analysis, kernels
from .corpus import Corpus, CorpusFormatError, filter_misaligned, load_corpus
from .gazetteer import Gazetteer, categorize_entry, categorize_surface, load_geonames_tsv, population_resolve
from .metrics import AUC_MODES, DEFAULT_THRESHOLD_KM, evaluate, header, macro_average, reports_to_csv, reports_to_json
from .predictions import PredictionFormatError, PredictionSet, load_predictions, split_prediction_filename
from .voting import ConfigError, EnsembleConfig, Resolution, basic_config, default_config, load_config, resolve_corpus

logger = logging.getLogger("geovote")

POPULATION_SYSTEM = "PopulationHeuristics"


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    corpus_paths: list[str]
    profiles: list[str] = field(default_factory=list)
    prediction_paths: list[str] = field(default_factory=list)
    gazetteer_path: Optional[str] = None
    config_path: Optional[str] = None
    out_dir: str = "."
    auc_mode: str = "mean"
    threshold_km: float = DEFAULT_THRESHOLD_KM
    seed: Optional[int] = None
    eps_km: Optional[float] = None
    min_pts: Optional[int] = None
    keep_misaligned: bool = False

    def check(self) -> None:
        paths = list(self.corpus_paths) + list(self.prediction_paths)
        paths += [p for p in (self.gazetteer_path, self.config_path) if p]
        missing = [p for p in paths if not os.path.exists(p)]
        if missing:
            raise UsageError(f"input not found: {missing[0]}")
        if len(self.profiles) > 1 and len(self.profiles) != len(self.corpus_paths):
            raise UsageError("give one --profile for all corpora or one per --corpus")

    def profile_for(self, i: int) -> Optional[str]:
        if not self.profiles:
            return None
        return self.profiles[0] if len(self.profiles) == 1 else self.profiles[i]


@dataclass
class Loaded:
    corpora: list[Corpus]
    predictions: dict[str, list[PredictionSet]]
    config: EnsembleConfig
    gazetteer: Optional[Gazetteer]

    def evalsets(self) -> list[analysis.EvalSet]:
        return [analysis.EvalSet(c, self.predictions[c.name]) for c in self.corpora]


def load_inputs(m: RunManifest, config_required: bool = True) -> Loaded:
    m.check()
    corpora = []
    for i, path in enumerate(m.corpus_paths):
        corpus = load_corpus(path, m.profile_for(i))
        if not m.keep_misaligned:
            corpus, removed = filter_misaligned(corpus)
            if removed:
                logger.info("%s: excluded %d misaligned toponyms", corpus.name, removed)
        corpora.append(corpus)
    names = [c.name for c in corpora]
    if len(set(names)) != len(names):
        raise UsageError(f"corpus names must be distinct: {names}")

    per_corpus: dict[str, list[PredictionSet]] = {n: [] for n in names}
    for path in m.prediction_paths:
        pset = load_predictions(path)
        _, dataset = split_prediction_filename(path)
        if dataset is None:
            targets = names
        elif dataset in per_corpus:
            targets = [dataset]
        elif len(names) == 1:
            targets = names
        else:
            logger.warning("%s: no corpus named %r; file ignored", path, dataset)
            continue
        for t in targets:
            if any(p.approach_id == pset.approach_id for p in per_corpus[t]):
                raise ConfigError(f"{t}: duplicate prediction set for approach {pset.approach_id!r}")
            per_corpus[t].append(pset)

    config = load_config(m.config_path) if m.config_path else default_config()
    config = config.with_params(eps_km=m.eps_km, min_pts=m.min_pts, rng_seed=m.seed)
    gaz = load_geonames_tsv(m.gazetteer_path) if m.gazetteer_path else None
    return Loaded(corpora, per_corpus, config, gaz)


def _warn_missing(loaded: Loaded, config: EnsembleConfig) -> None:
    for name, psets in loaded.predictions.items():
        have = {p.approach_id for p in psets}
        for a in config.approach_ids:
            if a not in have:
                logger.warning("%s: no prediction file for %s; treating it as all-invalid", name, a)


class _Outputs:
    """Write files atomically; if the command fails, remove everything it wrote."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.written: list[str] = []

    def __enter__(self):
        os.makedirs(self.out_dir, exist_ok=True)
        return self

    def write(self, name: str, text: str) -> str:
        path = os.path.join(self.out_dir, name)
        fd, tmp = tempfile.mkstemp(dir=self.out_dir, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(path)
        return path

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            for p in self.written:
                if os.path.exists(p):
                    os.unlink(p)
        return False


def _coord(x: Optional[float]) -> str:
    return "null" if x is None else f"{x:.6f}"


def resolution_line(mention_id: str, res: Resolution) -> str:
    lat = res.point.lat if res.point else None
    lon = res.point.lon if res.point else None
    prov = "null" if res.provenance is None else json.dumps(res.provenance)
    return (f'{{"mention_id": {json.dumps(mention_id, ensure_ascii=False)}, "status": "{res.kind}", '
            f'"lat": {_coord(lat)}, "lon": {_coord(lon)}, "provenance": {prov}, '
            f'"winning_weight": {res.winning_weight}}}')


def cmd_resolve(m: RunManifest) -> list[str]:
    loaded = load_inputs(m)
    _warn_missing(loaded, loaded.config)
    with _Outputs(m.out_dir) as out:
        for corpus in loaded.corpora:
            resolutions = resolve_corpus(corpus, loaded.predictions[corpus.name], loaded.config)
            lines = [resolution_line(mid, resolutions[mid]) for mid in (x.mention_id for x in corpus.mentions)]
            out.write(f"resolutions__{corpus.name}.jsonl", "".join(line + "\n" for line in lines))
        return out.written


def cmd_evaluate(m: RunManifest, per_category: bool = False, population_baseline: bool = False) -> list[str]:
    loaded = load_inputs(m)
    config = loaded.config
    _warn_missing(loaded, config)
    members = set(config.approach_ids)
    by_system: dict[str, list] = {}
    order = ["voting"]
    for corpus in loaded.corpora:
        if not corpus.mentions:
            logger.warning("%s: empty corpus, nothing to evaluate", corpus.name)
            continue
        psets = loaded.predictions[corpus.name]
        kw = dict(threshold_km=m.threshold_km, auc_mode=m.auc_mode, per_category=per_category)
        voting = resolve_corpus(corpus, [p for p in psets if p.approach_id in members], config)
        by_system.setdefault("voting", []).append(evaluate(voting, corpus, loaded.gazetteer, system="voting", **kw))
        for p in psets:
            res = {x.mention_id: Resolution.from_prediction(p.get(x.mention_id)) for x in corpus.mentions}
            by_system.setdefault(p.approach_id, []).append(
                evaluate(res, corpus, loaded.gazetteer, system=p.approach_id, **kw))
        if population_baseline:
            if loaded.gazetteer is None:
                raise UsageError("--population-baseline needs --gazetteer")
            res = {x.mention_id: Resolution.from_prediction(population_resolve(loaded.gazetteer, x.surface, x.mention_id))
                   for x in corpus.mentions}
            by_system.setdefault(POPULATION_SYSTEM, []).append(
                evaluate(res, corpus, loaded.gazetteer, system=POPULATION_SYSTEM, **kw))
    rank = {a: i for i, a in enumerate(config.approach_ids)}
    others = sorted(s for s in by_system if s != "voting")
    order += sorted(others, key=lambda s: (s not in rank, rank.get(s, 0), s))
    order = [s for s in order if s in by_system]
    reports = [r for s in order for r in by_system[s]]
    reports += [macro_average(by_system[s]) for s in order]
    head = header(m.auc_mode, m.threshold_km, backend=kernels.BACKEND)
    with _Outputs(m.out_dir) as out:
        out.write("report.csv", reports_to_csv(reports, head, per_category))
        out.write("report.json", reports_to_json(reports, head, per_category))
        return out.written


def cmd_ablate(m: RunManifest) -> list[str]:
    loaded = load_inputs(m)
    if m.config_path:
        basic = loaded.config
    else:
        ids = [p.approach_id for ps in loaded.predictions.values() for p in ps]
        basic = basic_config(ids, loaded.config.params, loaded.config.rng_seed)
    results = analysis.ablate(basic, loaded.evalsets(), threshold_km=m.threshold_km, auc_mode=m.auc_mode)
    head = header(m.auc_mode, m.threshold_km, eps_km=basic.params.eps_km, min_pts=basic.params.min_pts,
                  approaches=",".join(basic.approach_ids))
    with _Outputs(m.out_dir) as out:
        out.write("ablation.csv", analysis.ablation_to_csv(results))
        out.write("ablation.json", analysis.ablation_to_json(results, head))
        return out.written


def sweep_values(parameter: str, start=None, stop=None, step=None) -> list:
    if parameter == "eps_km":
        start, stop, step = start or 1, stop or 800, step or 30
    else:
        start, stop, step = start or 1, stop or 11, step or 1
    if step <= 0:
        raise UsageError("--step must be positive")
    values = []
    v = start
    while v <= stop + 1e-9:
        values.append(int(v) if float(v).is_integer() else v)
        v = start + len(values) * step
    return values


def cmd_sweep(m: RunManifest, parameter: str, start=None, stop=None, step=None) -> list[str]:
    loaded = load_inputs(m)
    values = sweep_values(parameter, start, stop, step)
    curve = analysis.sweep(loaded.config, parameter, values, loaded.evalsets(),
                           threshold_km=m.threshold_km, auc_mode=m.auc_mode)
    head = header(m.auc_mode, m.threshold_km, parameter=parameter)
    acc_name = f"accuracy_at_{m.threshold_km:g}"
    with _Outputs(m.out_dir) as out:
        out.write(f"sweep_{parameter}.csv", analysis.sweep_to_long_csv(curve, acc_name))
        out.write(f"sweep_{parameter}.json", analysis.sweep_to_json(curve, head))
        return out.written


def cmd_categorize(m: RunManifest) -> list[str]:
    loaded = load_inputs(m)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("dataset", "mention_id", "surface", "category", "source"))
    counts: dict[str, int] = {}
    for corpus in loaded.corpora:
        for x in corpus.mentions:
            entry = loaded.gazetteer.get(x.gazetteer_id) if loaded.gazetteer else None
            if entry is not None:
                cat, source = categorize_entry(entry), "geonames"
            else:
                cat, source = categorize_surface(x.surface), "keyword"
            counts[cat.value] = counts.get(cat.value, 0) + 1
            w.writerow((corpus.name, x.mention_id, x.surface, cat.value, source))
    for cat, n in sorted(counts.items()):
        logger.info("%s: %d", cat, n)
    with _Outputs(m.out_dir) as out:
        out.write("categories.csv", buf.getvalue())
        return out.written


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", action="append", default=[], required=True,
                        help="gold corpus (.jsonl interchange or annotated .xml); repeatable")
    common.add_argument("--profile", action="append", default=[],
                        help="XML profile name or JSON path; one for all corpora or one per corpus")
    common.add_argument("--predictions", action="append", default=[],
                        help="prediction file <approach>__<dataset>.jsonl; repeatable")
    common.add_argument("--gazetteer", help="GeoNames main-export TSV")
    common.add_argument("--config", help="ensemble config JSON (default: bundled 7-resolver ensemble)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--auc-mode", choices=AUC_MODES, default="mean")
    common.add_argument("--threshold-km", type=float, default=DEFAULT_THRESHOLD_KM)
    common.add_argument("--seed", type=int, default=None, help="tie-break seed (overrides config)")
    common.add_argument("--eps-km", type=float, default=None, help="DBSCAN eps (overrides config)")
    common.add_argument("--min-pts", type=int, default=None, help="DBSCAN minPts (overrides config)")
    common.add_argument("--keep-misaligned", action="store_true",
                        help="do not exclude the misaligned country/continent names")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="geovote", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("resolve", parents=[common], help="vote every mention, write resolutions")
    ev = sub.add_parser("evaluate", parents=[common], help="score voting and each prediction file")
    ev.add_argument("--per-category", action="store_true", help="add per place-category accuracy")
    ev.add_argument("--population-baseline", action="store_true",
                    help="also score the largest-population GeoNames baseline")
    sub.add_parser("ablate", parents=[common], help="leave-one-out approach ablation")
    sw = sub.add_parser("sweep", parents=[common], help="sweep eps_km or min_pts")
    sw.add_argument("--parameter", choices=analysis.SWEEP_PARAMETERS, default="eps_km")
    sw.add_argument("--from", dest="start", type=float, default=None)
    sw.add_argument("--to", dest="stop", type=float, default=None)
    sw.add_argument("--step", type=float, default=None)
    sub.add_parser("categorize", parents=[common], help="assign place categories to gold mentions")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    manifest = RunManifest(
        corpus_paths=args.corpus, profiles=args.profile, prediction_paths=args.predictions,
        gazetteer_path=args.gazetteer, config_path=args.config, out_dir=args.out,
        auc_mode=args.auc_mode, threshold_km=args.threshold_km, seed=args.seed,
        eps_km=args.eps_km, min_pts=args.min_pts, keep_misaligned=args.keep_misaligned,
    )
    try:
        if args.command == "resolve":
            written = cmd_resolve(manifest)
        elif args.command == "evaluate":
            written = cmd_evaluate(manifest, args.per_category, args.population_baseline)
        elif args.command == "ablate":
            written = cmd_ablate(manifest)
        elif args.command == "sweep":
            written = cmd_sweep(manifest, args.parameter, args.start, args.stop, args.step)
        else:
            written = cmd_categorize(manifest)
    except (UsageError, ValueError, OSError) as exc:
        print(f"geovote {args.command}: error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
