"""Command-line front end.

Subcommands: eval, props, sweep, iso, boundary, rank. Output is JSON (with a
schema version and the resolved configuration) or CSV. Exit codes: 0 success,
2 input error, 3 unexplained mismatch with the published property table, 4 infeasible request.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import List, Optional

from . import analysis, properties, ranking
from .core import ConfusionMatrix, InputError, build_confusion, read_dataset_csv
from .properties import DEFAULT_N_MAX
from .measures import (
    REGISTRY,
    CostParams,
    MeasureId,
    MetricValue,
    ParameterError,
    UnknownMeasureError,
    evaluate,
    resolve,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INPUT, EXIT_MISMATCH, EXIT_INFEASIBLE = 0, 2, 3, 4

DEFAULT_RANK_MEASURES = ["acc", "bacc", "gacc", "se", "sp", "pr", "f1", "mcc", "kappa", "j"]


@dataclass
class RunConfig:
    measures: Optional[List[str]] = None
    properties: Optional[List[str]] = None
    k: float = 0.3
    alpha: float = 0.5
    theta: float = 1.0
    k_fraud: float = 10.0
    counts: Optional[str] = None
    data: Optional[str] = None
    threshold: Optional[float] = None
    points: Optional[str] = None
    manifest: Optional[str] = None
    n_max: int = DEFAULT_N_MAX
    n: Optional[int] = None
    target: Optional[float] = None
    tol: float = 0.0
    fix: Optional[str] = None
    fix_target: Optional[float] = None
    trials: int = 20000
    seed: Optional[int] = 0
    baseline_n: int = 100
    baseline_pi1: float = 0.3
    n_angles: int = 360
    refine_rounds: int = 2
    demo_n: int = 200
    demo_pi1: float = 0.1
    demo_seed: int = 7
    format: str = "json"
    out: Optional[str] = None

    def params(self) -> CostParams:
        return CostParams(k=self.k, alpha=self.alpha, theta=self.theta, k_fraud=self.k_fraud)

    def validate(self) -> None:
        self.params()
        if self.format not in ("json", "csv"):
            raise InputError(f"format must be json or csv, got {self.format!r}")
        for name in ("n_max", "trials", "baseline_n", "n_angles", "demo_n"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if self.refine_rounds < 0:
            raise InputError("refine_rounds must be nonnegative")
        if self.tol < 0:
            raise InputError("tol must be nonnegative")
        if not 0 < self.baseline_pi1 < 1 or not 0 < self.demo_pi1 < 1:
            raise InputError("class proportions must lie in (0, 1)")
        if self.measures is not None:
            for m in self.measures:
                resolve(m)

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in dataclasses.asdict(self).items()}


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _split(text):
    return [s.strip() for s in text.split(",") if s.strip()]


def _metric_json(mid: MeasureId, v: MetricValue) -> dict:
    if v.defined:
        return {"measure": mid.value, "value": v.value}
    return {"measure": mid.value, "value": None, "undefined": v.reason.value}


def _metric_cell(v: MetricValue) -> str:
    return repr(v.value) if v.defined else f"undefined({v.reason.value})"


def _t_cell(t: float) -> str:
    return _jsonable(t) if not math.isfinite(t) else repr(t)


# --------------------------------------------------------------------------
# subcommands: each returns (json_document, csv_rows, exit_code)
# --------------------------------------------------------------------------

def _measure_ids(cfg: RunConfig, default=None) -> List[MeasureId]:
    names = cfg.measures if cfg.measures else (default if default is not None else [m.value for m in REGISTRY])
    out = []
    for n in names:
        mid = resolve(n)
        if mid not in out:
            out.append(mid)
    return out


def cmd_eval(cfg: RunConfig):
    if (cfg.counts is None) == (cfg.data is None):
        raise InputError("give exactly one of --counts or --data")
    if cfg.counts is not None:
        m = ConfusionMatrix.from_string(cfg.counts)
    else:
        if cfg.threshold is None:
            raise InputError("--data requires --threshold")
        m = build_confusion(read_dataset_csv(cfg.data), cfg.threshold)
    params = cfg.params()
    results = [(mid, evaluate(mid, m, params)) for mid in _measure_ids(cfg)]
    doc = {"matrix": list(m.as_tuple()), "results": [_metric_json(mid, v) for mid, v in results]}
    rows = [["measure", "value"]] + [[mid.value, _metric_cell(v)] for mid, v in results]
    return doc, rows, EXIT_OK


def cmd_props(cfg: RunConfig):
    mids = _measure_ids(cfg)
    props = []
    for name in cfg.properties or [p.value for p in properties.Property]:
        props.extend(p for p in _property_alias(name) if p not in props)
    randomized = {properties.Property.CONSTANT_BASELINE, properties.Property.COMPLETE,
                  properties.Property.IGNORES_CELLS}
    if cfg.seed is None and randomized & set(props):
        raise InputError("a seed is required for randomized checks")
    results = properties.run_checks(mids, props, n_max=cfg.n_max, trials=cfg.trials, seed=cfg.seed or 0,
                                    params=cfg.params(), baseline_n=cfg.baseline_n,
                                    baseline_pi1=cfg.baseline_pi1)
    report = properties.reconcile_table1(results, measures=mids, columns=None)
    code = EXIT_MISMATCH if report.unexpected else EXIT_OK
    doc = {
        "checks": [r.to_dict() for r in results],
        "reconciliation": report.to_dict(),
        "unexpected_discrepancies": len(report.unexpected),
    }
    rows = [["measure", "property", "verdict", "domain_note"]]
    rows += [[r.measure.value, r.property.value, r.verdict.value, r.domain_note] for r in results]
    return doc, rows, code


_PROPERTY_ALIASES = {
    "balanced": [properties.Property.BALANCED],
    "bounds": [properties.Property.BOUNDED_ABOVE, properties.Property.BOUNDED_BELOW,
               properties.Property.UNIT_INTERVAL],
    "baseline": [properties.Property.CONSTANT_BASELINE],
    "ignores": [properties.Property.IGNORES_CELLS],
    "ignore_cells": [properties.Property.IGNORES_CELLS],
}


def _property_alias(name: str) -> list:
    key = name.strip().lower().replace("-", "_")
    if key in properties.Property._value2member_map_:
        return [properties.Property(key)]
    if key in _PROPERTY_ALIASES:
        return _PROPERTY_ALIASES[key]
    raise InputError(f"unknown property {name!r}")


def cmd_sweep(cfg: RunConfig):
    if cfg.data is None:
        raise InputError("sweep requires --data")
    mids = _measure_ids(cfg)
    if len(mids) != 1:
        raise InputError("sweep takes exactly one --measure")
    mid = mids[0]
    data = read_dataset_csv(cfg.data)
    params = cfg.params()
    curve = analysis.sweep_thresholds(data, mid, params)
    doc = {
        "measure": mid.value,
        "curve": [
            {"t": _jsonable(p.t), "matrix": list(p.matrix.as_tuple()), **_metric_json(mid, p.value)}
            for p in curve.points
        ],
    }
    try:
        t, v = analysis.optimal_threshold(curve)
        doc["optimum"] = {"t": _jsonable(t), **_metric_json(mid, v)}
    except analysis.InfeasibleError:
        doc["optimum"] = None
    code = EXIT_OK
    if cfg.fix is not None:
        if cfg.fix_target is None:
            raise InputError("--fix requires --fix-target")
        res = analysis.constrained_optimum(data, cfg.fix, cfg.fix_target, mid, params)
        doc["constrained"] = {
            "fix": resolve(cfg.fix).value,
            "target": cfg.fix_target,
            "feasible": res.feasible,
            "n_feasible": res.n_feasible,
        }
        if res.feasible:
            doc["constrained"].update({"t": _jsonable(res.t), **_metric_json(mid, res.value)})
        else:
            code = EXIT_INFEASIBLE
    rows = [["t", "a", "b", "c", "d", "value"]]
    rows += [[_t_cell(p.t), *p.matrix.as_tuple(), _metric_cell(p.value)] for p in curve.points]
    return doc, rows, code


def cmd_iso(cfg: RunConfig):
    mids = _measure_ids(cfg)
    if len(mids) != 1:
        raise InputError("iso takes exactly one --measure")
    if cfg.n is None or cfg.target is None:
        raise InputError("iso requires --n and --target")
    mid = mids[0]
    params = cfg.params()
    members = analysis.isoeffectiveness_set(mid, cfg.n, cfg.target, cfg.tol, params)
    vals = [evaluate(mid, m, params) for m in members]
    doc = {
        "measure": mid.value,
        "count": len(members),
        "matrices": [list(m.as_tuple()) for m in members],
        "values": [v.value for v in vals],
    }
    rows = [["a", "b", "c", "d", "value"]] + [[*m.as_tuple(), repr(v.value)] for m, v in zip(members, vals)]
    return doc, rows, EXIT_OK


def cmd_boundary(cfg: RunConfig):
    if cfg.points is not None:
        pts = analysis.read_points_csv(cfg.points)
        source = {"points": cfg.points}
    else:
        pts = analysis.gaussian_mixture(cfg.demo_n, cfg.demo_pi1, cfg.demo_seed)
        source = {"demo_mixture": {"n": cfg.demo_n, "pi1": cfg.demo_pi1, "seed": cfg.demo_seed}}
    mids = _measure_ids(cfg, default=["mcc", "er", "f1"])
    budget = analysis.SearchBudget(n_angles=cfg.n_angles, refine_rounds=cfg.refine_rounds)
    params = cfg.params()
    records = []
    predictions = {}
    for mid in mids:
        res = analysis.search_linear_boundary(pts, mid, params, budget)
        b = res.boundary
        predictions[mid] = b.predict(pts)
        records.append({
            "measure": mid.value,
            "angle": round(b.angle, 6),
            "offset": b.offset,
            "polarity": b.polarity,
            "matrix": list(b.confusion(pts).as_tuple()),
            **{k: v for k, v in _metric_json(mid, res.value).items() if k != "measure"},
            "candidates_evaluated": res.n_evaluated,
        })
    disagreements = [
        {"measures": [m1.value, m2.value],
         "points_classified_differently": sum(x != y for x, y in zip(predictions[m1], predictions[m2]))}
        for i, m1 in enumerate(mids) for m2 in mids[i + 1:]
    ]
    doc = {"source": source, "n_points": len(pts), "boundaries": records, "disagreements": disagreements}
    rows = [["measure", "angle", "offset", "polarity", "value"]]
    rows += [[r["measure"], f"{r['angle']:.6f}", repr(r["offset"]), r["polarity"],
              repr(r["value"]) if r["value"] is not None else f"undefined({r['undefined']})"] for r in records]
    return doc, rows, EXIT_OK


def cmd_rank(cfg: RunConfig):
    if cfg.manifest is None:
        raise InputError("rank requires --manifest")
    scoresets = ranking.read_manifest(cfg.manifest)
    mids = _measure_ids(cfg, default=DEFAULT_RANK_MEASURES)
    table = ranking.rank_classifiers(scoresets, mids, cfg.params())
    doc = {"table": table.to_dict()}
    if len(mids) >= 2:
        doc["disagreement"] = ranking.disagreement(table).to_dict()
    rows = [["classifier"] + [m.value for m in table.measures]]
    rows += [[c, *r] for c, r in zip(table.classifiers, table.ranks)]
    return doc, rows, EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "props": cmd_props,
    "sweep": cmd_sweep,
    "iso": cmd_iso,
    "boundary": cmd_boundary,
    "rank": cmd_rank,
}


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="JSON file of RunConfig values; flags override it")
    g.add_argument("--format", choices=["json", "csv"])
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--k", type=float, help="WER weight on misclassified class-1 objects, in (0, 1)")
    g.add_argument("--alpha", type=float, help="F-beta precision weight, in (0, 1)")
    g.add_argument("--theta", type=float, help="T1 investigation cost")
    g.add_argument("--k-fraud", dest="k_fraud", type=float, help="T1 cost ratio")
    g.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="crispmetrics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate measures on one confusion matrix")
    p.add_argument("--counts", help="a,b,c,d (TN, FN, FP, TP)")
    p.add_argument("--data", help="CSV with header id,true_label,score")
    p.add_argument("--threshold", type=float)
    p.add_argument("--measures", type=_split)

    p = sub.add_parser("props", parents=[common], help="check properties and reconcile with the published property table")
    p.add_argument("--measures", type=_split)
    p.add_argument("--property", dest="properties", action="append",
                   help="property to check (repeatable or comma separated)")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--baseline-n", dest="baseline_n", type=int)
    p.add_argument("--baseline-pi1", dest="baseline_pi1", type=float)

    p = sub.add_parser("sweep", parents=[common], help="evaluate a measure at every achievable threshold")
    p.add_argument("--data", required=False)
    p.add_argument("--measure", dest="measures", type=_split)
    p.add_argument("--fix", help="single-rate measure to constrain")
    p.add_argument("--fix-target", dest="fix_target", type=float)

    p = sub.add_parser("iso", parents=[common], help="enumerate an isoeffectiveness set")
    p.add_argument("--measure", dest="measures", type=_split)
    p.add_argument("--n", type=int)
    p.add_argument("--target", type=float)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("boundary", parents=[common], help="fit measure-optimal linear boundaries")
    p.add_argument("--points", help="CSV with header x,y,label (default: the built-in demo mixture)")
    p.add_argument("--measures", "--measure", dest="measures", type=_split)
    p.add_argument("--angles", dest="n_angles", type=int)
    p.add_argument("--refine-rounds", dest="refine_rounds", type=int)
    p.add_argument("--demo-n", dest="demo_n", type=int)
    p.add_argument("--demo-pi1", dest="demo_pi1", type=float)
    p.add_argument("--demo-seed", dest="demo_seed", type=int)

    p = sub.add_parser("rank", parents=[common], help="rank classifiers and summarize disagreement")
    p.add_argument("--manifest", help="CSV with header name,path,threshold")
    p.add_argument("--measures", type=_split)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    names = {f.name for f in dataclasses.fields(RunConfig)}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        unknown = set(loaded) - names
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        for k, v in loaded.items():
            setattr(cfg, k, v)
    for k, v in vars(args).items():
        if k in names and v is not None:
            setattr(cfg, k, v)
    if cfg.properties:
        flat = []
        for p in cfg.properties:
            flat.extend(_split(p) if isinstance(p, str) else p)
        cfg.properties = flat
    if isinstance(cfg.measures, str):
        cfg.measures = _split(cfg.measures)
    cfg.validate()
    return cfg


def _render(doc, rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(rows)
        return buf.getvalue()
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        doc, rows, code = COMMANDS[args.command](cfg)
    except (InputError, ParameterError, UnknownMeasureError, properties.ReportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except analysis.InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    full = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": cfg.to_dict(), **doc}
    text = _render(_jsonable(full), rows, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_INFEASIBLE:
        print("infeasible: no threshold satisfies the constraint", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
