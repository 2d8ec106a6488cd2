"""Rank classifiers under several measures and quantify how the rankings disagree."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from scipy.stats import kendalltau

from .core import ConfusionMatrix, InputError, ScoredDataset, build_confusion
from .measures import DEFAULT_PARAMS, CostParams, MeasureId, MetricValue, descriptor, evaluate, resolve

UNDEFINED_LAST = "undefined_ranked_last"


@dataclass(frozen=True)
class RankTable:
    classifiers: Tuple[str, ...]
    measures: Tuple[MeasureId, ...]
    values: Tuple[Tuple[MetricValue, ...], ...]  # [classifier][measure]
    ranks: Tuple[Tuple[int, ...], ...]
    matrices: Tuple[ConfusionMatrix, ...]
    undefined_policy: str = UNDEFINED_LAST

    def rank(self, classifier: str, measure) -> int:
        return self.ranks[self.classifiers.index(classifier)][self.measures.index(resolve(measure))]

    def column(self, measure) -> List[int]:
        j = self.measures.index(resolve(measure))
        return [row[j] for row in self.ranks]

    def to_dict(self) -> dict:
        return {
            "undefined_policy": self.undefined_policy,
            "classifiers": list(self.classifiers),
            "measures": [m.value for m in self.measures],
            "matrices": {c: list(m.as_tuple()) for c, m in zip(self.classifiers, self.matrices)},
            "values": {
                c: {m.value: (v.value if v.defined else f"undefined({v.reason.value})")
                    for m, v in zip(self.measures, row)}
                for c, row in zip(self.classifiers, self.values)
            },
            "ranks": {c: {m.value: r for m, r in zip(self.measures, row)} for c, row in zip(self.classifiers, self.ranks)},
        }


def rank_values(values: Sequence[MetricValue], larger_is_better: bool) -> List[int]:
    """Competition ranks (1 = best, ties share the minimum); undefined values rank last."""
    dvals = [v.value for v in values if v.defined]
    last = len(dvals) + 1
    out = []
    for v in values:
        if not v.defined:
            out.append(last)
        elif larger_is_better:
            out.append(1 + sum(1 for w in dvals if w > v.value))
        else:
            out.append(1 + sum(1 for w in dvals if w < v.value))
    return out


def rank_matrices(matrices: Mapping[str, ConfusionMatrix], measures: Sequence,
                  params: CostParams = DEFAULT_PARAMS) -> RankTable:
    if len(matrices) < 2:
        raise InputError("need at least two classifiers")
    if not measures:
        raise InputError("measure list is empty")
    names = tuple(matrices)
    mids = tuple(resolve(m) for m in measures)
    mats = tuple(matrices[n] for n in names)
    values = [[evaluate(m, mat, params) for m in mids] for mat in mats]
    cols = [rank_values([row[j] for row in values], descriptor(m).larger_is_better) for j, m in enumerate(mids)]
    ranks = tuple(tuple(cols[j][i] for j in range(len(mids))) for i in range(len(names)))
    return RankTable(names, mids, tuple(tuple(r) for r in values), ranks, mats)


def _check_same_instances(scoresets: Mapping[str, Tuple[ScoredDataset, float]]) -> None:
    items = list(scoresets.items())
    ref_name, (ref, _) = items[0]
    ref_ids = ref.ids
    for name, (data, _) in items[1:]:
        if len(data) != len(ref):
            raise InputError(f"{name!r} has {len(data)} records, {ref_name!r} has {len(ref)}")
        ids = data.ids
        if ref_ids is not None and ids is not None:
            if sorted(ids) != sorted(ref_ids):
                raise InputError(f"instance ids of {name!r} do not match {ref_name!r}")
            truth = {r.id: r.label for r in ref.records}
            if any(truth[r.id] != r.label for r in data.records):
                raise InputError(f"true labels of {name!r} disagree with {ref_name!r}")
        elif data.class_sizes != ref.class_sizes:
            raise InputError(f"class sizes of {name!r} differ from {ref_name!r}")


def rank_classifiers(scoresets: Mapping[str, Tuple[ScoredDataset, float]], measures: Sequence,
                     params: CostParams = DEFAULT_PARAMS) -> RankTable:
    """Threshold each classifier's scores and rank the resulting matrices."""
    if len(scoresets) < 2:
        raise InputError("need at least two classifiers")
    if not measures:
        raise InputError("measure list is empty")
    _check_same_instances(scoresets)
    mats = {name: build_confusion(data, t) for name, (data, t) in scoresets.items()}
    return rank_matrices(mats, measures, params)


@dataclass(frozen=True)
class Reversal:
    classifiers: Tuple[str, str]
    measures: Tuple[MeasureId, MeasureId]

    def to_dict(self) -> dict:
        return {"classifiers": list(self.classifiers), "measures": [m.value for m in self.measures]}


@dataclass(frozen=True)
class DisagreementSummary:
    # Kendall tau-b per measure pair; None where a column is constant
    kendall: Dict[Tuple[MeasureId, MeasureId], Optional[float]]
    reversals: Tuple[Reversal, ...]
    winners: Tuple[str, ...]

    @property
    def n_winners(self) -> int:
        return len(self.winners)

    def tau(self, m1, m2) -> Optional[float]:
        m1, m2 = resolve(m1), resolve(m2)
        return self.kendall[(m1, m2)]

    def to_dict(self) -> dict:
        seen = {}
        for (m1, m2), t in self.kendall.items():
            key = tuple(sorted((m1.value, m2.value)))
            if m1 != m2 and key not in seen:
                seen[key] = t
        return {
            "kendall_tau_b": [{"measures": list(k), "tau": v} for k, v in sorted(seen.items())],
            "reversals": [r.to_dict() for r in self.reversals],
            "winners": list(self.winners),
            "n_winners": self.n_winners,
        }


def disagreement(table: RankTable) -> DisagreementSummary:
    """Pairwise Kendall tau-b between rank columns, rank reversals and distinct winners."""
    if len(table.measures) < 2 or len(table.classifiers) < 2:
        raise InputError("need at least two measures and two classifiers")
    cols = {m: table.column(m) for m in table.measures}
    kendall = {}
    for m1 in table.measures:
        for m2 in table.measures:
            tau = kendalltau(cols[m1], cols[m2], variant="b").statistic
            kendall[(m1, m2)] = None if math.isnan(tau) else float(tau)
    reversals = []
    k = len(table.classifiers)
    for i, j in combinations(range(k), 2):
        for m1, m2 in combinations(table.measures, 2):
            d1 = cols[m1][i] - cols[m1][j]
            d2 = cols[m2][i] - cols[m2][j]
            if d1 * d2 < 0:
                reversals.append(Reversal((table.classifiers[i], table.classifiers[j]), (m1, m2)))
    winners = [c for i, c in enumerate(table.classifiers) if any(cols[m][i] == 1 for m in table.measures)]
    return DisagreementSummary(kendall, tuple(reversals), tuple(winners))


# --------------------------------------------------------------------------
# manifest
# --------------------------------------------------------------------------

MANIFEST_HEADER = ("name", "path", "threshold")


def read_manifest(path) -> Dict[str, Tuple[ScoredDataset, float]]:
    """Load ``name,path,threshold`` rows; relative paths resolve against the manifest."""
    from pathlib import Path

    from .core import _parse_float, _read_rows, read_dataset_csv

    base = Path(path).parent
    out = {}
    for lineno, (name, rel, t) in _read_rows(path, MANIFEST_HEADER):
        name = name.strip()
        if not name:
            raise InputError(f"line {lineno}: empty classifier name")
        if name in out:
            raise InputError(f"line {lineno}: duplicate classifier name {name!r}")
        p = Path(rel.strip())
        if not p.is_absolute():
            p = base / p
        if not p.exists():
            raise InputError(f"line {lineno}: dataset file not found: {p}")
        try:
            data = read_dataset_csv(p)
        except InputError as exc:
            raise InputError(f"{p}: {exc}") from None
        out[name] = (data, _parse_float(t, lineno, "threshold"))
    if not out:
        raise InputError("manifest lists no classifiers")
    return out
