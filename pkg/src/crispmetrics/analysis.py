"""Threshold sweeps, measure-optimal thresholds, isoeffectiveness sets and
linear decision boundaries chosen to optimize a given measure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import ConfusionMatrix, InputError, ScoredDataset
from .measures import (
    DEFAULT_PARAMS,
    CostParams,
    MeasureId,
    MetricValue,
    descriptor,
    evaluate,
    evaluate_batch,
    resolve,
)
from .properties import enumerate_fixed_n

SINGLE_RATE_MEASURES = (MeasureId.SE, MeasureId.SP, MeasureId.PR, MeasureId.FDR, MeasureId.NPV, MeasureId.FOR)
ISO_N_GUARD = 200


class InfeasibleError(ValueError):
    """No candidate satisfies the request."""


@dataclass(frozen=True)
class CurvePoint:
    t: float
    matrix: ConfusionMatrix
    value: MetricValue


@dataclass(frozen=True)
class ThresholdCurve:
    measure: MeasureId
    points: Tuple[CurvePoint, ...]

    def __len__(self):
        return len(self.points)

    @property
    def thresholds(self) -> List[float]:
        return [p.t for p in self.points]


def candidate_thresholds(data: ScoredDataset) -> List[float]:
    """-inf, the midpoints between adjacent distinct scores, and +inf."""
    s = sorted(set(data.scores))
    mids = [(lo + hi) / 2 for lo, hi in zip(s, s[1:])]
    return [-math.inf] + mids + [math.inf]


def sweep_thresholds(data: ScoredDataset, measure, params: CostParams = DEFAULT_PARAMS) -> ThresholdCurve:
    """Evaluate a measure at every achievable split of the scores.

    The confusion matrix is piecewise constant in t, so one threshold per
    gap between distinct scores (plus the two all-one-class splits) covers
    every achievable matrix exactly once.
    """
    mid = resolve(measure)
    ts = candidate_thresholds(data)
    # counts above each threshold via a single sorted pass
    order = sorted(data.records, key=lambda r: r.score)
    n0, n1 = data.class_sizes
    points = []
    below0 = below1 = 0
    i = 0
    for t in ts:
        while i < len(order) and order[i].score <= t:
            if order[i].label == 1:
                below1 += 1
            else:
                below0 += 1
            i += 1
        m = ConfusionMatrix(below0, below1, n0 - below0, n1 - below1)
        points.append(CurvePoint(t, m, evaluate(mid, m, params)))
    return ThresholdCurve(mid, tuple(points))


def _better(desc, x: MetricValue, y: Optional[MetricValue]) -> bool:
    if not x.defined:
        return False
    if y is None or not y.defined:
        return True
    return x.value > y.value if desc.larger_is_better else x.value < y.value


def optimal_threshold(curve: ThresholdCurve) -> Tuple[float, MetricValue]:
    """Best defined value on the curve; ties go to the smaller threshold."""
    desc = descriptor(curve.measure)
    best = None
    for p in curve.points:
        if _better(desc, p.value, None if best is None else best.value):
            best = p
    if best is None:
        raise InfeasibleError(f"{curve.measure.value} is undefined at every threshold")
    return best.t, best.value


@dataclass(frozen=True)
class ConstrainedResult:
    feasible: bool
    t: Optional[float] = None
    value: Optional[MetricValue] = None
    fixed_value: Optional[MetricValue] = None
    n_feasible: int = 0


def constrained_optimum(data: ScoredDataset, fix, target: float, optimize,
                        params: CostParams = DEFAULT_PARAMS) -> ConstrainedResult:
    """Hold one single-rate measure at or beyond ``target`` and optimize another.

    For a larger-is-better fixed measure the constraint is value >= target,
    otherwise value <= target.
    """
    fix_id = resolve(fix)
    if fix_id not in SINGLE_RATE_MEASURES:
        raise InputError(f"the fixed measure must be one of {[m.value for m in SINGLE_RATE_MEASURES]}")
    fix_desc = descriptor(fix_id)
    fixed = sweep_thresholds(data, fix_id, params)
    opt = sweep_thresholds(data, optimize, params)
    opt_desc = descriptor(opt.measure)
    best = None
    n_ok = 0
    for pf, po in zip(fixed.points, opt.points):
        v = pf.value
        if not v.defined:
            continue
        if (v.value >= target) if fix_desc.larger_is_better else (v.value <= target):
            n_ok += 1
            if _better(opt_desc, po.value, None if best is None else best[1].value):
                best = (pf, po)
    if best is None:
        return ConstrainedResult(False, n_feasible=n_ok)
    return ConstrainedResult(True, best[1].t, best[1].value, best[0].value, n_ok)


def isoeffectiveness_set(measure, n: int, target: float, tol: float = 0.0,
                         params: CostParams = DEFAULT_PARAMS,
                         n_guard: int = ISO_N_GUARD) -> List[ConfusionMatrix]:
    """All matrices with a+b+c+d = n whose defined value is within tol of target."""
    if n < 1:
        raise InputError("n must be at least 1")
    if n > n_guard:
        raise InputError(f"n={n} exceeds the enumeration guard {n_guard}")
    if tol < 0:
        raise InputError("tol must be nonnegative")
    mid = resolve(measure)
    out = []
    for m in enumerate_fixed_n(n):
        v = evaluate(mid, m, params)
        if v.defined and abs(v.value - target) <= tol:
            out.append(m)
    return out


def isoeffectiveness_partition(measure, n: int, params: CostParams = DEFAULT_PARAMS):
    """Group the fixed-n simplex by exact value; undefined matrices keyed by None."""
    mid = resolve(measure)
    groups = {}
    for m in enumerate_fixed_n(n):
        v = evaluate(mid, m, params)
        groups.setdefault(v.value if v.defined else None, []).append(m)
    return groups


# --------------------------------------------------------------------------
# linear boundaries in the plane
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Point2D:
    x: float
    y: float
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise InputError(f"label must be 0 or 1, got {self.label!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InputError("point coordinates must be finite")


@dataclass(frozen=True)
class LinearBoundary:
    """Points with polarity * (x cos(angle) + y sin(angle) - offset) > 0 are class 1."""

    angle: float
    offset: float
    polarity: int = 1

    def __post_init__(self):
        if not 0.0 <= self.angle < math.pi:
            raise ValueError(f"angle must lie in [0, pi), got {self.angle}")
        if self.polarity not in (1, -1):
            raise ValueError("polarity must be +1 or -1")

    def predict(self, points: Sequence[Point2D]) -> List[int]:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return [int(self.polarity * (p.x * c + p.y * s - self.offset) > 0) for p in points]

    def confusion(self, points: Sequence[Point2D]) -> ConfusionMatrix:
        cells = [0, 0, 0, 0]
        for p, yhat in zip(points, self.predict(points)):
            cells[2 * yhat + p.label] += 1
        return ConfusionMatrix(*cells)


@dataclass(frozen=True)
class SearchBudget:
    n_angles: int = 360
    refine_rounds: int = 2
    refine_factor: int = 10


@dataclass
class BoundarySearch:
    boundary: LinearBoundary
    value: MetricValue
    n_evaluated: int
    # every defined value seen during the search, in evaluation order
    evaluated_values: np.ndarray = field(repr=False)


def _angle_candidates(points_xy, labels, angle):
    """All (offset, polarity, cells) splits for one direction, vectorized."""
    proj = points_xy[:, 0] * math.cos(angle) + points_xy[:, 1] * math.sin(angle)
    order = np.argsort(proj, kind="stable")
    sp, sl = proj[order], labels[order]
    distinct = np.flatnonzero(np.diff(sp) > 0)
    mids = (sp[distinct] + sp[distinct + 1]) / 2
    offsets = np.concatenate([[sp[0] - 1.0], mids, [sp[-1] + 1.0]])
    # number of each class at or below each offset
    cum1 = np.concatenate([[0], np.cumsum(sl)])
    cum0 = np.concatenate([[0], np.cumsum(1 - sl)])
    cut = np.concatenate([[0], distinct + 1, [len(sp)]])
    below0, below1 = cum0[cut], cum1[cut]
    n0, n1 = cum0[-1], cum1[-1]
    # polarity +1: above the offset is class 1
    pos = (below0, below1, n0 - below0, n1 - below1)
    # polarity -1: below the offset is class 1
    neg = (n0 - below0, n1 - below1, below0, below1)
    return offsets, pos, neg


def search_linear_boundary(points: Sequence[Point2D], measure, params: CostParams = DEFAULT_PARAMS,
                           budget: SearchBudget = SearchBudget()) -> BoundarySearch:
    """Deterministic coarse-to-fine grid search over lines in the plane.

    Angles start on a uniform grid over [0, pi); offsets are midpoints
    between consecutive projected points (plus one beyond each end); both
    polarities are tried. Each refinement round re-grids the neighbourhood
    of the best angle at ``refine_factor`` times finer resolution. Ties go
    to the lowest angle, then the lowest offset, then polarity +1.
    """
    if len(points) < 2:
        raise InputError("need at least two points")
    labels = np.array([p.label for p in points], dtype=np.int64)
    if labels.min() == labels.max():
        raise InputError("both classes must be present")
    mid = resolve(measure)
    desc = descriptor(mid)
    xy = np.array([[p.x, p.y] for p in points], dtype=float)
    sign = 1.0 if desc.larger_is_better else -1.0

    best_key = None
    best = None
    seen = []
    n_eval = 0

    def scan(angles):
        nonlocal best_key, best, n_eval
        for ang in angles:
            offsets, pos, neg = _angle_candidates(xy, labels, ang)
            for pol, cells in ((1, pos), (-1, neg)):
                vals, ok = evaluate_batch(mid, *cells, params)
                n_eval += len(vals)
                if not ok.any():
                    continue
                seen.append(vals[ok])
                score = np.where(ok, sign * vals, -np.inf)
                j = int(np.argmax(score))  # first max = lowest offset
                key = (score[j], -ang, -offsets[j], pol)
                if best_key is None or key > best_key:
                    best_key = key
                    best = (ang, float(offsets[j]), pol, float(vals[j]))

    step = math.pi / budget.n_angles
    scan([i * step for i in range(budget.n_angles)])
    for _ in range(budget.refine_rounds):
        centre = best[0]
        fine = step / budget.refine_factor
        k = budget.refine_factor
        angles = sorted({(centre + j * fine) % math.pi for j in range(-k, k + 1)})
        scan(angles)
        step = fine

    if best is None:
        raise InfeasibleError(f"{mid.value} is undefined for every candidate boundary")
    ang, off, pol, _ = best
    boundary = LinearBoundary(ang, off, pol)
    # report the value from the scalar path on the realized matrix
    value = evaluate(mid, boundary.confusion(points), params)
    return BoundarySearch(boundary, value, n_eval, np.concatenate(seen))


def fit_linear_boundary(points: Sequence[Point2D], measure, params: CostParams = DEFAULT_PARAMS,
                        budget: SearchBudget = SearchBudget()) -> Tuple[LinearBoundary, MetricValue]:
    res = search_linear_boundary(points, measure, params, budget)
    return res.boundary, res.value


def gaussian_mixture(n: int = 200, pi1: float = 0.1, seed: int = 7) -> List[Point2D]:
    """Fixed-seed imbalanced two-class mixture used by the demos and tests.

    Class 0 ~ N((0, 0), I); class 1 ~ N((1.25, 0.75), [[1, 0.6], [0.6, 1]]).
    Exactly round(n * pi1) points are class 1.
    """
    rng = np.random.default_rng(seed)
    n1 = int(round(n * pi1))
    n0 = n - n1
    x0 = rng.standard_normal((n0, 2))
    cov = np.array([[1.0, 0.6], [0.6, 1.0]])
    x1 = rng.multivariate_normal([1.25, 0.75], cov, size=n1)
    pts = [Point2D(float(x), float(y), 0) for x, y in x0]
    pts += [Point2D(float(x), float(y), 1) for x, y in x1]
    return pts


# --------------------------------------------------------------------------
# points CSV
# --------------------------------------------------------------------------

POINTS_HEADER = ("x", "y", "label")


def read_points_csv(source) -> List[Point2D]:
    from .core import _parse_float, _parse_label, _read_rows

    pts = []
    for lineno, (x, y, label) in _read_rows(source, POINTS_HEADER):
        pts.append(Point2D(_parse_float(x, lineno, "x"), _parse_float(y, lineno, "y"), _parse_label(label, lineno)))
    if not pts:
        raise InputError("points file has no rows")
    return pts


def write_points_csv(points: Sequence[Point2D], path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(POINTS_HEADER)
        for p in points:
            w.writerow([repr(p.x), repr(p.y), p.label])
