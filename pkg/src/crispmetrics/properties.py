"""Automated checks of structural and application properties of measures.

Enumeration-based checks run over every confusion matrix with
``1 <= n <= n_max`` using the vectorized evaluator; each reported
counterexample is re-verified with the scalar implementation before it is
returned. Monte Carlo checks take an explicit seed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .core import ConfusionMatrix
from .measures import (
    DEFAULT_PARAMS,
    REGISTRY,
    TABLE1_MEASURES,
    CostParams,
    MeasureId,
    MetricValue,
    evaluate,
    evaluate_batch,
    resolve,
)

DEFAULT_N_MAX = 50
CELLS = ("a", "b", "c", "d")
# relative tolerance used when comparing two float evaluations for equality
EQ_TOL = 1e-12


class Property(str, enum.Enum):
    MONOTONICITY = "monotonicity"
    BOUNDED_ABOVE = "bounded_above"
    BOUNDED_BELOW = "bounded_below"
    UNIT_INTERVAL = "unit_interval"
    CONSTANT_BASELINE = "constant_baseline"
    COMPLETE = "complete"
    SYMMETRY = "symmetry"
    IGNORES_CELLS = "ignores_cells"
    BALANCED = "balanced_prevalence_invariant"


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_CHECKABLE = "not_machine_checkable"


class ReportError(ValueError):
    """Reconciliation was asked for with missing check results."""


@dataclass(frozen=True)
class PropertyCheckResult:
    measure: MeasureId
    property: Property
    verdict: Verdict
    counterexample: Optional[tuple] = None
    domain_note: str = ""
    # cells that never changed the value (completeness checks only)
    insensitive_cells: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if (self.verdict is Verdict.FAILS) != (self.counterexample is not None):
            raise ValueError("a counterexample must accompany exactly the failing verdicts")

    def to_dict(self) -> dict:
        out = {
            "measure": self.measure.value,
            "property": self.property.value,
            "verdict": self.verdict.value,
            "counterexample": _jsonable(self.counterexample),
            "domain_note": self.domain_note,
        }
        if self.insensitive_cells is not None:
            out["insensitive_cells"] = list(self.insensitive_cells)
        return out


def _jsonable(obj):
    if obj is None:
        return None
    if isinstance(obj, ConfusionMatrix):
        return list(obj.as_tuple())
    if isinstance(obj, (tuple, list)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------

def count_matrices(n: int) -> int:
    """Number of matrices with a + b + c + d = n."""
    return math.comb(n + 3, 3)


def enumerate_matrices(n_max: int) -> Iterator[ConfusionMatrix]:
    """Every matrix with 1 <= a+b+c+d <= n_max, ordered by n then (a, b, c)."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    for n in range(1, n_max + 1):
        yield from enumerate_fixed_n(n)


def enumerate_fixed_n(n: int) -> Iterator[ConfusionMatrix]:
    for a in range(n + 1):
        for b in range(n - a + 1):
            for c in range(n - a - b + 1):
                yield ConfusionMatrix(a, b, c, n - a - b - c)


@lru_cache(maxsize=8)
def _simplex_arrays(n_max: int, n_min: int = 1):
    """Cell arrays for every matrix with n_min <= n <= n_max (same order as enumerate_matrices)."""
    blocks = []
    for n in range(n_min, n_max + 1):
        a, b, c = np.meshgrid(np.arange(n + 1), np.arange(n + 1), np.arange(n + 1), indexing="ij")
        mask = a + b + c <= n
        a, b, c = a[mask], b[mask], c[mask]
        blocks.append(np.stack([a, b, c, n - a - b - c]))
    arr = np.concatenate(blocks, axis=1).astype(np.int64)
    arr.setflags(write=False)
    return arr[0], arr[1], arr[2], arr[3]


def _matrix_at(cells, i) -> ConfusionMatrix:
    return ConfusionMatrix(*(int(x[i]) for x in cells))


def _scalar_equal(x: MetricValue, y: MetricValue, tol: float = EQ_TOL) -> bool:
    if x.defined != y.defined:
        return False
    if not x.defined:
        return True
    return math.isclose(x.value, y.value, rel_tol=tol, abs_tol=tol)


def _close(u, v, tol=EQ_TOL):
    return np.isclose(u, v, rtol=tol, atol=tol)


# --------------------------------------------------------------------------
# monotonicity
# --------------------------------------------------------------------------

def _not_worse(desc, new: float, old: float, tol: float = EQ_TOL) -> bool:
    slack = tol * max(1.0, abs(old))
    return new >= old - slack if desc.larger_is_better else new <= old + slack


def check_monotonicity(measure, n_max: int = DEFAULT_N_MAX,
                       params: CostParams = DEFAULT_PARAMS) -> PropertyCheckResult:
    """Correcting one misclassified object must never worsen the measure.

    Tests M(a+1, b, c-1, d) against M(a, b, c, d) for c >= 1 and
    M(a, b-1, c, d+1) against M(a, b, c, d) for b >= 1, oriented by direction.
    """
    if n_max < 2:
        raise ValueError("monotonicity needs n_max >= 2")
    mid = resolve(measure)
    desc = REGISTRY[mid]
    a, b, c, d = _simplex_arrays(n_max)
    base, ok = evaluate_batch(mid, a, b, c, d, params)
    tested = skipped = 0
    for moved in ("c", "b"):
        sel = (c >= 1) if moved == "c" else (b >= 1)
        if moved == "c":
            new_cells = (a[sel] + 1, b[sel], c[sel] - 1, d[sel])
        else:
            new_cells = (a[sel], b[sel] - 1, c[sel], d[sel] + 1)
        new, ok_new = evaluate_batch(mid, *new_cells, params)
        both = ok[sel] & ok_new
        skipped += int((~both).sum())
        tested += int(both.sum())
        old = base[sel]
        slack = EQ_TOL * np.maximum(1.0, np.abs(old))
        if desc.larger_is_better:
            bad = both & (new < old - slack)
        else:
            bad = both & (new > old + slack)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            before = ConfusionMatrix(*(int(x[sel][i]) for x in (a, b, c, d)))
            after = ConfusionMatrix(*(int(x[i]) for x in new_cells))
            vb, va = evaluate(mid, before, params), evaluate(mid, after, params)
            if not (vb.defined and va.defined and not _not_worse(desc, va.value, vb.value)):
                raise AssertionError(f"batch and scalar disagree on {before} -> {after}")
            return PropertyCheckResult(
                mid, Property.MONOTONICITY, Verdict.FAILS, (before, after),
                f"exhaustive n<={n_max}; correcting one {'FP' if moved == 'c' else 'FN'} "
                f"moved {desc.id.value} from {vb.value!r} to {va.value!r}",
            )
    return PropertyCheckResult(
        mid, Property.MONOTONICITY, Verdict.HOLDS, None,
        f"exhaustive n<={n_max}; {tested} transfers tested, {skipped} skipped as undefined",
    )


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------

def _extremum(values, ok, cells, pick):
    vals = np.where(ok, values, np.nan)
    if not ok.any():
        return None, None
    i = int(np.nanargmax(vals) if pick == "max" else np.nanargmin(vals))
    return float(values[i]), _matrix_at(cells, i)


def check_bounds(measure, n_max: int = DEFAULT_N_MAX,
                 params: CostParams = DEFAULT_PARAMS) -> Tuple[PropertyCheckResult, ...]:
    """Empirical range over the enumeration versus the declared range.

    Returns (BoundedAbove, BoundedBelow, UnitInterval). A side with no
    declared bound holds only if the extremum stops moving between the
    half-size and full-size enumerations; growth yields a counterexample.
    """
    mid = resolve(measure)
    desc = REGISTRY[mid]
    cells = _simplex_arrays(n_max)
    values, ok = evaluate_batch(mid, *cells, params)
    half = _simplex_arrays(max(1, n_max // 2))
    hv, hok = evaluate_batch(mid, *half, params)
    skip = float((~ok).mean())
    vmax, argmax = _extremum(values, ok, cells, "max")
    vmin, argmin = _extremum(values, ok, cells, "min")
    hmax, _ = _extremum(hv, hok, half, "max")
    hmin, _ = _extremum(hv, hok, half, "min")
    note = (f"exhaustive n<={n_max}; observed range [{vmin!r}, {vmax!r}] "
            f"at {argmin} / {argmax}; undefined fraction {skip:.4f}")

    results = []
    for prop, bound, ext, arg, hext, sign in (
        (Property.BOUNDED_ABOVE, desc.upper, vmax, argmax, hmax, 1),
        (Property.BOUNDED_BELOW, desc.lower, vmin, argmin, hmin, -1),
    ):
        if ext is None:
            results.append(PropertyCheckResult(mid, prop, Verdict.HOLDS, None, note + "; no defined values"))
            continue
        if bound is not None:
            violated = sign * (ext - bound) > EQ_TOL
            extra = f"; declared bound {bound}"
        else:
            # growth between n_max//2 and n_max witnesses unboundedness
            violated = sign * (ext - hext) > EQ_TOL
            extra = f"; no declared bound, extremum moved from {hext!r} to {ext!r} as n doubled"
        if violated:
            v = evaluate(mid, arg, params)
            ref = bound if bound is not None else hext
            assert v.defined and sign * (v.value - ref) > 0
            results.append(PropertyCheckResult(mid, prop, Verdict.FAILS, (arg,), note + extra))
        else:
            results.append(PropertyCheckResult(mid, prop, Verdict.HOLDS, None, note + extra))

    outside = ok & ((values < -EQ_TOL) | (values > 1 + EQ_TOL))
    if outside.any():
        i = int(np.flatnonzero(outside)[0])
        results.append(PropertyCheckResult(mid, Property.UNIT_INTERVAL, Verdict.FAILS,
                                           (_matrix_at(cells, i),), note))
    else:
        results.append(PropertyCheckResult(mid, Property.UNIT_INTERVAL, Verdict.HOLDS, None, note))
    return tuple(results)


def unbounded_witnesses(measure, sizes: Sequence[int] = (1, 2, 5, 10, 100),
                        params: CostParams = DEFAULT_PARAMS) -> List[Tuple[ConfusionMatrix, MetricValue]]:
    """Evaluate the measure on the families (K, 1, 1, K) and (K, 0, 1, K) used as growth witnesses."""
    out = []
    for k in sizes:
        for m in (ConfusionMatrix(k, 1, 1, k), ConfusionMatrix(1, 1, k, 1), ConfusionMatrix(1, k, 1, 1)):
            out.append((m, evaluate(measure, m, params)))
    return out


# --------------------------------------------------------------------------
# symmetry and prevalence invariance
# --------------------------------------------------------------------------

def _compare_pairs(mid, cells_x, cells_y, params):
    vx, okx = evaluate_batch(mid, *cells_x, params)
    vy, oky = evaluate_batch(mid, *cells_y, params)
    same = (okx & oky & _close(vx, vy)) | (~okx & ~oky)
    return same, okx, oky


def check_symmetry(measure, n_max: int = DEFAULT_N_MAX,
                   params: CostParams = DEFAULT_PARAMS) -> PropertyCheckResult:
    """Does M(a, b, c, d) equal M(d, c, b, a) (class labels exchanged)?"""
    mid = resolve(measure)
    a, b, c, d = _simplex_arrays(n_max)
    same, okx, oky = _compare_pairs(mid, (a, b, c, d), (d, c, b, a), params)
    undefined_both = int((~okx & ~oky).sum())
    if not same.all():
        i = int(np.flatnonzero(~same)[0])
        m = _matrix_at((a, b, c, d), i)
        assert not _scalar_equal(evaluate(mid, m, params), evaluate(mid, m.swapped(), params))
        return PropertyCheckResult(mid, Property.SYMMETRY, Verdict.FAILS, (m, m.swapped()),
                                   f"exhaustive n<={n_max}")
    return PropertyCheckResult(mid, Property.SYMMETRY, Verdict.HOLDS, None,
                               f"exhaustive n<={n_max}; {undefined_both} matrices undefined on both sides")


BALANCE_FACTORS = (2, 3, 5)


def check_balanced(measure, n_max: int = DEFAULT_N_MAX,
                   params: CostParams = DEFAULT_PARAMS,
                   factors: Sequence[int] = BALANCE_FACTORS) -> PropertyCheckResult:
    """Prevalence invariance: M(a, lb, c, ld) == M(a, b, c, d) for integer l."""
    mid = resolve(measure)
    a, b, c, d = _simplex_arrays(n_max)
    for lam in factors:
        same, _, _ = _compare_pairs(mid, (a, b, c, d), (a, lam * b, c, lam * d), params)
        if not same.all():
            i = int(np.flatnonzero(~same)[0])
            m = _matrix_at((a, b, c, d), i)
            scaled = ConfusionMatrix(m.a, lam * m.b, m.c, lam * m.d)
            assert not _scalar_equal(evaluate(mid, m, params), evaluate(mid, scaled, params))
            return PropertyCheckResult(mid, Property.BALANCED, Verdict.FAILS, (m, scaled),
                                       f"exhaustive n<={n_max}; class-1 column scaled by {lam}")
    return PropertyCheckResult(mid, Property.BALANCED, Verdict.HOLDS, None,
                               f"exhaustive n<={n_max}; class-1 column scaled by {list(factors)}")


# --------------------------------------------------------------------------
# completeness
# --------------------------------------------------------------------------

def check_completeness(measure, trials: int = 2000, seed: int = 0,
                       params: CostParams = DEFAULT_PARAMS,
                       max_count: int = 30) -> Tuple[PropertyCheckResult, PropertyCheckResult]:
    """Which cells influence the value?

    Each cell in turn is incremented by one on ``trials`` random matrices
    (cells uniform on 0..max_count). A cell influences the measure if some
    such perturbation changes a defined value. Returns (Complete, IgnoresCells).
    """
    mid = resolve(measure)
    rng = np.random.default_rng(seed)
    base = rng.integers(0, max_count + 1, size=(4, trials))
    base[3, base.sum(axis=0) == 0] = 1
    v0, ok0 = evaluate_batch(mid, *base, params)
    witnesses = {}
    insensitive = []
    for j, name in enumerate(CELLS):
        bumped = base.copy()
        bumped[j] += 1
        v1, ok1 = evaluate_batch(mid, *bumped, params)
        changed = ok0 & ok1 & ~_close(v0, v1)
        both = ok0 & ok1
        if changed.any():
            i = int(np.flatnonzero(changed)[0])
            witnesses[name] = (ConfusionMatrix(*map(int, base[:, i])), ConfusionMatrix(*map(int, bumped[:, i])))
        else:
            insensitive.append(name)
            i = int(np.flatnonzero(both)[0]) if both.any() else 0
            witnesses[name] = (ConfusionMatrix(*map(int, base[:, i])), ConfusionMatrix(*map(int, bumped[:, i])))

    for name, (x, y) in witnesses.items():
        eq = _scalar_equal(evaluate(mid, x, params), evaluate(mid, y, params))
        assert eq == (name in insensitive), (mid, name)

    note = f"{trials} random matrices, cells in 0..{max_count}, seed {seed}"
    ignored = tuple(insensitive)
    if ignored:
        complete = PropertyCheckResult(
            mid, Property.COMPLETE, Verdict.FAILS, tuple(witnesses[c] for c in ignored), note, ignored)
        ignores = PropertyCheckResult(mid, Property.IGNORES_CELLS, Verdict.HOLDS, None, note, ignored)
    else:
        complete = PropertyCheckResult(mid, Property.COMPLETE, Verdict.HOLDS, None, note, ())
        ignores = PropertyCheckResult(
            mid, Property.IGNORES_CELLS, Verdict.FAILS, tuple(witnesses[c] for c in CELLS), note, ())
    return complete, ignores


# --------------------------------------------------------------------------
# constant baseline
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BaselinePoint:
    q: int
    mean: float
    std_error: float
    skip_rate: float


def baseline_grid(n: int) -> List[int]:
    qs = {1, n - 1}
    qs.update(round(n * f / 10) for f in range(1, 10))
    return sorted(q for q in qs if 0 < q < n)


def random_assignment_means(measure, n: int = 100, pi1: float = 0.3, trials: int = 20000,
                            seed: int = 0, params: CostParams = DEFAULT_PARAMS,
                            grid: Optional[Sequence[int]] = None) -> List[BaselinePoint]:
    """Mean of the measure when q of n objects are labelled 1 uniformly at random.

    The true labels are fixed with round(n * pi1) objects in class 1. For a
    uniformly random size-q subset, the number of true positives is
    hypergeometric, which fixes the whole matrix; that count is drawn directly.
    """
    mid = resolve(measure)
    n1 = int(round(n * pi1))
    n0 = n - n1
    if n1 == 0 or n0 == 0:
        raise ValueError("both classes must be non-empty")
    rng = np.random.default_rng(seed)
    points = []
    for q in (grid if grid is not None else baseline_grid(n)):
        tp = rng.hypergeometric(n1, n0, q, size=trials)
        d = tp
        c = q - tp
        b = n1 - tp
        a = n0 - c
        v, ok = evaluate_batch(mid, a, b, c, d, params)
        kept = v[ok]
        if kept.size:
            mean = float(kept.mean())
            se = float(kept.std(ddof=1) / math.sqrt(kept.size)) if kept.size > 1 else float("inf")
        else:
            mean, se = float("nan"), float("inf")
        points.append(BaselinePoint(q, mean, se, 1.0 - kept.size / trials))
    return points


def check_constant_baseline(measure, n: int = 100, trials: int = 20000, seed: int = 0,
                            pi1: float = 0.3, params: CostParams = DEFAULT_PARAMS) -> PropertyCheckResult:
    """Random assignments must have the same expected value for every predicted split.

    Holds iff every pair of grid means differs by at most three combined
    standard errors.
    """
    if n < 20 or trials < 10000:
        raise ValueError("constant-baseline check needs n >= 20 and trials >= 10000")
    mid = resolve(measure)
    pts = [p for p in random_assignment_means(mid, n, pi1, trials, seed, params) if math.isfinite(p.mean)]
    note = (f"n={n}, pi1={pi1}, trials={trials}, seed={seed}; "
            + ", ".join(f"q={p.q}: {p.mean:.4f}±{p.std_error:.4f} (skip {p.skip_rate:.3f})" for p in pts))
    worst = None
    for i, p in enumerate(pts):
        for r in pts[i + 1:]:
            z = abs(p.mean - r.mean) / math.hypot(p.std_error, r.std_error) if (p.std_error or r.std_error) else (
                0.0 if p.mean == r.mean else math.inf)
            if z > 3 and (worst is None or z > worst[0]):
                worst = (z, p, r)
    if worst is not None:
        z, p, r = worst
        return PropertyCheckResult(mid, Property.CONSTANT_BASELINE, Verdict.FAILS,
                                   ((p.q, p.mean), (r.q, r.mean)), note + f"; largest gap {z:.1f} SE")
    return PropertyCheckResult(mid, Property.CONSTANT_BASELINE, Verdict.HOLDS, None, note)


# --------------------------------------------------------------------------
# reconciliation with the published property table
# --------------------------------------------------------------------------

TABLE1_COLUMNS = ("costs", "complete", "symmetry", "meaning", "balanced", "ignores_cells")
COLUMN_PROPERTY = {
    "complete": Property.COMPLETE,
    "symmetry": Property.SYMMETRY,
    "balanced": Property.BALANCED,
    "ignores_cells": Property.IGNORES_CELLS,
}

# Cells where the checked verdict is known to differ from the printed claim.
# The balanced entries follow from the prevalence-invariance reading; the
# others are algebraic facts about the printed formulas.
EXPECTED_DISCREPANCIES: Dict[Tuple[MeasureId, str], str] = {
    (MeasureId.SE, "balanced"): "d/(b+d) is unchanged when b and d are scaled together",
    (MeasureId.SP, "balanced"): "a/(a+c) does not involve the class-1 column",
    (MeasureId.GACC, "balanced"): "function of Se and Sp only",
    (MeasureId.PLR, "balanced"): "function of Se and Sp only",
    (MeasureId.NLR, "balanced"): "function of Se and Sp only",
    (MeasureId.DOR, "balanced"): "ad/(bc) is unchanged when b and d are scaled together",
    (MeasureId.MAR, "balanced"): "Pr and NPV both move with prevalence",
}

# Printed cells contradicted by the measure's own formula. Kept apart from the
# balanced list so the strict comparison can still report them.
FORMULA_CONFLICTS: Dict[Tuple[MeasureId, str], str] = {
    (MeasureId.FM, "complete"): "sqrt(Se*Pr) = d/sqrt((b+d)(c+d)) never involves a",
    (MeasureId.FM, "ignores_cells"): "sqrt(Se*Pr) = d/sqrt((b+d)(c+d)) never involves a",
    (MeasureId.FS, "complete"): "harmonic mean including Sp and NPV depends on a",
    (MeasureId.FS, "ignores_cells"): "harmonic mean including Sp and NPV depends on a",
    (MeasureId.FA, "complete"): "F' = 2/(1/Sp + 1/NPV) depends on a",
    (MeasureId.FA, "ignores_cells"): "F' = 2/(1/Sp + 1/NPV) depends on a",
    (MeasureId.BACC, "symmetry"): "(Se+Sp)/2 is invariant under exchanging labels",
    (MeasureId.GACC, "symmetry"): "sqrt(Se*Sp) is invariant under exchanging labels",
    (MeasureId.J, "symmetry"): "Se+Sp-1 is invariant under exchanging labels",
    (MeasureId.MAR, "symmetry"): "Pr+NPV-1 is invariant under exchanging labels",
    (MeasureId.MCC, "symmetry"): "(ad-bc)/sqrt(...) is invariant under (a,b,c,d)->(d,c,b,a)",
    (MeasureId.DOR, "symmetry"): "ad/(bc) is invariant under (a,b,c,d)->(d,c,b,a)",
}


@dataclass(frozen=True)
class ReconciliationCell:
    measure: MeasureId
    column: str
    claimed: bool
    verdict: Verdict
    status: str  # "agree", "expected_discrepancy", "formula_conflict", "unexpected", "not_checked"
    note: str = ""

    @property
    def checked(self) -> Optional[bool]:
        if self.verdict is Verdict.NOT_CHECKABLE:
            return None
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> dict:
        return {
            "measure": self.measure.value,
            "column": self.column,
            "claimed": self.claimed,
            "checked": self.checked,
            "status": self.status,
            "note": self.note,
        }


@dataclass(frozen=True)
class ReconciliationReport:
    cells: Tuple[ReconciliationCell, ...]
    # None when the Complete/IgnoresCells columns were not both reconciled
    complement_identity_holds: Optional[bool]

    def rows(self) -> Dict[MeasureId, Dict[str, ReconciliationCell]]:
        out: Dict[MeasureId, Dict[str, ReconciliationCell]] = {}
        for cell in self.cells:
            out.setdefault(cell.measure, {})[cell.column] = cell
        return out

    def with_status(self, *statuses: str) -> List[ReconciliationCell]:
        return [c for c in self.cells if c.status in statuses]

    @property
    def unexpected(self) -> List[ReconciliationCell]:
        return self.with_status("unexpected")

    def to_dict(self) -> dict:
        return {
            "complement_identity_holds": self.complement_identity_holds,
            "cells": [c.to_dict() for c in self.cells],
        }


def reconcile_table1(results: Iterable[PropertyCheckResult], measures: Optional[Iterable] = None,
                     columns: Optional[Iterable[str]] = None) -> ReconciliationReport:
    """Compare checked verdicts with the published property flags, cell by cell.

    With no ``measures``/``columns`` every table row and every checkable
    column must be covered. Otherwise the report is restricted to the given
    measures (those outside the table are dropped) and, unless ``columns`` is
    given, to the columns whose checks are present for all of them.
    """
    by_key = {(r.measure, r.property): r for r in results}
    strict = measures is None and columns is None
    mids = list(TABLE1_MEASURES) if measures is None else [
        m for m in (resolve(x) for x in measures) if m in TABLE1_MEASURES]
    if columns is not None:
        cols = [c for c in columns if c in COLUMN_PROPERTY]
    elif strict:
        cols = list(COLUMN_PROPERTY)
    else:
        cols = [c for c, p in COLUMN_PROPERTY.items() if all((m, p) in by_key for m in mids)]
    missing = [f"{m.value}:{COLUMN_PROPERTY[c].value}" for m in mids for c in cols
               if (m, COLUMN_PROPERTY[c]) not in by_key]
    if missing:
        raise ReportError("missing check results: " + ", ".join(missing))

    cells = []
    complement_ok: Optional[bool] = None
    if "complete" in cols and "ignores_cells" in cols:
        complement_ok = True
    for mid in mids:
        claimed = REGISTRY[mid].claimed_properties
        if complement_ok is not None:
            complete = by_key[(mid, Property.COMPLETE)].verdict
            ignores = by_key[(mid, Property.IGNORES_CELLS)].verdict
            if (complete is Verdict.HOLDS) == (ignores is Verdict.HOLDS):
                complement_ok = False
            if claimed.complete == claimed.ignores_cells:
                complement_ok = False
        for col in TABLE1_COLUMNS:
            flag = getattr(claimed, col)
            if col not in COLUMN_PROPERTY:
                cells.append(ReconciliationCell(mid, col, flag, Verdict.NOT_CHECKABLE, "not_checked",
                                                "conceptual flag carried as metadata"))
                continue
            if col not in cols:
                continue
            res = by_key[(mid, COLUMN_PROPERTY[col])]
            agrees = (res.verdict is Verdict.HOLDS) == flag
            if agrees:
                status, note = "agree", ""
            elif (mid, col) in EXPECTED_DISCREPANCIES:
                status, note = "expected_discrepancy", EXPECTED_DISCREPANCIES[(mid, col)]
            elif (mid, col) in FORMULA_CONFLICTS:
                status, note = "formula_conflict", FORMULA_CONFLICTS[(mid, col)]
            else:
                status, note = "unexpected", res.domain_note
            cells.append(ReconciliationCell(mid, col, flag, res.verdict, status, note))
    return ReconciliationReport(tuple(cells), complement_ok)


# --------------------------------------------------------------------------
# suite driver
# --------------------------------------------------------------------------

ENUMERATION_PROPERTIES = (
    Property.MONOTONICITY, Property.BOUNDED_ABOVE, Property.BOUNDED_BELOW, Property.UNIT_INTERVAL,
    Property.SYMMETRY, Property.BALANCED,
)
ALL_PROPERTIES = tuple(Property)


def run_checks(measures: Optional[Iterable] = None, properties: Optional[Iterable] = None,
               n_max: int = DEFAULT_N_MAX, trials: int = 20000, seed: int = 0,
               params: CostParams = DEFAULT_PARAMS, baseline_n: int = 100,
               baseline_pi1: float = 0.3) -> List[PropertyCheckResult]:
    """Run the selected checks; results sorted by (measure, property)."""
    mids = [resolve(m) for m in (measures if measures is not None else REGISTRY)]
    props = set(Property(p) for p in (properties if properties is not None else ALL_PROPERTIES))
    out: List[PropertyCheckResult] = []
    for mid in mids:
        if Property.MONOTONICITY in props:
            out.append(check_monotonicity(mid, n_max, params))
        if props & {Property.BOUNDED_ABOVE, Property.BOUNDED_BELOW, Property.UNIT_INTERVAL}:
            out.extend(r for r in check_bounds(mid, n_max, params) if r.property in props)
        if Property.SYMMETRY in props:
            out.append(check_symmetry(mid, n_max, params))
        if Property.BALANCED in props:
            out.append(check_balanced(mid, n_max, params))
        if props & {Property.COMPLETE, Property.IGNORES_CELLS}:
            out.extend(r for r in check_completeness(mid, seed=seed, params=params) if r.property in props)
        if Property.CONSTANT_BASELINE in props:
            out.append(check_constant_baseline(mid, baseline_n, trials, seed, baseline_pi1, params))
    order = {p: i for i, p in enumerate(Property)}
    mid_order = {m: i for i, m in enumerate(MeasureId)}
    out.sort(key=lambda r: (mid_order[r.measure], order[r.property]))
    return out
