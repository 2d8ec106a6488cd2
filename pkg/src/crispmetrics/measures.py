"""The crisp performance-measure catalog.

Every measure is a total function of a :class:`ConfusionMatrix` (plus cost
parameters where needed). A vanishing denominator produces an undefined
:class:`MetricValue` carrying its reason instead of raising or returning NaN.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .core import ConfusionMatrix


class ParameterError(ValueError):
    """A cost or weight parameter is missing or out of range."""


class UnknownMeasureError(LookupError):
    """A measure identifier or alias does not resolve."""


class UndefinedReason(str, enum.Enum):
    ZERO_DENOMINATOR = "zero_denominator"
    LOG_OF_ZERO_MASS = "log_of_zero_mass"
    EMPTY_CLASS = "empty_class"


@dataclass(frozen=True)
class MetricValue:
    """Either a finite real value or an explicit undefined marker."""

    value: Optional[float] = None
    reason: Optional[UndefinedReason] = None

    def __post_init__(self):
        if (self.value is None) == (self.reason is None):
            raise ValueError("exactly one of value and reason must be set")
        if self.value is not None and not math.isfinite(self.value):
            raise ValueError(f"defined metric values must be finite, got {self.value}")

    @property
    def defined(self) -> bool:
        return self.value is not None

    def __float__(self):
        if self.value is None:
            raise ValueError(f"metric is undefined ({self.reason.value})")
        return self.value

    def __str__(self):
        if self.value is None:
            return f"undefined({self.reason.value})"
        return repr(self.value)


def defined(x) -> MetricValue:
    return MetricValue(value=float(x))


def undefined(reason: UndefinedReason = UndefinedReason.ZERO_DENOMINATOR) -> MetricValue:
    return MetricValue(reason=reason)


ZERO_DEN = undefined(UndefinedReason.ZERO_DENOMINATOR)
EMPTY = undefined(UndefinedReason.EMPTY_CLASS)


class MeasureId(str, enum.Enum):
    SE = "se"
    SP = "sp"
    PR = "pr"
    FDR = "fdr"
    NPV = "npv"
    FOR = "for"
    ACC = "acc"
    BACC = "bacc"
    GACC = "gacc"
    ER = "er"
    WER = "wer"
    K = "kappa"
    J = "j"
    MAR = "mar"
    F1 = "f1"
    FBETA = "fbeta"
    FSTAR = "fstar"
    FS = "fs"
    FA = "fa"
    MCC = "mcc"
    PLR = "plr"
    NLR = "nlr"
    DOR = "dor"
    FM = "fm"
    WRACC = "wracc"
    MI = "mi"
    T1 = "t1"
    PEV = "pev"


class Direction(str, enum.Enum):
    LARGER_IS_BETTER = "larger_is_better"
    SMALLER_IS_BETTER = "smaller_is_better"


@dataclass(frozen=True)
class CostParams:
    """Weights and costs used by the parameterized measures.

    ``k`` weights misclassified class-1 objects in WER, ``alpha`` is the
    precision weight of F-beta, ``theta`` and ``k_fraud`` are the
    investigation cost and cost ratio of T1.
    """

    k: Optional[float] = 0.3
    alpha: Optional[float] = 0.5
    theta: Optional[float] = 1.0
    k_fraud: Optional[float] = 10.0

    def __post_init__(self):
        for name in ("k", "alpha"):
            v = getattr(self, name)
            if v is not None and not (0.0 < v < 1.0):
                raise ParameterError(f"{name} must lie in (0, 1), got {v}")
        for name in ("theta", "k_fraud"):
            v = getattr(self, name)
            if v is not None and not (v > 0.0 and math.isfinite(v)):
                raise ParameterError(f"{name} must be a positive finite number, got {v}")

    @property
    def beta(self) -> float:
        return alpha_to_beta(self.require("alpha"))

    def require(self, name: str) -> float:
        v = getattr(self, name)
        if v is None:
            raise ParameterError(f"parameter {name!r} is required")
        return v


def alpha_to_beta(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return math.sqrt(1.0 / alpha - 1.0)


def beta_to_alpha(beta: float) -> float:
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ParameterError(f"beta must be positive and finite, got {beta}")
    return 1.0 / (1.0 + beta * beta)


DEFAULT_PARAMS = CostParams()


# --------------------------------------------------------------------------
# scalar definitions
# --------------------------------------------------------------------------

def _ratio(num, den) -> MetricValue:
    if den == 0:
        return ZERO_DEN
    return defined(num / den)


def se(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.d, m.b + m.d)


def sp(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.a, m.a + m.c)


def pr(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.d, m.c + m.d)


def fdr(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.c, m.c + m.d)


def npv(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.a, m.a + m.b)


def for_(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.b, m.a + m.b)


def acc(m: ConfusionMatrix) -> MetricValue:
    return defined((m.a + m.d) / m.n)


def er(m: ConfusionMatrix) -> MetricValue:
    return defined((m.b + m.c) / m.n)


def _both_classes(m: ConfusionMatrix) -> bool:
    return m.a + m.c > 0 and m.b + m.d > 0


def bacc(m: ConfusionMatrix) -> MetricValue:
    if not _both_classes(m):
        return EMPTY
    return defined((se(m).value + sp(m).value) / 2)


def gacc(m: ConfusionMatrix) -> MetricValue:
    if not _both_classes(m):
        return EMPTY
    return defined(math.sqrt(se(m).value * sp(m).value))


def wer(m: ConfusionMatrix, k: float) -> MetricValue:
    if not 0.0 < k < 1.0:
        raise ParameterError(f"k must lie in (0, 1), got {k}")
    return defined((k * m.b + (1 - k) * m.c) / m.n)


def kappa(m: ConfusionMatrix) -> MetricValue:
    a, b, c, d = m.as_tuple()
    return _ratio(2 * (a * d - b * c), (c + d) * (a + c) + (b + d) * (a + b))


def kappa_chance_form(m: ConfusionMatrix) -> MetricValue:
    """Kappa as (ACC - chance) / (1 - chance), chance = p0*pi0 + p1*pi1."""
    chance = m.p0 * m.pi0 + m.p1 * m.pi1
    return _ratio((m.a + m.d) / m.n - chance, 1 - chance)


def youden_j(m: ConfusionMatrix) -> MetricValue:
    s, t = se(m), sp(m)
    if not (s.defined and t.defined):
        return ZERO_DEN
    return defined(s.value + t.value - 1)


def markedness(m: ConfusionMatrix) -> MetricValue:
    p, q = pr(m), npv(m)
    if not (p.defined and q.defined):
        return ZERO_DEN
    return defined(p.value + q.value - 1)


def mcc(m: ConfusionMatrix) -> MetricValue:
    a, b, c, d = m.as_tuple()
    den = (c + d) * (b + d) * (a + c) * (a + b)
    if den == 0:
        return ZERO_DEN
    return defined((a * d - b * c) / math.sqrt(den))


def f1(m: ConfusionMatrix) -> MetricValue:
    return _ratio(2 * m.d, m.b + m.c + 2 * m.d)


def fstar(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.d, m.b + m.c + m.d)


def _harmonic(rates, weights) -> MetricValue:
    # weighted harmonic mean; any undefined or zero constituent -> undefined
    total = 0.0
    for r, w in zip(rates, weights):
        if not r.defined or r.value == 0.0:
            return ZERO_DEN
        total += w / r.value
    return defined(1.0 / total)


def fbeta(m: ConfusionMatrix, alpha: float) -> MetricValue:
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    return _harmonic((pr(m), se(m)), (alpha, 1 - alpha))


def fs(m: ConfusionMatrix) -> MetricValue:
    return _harmonic((se(m), sp(m), pr(m), npv(m)), (0.25, 0.25, 0.25, 0.25))


def fa(m: ConfusionMatrix) -> MetricValue:
    pos = _harmonic((se(m), pr(m)), (0.5, 0.5))
    neg = _harmonic((sp(m), npv(m)), (0.5, 0.5))
    if not (pos.defined and neg.defined):
        return ZERO_DEN
    return defined((pos.value + neg.value) / 2)


def fm(m: ConfusionMatrix) -> MetricValue:
    s, p = se(m), pr(m)
    if not (s.defined and p.defined):
        return ZERO_DEN
    return defined(math.sqrt(s.value * p.value))


def plr(m: ConfusionMatrix) -> MetricValue:
    a, b, c, d = m.as_tuple()
    if b + d == 0 or a + c == 0:
        return ZERO_DEN
    return _ratio(d * (a + c), c * (b + d))


def nlr(m: ConfusionMatrix) -> MetricValue:
    a, b, c, d = m.as_tuple()
    if b + d == 0 or a + c == 0:
        return ZERO_DEN
    return _ratio(b * (a + c), a * (b + d))


def dor(m: ConfusionMatrix) -> MetricValue:
    return _ratio(m.a * m.d, m.b * m.c)


def wracc(m: ConfusionMatrix) -> MetricValue:
    if m.b + m.d == 0:
        return EMPTY
    return defined(4 * (se(m).value - m.p1) * m.pi1)


def _xlog2(p: float) -> float:
    return p * math.log2(p) if p > 0 else 0.0


def mutual_information(m: ConfusionMatrix) -> MetricValue:
    """Mutual information between true and predicted labels, in bits."""
    n = m.n
    a, b, c, d = (x / n for x in m.as_tuple())
    pred0, pred1 = a + b, c + d
    true0, true1 = a + c, b + d
    total = 0.0
    for p, row, col in ((a, pred0, true0), (b, pred0, true1), (c, pred1, true0), (d, pred1, true1)):
        if p > 0:
            total += p * math.log2(p / (row * col))
    # clamp the rounding residue of an exactly-independent table
    return defined(max(total, 0.0))


def average_within_variance(m: ConfusionMatrix) -> float:
    """Average variance of the true label within each predicted class."""
    a, b, c, d = m.as_tuple()
    s = 0.0
    if a + b > 0:
        s += a * b / (a + b)
    if c + d > 0:
        s += c * d / (c + d)
    return s / m.n


def total_variance(m: ConfusionMatrix) -> float:
    return (m.a + m.c) * (m.b + m.d) / m.n ** 2


def pev(m: ConfusionMatrix) -> MetricValue:
    """Proportion of the true-label variance explained by the predictions."""
    a, b, c, d = m.as_tuple()
    if (a + c) * (b + d) == 0:
        return EMPTY
    within = 0.0
    if a + b > 0:
        within += a * b / (a + b)
    if c + d > 0:
        within += c * d / (c + d)
    return defined(1.0 - m.n * within / ((a + c) * (b + d)))


def t1(m: ConfusionMatrix, theta: float, k_fraud: float) -> MetricValue:
    if not theta > 0 or not k_fraud > 0:
        raise ParameterError("theta and k_fraud must be positive")
    return defined((m.b * k_fraud + m.c + m.d) * theta)


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

def rate_family(m: ConfusionMatrix) -> Dict[MeasureId, MetricValue]:
    return {
        MeasureId.SE: se(m),
        MeasureId.SP: sp(m),
        MeasureId.PR: pr(m),
        MeasureId.FDR: fdr(m),
        MeasureId.NPV: npv(m),
        MeasureId.FOR: for_(m),
    }


def accuracy_family(m: ConfusionMatrix) -> Dict[MeasureId, MetricValue]:
    return {MeasureId.ACC: acc(m), MeasureId.BACC: bacc(m), MeasureId.GACC: gacc(m), MeasureId.ER: er(m)}


def weighted_error(m: ConfusionMatrix, k: float) -> MetricValue:
    return wer(m, k)


def agreement_family(m: ConfusionMatrix) -> Dict[MeasureId, MetricValue]:
    return {MeasureId.K: kappa(m), MeasureId.J: youden_j(m), MeasureId.MAR: markedness(m), MeasureId.MCC: mcc(m)}


def f_family(m: ConfusionMatrix, alpha: float = 0.5) -> Dict[MeasureId, MetricValue]:
    return {
        MeasureId.F1: f1(m),
        MeasureId.FBETA: fbeta(m, alpha),
        MeasureId.FSTAR: fstar(m),
        MeasureId.FS: fs(m),
        MeasureId.FA: fa(m),
        MeasureId.FM: fm(m),
    }


def likelihood_family(m: ConfusionMatrix) -> Dict[MeasureId, MetricValue]:
    return {MeasureId.PLR: plr(m), MeasureId.NLR: nlr(m), MeasureId.DOR: dor(m)}


def info_family(m: ConfusionMatrix) -> Dict[MeasureId, MetricValue]:
    return {MeasureId.WRACC: wracc(m), MeasureId.MI: mutual_information(m), MeasureId.PEV: pev(m)}


def fraud_cost_t1(m: ConfusionMatrix, theta: float, k_fraud: float) -> MetricValue:
    return t1(m, theta, k_fraud)


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Table1Flags:
    costs: bool = False
    complete: bool = False
    symmetry: bool = False
    meaning: bool = False
    balanced: bool = False
    ignores_cells: bool = False


@dataclass(frozen=True)
class MeasureDescriptor:
    id: MeasureId
    canonical_name: str
    aliases: Tuple[str, ...]
    direction: Direction
    params_required: Tuple[str, ...]
    # None for measures outside the published property table (T1, PEV)
    claimed_properties: Optional[Table1Flags]
    lower: Optional[float]
    upper: Optional[float]
    baseline_adjusted: bool = False
    func: Callable = field(default=None, repr=False, compare=False)

    @property
    def larger_is_better(self) -> bool:
        return self.direction is Direction.LARGER_IS_BETTER

    def compute(self, m: ConfusionMatrix, params: CostParams = DEFAULT_PARAMS) -> MetricValue:
        args = [params.require(p) for p in self.params_required]
        return self.func(m, *args)


_L, _S = Direction.LARGER_IS_BETTER, Direction.SMALLER_IS_BETTER
_F = Table1Flags


def _d(mid, name, aliases, direction, func, flags, lo, hi, params=(), baseline=False):
    return MeasureDescriptor(mid, name, tuple(aliases), direction, tuple(params), flags, lo, hi, baseline, func)


_ONE_DOF = _F(meaning=True, ignores_cells=True)

REGISTRY: Dict[MeasureId, MeasureDescriptor] = {
    d.id: d
    for d in (
        _d(MeasureId.SE, "Sensitivity", ["se", "recall", "r", "tpr", "hitrate", "true_positive_rate", "sensitivity"],
           _L, se, _ONE_DOF, 0.0, 1.0),
        _d(MeasureId.SP, "Specificity", ["sp", "tnr", "selectivity", "true_negative_rate", "specificity"],
           _L, sp, _ONE_DOF, 0.0, 1.0),
        _d(MeasureId.PR, "Precision", ["pr", "ppv", "precision", "positive_predictive_value"],
           _L, pr, _ONE_DOF, 0.0, 1.0),
        _d(MeasureId.FDR, "False Discovery Rate", ["fdr", "fallout", "false_discovery_rate"],
           _S, fdr, _ONE_DOF, 0.0, 1.0),
        _d(MeasureId.NPV, "Negative Predictive Value", ["npv", "negative_predictive_value"],
           _L, npv, _ONE_DOF, 0.0, 1.0),
        _d(MeasureId.FOR, "False Omission Rate", ["for", "false_omission_rate"],
           _S, for_, _ONE_DOF, 0.0, 1.0),
        _d(MeasureId.ACC, "Accuracy", ["acc", "accuracy"],
           _L, acc, _F(complete=True, symmetry=True, meaning=True), 0.0, 1.0),
        _d(MeasureId.BACC, "Balanced Accuracy", ["bacc", "balanced_accuracy"],
           _L, bacc, _F(complete=True, meaning=True, balanced=True), 0.0, 1.0),
        _d(MeasureId.GACC, "Geometric Accuracy", ["gacc", "gmean", "geometric_accuracy"],
           _L, gacc, _F(complete=True, meaning=True), 0.0, 1.0),
        _d(MeasureId.ER, "Error Rate", ["er", "error_rate", "misclassification_rate"],
           _S, er, _F(complete=True, symmetry=True, meaning=True), 0.0, 1.0),
        _d(MeasureId.WER, "Weighted Error Rate", ["wer", "weighted_error_rate"],
           _S, wer, _F(costs=True, complete=True, meaning=True), 0.0, 1.0, params=("k",)),
        _d(MeasureId.K, "Cohen's Kappa", ["kappa", "k", "cohens_kappa"],
           _L, kappa, _F(complete=True, symmetry=True, meaning=True), -1.0, 1.0, baseline=True),
        _d(MeasureId.J, "Youden's J", ["j", "youden", "informedness", "inf", "youden_index"],
           _L, youden_j, _F(complete=True, balanced=True), -1.0, 1.0),
        _d(MeasureId.MAR, "Markedness", ["mar", "deltap", "markedness"],
           _L, markedness, _F(complete=True, balanced=True), -1.0, 1.0),
        _d(MeasureId.F1, "F-measure", ["f1", "f", "f_measure"],
           _L, f1, _F(ignores_cells=True), 0.0, 1.0),
        _d(MeasureId.FBETA, "Weighted F-measure", ["fbeta", "f_beta"],
           _L, fbeta, _F(costs=True, ignores_cells=True), 0.0, 1.0, params=("alpha",)),
        _d(MeasureId.FSTAR, "F-star", ["fstar", "f_star", "jaccard", "threat_score", "csi",
                                       "critical_success_index", "tanimoto"],
           _L, fstar, _F(ignores_cells=True), 0.0, 1.0),
        _d(MeasureId.FS, "Symmetric F", ["fs", "symmetric_f"],
           _L, fs, _F(symmetry=True, ignores_cells=True), 0.0, 1.0),
        _d(MeasureId.FA, "Average F-measure", ["fa", "average_f"],
           _L, fa, _F(symmetry=True, ignores_cells=True), 0.0, 1.0),
        _d(MeasureId.MCC, "Matthews Correlation Coefficient", ["mcc", "phi", "cramers_v", "matthews"],
           _L, mcc, _F(complete=True), -1.0, 1.0),
        _d(MeasureId.PLR, "Positive Likelihood Ratio", ["plr", "lr+", "positive_likelihood_ratio"],
           _L, plr, _F(complete=True), 0.0, None),
        _d(MeasureId.NLR, "Negative Likelihood Ratio", ["nlr", "lr-", "negative_likelihood_ratio"],
           _S, nlr, _F(complete=True), 0.0, None),
        _d(MeasureId.DOR, "Diagnostic Odds Ratio", ["dor", "diagnostic_odds_ratio"],
           _L, dor, _F(complete=True), 0.0, None),
        _d(MeasureId.FM, "Fowlkes-Mallows Index", ["fm", "fowlkes_mallows"],
           _L, fm, _F(complete=True, meaning=True), 0.0, 1.0),
        _d(MeasureId.WRACC, "Weighted Relative Accuracy", ["wracc", "weighted_relative_accuracy"],
           _L, wracc, _F(complete=True), -1.0, 1.0, baseline=True),
        _d(MeasureId.MI, "Mutual Information", ["mi", "mutual_information"],
           _L, mutual_information, _F(complete=True, symmetry=True), 0.0, 1.0),
        _d(MeasureId.T1, "Fraud cost T1", ["t1"],
           _S, t1, None, 0.0, None, params=("theta", "k_fraud")),
        _d(MeasureId.PEV, "Proportion of Explained Variation", ["pev", "explained_variation"],
           _L, pev, None, 0.0, 1.0),
    )
}

TABLE1_MEASURES: Tuple[MeasureId, ...] = tuple(i for i, d in REGISTRY.items() if d.claimed_properties is not None)

_ALIASES: Dict[str, MeasureId] = {}
for _desc in REGISTRY.values():
    for _alias in _desc.aliases + (_desc.id.value,):
        if _ALIASES.setdefault(_alias, _desc.id) is not _desc.id:
            raise RuntimeError(f"alias {_alias!r} registered twice")


def resolve(name) -> MeasureId:
    """Map an id, enum member or alias (case-insensitive) to a MeasureId."""
    if isinstance(name, MeasureId):
        return name
    try:
        return _ALIASES[str(name).strip().lower()]
    except KeyError:
        raise UnknownMeasureError(f"unknown measure {name!r}") from None


def descriptor(name) -> MeasureDescriptor:
    return REGISTRY[resolve(name)]


def evaluate(name, m: ConfusionMatrix, params: CostParams = DEFAULT_PARAMS) -> MetricValue:
    return descriptor(name).compute(m, params)


def evaluate_all(m: ConfusionMatrix, params: CostParams = DEFAULT_PARAMS) -> Dict[MeasureId, MetricValue]:
    return {mid: desc.compute(m, params) for mid, desc in REGISTRY.items()}


def is_better(desc: MeasureDescriptor, x: float, y: float) -> bool:
    """True if value ``x`` is strictly better than ``y`` for this measure."""
    return x > y if desc.larger_is_better else x < y


# --------------------------------------------------------------------------
# batch evaluation over count arrays
# --------------------------------------------------------------------------

def _div(num, den):
    ok = den != 0
    out = np.zeros(np.broadcast(num, den).shape, dtype=float)
    np.divide(num, den, out=out, where=ok)
    return out, ok


def evaluate_batch(name, a, b, c, d, params: CostParams = DEFAULT_PARAMS):
    """Evaluate one measure over arrays of cell counts.

    Returns ``(values, ok)``: a float array and a boolean mask marking where
    the measure is defined. Undefined positions hold 0.0.
    """
    mid = resolve(name)
    a, b, c, d = (np.asarray(x, dtype=np.int64) for x in (a, b, c, d))
    af, bf, cf, df = (x.astype(float) for x in (a, b, c, d))
    n = af + bf + cf + df
    pos, neg = b + d, a + c
    ppos, pneg = c + d, a + b

    def hmean(parts, weights):
        total = np.zeros(n.shape)
        ok = np.ones(n.shape, dtype=bool)
        for (v, o), w in zip(parts, weights):
            o = o & (v != 0)
            ok &= o
            total += np.divide(w, v, out=np.zeros(n.shape), where=o)
        return np.divide(1.0, total, out=np.zeros(n.shape), where=ok), ok

    if mid is MeasureId.SE:
        return _div(df, pos)
    if mid is MeasureId.SP:
        return _div(af, neg)
    if mid is MeasureId.PR:
        return _div(df, ppos)
    if mid is MeasureId.FDR:
        return _div(cf, ppos)
    if mid is MeasureId.NPV:
        return _div(af, pneg)
    if mid is MeasureId.FOR:
        return _div(bf, pneg)
    if mid is MeasureId.ACC:
        return (af + df) / n, np.ones(n.shape, dtype=bool)
    if mid is MeasureId.ER:
        return (bf + cf) / n, np.ones(n.shape, dtype=bool)
    if mid is MeasureId.WER:
        k = params.require("k")
        return (k * bf + (1 - k) * cf) / n, np.ones(n.shape, dtype=bool)
    if mid in (MeasureId.BACC, MeasureId.GACC, MeasureId.J, MeasureId.WRACC):
        s, ok1 = _div(df, pos)
        t, ok2 = _div(af, neg)
        ok = ok1 & ok2
        if mid is MeasureId.BACC:
            return np.where(ok, (s + t) / 2, 0.0), ok
        if mid is MeasureId.GACC:
            return np.where(ok, np.sqrt(s * t), 0.0), ok
        if mid is MeasureId.J:
            return np.where(ok, s + t - 1, 0.0), ok
        # WRACC needs only the positive class
        return np.where(ok1, 4 * (s - (cf + df) / n) * (bf + df) / n, 0.0), ok1
    if mid is MeasureId.MAR:
        p, ok1 = _div(df, ppos)
        q, ok2 = _div(af, pneg)
        ok = ok1 & ok2
        return np.where(ok, p + q - 1, 0.0), ok
    if mid is MeasureId.K:
        return _div(2.0 * (a * d - b * c), ((c + d) * (a + c) + (b + d) * (a + b)).astype(float))
    if mid is MeasureId.MCC:
        den = ppos.astype(float) * pos * neg * pneg
        v, ok = _div((a * d - b * c).astype(float), np.sqrt(den))
        return v, ok
    if mid is MeasureId.F1:
        return _div(2 * df, bf + cf + 2 * df)
    if mid is MeasureId.FSTAR:
        return _div(df, bf + cf + df)
    if mid is MeasureId.FBETA:
        alpha = params.require("alpha")
        return hmean([_div(df, ppos), _div(df, pos)], [alpha, 1 - alpha])
    if mid is MeasureId.FS:
        return hmean([_div(df, pos), _div(af, neg), _div(df, ppos), _div(af, pneg)], [0.25] * 4)
    if mid is MeasureId.FA:
        v1, ok1 = hmean([_div(df, pos), _div(df, ppos)], [0.5, 0.5])
        v2, ok2 = hmean([_div(af, neg), _div(af, pneg)], [0.5, 0.5])
        ok = ok1 & ok2
        return np.where(ok, (v1 + v2) / 2, 0.0), ok
    if mid is MeasureId.FM:
        s, ok1 = _div(df, pos)
        p, ok2 = _div(df, ppos)
        ok = ok1 & ok2
        return np.where(ok, np.sqrt(s * p), 0.0), ok
    if mid is MeasureId.PLR:
        v, ok = _div(df * neg, cf * pos)
        return v, ok & (pos != 0) & (neg != 0)
    if mid is MeasureId.NLR:
        v, ok = _div(bf * neg, af * pos)
        return v, ok & (pos != 0) & (neg != 0)
    if mid is MeasureId.DOR:
        return _div(af * df, bf * cf)
    if mid is MeasureId.MI:
        total = np.zeros(n.shape)
        for cell, row, col in ((af, pneg, neg), (bf, pneg, pos), (cf, ppos, neg), (df, ppos, pos)):
            p = cell / n
            mask = cell > 0
            ratio = np.divide(cell * n, row.astype(float) * col, out=np.ones(n.shape), where=mask)
            total += np.where(mask, p * np.log2(ratio), 0.0)
        return np.maximum(total, 0.0), np.ones(n.shape, dtype=bool)
    if mid is MeasureId.PEV:
        w0, _ = _div(af * bf, pneg.astype(float))
        w1, _ = _div(cf * df, ppos.astype(float))
        tot = neg.astype(float) * pos
        r, ok = _div(n * (w0 + w1), tot)
        return np.where(ok, 1.0 - r, 0.0), ok
    if mid is MeasureId.T1:
        theta, kf = params.require("theta"), params.require("k_fraud")
        return (bf * kf + cf + df) * theta, np.ones(n.shape, dtype=bool)
    raise UnknownMeasureError(mid)
