import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import entropy

from crispmetrics.core import ConfusionMatrix, expand_labels
from crispmetrics import measures as M
from crispmetrics.measures import (
    REGISTRY,
    CostParams,
    Direction,
    MeasureId,
    ParameterError,
    UndefinedReason,
    UnknownMeasureError,
    evaluate,
    evaluate_batch,
    resolve,
)
from crispmetrics.properties import _simplex_arrays

from conftest import random_matrices

cells = st.integers(min_value=0, max_value=200)


@st.composite
def matrices(draw, lo=0):
    a, b, c, d = (draw(st.integers(min_value=lo, max_value=200)) for _ in range(4))
    if a + b + c + d == 0:
        d = 1
    return ConfusionMatrix(a, b, c, d)


def val(mid, m, params=M.DEFAULT_PARAMS):
    return evaluate(mid, m, params).value


# Exact reference values for (a, b, c, d) = (40, 10, 20, 30), from rational arithmetic.
REF = {
    MeasureId.SE: Fraction(3, 4),
    MeasureId.SP: Fraction(2, 3),
    MeasureId.PR: Fraction(3, 5),
    MeasureId.FDR: Fraction(2, 5),
    MeasureId.NPV: Fraction(4, 5),
    MeasureId.FOR: Fraction(1, 5),
    MeasureId.ACC: Fraction(7, 10),
    MeasureId.ER: Fraction(3, 10),
    MeasureId.BACC: Fraction(17, 24),
    MeasureId.K: Fraction(2, 5),
    MeasureId.J: Fraction(5, 12),
    MeasureId.MAR: Fraction(2, 5),
    MeasureId.F1: Fraction(2, 3),
    MeasureId.FSTAR: Fraction(1, 2),
    MeasureId.FS: Fraction(16, 23),
    MeasureId.FA: Fraction(23, 33),
    MeasureId.PLR: Fraction(9, 4),
    MeasureId.NLR: Fraction(3, 8),
    MeasureId.DOR: Fraction(6),
    MeasureId.WRACC: Fraction(2, 5),
    MeasureId.PEV: Fraction(1, 6),
}


class TestReferenceMatrix:
    def test_fraction_oracle_recomputes_table(self):
        # the frozen fractions above come from these closed forms
        a, b, c, d = 40, 10, 20, 30
        se, sp = Fraction(d, b + d), Fraction(a, a + c)
        pr, npv = Fraction(d, c + d), Fraction(a, a + b)
        assert REF[MeasureId.FS] == 4 / (1 / se + 1 / sp + 1 / pr + 1 / npv)
        assert REF[MeasureId.FA] == (2 / (1 / se + 1 / pr) + 2 / (1 / sp + 1 / npv)) / 2
        assert REF[MeasureId.K] == Fraction(2 * (a * d - b * c), (c + d) * (a + c) + (b + d) * (a + b))
        assert REF[MeasureId.PEV] == 1 - 100 * (Fraction(a * b, a + b) + Fraction(c * d, c + d)) / ((a + c) * (b + d))

    @pytest.mark.parametrize("mid", list(REF))
    def test_exact_values(self, m_ref, mid):
        assert val(mid, m_ref) == pytest.approx(float(REF[mid]), rel=1e-14, abs=1e-15)

    def test_irrational_values(self, m_ref):
        assert val(MeasureId.MCC, m_ref) == pytest.approx(1000 / math.sqrt(50 * 40 * 60 * 50), rel=1e-14)
        assert val(MeasureId.MCC, m_ref) == pytest.approx(0.408248, abs=1e-6)
        assert val(MeasureId.GACC, m_ref) == pytest.approx(math.sqrt(0.5), rel=1e-14)
        assert val(MeasureId.FM, m_ref) == pytest.approx(math.sqrt(0.75 * 0.6), rel=1e-14)
        assert val(MeasureId.FM, m_ref) == pytest.approx(0.670820, abs=1e-6)

    def test_mutual_information_entropy_oracle(self, m_ref):
        h_true = entropy([0.6, 0.4], base=2)
        h_pred = entropy([0.5, 0.5], base=2)
        h_joint = entropy([0.4, 0.1, 0.2, 0.3], base=2)
        assert val(MeasureId.MI, m_ref) == pytest.approx(h_true + h_pred - h_joint, abs=1e-12)
        assert val(MeasureId.MI, m_ref) == pytest.approx(0.12451124978365313, abs=1e-12)

    def test_parameterized(self, m_ref):
        assert M.wer(m_ref, 0.8).value == pytest.approx(0.12, abs=1e-15)
        assert M.t1(m_ref, 2.0, 5.0).value == 200.0


class TestGoldenExamples:
    def test_fraud_example(self):
        m = ConfusionMatrix(98901, 1, 999, 99)
        fam = M.rate_family(m)
        assert fam[MeasureId.SE].value == 0.99
        assert fam[MeasureId.SP].value == 0.99
        assert fam[MeasureId.FDR].value == pytest.approx(999 / 1098, abs=1e-15)
        assert fam[MeasureId.FDR].value == pytest.approx(0.9098360656, abs=1e-9)

    def test_majority_classifier(self):
        m = ConfusionMatrix(99, 1, 0, 0)
        fam = M.rate_family(m)
        assert not fam[MeasureId.PR].defined and fam[MeasureId.PR].reason is UndefinedReason.ZERO_DENOMINATOR
        assert not fam[MeasureId.FDR].defined
        assert fam[MeasureId.SE].value == 0.0 and fam[MeasureId.SP].value == 1.0
        acc = M.accuracy_family(m)
        assert acc[MeasureId.ACC].value == 0.99 and acc[MeasureId.ER].value == 0.01

    def test_perfect_classifier(self):
        m = ConfusionMatrix(50, 0, 0, 50)
        allv = M.evaluate_all(m)
        for mid in (MeasureId.SE, MeasureId.SP, MeasureId.PR, MeasureId.NPV, MeasureId.ACC, MeasureId.BACC,
                    MeasureId.GACC, MeasureId.K, MeasureId.J, MeasureId.MAR, MeasureId.MCC, MeasureId.F1,
                    MeasureId.FBETA, MeasureId.FSTAR, MeasureId.FS, MeasureId.FA, MeasureId.FM, MeasureId.MI,
                    MeasureId.PEV):
            assert allv[mid].value == pytest.approx(1.0, abs=1e-15), mid
        for mid in (MeasureId.FDR, MeasureId.FOR, MeasureId.ER, MeasureId.WER):
            assert allv[mid].value == 0.0
        assert M.t1(m, 1.0, 10.0).value == 50.0

    def test_chance_level(self):
        m = ConfusionMatrix(25, 25, 25, 25)
        for mid in (MeasureId.K, MeasureId.J, MeasureId.MAR, MeasureId.MCC, MeasureId.MI,
                    MeasureId.WRACC, MeasureId.PEV):
            assert val(mid, m) == pytest.approx(0.0, abs=1e-15), mid
        for mid in (MeasureId.PLR, MeasureId.NLR, MeasureId.DOR):
            assert val(mid, m) == 1.0


class TestUndefined:
    @pytest.mark.parametrize("mid, cells_, reason", [
        (MeasureId.BACC, (3, 0, 2, 0), UndefinedReason.EMPTY_CLASS),
        (MeasureId.GACC, (0, 2, 0, 1), UndefinedReason.EMPTY_CLASS),
        (MeasureId.WRACC, (3, 0, 2, 0), UndefinedReason.EMPTY_CLASS),
        (MeasureId.PEV, (3, 0, 2, 0), UndefinedReason.EMPTY_CLASS),
        (MeasureId.MCC, (3, 2, 0, 0), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.K, (0, 0, 0, 4), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.F1, (5, 0, 0, 0), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.FSTAR, (5, 0, 0, 0), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.FS, (5, 1, 1, 0), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.FBETA, (5, 1, 1, 0), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.DOR, (5, 0, 1, 3), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.PLR, (5, 1, 0, 3), UndefinedReason.ZERO_DENOMINATOR),
        (MeasureId.NLR, (0, 1, 2, 3), UndefinedReason.ZERO_DENOMINATOR),
    ])
    def test_reasons(self, mid, cells_, reason):
        v = evaluate(mid, ConfusionMatrix(*cells_))
        assert not v.defined and v.reason is reason
        with pytest.raises(ValueError):
            float(v)

    def test_f1_defined_without_a(self):
        assert val(MeasureId.F1, ConfusionMatrix(0, 1, 0, 0)) == 0.0
        assert val(MeasureId.FSTAR, ConfusionMatrix(0, 0, 3, 0)) == 0.0

    def test_pev_skips_empty_predicted_row(self):
        # all predicted 0: nothing explained
        assert val(MeasureId.PEV, ConfusionMatrix(6, 4, 0, 0)) == pytest.approx(0.0, abs=1e-15)
        assert M.average_within_variance(ConfusionMatrix(6, 4, 0, 0)) == pytest.approx(M.total_variance(
            ConfusionMatrix(6, 4, 0, 0)))

    def test_mi_always_defined(self):
        for m in random_matrices(200, 30, seed=5):
            assert M.mutual_information(m).defined


class TestParameters:
    @pytest.mark.parametrize("kw", [{"k": 0.0}, {"k": 1.0}, {"alpha": 1.2}, {"theta": 0.0}, {"k_fraud": -1.0}])
    def test_out_of_range(self, kw):
        with pytest.raises(ParameterError):
            CostParams(**kw)

    def test_direct_calls_validate(self, m_ref):
        with pytest.raises(ParameterError):
            M.wer(m_ref, 1.5)
        with pytest.raises(ParameterError):
            M.fbeta(m_ref, 0.0)
        with pytest.raises(ParameterError):
            M.t1(m_ref, 0.0, 1.0)

    def test_missing_required_parameter(self, m_ref):
        with pytest.raises(ParameterError):
            evaluate("wer", m_ref, CostParams(k=None))
        with pytest.raises(ParameterError):
            evaluate("t1", m_ref, CostParams(theta=None))
        # unrelated measures do not need it
        assert evaluate("acc", m_ref, CostParams(k=None)).defined

    @given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
    def test_alpha_beta_bijection(self, alpha):
        assert M.beta_to_alpha(M.alpha_to_beta(alpha)) == pytest.approx(alpha, rel=1e-9)

    @settings(max_examples=200)
    @given(matrices(), st.floats(min_value=0.01, max_value=0.99))
    def test_fbeta_alternative_form(self, m, alpha):
        v = M.fbeta(m, alpha)
        s, p = M.se(m), M.pr(m)
        if v.defined:
            beta2 = M.alpha_to_beta(alpha) ** 2
            alt = (1 + beta2) * p.value * s.value / (beta2 * p.value + s.value)
            assert v.value == pytest.approx(alt, rel=1e-12)


class TestRegistry:
    def test_28_measures(self):
        assert len(REGISTRY) == 28
        assert len(M.TABLE1_MEASURES) == 26

    @pytest.mark.parametrize("alias", [
        "se", "recall", "tpr", "sp", "tnr", "pr", "ppv", "fdr", "npv", "for", "acc", "bacc", "gacc", "er",
        "wer", "kappa", "j", "youden", "informedness", "mar", "deltap", "f1", "fbeta", "fstar", "jaccard",
        "fs", "fa", "mcc", "phi", "plr", "nlr", "dor", "fm", "wracc", "mi", "t1", "pev",
    ])
    def test_cli_aliases_resolve(self, alias):
        assert resolve(alias) in REGISTRY
        assert resolve(alias.upper()) is resolve(alias)

    def test_alias_targets(self):
        assert resolve("Recall") is MeasureId.SE
        assert resolve("youden") is resolve("informedness") is MeasureId.J
        assert resolve("jaccard") is MeasureId.FSTAR
        assert resolve("phi") is MeasureId.MCC
        assert resolve("deltap") is MeasureId.MAR

    def test_unknown(self):
        with pytest.raises(UnknownMeasureError):
            resolve("auc")

    def test_directions(self):
        smaller = {mid for mid, d in REGISTRY.items() if d.direction is Direction.SMALLER_IS_BETTER}
        assert smaller == {MeasureId.ER, MeasureId.WER, MeasureId.FDR, MeasureId.FOR, MeasureId.NLR, MeasureId.T1}

    def test_table1_transcription(self):
        complete = {m for m in M.TABLE1_MEASURES if REGISTRY[m].claimed_properties.complete}
        assert complete == {MeasureId.ACC, MeasureId.BACC, MeasureId.GACC, MeasureId.ER, MeasureId.WER,
                            MeasureId.K, MeasureId.J, MeasureId.MAR, MeasureId.MCC, MeasureId.PLR,
                            MeasureId.NLR, MeasureId.DOR, MeasureId.FM, MeasureId.WRACC, MeasureId.MI}
        symmetric = {m for m in M.TABLE1_MEASURES if REGISTRY[m].claimed_properties.symmetry}
        assert symmetric == {MeasureId.ACC, MeasureId.ER, MeasureId.K, MeasureId.FS, MeasureId.FA, MeasureId.MI}
        balanced = {m for m in M.TABLE1_MEASURES if REGISTRY[m].claimed_properties.balanced}
        assert balanced == {MeasureId.BACC, MeasureId.J, MeasureId.MAR}
        costs = {m for m in M.TABLE1_MEASURES if REGISTRY[m].claimed_properties.costs}
        assert costs == {MeasureId.WER, MeasureId.FBETA}
        meaning = {m for m in M.TABLE1_MEASURES if REGISTRY[m].claimed_properties.meaning}
        assert len(meaning) == 13 and MeasureId.FM in meaning
        for m in M.TABLE1_MEASURES:
            flags = REGISTRY[m].claimed_properties
            assert flags.ignores_cells == (not flags.complete)

    def test_evaluate_matches_families(self, m_ref):
        params = CostParams(k=0.8, alpha=0.3, theta=2.0, k_fraud=5.0)
        fam = {}
        fam.update(M.rate_family(m_ref))
        fam.update(M.accuracy_family(m_ref))
        fam.update(M.agreement_family(m_ref))
        fam.update(M.f_family(m_ref, 0.3))
        fam.update(M.likelihood_family(m_ref))
        fam.update(M.info_family(m_ref))
        fam[MeasureId.WER] = M.weighted_error(m_ref, 0.8)
        fam[MeasureId.T1] = M.fraud_cost_t1(m_ref, 2.0, 5.0)
        assert set(fam) == set(REGISTRY)
        for mid in REGISTRY:
            assert evaluate(mid, m_ref, params) == fam[mid]


class TestIdentities:
    @settings(max_examples=300)
    @given(matrices())
    def test_complements_and_identities(self, m):
        v = M.evaluate_all(m)

        def both(x, y):
            return v[x].defined and v[y].defined

        assert v[MeasureId.ER].value == pytest.approx(1 - v[MeasureId.ACC].value, abs=1e-12)
        if both(MeasureId.FDR, MeasureId.PR):
            assert v[MeasureId.FDR].value == pytest.approx(1 - v[MeasureId.PR].value, abs=1e-12)
        if both(MeasureId.FOR, MeasureId.NPV):
            assert v[MeasureId.FOR].value == pytest.approx(1 - v[MeasureId.NPV].value, abs=1e-12)
        if both(MeasureId.F1, MeasureId.FSTAR):
            f1 = v[MeasureId.F1].value
            assert v[MeasureId.FSTAR].value == pytest.approx(f1 / (2 - f1), abs=1e-12)
        if both(MeasureId.PLR, MeasureId.NLR) and v[MeasureId.NLR].value > 0 and v[MeasureId.DOR].defined:
            assert v[MeasureId.DOR].value == pytest.approx(v[MeasureId.PLR].value / v[MeasureId.NLR].value,
                                                           rel=1e-12)
        alt = M.kappa_chance_form(m)
        if v[MeasureId.K].defined and alt.defined:
            assert v[MeasureId.K].value == pytest.approx(alt.value, abs=1e-12)

    @settings(max_examples=300)
    @given(matrices())
    def test_mean_inequalities(self, m):
        v = M.evaluate_all(m)
        if v[MeasureId.F1].defined and v[MeasureId.FM].defined:
            assert v[MeasureId.F1].value <= v[MeasureId.FM].value + 1e-12
        if v[MeasureId.GACC].defined:
            assert v[MeasureId.GACC].value <= v[MeasureId.BACC].value + 1e-12
        if v[MeasureId.FS].defined:
            assert v[MeasureId.FS].value <= v[MeasureId.FA].value + 1e-12

    @settings(max_examples=300)
    @given(matrices())
    def test_ranges(self, m):
        v = M.evaluate_all(m, CostParams(k=0.7))
        unit = [MeasureId.ACC, MeasureId.ER, MeasureId.WER, MeasureId.SE, MeasureId.SP, MeasureId.PR,
                MeasureId.FDR, MeasureId.NPV, MeasureId.FOR, MeasureId.F1, MeasureId.FBETA, MeasureId.FSTAR,
                MeasureId.FS, MeasureId.FA, MeasureId.FM, MeasureId.GACC, MeasureId.BACC, MeasureId.MI,
                MeasureId.PEV]
        for mid in unit:
            if v[mid].defined:
                assert -1e-12 <= v[mid].value <= 1 + 1e-12, mid
        for mid in (MeasureId.MCC, MeasureId.K, MeasureId.J, MeasureId.MAR, MeasureId.WRACC):
            if v[mid].defined:
                assert -1 - 1e-12 <= v[mid].value <= 1 + 1e-12, mid
        for mid in (MeasureId.PLR, MeasureId.NLR, MeasureId.DOR, MeasureId.T1):
            if v[mid].defined:
                assert v[mid].value >= 0

    @settings(max_examples=200)
    @given(matrices(), st.integers(0, 500))
    def test_f_family_ignores_a(self, m, new_a):
        m2 = ConfusionMatrix(new_a, m.b, m.c, m.d) if new_a + m.b + m.c + m.d else m
        for mid in (MeasureId.F1, MeasureId.FSTAR, MeasureId.FBETA, MeasureId.PR, MeasureId.SE, MeasureId.FM):
            assert evaluate(mid, m) == evaluate(mid, m2)

    @given(matrices(lo=1), st.integers(1, 20))
    def test_dor_independent_of_class_size(self, m, lam):
        scaled = ConfusionMatrix(m.a, lam * m.b, m.c, lam * m.d)
        assert val(MeasureId.DOR, scaled) == pytest.approx(val(MeasureId.DOR, m), rel=1e-12)

    @given(matrices())
    def test_wer_half_is_half_error(self, m):
        assert M.wer(m, 0.5).value == pytest.approx(M.er(m).value / 2, abs=1e-15)

    @given(matrices(), st.floats(0.1, 100))
    def test_t1_linear_in_theta(self, m, theta):
        assert M.t1(m, 2 * theta, 3.0).value == pytest.approx(2 * M.t1(m, theta, 3.0).value, rel=1e-12)

    @given(matrices())
    def test_fbeta_half_is_f1(self, m):
        fb, f1 = M.fbeta(m, 0.5), M.f1(m)
        if fb.defined and f1.defined:
            assert fb.value == pytest.approx(f1.value, rel=1e-12)


class TestOracles:
    MATS = random_matrices(200, 1000, seed=424242)

    def test_mcc_is_pearson_correlation(self):
        for m in self.MATS:
            v = M.mcc(m)
            if not v.defined:
                continue
            true, pred = expand_labels(m)
            r = np.corrcoef(true, pred)[0, 1]
            assert v.value == pytest.approx(r, abs=1e-10)

    def test_error_rate_is_normalized_hamming(self):
        for m in self.MATS:
            true, pred = expand_labels(m)
            assert M.er(m).value == sum(t != p for t, p in zip(true, pred)) / m.n

    def test_mi_is_entropy_difference(self):
        for m in self.MATS:
            joint = np.array(m.as_tuple(), dtype=float) / m.n
            h_t = entropy([joint[0] + joint[2], joint[1] + joint[3]], base=2)
            h_p = entropy([joint[0] + joint[1], joint[2] + joint[3]], base=2)
            h_tp = entropy(joint, base=2)
            assert M.mutual_information(m).value == pytest.approx(h_t + h_p - h_tp, abs=1e-10)


class TestBatch:
    @pytest.mark.parametrize("mid", list(MeasureId))
    def test_batch_matches_scalar(self, mid):
        params = CostParams(k=0.35, alpha=0.2, theta=1.5, k_fraud=4.0)
        a, b, c, d = _simplex_arrays(12)
        vals, ok = evaluate_batch(mid, a, b, c, d, params)
        for i in range(len(a)):
            m = ConfusionMatrix(int(a[i]), int(b[i]), int(c[i]), int(d[i]))
            v = evaluate(mid, m, params)
            assert v.defined == bool(ok[i]), m
            if v.defined:
                assert vals[i] == pytest.approx(v.value, rel=1e-12, abs=1e-12), m
