import math

import pytest

from crispmetrics.core import ConfusionMatrix
from crispmetrics.measures import REGISTRY, TABLE1_MEASURES, CostParams, MeasureId, evaluate
from crispmetrics.properties import (
    EXPECTED_DISCREPANCIES,
    FORMULA_CONFLICTS,
    Property,
    PropertyCheckResult,
    ReportError,
    Verdict,
    baseline_grid,
    check_balanced,
    check_bounds,
    check_completeness,
    check_constant_baseline,
    check_monotonicity,
    check_symmetry,
    count_matrices,
    enumerate_fixed_n,
    enumerate_matrices,
    random_assignment_means,
    reconcile_table1,
    run_checks,
    unbounded_witnesses,
)


def worse(mid, new, old):
    """True if new is strictly worse than old for this measure."""
    if not (new.defined and old.defined):
        return False
    if REGISTRY[mid].larger_is_better:
        return new.value < old.value - 1e-12
    return new.value > old.value + 1e-12


class TestEnumeration:
    def test_counts(self):
        assert len(list(enumerate_matrices(1))) == 4
        assert len(list(enumerate_matrices(2))) == 14
        assert [count_matrices(n) for n in range(4)] == [1, 4, 10, 20]

    def test_fixed_n_is_complete_and_distinct(self):
        ms = list(enumerate_fixed_n(7))
        assert len(ms) == len(set(ms)) == count_matrices(7)
        assert all(m.n == 7 for m in ms)

    def test_rejects_empty_range(self):
        with pytest.raises(ValueError):
            list(enumerate_matrices(0))


class TestResultContract:
    def test_fails_needs_counterexample(self):
        with pytest.raises(ValueError):
            PropertyCheckResult(MeasureId.ACC, Property.SYMMETRY, Verdict.FAILS)
        with pytest.raises(ValueError):
            PropertyCheckResult(MeasureId.ACC, Property.SYMMETRY, Verdict.HOLDS, (1, 2))

    def test_to_dict(self):
        r = check_symmetry("se", 6)
        d = r.to_dict()
        assert d["verdict"] == "fails" and len(d["counterexample"]) == 2


class TestMonotonicity:
    @pytest.mark.parametrize("mid", ["acc", "er", "bacc", "f1"])
    def test_holds(self, mid):
        assert check_monotonicity(mid, 30).verdict is Verdict.HOLDS

    @pytest.mark.parametrize("mid", ["dor", "mi", "pev"])
    def test_counterexamples_reverify(self, mid):
        r = check_monotonicity(mid, 30)
        if r.verdict is Verdict.FAILS:
            old, new = r.counterexample
            assert new.n == old.n
            assert abs(new.a - old.a) + abs(new.b - old.b) + abs(new.c - old.c) + abs(new.d - old.d) == 2
            assert (new.a + new.d) == (old.a + old.d) + 1
            assert worse(resolve_id(mid), evaluate(mid, new), evaluate(mid, old))

    def test_mi_fails(self):
        # a perfect split becomes less informative when one error is fixed at the wrong extreme
        assert check_monotonicity("mi", 10).verdict is Verdict.FAILS


def resolve_id(name):
    from crispmetrics.measures import resolve
    return resolve(name)


class TestBounds:
    def test_mcc_attains_both_ends(self):
        above, below, unit = check_bounds("mcc", 30)
        assert above.verdict is below.verdict is Verdict.HOLDS
        assert unit.verdict is Verdict.FAILS
        assert evaluate("mcc", unit.counterexample[0]).value < 0
        assert evaluate("mcc", ConfusionMatrix(5, 0, 0, 5)).value == 1.0
        assert evaluate("mcc", ConfusionMatrix(0, 5, 5, 0)).value == -1.0

    def test_f1_unit_interval(self):
        assert all(r.verdict is Verdict.HOLDS for r in check_bounds("f1", 30))
        assert evaluate("f1", ConfusionMatrix(0, 1, 1, 0)).value == 0.0
        assert evaluate("f1", ConfusionMatrix(0, 0, 0, 1)).value == 1.0

    def test_dor_unbounded_above(self):
        above, below, unit = check_bounds("dor", 30)
        assert above.verdict is Verdict.FAILS and below.verdict is Verdict.HOLDS
        assert evaluate("dor", ConfusionMatrix(10, 1, 1, 10)).value == 100.0
        vals = [v.value for m, v in unbounded_witnesses("dor") if m.b == m.c == 1 and m.a == m.d]
        assert vals == sorted(vals) and vals[-1] == 10_000

    @pytest.mark.parametrize("mid", list(MeasureId))
    def test_unit_interval_implies_bounds(self, mid):
        above, below, unit = check_bounds(mid, 12, CostParams(k=0.3))
        if unit.verdict is Verdict.HOLDS:
            assert above.verdict is below.verdict is Verdict.HOLDS


class TestSymmetry:
    @pytest.mark.parametrize("mid", ["acc", "er", "kappa", "mi", "fs", "fa"])
    def test_claimed_symmetric(self, mid):
        assert check_symmetry(mid, 20).verdict is Verdict.HOLDS

    @pytest.mark.parametrize("mid", ["se", "f1", "pr"])
    def test_asymmetric(self, mid):
        r = check_symmetry(mid, 20)
        assert r.verdict is Verdict.FAILS
        m, swapped = r.counterexample
        assert swapped == m.swapped()
        assert evaluate(mid, m) != evaluate(mid, swapped)

    def test_se_swaps_into_sp(self, m_ref):
        assert evaluate("se", m_ref.swapped()) == evaluate("sp", m_ref)


class TestCompleteness:
    def test_f1_ignores_a(self):
        complete, ignores = check_completeness("f1")
        assert complete.verdict is Verdict.FAILS and ignores.verdict is Verdict.HOLDS
        assert ignores.insensitive_cells == ("a",)
        x, y = complete.counterexample[0]
        assert evaluate("f1", x) == evaluate("f1", y)

    def test_acc_complete(self):
        complete, ignores = check_completeness("acc")
        assert complete.verdict is Verdict.HOLDS and ignores.verdict is Verdict.FAILS
        assert complete.insensitive_cells == ()

    def test_se_ignores_a_and_c(self):
        _, ignores = check_completeness("se")
        assert ignores.insensitive_cells == ("a", "c")

    def test_deterministic(self):
        assert check_completeness("mcc", seed=3) == check_completeness("mcc", seed=3)


class TestConstantBaseline:
    def test_grid(self):
        assert baseline_grid(100) == [1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 99]

    @pytest.mark.parametrize("mid", ["mcc", "kappa"])
    def test_chance_corrected_hold(self, mid):
        r = check_constant_baseline(mid, 100, 20000, seed=0, pi1=0.3)
        assert r.verdict is Verdict.HOLDS

    def test_acc_fails_at_high_prevalence(self):
        r = check_constant_baseline("acc", 100, 20000, seed=0, pi1=0.9)
        assert r.verdict is Verdict.FAILS
        pts = {p.q: p.mean for p in random_assignment_means("acc", 100, 0.9, 20000, seed=0)}
        assert pts[99] - pts[50] > 0.3

    def test_acc_mean_matches_closed_form(self):
        # E[ACC] = (n0(n-q) + n1 q) / n^2 under random assignment
        n, n1 = 100, 30
        for p in random_assignment_means("acc", n, 0.3, 20000, seed=1):
            exact = ((n - n1) * (n - p.q) + n1 * p.q) / n ** 2
            assert abs(p.mean - exact) < 4 * p.std_error + 1e-12

    def test_reproducible(self):
        a = random_assignment_means("j", 50, 0.3, 1000, seed=9)
        assert a == random_assignment_means("j", 50, 0.3, 1000, seed=9)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            check_constant_baseline("acc", n=10)
        with pytest.raises(ValueError):
            check_constant_baseline("acc", trials=100)


class TestBalanced:
    def test_bacc_holds(self):
        assert check_balanced("bacc", 20).verdict is Verdict.HOLDS

    def test_acc_fails(self):
        r = check_balanced("acc", 20)
        assert r.verdict is Verdict.FAILS
        m, scaled = r.counterexample
        assert evaluate("acc", m) != evaluate("acc", scaled)

    def test_dor_holds_and_is_flagged(self):
        assert check_balanced("dor", 20).verdict is Verdict.HOLDS
        assert (MeasureId.DOR, "balanced") in EXPECTED_DISCREPANCIES


@pytest.fixture(scope="module")
def table1_results():
    return run_checks(TABLE1_MEASURES, [Property.COMPLETE, Property.IGNORES_CELLS, Property.SYMMETRY,
                                        Property.BALANCED], n_max=20)


class TestReconciliation:
    def test_no_unexpected_cells(self, table1_results):
        report = reconcile_table1(table1_results)
        assert report.unexpected == []
        assert report.complement_identity_holds is True

    def test_discrepancy_lists_are_exact(self, table1_results):
        report = reconcile_table1(table1_results)
        found = {(c.measure, c.column) for c in report.with_status("expected_discrepancy")}
        assert found == set(EXPECTED_DISCREPANCIES)
        conflicts = {(c.measure, c.column) for c in report.with_status("formula_conflict")}
        assert conflicts == set(FORMULA_CONFLICTS)

    def test_complete_column(self, table1_results):
        rows = reconcile_table1(table1_results).rows()
        claimed = {m for m, r in rows.items() if r["complete"].claimed}
        assert claimed == {MeasureId.ACC, MeasureId.BACC, MeasureId.GACC, MeasureId.ER, MeasureId.WER,
                           MeasureId.K, MeasureId.J, MeasureId.MAR, MeasureId.MCC, MeasureId.PLR,
                           MeasureId.NLR, MeasureId.DOR, MeasureId.FM, MeasureId.WRACC, MeasureId.MI}
        for m, r in rows.items():
            assert r["complete"].checked != r["ignores_cells"].checked

    def test_symmetry_checked_set(self, table1_results):
        rows = reconcile_table1(table1_results).rows()
        holds = {m for m, r in rows.items() if r["symmetry"].checked}
        assert {MeasureId.ACC, MeasureId.ER, MeasureId.K, MeasureId.FS, MeasureId.FA, MeasureId.MI} <= holds

    def test_conceptual_columns_not_checked(self, table1_results):
        report = reconcile_table1(table1_results)
        for c in report.cells:
            if c.column in ("costs", "meaning"):
                assert c.status == "not_checked" and c.checked is None

    def test_gap_raises(self, table1_results):
        partial = [r for r in table1_results if r.measure is not MeasureId.ACC]
        with pytest.raises(ReportError, match="acc"):
            reconcile_table1(partial)

    def test_restricted_report(self):
        results = run_checks(["f1"], [Property.COMPLETE, Property.IGNORES_CELLS])
        report = reconcile_table1(results, measures=["f1"])
        row = report.rows()[MeasureId.F1]
        assert row["complete"].checked is False and row["ignores_cells"].checked is True
        assert "symmetry" not in row


class TestRunChecks:
    def test_sorted_and_deterministic(self):
        a = run_checks(["acc", "se"], [Property.SYMMETRY, Property.MONOTONICITY], n_max=8)
        assert a == run_checks(["se", "acc"], [Property.MONOTONICITY, Property.SYMMETRY], n_max=8)
        assert [(r.measure, r.property) for r in a] == [
            (MeasureId.SE, Property.MONOTONICITY), (MeasureId.SE, Property.SYMMETRY),
            (MeasureId.ACC, Property.MONOTONICITY), (MeasureId.ACC, Property.SYMMETRY)]

    def test_every_counterexample_reverifies(self):
        results = run_checks(properties=[Property.MONOTONICITY, Property.SYMMETRY, Property.BALANCED],
                             n_max=12)
        for r in results:
            if r.verdict is not Verdict.FAILS:
                continue
            x, y = r.counterexample
            vx, vy = evaluate(r.measure, x), evaluate(r.measure, y)
            if r.property is Property.MONOTONICITY:
                assert worse(r.measure, vy, vx)
            else:
                assert vx != vy and not (vx.defined and vy.defined and math.isclose(vx.value, vy.value,
                                                                                     abs_tol=1e-12))
