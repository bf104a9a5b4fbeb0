from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlsamplesize import DesignError
from mlsamplesize.metric_sizing import n_test_for_sensitivity, n_test_for_specificity
from mlsamplesize.rational import ceil_div, format_exact, to_fraction
from mlsamplesize.split_planner import (
    SplitForm,
    SplitSpec,
    apply_dropout,
    n_train_from_ratio,
    plan_split,
    ratio_from_fractions,
    total_from_ratio,
    total_from_test_fraction,
)

counts = st.integers(min_value=1, max_value=10**6)
open_unit_rationals = st.tuples(st.integers(min_value=1, max_value=10**6), st.integers(min_value=2, max_value=10**6)) \
    .map(lambda t: Fraction(t[0] % t[1] or 1, t[1]))
positive_rationals = st.tuples(st.integers(min_value=1, max_value=10**4), st.integers(min_value=1, max_value=10**4)) \
    .map(lambda t: Fraction(*t))
unit_rationals = st.tuples(st.integers(min_value=0, max_value=999), st.just(1000)).map(lambda t: Fraction(*t))


class TestRational:
    @pytest.mark.parametrize(
        "text, expected",
        [("3/4", Fraction(3, 4)), ("0.25", Fraction(1, 4)), ("25%", Fraction(1, 4)), (0.2, Fraction(1, 5)),
         (3, Fraction(3)), ("1e-3", Fraction(1, 1000)), (" 85 % ", Fraction(17, 20))],
    )
    def test_to_fraction(self, text, expected):
        assert to_fraction(text) == expected

    @pytest.mark.parametrize("bad", ["", "abc", "1/0", float("inf"), True, None])
    def test_to_fraction_rejects(self, bad):
        with pytest.raises((TypeError, ValueError)):
            to_fraction(bad)

    def test_ceil_div_is_exact(self):
        assert ceil_div(196, Fraction(1, 5)) == 980
        assert ceil_div(700, 3) == 234
        assert ceil_div(-7, 2) == -3

    @pytest.mark.parametrize("value, text", [(Fraction(1, 4), "0.25"), (Fraction(3), "3"), (Fraction(1, 3), "1/3"),
                                             (Fraction(1, 25), "0.04"), (Fraction(-3, 8), "-0.375")])
    def test_format_exact(self, value, text):
        assert format_exact(value) == text
        assert to_fraction(text) == value


class TestRatioFromFractions:
    @pytest.mark.parametrize(
        "train, test, expected",
        [(Fraction(3, 4), Fraction(1, 4), 3), (Fraction(1, 2), Fraction(1, 2), 1), (Fraction(2, 3), Fraction(1, 3), 2)],
    )
    def test_values(self, train, test, expected):
        assert ratio_from_fractions(train, test) == expected

    def test_decimal_inputs(self):
        assert ratio_from_fractions("0.75", "0.25") == 3

    def test_rejects_sum_other_than_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            ratio_from_fractions("0.7", "0.25")

    def test_rejects_zero_test_fraction(self):
        with pytest.raises(ValueError):
            ratio_from_fractions(1, 0)


class TestTrainAndTotal:
    def test_worked_example(self):
        assert n_train_from_ratio(980, 3) == 2940
        assert total_from_ratio(980, 3) == 3920
        assert total_from_test_fraction(980, Fraction(1, 4)) == 3920
        assert total_from_test_fraction(980, 0.25) == 3920

    @pytest.mark.parametrize("n", [1, 7, 980, 123456])
    def test_identity_ratio(self, n):
        assert n_train_from_ratio(n, 1) == n
        assert total_from_ratio(n, 1) == 2 * n
        assert total_from_test_fraction(n, Fraction(1, 2)) == 2 * n

    def test_non_integer_product_is_ceilinged(self):
        assert n_train_from_ratio(100, Fraction(7, 3)) == 234
        assert total_from_ratio(100, Fraction(7, 3)) == 334
        assert total_from_test_fraction(100, Fraction(3, 10)) == 334

    def test_one_third_does_not_drift(self):
        # 3 * (1/3 as a float) exceeds 1 after rounding; exact arithmetic keeps it at 1
        assert total_from_test_fraction(3, Fraction(1, 3)) == 9
        assert n_train_from_ratio(3, Fraction(2)) == 6

    @pytest.mark.parametrize("p", [0, 1, Fraction(3, 2), -0.1])
    def test_rejects_test_fraction_outside_open_unit(self, p):
        with pytest.raises(ValueError):
            total_from_test_fraction(10, p)

    @pytest.mark.parametrize("n, r", [(0, 3), (-5, 3), (10, 0), (10, -1)])
    def test_rejects_nonpositive(self, n, r):
        with pytest.raises(ValueError):
            n_train_from_ratio(n, r)


class TestDropout:
    def test_values(self):
        assert apply_dropout(3920, 0) == 3920
        assert apply_dropout(3920, 0.10) == 4356
        assert apply_dropout(1, 0.5) == 2

    @pytest.mark.parametrize("rate", [1, 1.5, -0.1])
    def test_rejects_bad_rates(self, rate):
        with pytest.raises(ValueError):
            apply_dropout(100, rate)

    @pytest.mark.invariant
    @given(counts)
    def test_zero_dropout_is_identity(self, n):
        assert apply_dropout(n, 0) == n

    @pytest.mark.invariant
    @given(counts, counts, unit_rationals, unit_rationals)
    def test_nondecreasing_in_both_arguments(self, n1, n2, r1, r2):
        (n_lo, n_hi), (r_lo, r_hi) = sorted((n1, n2)), sorted((r1, r2))
        assert apply_dropout(n_lo, r_lo) <= apply_dropout(n_hi, r_lo)
        assert apply_dropout(n_lo, r_lo) <= apply_dropout(n_lo, r_hi)


class TestSplitSpec:
    def test_forms_interconvert(self):
        ratio = SplitSpec.ratio(3)
        frac = SplitSpec.test_fraction("1/4")
        assert ratio.effective_p_test == Fraction(1, 4)
        assert frac.effective_r_tt == 3

    def test_parts(self):
        spec = SplitSpec.from_parts("75:25")
        assert spec.form is SplitForm.RATIO and spec.r_tt == 3
        assert SplitSpec.from_parts("2:1").r_tt == 2
        assert SplitSpec.from_parts("70:30").r_tt == Fraction(7, 3)

    @pytest.mark.parametrize("text", ["75", "75:0", "a:b", "-1:2"])
    def test_parts_rejects(self, text):
        with pytest.raises(DesignError):
            SplitSpec.from_parts(text)

    def test_rejects_degenerate(self):
        with pytest.raises(DesignError):
            SplitSpec.ratio(0)
        with pytest.raises(DesignError):
            SplitSpec.test_fraction(1)
        with pytest.raises(DesignError):
            SplitSpec.ratio(3, validation_fraction=1)


class TestPlanSplit:
    @pytest.fixture
    def metrics(self):
        return [n_test_for_sensitivity(0.85, 0.2, 0.05), n_test_for_specificity(0.75, 0.2, 0.05)]

    def test_worked_example(self, metrics):
        result = plan_split(980, SplitSpec.ratio(3), metrics, 0)
        assert (result.n_train, result.n_val, result.n_total, result.n_total_adjusted) == (2940, 0, 3920, 3920)
        assert result.per_metric == metrics

    def test_test_fraction_form_is_identical(self, metrics):
        a = plan_split(980, SplitSpec.ratio(3), metrics, 0)
        b = plan_split(980, SplitSpec.test_fraction(Fraction(1, 4)), metrics, 0)
        assert (a.n_test, a.n_train, a.n_val, a.n_total, a.n_total_adjusted) == \
            (b.n_test, b.n_train, b.n_val, b.n_total, b.n_total_adjusted)

    def test_validation_carve_out(self, metrics):
        result = plan_split(980, SplitSpec.ratio(3, validation_fraction=Fraction(1, 3)), metrics, 0)
        assert (result.n_val, result.n_train, result.n_total) == (980, 1960, 3920)

    def test_dropout_applies_to_total(self):
        result = plan_split(980, SplitSpec.ratio(3), dropout="10%")
        assert result.n_total_adjusted == 4356

    def test_audit_records_every_step(self):
        result = plan_split(980, SplitSpec.test_fraction("0.25", "0.2"), dropout=0.1)
        assert [s.step for s in result.audit] == ["n_train", "n_total", "n_val", "n_total_adjusted"]
        assert result.audit[1].inputs["p_test"] == "0.25"

    @pytest.mark.invariant
    @given(counts, positive_rationals, unit_rationals, unit_rationals)
    def test_conservation(self, n_test, r_tt, validation, dropout):
        result = plan_split(n_test, SplitSpec.ratio(r_tt, validation), dropout=dropout)
        assert result.n_total == result.n_test + result.n_train + result.n_val
        assert result.n_total_adjusted >= result.n_total
        assert min(result.n_train, result.n_val) >= 0 and result.n_test >= 1

    @pytest.mark.invariant
    @given(counts, positive_rationals, unit_rationals)
    def test_carve_out_never_changes_total(self, n_test, r_tt, validation):
        base = plan_split(n_test, SplitSpec.ratio(r_tt))
        carved = plan_split(n_test, SplitSpec.ratio(r_tt, validation))
        assert carved.n_total == base.n_total
        assert carved.n_train + carved.n_val == base.n_train

    @pytest.mark.invariant
    @given(counts, positive_rationals, positive_rationals)
    def test_total_nondecreasing_in_ratio(self, n_test, r1, r2):
        lo, hi = sorted((r1, r2))
        assert total_from_ratio(n_test, lo) <= total_from_ratio(n_test, hi)

    @pytest.mark.invariant
    @given(counts, open_unit_rationals, open_unit_rationals)
    def test_total_nonincreasing_in_test_fraction(self, n_test, p1, p2):
        lo, hi = sorted((p1, p2))
        assert total_from_test_fraction(n_test, hi) <= total_from_test_fraction(n_test, lo)


@pytest.mark.invariant
@given(counts, open_unit_rationals)
@settings(max_examples=1000)
def test_form_equivalence(n_test, p_test):
    assert total_from_test_fraction(n_test, p_test) == n_test + n_train_from_ratio(n_test, (1 - p_test) / p_test)
