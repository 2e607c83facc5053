import math

import numpy as np
import pytest

from dpconsensus.accountant import (
    DivergentShapeRatio,
    IncompatibleNoiseGrowth,
    PrivacyLedger,
    calibrate_noise_scale,
    ratio_sum,
    sensitivity_bound,
    tail_bound,
)
from dpconsensus.schedules import Geometric, PowerLaw, PowerLawDenom, PowerLawShifted

RECIPROCAL = PowerLaw(c=1.0, p=1.0, shift=0.0)  # 1/k, defined from round 1
GROWTH_03 = PowerLawShifted(c0=0.0, c1=1.0, p=0.3)  # k**0.3


class TestSensitivityBound:
    def test_reference_value(self):
        assert sensitivity_bound(0, PowerLaw(c=1, p=1), 0.03) == pytest.approx(0.06)

    def test_zero_drift(self):
        for k in (0, 1, 100):
            assert sensitivity_bound(k, PowerLaw(c=1, p=1), 0.0) == 0.0

    def test_decays_with_scale(self):
        assert sensitivity_bound(9, PowerLaw(c=1, p=1), 0.5) == pytest.approx(0.1)


class TestRatioSum:
    def test_known_series_value(self):
        # sum of k**-1.3 is about 3.93; a modest cutoff already nails it
        est = ratio_sum(RECIPROCAL, GROWTH_03, cutoff=1_000_000)
        assert est.value == pytest.approx(3.93, abs=0.01)
        assert est.tail < 0.06

    def test_divergent_power_ratio_rejected(self):
        with pytest.raises(DivergentShapeRatio):
            ratio_sum(RECIPROCAL, RECIPROCAL)  # ratio identically 1

    def test_undecidable_ratio_rejected(self):
        from dpconsensus.schedules import Table

        with pytest.raises(DivergentShapeRatio):
            ratio_sum(Table(values=(1.0,)), GROWTH_03)

    def test_geometric_pair(self):
        # sum (0.5/0.8)**k from 1 = (5/8) / (1 - 5/8) = 5/3
        est = ratio_sum(Geometric(c=1, q=0.5), Geometric(c=1, q=0.8))
        assert est.value == pytest.approx(5.0 / 3.0, rel=1e-9)

    def test_geometric_equal_ratios_rejected(self):
        with pytest.raises(DivergentShapeRatio):
            ratio_sum(Geometric(c=1, q=0.9), Geometric(c=1, q=0.9))


class TestTailBound:
    def test_tail_is_a_bound(self):
        # the bound at K must dominate the directly summed window beyond K
        after = 1000
        t = tail_bound(RECIPROCAL, GROWTH_03, after)
        ks = np.arange(after + 1, 4_000_000)
        window = float(np.sum(RECIPROCAL.eval_array(ks) / GROWTH_03.eval_array(ks)))
        assert window < t
        assert t < 2.0 * window  # and it is not wildly loose

    def test_divergent_tail_is_inf(self):
        assert math.isinf(tail_bound(RECIPROCAL, RECIPROCAL, 10))

    def test_unknown_tail_is_none(self):
        from dpconsensus.schedules import Table

        assert tail_bound(Table(values=(1.0,)), GROWTH_03, 10) is None


class TestLedger:
    def make(self, l1=0.5):
        return PrivacyLedger(RECIPROCAL, GROWTH_03, l1)

    def test_empty_ledger(self):
        assert self.make().accumulate(0).epsilon == 0.0

    def test_reference_increments(self):
        # increments 2 * 0.5 / k**1.3
        ledger = self.make().accumulate(5)
        np.testing.assert_allclose(ledger.increment, np.arange(1, 6) ** -1.3)
        assert ledger.epsilon_at(3) == pytest.approx(1 + 2**-1.3 + 3**-1.3)

    def test_infinite_budget_matches_series_constant(self):
        ledger = self.make()
        assert ledger.epsilon_total(cutoff=1_000_000) == pytest.approx(3.93, abs=0.01)

    def test_monotone_and_nonnegative(self):
        ledger = self.make().accumulate(2000)
        assert np.all(ledger.increment >= 0)
        assert np.all(np.diff(ledger.cumulative) >= 0)

    def test_tail_column(self):
        ledger = self.make().accumulate(100)
        t = ledger.tail_bound_after(100)
        assert np.isfinite(t)
        # adding the tail bound to the partial never undershoots the total
        assert ledger.epsilon + t >= ledger.epsilon_total(cutoff=1_000_000) - 1e-6

    def test_divergent_ratio_reports_unbounded_tail(self):
        ledger = PrivacyLedger(RECIPROCAL, RECIPROCAL, 0.5).accumulate(50)
        assert math.isinf(ledger.tail_bound_after(50))
        assert ledger.epsilon > 0  # finite prefix still reported


class TestCalibration:
    def test_round_trip_reference_case(self):
        # unit drift constant, target 1: the scale is 2 * 3.93..., and the
        # scaled schedule's total budget lands back on the target
        nu = calibrate_noise_scale(1.0, RECIPROCAL, GROWTH_03, 1.0, cutoff=1_000_000)
        assert nu.eval(1) == pytest.approx(2 * 3.9319, abs=0.01)
        total = PrivacyLedger(RECIPROCAL, nu, 1.0).epsilon_total(cutoff=1_000_000)
        assert total == pytest.approx(1.0, rel=5e-3)

    def test_budget_inversely_proportional_to_scale(self):
        nu1 = calibrate_noise_scale(1.0, RECIPROCAL, GROWTH_03, 1.0, cutoff=100_000)
        nu2 = calibrate_noise_scale(2.0, RECIPROCAL, GROWTH_03, 1.0, cutoff=100_000)
        ks = np.arange(1, 50)
        np.testing.assert_allclose(nu1.eval_array(ks), 2.0 * nu2.eval_array(ks))
        t1 = PrivacyLedger(RECIPROCAL, nu1, 1.0).accumulate(1000).epsilon
        t2 = PrivacyLedger(RECIPROCAL, nu2, 1.0).accumulate(1000).epsilon
        assert t2 == pytest.approx(2.0 * t1)

    def test_divergent_shape_rejected(self):
        with pytest.raises(DivergentShapeRatio):
            calibrate_noise_scale(1.0, RECIPROCAL, RECIPROCAL, 1.0)

    def test_weakening_compatibility_gate(self):
        # noise growing like k**0.3 against weakening k**-0.9 passes,
        # against k**-0.5 it must fail loudly
        calibrate_noise_scale(
            1.0, RECIPROCAL, GROWTH_03, 1.0, weakening=PowerLawDenom(c=2, p=0.9), cutoff=100_000
        )
        with pytest.raises(IncompatibleNoiseGrowth):
            calibrate_noise_scale(
                1.0, RECIPROCAL, GROWTH_03, 1.0, weakening=PowerLawDenom(c=2, p=0.5), cutoff=100_000
            )

    def test_bad_target_rejected(self):
        with pytest.raises(ValueError):
            calibrate_noise_scale(0.0, RECIPROCAL, GROWTH_03, 1.0)
