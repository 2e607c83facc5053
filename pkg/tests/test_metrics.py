import numpy as np
import pytest

from dpconsensus.metrics import (
    MismatchedGrids,
    RunRecord,
    RunRecorder,
    aggregate,
    diagnose_summability,
    record_round,
)


def record_from(consensus, weakening=1.0, drift=1.0):
    """Build a RunRecord whose consensus errors are the given values."""
    rec = RunRecorder()
    for k, value in enumerate(consensus, start=1):
        # two agents at +-value/2 around zero produce the requested spread
        x = np.array([[value / 2.0], [-value / 2.0]])
        rec.observe(k, x, np.zeros(1), weakening, drift)
    return rec.finalize()


class TestRecordRound:
    def test_converged_point_has_zero_errors(self):
        rec = RunRecorder()
        rec.observe(1, np.full((3, 1), 2.0), np.array([2.0]), 1.0, 1.0)
        out = rec.finalize()
        assert out.consensus_error[0] == 0.0
        assert out.tracking_error[0] == 0.0
        assert out.mean_gap[0] == 0.0

    def test_two_agent_arithmetic(self):
        # states 0 and 2 against average reference 1
        rec = RunRecorder()
        rec.observe(1, np.array([[0.0], [2.0]]), np.array([1.0]), 1.0, 1.0)
        out = rec.finalize()
        assert out.consensus_error[0] == pytest.approx(2.0)
        assert out.tracking_error[0] == pytest.approx(2.0)
        assert out.mean_gap[0] == pytest.approx(0.0)

    def test_diagnostic_sums_increment_as_defined(self):
        rec = RunRecorder()
        x1 = np.array([[0.0], [2.0]])
        x2 = np.array([[1.0], [2.0]])
        rec.observe(1, x1, np.zeros(1), 0.5, 0.25)
        rec.observe(2, x2, np.zeros(1), 0.1, 0.3)
        out = rec.finalize()
        # round 1: spread 2, squared spread 2 (two deviations of 1)
        assert out.s1[0] == pytest.approx(0.5 * 2.0)
        assert out.s2[0] == pytest.approx(0.25 * 2.0)
        # round 2: spread 1, squared spread 0.5
        assert out.s1[1] == pytest.approx(0.5 * 2.0 + 0.1 * 0.5)
        assert out.s2[1] == pytest.approx(0.25 * 2.0 + 0.3 * 1.0)

    def test_record_round_standalone(self):
        from dpconsensus.engine import init_state, step_robust
        from dpconsensus.noise import ZeroChannel
        from dpconsensus.schedules import PowerLaw, PowerLawDenom
        from dpconsensus.signals import ConstantSignal
        from dpconsensus.topology import build_topology

        topo = build_topology(2, [(1, 2, 0.4)])
        sig = ConstantSignal(values=[[0.0], [2.0]])
        weakening, drift = PowerLawDenom(c=2, p=0.9), PowerLaw(c=1, p=1)
        state, _ = step_robust(init_state(sig), topo, 0.0, 1.0, [ZeroChannel()] * 2)
        row = record_round(state, sig, weakening, drift)
        assert row.k == 1
        assert row.consensus_error == pytest.approx(0.4)  # states 0.8 and 1.2
        assert row.mean_gap == pytest.approx(0.0, abs=1e-15)
        assert row.s1_increment == pytest.approx(weakening.eval(1) * 2 * 0.2**2)
        assert row.s2_increment == pytest.approx(drift.eval(1) * 0.4)

    def test_consensus_bounded_by_tracking_plus_gap(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m, d = rng.integers(2, 6), rng.integers(1, 4)
            x = rng.normal(size=(m, d))
            r_bar = rng.normal(size=d)
            rec = RunRecorder()
            rec.observe(1, x, r_bar, 1.0, 1.0)
            out = rec.finalize()
            assert out.consensus_error[0] <= out.tracking_error[0] + m * out.mean_gap[0] + 1e-12


class TestAggregate:
    def test_single_run_has_zero_variance(self):
        rec = record_from([3.0, 2.0, 1.0])
        ens = aggregate([rec])
        assert np.all(ens.stats["consensus_error"].var == 0.0)
        np.testing.assert_allclose(ens.stats["consensus_error"].mean, [3.0, 2.0, 1.0])

    def test_two_identical_runs(self):
        recs = [record_from([3.0, 2.0]), record_from([3.0, 2.0])]
        ens = aggregate(recs)
        assert np.all(ens.stats["consensus_error"].var == 0.0)
        np.testing.assert_allclose(ens.stats["consensus_error"].mean, [3.0, 2.0])

    def test_permutation_invariance(self):
        recs = [record_from([float(i + j) for j in range(4)]) for i in range(6)]
        a = aggregate(recs)
        b = aggregate(list(reversed(recs)))
        for name in ("consensus_error", "tracking_error", "mean_gap"):
            np.testing.assert_array_equal(a.stats[name].mean, b.stats[name].mean)
            np.testing.assert_array_equal(a.stats[name].var, b.stats[name].var)
            np.testing.assert_array_equal(a.stats[name].q05, b.stats[name].q05)

    def test_mean_within_envelope_and_quantiles_ordered(self):
        rng = np.random.default_rng(1)
        recs = [record_from(rng.uniform(0, 5, size=10)) for _ in range(30)]
        ens = aggregate(recs)
        st = ens.stats["consensus_error"]
        stacked = np.stack([r.consensus_error for r in recs])
        assert np.all(st.mean <= stacked.max(axis=0) + 1e-12)
        assert np.all(st.mean >= stacked.min(axis=0) - 1e-12)
        assert np.all(st.q05 <= st.q95)

    def test_mismatched_grids_rejected(self):
        with pytest.raises(MismatchedGrids):
            aggregate([record_from([1.0, 2.0]), record_from([1.0, 2.0, 3.0])])


class TestDiagnose:
    def test_rapidly_converging_sums_are_consistent(self):
        # geometric decay: the sums settle and the last doubling adds ~0
        rec = record_from([2.0 * 0.5**k for k in range(200)], weakening=0.5, drift=0.5)
        diag = diagnose_summability(rec)
        assert diag.verdict == "consistent with summability"
        assert diag.s1_ratio < 1.05 and diag.s2_ratio < 1.05

    def test_steady_errors_are_inconsistent(self):
        # constant spread with constant weights: sums grow linearly
        rec = record_from([2.0] * 200)
        diag = diagnose_summability(rec)
        assert diag.verdict == "inconsistent with summability"
        assert diag.s1_ratio == pytest.approx(2.0, abs=0.05)

    def test_insufficient_horizon(self):
        rec = record_from([1.0])
        assert diagnose_summability(rec).verdict == "insufficient horizon"

    def test_explicit_horizon(self):
        rec = record_from([2.0] * 100)
        diag = diagnose_summability(rec, horizon=50)
        assert diag.horizon == 50
        assert diag.s1_ratio == pytest.approx(2.0, abs=0.1)
