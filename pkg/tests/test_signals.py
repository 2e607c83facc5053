import numpy as np
import pytest

from dpconsensus.schedules import PastTableEnd, PowerLaw, Table
from dpconsensus.signals import (
    ConstantSignal,
    DampedSinusoidSignal,
    TableSignal,
    ZeroDriftScale,
    certify_drift,
    drift_norms,
)


class TestSampling:
    def test_constant(self):
        sig = ConstantSignal(values=[[3.0]])
        for k in (0, 1, 17, 10_000):
            assert sig.sample(0, k) == pytest.approx(3.0)

    def test_damped_sinusoid_reference_value(self):
        # offset 5, amplitude 10 at round 20: 5 + (10/200) sin(1.0)
        sig = DampedSinusoidSignal(offsets=[[5.0]], amplitudes=[[10.0]])
        assert sig.sample(0, 20)[0] == pytest.approx(5.0 + 0.05 * np.sin(1.0))
        assert sig.sample(0, 20)[0] == pytest.approx(5.04207, abs=1e-5)

    def test_damped_sinusoid_round_zero_limit(self):
        sig = DampedSinusoidSignal(offsets=[[5.0]], amplitudes=[[10.0]])
        assert sig.sample(0, 0)[0] == pytest.approx(5.0 + 0.005 * 10.0)

    def test_damped_sinusoid_settles_to_offset(self):
        sig = DampedSinusoidSignal(offsets=[[5.0]], amplitudes=[[10.0]])
        ks = np.arange(1, 200_000, 97)
        envelopes = np.abs(sig.sample_rounds(ks)[:, 0, 0] - 5.0)
        bound = 10.0 / (10.0 * ks)
        assert np.all(envelopes <= bound + 1e-15)
        assert abs(sig.sample(0, 10**7)[0] - 5.0) < 1e-7

    def test_random_draws_are_seed_deterministic(self):
        a = DampedSinusoidSignal.random(5, 1, np.random.default_rng(7))
        b = DampedSinusoidSignal.random(5, 1, np.random.default_rng(7))
        np.testing.assert_array_equal(a.offsets, b.offsets)
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
        assert np.all((a.offsets > 0) & (a.offsets < 10))

    def test_table_signal(self):
        values = np.arange(12.0).reshape(3, 2, 2)
        hold = TableSignal(values=values, tail="hold")
        np.testing.assert_array_equal(hold.sample_all(7), values[2])
        err = TableSignal(values=values, tail="error")
        with pytest.raises(PastTableEnd):
            err.sample_all(3)

    def test_average(self):
        sig = ConstantSignal(values=[[1.0], [3.0]])
        assert sig.average(5)[0] == pytest.approx(2.0)

    def test_sample_rounds_matches_sample_all(self):
        sig = DampedSinusoidSignal.random(3, 2, np.random.default_rng(3))
        ks = np.array([0, 1, 5, 40])
        block = sig.sample_rounds(ks)
        for idx, k in enumerate(ks):
            np.testing.assert_allclose(block[idx], sig.sample_all(int(k)))


class TestCertifyDrift:
    def test_constant_signal_exact_constant(self):
        # drift = alpha_k * ||a||, and alpha_k = 0.01/(1+k) = 0.01 * scale_k
        # against scale 1/(1+k), so the certified constant is 0.03
        sig = ConstantSignal(values=[[3.0]])
        cert = certify_drift(sig, PowerLaw(c=0.01, p=1), PowerLaw(c=1, p=1), horizon=500)
        assert cert.constant == pytest.approx(0.03, abs=1e-12)
        assert cert.l1_constant == pytest.approx(0.03, abs=1e-12)
        assert cert.dimension == 1

    def test_zero_signal_zero_constant(self):
        sig = ConstantSignal(values=[[0.0], [0.0]])
        cert = certify_drift(sig, PowerLaw(c=0.01, p=1), PowerLaw(c=1, p=1), horizon=100)
        assert cert.constant == 0.0

    def test_l1_constant_scales_with_dimension(self):
        sig = ConstantSignal(values=[[2.0, 1.0, 2.0]])
        cert = certify_drift(sig, PowerLaw(c=0.01, p=1), PowerLaw(c=1, p=1), horizon=50)
        assert cert.l1_constant == pytest.approx(np.sqrt(3.0) * cert.constant)

    def test_reference_ensemble_certificate_holds_at_random_rounds(self):
        rng = np.random.default_rng(11)
        sig = DampedSinusoidSignal.random(5, 1, rng)
        stepsize = PowerLaw(c=0.01, p=1)
        scale = PowerLaw(c=1, p=1)
        cert = certify_drift(sig, stepsize, scale, horizon=100_000)
        assert np.isfinite(cert.constant) and cert.constant > 0
        ks = rng.integers(0, 100_000, size=1000)
        norms = drift_norms(sig, stepsize, ks)
        bound = cert.constant * scale.eval_array(ks)
        assert np.all(norms.max(axis=1) <= bound * (1 + 1e-12))

    def test_constant_bound_is_tight(self):
        sig = ConstantSignal(values=[[3.0]])
        stepsize = PowerLaw(c=0.01, p=1)
        scale = PowerLaw(c=1, p=1)
        cert = certify_drift(sig, stepsize, scale, horizon=200)
        ks = np.arange(201)
        ratios = drift_norms(sig, stepsize, ks)[:, 0] / (scale.eval_array(ks) * cert.constant)
        assert ratios.max() == pytest.approx(1.0, abs=1e-12)

    def test_zero_scale_with_moving_signal_rejected(self):
        sig = ConstantSignal(values=[[3.0]])
        with pytest.raises(ZeroDriftScale):
            certify_drift(sig, PowerLaw(c=0.01, p=1), Table(values=(1.0, 0.0, 1.0)), horizon=10)

    def test_zero_scale_with_frozen_signal_is_fine(self):
        # a signal that never moves has zero drift, so a vanishing scale is ok
        sig = ConstantSignal(values=[[2.0]])
        zero_alpha_drift = Table(values=(0.0,))  # scale 0 everywhere
        table_stepsize = Table(values=(0.0,))  # stepsize 0: drift is exactly 0
        cert = certify_drift(sig, table_stepsize, zero_alpha_drift, horizon=10)
        assert cert.constant == 0.0
