"""Budget accounting: from drift certificate to calibrated noise.

The privacy cost of round k is bounded by twice the certified L1 drift
constant times the drift scale, divided by the Laplace scale; summing
those increments bounds the whole run's budget.  A growing noise scale
makes the infinite sum finite, and the accountant can invert the
relationship: pick a target budget and scale the noise shape to meet it.
"""

import numpy as np

from dpconsensus import (
    DampedSinusoidSignal,
    PowerLaw,
    PowerLawShifted,
    PrivacyLedger,
    calibrate_noise_scale,
    certify_drift,
    ratio_sum,
)

signal = DampedSinusoidSignal.random(5, 1, np.random.default_rng(12345))
stepsize = PowerLaw(c=0.01, p=1.0)
drift = PowerLaw(c=1.0, p=1.0)
noise = PowerLawShifted(c0=1.0, c1=0.1, p=0.2)

cert = certify_drift(signal, stepsize, drift, horizon=5000)
print(f"certified drift constant {cert.constant:.5f} (L1 form {cert.l1_constant:.5f})")

ledger = PrivacyLedger(drift, noise, cert.l1_constant).accumulate(5000)
print(f"budget bound over rounds 1..5000: {ledger.epsilon:.4f}")
print(f"tail bound beyond round 5000:     {ledger.tail_bound_after(5000):.4f}")
print(f"infinite-horizon bound:           {ledger.epsilon_total():.4f}")

print()
print("the classic 1/k drift scale against k**0.3 noise growth:")
reciprocal = PowerLaw(c=1.0, p=1.0, shift=0.0)
growth = PowerLawShifted(c0=0.0, c1=1.0, p=0.3)
est = ratio_sum(reciprocal, growth)
print(f"  ratio-sum constant = {est.partial:.5f} + tail {est.tail:.2g} = {est.value:.5f}")

for target in (0.1, 1.0, 10.0):
    nu = calibrate_noise_scale(target, reciprocal, growth, l1_constant=0.5)
    back = PrivacyLedger(reciprocal, nu, 0.5).epsilon_total()
    print(f"  target {target:5.2f} -> scale factor {nu.c1:8.4f} -> recovered budget {back:.6f}")
