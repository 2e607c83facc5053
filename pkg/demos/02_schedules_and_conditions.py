"""Schedule families and the summability conditions that gate a run.

Exact tracking under persistent noise needs four sequences to cooperate:
a non-summable but square-summable stepsize, a non-summable but
square-summable coupling weakening, a drift scale whose square over the
weakening is summable, and a noise scale whose growth the weakening can
absorb.  All verdicts below are analytic (p-series / geometric tests),
so they hold for the infinite sum, not just a finite prefix.
"""

from dpconsensus import (
    PowerLaw,
    PowerLawDenom,
    PowerLawShifted,
    laplace_std,
    validate_noise_compatibility,
    validate_tracking_conditions,
)

stepsize = PowerLaw(c=0.01, p=1.0)           # 0.01/(1+k)
weakening = PowerLawDenom(c=2.0, p=0.9)      # 2/(1+k**0.9)
drift = PowerLaw(c=1.0, p=1.0)               # 1/(1+k)
noise = PowerLawShifted(c0=1.0, c1=0.1, p=0.2)  # 1 + 0.1*k**0.2, grows!

print("values of each family over the first rounds:")
for k in (0, 1, 10, 100, 10_000):
    print(f"  k={k:6d}  stepsize {stepsize.eval(k):.6f}  weakening {weakening.eval(k):.4f}"
          f"  drift {drift.eval(k):.6f}  noise scale {noise.eval(k):.4f}")

print()
print("reference combination:")
for cond in validate_tracking_conditions(stepsize, weakening, drift).conditions:
    print(f"  {cond.status.upper():7s} {cond.name} ({cond.detail})")
for cond in validate_noise_compatibility(weakening, laplace_std(noise)).conditions:
    print(f"  {cond.status.upper():7s} {cond.name} ({cond.detail})")

print()
print("a weakening that decays too slowly cannot absorb growing noise:")
weak = PowerLawDenom(c=2.0, p=0.4)
report = validate_noise_compatibility(weak, laplace_std(PowerLawShifted(c0=0, c1=1, p=0.3)))
for cond in report.conditions:
    print(f"  {cond.status.upper():7s} {cond.name} ({cond.detail})")

print()
print("a constant drift scale breaks the drift-ratio condition:")
report = validate_tracking_conditions(stepsize, weakening, PowerLaw(c=1.0, p=0.0))
cond = report["drift_ratio_summable"]
print(f"  {cond.status.upper():7s} {cond.name} ({cond.detail})")
