"""Three algorithms, same noise budget: only one keeps tracking.

Runs a small Monte-Carlo ensemble of the robust update, the conventional
update (full coupling, no forgetting), and the geometric baseline
(geometrically weighted input with geometrically decaying noise, matched
to the same budget) through the experiment harness, then prints how far
each ensemble sits from the average signal over time.

Writes the CSV artifacts to ./comparison-out; point the frontend at them
to reproduce the figures:

    node frontend/dist/cli.js signals --in comparison-out/signals.csv --out signals.svg
    node frontend/dist/cli.js tracking_comparison \
        --in comparison-out/robust/ensemble.csv \
             comparison-out/conventional/ensemble.csv \
             comparison-out/geometric/ensemble.csv \
        --out comparison.svg
"""

import csv
from pathlib import Path

from dpconsensus import load_config, run_experiment

config = load_config(Path(__file__).resolve().parent.parent / "configs" / "quick.yaml")
out = Path("comparison-out")
manifest = run_experiment(config, out)
print(f"harness wrote {len(manifest['files'])} files to {out}/ "
      f"(config hash {manifest['config_hash'][:12]})")

print()
print("ensemble-mean distance to the average signal, sum over agents:")
print(f"{'round':>6s} {'robust':>10s} {'conventional':>13s} {'geometric':>10s}")
columns = {}
for name in ("robust", "conventional", "geometric"):
    with (out / name / "ensemble.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    columns[name] = {int(float(r["k"])): float(r["tracking_error_mean"]) for r in rows}
for k in (1, 50, 200, 400, 800):
    print(f"{k:6d} {columns['robust'][k]:10.4f} {columns['conventional'][k]:13.4f} "
          f"{columns['geometric'][k]:10.4f}")

print()
print("the conventional run drifts (noise accumulates in the average);")
print("the geometric run freezes at an offset once its input weight dies;")
print("the robust run keeps improving while staying inside a fixed budget.")
