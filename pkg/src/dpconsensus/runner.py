"""Monte-Carlo orchestration and artifact emission.

Runs ``R`` seeded trials of each selected algorithm over one resolved
configuration, writes one metrics CSV per run plus one ensemble CSV per
algorithm, the privacy ledger, a per-agent reference-signal CSV (for
one-dimensional signals), and a manifest listing every file with its
checksum.  Given the same configuration and master seed, every output
byte is reproducible except the manifest timestamp.

Runs may execute on parallel workers; per-run noise streams are derived
from the run index (not submission order), so results are identical
regardless of worker count, and growing ``runs`` leaves earlier runs'
outputs unchanged.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .accountant import PrivacyLedger
from .config import ExperimentConfig, config_hash
from .engine import AlgorithmKind, SimulationResult, simulate
from .metrics import ERROR_METRICS, EnsembleSummary, RunRecord, aggregate
from .noise import ZeroChannel, channel_for_run
from .validation import ResolvedExperiment, ValidationFailed, resolve_experiment

__all__ = ["ledger_csv", "run_experiment", "run_single", "write_ledger_csv"]

OUTPUT_DIR_ENV = "DPCONSENSUS_OUT"

_RUN_HEADER = ("k", "consensus_error", "tracking_error", "mean_gap", "s1", "s2")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: tuple[str, ...], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in range(rows):
            fh.write(",".join(_fmt(float(c[r])) for c in columns) + "\n")


def _channels(resolved: ResolvedExperiment, algorithm: str, run_index: int):
    if algorithm == "geometric":
        scale = resolved.geometric_noise
    else:
        scale = resolved.noise_scale
    m = resolved.topology.m
    seed = resolved.config.master_seed
    if scale is None:
        return [ZeroChannel() for _ in range(m)]
    return [channel_for_run(scale, seed, run_index, agent) for agent in range(m)]


def run_single(resolved: ResolvedExperiment, algorithm: str, run_index: int) -> SimulationResult:
    """Execute one seeded run of one algorithm."""
    cfg = resolved.config
    channels = _channels(resolved, algorithm, run_index)
    kwargs: dict = {"drift_scale": resolved.drift, "dump_every": cfg.dump_every}
    if algorithm == "robust":
        kind = AlgorithmKind.ROBUST
        kwargs.update(stepsize=resolved.stepsize, weakening=resolved.weakening)
    elif algorithm == "conventional":
        kind = AlgorithmKind.CONVENTIONAL
    elif algorithm == "geometric":
        kind = AlgorithmKind.GEOMETRIC
        kwargs.update(input_weight=resolved.geometric_input)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return simulate(resolved.topology, resolved.signal, channels, cfg.horizon, kind, **kwargs)


_WORKER_RESOLVED: ResolvedExperiment | None = None


def _init_worker(cfg_dict: dict) -> None:
    global _WORKER_RESOLVED
    _WORKER_RESOLVED = resolve_experiment(ExperimentConfig.from_dict(cfg_dict))


def _worker_run(task: tuple[str, int]) -> tuple[int, RunRecord, list | None]:
    algorithm, run_index = task
    result = run_single(_WORKER_RESOLVED, algorithm, run_index)
    return run_index, result.record, result.state_dump


def _all_runs(resolved: ResolvedExperiment, algorithm: str) -> list[tuple[RunRecord, list | None]]:
    cfg = resolved.config
    if cfg.workers > 1:
        tasks = [(algorithm, r) for r in range(cfg.runs)]
        with ProcessPoolExecutor(
            max_workers=cfg.workers, initializer=_init_worker, initargs=(cfg.to_dict(),)
        ) as pool:
            results = list(pool.map(_worker_run, tasks))
        results.sort(key=lambda t: t[0])  # deterministic merge by run index
        return [(rec, dump) for _, rec, dump in results]
    out = []
    for r in range(cfg.runs):
        result = run_single(resolved, algorithm, r)
        out.append((result.record, result.state_dump))
    return out


def _write_run_csv(path: Path, record: RunRecord) -> None:
    _write_csv(
        path,
        _RUN_HEADER,
        [record.k, record.consensus_error, record.tracking_error, record.mean_gap, record.s1, record.s2],
    )


def _write_ensemble_csv(path: Path, summary: EnsembleSummary) -> None:
    header = ["k"]
    columns: list[np.ndarray] = [summary.k]
    for name in ERROR_METRICS:
        st = summary.stats[name]
        header += [f"{name}_mean", f"{name}_var", f"{name}_q05", f"{name}_q95"]
        columns += [st.mean, st.var, st.q05, st.q95]
    _write_csv(path, tuple(header), columns)


def _write_states_csv(path: Path, dump: list[tuple[int, np.ndarray]]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("k,agent,coordinate,value\n")
        for k, x in dump:
            m, d = x.shape
            for i in range(m):
                for c in range(d):
                    fh.write(f"{k},{i + 1},{c + 1},{_fmt(float(x[i, c]))}\n")


def _write_signals_csv(path: Path, resolved: ResolvedExperiment) -> None:
    ks = np.arange(resolved.config.horizon + 1)
    values = resolved.signal.sample_rounds(ks)[:, :, 0]
    header = ["k"] + [f"agent_{i + 1}" for i in range(resolved.topology.m)] + ["average"]
    columns = [ks.astype(float)] + [values[:, i] for i in range(resolved.topology.m)]
    columns.append(values.mean(axis=1))
    _write_csv(path, tuple(header), columns)


def ledger_csv(ledger: PrivacyLedger) -> str:
    """Ledger rows: round, sensitivity, noise scale, increment, total, tail."""
    lines = ["k,sensitivity,noise_scale,increment,epsilon_cum,tail_bound"]
    for i, k in enumerate(ledger.k):
        tail = ledger.tail_bound_after(int(k))
        tail_str = "unknown" if tail is None else ("unbounded" if math.isinf(tail) else _fmt(tail))
        lines.append(
            f"{k},{_fmt(ledger.sensitivity[i])},{_fmt(ledger.noise[i])},"
            f"{_fmt(ledger.increment[i])},{_fmt(ledger.cumulative[i])},{tail_str}"
        )
    return "\n".join(lines) + "\n"


def write_ledger_csv(path: Path, ledger: PrivacyLedger) -> None:
    path.write_text(ledger_csv(ledger), encoding="utf-8")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def resolve_output_dir(cfg: ExperimentConfig, out_dir: str | Path | None) -> Path:
    if out_dir is not None:
        return Path(out_dir)
    if cfg.output_dir is not None:
        return Path(cfg.output_dir)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env)
    return Path("dpconsensus-out")


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path | None = None,
    override_assumptions: bool = False,
) -> dict:
    """Validate, run every (algorithm, run) pair, and write all artifacts.

    Returns the manifest (also written as ``manifest.json``).  Raises
    :class:`ValidationFailed` when a condition fails or is undecidable and
    ``override_assumptions`` is not set.
    """
    resolved = resolve_experiment(cfg)
    if not resolved.report.all_pass and not override_assumptions:
        lines = "; ".join(f"{r.name}: {r.status}" for r in resolved.report.failures())
        raise ValidationFailed(f"validation did not pass ({lines}); rerun with override to proceed")

    out = resolve_output_dir(cfg, out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []

    config_path = out / "config.json"
    config_path.write_text(
        json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    files.append(config_path)

    for algorithm in cfg.algorithms:
        algo_dir = out / algorithm
        algo_dir.mkdir(parents=True, exist_ok=True)
        results = _all_runs(resolved, algorithm)
        records = [rec for rec, _ in results]
        for r, (record, dump) in enumerate(results):
            run_path = algo_dir / f"run_{r:04d}.csv"
            _write_run_csv(run_path, record)
            files.append(run_path)
            if dump:
                states_path = algo_dir / f"run_{r:04d}_states.csv"
                _write_states_csv(states_path, dump)
                files.append(states_path)
        ensemble_path = algo_dir / "ensemble.csv"
        _write_ensemble_csv(ensemble_path, aggregate(records))
        files.append(ensemble_path)

    if resolved.noise_scale is not None and resolved.certificate is not None:
        ledger = PrivacyLedger(
            resolved.drift, resolved.noise_scale, resolved.certificate.l1_constant
        ).accumulate(cfg.horizon)
        ledger_path = out / "ledger.csv"
        write_ledger_csv(ledger_path, ledger)
        files.append(ledger_path)

    if resolved.signal.d == 1:
        signals_path = out / "signals.csv"
        _write_signals_csv(signals_path, resolved)
        files.append(signals_path)

    manifest = {
        "config_hash": config_hash(cfg),
        "master_seed": cfg.master_seed,
        "algorithms": list(cfg.algorithms),
        "runs": cfg.runs,
        "horizon": cfg.horizon,
        "guarantees_void": not resolved.report.all_pass,
        "validation": [
            {"name": r.name, "status": r.status, "detail": r.detail} for r in resolved.report.rows
        ],
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "files": [
            {"path": str(p.relative_to(out)), "sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in files
        ],
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
