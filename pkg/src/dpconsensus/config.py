"""Experiment configuration: schema, parsing, and construction of parts.

A configuration is a plain nested mapping, read from YAML or JSON (chosen
by file extension; both encode the same schema).  Top-level keys:

``topology``    ``{generator: ring|complete|path, agents, weight}`` or
                ``{agents, edges: [[i, j, weight], ...]}`` (1-based indices)
``signal``      ``{kind: damped_sinusoid, dimension, low, high, seed?}`` or
                ``{kind: constant, values: [[...], ...]}`` or
                ``{kind: table, values | csv, tail}``
``schedules``   ``{stepsize: {...}, weakening: {...}, drift: {...}}`` with
                each schedule ``{family: power_law | power_law_denom |
                power_law_shifted | geometric | table, ...params}``
``noise``       ``{scale: {...}}`` for an explicit Laplace scale schedule,
                ``{target_epsilon, shape: {...}}`` for calibrated noise, or
                omitted entirely for noise-free runs
``geometric_baseline``  optional ``{input_weight: {...}, noise_ratio}``
``algorithms``  subset of ``[robust, conventional, geometric]``
``horizon``, ``runs``, ``master_seed``, ``workers``, ``drift_horizon``,
``dump_every``, ``output_dir``

Configurations round-trip losslessly: ``from_dict(to_dict(cfg))`` equals
``cfg``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .noise import SIGNAL_STREAM_TAG
from .schedules import Geometric, PowerLaw, PowerLawDenom, PowerLawShifted, Schedule, Table
from .signals import ConstantSignal, DampedSinusoidSignal, SignalSpec, TableSignal
from .topology import Topology, build_topology, complete_topology, path_topology, ring_topology

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "build_schedule",
    "build_signal",
    "build_topology_from_spec",
    "config_hash",
    "load_config",
    "schedule_to_spec",
]

DEFAULT_HORIZON = 5000
DEFAULT_RUNS = 100
DEFAULT_GEOMETRIC_INPUT = {"family": "geometric", "c": 1.0, "q": 0.99}
DEFAULT_GEOMETRIC_NOISE_RATIO = 0.99
ALGORITHM_NAMES = ("robust", "conventional", "geometric")


class ConfigError(ValueError):
    """The configuration file cannot be parsed or violates the schema."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed view of one experiment configuration."""

    topology: dict
    signal: dict
    schedules: dict
    noise: dict | None = None
    geometric_baseline: dict = field(
        default_factory=lambda: {
            "input_weight": dict(DEFAULT_GEOMETRIC_INPUT),
            "noise_ratio": DEFAULT_GEOMETRIC_NOISE_RATIO,
        }
    )
    algorithms: tuple[str, ...] = ("robust",)
    horizon: int = DEFAULT_HORIZON
    runs: int = DEFAULT_RUNS
    master_seed: int = 0
    workers: int = 1
    drift_horizon: int | None = None
    dump_every: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        for name in self.algorithms:
            if name not in ALGORITHM_NAMES:
                raise ConfigError(f"unknown algorithm {name!r}; choose from {ALGORITHM_NAMES}")
        for key in ("stepsize", "weakening", "drift"):
            if key not in self.schedules:
                raise ConfigError(f"schedules section is missing {key!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"configuration must be a mapping, got {type(raw).__name__}")
        known = {
            "topology",
            "signal",
            "schedules",
            "noise",
            "geometric_baseline",
            "algorithms",
            "horizon",
            "runs",
            "master_seed",
            "workers",
            "drift_horizon",
            "dump_every",
            "output_dir",
        }
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        for required in ("topology", "signal", "schedules"):
            if required not in raw:
                raise ConfigError(f"configuration is missing the {required!r} section")
        kwargs = dict(raw)
        if "algorithms" in kwargs:
            kwargs["algorithms"] = tuple(kwargs["algorithms"])
        if "geometric_baseline" in kwargs:
            gb = dict(kwargs["geometric_baseline"])
            gb.setdefault("input_weight", dict(DEFAULT_GEOMETRIC_INPUT))
            gb.setdefault("noise_ratio", DEFAULT_GEOMETRIC_NOISE_RATIO)
            kwargs["geometric_baseline"] = gb
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        out: dict = {
            "topology": self.topology,
            "signal": self.signal,
            "schedules": self.schedules,
        }
        if self.noise is not None:
            out["noise"] = self.noise
        out["geometric_baseline"] = self.geometric_baseline
        out["algorithms"] = list(self.algorithms)
        out["horizon"] = self.horizon
        out["runs"] = self.runs
        out["master_seed"] = self.master_seed
        out["workers"] = self.workers
        if self.drift_horizon is not None:
            out["drift_horizon"] = self.drift_horizon
        out["dump_every"] = self.dump_every
        if self.output_dir is not None:
            out["output_dir"] = self.output_dir
        return out

    def replace(self, **overrides) -> "ExperimentConfig":
        d = self.to_dict()
        d.update({k: v for k, v in overrides.items() if v is not None})
        return ExperimentConfig.from_dict(d)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a configuration from a YAML or JSON file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(text)
        else:
            raw = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


def config_hash(cfg: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON encoding of the configuration."""
    canonical = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Construction of experiment parts from their config sections
# ---------------------------------------------------------------------------

_SCHEDULE_FAMILIES = {
    "power_law": lambda s: PowerLaw(c=float(s["c"]), p=float(s["p"]), shift=float(s.get("shift", 1.0))),
    "power_law_denom": lambda s: PowerLawDenom(c=float(s["c"]), p=float(s["p"])),
    "power_law_shifted": lambda s: PowerLawShifted(c0=float(s["c0"]), c1=float(s["c1"]), p=float(s["p"])),
    "geometric": lambda s: Geometric(c=float(s["c"]), q=float(s["q"])),
    "table": lambda s: Table(values=tuple(float(v) for v in s["values"]), tail=s.get("tail", "hold")),
}


def build_schedule(spec: dict) -> Schedule:
    """Instantiate a schedule from its ``{family, ...params}`` mapping."""
    if "family" not in spec:
        raise ConfigError(f"schedule spec {spec} has no 'family'")
    family = spec["family"]
    if family not in _SCHEDULE_FAMILIES:
        raise ConfigError(f"unknown schedule family {family!r}")
    try:
        return _SCHEDULE_FAMILIES[family](spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad {family} schedule {spec}: {exc}") from exc


def schedule_to_spec(schedule: Schedule) -> dict:
    """Inverse of :func:`build_schedule` for the parametric families."""
    if isinstance(schedule, PowerLaw):
        out = {"family": "power_law", "c": schedule.c, "p": schedule.p}
        if schedule.shift != 1.0:
            out["shift"] = schedule.shift
        return out
    if isinstance(schedule, PowerLawDenom):
        return {"family": "power_law_denom", "c": schedule.c, "p": schedule.p}
    if isinstance(schedule, PowerLawShifted):
        return {"family": "power_law_shifted", "c0": schedule.c0, "c1": schedule.c1, "p": schedule.p}
    if isinstance(schedule, Geometric):
        return {"family": "geometric", "c": schedule.c, "q": schedule.q}
    if isinstance(schedule, Table):
        return {"family": "table", "values": list(schedule.values), "tail": schedule.tail}
    raise ConfigError(f"cannot serialize schedule of type {type(schedule).__name__}")


def build_topology_from_spec(spec: dict) -> Topology:
    """Instantiate a topology from a generator name or explicit edge list."""
    if "generator" in spec:
        generators = {"ring": ring_topology, "complete": complete_topology, "path": path_topology}
        name = spec["generator"]
        if name not in generators:
            raise ConfigError(f"unknown topology generator {name!r}")
        try:
            m = int(spec["agents"])
            weight = float(spec["weight"])
        except KeyError as exc:
            raise ConfigError(f"topology generator needs 'agents' and 'weight': {exc}") from exc
        return generators[name](m, weight)
    if "edges" in spec:
        try:
            m = int(spec["agents"])
        except KeyError as exc:
            raise ConfigError("explicit topology needs 'agents'") from exc
        edges = [(int(i), int(j), float(w)) for i, j, w in spec["edges"]]
        return build_topology(m, edges)
    raise ConfigError("topology section needs either 'generator' or 'edges'")


def build_signal(spec: dict, master_seed: int) -> SignalSpec:
    """Instantiate the reference signals from their config section.

    The damped sinusoid draws its per-agent offsets and amplitudes once,
    from a stream derived as ``SeedSequence((seed, 0))`` where ``seed`` is
    the signal section's own seed if present, else the experiment's master
    seed.  The signal is therefore identical across Monte-Carlo runs.
    """
    kind = spec.get("kind")
    if kind == "constant":
        return ConstantSignal(values=np.asarray(spec["values"], dtype=float))
    if kind == "damped_sinusoid":
        m = int(spec["agents"])
        d = int(spec.get("dimension", 1))
        low = float(spec.get("low", 0.0))
        high = float(spec.get("high", 10.0))
        seed = int(spec.get("seed", master_seed))
        rng = np.random.default_rng(np.random.SeedSequence((seed, SIGNAL_STREAM_TAG)))
        return DampedSinusoidSignal.random(m, d, rng, low=low, high=high)
    if kind == "table":
        tail = spec.get("tail", "hold")
        if "csv" in spec:
            m = int(spec["agents"])
            d = int(spec.get("dimension", 1))
            rows = np.loadtxt(spec["csv"], delimiter=",", ndmin=2)
            if rows.shape[1] != m * d:
                raise ConfigError(
                    f"table csv has {rows.shape[1]} columns, expected agents*dimension = {m * d}"
                )
            return TableSignal(values=rows.reshape(rows.shape[0], m, d), tail=tail)
        return TableSignal(values=np.asarray(spec["values"], dtype=float), tail=tail)
    raise ConfigError(f"unknown signal kind {kind!r}")
