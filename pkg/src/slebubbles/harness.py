"""Experiment configuration, reports and the kappa sweep."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import __version__
from . import markov_path as mkp
from .stable_walk import derive_seed

OUTPUT_ENV = "SLEBUBBLES_OUTPUT_DIR"
SEED_RULE = "replica i of a cell uses SeedSequence(entropy=cell_seed, spawn_key=(i,)); " \
            "L and R of a pair use spawn keys (0,) and (1,) of the replica seed; " \
            "sweep cell j uses cell_seed = derive(master_seed, j)"

QUANTITIES = {
    "log_L_gap": mkp.estimate_log_L_gap,
    "log_R_gap": mkp.estimate_log_R_gap,
    "log_overshoot": mkp.estimate_log_overshoot,
    "log_R_theta": mkp.estimate_log_theta,
    "log_sup_gap": mkp.estimate_sup_criterion,
}


@dataclass
class ExperimentConfig:
    subcommand: str = "simulate"
    kappa: float = 6.0
    kappa_grid: tuple[float, ...] = ()
    n: int = 1024
    horizon: int = 4096
    horizon_cap: int = mkp.DEFAULT_CAP
    replicas: int = 200
    seed: int = 0
    min_jump: int = 1
    quantities: tuple[str, ...] = ("log_L_gap", "log_R_gap", "log_overshoot")
    output: str = ""
    format: str = "csv"
    workers: int = 1
    tol: float = 1e-9
    K: int = 3
    t: int = 3
    M_cap: int = 3
    r: int = 1

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_value(cls, name: str, text: str):
        default = getattr(cls(), name)
        text = text.strip()
        if isinstance(default, tuple):
            items = [x.strip() for x in text.split(",") if x.strip()]
            conv = float if name == "kappa_grid" else str
            return tuple(conv(x) for x in items)
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes")
        return type(default)(float(text)) if isinstance(default, int) and "e" in text.lower() \
            else type(default)(text)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        values = {}
        for num, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {num}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise ValueError(f"config line {num}: unknown key {key!r}")
            values[key] = cls.parse_value(key, val)
        return cls(**values)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


@dataclass
class RunReport:
    config: ExperimentConfig
    estimates: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    seed_rule: str = SEED_RULE

    @property
    def failures(self) -> int:
        return sum(e.failures for e in self.estimates)

    @property
    def degenerates(self) -> int:
        return sum(e.degenerates for e in self.estimates)

    def to_dict(self) -> dict:
        return {
            "config": dataclasses.asdict(self.config),
            "estimates": [e.to_dict() for e in self.estimates],
            "failures": self.failures,
            "degenerates": self.degenerates,
            "extra": self.extra,
            "wall_time": self.wall_time,
            "version": self.version,
            "seed_rule": self.seed_rule,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, default=_jsonable) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(mkp.Estimate.CSV_FIELDS)
        for e in sorted(self.estimates, key=lambda e: (e.kappa, e.quantity)):
            w.writerow(e.csv_row())
        return buf.getvalue()


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    if hasattr(x, "tolist"):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x)}")


def run_estimates(cfg: ExperimentConfig, kappa: float, seed: int) -> list:
    out = []
    for q in cfg.quantities:
        if q not in QUANTITIES:
            raise ValueError(f"unknown quantity {q!r}; choose from {sorted(QUANTITIES)}")
        out.append(QUANTITIES[q](kappa, cfg.n, cfg.replicas, derive_seed(seed, hash_name(q)),
                                 cap=cfg.horizon_cap, workers=cfg.workers))
    return out


def hash_name(name: str) -> int:
    # stable across runs, unlike hash()
    return int.from_bytes(name.encode()[:8].ljust(8, b"\0"), "little")


def sweep(cfg: ExperimentConfig) -> RunReport:
    grid = cfg.kappa_grid or (cfg.kappa,)
    start = time.perf_counter()
    report = RunReport(cfg)
    for j, k in enumerate(grid):
        cell_seed = cfg.seed if len(grid) == 1 else derive_seed(cfg.seed, j)
        report.estimates.extend(run_estimates(cfg, k, cell_seed))
    report.wall_time = time.perf_counter() - start
    return report


def output_path(cfg: ExperimentConfig, default_name: str) -> Path | None:
    if cfg.output:
        return Path(cfg.output)
    base = os.environ.get(OUTPUT_ENV)
    return Path(base) / default_name if base else None


def write_if_changed(path: Path, text: str) -> bool:
    """Write unless the file already holds exactly this content."""
    if path.exists() and path.read_text() == text:
        return False
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return True
