"""Campaign engine: problem suites, the run sweep and JSONL persistence."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..ansatz import Ansatz, InitKind, InitStrategy, Scheme, build_layout, initialize
from ..hypergraph import (
    PuboProblem,
    SpectrumSummary,
    brute_force,
    generate_cyclic,
    generate_random,
    is_degenerate,
    pubo_to_ising,
)
from ..magic import MAX_SPECTRUM_QUBITS, stabilizer_renyi_entropy
from ..metrics import RunRecord, assemble_record
from ..optimize import OptimizerConfig, minimize

log = logging.getLogger(__name__)

FAMILIES = ("cyclic", "random_pm1", "random_int10")
COEFFICIENTS = {
    "random_pm1": (-1.0, 0.0, 1.0),
    "random_int10": tuple(float(c) for c in range(-10, 11)),
}
RECORDS_FILE = "records.jsonl"
_DETERMINISTIC_INITS = {InitKind.ONE_OVER_P.value, InitKind.TQA.value}
_MAX_REGENERATE = 1000


class ConfigError(ValueError):
    pass


@dataclass
class CampaignConfig:
    family: str = "cyclic"
    n_values: list[int] = field(default_factory=lambda: list(range(4, 11)))
    instance_count: int = 10
    k: int = 3
    p_values: list[int] = field(default_factory=lambda: [1, 2, 3])
    schemes: list[str] = field(default_factory=lambda: ["sa", "ka", "ma", "aa"])
    inits: list[str] = field(
        default_factory=lambda: ["one_over_p", "rand_1_over_p", "rand_2pi_over_p", "tqa"]
    )
    optimizers: list[str] = field(default_factory=lambda: ["powell", "bfgs"])
    seeds: int = 3
    master_seed: int = 0
    wrap: bool = True
    magic: bool = False
    require_nondegenerate: bool = False
    dt: float = 0.75
    xtol: float = 1e-4
    ftol: float = 1e-4
    gtol: float = 1e-5
    fd_step: float = 1.49e-8
    maxiter: int | None = None
    out_dir: str | None = None
    jobs: int = 1

    def validate(self) -> "CampaignConfig":
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        for name in ("n_values", "p_values", "schemes", "inits", "optimizers"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be non-empty")
        if self.seeds < 1 or self.instance_count < 1:
            raise ConfigError("seeds and instance_count must be >= 1")
        if min(self.p_values) < 1:
            raise ConfigError("layer counts must be >= 1")
        cap = MAX_SPECTRUM_QUBITS if self.magic else 26
        if max(self.n_values) > cap or min(self.n_values) < self.k:
            raise ConfigError(f"n must lie in [{self.k}, {cap}]")
        for s in self.schemes:
            Scheme.parse(s)
        for i in self.inits:
            InitKind(i)
        for o in self.optimizers:
            OptimizerConfig(method=o)
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "CampaignConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)


def magic_config(paper_scale: bool = False, **overrides) -> CampaignConfig:
    """Non-degenerate random integer instances, Powell + TQA, SA/KA/MA."""
    cfg = CampaignConfig(
        family="random_int10",
        n_values=[12] if paper_scale else [10],
        instance_count=70 if paper_scale else 10,
        p_values=[1, 2, 3, 4, 5],
        schemes=["sa", "ka", "ma"],
        inits=["tqa"],
        optimizers=["powell"],
        seeds=1,
        magic=True,
        require_nondegenerate=True,
    )
    return replace(cfg, **overrides)


def paper_scale_config(family: str, **overrides) -> CampaignConfig:
    if family == "cyclic":
        cfg = CampaignConfig(family="cyclic", n_values=list(range(4, 16)), p_values=[1, 2, 3])
    elif family == "random_pm1":
        cfg = CampaignConfig(
            family="random_pm1", n_values=[12], instance_count=44,
            p_values=[1, 2, 3, 4, 5], schemes=["sa", "ka", "ma"],
        )
    else:
        return magic_config(paper_scale=True, **overrides)
    return replace(cfg, **overrides)


def desk_config(family: str, **overrides) -> CampaignConfig:
    if family == "cyclic":
        cfg = CampaignConfig(family="cyclic")
    elif family == "random_pm1":
        cfg = CampaignConfig(
            family="random_pm1", n_values=[10], instance_count=10,
            p_values=[1, 2, 3, 4, 5], schemes=["sa", "ka", "ma"],
        )
    else:
        return magic_config(**overrides)
    return replace(cfg, **overrides)


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    problem_id: str
    family: str
    problem: PuboProblem
    summary: SpectrumSummary
    generator_seed: int | None = None


def _derive_seed(master: int, *key: int) -> int:
    return int(np.random.SeedSequence(master, spawn_key=key).generate_state(1)[0])


def build_instances(cfg: CampaignConfig) -> list[Instance]:
    out = []
    for n_index, n in enumerate(cfg.n_values):
        if cfg.family == "cyclic":
            problem = generate_cyclic(n, cfg.k, cfg.wrap)
            pid = f"cyclic-n{n}-k{cfg.k}-{'wrap' if cfg.wrap else 'open'}"
            out.append(Instance(pid, cfg.family, problem, brute_force(problem)))
            continue
        coeffs = COEFFICIENTS[cfg.family]
        attempt = 0
        for i in range(cfg.instance_count):
            while True:
                if attempt > _MAX_REGENERATE + cfg.instance_count:
                    raise ConfigError("could not generate enough non-degenerate instances")
                seed = _derive_seed(cfg.master_seed, 1, n_index, attempt)
                attempt += 1
                problem = generate_random(n, cfg.k, coeffs, seed)
                summary = brute_force(problem)
                if cfg.require_nondegenerate and (
                    is_degenerate(summary) or summary.optimal_value == 0
                ):
                    continue
                break
            pid = f"{cfg.family}-n{n}-k{cfg.k}-i{i:03d}"
            out.append(Instance(pid, cfg.family, problem, summary, seed))
    return out


def write_instance(inst: Instance, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{inst.problem_id}.json"
    payload = inst.problem.to_dict()
    payload["id"] = inst.problem_id
    payload["family"] = inst.family
    payload["generator_seed"] = inst.generator_seed
    payload["c_opt"] = inst.summary.optimal_value
    payload["ground_states"] = inst.summary.bitstrings()
    path.write_text(json.dumps(payload, indent=1) + "\n")
    return path


# --------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class Cell:
    instance_index: int
    scheme: str
    p: int
    init: str
    optimizer: str
    seed_index: int
    seed: int


def cells(cfg: CampaignConfig, instances: list[Instance]) -> Iterator[Cell]:
    for idx, _ in enumerate(instances):
        for scheme, p, init, opt, s in product(
            cfg.schemes, cfg.p_values, cfg.inits, cfg.optimizers, range(cfg.seeds)
        ):
            yield Cell(idx, scheme, p, init, opt, s, _derive_seed(cfg.master_seed, 2, idx, s))


def _run_cell(cfg: CampaignConfig, inst: Instance, cell: Cell) -> RunRecord:
    ising = pubo_to_ising(inst.problem)
    layout = build_layout(ising, cell.scheme, cell.p)
    ansatz = Ansatz(ising, layout)
    x0 = initialize(layout, InitStrategy.parse(cell.init, rng_seed=cell.seed, dt=cfg.dt))
    opt_cfg = OptimizerConfig(
        method=cell.optimizer, xtol=cfg.xtol, ftol=cfg.ftol, gtol=cfg.gtol,
        fd_step=cfg.fd_step, maxiter=cfg.maxiter,
    )
    result = minimize(ansatz.expected_cost, x0, opt_cfg)
    extra = {}
    if cfg.magic:
        states = ansatz.layer_states(result.best_params)
        trace = [
            {"layer": layer, "m2": stabilizer_renyi_entropy(s, 2.0)}
            for layer, s in enumerate(states)
        ]
        extra = {
            "magic_trace": trace,
            "m2_final": trace[-1]["m2"],
            "m2_max": max(t["m2"] for t in trace),
        }
    return assemble_record(
        problem_id=inst.problem_id,
        scheme=cell.scheme,
        p=cell.p,
        init=cell.init,
        optimizer=cell.optimizer,
        seed=cell.seed,
        final_params=result.best_params,
        state=ansatz.state(result.best_params),
        expected_cost=result.best_value,
        summary=inst.summary,
        nfev=result.nfev,
        recompute=ansatz.expected_cost,
        family=inst.family,
        num_params=layout.total,
        converged=result.converged,
        **extra,
    )


def _safe_run(args) -> RunRecord:
    cfg, inst, cell = args
    try:
        return _run_cell(cfg, inst, cell)
    except Exception as exc:  # recorded, campaign continues
        log.exception("run %s failed", cell)
        return RunRecord(
            problem_id=inst.problem_id, scheme=cell.scheme, p=cell.p, init=cell.init,
            optimizer=cell.optimizer, seed=cell.seed, final_params=[], ar=None,
            fidelity=0.0, nfev=0, expected_cost=0.0,
            c_opt=inst.summary.optimal_value, n=inst.problem.n, family=inst.family,
            error=f"{type(exc).__name__}: {exc}",
        )


def _compute_key(cell: Cell) -> tuple:
    # deterministic inits do not consume the seed, so replicas share one optimization
    seed = 0 if cell.init in _DETERMINISTIC_INITS else cell.seed
    return (cell.instance_index, cell.scheme, cell.p, cell.init, cell.optimizer, seed)


def read_records(path) -> list[RunRecord]:
    path = Path(path)
    if not path.exists():
        return []
    with open(path) as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


def run_campaign(cfg: CampaignConfig, progress=None) -> list[RunRecord]:
    """Run every (instance, scheme, p, init, optimizer, seed) cell.

    With ``cfg.out_dir`` set, instances and config are written there and
    records are appended to ``records.jsonl`` in cell order; cells already
    present in that file are skipped.
    """
    cfg.validate()
    instances = build_instances(cfg)
    out_dir = Path(cfg.out_dir) if cfg.out_dir else None
    done: dict[tuple, RunRecord] = {}
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "config.json").write_text(json.dumps(cfg.to_dict(), indent=1) + "\n")
        for inst in instances:
            write_instance(inst, out_dir / "instances")
        for rec in read_records(out_dir / RECORDS_FILE):
            done[rec.key] = rec

    todo: list[Cell] = []
    for cell in cells(cfg, instances):
        inst = instances[cell.instance_index]
        key = (inst.problem_id, cell.scheme, cell.p, cell.init, cell.optimizer, cell.seed)
        if key not in done:
            todo.append(cell)

    unique: dict[tuple, Cell] = {}
    for cell in todo:
        unique.setdefault(_compute_key(cell), cell)
    jobs = [(cfg, instances[c.instance_index], c) for c in unique.values()]

    by_key: dict[tuple, list[Cell]] = {}
    for cell in todo:
        by_key.setdefault(_compute_key(cell), []).append(cell)

    pool = ProcessPoolExecutor(max_workers=cfg.jobs) if cfg.jobs > 1 and len(jobs) > 1 else None
    results: Iterable[RunRecord] = (
        pool.map(_safe_run, jobs, chunksize=1) if pool else map(_safe_run, jobs)
    )
    writer = open(out_dir / RECORDS_FILE, "a") if out_dir is not None else None
    records = list(done.values())
    try:
        for ckey, base in zip(unique.keys(), results):
            for cell in by_key[ckey]:
                rec = replace(base, seed=cell.seed)
                records.append(rec)
                if writer is not None:
                    writer.write(rec.to_json() + "\n")
                    writer.flush()
                if progress is not None:
                    progress(rec)
    finally:
        if writer is not None:
            writer.close()
        if pool is not None:
            pool.shutdown()
    return records
