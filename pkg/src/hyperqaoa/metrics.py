"""Figures of merit for finished runs and the persisted run record."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConsistencyError
from .hypergraph import SpectrumSummary
from .statevector import QuantumState, subspace_fidelity


class UndefinedRatioError(ZeroDivisionError):
    """The optimum is zero, so the approximation ratio has no meaning."""


def approximation_ratio(expected_cost: float, summary: SpectrumSummary) -> float:
    if summary.optimal_value == 0:
        raise UndefinedRatioError("approximation ratio undefined for optimal value 0")
    return expected_cost / summary.optimal_value


def fidelity(state: QuantumState, summary: SpectrumSummary) -> float:
    """Probability mass on the ground subspace."""
    if state.n != summary.n:
        raise ValueError(f"state has {state.n} qubits, problem has {summary.n}")
    return subspace_fidelity(state, summary.ground_states)


@dataclass(frozen=True)
class RunRecord:
    problem_id: str
    scheme: str
    p: int
    init: str
    optimizer: str
    seed: int
    final_params: list[float]
    ar: float | None
    fidelity: float
    nfev: int
    expected_cost: float
    c_opt: float
    n: int = 0
    family: str = ""
    num_params: int = 0
    converged: bool = True
    degenerate: bool = False
    magic_trace: list[dict] | None = None
    m2_final: float | None = None
    m2_max: float | None = None
    error: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ar_defined(self) -> bool:
        return self.ar is not None

    @property
    def key(self) -> tuple:
        return (self.problem_id, self.scheme, self.p, self.init, self.optimizer, self.seed)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(**data)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls.from_dict(json.loads(line))


def assemble_record(
    *,
    problem_id: str,
    scheme: str,
    p: int,
    init: str,
    optimizer: str,
    seed: int,
    final_params: Sequence[float],
    state: QuantumState,
    expected_cost: float,
    summary: SpectrumSummary,
    nfev: int,
    recompute=None,
    **extra_fields,
) -> RunRecord:
    """Build a record; ``recompute(params)`` re-derives the expected cost for a consistency check."""
    if recompute is not None:
        fresh = float(recompute(np.asarray(final_params, dtype=float)))
        if abs(fresh - expected_cost) > 1e-12 * max(1.0, abs(fresh)):
            raise ConsistencyError(
                f"expected cost {expected_cost!r} disagrees with re-evaluation {fresh!r}"
            )
    if nfev < 1:
        raise ValueError("a completed run needs at least one evaluation")
    try:
        ar = approximation_ratio(expected_cost, summary)
    except UndefinedRatioError:
        ar = None
    fid = min(1.0, max(0.0, fidelity(state, summary)))
    return RunRecord(
        problem_id=problem_id,
        scheme=scheme,
        p=p,
        init=init,
        optimizer=optimizer,
        seed=seed,
        final_params=[float(v) for v in final_params],
        ar=ar,
        fidelity=fid,
        nfev=int(nfev),
        expected_cost=float(expected_cost),
        c_opt=float(summary.optimal_value),
        n=summary.n,
        degenerate=len(summary.ground_states) > 1,
        **extra_fields,
    )
