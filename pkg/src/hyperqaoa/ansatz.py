"""Parameter-sharing layouts for QAOA and circuit evaluation.

Four sharing schemes are supported:

``sa``  one cost angle and one mixer angle per layer
``ma``  one angle per cost term and per qubit
``ka``  one cost angle per interaction order, one mixer angle per qubit
``aa``  one cost angle per term orbit, one mixer angle per vertex orbit

Parameter vectors are laid out layer by layer; within a layer the cost
(gamma) slots come first, then the mixer (beta) slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .hypergraph import IsingProblem
from .statevector import QuantumState, plus_state, rotate_x
from .symmetry import find_orbits


class SchemeKind(str, Enum):
    SA = "sa"
    MA = "ma"
    KA = "ka"
    AA = "aa"


class InitKind(str, Enum):
    ONE_OVER_P = "one_over_p"
    RAND_1_OVER_P = "rand_1_over_p"
    RAND_2PI_OVER_P = "rand_2pi_over_p"
    TQA = "tqa"


@dataclass(frozen=True)
class Scheme:
    kind: SchemeKind
    term_orbits: tuple[tuple[int, ...], ...] | None = None
    vertex_orbits: tuple[tuple[int, ...], ...] | None = None

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        return cls(SchemeKind(name.lower()))

    @classmethod
    def automorphic(cls, problem: IsingProblem, max_n_for_search: int = 10) -> "Scheme":
        terms, verts = find_orbits(problem, max_n_for_search)
        return cls(SchemeKind.AA, tuple(terms), tuple(verts))


@dataclass(frozen=True)
class InitStrategy:
    kind: InitKind
    dt: float = 0.75
    rng_seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"TQA time step must be positive, got {self.dt}")

    @classmethod
    def parse(cls, name: str, rng_seed: int = 0, dt: float = 0.75) -> "InitStrategy":
        return cls(InitKind(name.lower()), dt, rng_seed)


@dataclass(frozen=True)
class ParameterLayout:
    """Slot assignment for every term and qubit in every layer.

    ``gamma_slots[l][t]`` is the parameter index driving cost term ``t`` in
    layer ``l``; ``beta_slots[l][q]`` the index driving the mixer on qubit
    ``q``.  ``term_groups`` partitions the term indices into the sets that
    share a cost angle (identical in every layer).
    """

    p: int
    n: int
    term_groups: tuple[tuple[int, ...], ...]
    qubit_groups: tuple[tuple[int, ...], ...]
    scheme: SchemeKind
    gamma_slots: tuple[tuple[int, ...], ...] = field(repr=False)
    beta_slots: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def per_layer(self) -> int:
        return len(self.term_groups) + len(self.qubit_groups)

    @property
    def total(self) -> int:
        return self.p * self.per_layer

    def layer_gamma(self, layer: int) -> range:
        start = layer * self.per_layer
        return range(start, start + len(self.term_groups))

    def layer_beta(self, layer: int) -> range:
        start = layer * self.per_layer + len(self.term_groups)
        return range(start, start + len(self.qubit_groups))


def _check_partition(groups, size: int, what: str) -> None:
    flat = sorted(i for g in groups for i in g)
    if flat != list(range(size)):
        raise ValueError(f"{what} orbits must cover 0..{size - 1} exactly once")


def build_layout(problem: IsingProblem, scheme: Scheme | str, p: int) -> ParameterLayout:
    if isinstance(scheme, str):
        scheme = Scheme.parse(scheme)
    if p < 1:
        raise ValueError(f"layer count must be >= 1, got {p}")
    m, n = len(problem.terms), problem.n
    kind = scheme.kind
    if kind is SchemeKind.SA:
        term_groups = (tuple(range(m)),) if m else ()
        qubit_groups = (tuple(range(n)),)
    elif kind is SchemeKind.MA:
        term_groups = tuple((i,) for i in range(m))
        qubit_groups = tuple((q,) for q in range(n))
    elif kind is SchemeKind.KA:
        orders = sorted({t.order for t in problem.terms})
        term_groups = tuple(
            tuple(i for i, t in enumerate(problem.terms) if t.order == k) for k in orders
        )
        qubit_groups = tuple((q,) for q in range(n))
    elif kind is SchemeKind.AA:
        if scheme.term_orbits is None or scheme.vertex_orbits is None:
            scheme = Scheme.automorphic(problem)
        _check_partition(scheme.term_orbits, m, "term")
        _check_partition(scheme.vertex_orbits, n, "vertex")
        term_groups = tuple(tuple(sorted(g)) for g in scheme.term_orbits)
        qubit_groups = tuple(tuple(sorted(g)) for g in scheme.vertex_orbits)
    else:
        raise ValueError(f"unknown scheme {kind!r}")

    gamma_slots, beta_slots = [], []
    width = len(term_groups) + len(qubit_groups)
    for layer in range(p):
        base = layer * width
        g = [0] * m
        for slot, grp in enumerate(term_groups):
            for t in grp:
                g[t] = base + slot
        b = [0] * n
        for slot, grp in enumerate(qubit_groups):
            for q in grp:
                b[q] = base + len(term_groups) + slot
        gamma_slots.append(tuple(g))
        beta_slots.append(tuple(b))
    return ParameterLayout(
        p, n, term_groups, qubit_groups, kind, tuple(gamma_slots), tuple(beta_slots)
    )


class Ansatz:
    """A problem/layout pair with the per-group cost diagonals precomputed."""

    def __init__(self, problem: IsingProblem, layout: ParameterLayout):
        self.problem = problem
        self.layout = layout
        n = problem.n
        diag = np.zeros((len(layout.term_groups), 1 << n))
        for g, grp in enumerate(layout.term_groups):
            for t in grp:
                term = problem.terms[t]
                diag[g] += term.coefficient * problem.term_diagonal(term)
        self.group_diagonals = diag
        self.cost_diagonal = diag.sum(axis=0) + problem.offset
        self._plus = plus_state(n).amplitudes

    def _check(self, params) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.layout.total,):
            raise ValueError(
                f"expected {self.layout.total} parameters, got shape {params.shape}"
            )
        return params

    def layer_states(self, params) -> list[QuantumState]:
        """States after the initial preparation and after each layer."""
        params = self._check(params)
        psi = self._plus.copy()
        out = [QuantumState(self.layout.n, psi.copy())]
        for layer in range(self.layout.p):
            psi = self._apply_layer(psi, params, layer)
            out.append(QuantumState(self.layout.n, psi.copy()))
        return out

    def _apply_layer(self, psi: np.ndarray, params: np.ndarray, layer: int) -> np.ndarray:
        lay = self.layout
        gammas = params[lay.layer_gamma(layer).start : lay.layer_gamma(layer).stop]
        if len(gammas):
            psi *= np.exp(-1j * (gammas @ self.group_diagonals))
        betas = params[lay.layer_beta(layer).start : lay.layer_beta(layer).stop]
        for slot, grp in enumerate(lay.qubit_groups):
            half = 0.5 * betas[slot]
            c, ms = np.cos(half), -1j * np.sin(half)
            for q in grp:
                rotate_x(psi, q, c, ms)
        return psi

    def state(self, params) -> QuantumState:
        params = self._check(params)
        psi = self._plus.copy()
        for layer in range(self.layout.p):
            psi = self._apply_layer(psi, params, layer)
        return QuantumState(self.layout.n, psi)

    def expected_cost(self, params) -> float:
        psi = self.state(params).amplitudes
        probs = psi.real ** 2 + psi.imag ** 2
        return float(probs @ self.cost_diagonal)

    __call__ = expected_cost


def evaluate(problem: IsingProblem, layout: ParameterLayout, params) -> QuantumState:
    return Ansatz(problem, layout).state(params)


def initialize(layout: ParameterLayout, strategy: InitStrategy) -> np.ndarray:
    """Initial parameter vector for ``layout``; layers are numbered from 1."""
    out = np.empty(layout.total)
    rng = np.random.default_rng(strategy.rng_seed)
    p = layout.p
    for layer in range(p):
        i = layer + 1
        gam, bet = layout.layer_gamma(layer), layout.layer_beta(layer)
        if strategy.kind is InitKind.TQA:
            out[gam.start : gam.stop] = (i / p) * strategy.dt
            out[bet.start : bet.stop] = (1 - i / p) * strategy.dt
            continue
        lo, hi = gam.start, bet.stop
        if strategy.kind is InitKind.ONE_OVER_P:
            out[lo:hi] = 1.0 / i
        elif strategy.kind is InitKind.RAND_1_OVER_P:
            out[lo:hi] = rng.uniform(0.0, 1.0 / i, size=hi - lo)
        elif strategy.kind is InitKind.RAND_2PI_OVER_P:
            out[lo:hi] = rng.uniform(0.0, 2 * np.pi / i, size=hi - lo)
        else:
            raise ValueError(f"unknown init strategy {strategy.kind!r}")
    return out


def broadcast(layout: ParameterLayout, params: Sequence[float], target: ParameterLayout) -> np.ndarray:
    """Express ``params`` of ``layout`` as a vector for a finer ``target`` layout.

    Every target slot must be covered by a single source slot; typical use
    is mapping SA/KA/AA parameters into the MA layout of the same problem.
    """
    params = np.asarray(params, dtype=float)
    if target.p != layout.p or target.n != layout.n:
        raise ValueError("layouts describe different circuits")
    out = np.full(target.total, np.nan)
    for layer in range(layout.p):
        for src, dst in zip(layout.gamma_slots[layer], target.gamma_slots[layer]):
            if not np.isnan(out[dst]) and out[dst] != params[src]:
                raise ValueError("target layout is coarser than the source")
            out[dst] = params[src]
        for src, dst in zip(layout.beta_slots[layer], target.beta_slots[layer]):
            if not np.isnan(out[dst]) and out[dst] != params[src]:
                raise ValueError("target layout is coarser than the source")
            out[dst] = params[src]
    return out
