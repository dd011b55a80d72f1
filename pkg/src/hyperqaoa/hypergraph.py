"""Hypergraph cost functions over Boolean and spin variables.

Bit convention used throughout the package: basis index ``x`` encodes the
assignment with variable/qubit ``i`` equal to bit ``i`` of ``x`` (qubit 0 is
the least significant bit).  Spins are ``z_i = 1 - 2 x_i``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError

MAX_BRUTE_FORCE_N = 26
_CHUNK_BITS = 20


@dataclass(frozen=True)
class Term:
    """A weighted monomial ``coefficient * prod(var[i] for i in vertices)``."""

    coefficient: float
    vertices: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.vertices)


def _canonical_terms(
    n: int, raw: Iterable[tuple[float, Sequence[int]]]
) -> tuple[tuple[Term, ...], float]:
    merged: dict[tuple[int, ...], float] = {}
    offset = 0.0
    for coefficient, vertices in raw:
        key = tuple(sorted(int(v) for v in vertices))
        if len(set(key)) != len(key):
            raise ValueError(f"repeated vertex in term {vertices!r}")
        if key and (key[0] < 0 or key[-1] >= n):
            raise ValueError(f"vertex out of range for n={n}: {vertices!r}")
        c = float(coefficient)
        if not math.isfinite(c):
            raise ValueError(f"non-finite coefficient {coefficient!r}")
        if not key:
            offset += c
            continue
        merged[key] = merged.get(key, 0.0) + c
    terms = tuple(
        Term(c, v)
        for v, c in sorted(merged.items(), key=lambda kv: (len(kv[0]), kv[0]))
        if c != 0.0
    )
    return terms, offset


class _Polynomial:
    n: int
    terms: tuple[Term, ...]
    offset: float

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"c": t.coefficient, "v": list(t.vertices)} for t in self.terms],
            "offset": self.offset,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict):
        raw = [(t["c"], t["v"]) for t in data["terms"]]
        return cls.from_terms(int(data["n"]), raw, offset=float(data.get("offset", 0.0)))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_terms(cls, n: int, raw: Iterable[tuple[float, Sequence[int]]], offset: float = 0.0):
        if n < 1:
            raise ValueError("need at least one variable")
        terms, extra = _canonical_terms(n, raw)
        return cls(n, terms, offset + extra)


@dataclass(frozen=True)
class PuboProblem(_Polynomial):
    """Multilinear polynomial over x in {0,1}^n.

    Build instances with :meth:`from_terms`, which sorts vertices, merges
    duplicate hyperedges and drops zero coefficients.
    """

    n: int
    terms: tuple[Term, ...]
    offset: float = 0.0

    def evaluate(self, bits: Sequence[int]) -> float:
        value = self.offset
        for t in self.terms:
            if all(bits[i] for i in t.vertices):
                value += t.coefficient
        return value

    def energies(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Cost of every basis index in ``[start, stop)``."""
        stop = 1 << self.n if stop is None else stop
        x = np.arange(start, stop, dtype=np.int64)
        out = np.full(x.shape, self.offset, dtype=float)
        for t in self.terms:
            mask = 0
            for v in t.vertices:
                mask |= 1 << v
            out += t.coefficient * ((x & mask) == mask)
        return out


@dataclass(frozen=True)
class IsingProblem(_Polynomial):
    """Sum of signed Pauli-Z products plus a constant offset."""

    n: int
    terms: tuple[Term, ...]
    offset: float = 0.0

    def evaluate_spins(self, spins: Sequence[int]) -> float:
        value = self.offset
        for t in self.terms:
            prod = 1
            for i in t.vertices:
                prod *= spins[i]
            value += t.coefficient * prod
        return value

    def evaluate(self, bits: Sequence[int]) -> float:
        return self.evaluate_spins([1 - 2 * int(b) for b in bits])

    def term_diagonal(self, term: Term, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Eigenvalues (+1/-1) of ``prod Z_i`` over basis indices ``[start, stop)``."""
        stop = 1 << self.n if stop is None else stop
        x = np.arange(start, stop, dtype=np.int64)
        mask = 0
        for v in term.vertices:
            mask |= 1 << v
        parity = np.zeros(x.shape, dtype=np.int64)
        masked = x & mask
        while mask:
            parity ^= masked & 1
            masked >>= 1
            mask >>= 1
        return 1.0 - 2.0 * parity

    def energies(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        stop = 1 << self.n if stop is None else stop
        out = np.full(stop - start, self.offset, dtype=float)
        for t in self.terms:
            out += t.coefficient * self.term_diagonal(t, start, stop)
        return out


@dataclass(frozen=True)
class SpectrumSummary:
    optimal_value: float
    ground_states: tuple[int, ...]
    mean_value: float
    n: int

    def bitstrings(self) -> list[str]:
        return [bitstring(x, self.n) for x in self.ground_states]


def bitstring(index: int, n: int) -> str:
    """Render basis index as ``x_0 x_1 ... x_{n-1}``."""
    return "".join(str((index >> i) & 1) for i in range(n))


def parse_bitstring(text: str) -> int:
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def pubo_to_ising(p: PuboProblem) -> IsingProblem:
    """Substitute ``x_i = (1 - z_i)/2`` and collect like terms."""
    raw: list[tuple[float, tuple[int, ...]]] = []
    offset = p.offset
    for t in p.terms:
        k = t.order
        scale = t.coefficient / (1 << k)
        offset += scale
        for size in range(1, k + 1):
            sign = -1.0 if size % 2 else 1.0
            for subset in combinations(t.vertices, size):
                raw.append((sign * scale, subset))
    return IsingProblem.from_terms(p.n, raw, offset=offset)


def generate_cyclic(n: int, k: int = 3, wrap: bool = True) -> PuboProblem:
    """k-uniform sign-alternating hyperedges over consecutive vertices.

    With ``wrap`` the windows start at every vertex (indices taken mod n);
    without it only windows starting at ``0..n-k`` are kept.
    """
    if k < 2 or n < k:
        raise ValueError(f"need n >= k >= 2, got n={n}, k={k}")
    last = n - 1 if wrap else n - k
    raw = [
        ((-1.0) ** i, [(i + j) % n for j in range(k)])
        for i in range(last + 1)
    ]
    return PuboProblem.from_terms(n, raw)


def generate_random(
    n: int, k: int, coeff_set: Sequence[float], rng_seed: int
) -> PuboProblem:
    """Cyclic k-windows with coefficients drawn uniformly from ``coeff_set``."""
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    if len(coeff_set) == 0:
        raise ValueError("coeff_set is empty")
    rng = np.random.default_rng(rng_seed)
    picks = rng.integers(0, len(coeff_set), size=n)
    raw = [
        (float(coeff_set[picks[i]]), [(i + j) % n for j in range(k)])
        for i in range(n)
    ]
    return PuboProblem.from_terms(n, raw)


def brute_force(p: PuboProblem | IsingProblem) -> SpectrumSummary:
    """Exact minimum, all minimizers and uniform mean by full enumeration."""
    if p.n > MAX_BRUTE_FORCE_N:
        raise CapacityError(f"brute force limited to n <= {MAX_BRUTE_FORCE_N}, got {p.n}")
    size = 1 << p.n
    chunk = 1 << min(p.n, _CHUNK_BITS)
    best = math.inf
    total = 0.0
    for start in range(0, size, chunk):
        values = p.energies(start, start + chunk)
        total += float(values.sum())
        best = min(best, float(values.min()))
    tol = 1e-9 * max(1.0, abs(best))
    ground: list[int] = []
    for start in range(0, size, chunk):
        values = p.energies(start, start + chunk)
        hits = np.nonzero(values <= best + tol)[0]
        ground.extend(int(h) + start for h in hits)
    return SpectrumSummary(best, tuple(ground), total / size, p.n)


def is_degenerate(s: SpectrumSummary) -> bool:
    return len(s.ground_states) > 1


def order_histogram(p: IsingProblem | PuboProblem) -> dict[int, int]:
    return dict(sorted(Counter(t.order for t in p.terms).items()))


def load_problem(path) -> PuboProblem:
    with open(path) as fh:
        return PuboProblem.from_json(fh.read())
