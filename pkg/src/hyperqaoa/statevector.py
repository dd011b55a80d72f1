"""Dense statevector engine restricted to the QAOA gate set."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import CapacityError
from .hypergraph import IsingProblem, Term

MAX_QUBITS = 26


class QuantumState:
    """Length-2**n complex amplitudes; gates act in place and return ``self``."""

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} amplitudes, got shape {amplitudes.shape}")
        self.n = n
        self.amplitudes = amplitudes

    @classmethod
    def basis(cls, n: int, index: int) -> "QuantumState":
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    def copy(self) -> "QuantumState":
        return QuantumState(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def dump_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "re", "im"])
            for i, a in enumerate(self.amplitudes):
                writer.writerow([i, repr(float(a.real)), repr(float(a.imag))])

    @classmethod
    def load_csv(cls, path) -> "QuantumState":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        amps = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        return cls(int(len(amps)).bit_length() - 1, amps)


@dataclass(frozen=True)
class DiagonalTable:
    n: int
    values: np.ndarray
    offset: float = 0.0


def plus_state(n: int) -> QuantumState:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count must lie in [1, {MAX_QUBITS}], got {n}")
    dim = 1 << n
    return QuantumState(n, np.full(dim, dim ** -0.5, dtype=complex))


def build_diagonal(
    p: IsingProblem,
    subset: Callable[[Term], bool] | Iterable[int] | None = None,
    with_offset: bool = False,
) -> DiagonalTable:
    """Diagonal of the selected Z-product terms.

    ``subset`` is either a predicate on terms or a collection of term
    indices; ``None`` selects every term.  The problem offset is attached
    (and later added by :func:`expectation`) only for the full selection.
    """
    if subset is None:
        chosen = list(p.terms)
    elif callable(subset):
        chosen = [t for t in p.terms if subset(t)]
    else:
        chosen = [p.terms[i] for i in subset]
    values = np.zeros(1 << p.n, dtype=float)
    for t in chosen:
        values += t.coefficient * p.term_diagonal(t)
    full = subset is None or len(chosen) == len(p.terms)
    offset = p.offset if (with_offset and full) else 0.0
    values.setflags(write=False)
    return DiagonalTable(p.n, values, offset)


def apply_phase(s: QuantumState, d: DiagonalTable, angle: float) -> QuantumState:
    """psi(x) <- exp(-i angle d(x)) psi(x)."""
    if d.n != s.n:
        raise ValueError(f"dimension mismatch: state n={s.n}, table n={d.n}")
    s.amplitudes *= np.exp(-1j * angle * d.values)
    return s


def apply_rx(s: QuantumState, qubit: int, angle: float) -> QuantumState:
    """Apply exp(-i angle X/2) on ``qubit``."""
    if not 0 <= qubit < s.n:
        raise ValueError(f"qubit {qubit} out of range for n={s.n}")
    rotate_x(s.amplitudes, qubit, np.cos(angle / 2), -1j * np.sin(angle / 2))
    return s


def rotate_x(psi: np.ndarray, qubit: int, c: float, ms: complex) -> None:
    # in-place 2x2 [[c, ms], [ms, c]] on the pairs differing in bit ``qubit``
    view = psi.reshape(-1, 2, 1 << qubit)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = c * a + ms * b
    view[:, 1, :] = ms * a + c * b


def expectation(s: QuantumState, d: DiagonalTable) -> float:
    if d.n != s.n:
        raise ValueError(f"dimension mismatch: state n={s.n}, table n={d.n}")
    probs = s.amplitudes.real ** 2 + s.amplitudes.imag ** 2
    return float(probs @ d.values) + d.offset


def subspace_fidelity(s: QuantumState, basis_states: Iterable[int | str]) -> float:
    idx = []
    for b in basis_states:
        if isinstance(b, str):
            if len(b) != s.n:
                raise ValueError(f"bitstring {b!r} has wrong length for n={s.n}")
            b = sum(1 << i for i, ch in enumerate(b) if ch == "1")
        if not 0 <= b < (1 << s.n):
            raise ValueError(f"basis index {b} out of range")
        idx.append(b)
    if not idx:
        return 0.0
    amps = s.amplitudes[np.unique(np.asarray(idx, dtype=np.int64))]
    return float(np.sum(np.abs(amps) ** 2))
