"""Stabilizer Renyi entropy of pure qubit states.

For an X-mask ``a`` the vector ``v_a(x) = conj(psi(x)) psi(x ^ a)`` has a
Walsh-Hadamard transform whose entry ``b`` equals ``<psi|X^a Z^b|psi>`` up
to a sign, so one length-2**n transform per X-mask yields the whole Pauli
spectrum in O(n 4**n) time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Hashable, Mapping

import numpy as np

from .errors import CapacityError
from .statevector import QuantumState

MAX_SPECTRUM_QUBITS = 14
_STRIPE_ELEMENTS = 1 << 20


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis (length 2**k)."""
    out = np.array(values, copy=True)
    lead = out.shape[:-1]
    size = out.shape[-1]
    if size & (size - 1):
        raise ValueError(f"transform length must be a power of two, got {size}")
    h = 1
    while h < size:
        blocks = out.reshape(*lead, size // (2 * h), 2, h)
        lo = blocks[..., 0, :]
        hi = blocks[..., 1, :]
        out = np.stack((lo + hi, lo - hi), axis=-2).reshape(*lead, size)
        h *= 2
    return out


@dataclass(frozen=True)
class PauliSpectrum:
    """``squared_expectations[a, b] = |<psi|X^a Z^b|psi>|**2``."""

    n: int
    squared_expectations: np.ndarray


@dataclass(frozen=True)
class MagicRecord:
    alpha: float
    value: float
    normalized: float | None = None


def _stripes(psi: np.ndarray, n: int):
    dim = 1 << n
    x = np.arange(dim)
    rows = max(1, _STRIPE_ELEMENTS // dim)
    conj = np.conj(psi)
    for start in range(0, dim, rows):
        masks = np.arange(start, min(dim, start + rows))
        v = conj[None, :] * psi[x[None, :] ^ masks[:, None]]
        spec = fwht(v)
        yield start, spec.real ** 2 + spec.imag ** 2


def _amplitudes(s: QuantumState | np.ndarray) -> tuple[np.ndarray, int]:
    if isinstance(s, QuantumState):
        return s.amplitudes, s.n
    psi = np.asarray(s, dtype=complex)
    return psi, psi.size.bit_length() - 1


def pauli_spectrum(s: QuantumState) -> PauliSpectrum:
    psi, n = _amplitudes(s)
    if n > MAX_SPECTRUM_QUBITS:
        raise CapacityError(f"Pauli spectrum limited to n <= {MAX_SPECTRUM_QUBITS}, got {n}")
    dim = 1 << n
    out = np.empty((dim, dim))
    for start, block in _stripes(psi, n):
        out[start : start + block.shape[0]] = block
    return PauliSpectrum(n, out)


def sre(spec: PauliSpectrum, alpha: float = 2.0) -> MagicRecord:
    """M_alpha in bits from a precomputed spectrum."""
    if alpha == 1:
        raise ValueError("alpha = 1 (von Neumann limit) is not supported")
    total = float(np.sum(spec.squared_expectations ** alpha))
    value = math.log2(total / (1 << spec.n)) / (1.0 - alpha)
    return MagicRecord(alpha, value)


def stabilizer_renyi_entropy(s: QuantumState, alpha: float = 2.0) -> float:
    """M_alpha computed stripe by stripe without materializing the 4**n spectrum."""
    if alpha == 1:
        raise ValueError("alpha = 1 (von Neumann limit) is not supported")
    psi, n = _amplitudes(s)
    if n > MAX_SPECTRUM_QUBITS:
        raise CapacityError(f"Pauli spectrum limited to n <= {MAX_SPECTRUM_QUBITS}, got {n}")
    total = 0.0
    for _, block in _stripes(psi, n):
        total += float(np.sum(block ** alpha))
    return math.log2(total / (1 << n)) / (1.0 - alpha)


def normalize(
    records: Mapping[Hashable, MagicRecord | float],
) -> tuple[dict[Hashable, MagicRecord], bool]:
    """Scale every value by the largest one; returns ``(records, normalized_ok)``.

    An all-zero (or empty) map cannot be scaled: the records come back with
    ``normalized`` unset and the flag is False.
    """
    recs = {
        k: (v if isinstance(v, MagicRecord) else MagicRecord(2.0, float(v)))
        for k, v in records.items()
    }
    peak = max((r.value for r in recs.values()), default=0.0)
    if not peak > 0:
        return {k: replace(r, normalized=None) for k, r in recs.items()}, False
    return {k: replace(r, normalized=r.value / peak) for k, r in recs.items()}, True
