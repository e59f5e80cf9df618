# qaoatransfer/simulator.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Dense statevector oracle for depth-1 QAOA on MaxCut
# Qubit 0 is the least significant bit of the basis index
# U_C(gamma) = exp(-i gamma C) applied as diagonal phases, C counts cut edges
# U_B(beta) = prod_q exp(-i beta X_q) applied in place, one qubit at a time

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from qaoatransfer.errors import CapacityError
from qaoatransfer.graph import Graph
from qaoatransfer.seeding import make_rng

logger = logging.getLogger('Simulator')

DEFAULT_QUBIT_CAP = 20
TWO_PI = 2.0 * math.pi


def _reduce(x: float, period: float) -> float:
    r = float(np.mod(x, period))
    # np.mod rounds tiny negatives up to the period itself
    return 0.0 if r >= period else r


@dataclass(frozen=True)
class QaoaParams:
    """Depth-1 schedule point. Canonical domain is [0, 2pi) x [0, pi)."""
    gamma: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and math.isfinite(self.beta)):
            raise ValueError(f"Non-finite QAOA parameters ({self.gamma}, {self.beta})")

    def canonical(self) -> "QaoaParams":
        return QaoaParams(_reduce(self.gamma, TWO_PI), _reduce(self.beta, math.pi))

    def as_tuple(self) -> Tuple[float, float]:
        return (self.gamma, self.beta)


class StateVector:
    """2^N complex amplitudes; qubit 0 = least significant bit."""

    def __init__(self, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        n = int(round(math.log2(amplitudes.size))) if amplitudes.size else -1
        if n < 0 or 2 ** n != amplitudes.size:
            raise ValueError(f"Amplitude count {amplitudes.size} is not a power of two")
        self.amplitudes = amplitudes
        self.num_qubits = n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def basis_state(cls, num_qubits: int, index: int) -> "StateVector":
        amplitudes = np.zeros(2 ** num_qubits, dtype=np.complex128)
        amplitudes[index] = 1.0
        return cls(amplitudes)

    @classmethod
    def uniform(cls, num_qubits: int) -> "StateVector":
        size = 2 ** num_qubits
        return cls(np.full(size, 1.0 / math.sqrt(size), dtype=np.complex128))


def _check_cap(g: Graph, qubit_cap: int):
    if g.node_count > qubit_cap:
        raise CapacityError(f"{g.node_count} qubits exceed the statevector cap of {qubit_cap}")


def cut_values(g: Graph, edges: Optional[Tuple[Tuple[int, int], ...]] = None) -> np.ndarray:
    """Number of cut edges for every basis state (restricted to `edges` if given)."""
    index = np.arange(2 ** g.node_count, dtype=np.int64)
    values = np.zeros(index.size, dtype=np.float64)
    for u, v in (g.edges if edges is None else edges):
        values += ((index >> u) ^ (index >> v)) & 1
    return values


def _apply_mixer(state: np.ndarray, n: int, beta: float) -> np.ndarray:
    c, s = math.cos(beta), -1j * math.sin(beta)
    for q in range(n):
        view = state.reshape(2 ** (n - q - 1), 2, 2 ** q)
        low = view[:, 0, :].copy()
        high = view[:, 1, :]
        view[:, 0, :] = c * low + s * high
        view[:, 1, :] = s * low + c * high
    return state


def prepare_state(g: Graph, params: QaoaParams, qubit_cap: int = DEFAULT_QUBIT_CAP,
                  diagonal: Optional[np.ndarray] = None) -> StateVector:
    """U_B(beta) U_C(gamma) |+>^N. `diagonal` may pass precomputed cut values."""
    _check_cap(g, qubit_cap)
    n = g.node_count
    cuts = cut_values(g) if diagonal is None else diagonal
    state = np.full(2 ** n, 2.0 ** (-n / 2.0), dtype=np.complex128)
    state *= np.exp(-1j * params.gamma * cuts)
    return StateVector(_apply_mixer(state, n, params.beta))


def energy(g: Graph, params: QaoaParams, qubit_cap: int = DEFAULT_QUBIT_CAP) -> float:
    """<C> = sum over edges of (1 - z_j z_k)/2 in the QAOA state."""
    _check_cap(g, qubit_cap)
    cuts = cut_values(g)
    sv = prepare_state(g, params, qubit_cap, diagonal=cuts)
    return float(np.dot(sv.probabilities(), cuts))


def edge_expectation(g: Graph, params: QaoaParams, edge: Tuple[int, int],
                     qubit_cap: int = DEFAULT_QUBIT_CAP) -> float:
    """Expectation of the single cut term of `edge`."""
    _check_cap(g, qubit_cap)
    u, v = edge
    if not g.has_edge(u, v):
        raise ValueError(f"Edge ({u}, {v}) not in graph")
    sv = prepare_state(g, params, qubit_cap)
    index = np.arange(2 ** g.node_count, dtype=np.int64)
    term = ((index >> u) ^ (index >> v)) & 1
    return float(np.dot(sv.probabilities(), term))


def sample_cut(sv: StateVector, shots: int, seed: int) -> Counter:
    """
    Measure in the computational basis `shots` times.
    Bitstrings are written qubit N-1 first (qubit 0 rightmost).
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = sv.probabilities()
    probs = probs / probs.sum()
    rng = make_rng(seed)
    outcomes = rng.choice(probs.size, size=shots, p=probs)
    width = sv.num_qubits
    return Counter(format(int(k), f"0{width}b") for k in outcomes)
