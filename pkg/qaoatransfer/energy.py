# qaoatransfer/energy.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Depth-1 QAOA MaxCut energies by lightcone decomposition
# E(G) = sum over classes c of n_G(c) * E_c, where E_c is the central-edge
# expectation of the canonical realization of c
# Backends: statevector oracle, or closed form validated against the oracle
# Gradients use the equidistant-frequency parameter-shift rule per class

import csv
import io
import logging
import math
import threading
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from qaoatransfer import simulator
from qaoatransfer.errors import CapacityError
from qaoatransfer.graph import Graph, LightconeCensus, LightconeClass, census, graph_hash, realize_lightcone
from qaoatransfer.simulator import DEFAULT_QUBIT_CAP, QaoaParams

logger = logging.getLogger('QaoaEnergy')

Subject = Union[Graph, LightconeClass]

BACKENDS = ("closed_form", "statevector")
QUANTUM_DIGITS = 12
VALIDATION_TOLERANCE = 1e-10
# Sample points for closed-form validation; chosen off every symmetry line
VALIDATION_POINTS = ((0.37, 0.21), (1.13, 0.74), (2.51, 2.93), (4.02, 1.31), (5.87, 0.47))


def closed_form_energy(i, j, f, gamma, beta):
    """
    Central-edge expectation for endpoint degrees (i, j) and f shared
    neighbors. Broadcasts over numpy arrays.
    """
    cg = np.cos(gamma)
    d = np.asarray(i) - 1
    e = np.asarray(j) - 1
    f = np.asarray(f)
    first = 0.25 * np.sin(4.0 * beta) * np.sin(gamma) * (cg ** d + cg ** e)
    second = 0.25 * np.sin(2.0 * beta) ** 2 * cg ** (d + e - 2 * f) * (1.0 - np.cos(2.0 * gamma) ** f)
    return 0.5 + first - second


class ClassEnergyCache:
    """
    (class, quantized params) -> energy contribution.
    Concurrent reads, inserts under a lock; values are deterministic so
    last-writer-wins is harmless.
    """

    def __init__(self):
        self._values: Dict[Tuple[LightconeClass, float, float], float] = {}
        self.lock = threading.RLock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(c: LightconeClass, params: QaoaParams) -> Tuple[LightconeClass, float, float]:
        canonical = params.canonical()
        return (c, round(canonical.gamma, QUANTUM_DIGITS), round(canonical.beta, QUANTUM_DIGITS))

    def get(self, c: LightconeClass, params: QaoaParams) -> Optional[float]:
        value = self._values.get(self.key(c, params))
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, c: LightconeClass, params: QaoaParams, value: float):
        with self.lock:
            self._values[self.key(c, params)] = value

    def clear(self):
        with self.lock:
            self._values.clear()
            self.hits = self.misses = 0

    def __len__(self) -> int:
        return len(self._values)


class _OracleLightcone:
    """Canonical realization with its cut diagonal and central-edge term precomputed."""

    def __init__(self, c: LightconeClass, qubit_cap: int):
        self.graph = realize_lightcone(c)
        if self.graph.node_count > qubit_cap:
            raise CapacityError(f"Lightcone {c.label} needs {self.graph.node_count} qubits (cap {qubit_cap})")
        self.qubit_cap = qubit_cap
        self.diagonal = simulator.cut_values(self.graph)
        index = np.arange(2 ** self.graph.node_count, dtype=np.int64)
        self.central = (((index >> 0) ^ (index >> 1)) & 1).astype(np.float64)

    def energy(self, gamma: float, beta: float) -> float:
        sv = simulator.prepare_state(self.graph, QaoaParams(gamma, beta), self.qubit_cap, diagonal=self.diagonal)
        return float(np.dot(sv.probabilities(), self.central))


@dataclass
class EnergyLandscape:
    """
    Energies on a uniform periodic grid.
    values[r, k] is the energy at (beta_grid[r], gamma_grid[k]).
    """
    gamma_grid: np.ndarray
    beta_grid: np.ndarray
    values: np.ndarray
    subject: str
    upper_bound: float = 1.0

    def argmax(self) -> QaoaParams:
        r, k = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return QaoaParams(float(self.gamma_grid[k]), float(self.beta_grid[r]))

    def local_maxima(self) -> List[Tuple[QaoaParams, float]]:
        """Grid points not below any of their 8 periodic neighbors, best first."""
        v = self.values
        is_max = np.ones(v.shape, dtype=bool)
        for dr in (-1, 0, 1):
            for dk in (-1, 0, 1):
                if dr or dk:
                    is_max &= v >= np.roll(np.roll(v, dr, axis=0), dk, axis=1)
        points = [
            (QaoaParams(float(self.gamma_grid[k]), float(self.beta_grid[r])), float(v[r, k]))
            for r, k in zip(*np.nonzero(is_max))
        ]
        return sorted(points, key=lambda item: -item[1])

    def to_csv(self) -> str:
        """Header "beta,gamma,energy"; beta-major, gamma-minor."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["beta", "gamma", "energy"])
        for r, beta in enumerate(self.beta_grid):
            for k, gamma in enumerate(self.gamma_grid):
                writer.writerow([repr(float(beta)), repr(float(gamma)), repr(float(self.values[r, k]))])
        return out.getvalue()


def parameter_grid(resolution: Union[int, Tuple[int, int]]) -> Tuple[np.ndarray, np.ndarray]:
    """(gamma_grid over [0, 2pi), beta_grid over [0, pi)); left-inclusive, uniform."""
    if isinstance(resolution, int):
        res_gamma = res_beta = resolution
    else:
        res_gamma, res_beta = resolution
    if res_gamma < 2 or res_beta < 2:
        raise ValueError(f"Landscape resolution must be >= 2 per axis, got {resolution}")
    gamma_grid = 2.0 * math.pi * np.arange(res_gamma) / res_gamma
    beta_grid = math.pi * np.arange(res_beta) / res_beta
    return gamma_grid, beta_grid


def _shift_rule(degree: int) -> Tuple[np.ndarray, np.ndarray]:
    """Shifts and weights of the 2R-term rule exact for trig polynomials of degree <= R."""
    mu = np.arange(1, 2 * degree + 1)
    shifts = (2 * mu - 1) * math.pi / (2 * degree)
    weights = (-1.0) ** (mu - 1) / (4 * degree * np.sin(shifts / 2) ** 2)
    return shifts, weights


class EnergyModel:
    """
    Lightcone energy evaluator.
    - backend="closed_form": vectorized formula, each class checked against
      the oracle on first use; a failing class falls back to the oracle
    - backend="statevector": oracle only
    """

    def __init__(self, backend: str = "closed_form", cache: Optional[ClassEnergyCache] = None,
                 qubit_cap: int = DEFAULT_QUBIT_CAP):
        if backend not in BACKENDS:
            raise ValueError(f"Unknown energy backend: {backend}")
        self.backend = backend
        self.cache = cache if cache is not None else ClassEnergyCache()
        self.qubit_cap = qubit_cap
        self._oracles: Dict[LightconeClass, _OracleLightcone] = {}
        self._closed_ok: Dict[LightconeClass, bool] = {}
        self.lock = threading.RLock()

    # Per-class plumbing

    def _oracle(self, c: LightconeClass) -> _OracleLightcone:
        oracle = self._oracles.get(c)
        if oracle is None:
            oracle = _OracleLightcone(c, self.qubit_cap)
            with self.lock:
                self._oracles[c] = oracle
        return oracle

    def uses_closed_form(self, c: LightconeClass) -> bool:
        if self.backend != "closed_form":
            return False
        ok = self._closed_ok.get(c)
        if ok is None:
            ok = self._validate_class(c)
            with self.lock:
                self._closed_ok[c] = ok
        return ok

    def _validate_class(self, c: LightconeClass) -> bool:
        try:
            oracle = self._oracle(c)
        except CapacityError:
            logger.warning(f"[QaoaEnergy] {c.label} beyond oracle cap; closed form used unvalidated")
            return True
        worst = 0.0
        for gamma, beta in VALIDATION_POINTS:
            expected = oracle.energy(gamma, beta)
            actual = float(closed_form_energy(c.i, c.j, c.f, gamma, beta))
            worst = max(worst, abs(expected - actual))
        if worst > VALIDATION_TOLERANCE:
            logger.error(f"[QaoaEnergy] Closed form disagrees with oracle for {c.label} "
                         f"(max error {worst:.3e}); using oracle")
            return False
        logger.debug(f"[QaoaEnergy] Closed form validated for {c.label} (max error {worst:.1e})")
        return True

    def _class_values(self, c: LightconeClass, gammas: np.ndarray, betas: np.ndarray) -> np.ndarray:
        if self.uses_closed_form(c):
            return np.asarray(closed_form_energy(c.i, c.j, c.f, gammas, betas), dtype=np.float64)
        oracle = self._oracle(c)
        flat = [oracle.energy(float(g), float(b)) for g, b in zip(gammas.ravel(), betas.ravel())]
        return np.asarray(flat, dtype=np.float64).reshape(gammas.shape)

    # Energies

    def class_energy(self, c: LightconeClass, params: QaoaParams, use_cache: bool = True) -> float:
        c = LightconeClass.of(*c)
        if use_cache:
            cached = self.cache.get(c, params)
            if cached is not None:
                return cached
        value = float(self._class_values(c, np.array([params.gamma]), np.array([params.beta]))[0])
        if use_cache:
            self.cache.put(c, params, value)
        return value

    def class_energy_batch(self, c: LightconeClass, gammas, betas) -> np.ndarray:
        """Uncached evaluation over parameter arrays (optimizer path)."""
        gammas, betas = np.broadcast_arrays(np.asarray(gammas, dtype=np.float64),
                                            np.asarray(betas, dtype=np.float64))
        return self._class_values(LightconeClass.of(*c), gammas, betas)

    def census_energy_batch(self, cen: LightconeCensus, gammas, betas) -> np.ndarray:
        gammas, betas = np.broadcast_arrays(np.asarray(gammas, dtype=np.float64),
                                            np.asarray(betas, dtype=np.float64))
        classes = cen.classes()
        if classes and all(self.uses_closed_form(c) for c in classes):
            i = np.array([c.i for c in classes])
            j = np.array([c.j for c in classes])
            f = np.array([c.f for c in classes])
            w = np.array([n for _, n in cen.items()], dtype=np.float64)
            per_class = closed_form_energy(i, j, f, gammas[..., None], betas[..., None])
            return per_class @ w
        total = np.zeros(gammas.shape, dtype=np.float64)
        for c, n in cen.items():
            total += n * self._class_values(c, gammas, betas)
        return total

    def graph_energy(self, g: Graph, params: QaoaParams, use_cache: bool = True) -> float:
        cen = census(g)
        if not use_cache:
            return float(self.census_energy_batch(cen, params.gamma, params.beta))
        return float(sum(n * self.class_energy(c, params) for c, n in cen.items()))

    def graph_energy_batch(self, g: Graph, gammas, betas) -> np.ndarray:
        return self.census_energy_batch(census(g), gammas, betas)

    def subject_energy(self, subject: Subject, params: QaoaParams, use_cache: bool = True) -> float:
        if isinstance(subject, Graph):
            return self.graph_energy(subject, params, use_cache)
        return self.class_energy(subject, params, use_cache)

    def subject_energy_batch(self, subject: Subject, gammas, betas) -> np.ndarray:
        if isinstance(subject, Graph):
            return self.graph_energy_batch(subject, gammas, betas)
        return self.class_energy_batch(subject, gammas, betas)

    # Gradients

    def census_value_and_gradient(self, cen: LightconeCensus,
                                  params: QaoaParams) -> Tuple[float, Tuple[float, float]]:
        """Energy and exact gradient from one batched evaluation."""
        if not len(cen):
            return 0.0, (0.0, 0.0)
        degree = max(c.edge_count for c in cen.classes())
        g_shifts, g_weights = _shift_rule(degree)
        # beta enters through 2*beta with degree 2
        b_shifts, b_weights = _shift_rule(2)
        gammas = np.concatenate([[params.gamma], params.gamma + g_shifts, np.full(b_shifts.size, params.gamma)])
        betas = np.concatenate([[params.beta], np.full(g_shifts.size, params.beta), params.beta + b_shifts / 2.0])
        values = self.census_energy_batch(cen, gammas, betas)
        split = 1 + g_shifts.size
        d_gamma = float(np.dot(g_weights, values[1:split]))
        d_beta = 2.0 * float(np.dot(b_weights, values[split:]))
        return float(values[0]), (d_gamma, d_beta)

    def census_gradient(self, cen: LightconeCensus, params: QaoaParams) -> Tuple[float, float]:
        return self.census_value_and_gradient(cen, params)[1]

    def subject_census(self, subject: Subject) -> LightconeCensus:
        if isinstance(subject, Graph):
            return census(subject)
        return LightconeCensus({LightconeClass.of(*subject): 1})

    def gradient(self, subject: Subject, params: QaoaParams) -> Tuple[float, float]:
        return self.census_gradient(self.subject_census(subject), params)

    # Landscapes

    def landscape(self, subject: Subject, resolution: Union[int, Tuple[int, int]] = 64) -> EnergyLandscape:
        start_time = time.time()
        gamma_grid, beta_grid = parameter_grid(resolution)
        if isinstance(subject, Graph):
            cen = census(subject)
            label = graph_hash(subject)
            upper = float(subject.num_edges)
        else:
            subject = LightconeClass.of(*subject)
            cen = LightconeCensus({subject: 1})
            label = subject.label
            upper = 1.0

        values = np.zeros((beta_grid.size, gamma_grid.size), dtype=np.float64)
        for c, n in cen.items():
            grid = np.empty_like(values)
            for r, beta in enumerate(beta_grid):
                for k, gamma in enumerate(gamma_grid):
                    grid[r, k] = self.class_energy(c, QaoaParams(float(gamma), float(beta)))
            values += n * grid

        logger.info(f"[QaoaEnergy] Landscape {label[:16]} {values.shape[0]}x{values.shape[1]} done",
                    extra={"classes": len(cen), "duration_seconds": round(time.time() - start_time, 3)})
        return EnergyLandscape(gamma_grid, beta_grid, values, label, upper)


_default_model: Optional[EnergyModel] = None
_default_lock = threading.Lock()


def default_model() -> EnergyModel:
    global _default_model
    with _default_lock:
        if _default_model is None:
            _default_model = EnergyModel()
        return _default_model


def class_energy(c: LightconeClass, params: QaoaParams) -> float:
    return default_model().class_energy(c, params)


def graph_energy(g: Graph, params: QaoaParams) -> float:
    return default_model().graph_energy(g, params)


def gradient(subject: Subject, params: QaoaParams) -> Tuple[float, float]:
    return default_model().gradient(subject, params)


def landscape(subject: Subject, resolution: Union[int, Tuple[int, int]] = 64) -> EnergyLandscape:
    return default_model().landscape(subject, resolution)
