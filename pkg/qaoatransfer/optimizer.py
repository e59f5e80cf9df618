# qaoatransfer/optimizer.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Multistart RMSprop ascent over depth-1 QAOA parameters
# Protocol defaults: 20 restarts x 200 iterations, learning rate 0.002
# Restarts still short of the gradient tolerance after the protocol steps
# keep stepping up to max_iterations (default 10 x iterations)
# Each restart returns the best point visited along its trajectory

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qaoatransfer.energy import EnergyModel, Subject, default_model
from qaoatransfer.errors import MetricError
from qaoatransfer.graph import Graph, LightconeClass, graph_hash
from qaoatransfer.seeding import spawn_rngs
from qaoatransfer.simulator import QaoaParams

logger = logging.getLogger('Optimizer')

CONVERGENCE_GRADIENT_NORM = 1e-2


class OptimizerConfig(BaseModel):
    """Multistart settings; recorded verbatim in every OptimaSet."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    restarts: int = Field(default=20, ge=1)
    iterations: int = Field(default=200, ge=0)
    learning_rate: float = Field(default=0.002, gt=0)
    rms_decay: float = Field(default=0.99, gt=0, lt=1)
    rms_epsilon: float = Field(default=1e-8, gt=0)
    max_iterations: Optional[int] = Field(default=None, ge=0)
    gradient_tolerance: float = Field(default=CONVERGENCE_GRADIENT_NORM, gt=0)
    seed: int = 0

    @property
    def step_limit(self) -> int:
        """Hard cap on steps per restart; never below `iterations`."""
        cap = 10 * self.iterations if self.max_iterations is None else self.max_iterations
        return max(self.iterations, cap)


@dataclass(frozen=True)
class Optimum:
    gamma: float
    beta: float
    energy: float
    converged: bool

    @property
    def params(self) -> QaoaParams:
        return QaoaParams(self.gamma, self.beta)


class OptimaSet:
    """Multistart optima of one subject in restart order, plus the index of the best."""

    def __init__(self, subject: str, config: OptimizerConfig, optima: List[Optimum]):
        self.subject = subject
        self.config = config
        self.optima = list(optima)
        self.best_index = _best_index(self.optima) if self.optima else -1

    def __len__(self) -> int:
        return len(self.optima)

    def energies(self) -> np.ndarray:
        return np.array([o.energy for o in self.optima], dtype=np.float64)

    def gammas(self) -> np.ndarray:
        return np.array([o.gamma for o in self.optima], dtype=np.float64)

    def betas(self) -> np.ndarray:
        return np.array([o.beta for o in self.optima], dtype=np.float64)

    def best(self) -> Tuple[QaoaParams, float]:
        return best(self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subject": self.subject,
            "config": self.config.model_dump(),
            "optima": [asdict(o) for o in self.optima],
            "best_index": self.best_index,
        }

    def to_json(self) -> str:
        # float repr round-trips exactly (17 significant digits at most)
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OptimaSet":
        optima = [Optimum(float(o["gamma"]), float(o["beta"]), float(o["energy"]), bool(o["converged"]))
                  for o in data["optima"]]
        return cls(data["subject"], OptimizerConfig(**data["config"]), optima)

    @classmethod
    def from_json(cls, text: str) -> "OptimaSet":
        return cls.from_dict(json.loads(text))


def _best_index(optima: List[Optimum]) -> int:
    # ties -> lowest index
    return max(range(len(optima)), key=lambda k: (optima[k].energy, -k))


def best(o: OptimaSet) -> Tuple[QaoaParams, float]:
    if not o.optima:
        raise MetricError("OptimaSet is empty")
    entry = o.optima[o.best_index]
    return entry.params, entry.energy


def subject_label(subject: Subject) -> str:
    if isinstance(subject, Graph):
        return graph_hash(subject)
    return LightconeClass.of(*subject).label


def _canonical(gamma: float, beta: float) -> Tuple[float, float]:
    params = QaoaParams(gamma, beta).canonical()
    return params.gamma, params.beta


def _ascend(model: EnergyModel, cen, cfg: OptimizerConfig, rng: np.random.Generator) -> Optimum:
    x = np.array([rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.0, math.pi)])
    v = np.zeros(2)
    best_energy = -math.inf
    best_point = x.copy()
    best_grad_norm = math.inf
    limit = cfg.step_limit

    t = 0
    while True:
        value, grad = model.census_value_and_gradient(cen, QaoaParams(float(x[0]), float(x[1])))
        grad = np.asarray(grad)
        if value > best_energy:
            best_energy = value
            best_point = x.copy()
            best_grad_norm = float(np.linalg.norm(grad))
        # protocol steps always run; the extension stops at the first converged best point
        if t >= cfg.iterations and (best_grad_norm <= cfg.gradient_tolerance or t >= limit):
            break
        v = cfg.rms_decay * v + (1.0 - cfg.rms_decay) * grad ** 2
        x = x + cfg.learning_rate * grad / (np.sqrt(v) + cfg.rms_epsilon)
        t += 1

    gamma, beta = _canonical(float(best_point[0]), float(best_point[1]))
    return Optimum(gamma, beta, float(best_energy), best_grad_norm <= cfg.gradient_tolerance)


def optimize(subject: Subject, cfg: Optional[OptimizerConfig] = None,
             model: Optional[EnergyModel] = None, workers: int = 1) -> OptimaSet:
    """
    Run cfg.restarts independent RMSprop ascents from uniform initial points.
    Restart k draws from stream k of cfg.seed, so results do not depend on
    `workers`.
    """
    cfg = cfg or OptimizerConfig()
    model = model or default_model()
    cen = model.subject_census(subject)
    label = subject_label(subject)
    rngs = spawn_rngs(cfg.seed, cfg.restarts)
    start_time = time.time()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            optima = list(pool.map(lambda rng: _ascend(model, cen, cfg, rng), rngs))
    else:
        optima = [_ascend(model, cen, cfg, rng) for rng in rngs]

    result = OptimaSet(label, cfg, optima)
    logger.debug(f"[Optimizer] {label[:16]}: best energy {optima[result.best_index].energy:.6f}",
                 extra={"restarts": cfg.restarts, "converged": sum(o.converged for o in optima),
                        "duration_seconds": round(time.time() - start_time, 3)})
    return result
