# qaoatransfer/centers.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# The six reference points of the depth-1 parameter landscape
# c1-c2 universal, c3-c4 favored by odd lightcones, c5-c6 by even ones
# Coordinates live in data/centers.json and are regenerated by calibrate_centers
# Distances are toroidal: gamma wraps at 2pi, beta at pi/2 (the mixer at
# beta = pi/2 is a global bit flip, so every energy repeats there)

import json
import logging
import math
import os
import time
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from qaoatransfer.energy import EnergyModel, default_model
from qaoatransfer.errors import ConfigError, MetricError
from qaoatransfer.graph import LightconeClass
from qaoatransfer.optimizer import OptimaSet
from qaoatransfer.simulator import QaoaParams

logger = logging.getLogger('Centers')

GAMMA_PERIOD = 2.0 * math.pi
BETA_PERIOD = math.pi / 2.0
DEFAULT_RADIUS = 0.25
MIN_SEPARATION = 0.2
ROLES = ("universal", "odd", "even")
UNASSIGNED = "unassigned"
# clustering start: the depth-1 optimum of triangle-free 3-regular graphs
CALIBRATION_ANCHOR = (math.atan(1.0 / math.sqrt(2.0)), math.pi / 8.0)


@dataclass(frozen=True)
class Center:
    name: str
    gamma: float
    beta: float
    role: str

    @property
    def params(self) -> QaoaParams:
        return QaoaParams(self.gamma, self.beta)


class CenterSet:
    """Six named centers, two per role, in c1..c6 order."""

    def __init__(self, centers: Sequence[Center], radius: float = DEFAULT_RADIUS, source: str = ""):
        self.centers = list(centers)
        self.radius = radius
        self.source = source
        self._validate()

    def _validate(self):
        if len(self.centers) != 6:
            raise ConfigError(f"Expected 6 centers, got {len(self.centers)}")
        expected_roles = ["universal", "universal", "odd", "odd", "even", "even"]
        if [c.role for c in self.centers] != expected_roles:
            raise ConfigError(f"Center roles must be {expected_roles}")
        for c in self.centers:
            if not (0.0 <= c.gamma < GAMMA_PERIOD and 0.0 <= c.beta < math.pi):
                raise ConfigError(f"Center {c.name} outside the canonical domain")
        for a in range(6):
            for b in range(a + 1, 6):
                d = toroidal_distance(self.centers[a].params, self.centers[b].params)
                if d < MIN_SEPARATION:
                    raise ConfigError(f"Centers {self.centers[a].name} and {self.centers[b].name} "
                                      f"only {d:.3f} rad apart")
        if self.radius <= 0:
            raise ConfigError(f"Classification radius must be positive, got {self.radius}")

    def __iter__(self):
        return iter(self.centers)

    def __len__(self) -> int:
        return len(self.centers)

    def __getitem__(self, k: int) -> Center:
        return self.centers[k]

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.centers]

    def by_role(self, role: str) -> List[Center]:
        return [c for c in self.centers if c.role == role]

    def to_dict(self) -> Dict:
        return {"radius": self.radius, "source": self.source,
                "centers": [asdict(c) for c in self.centers]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "CenterSet":
        try:
            centers = [Center(str(c["name"]), float(c["gamma"]), float(c["beta"]), str(c["role"]))
                       for c in data["centers"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed center calibration: {e}") from e
        return cls(centers, float(data.get("radius", DEFAULT_RADIUS)), str(data.get("source", "")))


def load_centers(path: Optional[str] = None) -> CenterSet:
    """Read a calibration file; the packaged calibration when no path is given."""
    try:
        if path is None:
            text = resources.files("qaoatransfer").joinpath("data/centers.json").read_text(encoding="utf-8")
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        return CenterSet.from_dict(json.loads(text))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read center calibration {path or '<packaged>'}: {e}") from e


def save_centers(centers: CenterSet, path: str):
    tmp_path = path + ".tmp"
    with open(tmp_path, "w", encoding="utf-8") as fh:
        json.dump(centers.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp_path, path)
    logger.info(f"[Centers] Calibration written to {path}")


def _wrap(delta: np.ndarray, period: float) -> np.ndarray:
    delta = np.mod(np.abs(delta), period)
    return np.minimum(delta, period - delta)


def toroidal_distance(a: QaoaParams, b: QaoaParams) -> float:
    dg = _wrap(np.asarray(a.gamma - b.gamma), GAMMA_PERIOD)
    db = _wrap(np.asarray(a.beta - b.beta), BETA_PERIOD)
    return float(np.hypot(dg, db))


def distance_matrix(gammas: np.ndarray, betas: np.ndarray, centers: CenterSet) -> np.ndarray:
    """(points, centers) toroidal distances."""
    cg = np.array([c.gamma for c in centers])
    cb = np.array([c.beta for c in centers])
    dg = _wrap(np.asarray(gammas)[:, None] - cg[None, :], GAMMA_PERIOD)
    db = _wrap(np.asarray(betas)[:, None] - cb[None, :], BETA_PERIOD)
    return np.hypot(dg, db)


def nearest_center(params: QaoaParams, centers: CenterSet, radius: Optional[float] = None) -> str:
    radius = centers.radius if radius is None else radius
    d = distance_matrix(np.array([params.gamma]), np.array([params.beta]), centers)[0]
    k = int(np.argmin(d))
    return centers[k].name if d[k] <= radius else UNASSIGNED


def classify_optima(o: OptimaSet, centers: CenterSet, radius: Optional[float] = None) -> Dict[str, int]:
    """Count of optima per center name plus "unassigned"; ties go to the lower center."""
    radius = centers.radius if radius is None else radius
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    counts = {name: 0 for name in centers.names}
    counts[UNASSIGNED] = 0
    if not len(o):
        return counts
    d = distance_matrix(o.gammas(), o.betas(), centers)
    nearest = np.argmin(d, axis=1)
    for row, k in enumerate(nearest):
        if d[row, k] <= radius:
            counts[centers[int(k)].name] += 1
        else:
            counts[UNASSIGNED] += 1
    return counts


def role_counts(counts: Mapping[str, int], centers: CenterSet) -> Dict[str, int]:
    """Fold per-center counts into universal / odd / even / unassigned."""
    folded = {role: 0 for role in ROLES}
    for c in centers:
        folded[c.role] += counts.get(c.name, 0)
    folded[UNASSIGNED] = counts.get(UNASSIGNED, 0)
    return folded


def _circular_mean(angles: np.ndarray, period: float) -> float:
    theta = angles * (2.0 * math.pi / period)
    mean = math.atan2(float(np.mean(np.sin(theta))), float(np.mean(np.cos(theta))))
    return float(np.mod(mean * period / (2.0 * math.pi), period))


def symmetric_images(gamma: float, beta: float) -> List[Tuple[float, float]]:
    """
    The six images of one point under the landscape symmetries, in c1..c6
    order: the point, its time reversal, then the odd-class and even-class
    shifts by pi in gamma with their reversals.
    """
    pairs = [
        (gamma, beta),
        (GAMMA_PERIOD - gamma, BETA_PERIOD - beta),
        (math.pi - gamma, beta),
        (math.pi + gamma, BETA_PERIOD - beta),
        (math.pi + gamma, beta),
        (math.pi - gamma, BETA_PERIOD - beta),
    ]
    return [(float(np.mod(g, GAMMA_PERIOD)), float(np.mod(b, BETA_PERIOD))) for g, b in pairs]


def _toroidal_kmeans(gammas: np.ndarray, betas: np.ndarray, cg: np.ndarray, cb: np.ndarray,
                     iterations: int) -> Tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations from fixed starting centers; no randomness involved."""
    k = cg.size

    def sq_distances(cg: np.ndarray, cb: np.ndarray) -> np.ndarray:
        dg = _wrap(gammas[:, None] - cg[None, :], GAMMA_PERIOD)
        db = _wrap(betas[:, None] - cb[None, :], BETA_PERIOD)
        return dg ** 2 + db ** 2

    cg, cb = cg.copy(), cb.copy()

    for _ in range(iterations):
        labels = np.argmin(sq_distances(cg, cb), axis=1)
        new_g, new_b = cg.copy(), cb.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new_g[c] = _circular_mean(gammas[members], GAMMA_PERIOD)
                new_b[c] = _circular_mean(betas[members], BETA_PERIOD)
        if np.allclose(new_g, cg) and np.allclose(new_b, cb):
            break
        cg, cb = new_g, new_b
    return cg, cb


def calibrate_centers(optima: Mapping[LightconeClass, OptimaSet], model: Optional[EnergyModel] = None,
                      iterations: int = 100, radius: float = DEFAULT_RADIUS,
                      anchor: Tuple[float, float] = CALIBRATION_ANCHOR) -> CenterSet:
    """
    Cluster the multistart optima of a class catalog into six centers and
    assign roles from the mean class energy at each center:
    the two with the best worst-case (odd vs even) energy are universal,
    of the rest the two leaning most towards odd classes are odd-favored.
    Clustering starts from the symmetric images of `anchor`, so the same
    optima always give the same centers.
    """
    model = model or default_model()
    start_time = time.time()
    gammas = np.concatenate([o.gammas() for o in optima.values()])
    betas = np.mod(np.concatenate([o.betas() for o in optima.values()]), BETA_PERIOD)
    if gammas.size < 6:
        raise MetricError(f"Need at least 6 optima to calibrate, got {gammas.size}")
    start = np.array(symmetric_images(*anchor))
    cg, cb = _toroidal_kmeans(gammas, betas, start[:, 0], start[:, 1], iterations)

    odd = [c for c in optima if c.parity_kind == "odd"]
    even = [c for c in optima if c.parity_kind == "even"]
    if not odd or not even:
        raise MetricError("Calibration needs both odd and even lightcone classes")

    def mean_energy(classes: List[LightconeClass], k: int) -> float:
        return float(np.mean([model.class_energy(c, QaoaParams(float(cg[k]), float(cb[k]))) for c in classes]))

    odd_score = np.array([mean_energy(odd, k) for k in range(6)])
    even_score = np.array([mean_energy(even, k) for k in range(6)])
    remaining = list(range(6))
    universal = sorted(remaining, key=lambda k: -min(odd_score[k], even_score[k]))[:2]
    remaining = [k for k in remaining if k not in universal]
    odd_favored = sorted(remaining, key=lambda k: -(odd_score[k] - even_score[k]))[:2]
    even_favored = [k for k in remaining if k not in odd_favored]

    centers: List[Center] = []
    for role, group in (("universal", universal), ("odd", odd_favored), ("even", even_favored)):
        for k in sorted(group, key=lambda k: (cb[k], cg[k])):
            centers.append(Center(f"c{len(centers) + 1}", float(cg[k]), float(cb[k]), role))

    logger.info(f"[Centers] Calibrated 6 centers from {gammas.size} optima",
                extra={"classes": len(optima), "duration_seconds": round(time.time() - start_time, 3)})
    return CenterSet(centers, radius, source=f"calibrate_centers(classes={len(optima)}, optima={gammas.size})")
