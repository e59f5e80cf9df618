# qaoatransfer/metrics.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Transferability and similarity metrics
#   T(D, A)   mean over donor optima of A's energy there, over A's own best
#   MT(G)     census-weighted T among a graph's distinct lightcone classes
#   SS(D, A)  census-weighted class-map T, normalized by |E_D| |E_A|
#   PS(D, A)  1 - 0.29 |parity(D) - parity(A)|
#   SPS(D, A) acceptor ratios at the six centers, weighted by the donor's
#             predicted optima distribution
# plus the MSE / Pearson comparison of each metric against true T

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from qaoatransfer.centers import CenterSet
from qaoatransfer.energy import EnergyModel, Subject, default_model
from qaoatransfer.errors import MetricError
from qaoatransfer.graph import Graph, LightconeClass, census, parity
from qaoatransfer.maxcut import CutResult
from qaoatransfer.optimizer import OptimaSet, OptimizerConfig, optimize
from qaoatransfer.seeding import derive_seed

logger = logging.getLogger('TransferMetrics')

PARITY_PENALTY = 0.29
AR_THRESHOLD = 0.75
AR_SPAN = 0.25
OPTIMA_TOTAL = 20
METRICS = ("ss", "ps", "sps")


@dataclass(frozen=True)
class TransferRecord:
    donor_id: str
    acceptor_id: str
    coefficient: float
    ratios: Tuple[float, ...]
    # donor's best optimum only; diagnostic beside T
    best_only: float
    direction: str = "donor->acceptor"

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["ratios"] = list(self.ratios)
        return data


def _acceptor_best(acceptor: OptimaSet) -> float:
    if not len(acceptor):
        raise MetricError(f"Acceptor {acceptor.subject} has no optima")
    best_energy = acceptor.optima[acceptor.best_index].energy
    if best_energy <= 0:
        raise MetricError(f"Acceptor {acceptor.subject} best energy {best_energy} is not positive")
    return best_energy


def transfer_coefficient(donor: OptimaSet, acceptor: OptimaSet, acceptor_subject: Subject,
                         model: Optional[EnergyModel] = None, clamp: bool = False) -> TransferRecord:
    """
    Evaluate the acceptor at every donor optimum and normalize by the
    acceptor's multistart best. Ratios above 1 are kept unless `clamp`.
    """
    model = model or default_model()
    if not len(donor):
        raise MetricError(f"Donor {donor.subject} has no optima")
    denominator = _acceptor_best(acceptor)
    energies = model.subject_energy_batch(acceptor_subject, donor.gammas(), donor.betas())
    ratios = energies / denominator
    if clamp:
        ratios = np.minimum(ratios, 1.0)
    return TransferRecord(
        donor_id=donor.subject,
        acceptor_id=acceptor.subject,
        coefficient=float(np.mean(ratios)),
        ratios=tuple(float(r) for r in ratios),
        best_only=float(ratios[donor.best_index]),
    )


class TransferMap:
    """Directional T matrix over a class catalog; row = donor, column = acceptor."""

    def __init__(self, classes: Sequence[LightconeClass], matrix: np.ndarray,
                 optima: Mapping[LightconeClass, OptimaSet]):
        self.classes = [LightconeClass.of(*c) for c in classes]
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.optima = dict(optima)
        self._index = {c: k for k, c in enumerate(self.classes)}
        if self.matrix.shape != (len(self.classes), len(self.classes)):
            raise ValueError(f"Matrix shape {self.matrix.shape} does not match {len(self.classes)} classes")

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.classes]

    def index(self, c: LightconeClass) -> int:
        try:
            return self._index[LightconeClass.of(*c)]
        except KeyError:
            raise MetricError(f"Class {c} is not in the transfer map") from None

    def __contains__(self, c) -> bool:
        return LightconeClass.of(*c) in self._index

    def coefficient(self, donor: LightconeClass, acceptor: LightconeClass) -> float:
        return float(self.matrix[self.index(donor), self.index(acceptor)])

    def asymmetry(self) -> float:
        """Largest |T(d, a) - T(a, d)|."""
        return float(np.max(np.abs(self.matrix - self.matrix.T))) if len(self) else 0.0

    def block_mean(self, donor_kind: str, acceptor_kind: str, include_diagonal: bool = False) -> float:
        rows = [k for k, c in enumerate(self.classes) if c.parity_kind == donor_kind]
        cols = [k for k, c in enumerate(self.classes) if c.parity_kind == acceptor_kind]
        values = [self.matrix[r, k] for r in rows for k in cols if include_diagonal or r != k]
        if not values:
            raise MetricError(f"No entries in the {donor_kind}->{acceptor_kind} block")
        return float(np.mean(values))

    def to_csv(self) -> str:
        # class labels are written bare, commas included
        lines = [",".join(["donor\\acceptor"] + self.labels)]
        for c, row in zip(self.classes, self.matrix):
            lines.append(",".join([c.label] + [repr(float(v)) for v in row]))
        return "\n".join(lines) + "\n"

    def optima_jsonl(self) -> str:
        return "".join(self.optima[c].to_json() + "\n" for c in self.classes)


def class_config(cfg: OptimizerConfig, c: LightconeClass) -> OptimizerConfig:
    return cfg.model_copy(update={"seed": derive_seed(cfg.seed, c.i, c.j, c.f)})


def optimize_all(subjects: Sequence[Subject], configs: Sequence[OptimizerConfig],
                 model: Optional[EnergyModel] = None, workers: int = 1) -> List[OptimaSet]:
    """Optimize each subject with its own config; result order follows `subjects`."""
    model = model or default_model()
    jobs = list(zip(subjects, configs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: optimize(job[0], job[1], model), jobs))
    return [optimize(s, c, model) for s, c in jobs]


def transfer_map(classes: Sequence[LightconeClass], cfg: Optional[OptimizerConfig] = None,
                 model: Optional[EnergyModel] = None, workers: int = 1,
                 optima: Optional[Mapping[LightconeClass, OptimaSet]] = None) -> TransferMap:
    """
    Optimize every class (seed derived from cfg.seed and the class) unless
    `optima` are supplied, then fill the full directional matrix.
    """
    cfg = cfg or OptimizerConfig()
    model = model or default_model()
    classes = [LightconeClass.of(*c) for c in classes]
    start_time = time.time()

    if optima is None:
        sets = optimize_all(classes, [class_config(cfg, c) for c in classes], model, workers)
        optima = dict(zip(classes, sets))

    # every donor optimum stacked once; one batch per acceptor
    gammas = np.concatenate([optima[c].gammas() for c in classes])
    betas = np.concatenate([optima[c].betas() for c in classes])
    bounds = np.cumsum([0] + [len(optima[c]) for c in classes])
    matrix = np.zeros((len(classes), len(classes)), dtype=np.float64)
    for col, acceptor in enumerate(classes):
        values = model.class_energy_batch(acceptor, gammas, betas) / _acceptor_best(optima[acceptor])
        for row in range(len(classes)):
            matrix[row, col] = float(np.mean(values[bounds[row]:bounds[row + 1]]))

    logger.info(f"[TransferMetrics] Transfer map {len(classes)}x{len(classes)} done",
                extra={"classes": len(classes), "duration_seconds": round(time.time() - start_time, 3)})
    return TransferMap(classes, matrix, optima)


def pairwise_transfer(subjects: Sequence[Subject], optima: Sequence[OptimaSet],
                      model: Optional[EnergyModel] = None, clamp: bool = False) -> np.ndarray:
    """
    T for every ordered pair of subjects (diagonal included).
    Same values as transfer_coefficient pair by pair, one batch per acceptor.
    """
    model = model or default_model()
    n = len(subjects)
    gammas = np.concatenate([o.gammas() for o in optima])
    betas = np.concatenate([o.betas() for o in optima])
    bounds = np.cumsum([0] + [len(o) for o in optima])
    matrix = np.zeros((n, n), dtype=np.float64)
    for col in range(n):
        ratios = model.subject_energy_batch(subjects[col], gammas, betas) / _acceptor_best(optima[col])
        if clamp:
            ratios = np.minimum(ratios, 1.0)
        for row in range(n):
            matrix[row, col] = float(np.mean(ratios[bounds[row]:bounds[row + 1]]))
    return matrix


def mutual_transferability(g: Graph, tmap: TransferMap) -> float:
    cen = census(g)
    classes = cen.classes()
    weighted = 0.0
    total = 0.0
    for d in classes:
        for a in classes:
            if d == a:
                continue
            w = cen[d] * cen[a]
            weighted += w * tmap.coefficient(d, a)
            total += w
    if total == 0:
        return 1.0
    return weighted / total


def subgraph_similarity(d: Graph, a: Graph, tmap: TransferMap) -> float:
    if not d.num_edges or not a.num_edges:
        raise MetricError("Subgraph similarity needs two graphs with edges")
    donor_census, acceptor_census = census(d), census(a)
    total = 0.0
    for dc, dn in donor_census.items():
        for ac, an in acceptor_census.items():
            total += dn * an * tmap.coefficient(dc, ac)
    return total / (d.num_edges * a.num_edges)


def parity_similarity(d: Graph, a: Graph) -> float:
    return parity_similarity_values(parity(d), parity(a))


def parity_similarity_values(parity_d: float, parity_a: float) -> float:
    return 1.0 - PARITY_PENALTY * abs(parity_d - parity_a)


def optima_distribution(ars: Sequence[float], relative: bool = False) -> Tuple[float, float, float]:
    """
    Predicted split of 20 optima over the universal, odd and even center pairs
    from a graph's approximation ratios at c1..c6.

    relative=True divides every ratio by the better universal ratio first, so
    the 0.75 threshold reads "c3 (or c5) keeps 75% of what c1/c2 reach".
    """
    if len(ars) != 6:
        raise ValueError(f"Expected 6 approximation ratios, got {len(ars)}")
    if relative:
        universal = max(ars[0], ars[1])
        if universal <= 0:
            raise MetricError("Relative SPS needs a positive universal ratio")
        ars = [r / universal for r in ars]
    half = OPTIMA_TOTAL / 2
    n12, n34, n56 = half, 0.0, 0.0
    if ars[2] > AR_THRESHOLD:
        n34 = min(half, half * (ars[2] - AR_THRESHOLD) / AR_SPAN)
        n12 += half - n34
    elif ars[4] > AR_THRESHOLD:
        n56 = min(half, half * (ars[4] - AR_THRESHOLD) / AR_SPAN)
        n12 += half - n56
    else:
        n12 += half
    return (n12, n34, n56)


def center_ratios(g: Graph, centers: CenterSet, cut: CutResult,
                  model: Optional[EnergyModel] = None) -> np.ndarray:
    """Approximation ratio of g at each center, in c1..c6 order."""
    model = model or default_model()
    if cut.value <= 0:
        raise MetricError("Center ratios need a positive cut value")
    gammas = np.array([c.gamma for c in centers])
    betas = np.array([c.beta for c in centers])
    return model.graph_energy_batch(g, gammas, betas) / cut.value


def sps_from_ratios(donor_ars: Sequence[float], acceptor_ars: Sequence[float], relative: bool = False) -> float:
    n12, n34, n56 = optima_distribution(donor_ars, relative)
    weights = np.array([n12, n12, n34, n34, n56, n56]) / 2.0
    return float(np.dot(weights, np.asarray(acceptor_ars, dtype=np.float64)) / OPTIMA_TOTAL)


def sps(d: Graph, a: Graph, centers: CenterSet, exact_cuts: Tuple[CutResult, CutResult],
        model: Optional[EnergyModel] = None, relative: bool = False) -> float:
    cut_d, cut_a = exact_cuts
    return sps_from_ratios(center_ratios(d, centers, cut_d, model), center_ratios(a, centers, cut_a, model), relative)


@dataclass(frozen=True)
class SimilarityRecord:
    donor_id: str
    acceptor_id: str
    ss: float
    ps: float
    sps: float
    true_t: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


class MetricStats(NamedTuple):
    mse: float
    pearson: float


def compare(metric: Sequence[float], truth: Sequence[float]) -> MetricStats:
    metric = np.asarray(metric, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if metric.shape != truth.shape or metric.size < 2:
        raise MetricError(f"Need at least 2 paired values, got {metric.size} and {truth.size}")
    if np.std(metric) == 0 or np.std(truth) == 0:
        raise MetricError("Pearson correlation undefined for constant input")
    mse = float(np.mean((metric - truth) ** 2))
    return MetricStats(mse, float(stats.pearsonr(metric, truth)[0]))


def metric_stats(records: Sequence[SimilarityRecord]) -> Dict[str, MetricStats]:
    if len(records) < 2:
        raise MetricError(f"Need at least 2 similarity records, got {len(records)}")
    truth = [r.true_t for r in records]
    return {name: compare([getattr(r, name) for r in records], truth) for name in METRICS}


def mean_signed_error(records: Sequence[SimilarityRecord], name: str = "ss") -> float:
    return float(np.mean([getattr(r, name) - r.true_t for r in records]))


@dataclass
class ParityHeatmap:
    """Mean T per (donor parity level, acceptor parity level)."""
    levels: List[float]
    values: np.ndarray
    pair_counts: Optional[np.ndarray] = None

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["donor_parity\\acceptor_parity"] + [f"{p:.2f}" for p in self.levels])
        for p, row in zip(self.levels, self.values):
            writer.writerow([f"{p:.2f}"] + [repr(float(v)) for v in row])
        return out.getvalue()


def parity_heatmap(parities: Sequence[float], matrix: np.ndarray, clamp: bool = False) -> ParityHeatmap:
    """Average pairwise T over graph pairs grouped by parity level; self pairs excluded."""
    parities = np.round(np.asarray(parities, dtype=np.float64), 6)
    matrix = np.minimum(matrix, 1.0) if clamp else np.asarray(matrix)
    levels = sorted(set(parities.tolist()))
    values = np.full((len(levels), len(levels)), np.nan)
    counts = np.zeros((len(levels), len(levels)), dtype=np.int64)
    for r, pd in enumerate(levels):
        rows = np.nonzero(parities == pd)[0]
        for k, pa in enumerate(levels):
            cols = np.nonzero(parities == pa)[0]
            cells = [matrix[i, j] for i in rows for j in cols if i != j]
            if cells:
                values[r, k] = float(np.mean(cells))
                counts[r, k] = len(cells)
    return ParityHeatmap(levels, values, counts)


def parity_block_means(parities: Sequence[float], matrix: np.ndarray,
                       low: float = 0.2, high: float = 0.8) -> Tuple[float, float]:
    """
    (same-parity mean, cross-parity mean) over pairs where both graphs are
    nearly all-odd (parity <= low) or nearly all-even (parity >= high).
    """
    parities = np.asarray(parities, dtype=np.float64)
    odd = parities <= low
    even = parities >= high
    same, cross = [], []
    n = len(parities)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if (odd[i] and odd[j]) or (even[i] and even[j]):
                same.append(matrix[i, j])
            elif (odd[i] and even[j]) or (even[i] and odd[j]):
                cross.append(matrix[i, j])
    if not same or not cross:
        raise MetricError("Parity blocks need graphs at both parity extremes")
    return float(np.mean(same)), float(np.mean(cross))
