# qaoatransfer/experiments.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Experiment runners behind the command-line subcommands
# Every runner:
#   - derives all randomness from the master seed
#   - fans independent work out over a thread pool, results kept in input order
#   - caches multistart optima in the result cache (when configured)
#   - writes artifacts atomically and records them in the run manifest

import functools
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from qaoatransfer import __version__
from qaoatransfer.centers import (
    CenterSet, calibrate_centers, classify_optima, load_centers, role_counts, save_centers,
)
from qaoatransfer.config import ExperimentConfig, GraphGenConfig, config_hash
from qaoatransfer.energy import EnergyLandscape, EnergyModel, Subject
from qaoatransfer.errors import InfeasibleError, MetricError
from qaoatransfer.graph import (
    Graph, LightconeClass, catalog, census, format_graph, generate_graph, graph_hash, parity,
    read_graph, realizable_parity_targets,
)
from qaoatransfer.maxcut import CutResult, approximation_ratio, reference_cut, solve_exact
from qaoatransfer.metrics import (
    SimilarityRecord, TransferMap, center_ratios, class_config, mean_signed_error, metric_stats,
    mutual_transferability, optima_distribution, pairwise_transfer, parity_block_means, parity_heatmap,
    parity_similarity, sps_from_ratios, subgraph_similarity, transfer_coefficient, transfer_map,
)
from qaoatransfer.optimizer import OptimaSet, OptimizerConfig, optimize, subject_label
from qaoatransfer.seeding import derive_seed, make_rng
from qaoatransfer.storage import ResultCache, RunManifest, cache_key, canonical_json

logger = logging.getLogger('Experiments')

INDEX_NAME = "index.json"
MIXED_PARITY_RANGE = (0.4, 0.6)
# all-odd at or below the first bound, all-even at or above the second
PURE_PARITY_BOUNDS = (0.2, 0.8)


@dataclass(frozen=True)
class EnsembleEntry:
    file: str
    level: int
    slot: int
    parity_target: int
    parity: float
    nodes: int
    edges: int
    hash: str
    seed: int


def parity_targets(n: int, levels: int) -> List[int]:
    """
    Even-degree node counts for `levels` evenly spaced parity levels.
    A count leaving an odd number of odd-degree nodes is moved down by one.
    """
    if levels == 1:
        raw = [n]
    else:
        raw = [int(round(level * n / (levels - 1))) for level in range(levels)]
    targets = []
    for k in raw:
        if (n - k) % 2:
            k -= 1
        if k not in targets:
            targets.append(k)
    return targets


@functools.lru_cache(maxsize=None)
def _realizable(n: int, d_max: int) -> Tuple[int, ...]:
    return tuple(realizable_parity_targets(n, d_max))


def generate_ensemble(gen: GraphGenConfig, seed: int) -> Tuple[List[Tuple[EnsembleEntry, Graph]], List[str]]:
    """
    graphs_per_level graphs per parity level, with distinct degree sequences
    inside a level. Returns (entries, per-slot failure messages).
    """
    entries: List[Tuple[EnsembleEntry, Graph]] = []
    failures: List[str] = []
    for level, k in enumerate(parity_targets(gen.nodes, gen.parity_levels)):
        seen = set()
        for slot in range(gen.graphs_per_level):
            g, slot_seed, error = None, 0, ""
            for attempt in range(gen.max_attempts):
                slot_seed = derive_seed(seed, level, slot, attempt)
                try:
                    candidate = generate_graph(gen.nodes, k, gen.d_max, slot_seed, connected=gen.connected)
                except InfeasibleError as e:
                    error = str(e)
                    break
                key = tuple(sorted(candidate.degrees()))
                if key not in seen:
                    seen.add(key)
                    g = candidate
                    break
            if g is None:
                message = f"level {level} slot {slot} (parity_target={k}): " + (error or "no new degree sequence")
                logger.error(f"[Experiments] Infeasible graph slot {message}")
                failures.append(message)
                continue
            name = f"g_{level:02d}_{slot:02d}.txt"
            entry = EnsembleEntry(name, level, slot, k, parity(g), g.node_count, g.num_edges, graph_hash(g), slot_seed)
            entries.append((entry, g))
    return entries, failures


def load_ensemble(ensemble_dir: str) -> List[Tuple[EnsembleEntry, Graph]]:
    with open(os.path.join(ensemble_dir, INDEX_NAME), "r", encoding="utf-8") as fh:
        index = json.load(fh)
    loaded = []
    for item in index["graphs"]:
        entry = EnsembleEntry(**item)
        loaded.append((entry, read_graph(os.path.join(ensemble_dir, entry.file))))
    return loaded


def _float_list(values) -> List[float]:
    return [float(v) for v in values]


class ExperimentRunner:
    """Shared plumbing for one CLI invocation."""

    def __init__(self, cfg: ExperimentConfig, command: str = "", cache: Optional[ResultCache] = None):
        self.cfg = cfg
        self.out_dir = os.path.abspath(cfg.out_dir)
        self.model = EnergyModel(cfg.backend, qubit_cap=cfg.qubit_cap)
        if cache is None and cfg.cache_dir:
            cache = ResultCache(cfg.cache_dir)
        self.cache = cache
        self.manifest = RunManifest(config_hash(cfg), __version__, command)
        self._centers: Optional[CenterSet] = None
        os.makedirs(self.out_dir, exist_ok=True)

    # Plumbing

    @property
    def centers(self) -> CenterSet:
        if self._centers is None:
            self._centers = load_centers(self.cfg.centers_file)
        return self._centers

    def map(self, fn: Callable, items: Sequence) -> List:
        if self.cfg.threads > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.threads) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]

    def write(self, relpath: str, text: str):
        self.manifest.write_artifact(self.out_dir, relpath, text)

    def write_json(self, relpath: str, data: Any):
        self.write(relpath, json.dumps(data, indent=2, sort_keys=True) + "\n")

    def finish(self) -> str:
        self.write_json("config.json", self.cfg.hashed_view())
        return self.manifest.write(self.out_dir)

    def timed(self, phase: str, fn: Callable, *args, **kwargs):
        start_time = time.time()
        result = fn(*args, **kwargs)
        elapsed = time.time() - start_time
        self.manifest.record_timing(phase, elapsed)
        logger.info(f"[Experiments] {phase} finished", extra={"duration_seconds": round(elapsed, 3)})
        return result

    def subject_config(self, subject: Subject) -> OptimizerConfig:
        """Optimizer config whose seed depends only on the master seed and the subject."""
        if isinstance(subject, Graph):
            digest = int(graph_hash(subject)[:15], 16)
            return self.cfg.optimizer.model_copy(update={"seed": derive_seed(self.cfg.seed, digest)})
        return class_config(self.cfg.optimizer, LightconeClass.of(*subject))

    def optimize(self, subject: Subject, opt_cfg: Optional[OptimizerConfig] = None) -> OptimaSet:
        opt_cfg = opt_cfg or self.subject_config(subject)
        if self.cache is None:
            return optimize(subject, opt_cfg, self.model)
        key = cache_key("optima", subject=subject_label(subject), config=opt_cfg.model_dump(),
                        backend=self.cfg.backend)
        payload = self.cache.get_or_compute(key, "optima",
                                            lambda: optimize(subject, opt_cfg, self.model).to_json())
        return OptimaSet.from_json(payload)

    def optimize_many(self, subjects: Sequence[Subject]) -> List[OptimaSet]:
        return self.map(self.optimize, list(subjects))

    def read_subject(self, arg: str) -> Subject:
        """A class label "(i,j,f)" or a graph file path."""
        if arg.strip().startswith("("):
            return LightconeClass.parse(arg)
        return read_graph(arg)

    # Subcommands

    def gen_graphs(self) -> List[EnsembleEntry]:
        gen = self.cfg.graphs
        entries, failures = self.timed("generate", generate_ensemble, gen, self.cfg.seed)
        for entry, g in entries:
            comment = f"parity={entry.parity:.4f} level={entry.level} slot={entry.slot} seed={entry.seed}"
            self.write(os.path.join("graphs", entry.file), format_graph(g, comment))
        index = {"nodes": gen.nodes, "d_max": gen.d_max, "seed": self.cfg.seed,
                 "graphs": [asdict(entry) for entry, _ in entries], "failures": failures}
        self.write_json(os.path.join("graphs", INDEX_NAME), index)
        self.finish()
        logger.info(f"[Experiments] Generated {len(entries)} graphs", extra={"failures": len(failures)})
        if failures:
            raise InfeasibleError(f"{len(failures)} graph slot(s) infeasible: {failures[0]}")
        return [entry for entry, _ in entries]

    def landscape(self, subject_arg: Optional[str] = None, ensemble_dir: Optional[str] = None,
                  resolution: Optional[int] = None) -> List[EnergyLandscape]:
        resolution = resolution or self.cfg.landscape_resolution
        results = []
        if subject_arg:
            subject = self.read_subject(subject_arg)
            land = self.timed("landscape", self.model.landscape, subject, resolution)
            name = subject.label if isinstance(subject, LightconeClass) else land.subject[:16]
            self.write(f"landscape_{_safe_name(name)}.csv", land.to_csv())
            results.append(land)
        if ensemble_dir:
            results.extend(self._parity_landscapes(ensemble_dir, resolution))
        self.finish()
        return results

    def _parity_landscapes(self, ensemble_dir: str, resolution: int) -> List[EnergyLandscape]:
        """Mean landscape per parity level, each graph normalized by its edge count."""
        ensemble = load_ensemble(ensemble_dir)
        by_level: Dict[float, List[Graph]] = {}
        for entry, g in ensemble:
            by_level.setdefault(round(entry.parity, 6), []).append(g)
        results = []
        for level in sorted(by_level):
            lands = self.map(lambda g: self.model.landscape(g, resolution), by_level[level])
            values = np.mean([land.values / land.upper_bound for land in lands], axis=0)
            mean = EnergyLandscape(lands[0].gamma_grid, lands[0].beta_grid, values, f"parity {level:.2f}")
            self.write(f"landscape_parity_{level:.2f}.csv", mean.to_csv())
            results.append(mean)
        return results

    def transfer_map(self, d_max: Optional[int] = None, regular_only: Optional[bool] = None) -> TransferMap:
        d_max = self.cfg.catalog_d_max if d_max is None else d_max
        regular_only = self.cfg.regular_only if regular_only is None else regular_only
        classes = catalog(d_max, regular_only)
        optima = self.timed("optimize", self.optimize_many, classes)
        tmap = self.timed("transfer", transfer_map, classes, self.cfg.optimizer, self.model,
                          optima=dict(zip(classes, optima)))
        suffix = f"d{d_max}{'_regular' if regular_only else ''}"
        self.write(f"transfer_map_{suffix}.csv", tmap.to_csv())
        self.write(f"optima_{suffix}.jsonl", tmap.optima_jsonl())
        self.write_json(f"transfer_map_{suffix}_summary.json", _map_summary(tmap))
        self.finish()
        return tmap

    def transfer(self, donor_file: str, acceptor_file: str) -> Dict[str, Any]:
        donor, acceptor = read_graph(donor_file), read_graph(acceptor_file)
        donor_optima, acceptor_optima = self.optimize_many([donor, acceptor])
        record = transfer_coefficient(donor_optima, acceptor_optima, acceptor, self.model,
                                      clamp=self.cfg.clamp_transfer)
        native = acceptor_optima.optima[acceptor_optima.best_index].energy
        donor_best = donor_optima.optima[donor_optima.best_index]
        transferred = self.model.graph_energy(acceptor, donor_best.params)
        report: Dict[str, Any] = {
            "record": record.to_dict(),
            "donor": {"hash": donor_optima.subject, "nodes": donor.node_count, "parity": parity(donor)},
            "acceptor": {"hash": acceptor_optima.subject, "nodes": acceptor.node_count, "parity": parity(acceptor)},
            "native_energy": native,
            "transferred_energy": transferred,
            "energy_ratio": transferred / native,
            "relative_reduction": 1.0 - transferred / native,
        }
        if acceptor.num_edges:
            cut = reference_cut(acceptor, self.cfg.seed, self.cfg.maxcut_effort)
            native_ratio = approximation_ratio(native, cut)
            transferred_ratio = approximation_ratio(transferred, cut)
            report.update(maxcut=cut.value, maxcut_exact=cut.exact, native_ratio=native_ratio.value,
                          transferred_ratio=transferred_ratio.value, uncertain=native_ratio.uncertain)
        self.write_json("transfer.json", report)
        self.finish()
        return report

    def _donor_target(self, n: int, rng: np.random.Generator) -> int:
        feasible = [k for k in _realizable(n, self.cfg.graphs.d_max) if (n - k) % 2 == 0]
        if not feasible:
            raise InfeasibleError(f"No realizable parity for {n}-node donors with d_max={self.cfg.graphs.d_max}")
        wanted = self.cfg.graphs.donor_parity
        if wanted is None:
            return int(feasible[int(rng.integers(len(feasible)))])
        return min(feasible, key=lambda k: (abs(k / n - wanted), k))

    def ensemble_donors(self) -> List[Tuple[int, int, Graph]]:
        gen = self.cfg.graphs
        donors = []
        for n in gen.donor_sizes:
            for index in range(gen.donors_per_size):
                donor_seed = derive_seed(self.cfg.seed, n, index)
                k = self._donor_target(n, make_rng(donor_seed))
                try:
                    g = generate_graph(n, k, gen.d_max, donor_seed, connected=gen.connected,
                                       max_attempts=gen.max_attempts)
                except InfeasibleError as e:
                    logger.warning(f"[Experiments] Donor n={n} #{index} skipped: {e}")
                    continue
                donors.append((n, index, g))
        return donors

    def ensemble_transfer(self, acceptor_file: str) -> Dict[str, Any]:
        acceptor = read_graph(acceptor_file)
        acceptor_optima = self.optimize(acceptor)
        native = acceptor_optima.optima[acceptor_optima.best_index].energy
        donors = self.timed("donors", self.ensemble_donors)
        donor_optima = self.timed("optimize", self.optimize_many, [g for _, _, g in donors])

        rows = []
        per_donor_max: List[Tuple[int, float]] = []
        for (n, index, g), o in zip(donors, donor_optima):
            energies = self.model.graph_energy_batch(acceptor, o.gammas(), o.betas())
            ratios = energies / native
            per_donor_max.append((n, float(np.max(ratios))))
            for restart, (opt, energy, ratio) in enumerate(zip(o.optima, energies, ratios)):
                rows.append(canonical_json({
                    "donor_size": n, "donor_index": index, "donor_hash": o.subject,
                    "donor_parity": parity(g), "restart": restart, "gamma": opt.gamma, "beta": opt.beta,
                    "energy": float(energy), "ratio": float(ratio),
                }))
        self.write("ensemble_transfer.jsonl", "".join(row + "\n" for row in rows))

        summary: Dict[str, Any] = {"acceptor": acceptor_optima.subject, "acceptor_parity": parity(acceptor),
                                   "native_energy": native, "donors": len(donors), "rows": len(rows),
                                   "per_size": {}}
        for n in sorted({n for n, _ in per_donor_max}):
            maxima = np.array([r for size, r in per_donor_max if size == n])
            summary["per_size"][str(n)] = {"donors": int(maxima.size), "mean_max_ratio": float(maxima.mean()),
                                           "best_max_ratio": float(maxima.max())}
        sizes = np.array([n for n, _ in per_donor_max], dtype=np.float64)
        maxima = np.array([r for _, r in per_donor_max])
        if sizes.size > 1 and np.std(sizes) > 0 and np.std(maxima) > 0:
            summary["size_spearman"] = float(stats.spearmanr(sizes, maxima)[0])
        self.write_json("ensemble_transfer_summary.json", summary)
        self.finish()
        return summary

    def _ensemble_transfer_matrix(self, ensemble_dir: str):
        ensemble = load_ensemble(ensemble_dir)
        graphs = [g for _, g in ensemble]
        optima = self.timed("optimize", self.optimize_many, graphs)
        matrix = self.timed("pairwise", pairwise_transfer, graphs, optima, self.model)
        return ensemble, graphs, optima, matrix

    def parity_heatmap(self, ensemble_dir: str) -> Dict[str, Any]:
        ensemble, graphs, optima, matrix = self._ensemble_transfer_matrix(ensemble_dir)
        parities = [entry.parity for entry, _ in ensemble]
        heatmap = parity_heatmap(parities, matrix, clamp=self.cfg.clamp_transfer)
        self.write("parity_heatmap.csv", heatmap.to_csv())
        self.write("pairwise_transfer.csv", _matrix_csv([e.file for e, _ in ensemble], matrix))

        off_diagonal = matrix[~np.eye(len(graphs), dtype=bool)]
        summary: Dict[str, Any] = {"graphs": len(graphs), "min_transfer": float(off_diagonal.min()),
                                   "grand_mean": float(off_diagonal.mean())}
        try:
            summary["same_parity_mean"], summary["cross_parity_mean"] = parity_block_means(parities, matrix)
        except MetricError as e:
            logger.warning(f"[Experiments] Parity blocks unavailable: {e}")
        mixed = [k for k, p in enumerate(parities) if MIXED_PARITY_RANGE[0] <= p <= MIXED_PARITY_RANGE[1]]
        if mixed:
            rows = [matrix[k, j] for k in mixed for j in range(len(graphs)) if j != k]
            summary["mixed_donor_mean"] = float(np.mean(rows))
        summary["mutual_transferability"] = self._mutual_transferability(ensemble, graphs)
        self.write_json("parity_heatmap_summary.json", summary)
        self.finish()
        return summary

    def _class_map_for(self, graphs: Sequence[Graph]) -> TransferMap:
        classes = sorted({c for g in graphs for c in census(g).classes()})
        optima = self.optimize_many(classes)
        return transfer_map(classes, self.cfg.optimizer, self.model, optima=dict(zip(classes, optima)))

    def _mutual_transferability(self, ensemble: Sequence[Tuple[EnsembleEntry, Graph]],
                                graphs: Sequence[Graph]) -> Dict[str, Any]:
        """Per-graph MT from the class map of the ensemble; means for mixed and pure parity."""
        tmap = self.timed("class map", self._class_map_for, graphs)
        values = [mutual_transferability(g, tmap) for g in graphs]
        lines = ["file,parity,mutual_transferability"]
        lines.extend(f"{entry.file},{entry.parity!r},{mt!r}" for (entry, _), mt in zip(ensemble, values))
        self.write("mutual_transferability.csv", "\n".join(lines) + "\n")

        low, high = PURE_PARITY_BOUNDS
        mixed = [mt for (entry, _), mt in zip(ensemble, values)
                 if MIXED_PARITY_RANGE[0] <= entry.parity <= MIXED_PARITY_RANGE[1]]
        pure = [mt for (entry, _), mt in zip(ensemble, values) if entry.parity <= low or entry.parity >= high]
        return {"graphs": len(values),
                "mixed_mean": float(np.mean(mixed)) if mixed else None,
                "pure_mean": float(np.mean(pure)) if pure else None}

    def similarity_compare(self, ensemble_dir: str) -> Dict[str, Any]:
        ensemble, graphs, optima, truth = self._ensemble_transfer_matrix(ensemble_dir)
        tmap = self.timed("class map", self._class_map_for, graphs)
        cuts = self.map(solve_exact, graphs)
        ars = [center_ratios(g, self.centers, cut, self.model) for g, cut in zip(graphs, cuts)]
        relative = self.cfg.sps_mode == "relative"

        records = []
        for d in range(len(graphs)):
            for a in range(len(graphs)):
                if d == a:
                    continue
                records.append(SimilarityRecord(
                    donor_id=ensemble[d][0].file, acceptor_id=ensemble[a][0].file,
                    ss=subgraph_similarity(graphs[d], graphs[a], tmap),
                    ps=parity_similarity(graphs[d], graphs[a]),
                    sps=sps_from_ratios(ars[d], ars[a], relative),
                    true_t=float(truth[d, a]),
                ))
        self.write("similarity.jsonl", "".join(r.to_json() + "\n" for r in records))
        stats_by_metric = metric_stats(records)
        result = {name: {"mse": s.mse, "pearson": s.pearson} for name, s in stats_by_metric.items()}
        result["mean_signed_error"] = {name: mean_signed_error(records, name) for name in stats_by_metric}
        result["pairs"] = len(records)
        result["sps_mode"] = self.cfg.sps_mode
        self.write_json("metric_stats.json", result)
        self.finish()
        return result

    def maxcut(self, graph_file: str) -> CutResult:
        g = read_graph(graph_file)
        cut = reference_cut(g, self.cfg.seed, self.cfg.maxcut_effort)
        self.write_json("maxcut.json", cut.to_dict())
        self.finish()
        return cut

    def calibrate(self, d_max: Optional[int] = None) -> CenterSet:
        classes = catalog(self.cfg.catalog_d_max if d_max is None else d_max)
        optima = self.timed("optimize", self.optimize_many, classes)
        centers = calibrate_centers(dict(zip(classes, optima)), self.model, radius=self.cfg.radius)
        save_centers(centers, os.path.join(self.out_dir, "centers.json"))
        self.manifest.add_artifact(self.out_dir, "centers.json")
        self.finish()
        return centers

    def centers_report(self, ensemble_dir: str) -> Dict[str, Any]:
        ensemble = load_ensemble(ensemble_dir)
        graphs = [g for _, g in ensemble]
        optima = self.timed("optimize", self.optimize_many, graphs)
        cuts = self.map(solve_exact, graphs)
        rows = []
        totals = {"universal": 0, "odd": 0, "even": 0, "unassigned": 0}
        for (entry, g), o, cut in zip(ensemble, optima, cuts):
            ars = center_ratios(g, self.centers, cut, self.model)
            counts = classify_optima(o, self.centers, self.cfg.radius)
            folded = role_counts(counts, self.centers)
            for role, count in folded.items():
                totals[role] += count
            rows.append(canonical_json({
                "file": entry.file, "parity": entry.parity, "maxcut": cut.value,
                "ratios": dict(zip(self.centers.names, _float_list(ars))),
                "counts": counts, "roles": folded,
                "predicted": list(optima_distribution(ars)),
            }))
        self.write("centers_report.jsonl", "".join(row + "\n" for row in rows))
        total = sum(totals.values())
        summary = {"graphs": len(graphs), "roles": totals,
                   "universal_fraction": totals["universal"] / total if total else 0.0}
        self.write_json("centers_report_summary.json", summary)
        self.finish()
        return summary


def _safe_name(label: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in label).strip("_")


def _matrix_csv(labels: Sequence[str], matrix: np.ndarray) -> str:
    lines = [",".join(["donor\\acceptor"] + list(labels))]
    for label, row in zip(labels, matrix):
        lines.append(",".join([label] + [repr(float(v)) for v in row]))
    return "\n".join(lines) + "\n"


def _map_summary(tmap: TransferMap) -> Dict[str, Any]:
    summary: Dict[str, Any] = {"classes": len(tmap), "asymmetry": tmap.asymmetry(),
                               "diagonal_min": float(np.min(np.diag(tmap.matrix)))}
    for donor_kind in ("odd", "even"):
        for acceptor_kind in ("odd", "even"):
            try:
                summary[f"{donor_kind}_to_{acceptor_kind}"] = tmap.block_mean(donor_kind, acceptor_kind)
            except MetricError:
                continue
    return summary
