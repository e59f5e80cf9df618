# qaoatransfer/config.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Experiment configuration
# YAML file -> pydantic models; CLI flags override file values
# The canonical JSON of the validated config is hashed to key caches and manifests

import logging
from typing import Any, Dict, List, Literal, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qaoatransfer.errors import ConfigError
from qaoatransfer.optimizer import OptimizerConfig
from qaoatransfer.storage import canonical_json, sha256_text

logger = logging.getLogger('QaoaTransferCLI')

# experiment kind -> CLI subcommand
EXPERIMENT_COMMANDS = {
    "landscape": "landscape",
    "transfer-map": "transfer-map",
    "donor-acceptor": "transfer",
    "parity-heatmap": "parity-heatmap",
    "ensemble-violin": "ensemble-transfer",
    "similarity-compare": "similarity-compare",
}
# excluded from the config hash
EXECUTION_KEYS = {"threads", "out_dir", "cache_dir"}


class GraphGenConfig(BaseModel):
    """Random-graph ensemble parameters."""
    model_config = ConfigDict(extra="forbid")

    nodes: int = Field(default=20, ge=2)
    d_max: int = Field(default=6, ge=1)
    parity_levels: int = Field(default=11, ge=1)
    graphs_per_level: int = Field(default=10, ge=1)
    connected: bool = True
    max_attempts: int = Field(default=50, ge=1)
    donor_sizes: List[int] = Field(default_factory=lambda: [6, 8, 10, 12, 14, 16, 18, 20])
    donors_per_size: int = Field(default=100, ge=1)
    # None draws each donor's parity level at random
    donor_parity: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    acceptor_nodes: int = Field(default=64, ge=2)

    @model_validator(mode="after")
    def _check_sizes(self) -> "GraphGenConfig":
        if any(n < 2 for n in self.donor_sizes):
            raise ValueError(f"donor_sizes must all be >= 2, got {self.donor_sizes}")
        return self


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    experiment: Optional[Literal["landscape", "transfer-map", "donor-acceptor", "parity-heatmap",
                                 "ensemble-violin", "similarity-compare"]] = None
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    out_dir: str = "results"
    cache_dir: Optional[str] = None
    backend: Literal["closed_form", "statevector"] = "closed_form"
    qubit_cap: int = Field(default=20, ge=2)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    graphs: GraphGenConfig = Field(default_factory=GraphGenConfig)
    landscape_resolution: int = Field(default=64, ge=2)
    catalog_d_max: int = Field(default=6, ge=1)
    regular_only: bool = False
    centers_file: Optional[str] = None
    radius: float = Field(default=0.25, gt=0)
    clamp_transfer: bool = False
    # absolute: threshold the donor center ratios as measured; relative: after
    # dividing by the donor's best universal ratio
    sps_mode: Literal["absolute", "relative"] = "absolute"
    maxcut_effort: int = Field(default=100, ge=1)

    @model_validator(mode="after")
    def _master_seed(self) -> "ExperimentConfig":
        if self.optimizer.seed != self.seed:
            self.optimizer = self.optimizer.model_copy(update={"seed": self.seed})
        return self

    def hashed_view(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude=EXECUTION_KEYS)


def check_experiment(cfg: ExperimentConfig, command: str):
    """A config that names an experiment kind only runs that experiment's subcommand."""
    if cfg.experiment is None or command not in EXPERIMENT_COMMANDS.values():
        return
    expected = EXPERIMENT_COMMANDS[cfg.experiment]
    if command != expected:
        raise ConfigError(f"Config is for experiment '{cfg.experiment}' (subcommand {expected}), not {command}")


def config_hash(cfg: ExperimentConfig) -> str:
    return sha256_text(canonical_json(cfg.hashed_view()))


def _validate(data: Mapping[str, Any], origin: str) -> ExperimentConfig:
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration ({origin}): {e}") from e
    except TypeError as e:
        raise ConfigError(f"Invalid configuration ({origin}): {e}") from e


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> ExperimentConfig:
    """
    Read a YAML config (or start from defaults) and apply overrides.
    Override values of None are ignored so unset CLI flags leave the file alone.
    """
    data: Dict[str, Any] = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                loaded = yaml.safe_load(fh)
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"Malformed YAML in {path}: {e}") from e
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"Config {path} must be a mapping, got {type(loaded).__name__}")
        data.update(loaded)
        logger.debug(f"[Config] Loaded {path}")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if "." in key:
            section, name = key.split(".", 1)
            nested = dict(data.get(section) or {})
            nested[name] = value
            data[section] = nested
        else:
            data[key] = value
    return _validate(data, path or "defaults")


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=True)
