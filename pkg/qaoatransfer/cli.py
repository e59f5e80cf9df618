# qaoatransfer/cli.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Command-line entry point
# Subcommands map one-to-one onto ExperimentRunner methods
# Exit codes: 0 success, 2 config error, 3 infeasible input, 4 verification failure

import argparse
import json
import logging
import sys
from typing import List, Optional

from qaoatransfer import __version__
from qaoatransfer.config import check_experiment, load_config
from qaoatransfer.errors import ConfigError, QaoaTransferError
from qaoatransfer.experiments import ExperimentRunner
from qaoatransfer.storage import verify_manifest

logger = logging.getLogger('QaoaTransferCLI')

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaoatransfer",
                                     description="Depth-1 QAOA MaxCut parameter transferability toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-c", "--config", default=None, help="YAML config file")
    parser.add_argument("--seed", type=int, default=None, help="Master seed")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (1 = serial)")
    parser.add_argument("--out-dir", default=None, help="Artifact directory")
    parser.add_argument("--cache-dir", default=None, help="Result cache directory")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graphs", help="Generate the random-graph ensemble")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--levels", type=int, default=None, help="Number of parity levels")
    p.add_argument("--per-level", type=int, default=None, help="Graphs per parity level")

    p = sub.add_parser("landscape", help="Energy landscape of a class, a graph, or per parity level")
    p.add_argument("subject", nargs="?", default=None, help='Class label "(i,j,f)" or graph file')
    p.add_argument("--ensemble-dir", default=None, help="Emit per-parity-level mean landscapes")
    p.add_argument("--resolution", type=int, default=None)

    p = sub.add_parser("transfer-map", help="Class-to-class transferability matrix")
    p.add_argument("--d-max", type=int, default=None)
    p.add_argument("--regular-only", action="store_true", default=None)

    p = sub.add_parser("transfer", help="Donor graph -> acceptor graph transfer")
    p.add_argument("donor")
    p.add_argument("acceptor")

    p = sub.add_parser("ensemble-transfer", help="Many donors of several sizes -> one acceptor")
    p.add_argument("acceptor")
    p.add_argument("--donors-per-size", type=int, default=None)

    p = sub.add_parser("parity-heatmap", help="Pairwise transfer over an ensemble, binned by parity")
    p.add_argument("ensemble_dir")

    p = sub.add_parser("similarity-compare", help="SS / PS / SPS against true transferability")
    p.add_argument("ensemble_dir")

    p = sub.add_parser("maxcut", help="Classical MaxCut of a graph file")
    p.add_argument("graph")

    p = sub.add_parser("verify-manifest", help="Re-hash artifacts listed in a run manifest")
    p.add_argument("run_dir", nargs="?", default=None)

    p = sub.add_parser("calibrate-centers", help="Re-derive the six centers from catalog optima")
    p.add_argument("--d-max", type=int, default=None)

    p = sub.add_parser("centers-report", help="Center ratios and optima classification per ensemble graph")
    p.add_argument("ensemble_dir")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    overrides = {
        "seed": args.seed,
        "threads": args.threads,
        "out_dir": args.out_dir,
        "cache_dir": args.cache_dir,
    }
    if args.command == "gen-graphs":
        overrides.update({"graphs.nodes": args.nodes, "graphs.d_max": args.d_max,
                          "graphs.parity_levels": args.levels, "graphs.graphs_per_level": args.per_level})
    elif args.command == "landscape":
        overrides["landscape_resolution"] = args.resolution
    elif args.command == "ensemble-transfer":
        overrides["graphs.donors_per_size"] = args.donors_per_size
    return overrides


def run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config, _overrides(args))
    check_experiment(cfg, args.command)

    if args.command == "verify-manifest":
        manifest = verify_manifest(args.run_dir or cfg.out_dir)
        print(f"OK {len(manifest.artifacts)} artifacts")
        return 0

    runner = ExperimentRunner(cfg, command=args.command)
    if args.command == "gen-graphs":
        entries = runner.gen_graphs()
        print(f"{len(entries)} graphs written to {runner.out_dir}")
    elif args.command == "landscape":
        if not args.subject and not args.ensemble_dir:
            raise ConfigError("landscape needs a subject or --ensemble-dir")
        runner.landscape(args.subject, args.ensemble_dir)
    elif args.command == "transfer-map":
        tmap = runner.transfer_map(args.d_max, args.regular_only)
        print(f"{len(tmap)}x{len(tmap)} transfer map written to {runner.out_dir}")
    elif args.command == "transfer":
        print(json.dumps(runner.transfer(args.donor, args.acceptor), indent=2, sort_keys=True))
    elif args.command == "ensemble-transfer":
        print(json.dumps(runner.ensemble_transfer(args.acceptor), indent=2, sort_keys=True))
    elif args.command == "parity-heatmap":
        print(json.dumps(runner.parity_heatmap(args.ensemble_dir), indent=2, sort_keys=True))
    elif args.command == "similarity-compare":
        print(json.dumps(runner.similarity_compare(args.ensemble_dir), indent=2, sort_keys=True))
    elif args.command == "maxcut":
        print(json.dumps(runner.maxcut(args.graph).to_dict(), sort_keys=True))
    elif args.command == "calibrate-centers":
        centers = runner.calibrate(args.d_max)
        print(json.dumps(centers.to_dict(), indent=2, sort_keys=True))
    elif args.command == "centers-report":
        print(json.dumps(runner.centers_report(args.ensemble_dir), indent=2, sort_keys=True))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        return run(args)
    except QaoaTransferError as e:
        logger.error(f"[CLI] {type(e).__name__}: {e}")
        return e.exit_code
    except (OSError, ValueError) as e:
        # unreadable or malformed input files
        logger.error(f"[CLI] {e}")
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
