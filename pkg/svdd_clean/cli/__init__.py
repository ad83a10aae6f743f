import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from ..classifiers import CLASSIFIER_KINDS
from ..constants import DEFAULT_THRESHOLD, LOG_LEVEL
from ..data import SynthSpec
from ..errors import ConfigError, ContractError, DataError, TrainingError
from ..pipeline import RunDirectory
from .commands import cmd_clean, cmd_eval, cmd_oracle, cmd_refilter, cmd_synth
from .config import resolve_config


EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRAINING = 4

# argparse dest -> RunConfig field, for flags whose names differ
_FLAG_FIELDS = {
    "embeddings": "embeddings_path",
    "name": "dataset_name",
}
_CLEAN_FLAGS = (
    "data",
    "format",
    "name",
    "embedder",
    "dim",
    "embeddings",
    "hash_seed",
    "embed_url",
    "encoder_dims",
    "pretrain",
    "epochs_ae",
    "epochs_svdd",
    "batch_size",
    "learning_rate",
    "weight_decay",
    "nu",
    "min_class_size",
    "allow_small_classes",
    "workers",
    "test_fraction",
    "thresholds",
    "classifiers",
    "seed",
    "out",
)


def _threshold_list(value: str) -> List[float]:
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid threshold list '{value}'")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svdd-clean",
        description="Per-class Deep SVDD outlier filtering for labeled text datasets",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    clean = commands.add_parser("clean", help="fit per-class models and write filter reports")
    clean.add_argument("--config", type=Path, help="key = value config file")
    clean.add_argument("--data", type=Path, help="dataset file")
    clean.add_argument("--format", choices=("jsonl", "csv"))
    clean.add_argument("--name", help="dataset name used in tables")
    clean.add_argument("--embedder", choices=("precomputed", "hashing", "remote"))
    clean.add_argument("--dim", type=int)
    clean.add_argument("--embeddings", type=Path, help="precomputed embeddings JSONL")
    clean.add_argument("--hash-seed", type=int)
    clean.add_argument("--embed-url")
    clean.add_argument("--encoder-dims", help="comma-separated hidden and code sizes")
    clean.add_argument(
        "--no-pretrain", dest="pretrain", action="store_const", const=False, default=None
    )
    clean.add_argument("--epochs-ae", type=int)
    clean.add_argument("--epochs-svdd", type=int)
    clean.add_argument("--batch-size", type=int)
    clean.add_argument("--learning-rate", type=float)
    clean.add_argument("--lambda", dest="weight_decay", type=float, help="weight decay")
    clean.add_argument("--nu", type=float)
    clean.add_argument("--min-class-size", type=int)
    clean.add_argument(
        "--allow-small-classes", action="store_const", const=True, default=None
    )
    clean.add_argument("--workers", type=int)
    clean.add_argument("--test-fraction", type=float)
    clean.add_argument("--threshold", type=float, help="a single threshold")
    clean.add_argument("--thresholds", type=_threshold_list, help="comma-separated sweep")
    clean.add_argument("--classifiers", help="comma-separated classifiers for later eval")
    clean.add_argument("--seed", type=int)
    clean.add_argument("--out", type=Path, help="run directory")

    refilter = commands.add_parser("refilter", help="re-threshold a finished run")
    refilter.add_argument("run_dir", type=Path)
    refilter.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    refilter.add_argument("--thresholds", type=_threshold_list)

    evaluate = commands.add_parser("eval", help="downstream classifier evaluation of a run")
    evaluate.add_argument("run_dir", type=Path)
    evaluate.add_argument(
        "--classifiers", help=f"comma-separated subset of {','.join(CLASSIFIER_KINDS)}"
    )
    evaluate.add_argument("--thresholds", type=_threshold_list)
    evaluate.add_argument("--truth", type=Path, help="injection truth JSONL")

    synth = commands.add_parser("synth", help="write a synthetic dataset with injected outliers")
    synth.add_argument("--out", type=Path, required=True, help="output directory")
    synth.add_argument("--classes", type=int, default=2)
    synth.add_argument("--per-class", type=int, default=600)
    synth.add_argument("--dim", type=int, default=32)
    synth.add_argument("--std", type=float, default=1.0)
    synth.add_argument("--outlier-fraction", type=float, default=0.05)
    synth.add_argument("--mode", choices=("label_flip", "far_point"), default="far_point")
    synth.add_argument("--seed", type=int, default=0)

    oracle = commands.add_parser("oracle", help="exact enclosing ball of a point file")
    oracle.add_argument("points", type=Path, help='JSONL of {"id": ..., "point": [...]}')
    oracle.add_argument("--nu", type=float, help="also solve the soft-margin problem")
    oracle.add_argument("--iterations", type=int, default=5000)
    oracle.add_argument("--seed", type=int, default=0)

    return parser


def _clean_flags(args: argparse.Namespace) -> dict:
    flags = {_FLAG_FIELDS.get(name, name): getattr(args, name) for name in _CLEAN_FLAGS}
    if args.threshold is not None:
        if args.thresholds is not None:
            raise ConfigError("Pass either --threshold or --thresholds, not both")
        flags["thresholds"] = [args.threshold]
    return flags


def _classifier_list(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    kinds = [part.strip() for part in value.split(",") if part.strip()]
    unknown = [kind for kind in kinds if kind not in CLASSIFIER_KINDS]
    if unknown or not kinds:
        raise ConfigError(f"Unknown classifiers {unknown}, expected {list(CLASSIFIER_KINDS)}")
    return kinds


def _run(args: argparse.Namespace):
    if args.command == "clean":
        config = resolve_config(_clean_flags(args), args.config)
        run_dir = cmd_clean(config)
        print(run_dir.path)
    elif args.command == "refilter":
        cmd_refilter(RunDirectory(args.run_dir), args.thresholds or [args.threshold])
    elif args.command == "eval":
        evaluation = cmd_eval(
            RunDirectory(args.run_dir),
            classifiers=_classifier_list(args.classifiers),
            thresholds=args.thresholds,
            truth_path=args.truth,
        )
        print(json.dumps(evaluation["best"], sort_keys=True, indent=2))
    elif args.command == "synth":
        spec = SynthSpec(
            n_classes=args.classes,
            n_per_class=args.per_class,
            dim=args.dim,
            cluster_std=args.std,
            outlier_fraction=args.outlier_fraction,
            outlier_mode=args.mode,
            seed=args.seed,
        )
        for path in cmd_synth(spec, args.out).values():
            print(path)
    elif args.command == "oracle":
        output = cmd_oracle(args.points, nu=args.nu, iterations=args.iterations, seed=args.seed)
        print(json.dumps(output, sort_keys=True, indent=2))


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        _run(args)
    except (ConfigError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ContractError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except TrainingError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_TRAINING
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return 0
