"""
Command-line front end.

Verbs: gen (write an instance file), solve (one instance, one strategy),
experiment (strategy comparison grid), trace (age and schedule CSVs) and
summary (gaps and ratios from an aggregate table).
"""
import argparse
import logging

from pydantic import ValidationError

from .config import Settings
from .errors import (
    InfeasibleError,
    InstanceValidationError,
    KeyValueFormatError,
    MissingStrategyError,
    NodeLimitExceededError,
    UnknownStrategyError,
)
from .experiments import AGGREGATE_FILE, ExperimentService, load_experiment_config
from .files import FileStore
from .instances import ensure_valid, generate_instance
from .models import ExperimentConfig, GenerationConfig, Instance, Strategy
from .schedules import check_schedule, schedule_energy
from .strategies import StrategyService, parse_strategy
from .traces import export_trace


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def _float_list(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item.strip()]


def _int_list(text: str) -> list[int]:
    return [int(item) for item in text.split(",") if item.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aot", description="Age-of-task scheduling and offloading experiments")
    parser.add_argument("--out", default=None, help="Output directory (overrides AOT_OUTPUT_DIR)")
    parser.add_argument("--horizon", type=int, default=None, help="Number of schedulable slots")
    parser.add_argument("--node-limit", type=int, default=None, help="Label expansions allowed to the exact search")
    parser.add_argument("--delay-objective", choices=["makespan", "sum"], default=None)
    parser.add_argument("--workers", type=int, default=None, help="Worker processes for experiment grids")
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a random instance file")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--emax", type=float, default=None)
    gen.add_argument("--config", default=None, help="Experiment config whose generation settings are used")
    gen.add_argument("--name", default=None, help="File name below the output directory")

    for name, help_text in (("solve", "Solve one instance with one strategy"),
                            ("trace", "Export the age and schedule traces of one solved instance")):
        cmd = sub.add_parser(name, help=help_text)
        source = cmd.add_mutually_exclusive_group()
        source.add_argument("--instance", default=None, help="Instance file")
        source.add_argument("--seed", type=int, default=None, help="Generate the instance from this seed")
        cmd.add_argument("--emax", type=float, default=None)
        cmd.add_argument("--strategy", default=Strategy.HEURISTIC.value)

    experiment = sub.add_parser("experiment", help="Run the strategy comparison grid")
    experiment.add_argument("--config", default=None, help="Experiment config file")
    experiment.add_argument("--seed", type=int, default=None, help="First seed of a consecutive range")
    experiment.add_argument("--count", type=int, default=None, help="Number of consecutive seeds")
    experiment.add_argument("--seeds", type=_int_list, default=None, help="Comma-separated seed list")
    experiment.add_argument("--emax-grid", type=_float_list, default=None, help="Comma-separated E_max values")
    experiment.add_argument("--strategy", action="append", default=None, help="Strategy to compare (repeatable)")

    summary = sub.add_parser("summary", help="Summarize an aggregate table")
    summary.add_argument("--aggregate", default=None, help="Aggregate CSV (defaults to the output directory's)")
    return parser


def settings_from_args(args: argparse.Namespace, base: Settings) -> Settings:
    overrides = {
        "output_dir": args.out,
        "horizon": args.horizon,
        "node_limit": args.node_limit,
        "delay_objective": args.delay_objective,
        "workers": args.workers,
        "log_level": args.log_level,
    }
    merged = base.model_dump()
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return Settings(**merged)


class CliApp:
    def __init__(
        self,
        settings: Settings,
        store: FileStore,
        strategy_service: StrategyService,
        experiment_service: ExperimentService,
    ):
        self._settings = settings
        self._store = store
        self._strategies = strategy_service
        self._experiments = experiment_service

    def _generation(self, args: argparse.Namespace) -> GenerationConfig:
        config_path = getattr(args, "config", None)
        base = GenerationConfig()
        if config_path:
            base = load_experiment_config(self._store.read_text(config_path)).generation
        update = {}
        if config_path is None or args.horizon is not None:
            update["horizon"] = self._settings.horizon
        if getattr(args, "emax", None) is not None:
            update["e_max"] = args.emax
        return GenerationConfig.model_validate({**base.model_dump(), **update})

    def _instance(self, args: argparse.Namespace) -> Instance:
        if args.instance:
            inst = self._store.read_instance(args.instance)
            if args.horizon is not None:
                inst = inst.with_horizon(self._settings.horizon)
            if args.emax is not None:
                inst = inst.with_e_max(args.emax)
            return ensure_valid(inst)
        return generate_instance(args.seed or 0, self._generation(args))

    def cmd_gen(self, args: argparse.Namespace) -> int:
        inst = generate_instance(args.seed, self._generation(args))
        path = self._store.write_instance(args.name or f"instance_seed{args.seed}.txt", inst)
        print(path)
        return EXIT_OK

    def cmd_solve(self, args: argparse.Namespace) -> int:
        inst = self._instance(args)
        result = self._strategies.run(inst, args.strategy)
        violations = check_schedule(inst, result.schedule)
        print(f"strategy         {result.strategy.value}")
        print(f"sum_age          {result.sum_age:.12g}")
        print(f"completion_time  {result.completion_time}")
        print(f"energy           {schedule_energy(inst, result.schedule):.12g} / {inst.e_max:.12g}")
        print(f"order            {','.join(str(n) for n in result.order)}")
        for violation in violations:
            logger.error("Schedule violation: %s", violation.message)
        return EXIT_OK if not violations else EXIT_VALIDATION

    def cmd_trace(self, args: argparse.Namespace) -> int:
        inst = self._instance(args)
        strategy = parse_strategy(args.strategy)
        result = self._strategies.run(inst, strategy)
        for path in export_trace(inst, result, self._store, f"trace_{strategy.value}"):
            print(path)
        return EXIT_OK

    def _experiment_config(self, args: argparse.Namespace) -> ExperimentConfig:
        base = load_experiment_config(self._store.read_text(args.config)) if args.config else ExperimentConfig()
        data = base.model_dump()
        if args.config is None or args.horizon is not None:
            data["generation"] = {**data["generation"], "horizon": self._settings.horizon}
        if args.seeds:
            data["seeds"] = args.seeds
        if args.seed is not None:
            data["base_seed"] = args.seed
            data["seeds"] = None
        if args.count is not None:
            data["count"] = args.count
            data["seeds"] = None
        if args.emax_grid:
            data["emax_grid"] = args.emax_grid
        if args.strategy:
            data["strategies"] = [parse_strategy(name) for part in args.strategy for name in part.split(",")]
        return ExperimentConfig.model_validate(data)

    def cmd_experiment(self, args: argparse.Namespace) -> int:
        rows = self._experiments.run_experiment(self._experiment_config(args))
        for row in rows:
            print(f"{row.e_max:.4g}\t{row.strategy.value}\t{row.mean_sum_age}\t{row.mean_completion_time}")
        return EXIT_OK

    def cmd_summary(self, args: argparse.Namespace) -> int:
        path = args.aggregate or self._store.path(AGGREGATE_FILE)
        summary = self._experiments.summarize(path)
        for name, value in summary.model_dump().items():
            print(f"{name:40s}{value:.12g}")
        return EXIT_OK

    def run(self, args: argparse.Namespace) -> int:
        handler = getattr(self, f"cmd_{args.command}")
        try:
            return handler(args)
        except (InfeasibleError, NodeLimitExceededError) as e:
            logger.error("%s", e)
            return EXIT_INFEASIBLE
        except (InstanceValidationError, KeyValueFormatError, UnknownStrategyError, MissingStrategyError,
                ValidationError, ValueError) as e:
            logger.error("%s", e)
            return EXIT_VALIDATION
        except OSError as e:
            logger.error("%s", e)
            return EXIT_IO

