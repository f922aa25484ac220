"""
Strategy comparison over a grid of random instances and energy budgets.

Every cell of the (e_max, strategy, seed) grid is solved independently,
optionally in a process pool, and merged back in grid order. The per-seed
table and the aggregate table are CSV files with 12 significant digits;
per-seed values are rounded to that precision before they are averaged so
the aggregate can be recomputed exactly from the per-seed file.
"""
import csv
import io
import logging
import math
import time
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import NamedTuple

from . import keyvalue
from .config import Settings
from .errors import InfeasibleError, KeyValueFormatError, MissingStrategyError, NodeLimitExceededError
from .files import FileStore
from .instances import generate_instance
from .models import ComparisonRow, ExperimentConfig, GenerationConfig, Strategy, SummaryTable
from .strategies import StrategyService


logger = logging.getLogger(__name__)

PER_SEED_FILE = "per_seed.csv"
AGGREGATE_FILE = "aggregate.csv"
SUMMARY_FILE = "summary.csv"

PER_SEED_HEADER = ("e_max", "strategy", "seed", "status", "sum_age", "completion_time")
AGGREGATE_HEADER = ("e_max", "strategy", "mean_sum_age", "mean_completion_time", "feasible", "seeds")

STATUS_OK = "ok"
STATUS_INFEASIBLE = "infeasible"
STATUS_NODE_LIMIT = "node-limit"


class Cell(NamedTuple):
    e_max: float
    strategy: Strategy
    seed: int


class CellResult(NamedTuple):
    e_max: float
    strategy: Strategy
    seed: int
    status: str
    sum_age: float | None
    completion_time: float | None
    runtime: float = 0.0


def fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".12g")


def _rounded(value: float | None) -> float | None:
    return None if value is None else float(fmt(value))


def run_cell(cell: Cell, generation: GenerationConfig, settings: Settings) -> CellResult:
    """Solve one grid cell; infeasibility is recorded in the result instead of raised."""
    inst = generate_instance(cell.seed, generation).with_e_max(cell.e_max)
    started = time.perf_counter()
    try:
        result = StrategyService(settings).run(inst, cell.strategy)
    except InfeasibleError as e:
        logger.warning("%s seed %s E_max %.6g: infeasible (%s)", cell.strategy.value, cell.seed, cell.e_max, e)
        return CellResult(*cell, STATUS_INFEASIBLE, None, None, time.perf_counter() - started)
    except NodeLimitExceededError as e:
        logger.warning("%s seed %s E_max %.6g: %s", cell.strategy.value, cell.seed, cell.e_max, e)
        return CellResult(*cell, STATUS_NODE_LIMIT, None, None, time.perf_counter() - started)
    runtime = time.perf_counter() - started
    logger.debug("%s seed %s E_max %.6g: sum AoT %.6g, completion %s (%.3fs)",
                 cell.strategy.value, cell.seed, cell.e_max, result.sum_age, result.completion_time, runtime)
    return CellResult(
        *cell,
        STATUS_OK,
        _rounded(result.sum_age),
        _rounded(float(result.completion_time)),
        runtime,
    )


def grid_cells(cfg: ExperimentConfig) -> list[Cell]:
    return [
        Cell(e_max, strategy, seed)
        for e_max in cfg.emax_grid
        for strategy in cfg.strategies
        for seed in cfg.seed_list
    ]


def _mean(values: Sequence[float | None]) -> float | None:
    feasible = [v for v in values if v is not None]
    if not feasible:
        return None
    return math.fsum(feasible) / len(feasible)


def aggregate(results: Iterable[CellResult]) -> list[ComparisonRow]:
    """Average the per-seed values of every (e_max, strategy) group, in order of first appearance."""
    groups: dict[tuple[float, Strategy], list[CellResult]] = {}
    for r in results:
        groups.setdefault((r.e_max, r.strategy), []).append(r)
    rows = []
    for (e_max, strategy), cells in groups.items():
        sum_ages = tuple(c.sum_age for c in cells)
        completion_times = tuple(c.completion_time for c in cells)
        rows.append(ComparisonRow(
            e_max=e_max,
            strategy=strategy,
            mean_sum_age=_mean(sum_ages),
            mean_completion_time=_mean(completion_times),
            seeds=tuple(c.seed for c in cells),
            sum_ages=sum_ages,
            completion_times=completion_times,
            runtime=math.fsum(c.runtime for c in cells),
        ))
    return rows


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def per_seed_csv(results: Iterable[CellResult]) -> str:
    return _csv_text(PER_SEED_HEADER, (
        (fmt(r.e_max), r.strategy.value, str(r.seed), r.status, fmt(r.sum_age), fmt(r.completion_time))
        for r in results
    ))


def aggregate_csv(rows: Iterable[ComparisonRow]) -> str:
    return _csv_text(AGGREGATE_HEADER, (
        (
            fmt(row.e_max),
            row.strategy.value,
            fmt(row.mean_sum_age),
            fmt(row.mean_completion_time),
            str(row.feasible_count),
            str(len(row.seeds)),
        )
        for row in rows
    ))


def read_per_seed_csv(text: str) -> list[CellResult]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != PER_SEED_HEADER:
        raise ValueError(f"Unexpected per-seed header {reader.fieldnames}, expected {list(PER_SEED_HEADER)}")
    results = []
    for line in reader:
        results.append(CellResult(
            e_max=float(line["e_max"]),
            strategy=Strategy(line["strategy"]),
            seed=int(line["seed"]),
            status=line["status"],
            sum_age=float(line["sum_age"]) if line["sum_age"] else None,
            completion_time=float(line["completion_time"]) if line["completion_time"] else None,
        ))
    return results


def read_aggregate_csv(text: str) -> list[ComparisonRow]:
    """Rows of an aggregate table; per-seed values are not part of it and come back empty."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != AGGREGATE_HEADER:
        raise ValueError(f"Unexpected aggregate header {reader.fieldnames}, expected {list(AGGREGATE_HEADER)}")
    return [
        ComparisonRow(
            e_max=float(line["e_max"]),
            strategy=Strategy(line["strategy"]),
            mean_sum_age=float(line["mean_sum_age"]) if line["mean_sum_age"] else None,
            mean_completion_time=float(line["mean_completion_time"]) if line["mean_completion_time"] else None,
            seeds=(),
            sum_ages=(),
            completion_times=(),
        )
        for line in reader
    ]


def _grand_means(rows: Sequence[ComparisonRow], strategy: Strategy) -> tuple[float, float]:
    selected = [row for row in rows if row.strategy == strategy]
    if not selected:
        raise MissingStrategyError(f"No rows for strategy {strategy.value!r}")
    ages = _mean([row.mean_sum_age for row in selected])
    completions = _mean([row.mean_completion_time for row in selected])
    if ages is None or completions is None:
        raise MissingStrategyError(f"Strategy {strategy.value!r} has no feasible results")
    return ages, completions


def compare_summary(rows: Sequence[ComparisonRow]) -> SummaryTable:
    """
    Gaps and ratios between the heuristic, age-optimal and delay-optimal strategies.

    Each strategy is reduced to the mean over the E_max grid of its
    per-budget means, then compared in sum AoT and in completion time.
    """
    age_aot, age_completion = _grand_means(rows, Strategy.AGE_OPTIMAL)
    delay_aot, delay_completion = _grand_means(rows, Strategy.DELAY_OPTIMAL)
    heuristic_aot, heuristic_completion = _grand_means(rows, Strategy.HEURISTIC)
    return SummaryTable(
        aot_gap_delay_vs_age=delay_aot - age_aot,
        aot_gap_delay_vs_heuristic=delay_aot - heuristic_aot,
        aot_ratio_age_vs_heuristic=age_aot / heuristic_aot,
        completion_gap_age_vs_delay=age_completion - delay_completion,
        completion_gap_heuristic_vs_delay=heuristic_completion - delay_completion,
        completion_ratio_delay_vs_heuristic=delay_completion / heuristic_completion,
    )


def summary_csv(summary: SummaryTable) -> str:
    return _csv_text(("metric", "value"), ((name, fmt(value)) for name, value in summary.model_dump().items()))


# Experiment config files


def experiment_config_pairs(cfg: ExperimentConfig) -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = [("format", "aot-experiment/1")]
    if cfg.seeds:
        pairs.append(("seeds", list(cfg.seeds)))
    else:
        pairs.append(("base_seed", cfg.base_seed))
        pairs.append(("count", cfg.count))
    pairs.append(("emax_grid", [float(e) for e in cfg.emax_grid]))
    pairs.append(("strategies", [s.value for s in cfg.strategies]))
    if cfg.output_dir is not None:
        pairs.append(("output_dir", str(cfg.output_dir)))
    pairs.extend((f"generation.{name}", value) for name, value in cfg.generation.model_dump().items())
    return pairs


def dump_experiment_config(cfg: ExperimentConfig) -> str:
    return keyvalue.dumps(experiment_config_pairs(cfg), header="AoT strategy comparison")


def load_experiment_config(text: str) -> ExperimentConfig:
    """Parse a config file; every key is optional and falls back to the model default."""
    values = keyvalue.loads(text)
    values.pop("format", None)
    data: dict[str, object] = {}
    generation: dict[str, str] = {}
    for key, raw in values.items():
        if key.startswith("generation."):
            field = key.removeprefix("generation.")
            if field not in GenerationConfig.model_fields:
                raise KeyValueFormatError(f"Unknown generation setting {field!r}")
            generation[field] = raw
        elif key in ("seeds", "emax_grid", "strategies"):
            data[key] = keyvalue.get_list(values, key)
        elif key in ("base_seed", "count", "output_dir"):
            data[key] = raw
        else:
            raise KeyValueFormatError(f"Unknown experiment setting {key!r}")
    if generation:
        data["generation"] = generation
    return ExperimentConfig.model_validate(data)


class ExperimentService:
    def __init__(self, settings: Settings, store: FileStore):
        self.settings = settings
        self.store = store

    def _solve_cells(self, cfg: ExperimentConfig, cells: list[Cell]) -> list[CellResult]:
        if self.settings.workers <= 1:
            return [run_cell(cell, cfg.generation, self.settings) for cell in cells]
        with ProcessPoolExecutor(max_workers=self.settings.workers) as pool:
            # map yields in submission order whatever the completion order
            return list(pool.map(
                run_cell,
                cells,
                [cfg.generation] * len(cells),
                [self.settings] * len(cells),
            ))

    def run_experiment(self, cfg: ExperimentConfig) -> list[ComparisonRow]:
        """Solve the whole grid and write the per-seed and aggregate tables."""
        cells = grid_cells(cfg)
        logger.info("Running %s cells (%s seeds, %s budgets, %s strategies) on %s worker(s)",
                    len(cells), len(cfg.seed_list), len(cfg.emax_grid), len(cfg.strategies), self.settings.workers)
        started = time.perf_counter()
        results = self._solve_cells(cfg, cells)
        rows = aggregate(results)
        for row in rows:
            logger.info("E_max %.3g %-16s mean sum AoT %s, mean completion %s (%s/%s feasible, %.2fs)",
                        row.e_max, row.strategy.value, fmt(row.mean_sum_age), fmt(row.mean_completion_time),
                        row.feasible_count, len(row.seeds), row.runtime)

        out = Path(cfg.output_dir) if cfg.output_dir is not None else Path()
        self.store.write_text(out / PER_SEED_FILE, per_seed_csv(results))
        self.store.write_text(out / AGGREGATE_FILE, aggregate_csv(rows))
        logger.info("Experiment finished in %.2fs", time.perf_counter() - started)
        return rows

    def summarize(self, aggregate_path: str | Path) -> SummaryTable:
        rows = read_aggregate_csv(self.store.read_text(aggregate_path))
        summary = compare_summary(rows)
        self.store.write_text(SUMMARY_FILE, summary_csv(summary))
        return summary
