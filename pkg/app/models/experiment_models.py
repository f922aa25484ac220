from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .instance_models import GenerationConfig
from .result_models import Strategy


DEFAULT_EMAX_GRID = (0.12, 0.13, 0.14, 0.15, 0.16, 0.17, 0.18)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_seed: int = Field(0, ge=0)
    count: int = Field(50, ge=1)
    seeds: tuple[int, ...] | None = Field(None, description="Explicit seed list, overrides base_seed/count")
    emax_grid: tuple[float, ...] = DEFAULT_EMAX_GRID
    strategies: tuple[Strategy, ...] = (
        Strategy.HEURISTIC,
        Strategy.AGE_OPTIMAL,
        Strategy.DELAY_OPTIMAL,
        Strategy.MEC_ONLY,
    )
    generation: GenerationConfig = Field(default_factory=GenerationConfig)
    output_dir: Path | None = None

    @field_validator("emax_grid")
    @classmethod
    def check_grid(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        if not grid or any(e <= 0 for e in grid):
            raise ValueError("E_max grid must be non-empty with positive values")
        return tuple(sorted(grid))

    @field_validator("strategies")
    @classmethod
    def check_strategies(cls, strategies: tuple[Strategy, ...]) -> tuple[Strategy, ...]:
        if not strategies:
            raise ValueError("At least one strategy is required")
        return tuple(dict.fromkeys(strategies))

    @property
    def seed_list(self) -> tuple[int, ...]:
        if self.seeds:
            return self.seeds
        return tuple(range(self.base_seed, self.base_seed + self.count))


class ComparisonRow(BaseModel):
    """One point of the strategy comparison: averages over the seeds at one E_max."""
    model_config = ConfigDict(frozen=True)

    e_max: float
    strategy: Strategy
    mean_sum_age: float | None
    mean_completion_time: float | None
    seeds: tuple[int, ...]
    sum_ages: tuple[float | None, ...]
    completion_times: tuple[float | None, ...]
    runtime: float = 0.0

    @property
    def feasible_count(self) -> int:
        return sum(1 for value in self.sum_ages if value is not None)


class SummaryTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    aot_gap_delay_vs_age: float
    aot_gap_delay_vs_heuristic: float
    aot_ratio_age_vs_heuristic: float
    completion_gap_age_vs_delay: float
    completion_gap_heuristic_vs_delay: float
    completion_ratio_delay_vs_heuristic: float
