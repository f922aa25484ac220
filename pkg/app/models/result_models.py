from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .energy_models import EnergyLedger, TaskPlan
from .instance_models import TaskKey
from .schedule_models import CompletionLog, Schedule


class Strategy(str, Enum):
    HEURISTIC = "heuristic"
    AGE_OPTIMAL = "age-optimal"
    DELAY_OPTIMAL = "delay-optimal"
    MEC_ONLY = "mec-only"
    MEC_ROUND_ROBIN = "mec-round-robin"


class OracleMode(str, Enum):
    AGE_OPTIMAL = "age-optimal"
    DELAY_OPTIMAL = "delay-optimal"
    MEC_ONLY = "mec-only"
    MEC_ROUND_ROBIN = "mec-round-robin"

    @property
    def offload_only(self) -> bool:
        return self in (OracleMode.MEC_ONLY, OracleMode.MEC_ROUND_ROBIN)


class StrategyResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: Strategy
    sum_age: float
    completion_time: int = Field(description="Slot in which the last task completes")
    schedule: Schedule
    completion_log: CompletionLog
    ledger: EnergyLedger
    order: tuple[int, ...] = Field(default=(), description="Application of each scheduled task, in processing order")


class OracleResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: OracleMode
    objective: float
    sum_age: float
    completion_time: int
    schedule: Schedule
    completion_log: CompletionLog
    ledger: EnergyLedger
    order: tuple[int, ...]
    slot_counts: tuple[int, ...]
    proven_optimal: bool


class Counterexample(BaseModel):
    model_config = ConfigDict(frozen=True)

    order: tuple[int, ...]
    slot_counts: tuple[int, ...]
    objective: float
    reason: str




class DeltaScore(BaseModel):
    """Net change in sum AoT from serving the head task of one application next."""
    model_config = ConfigDict(frozen=True)

    app: int
    task: TaskKey
    delta_r: float = Field(description="Age reduction from completing the task")
    delta_i: float = Field(description="Age increment of waiting applications")
    s_nk: int = Field(ge=1, description="Slots needed under the task's budget")
    plan: TaskPlan | None = Field(None, description="The minimum-slot plan the score was computed from")

    @property
    def delta(self) -> float:
        return self.delta_r - self.delta_i
