from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from .instance_models import TaskKey


class SlotDecision(BaseModel):
    model_config = ConfigDict(frozen=True)

    slot: int
    task: TaskKey | None = None
    d_loc: float = 0.0
    d_off: float = 0.0

    @property
    def volume(self) -> float:
        return self.d_loc + self.d_off


class Schedule(BaseModel):
    """Per-slot decisions plus the absolute completion time of every task."""
    model_config = ConfigDict(frozen=True)

    decisions: tuple[SlotDecision, ...] = ()
    completion_times: dict[TaskKey, float] = Field(default_factory=dict)

    @property
    def makespan(self) -> int:
        busy = [d.slot for d in self.decisions if d.task is not None]
        return max(busy, default=0)


class CompletionLog(BaseModel):
    """Per application, the ordered (task index, completion time) pairs."""
    model_config = ConfigDict(frozen=True)

    entries: dict[int, tuple[tuple[int, float], ...]] = Field(default_factory=dict)

    def for_app(self, app: int) -> tuple[tuple[int, float], ...]:
        return self.entries.get(app, ())


class AgeTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    app: int
    ages: tuple[float, ...]
    overall: float


class ViolationKind(str, Enum):
    SLOT_CONFLICT = "slot-conflict"
    FCFS = "fcfs"
    PREEMPTION = "preemption"
    OVERDRAW = "overdraw"
    NEGATIVE_VOLUME = "negative-volume"
    IDLE_VOLUME = "idle-volume"
    UNKNOWN_TASK = "unknown-task"
    OUT_OF_HORIZON = "out-of-horizon"
    INCOMPLETE = "incomplete"
    COMPLETION_MISMATCH = "completion-mismatch"


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: ViolationKind
    message: str
    slot: int | None = None
    task: TaskKey | None = None
