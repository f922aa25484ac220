from pydantic import BaseModel, ConfigDict, Field

from .instance_models import TaskKey


class EnergyLedger(BaseModel):
    """Assigned budget and consumed energy per task."""
    model_config = ConfigDict(frozen=True)

    e_max: float
    assigned: dict[TaskKey, float] = Field(default_factory=dict)
    consumed: dict[TaskKey, float] = Field(default_factory=dict)

    @property
    def total_consumed(self) -> float:
        return sum(self.consumed.values())

    @property
    def leftover(self) -> float:
        return self.e_max - self.total_consumed


class SlotPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    slot: int
    d_total: float
    d_loc: float
    d_off: float
    energy: float


class TaskPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    task: TaskKey
    start_slot: int
    num_slots: int
    per_slot: tuple[SlotPlan, ...]

    @property
    def energy(self) -> float:
        return sum(s.energy for s in self.per_slot)

    @property
    def end_slot(self) -> int:
        return self.start_slot + self.num_slots - 1
