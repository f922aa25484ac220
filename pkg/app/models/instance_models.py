from pydantic import BaseModel, ConfigDict, Field, model_validator


TaskKey = tuple[int, int]


class EnergyParams(BaseModel):
    """Physical constants of the local CPU and the uplink."""
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(description="Chip energy coefficient")
    omega: float = Field(description="CPU cycles per bit")
    tau: float = Field(description="Slot length in seconds")
    lambda0: float = Field(description="Transmit energy coefficient")
    m: int = Field(description="Monomial order of the transmit energy model")

    @property
    def alpha(self) -> float:
        return self.gamma * self.omega ** 3 / self.tau ** 2

    @property
    def lam(self) -> float:
        return self.lambda0 / self.tau ** (self.m - 1)


class Task(BaseModel):
    model_config = ConfigDict(frozen=True)

    app: int = Field(description="Application index n (1-based)")
    index: int = Field(description="Task index k within its application (1-based)")
    size_bits: float = Field(description="Data size L_nk in bits")
    gen_time: float = Field(description="Generation time in slot units")

    @property
    def key(self) -> TaskKey:
        return (self.app, self.index)


class ChannelTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    gains: tuple[float, ...] = Field(description="Channel gain h(t) for t = 1..T")

    def gain(self, slot: int) -> float:
        return self.gains[slot - 1]

    def window(self, start_slot: int, num_slots: int) -> tuple[float, ...]:
        return self.gains[start_slot - 1:start_slot - 1 + num_slots]


class Instance(BaseModel):
    """Immutable problem description."""
    model_config = ConfigDict(frozen=True)

    apps: tuple[tuple[Task, ...], ...]
    channel: ChannelTrace
    params: EnergyParams
    e_max: float = Field(description="Total energy budget in joules")
    tau0: float = Field(description="Scheduling start time in slot units")
    horizon: int = Field(description="Number of schedulable slots T")

    @property
    def num_apps(self) -> int:
        return len(self.apps)

    def tasks(self, app: int) -> tuple[Task, ...]:
        return self.apps[app - 1]

    def task(self, app: int, index: int) -> Task:
        return self.apps[app - 1][index - 1]

    def all_tasks(self) -> list[Task]:
        return [task for tasks in self.apps for task in tasks]

    @property
    def total_tasks(self) -> int:
        return sum(len(tasks) for tasks in self.apps)

    def with_e_max(self, e_max: float) -> "Instance":
        return self.model_copy(update={"e_max": e_max})

    def with_horizon(self, horizon: int) -> "Instance":
        """Truncate or extend by repeating the last gain so the trace still covers every slot."""
        gains = self.channel.gains[:horizon]
        if len(gains) < horizon and gains:
            gains = gains + (gains[-1],) * (horizon - len(gains))
        return self.model_copy(update={"horizon": horizon, "channel": ChannelTrace(gains=gains)})


class GenerationConfig(BaseModel):
    """Random instance generation settings; defaults reproduce the reference simulation setup."""
    model_config = ConfigDict(frozen=True)

    num_apps: int = Field(3, ge=1)
    tasks_per_app: int = Field(3, ge=1)
    gen_time_low: float = Field(1.0, gt=0)
    gen_time_high: float = Field(8.0, gt=0)
    tau0: float = Field(10.0, gt=0)
    tau: float = Field(0.01, gt=0, description="Slot length in seconds")
    size_low: float = Field(400.0, gt=0)
    size_high: float = Field(600.0, gt=0)
    gamma: float = Field(1e-28, gt=0)
    omega: float = Field(1e5, ge=1)
    gain_low: float = Field(1e-5, gt=0)
    gain_high: float = Field(1e-3, gt=0)
    lambda0: float = Field(1e-17, gt=0)
    m: int = Field(3, ge=2, le=5)
    e_max: float = Field(0.15, gt=0)
    horizon: int = Field(200, ge=1)
    integer_gen_times: bool = Field(False, description="Draw generation times on the integer grid")

    @model_validator(mode="after")
    def check_ranges(self) -> "GenerationConfig":
        for low, high, name in (
            (self.gen_time_low, self.gen_time_high, "gen_time"),
            (self.size_low, self.size_high, "size"),
            (self.gain_low, self.gain_high, "gain"),
        ):
            if low > high:
                raise ValueError(f"{name} range is empty: [{low}, {high}]")
        if self.gen_time_high > self.tau0:
            raise ValueError("Generation times must not exceed the scheduling start time tau0")
        return self
