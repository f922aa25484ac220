"""
Energy physics of local computing and offloading, and the per-task offloading optimizer.

Local computing of D bits in one slot costs alpha * D**3, offloading D bits
over a channel with gain h costs lam * D**m / h. With m = 3 the optimal
local/offload split, the per-slot minimum energy and the cross-slot data
partition all have closed forms; the offload-only variant works for any m.
"""
import logging
import math
from collections.abc import Sequence

import numpy as np

from .errors import InfeasiblePlanError, NegativeVolumeError, NonPositiveGainError, UnsupportedOrderError
from .models import EnergyParams, Instance, SlotPlan, Task, TaskPlan


logger = logging.getLogger(__name__)

# Relative slack when comparing an energy against a budget computed from the same formula
BUDGET_RTOL = 1e-12


def _check_volume(bits: float, name: str) -> None:
    if bits < 0:
        raise NegativeVolumeError(f"{name} must be non-negative, got {bits}")


def _check_gain(h: float) -> None:
    if not h > 0:
        raise NonPositiveGainError(f"Channel gain must be positive, got {h}")


def _require_cubic(p: EnergyParams) -> None:
    if p.m != 3:
        raise UnsupportedOrderError(p.m)


def fits_budget(energy: float, budget: float) -> bool:
    return energy <= budget * (1.0 + BUDGET_RTOL)


def cpu_frequency(d_loc: float, p: EnergyParams) -> float:
    """CPU cycles per second needed to process d_loc bits locally within one slot."""
    _check_volume(d_loc, "d_loc")
    return p.omega * d_loc / p.tau


def local_energy(d_loc: float, p: EnergyParams) -> float:
    _check_volume(d_loc, "d_loc")
    return p.alpha * d_loc ** 3


def offload_energy(d_off: float, h: float, p: EnergyParams) -> float:
    _check_volume(d_off, "d_off")
    _check_gain(h)
    return p.lam * d_off ** p.m / h


def slot_energy(d_total: float, d_loc: float, h: float, p: EnergyParams) -> float:
    """Energy of one slot processing d_total bits, d_loc of them locally and the rest offloaded."""
    return local_energy(d_loc, p) + offload_energy(d_total - d_loc, h, p)


def split_ratio(h: float, p: EnergyParams) -> float:
    """sqrt(alpha * h / lam): offloaded bits per locally computed bit at the optimum."""
    _check_gain(h)
    return math.sqrt(p.alpha * h / p.lam)


def optimal_split(d_total: float, h: float, p: EnergyParams) -> tuple[float, float]:
    _require_cubic(p)
    _check_volume(d_total, "d_total")
    d_loc = d_total / (1.0 + split_ratio(h, p))
    return d_loc, d_total - d_loc


def slot_min_energy(d_total: float, h: float, p: EnergyParams) -> float:
    _require_cubic(p)
    _check_volume(d_total, "d_total")
    return p.alpha * d_total ** 3 / (1.0 + split_ratio(h, p)) ** 2


def offload_only_slot_energy(d_total: float, h: float, p: EnergyParams) -> float:
    """Energy of one slot that offloads all d_total bits: lam * D**m / h, for any order m."""
    return offload_energy(d_total, h, p)


def _slot_weights(gains: Sequence[float], p: EnergyParams, offload_only: bool) -> np.ndarray:
    """Per-slot weights the optimal cross-slot partition is proportional to."""
    h = np.asarray(gains, dtype=float)
    if h.size == 0:
        raise ValueError("Cannot partition data over an empty slot window")
    if np.any(h <= 0):
        raise NonPositiveGainError("Channel gains must be positive")
    if offload_only:
        return h ** (1.0 / (p.m - 1))
    _require_cubic(p)
    return 1.0 + np.sqrt(p.alpha * h / p.lam)


def partition_across_slots(d_total: float, gains: Sequence[float], p: EnergyParams) -> tuple[float, ...]:
    _check_volume(d_total, "d_total")
    weights = _slot_weights(gains, p, offload_only=False)
    return tuple(float(d) for d in d_total * weights / weights.sum())


def offload_only_partition(d_total: float, gains: Sequence[float], p: EnergyParams) -> tuple[float, ...]:
    """Minimum-energy partition when every bit is offloaded: D(t) proportional to h(t)**(1/(m-1))."""
    _check_volume(d_total, "d_total")
    weights = _slot_weights(gains, p, offload_only=True)
    return tuple(float(d) for d in d_total * weights / weights.sum())


def window_min_energy(d_total: float, gains: Sequence[float], p: EnergyParams, offload_only: bool) -> float:
    h = np.asarray(gains, dtype=float)
    weights = _slot_weights(h, p, offload_only)
    volumes = d_total * weights / weights.sum()
    if offload_only:
        return float(np.sum(p.lam * volumes ** p.m / h))
    return float(np.sum(p.alpha * volumes ** 3 / (1.0 + np.sqrt(p.alpha * h / p.lam)) ** 2))


def plan_task(task: Task, start_slot: int, num_slots: int, inst: Instance, offload_only: bool = False) -> TaskPlan:
    """Minimum-energy plan processing the whole task in the given slot window."""
    if start_slot < 1 or start_slot + num_slots - 1 > inst.horizon or num_slots < 1:
        raise InfeasiblePlanError(
            f"Window of {num_slots} slots from slot {start_slot} does not fit horizon {inst.horizon}"
        )
    p = inst.params
    gains = inst.channel.window(start_slot, num_slots)
    if offload_only:
        volumes = offload_only_partition(task.size_bits, gains, p)
    else:
        volumes = partition_across_slots(task.size_bits, gains, p)

    per_slot = []
    for offset, (d_total, h) in enumerate(zip(volumes, gains)):
        if offload_only:
            d_loc, d_off = 0.0, d_total
            energy = offload_only_slot_energy(d_total, h, p)
        else:
            d_loc, d_off = optimal_split(d_total, h, p)
            energy = slot_energy(d_total, d_loc, h, p)
        per_slot.append(SlotPlan(slot=start_slot + offset, d_total=d_total, d_loc=d_loc, d_off=d_off, energy=energy))
    return TaskPlan(task=task.key, start_slot=start_slot, num_slots=num_slots, per_slot=tuple(per_slot))


def min_slots_plan(
    task: Task,
    start_slot: int,
    budget: float,
    inst: Instance,
    offload_only: bool = False,
) -> TaskPlan:
    """
    Feasibility test: the plan with the fewest slots whose energy fits the budget.

    Tries s = 1, 2, ... slots starting at start_slot, partitions the task over
    the window with the minimum-energy ratio and returns the first window
    whose total energy does not exceed the budget.
    """
    if not budget > 0:
        raise ValueError(f"Task budget must be positive, got {budget}")
    p = inst.params
    max_slots = inst.horizon - start_slot + 1
    for num_slots in range(1, max_slots + 1):
        energy = window_min_energy(task.size_bits, inst.channel.window(start_slot, num_slots), p, offload_only)
        if fits_budget(energy, budget):
            logger.debug("Task %s fits budget %.6g in %s slots from slot %s", task.key, budget, num_slots, start_slot)
            return plan_task(task, start_slot, num_slots, inst, offload_only)
    raise InfeasiblePlanError(
        f"Task {task.key} cannot meet budget {budget:.6g} J before horizon {inst.horizon} (start slot {start_slot})"
    )


class WindowEnergy:
    """
    Minimum energy of processing a task in any slot window, from prefix sums of slot weights.

    With local and offload computing (m = 3) the minimum over window W is
    alpha * L**3 / (sum_W w)**2 with w = 1 + sqrt(alpha*h/lam); offloading
    only, it is lam * L**m / (sum_W w)**(m-1) with w = h**(1/(m-1)).
    """

    def __init__(self, inst: Instance, offload_only: bool = False):
        self.params = inst.params
        self.offload_only = offload_only
        weights = _slot_weights(inst.channel.gains, inst.params, offload_only)
        self._prefix = np.concatenate(([0.0], np.cumsum(weights))).tolist()
        if offload_only:
            self._coefficient = self.params.lam
            self._size_power = self.params.m
            self._weight_power = self.params.m - 1
        else:
            self._coefficient = self.params.alpha
            self._size_power = 3
            self._weight_power = 2

    def energy(self, size_bits: float, start_slot: int, end_slot: int) -> float:
        weight = self._prefix[end_slot] - self._prefix[start_slot - 1]
        return self._coefficient * size_bits ** self._size_power / weight ** self._weight_power
