"""
Schedule replay: legality checking, completion logs and energy audits.
"""
import logging
from collections import defaultdict
from collections.abc import Iterable

from .energy import local_energy, offload_energy
from .models import (
    CompletionLog,
    Instance,
    Schedule,
    SlotDecision,
    TaskKey,
    TaskPlan,
    Violation,
    ViolationKind,
)


logger = logging.getLogger(__name__)

# A task is complete once its remaining size is at most this many bits
BIT_TOLERANCE = 1e-6


def _replay(inst: Instance, sched: Schedule) -> tuple[list[Violation], dict[TaskKey, int]]:
    sizes = {task.key: task.size_bits for task in inst.all_tasks()}
    remaining = dict(sizes)
    done_at: dict[TaskKey, int] = {}
    violations: list[Violation] = []

    by_slot: dict[int, list[SlotDecision]] = defaultdict(list)
    for decision in sched.decisions:
        by_slot[decision.slot].append(decision)

    active: TaskKey | None = None
    last_slot = max(by_slot, default=0)
    for slot in sorted(set(by_slot) | set(range(1, last_slot + 1))):
        decisions = by_slot.get(slot, [])
        if decisions and not 1 <= slot <= inst.horizon:
            violations.append(Violation(
                kind=ViolationKind.OUT_OF_HORIZON,
                message=f"slot {slot} is outside 1..{inst.horizon}",
                slot=slot,
            ))
        selected = [d for d in decisions if d.task is not None]
        if len(selected) > 1:
            violations.append(Violation(
                kind=ViolationKind.SLOT_CONFLICT,
                message=f"slot {slot}: {len(selected)} tasks selected, at most one allowed",
                slot=slot,
            ))
        for d in decisions:
            if d.task is None and (d.d_loc != 0 or d.d_off != 0):
                violations.append(Violation(
                    kind=ViolationKind.IDLE_VOLUME,
                    message=f"slot {slot}: data processed without a selected task",
                    slot=slot,
                ))

        selected_keys = {d.task for d in selected}
        if active is not None and active not in selected_keys:
            violations.append(Violation(
                kind=ViolationKind.PREEMPTION,
                message=f"slot {slot}: task {active} interrupted before completion",
                slot=slot,
                task=active,
            ))
            active = None

        for d in selected:
            key = d.task
            if key not in sizes:
                violations.append(Violation(
                    kind=ViolationKind.UNKNOWN_TASK,
                    message=f"slot {slot}: unknown task {key}",
                    slot=slot,
                    task=key,
                ))
                continue
            if d.d_loc < 0 or d.d_off < 0:
                violations.append(Violation(
                    kind=ViolationKind.NEGATIVE_VOLUME,
                    message=f"slot {slot}: negative data volume for task {key}",
                    slot=slot,
                    task=key,
                ))
            n, k = key
            unfinished = [j for j in range(1, k) if (n, j) not in done_at]
            if unfinished:
                violations.append(Violation(
                    kind=ViolationKind.FCFS,
                    message=f"slot {slot}: task {key} processed before task {(n, unfinished[0])} completed",
                    slot=slot,
                    task=key,
                ))
            if d.volume > remaining[key] + BIT_TOLERANCE:
                violations.append(Violation(
                    kind=ViolationKind.OVERDRAW,
                    message=f"slot {slot}: {d.volume:.6g} bits exceed remaining {remaining[key]:.6g} of task {key}",
                    slot=slot,
                    task=key,
                ))
            remaining[key] = max(remaining[key] - d.volume, 0.0)
            if key in done_at:
                continue
            if remaining[key] <= BIT_TOLERANCE:
                done_at[key] = slot
                if active == key:
                    active = None
            else:
                active = key

    for key in sorted(sizes):
        if key not in done_at:
            violations.append(Violation(
                kind=ViolationKind.INCOMPLETE,
                message=f"task ({key[0]},{key[1]}) incomplete: {remaining[key]:.6g} bits left",
                task=key,
            ))
    for key, claimed in sorted(sched.completion_times.items()):
        if key in done_at and abs(claimed - (inst.tau0 + done_at[key])) > 1e-9:
            violations.append(Violation(
                kind=ViolationKind.COMPLETION_MISMATCH,
                message=f"task {key}: recorded completion {claimed} but replay completes at {inst.tau0 + done_at[key]}",
                task=key,
            ))
    return violations, done_at


def check_schedule(inst: Instance, sched: Schedule) -> list[Violation]:
    """
    Replay a schedule slot by slot and report every broken scheduling rule.

    Checks one task per slot, first-come-first-served order within each
    application, non-preemption, per-slot volume against the remaining task
    size, and that every task is completed. An empty list means the
    schedule is legal; the energy limit is audited by `schedule_energy`.
    """
    violations, _ = _replay(inst, sched)
    return violations


def build_completion_log(inst: Instance, sched: Schedule) -> CompletionLog:
    _, done_at = _replay(inst, sched)
    entries: dict[int, list[tuple[int, float]]] = defaultdict(list)
    for (n, k), slot in sorted(done_at.items()):
        entries[n].append((k, inst.tau0 + slot))
    return CompletionLog(entries={n: tuple(items) for n, items in entries.items()})


def schedule_energy(inst: Instance, sched: Schedule) -> float:
    """Total energy spent by the schedule."""
    total = 0.0
    for d in sched.decisions:
        if d.task is None:
            continue
        total += local_energy(d.d_loc, inst.params) + offload_energy(d.d_off, inst.channel.gain(d.slot), inst.params)
    return total


def schedule_from_plans(inst: Instance, plans: Iterable[TaskPlan]) -> Schedule:
    decisions = []
    completion_times = {}
    for plan in plans:
        for step in plan.per_slot:
            decisions.append(SlotDecision(slot=step.slot, task=plan.task, d_loc=step.d_loc, d_off=step.d_off))
        completion_times[plan.task] = inst.tau0 + plan.end_slot
    decisions.sort(key=lambda d: d.slot)
    return Schedule(decisions=tuple(decisions), completion_times=completion_times)
