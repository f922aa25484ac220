"""
Greedy age-based task scheduling with per-task offloading.

Each round scores the head task of every application by the age it removes
minus the age the other applications accumulate while it runs, serves the
best one with the fewest slots its energy budget allows, and repeats. A
second phase hands all energy left over to one task at a time, replays the
phase-one order and keeps the best run. Each rerun starts from the energies
the previous one consumed.
"""
import logging
import math
from collections.abc import Sequence
from typing import NamedTuple

from pydantic import BaseModel, Field

from .aot import initial_age, sum_age
from .energy import min_slots_plan
from .errors import InfeasiblePlanError
from .instances import ensure_valid
from .models import (
    CompletionLog,
    DeltaScore,
    EnergyLedger,
    Instance,
    Schedule,
    Strategy,
    StrategyResult,
    TaskKey,
    TaskPlan,
)
from .schedules import schedule_from_plans


logger = logging.getLogger(__name__)


class GreedyState(BaseModel):
    """Mutable progress of one greedy pass; ages are taken at the end of the last committed slot."""

    current_slot: int
    num: dict[int, int]
    empty: dict[int, bool]
    ages: dict[int, float]
    assigned: dict[TaskKey, float]
    consumed: dict[TaskKey, float] = Field(default_factory=dict)
    order: list[TaskKey] = Field(default_factory=list)
    plans: list[TaskPlan] = Field(default_factory=list)

    @classmethod
    def start(cls, inst: Instance, ledger: EnergyLedger) -> "GreedyState":
        apps = range(1, inst.num_apps + 1)
        return cls(
            current_slot=1,
            num={n: 1 for n in apps},
            empty={n: False for n in apps},
            ages={n: initial_age(inst, n) for n in apps},
            assigned=dict(ledger.assigned),
        )

    def active_apps(self) -> list[int]:
        return [n for n, done in self.empty.items() if not done]

    def head(self, app: int) -> TaskKey:
        return (app, self.num[app])

    def commit(self, inst: Instance, plan: TaskPlan) -> None:
        app, k = plan.task
        s = plan.num_slots
        for n in self.active_apps():
            if n != app:
                self.ages[n] += s
        if k < len(inst.tasks(app)):
            self.num[app] = k + 1
            self.ages[app] = inst.tau0 + plan.end_slot - inst.task(app, k + 1).gen_time
        else:
            self.empty[app] = True
            self.ages[app] = 0.0
        self.consumed[plan.task] = plan.energy
        self.order.append(plan.task)
        self.plans.append(plan)
        self.current_slot = plan.end_slot + 1


class GreedyPass(NamedTuple):
    schedule: Schedule
    completion_log: CompletionLog
    ledger: EnergyLedger
    order: list[TaskKey]


def initial_energy_allocation(inst: Instance) -> EnergyLedger:
    """Split the energy budget over all tasks in proportion to the cube of their size."""
    cubes = {task.key: task.size_bits ** 3 for task in inst.all_tasks()}
    total = math.fsum(cubes.values())
    assigned = {key: cube / total * inst.e_max for key, cube in cubes.items()}
    return EnergyLedger(e_max=inst.e_max, assigned=assigned)


def delta_score(state: GreedyState, app: int, inst: Instance) -> DeltaScore:
    key = state.head(app)
    task = inst.task(*key)
    plan = min_slots_plan(task, state.current_slot, state.assigned[key], inst)
    s = plan.num_slots

    if key[1] < len(inst.tasks(app)):
        delta_r = inst.task(app, key[1] + 1).gen_time - task.gen_time
    else:
        # Last task: the age at its completion slot drops to zero one slot later
        delta_r = state.ages[app] + s + 1
    delta_i = s * len(state.active_apps())
    return DeltaScore(app=app, task=key, delta_r=delta_r, delta_i=delta_i, s_nk=s, plan=plan)


def _select(state: GreedyState, inst: Instance) -> TaskPlan:
    best: DeltaScore | None = None
    for app in state.active_apps():
        try:
            score = delta_score(state, app, inst)
        except InfeasiblePlanError as e:
            logger.debug("Skipping application %s this round: %s", app, e)
            continue
        logger.debug("Slot %s: app %s delta=%.6g (r=%.6g, i=%.6g, s=%s)",
                     state.current_slot, app, score.delta, score.delta_r, score.delta_i, score.s_nk)
        # Strict comparison keeps the lowest application index on ties
        if best is None or score.delta > best.delta:
            best = score
    if best is None:
        raise InfeasiblePlanError(
            f"No remaining application fits its energy budget before horizon {inst.horizon} "
            f"(slot {state.current_slot})"
        )
    return best.plan


def _check_fixed_order(inst: Instance, fixed_order: Sequence[int]) -> None:
    counts = {n: 0 for n in range(1, inst.num_apps + 1)}
    for n in fixed_order:
        if n not in counts:
            raise ValueError(f"Fixed order names unknown application {n}")
        counts[n] += 1
    for n, count in counts.items():
        if count != len(inst.tasks(n)):
            raise ValueError(f"Fixed order serves application {n} {count} times, it has {len(inst.tasks(n))} tasks")


def greedy_pass(inst: Instance, ledger: EnergyLedger, fixed_order: Sequence[int] | None = None) -> GreedyPass:
    """
    Serve every task once, either by best delta score or following a fixed application order.

    The fixed order lists the application served at each step; within an
    application tasks always run first-come-first-served.
    """
    if fixed_order is not None:
        _check_fixed_order(inst, fixed_order)
    state = GreedyState.start(inst, ledger)
    step = 0
    while state.active_apps():
        if fixed_order is None:
            plan = _select(state, inst)
        else:
            key = state.head(fixed_order[step])
            plan = min_slots_plan(inst.task(*key), state.current_slot, state.assigned[key], inst)
        state.commit(inst, plan)
        step += 1

    entries: dict[int, list[tuple[int, float]]] = {}
    for plan in state.plans:
        entries.setdefault(plan.task[0], []).append((plan.task[1], inst.tau0 + plan.end_slot))
    log = CompletionLog(entries={n: tuple(items) for n, items in entries.items()})
    result_ledger = EnergyLedger(e_max=inst.e_max, assigned=state.assigned, consumed=state.consumed)
    return GreedyPass(
        schedule=schedule_from_plans(inst, state.plans),
        completion_log=log,
        ledger=result_ledger,
        order=state.order,
    )


def _redistributed_budgets(inst: Instance, energies: dict[TaskKey, float], target: TaskKey) -> EnergyLedger:
    budgets = dict(energies)
    budgets[target] = inst.e_max - math.fsum(energies.values()) + energies[target]
    return EnergyLedger(e_max=inst.e_max, assigned=budgets)


def redistribution_runs(inst: Instance, base: GreedyPass) -> list[tuple[TaskKey, GreedyPass]]:
    """
    Hand the leftover energy to each task of the phase-one order in turn and replay that order.

    The runs are chained: every feasible run's consumed energies are the
    starting point of the next position. A run that misses the horizon is
    skipped and the chain continues from the last feasible one.
    """
    apps_order = [n for n, _ in base.order]
    energies = dict(base.ledger.consumed)
    runs = []
    for position, target in enumerate(base.order):
        try:
            run = greedy_pass(inst, _redistributed_budgets(inst, energies, target), fixed_order=apps_order)
        except InfeasiblePlanError as e:
            logger.warning("Leftover energy on position %s gives no feasible rerun: %s", position, e)
            continue
        runs.append((target, run))
        energies = dict(run.ledger.consumed)
    return runs


def schedule_heuristic(inst: Instance) -> StrategyResult:
    ensure_valid(inst)
    base = greedy_pass(inst, initial_energy_allocation(inst))
    apps_order = [n for n, _ in base.order]
    logger.debug("Greedy order %s, leftover %.6g J", base.order, base.ledger.leftover)

    candidates = [base] + [run for _, run in redistribution_runs(inst, base)]
    scored = [(sum_age(inst, run.completion_log), run.schedule.makespan, i) for i, run in enumerate(candidates)]
    best_age, best_makespan, best_index = min(scored)
    best = candidates[best_index]
    logger.info("Heuristic: sum AoT %.6g, completion %s slots (candidate %s of %s)",
                best_age, best_makespan, best_index, len(candidates))
    return StrategyResult(
        strategy=Strategy.HEURISTIC,
        sum_age=best_age,
        completion_time=best_makespan,
        schedule=best.schedule,
        completion_log=best.completion_log,
        ledger=best.ledger,
        order=tuple(apps_order),
    )
