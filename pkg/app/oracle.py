"""
Exact solver for desk-scale instances.

An optimal schedule never leaves a slot idle before a task (the task could
absorb the slot without finishing later and with less energy), so a
solution is an interleaving of the applications' task queues plus the
completion slot of every task. The search walks that space slot by slot:
a node is (tasks done per application, current slot) and every label on it
is a partial schedule with its objective so far and its energy so far.
Labels are pruned by

* the energy budget, including a lower bound on what the remaining tasks need,
* a lower bound on the objective against the incumbent,
* dominance: a label no better in objective and energy than another on the
  same node is dropped; with equal objectives it must also lose the
  tie-break below.

Because the future cost of a label only depends on its node, the surviving
labels contain an optimal solution. Equal objectives go to the smaller
completion time, then the lexicographically smaller processing order, then
the earlier completion slots. Per-task energy for a window is the
closed-form minimum from `energy.WindowEnergy`.
"""
import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Callable, Iterator
from typing import Literal, NamedTuple

from .aot import generation_gaps, sum_age
from .energy import BUDGET_RTOL, WindowEnergy, plan_task, window_min_energy
from .errors import InfeasibleInstanceError, NodeLimitExceededError
from .heuristic import initial_energy_allocation
from .instances import ensure_valid
from .models import CompletionLog, Counterexample, EnergyLedger, Instance, OracleMode, OracleResult, TaskKey
from .schedules import build_completion_log, schedule_from_plans


logger = logging.getLogger(__name__)

OBJECTIVE_TOL = 1e-9

DelayObjective = Literal["makespan", "sum"]

Path = tuple[tuple[int, int], ...]  # (application, completion slot) per processed task


class SearchNode(NamedTuple):
    objective: float
    energy: float
    path: Path


class _Candidate(NamedTuple):
    objective: float
    makespan: int
    energy: float
    path: Path

    def better_than(self, other: "_Candidate | None") -> bool:
        if other is None:
            return True
        if self.objective < other.objective - OBJECTIVE_TOL:
            return True
        if self.objective > other.objective + OBJECTIVE_TOL:
            return False
        return (self.makespan, _tie_key(self.path)) < (other.makespan, _tie_key(other.path))


def _order(path: Path) -> tuple[int, ...]:
    return tuple(app for app, _ in path)


def _tie_key(path: Path) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return _order(path), tuple(end for _, end in path)


def round_robin_order(inst: Instance) -> tuple[int, ...]:
    """Cycle through the applications, skipping those whose queue is empty."""
    remaining = {n: len(inst.tasks(n)) for n in range(1, inst.num_apps + 1)}
    order = []
    while any(remaining.values()):
        for n in remaining:
            if remaining[n]:
                order.append(n)
                remaining[n] -= 1
    return tuple(order)


class _Objective:
    """Per-task objective terms; every term is non-decreasing in the completion slot."""

    def __init__(self, inst: Instance, mode: OracleMode, delay_objective: DelayObjective):
        self.inst = inst
        self.makespan = mode == OracleMode.DELAY_OPTIMAL and delay_objective == "makespan"
        self.completion_sum = mode == OracleMode.DELAY_OPTIMAL and delay_objective == "sum"
        self.gaps = {n: generation_gaps(inst, n) for n in range(1, inst.num_apps + 1)}
        self.counts = [len(inst.tasks(n)) for n in range(1, inst.num_apps + 1)]
        self._bounds: dict[tuple[tuple[int, ...], int], float] = {}

    def term(self, app: int, k: int, slot: int) -> float:
        if self.makespan:
            return 0.0
        if self.completion_sum:
            return float(slot)
        if k < self.counts[app - 1]:
            return self.gaps[app][k - 1] * slot
        return slot * (self.inst.tau0 - self.inst.task(app, k).gen_time) + slot * (slot + 1) / 2

    def remaining_bound(self, progress: tuple[int, ...], slot: int) -> float:
        """Lower bound on the objective still to come when `progress` tasks are done by `slot`."""
        if self.makespan:
            return slot + sum(total - done for total, done in zip(self.counts, progress))
        cached = self._bounds.get((progress, slot))
        if cached is not None:
            return cached
        bound = 0.0
        for n, (total, done) in enumerate(zip(self.counts, progress), start=1):
            for k in range(done + 1, total + 1):
                bound += self.term(n, k, slot + k - done)
        self._bounds[(progress, slot)] = bound
        return bound

    def latest_makespan(self, incumbent: float, horizon: int) -> int:
        """No schedule finishing after this slot can reach the incumbent objective."""
        if self.makespan or self.completion_sum:
            return min(horizon, int(math.floor(incumbent + OBJECTIVE_TOL)))
        # The application finishing last contributes at least c(c+1)/2
        c = int(math.floor((math.sqrt(8 * incumbent + 1) - 1) / 2)) + 1
        return min(horizon, max(c, 1))


class _LabelStore:
    def __init__(self):
        self._buckets: dict[int, dict[tuple[int, ...], list[SearchNode]]] = defaultdict(dict)

    def pop(self, slot: int) -> dict[tuple[int, ...], list[SearchNode]]:
        return self._buckets.pop(slot, {})

    def insert(self, progress: tuple[int, ...], slot: int, node: SearchNode) -> None:
        labels = self._buckets[slot].setdefault(progress, [])
        for other in labels:
            if _dominates(other, node):
                return
        labels[:] = [other for other in labels if not _dominates(node, other)]
        labels.append(node)


def _dominates(a: SearchNode, b: SearchNode) -> bool:
    """Labels on one node share every continuation, so a only needs to win now."""
    if a.energy > b.energy or a.objective > b.objective + OBJECTIVE_TOL:
        return False
    if a.objective < b.objective - OBJECTIVE_TOL:
        return True
    return _tie_key(a.path) <= _tie_key(b.path)


class ExactSearch:
    def __init__(
        self,
        inst: Instance,
        mode: OracleMode,
        node_limit: int,
        delay_objective: DelayObjective = "makespan",
    ):
        self.inst = inst
        self.mode = mode
        self.node_limit = node_limit
        self.objective = _Objective(inst, mode, delay_objective)
        self.window = WindowEnergy(inst, offload_only=mode.offload_only)
        self.sizes = {task.key: task.size_bits for task in inst.all_tasks()}
        self.counts = tuple(len(inst.tasks(n)) for n in range(1, inst.num_apps + 1))
        self.budget = inst.e_max * (1.0 + BUDGET_RTOL)
        self.fixed_order = round_robin_order(inst) if mode == OracleMode.MEC_ROUND_ROBIN else None
        self.best: _Candidate | None = None
        self.latest = inst.horizon
        self.expansions = 0
        self._energy_bounds: dict[tuple[tuple[int, ...], int, int], float] = {}

    def _next_apps(self, progress: tuple[int, ...]) -> Iterator[int]:
        if self.fixed_order is not None:
            yield self.fixed_order[sum(progress)]
            return
        for n, (done, total) in enumerate(zip(progress, self.counts), start=1):
            if done < total:
                yield n

    def _offer(self, candidate: _Candidate) -> None:
        if candidate.better_than(self.best):
            self.best = candidate
            self.latest = self.objective.latest_makespan(candidate.objective, self.inst.horizon)
            logger.debug("Incumbent %.6g (makespan %s, order %s)", candidate.objective, candidate.makespan,
                         _order(candidate.path))

    def _evaluate(self, path: Path) -> _Candidate | None:
        """Objective and energy of a complete path, None when it breaks the energy budget."""
        done = [0] * len(self.counts)
        start, objective, energy = 1, 0.0, 0.0
        for app, end in path:
            done[app - 1] += 1
            k = done[app - 1]
            objective += self.objective.term(app, k, end)
            energy += self.window.energy(self.sizes[(app, k)], start, end)
            start = end + 1
        final = objective + self.objective.remaining_bound(tuple(done), start - 1)
        if energy > self.budget:
            return None
        return _Candidate(final, start - 1, energy, path)

    def _seed_incumbent(self) -> None:
        """Serve a fixed order, each task with the fewest slots its share of the budget allows."""
        order = self.fixed_order or round_robin_order(self.inst)
        shares = initial_energy_allocation(self.inst).assigned
        done = [0] * len(self.counts)
        path = []
        start = 1
        for app in order:
            done[app - 1] += 1
            key = (app, done[app - 1])
            end = start
            while end <= self.inst.horizon and self.window.energy(self.sizes[key], start, end) > shares[key]:
                end += 1
            if end > self.inst.horizon:
                return
            path.append((app, end))
            start = end + 1
        candidate = self._evaluate(tuple(path))
        if candidate is not None:
            self._offer(candidate)

    def _remaining_energy_bound(self, progress: tuple[int, ...], slot: int) -> float:
        """Energy the unserved tasks need at least if all of them end by the latest useful slot."""
        if slot >= self.latest:
            return math.inf if sum(progress) < sum(self.counts) else 0.0
        key = (progress, slot, self.latest)
        if key not in self._energy_bounds:
            self._energy_bounds[key] = math.fsum(
                self.window.energy(self.sizes[(n, k)], slot + 1, self.latest)
                for n, (done, total) in enumerate(zip(progress, self.counts), start=1)
                for k in range(done + 1, total + 1)
            )
        return self._energy_bounds[key]

    def _expand(self, store: _LabelStore, progress: tuple[int, ...], slot: int, node: SearchNode) -> None:
        for app in self._next_apps(progress):
            k = progress[app - 1] + 1
            size = self.sizes[(app, k)]
            after = progress[:app - 1] + (k,) + progress[app:]
            complete = sum(after) == sum(self.counts)
            for end in range(slot + 1, self.inst.horizon + 1):
                objective = node.objective + self.objective.term(app, k, end)
                bound = objective + self.objective.remaining_bound(after, end)
                if end > self.latest or (self.best is not None and bound > self.best.objective + OBJECTIVE_TOL):
                    break
                energy = node.energy + self.window.energy(size, slot + 1, end)
                if energy + (0.0 if complete else self._remaining_energy_bound(after, end)) > self.budget:
                    continue
                path = node.path + ((app, end),)
                if complete:
                    self._offer(_Candidate(bound, end, energy, path))
                else:
                    store.insert(after, end, SearchNode(objective, energy, path))

    def run(self) -> tuple[_Candidate, bool]:
        self._seed_incumbent()
        store = _LabelStore()
        store.insert(tuple(0 for _ in self.counts), 0, SearchNode(0.0, 0.0, ()))
        for slot in range(0, self.inst.horizon + 1):
            level = store.pop(slot)
            for progress in sorted(level):
                for node in level[progress]:
                    self.expansions += 1
                    if self.expansions > self.node_limit:
                        logger.warning("Node limit %s reached at slot %s", self.node_limit, slot)
                        if self.best is None:
                            raise NodeLimitExceededError(
                                f"Node limit {self.node_limit} reached before any feasible schedule was found"
                            )
                        return self.best, False
                    self._expand(store, progress, slot, node)
        if self.best is None:
            raise InfeasibleInstanceError(
                f"No schedule meets E_max = {self.inst.e_max:.6g} J within {self.inst.horizon} slots"
            )
        logger.debug("Search finished after %s expansions", self.expansions)
        return self.best, True


def _build_result(inst: Instance, mode: OracleMode, path: Path, objective: float, proven: bool) -> OracleResult:
    done = [0] * inst.num_apps
    plans = []
    start = 1
    for app, end in path:
        done[app - 1] += 1
        plans.append(plan_task(inst.task(app, done[app - 1]), start, end - start + 1, inst, mode.offload_only))
        start = end + 1
    schedule = schedule_from_plans(inst, plans)
    consumed: dict[TaskKey, float] = {plan.task: plan.energy for plan in plans}
    log = build_completion_log(inst, schedule)
    return OracleResult(
        mode=mode,
        objective=objective,
        sum_age=sum_age(inst, log),
        completion_time=schedule.makespan,
        schedule=schedule,
        completion_log=log,
        ledger=EnergyLedger(e_max=inst.e_max, assigned=dict(consumed), consumed=consumed),
        order=_order(path),
        slot_counts=tuple(plan.num_slots for plan in plans),
        proven_optimal=proven,
    )


def solve_exact(
    inst: Instance,
    mode: OracleMode,
    node_limit: int = 2_000_000,
    delay_objective: DelayObjective = "makespan",
) -> OracleResult:
    """
    Optimal schedule for one of the exact strategies.

    age-optimal minimises the sum AoT, delay-optimal the completion time of
    all tasks (makespan, or the sum of completion times), mec-only the sum
    AoT with every bit offloaded, and mec-round-robin the same with the
    application order fixed to round robin.
    """
    ensure_valid(inst)
    if delay_objective not in ("makespan", "sum"):
        raise ValueError(f"Unknown delay objective {delay_objective!r}")
    search = ExactSearch(inst, mode, node_limit, delay_objective)
    best, proven = search.run()
    result = _build_result(inst, mode, best.path, best.objective, proven)
    logger.info("%s: objective %.6g, sum AoT %.6g, completion %s slots, %s expansions%s",
                mode.value, result.objective, result.sum_age, result.completion_time, search.expansions,
                "" if proven else " (not proven optimal)")
    return result


# Flat enumeration used to audit the search on tiny instances


def _interleavings(counts: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    apps = [n for n, count in enumerate(counts, start=1) for _ in range(count)]
    return iter(sorted(set(itertools.permutations(apps))))


def _compositions(parts: int, cap: int) -> Iterator[tuple[int, ...]]:
    """Every tuple of `parts` positive slot counts with total at most `cap`."""
    if parts == 0:
        yield ()
        return
    for first in range(1, cap - parts + 2):
        for rest in _compositions(parts - 1, cap - first):
            yield (first,) + rest


def _flat_objective(inst: Instance, mode: OracleMode, delay_objective: DelayObjective) -> Callable:
    def objective(completions: dict[TaskKey, int]) -> float:
        if mode != OracleMode.DELAY_OPTIMAL:
            entries = {
                n: tuple((k, inst.tau0 + completions[(n, k)]) for k in range(1, len(inst.tasks(n)) + 1))
                for n in range(1, inst.num_apps + 1)
            }
            return sum_age(inst, CompletionLog(entries=entries))
        if delay_objective == "sum":
            return float(sum(completions.values()))
        return float(max(completions.values()))
    return objective


def verify_optimality_small(
    inst: Instance,
    result: OracleResult,
    delay_objective: DelayObjective = "makespan",
    tol: float = 1e-6,
) -> Counterexample | None:
    """
    Audit an exact result by enumerating every order and slot-count vector.

    Energies are recomputed slot by slot from the partition and split
    formulas. Returns None when nothing beats the result and the result's
    objective matches its own schedule, otherwise a counterexample.
    """
    if inst.total_tasks > 4:
        raise ValueError(f"Flat enumeration is limited to 4 tasks, instance has {inst.total_tasks}")
    mode = result.mode
    objective = _flat_objective(inst, mode, delay_objective)

    reported = {(n, k): round(t - inst.tau0) for n, items in result.completion_log.entries.items() for k, t in items}
    own = objective(reported)
    if abs(own - result.objective) > tol:
        return Counterexample(
            order=result.order,
            slot_counts=result.slot_counts,
            objective=own,
            reason=f"reported objective {result.objective:.9g} does not match its schedule ({own:.9g})",
        )

    if mode == OracleMode.DELAY_OPTIMAL:
        cap = int(math.floor(result.objective + tol))
    else:
        cap = int(math.floor((math.sqrt(8 * (result.objective + tol) + 1) - 1) / 2))
    cap = min(cap, inst.horizon)

    counts = tuple(len(inst.tasks(n)) for n in range(1, inst.num_apps + 1))
    orders = [round_robin_order(inst)] if mode == OracleMode.MEC_ROUND_ROBIN else list(_interleavings(counts))
    best: tuple[float, tuple[int, ...], tuple[int, ...]] | None = None
    for order in orders:
        for slots in _compositions(len(order), cap):
            done = [0] * inst.num_apps
            completions: dict[TaskKey, int] = {}
            start, energy = 1, 0.0
            for app, s in zip(order, slots):
                done[app - 1] += 1
                key = (app, done[app - 1])
                gains = inst.channel.window(start, s)
                energy += window_min_energy(inst.task(*key).size_bits, gains, inst.params, mode.offload_only)
                start += s
                completions[key] = start - 1
            if energy > inst.e_max * (1 + BUDGET_RTOL):
                continue
            value = objective(completions)
            if best is None or value < best[0]:
                best = (value, order, slots)

    if best is not None and best[0] < result.objective - tol:
        return Counterexample(order=best[1], slot_counts=best[2], objective=best[0],
                              reason="enumeration found a better feasible schedule")
    if best is None or result.objective < best[0] - tol:
        return Counterexample(
            order=best[1] if best else result.order,
            slot_counts=best[2] if best else result.slot_counts,
            objective=best[0] if best else math.inf,
            reason="reported objective is below every feasible schedule",
        )
    return None
