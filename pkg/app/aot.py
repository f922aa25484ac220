"""
Age of task: instantaneous age trajectories and the overall age of each application.

Slots are numbered from 1 and a task finishing in slot c completes at
absolute time tau0 + c. The instantaneous age in slot t is measured at the
end of the slot: tau0 + t minus the generation time of the oldest task that
was still unprocessed when the slot began. The overall age is the sum of the
instantaneous ages up to the slot in which the last task completes.
"""
import math

from .errors import CompletionLogError
from .models import AgeTrace, CompletionLog, Instance


def completion_slots(inst: Instance, log: CompletionLog, app: int) -> list[int]:
    """Validated completion slot of every task of the application, in task order."""
    tasks = inst.tasks(app)
    entries = log.for_app(app)
    indices = [k for k, _ in entries]
    if indices != list(range(1, len(tasks) + 1)):
        missing = sorted(set(range(1, len(tasks) + 1)) - set(indices))
        if missing:
            raise CompletionLogError(f"Application {app}: no completion recorded for tasks {missing}")
        raise CompletionLogError(f"Application {app}: completions {indices} are not in task order")

    slots = []
    for (k, completed_at), task in zip(entries, tasks):
        if completed_at <= task.gen_time:
            raise CompletionLogError(
                f"Task ({app},{k}) completes at {completed_at} before its generation at {task.gen_time}"
            )
        offset = completed_at - inst.tau0
        slot = round(offset)
        if slot < 1 or not math.isclose(offset, slot, abs_tol=1e-9):
            raise CompletionLogError(
                f"Task ({app},{k}) completion {completed_at} is not a whole slot after tau0 {inst.tau0}"
            )
        if slots and slot <= slots[-1]:
            raise CompletionLogError(f"Application {app}: completion times must be strictly increasing")
        slots.append(slot)
    return slots


def initial_age(inst: Instance, app: int) -> float:
    return inst.tau0 - inst.task(app, 1).gen_time


def generation_gaps(inst: Instance, app: int) -> list[float]:
    """Elapsed time between the generation of consecutive tasks of the application."""
    tasks = inst.tasks(app)
    return [nxt.gen_time - cur.gen_time for cur, nxt in zip(tasks, tasks[1:])]


def age_trace(inst: Instance, log: CompletionLog, app: int) -> AgeTrace:
    slots = completion_slots(inst, log, app)
    tasks = inst.tasks(app)
    ages = []
    head = 0
    age = initial_age(inst, app)
    for t in range(1, slots[-1] + 1):
        if head > 0 and slots[head - 1] == t - 1:
            # Task `head` finished in the previous slot: age restarts from the next task's generation
            age = inst.tau0 + t - tasks[head].gen_time
        else:
            age += 1
        ages.append(age)
        if slots[head] == t:
            head += 1
    return AgeTrace(app=app, ages=tuple(ages), overall=math.fsum(ages))


def instantaneous_age(inst: Instance, log: CompletionLog, app: int, slot: int) -> float:
    """Age of the application in the given slot, zero once all its tasks are done."""
    slots = completion_slots(inst, log, app)
    for task, completed in zip(inst.tasks(app), slots):
        if completed >= slot:
            return inst.tau0 + slot - task.gen_time
    return 0.0


def parallelogram_area(gap: float, completion_slot: int) -> float:
    return gap * completion_slot


def trapezoid_area(inst: Instance, app: int, last_completion_slot: int) -> float:
    """Area contributed by the application's last task: ages tau0 - tau_K + t for t = 1..c."""
    c = last_completion_slot
    return c * (inst.tau0 - inst.tasks(app)[-1].gen_time) + c * (c + 1) / 2


def closed_form_age(inst: Instance, log: CompletionLog, app: int) -> float:
    slots = completion_slots(inst, log, app)
    areas = [parallelogram_area(gap, c) for gap, c in zip(generation_gaps(inst, app), slots)]
    return trapezoid_area(inst, app, slots[-1]) + math.fsum(areas)


def sum_age(inst: Instance, log: CompletionLog) -> float:
    return math.fsum(closed_form_age(inst, log, n) for n in range(1, inst.num_apps + 1))
