"""
Per-slot exports of a solved instance: age trajectories and the slot decisions.
"""
import csv
import io
import logging
from pathlib import Path

from .aot import age_trace
from .energy import local_energy, offload_energy
from .files import FileStore
from .models import Instance, Schedule, SlotDecision, StrategyResult


logger = logging.getLogger(__name__)

AGE_HEADER = ("app", "t", "age")
SCHEDULE_HEADER = ("t", "n", "k", "d_loc", "d_off", "energy")


def _fmt(value: float) -> str:
    return format(value, ".12g")


def age_csv(inst: Instance, result: StrategyResult) -> str:
    """Instantaneous age of every application for t = 1..makespan + 1, zero once its queue is empty."""
    last = result.completion_time + 1
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(AGE_HEADER)
    for n in range(1, inst.num_apps + 1):
        ages = age_trace(inst, result.completion_log, n).ages
        for t in range(1, last + 1):
            writer.writerow((n, t, _fmt(ages[t - 1] if t <= len(ages) else 0.0)))
    return buffer.getvalue()


def schedule_csv(inst: Instance, sched: Schedule) -> str:
    by_slot = {d.slot: d for d in sched.decisions if d.task is not None}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCHEDULE_HEADER)
    for t in range(1, sched.makespan + 1):
        d = by_slot.get(t)
        if d is None:
            writer.writerow((t, "", "", _fmt(0.0), _fmt(0.0), _fmt(0.0)))
            continue
        energy = local_energy(d.d_loc, inst.params) + offload_energy(d.d_off, inst.channel.gain(t), inst.params)
        writer.writerow((t, d.task[0], d.task[1], _fmt(d.d_loc), _fmt(d.d_off), _fmt(energy)))
    return buffer.getvalue()


def read_schedule_csv(text: str) -> Schedule:
    """Rebuild a schedule from its CSV export; completion times are left to the replay."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != SCHEDULE_HEADER:
        raise ValueError(f"Unexpected schedule header {reader.fieldnames}, expected {list(SCHEDULE_HEADER)}")
    decisions = []
    for line in reader:
        if not line["n"]:
            decisions.append(SlotDecision(slot=int(line["t"])))
            continue
        decisions.append(SlotDecision(
            slot=int(line["t"]),
            task=(int(line["n"]), int(line["k"])),
            d_loc=float(line["d_loc"]),
            d_off=float(line["d_off"]),
        ))
    return Schedule(decisions=tuple(decisions))


def export_trace(inst: Instance, result: StrategyResult, store: FileStore, prefix: str | Path) -> tuple[Path, Path]:
    prefix = str(prefix)
    age_path = store.write_text(f"{prefix}_age.csv", age_csv(inst, result))
    schedule_path = store.write_text(f"{prefix}_schedule.csv", schedule_csv(inst, result.schedule))
    logger.info("Exported %s trace: %s, %s", result.strategy.value, age_path, schedule_path)
    return age_path, schedule_path
