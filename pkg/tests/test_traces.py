"""
Tests for the age and schedule trace exports.
"""

import csv
import io
import math

from app.heuristic import schedule_heuristic
from app.models import OracleMode
from app.oracle import solve_exact
from app.schedules import check_schedule
from app.strategies import to_strategy_result
from app.traces import age_csv, export_trace, read_schedule_csv, schedule_csv


def _ages(text):
    by_app = {}
    for row in csv.DictReader(io.StringIO(text)):
        by_app.setdefault(int(row["app"]), []).append(float(row["age"]))
    return by_app


def test_age_trace_shape(default_instance):
    """Ages rise by one per slot and only fall in the slot after a completion."""
    result = schedule_heuristic(default_instance)
    ages = _ages(age_csv(default_instance, result))
    completion_slots = {
        n: {round(t - default_instance.tau0) for _, t in items} for n, items in result.completion_log.entries.items()
    }

    assert set(ages) == {1, 2, 3}
    for n, series in ages.items():
        assert len(series) == result.completion_time + 1
        assert series[-1] == 0.0
        last = max(completion_slots[n])
        for t in range(2, last + 2):
            step = series[t - 1] - series[t - 2]
            if not math.isclose(step, 1.0, abs_tol=1e-9):
                assert step < 1.0
                assert t - 1 in completion_slots[n]
        assert all(age == 0.0 for age in series[last:])


def test_single_task_drops_once_to_zero(single_task_instance):
    result = schedule_heuristic(single_task_instance)
    series = _ages(age_csv(single_task_instance, result))[1]

    drops = [b for a, b in zip(series, series[1:]) if b < a]
    assert drops == [0.0]


def test_exported_schedule_replays(default_instance):
    """A schedule read back from its CSV passes the legality check."""
    result = schedule_heuristic(default_instance)

    sched = read_schedule_csv(schedule_csv(default_instance, result.schedule))

    assert check_schedule(default_instance, sched) == []
    assert sched.makespan == result.completion_time


def test_schedule_csv_columns(single_task_instance):
    result = to_strategy_result(solve_exact(single_task_instance, OracleMode.AGE_OPTIMAL))
    lines = schedule_csv(single_task_instance, result.schedule).splitlines()

    assert lines[0] == "t,n,k,d_loc,d_off,energy"
    assert lines[1] == "1,1,1,250,250,0.03125"


def test_export_trace_writes_both_files(small_instance, file_store):
    result = schedule_heuristic(small_instance)

    age_path, schedule_path = export_trace(small_instance, result, file_store, "trace_heuristic")

    assert age_path.name == "trace_heuristic_age.csv"
    assert schedule_path.name == "trace_heuristic_schedule.csv"
    assert age_path.read_text().startswith("app,t,age\n")
    assert check_schedule(small_instance, read_schedule_csv(schedule_path.read_text())) == []
