"""
Tests for the energy model and the per-task offloading optimizer.
"""

import math

import numpy as np
import pytest

from app.energy import (
    WindowEnergy,
    cpu_frequency,
    local_energy,
    min_slots_plan,
    offload_energy,
    offload_only_partition,
    offload_only_slot_energy,
    optimal_split,
    partition_across_slots,
    plan_task,
    slot_energy,
    slot_min_energy,
    window_min_energy,
)
from app.errors import InfeasiblePlanError, NegativeVolumeError, NonPositiveGainError, UnsupportedOrderError
from app.models import EnergyParams


def test_derived_coefficients(params):
    assert params.alpha == pytest.approx(1e-9, rel=1e-12)
    assert params.lam == pytest.approx(1e-13, rel=1e-12)


def test_local_energy(params):
    assert local_energy(0.0, params) == 0.0
    assert local_energy(100.0, params) == pytest.approx(1e-3, rel=1e-12)
    assert local_energy(500.0, params) == pytest.approx(0.125, rel=1e-12)


def test_offload_energy(params):
    assert offload_energy(0.0, 1e-4, params) == 0.0
    assert offload_energy(500.0, 1e-4, params) == pytest.approx(0.125, rel=1e-12)
    assert offload_energy(300.0, 2e-4, params) == pytest.approx(offload_energy(300.0, 1e-4, params) / 2, rel=1e-12)


def test_offload_only_slot_energy(params):
    """Offloading 500 bits at gain 1e-4 costs 0.125 J with m = 3 and follows lam * D**m / h for other orders."""
    assert offload_only_slot_energy(500.0, 1e-4, params) == pytest.approx(0.125, rel=1e-12)
    assert offload_only_slot_energy(500.0, 1e-4, params) == pytest.approx(
        window_min_energy(500.0, [1e-4], params, offload_only=True), rel=1e-12)

    p = params.model_copy(update={"m": 4})
    assert offload_only_slot_energy(500.0, 1e-4, p) == pytest.approx(p.lam * 500.0 ** 4 / 1e-4, rel=1e-12)

    with pytest.raises(NonPositiveGainError):
        offload_only_slot_energy(500.0, 0.0, params)


def test_cpu_frequency(params):
    """100 bits at 1e5 cycles per bit in a 10 ms slot need 1e9 cycles per second."""
    assert cpu_frequency(100.0, params) == pytest.approx(1e9)


def test_invalid_inputs(params):
    with pytest.raises(NegativeVolumeError):
        local_energy(-1.0, params)

    with pytest.raises(NonPositiveGainError):
        offload_energy(10.0, 0.0, params)

    with pytest.raises(ValueError):
        partition_across_slots(100.0, [], params)


def test_split_requires_cubic_order(params):
    quartic = params.model_copy(update={"m": 4})

    with pytest.raises(UnsupportedOrderError) as exc_info:
        optimal_split(500.0, 1e-4, quartic)

    assert exc_info.value.m == 4


def test_symmetric_split(params):
    """When alpha * h equals lam the bits are split evenly."""
    d_loc, d_off = optimal_split(500.0, 1e-4, params)

    assert d_loc == pytest.approx(250.0)
    assert d_off == pytest.approx(250.0)


def test_poor_channel_computes_locally(params):
    d_loc, d_off = optimal_split(500.0, 1e-12, params)

    assert d_off < 1e-3 * d_loc


def test_slot_min_energy_symmetric(params):
    assert slot_min_energy(500.0, 1e-4, params) == pytest.approx(0.03125, rel=1e-12)
    assert slot_min_energy(0.0, 1e-4, params) == 0.0


def test_split_beats_grid(params):
    """The closed-form split is no worse than any point of a fine grid."""
    rng = np.random.default_rng(1)
    alpha, lam = params.alpha, params.lam
    for _ in range(1000):
        d = rng.uniform(1.0, 1000.0)
        h = 10 ** rng.uniform(-6, -2)
        d_loc, _ = optimal_split(d, h, params)
        best = slot_energy(d, d_loc, h, params)
        grid = np.linspace(0.0, d, 10_000)
        values = alpha * grid ** 3 + lam * (d - grid) ** 3 / h
        assert best <= values.min() * (1 + 1e-9)
        assert slot_min_energy(d, h, params) == pytest.approx(best, rel=1e-12)


def test_split_first_order_condition(params):
    rng = np.random.default_rng(2)
    for _ in range(100):
        d = rng.uniform(1.0, 1000.0)
        h = 10 ** rng.uniform(-6, -2)
        d_loc, d_off = optimal_split(d, h, params)
        derivative = 3 * params.alpha * d_loc ** 2 - 3 * params.lam * d_off ** 2 / h
        assert abs(derivative) <= 1e-6 * 3 * params.alpha * d_loc ** 2


def test_slot_min_energy_increasing_and_convex(params):
    values = np.array([slot_min_energy(d, 3e-4, params) for d in np.linspace(0.0, 600.0, 601)])

    assert np.all(np.diff(values) > 0)
    assert np.all(np.diff(values, 2) > -1e-15)


def test_partition_equal_gains(params):
    parts = partition_across_slots(600.0, [1e-4] * 4, params)

    assert parts == pytest.approx((150.0,) * 4)
    assert partition_across_slots(600.0, [5e-4], params) == pytest.approx((600.0,))


def test_partition_beats_two_slot_grid(params):
    """Two-slot partitions on a fine grid never beat the closed-form partition."""
    rng = np.random.default_rng(3)
    for _ in range(200):
        d = rng.uniform(400.0, 600.0)
        gains = rng.uniform(1e-5, 1e-3, size=2)
        energy = window_min_energy(d, gains, params, offload_only=False)
        first = np.linspace(0.0, d, 10_001)
        grid = [slot_min_energy(x, gains[0], params) + slot_min_energy(d - x, gains[1], params) for x in first[::50]]
        assert energy <= min(grid) * (1 + 1e-9)
        parts = partition_across_slots(d, gains, params)
        assert sum(slot_min_energy(x, h, params) for x, h in zip(parts, gains)) == pytest.approx(energy, rel=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_offload_only_partition_beats_grid(params, m):
    """Offload-only partitions D(t) proportional to h**(1/(m-1)) for any order m."""
    p = params.model_copy(update={"m": m})
    rng = np.random.default_rng(m)
    for _ in range(100):
        d = rng.uniform(400.0, 600.0)
        gains = rng.uniform(1e-5, 1e-3, size=2)
        energy = window_min_energy(d, gains, p, offload_only=True)
        first = np.linspace(0.0, d, 2_001)
        grid = p.lam * first ** m / gains[0] + p.lam * (d - first) ** m / gains[1]
        assert energy <= grid.min() * (1 + 1e-9)
        parts = offload_only_partition(d, gains, p)
        assert sum(parts) == pytest.approx(d)
        assert sum(offload_energy(x, h, p) for x, h in zip(parts, gains)) == pytest.approx(energy, rel=1e-12)


def test_window_energy_matches_direct_sum(default_instance):
    window = WindowEnergy(default_instance)
    gains = default_instance.channel.gains
    p = default_instance.params
    for start, end in [(1, 1), (1, 5), (7, 9), (150, 200)]:
        expected = window_min_energy(480.0, gains[start - 1:end], p, offload_only=False)
        assert window.energy(480.0, start, end) == pytest.approx(expected, rel=1e-9)

    offload = WindowEnergy(default_instance, offload_only=True)
    expected = window_min_energy(480.0, gains[2:6], p, offload_only=True)
    assert offload.energy(480.0, 3, 6) == pytest.approx(expected, rel=1e-9)


def test_min_slots_one_slot(make_instance):
    """A budget covering the one-slot minimum finishes in one slot."""
    inst = make_instance([[500.0]], [[4.0]])
    plan = min_slots_plan(inst.task(1, 1), 1, 0.03125, inst)

    assert plan.num_slots == 1
    assert plan.per_slot[0].d_loc == pytest.approx(250.0)


def test_min_slots_two_equal_slots(make_instance):
    """Slightly below the one-slot minimum, two equal-gain slots share the task evenly."""
    inst = make_instance([[500.0]], [[4.0]])
    plan = min_slots_plan(inst.task(1, 1), 3, 0.0312, inst)

    assert plan.num_slots == 2
    assert plan.start_slot == 3
    assert plan.end_slot == 4
    assert [s.d_total for s in plan.per_slot] == pytest.approx([250.0, 250.0])
    assert plan.energy <= 0.0312


def test_min_slots_matches_brute_force(default_instance):
    p = default_instance.params
    gains = default_instance.channel.gains
    rng = np.random.default_rng(4)
    for _ in range(50):
        task = default_instance.all_tasks()[int(rng.integers(0, 9))]
        start = int(rng.integers(1, 100))
        budget = rng.uniform(0.002, 0.05)
        plan = min_slots_plan(task, start, budget, default_instance)
        expected = next(
            s for s in range(1, default_instance.horizon - start + 2)
            if window_min_energy(task.size_bits, gains[start - 1:start - 1 + s], p, False) <= budget * (1 + 1e-12)
        )
        assert plan.num_slots == expected


def test_min_slots_monotone_in_budget(default_instance):
    task = default_instance.task(2, 1)
    slots = [min_slots_plan(task, 1, budget, default_instance).num_slots for budget in np.linspace(0.002, 0.1, 50)]

    assert all(a >= b for a, b in zip(slots, slots[1:]))


def test_min_slots_infeasible(make_instance):
    inst = make_instance([[500.0]], [[4.0]], horizon=3)

    with pytest.raises(InfeasiblePlanError):
        min_slots_plan(inst.task(1, 1), 1, 1e-4, inst)

    with pytest.raises(ValueError):
        min_slots_plan(inst.task(1, 1), 1, 0.0, inst)


def test_plan_energy_conservation(default_instance):
    """Plan energy equals the local plus offload energy of its own splits."""
    p = default_instance.params
    plan = plan_task(default_instance.task(1, 2), 10, 4, default_instance)
    recomputed = sum(
        local_energy(s.d_loc, p) + offload_energy(s.d_off, default_instance.channel.gain(s.slot), p)
        for s in plan.per_slot
    )

    assert plan.energy == pytest.approx(recomputed, rel=1e-12)
    assert math.fsum(s.d_total for s in plan.per_slot) == pytest.approx(default_instance.task(1, 2).size_bits)


def test_offload_only_plan(default_instance):
    plan = plan_task(default_instance.task(1, 1), 1, 3, default_instance, offload_only=True)

    assert all(s.d_loc == 0.0 for s in plan.per_slot)
    assert plan.energy == pytest.approx(WindowEnergy(default_instance, offload_only=True).energy(
        default_instance.task(1, 1).size_bits, 1, 3), rel=1e-9)


def test_offload_only_any_order(make_instance):
    p = EnergyParams(gamma=1e-28, omega=1e5, tau=0.01, lambda0=1e-17, m=4)
    inst = make_instance([[500.0]], [[4.0]], params=p)

    plan = min_slots_plan(inst.task(1, 1), 1, 1.0, inst, offload_only=True)

    assert plan.num_slots >= 1
