"""
Tests for instance validation, generation and the instance file format.
"""

import pytest
from pydantic import ValidationError

from app.errors import InstanceValidationError, KeyValueFormatError
from app.instances import dump_instance, ensure_valid, generate_instance, load_instance, validate_instance
from app.models import ChannelTrace, GenerationConfig, Task


def test_valid_instance_has_no_errors(single_task_instance):
    """A well-formed instance passes validation."""
    assert validate_instance(single_task_instance) == []


def test_zero_size_task_is_named(make_instance):
    """A task of size zero is reported with its (n,k) label."""
    inst = make_instance([[500.0, 0.0]], [[1.0, 2.0]])
    errors = validate_instance(inst)

    assert len(errors) == 1
    assert "(1,2)" in errors[0]
    assert "size_bits" in errors[0]


def test_short_channel_is_reported(make_instance):
    """A channel trace shorter than the horizon is rejected."""
    inst = make_instance([[500.0]], [[1.0]])
    inst = inst.model_copy(update={"channel": ChannelTrace(gains=inst.channel.gains[:-1])})

    assert any("channel length" in e for e in validate_instance(inst))


def test_generation_after_tau0_is_reported(make_instance):
    """Tasks must be generated before scheduling starts."""
    inst = make_instance([[500.0]], [[12.0]], tau0=10.0)

    assert any("after tau0" in e for e in validate_instance(inst))


def test_generation_times_must_increase(make_instance):
    """Generation times within an application are strictly increasing."""
    inst = make_instance([[500.0, 500.0]], [[3.0, 3.0]])

    assert any("strictly increasing" in e for e in validate_instance(inst))


def test_non_positive_gain_is_reported(make_instance):
    gains = [1e-4] * 30
    gains[4] = 0.0
    inst = make_instance([[500.0]], [[1.0]], gains=gains)

    assert any("slot 5" in e for e in validate_instance(inst))


def test_ensure_valid_raises_with_violations(make_instance):
    inst = make_instance([[0.0]], [[1.0]], e_max=-1.0)

    with pytest.raises(InstanceValidationError) as exc_info:
        ensure_valid(inst)

    assert len(exc_info.value.violations) == 2


def test_generation_is_deterministic():
    """The same seed gives the same instance."""
    assert generate_instance(5) == generate_instance(5)
    assert generate_instance(5) != generate_instance(6)


def test_generation_respects_default_ranges():
    """Sizes, generation times and gains stay inside the configured ranges."""
    for seed in range(20):
        inst = generate_instance(seed)
        assert inst.num_apps == 3
        assert all(len(tasks) == 3 for tasks in inst.apps)
        for task in inst.all_tasks():
            assert 400 <= task.size_bits <= 600
            assert 1 <= task.gen_time <= 8
        assert len(inst.channel.gains) == inst.horizon == 200
        assert all(1e-5 <= h <= 1e-3 for h in inst.channel.gains)


def test_generation_sorts_gen_times():
    inst = generate_instance(3)

    for tasks in inst.apps:
        gens = [task.gen_time for task in tasks]
        assert gens == sorted(gens)


def test_single_task_generation():
    """One application with one task is a valid degenerate instance."""
    inst = generate_instance(0, GenerationConfig(num_apps=1, tasks_per_app=1))

    assert inst.total_tasks == 1
    assert 1 <= inst.task(1, 1).gen_time <= 8


def test_integer_generation_times():
    inst = generate_instance(2, GenerationConfig(integer_gen_times=True))

    for task in inst.all_tasks():
        assert task.gen_time == int(task.gen_time)


def test_invalid_generation_config():
    """Empty ranges and zero task counts are rejected."""
    with pytest.raises(ValidationError):
        GenerationConfig(tasks_per_app=0)

    with pytest.raises(ValidationError):
        GenerationConfig(size_low=700.0, size_high=600.0)

    with pytest.raises(ValidationError):
        GenerationConfig(gen_time_high=12.0, tau0=10.0)


def test_instance_file_is_lossless():
    """Loading a dumped instance reproduces every value exactly."""
    inst = generate_instance(9)

    assert load_instance(dump_instance(inst)) == inst


def test_instance_file_missing_key():
    text = dump_instance(generate_instance(1))
    text = "\n".join(line for line in text.splitlines() if not line.startswith("e_max"))

    with pytest.raises(KeyValueFormatError) as exc_info:
        load_instance(text)

    assert "e_max" in str(exc_info.value)


def test_with_horizon_extends_channel(single_task_instance):
    longer = single_task_instance.with_horizon(40)

    assert longer.horizon == 40
    assert len(longer.channel.gains) == 40
    assert validate_instance(longer) == []


def test_task_key():
    assert Task(app=2, index=3, size_bits=1.0, gen_time=0.0).key == (2, 3)
