"""
Problem instances: validation, seeded generation and the key-value file format.
"""
import logging
import math

import numpy as np

from . import keyvalue
from .errors import InstanceValidationError, KeyValueFormatError
from .models import ChannelTrace, EnergyParams, GenerationConfig, Instance, Task


logger = logging.getLogger(__name__)

INSTANCE_FORMAT = "aot-instance/1"


def _validate_params(params: EnergyParams) -> list[str]:
    errors = []
    if not params.gamma > 0:
        errors.append(f"gamma must be positive, got {params.gamma}")
    if not params.omega >= 1:
        errors.append(f"omega must be at least 1, got {params.omega}")
    if not params.tau > 0:
        errors.append(f"tau must be positive, got {params.tau}")
    if not params.lambda0 > 0:
        errors.append(f"lambda0 must be positive, got {params.lambda0}")
    if not 2 <= params.m <= 5:
        errors.append(f"monomial order m must be in [2, 5], got {params.m}")
    return errors


def _validate_tasks(inst: Instance) -> list[str]:
    errors = []
    if not inst.apps:
        errors.append("instance has no applications")
    for n, tasks in enumerate(inst.apps, start=1):
        if not tasks:
            errors.append(f"application {n} has no tasks")
            continue
        previous_gen = -math.inf
        for k, task in enumerate(tasks, start=1):
            if (task.app, task.index) != (n, k):
                errors.append(f"task ({n},{k}) is labelled ({task.app},{task.index})")
            if not (math.isfinite(task.size_bits) and task.size_bits > 0):
                errors.append(f"task ({n},{k}): size_bits must be positive, got {task.size_bits}")
            if not math.isfinite(task.gen_time):
                errors.append(f"task ({n},{k}): gen_time is not finite")
            elif task.gen_time > inst.tau0:
                errors.append(f"task ({n},{k}): gen_time {task.gen_time} is after tau0 {inst.tau0}")
            if not task.gen_time > previous_gen:
                errors.append(f"task ({n},{k}): gen_time must be strictly increasing within application {n}")
            previous_gen = task.gen_time
    return errors


def _validate_channel(inst: Instance) -> list[str]:
    errors = []
    gains = inst.channel.gains
    if len(gains) != inst.horizon:
        errors.append(f"channel length {len(gains)} does not match horizon {inst.horizon}")
    for t, h in enumerate(gains, start=1):
        if not (math.isfinite(h) and h > 0):
            errors.append(f"channel gain at slot {t} must be positive, got {h}")
    return errors


def validate_instance(inst: Instance) -> list[str]:
    """Return every violated instance invariant; an empty list means the instance is valid."""
    errors = _validate_params(inst.params)
    if inst.horizon < 1:
        errors.append(f"horizon must be at least 1, got {inst.horizon}")
    if not (math.isfinite(inst.e_max) and inst.e_max > 0):
        errors.append(f"e_max must be positive, got {inst.e_max}")
    if not math.isfinite(inst.tau0):
        errors.append("tau0 is not finite")
    errors.extend(_validate_tasks(inst))
    errors.extend(_validate_channel(inst))
    return errors


def ensure_valid(inst: Instance) -> Instance:
    errors = validate_instance(inst)
    if errors:
        raise InstanceValidationError(errors)
    return inst


def _draw_gen_times(rng: np.random.Generator, cfg: GenerationConfig) -> np.ndarray:
    shape = (cfg.num_apps, cfg.tasks_per_app)
    if not cfg.integer_gen_times:
        return np.sort(rng.uniform(cfg.gen_time_low, cfg.gen_time_high, size=shape), axis=1)
    grid = np.arange(math.ceil(cfg.gen_time_low), math.floor(cfg.gen_time_high) + 1, dtype=float)
    if len(grid) < cfg.tasks_per_app:
        raise ValueError(f"Integer generation grid {grid.tolist()} is smaller than {cfg.tasks_per_app} tasks")
    return np.sort(np.stack([rng.choice(grid, size=cfg.tasks_per_app, replace=False) for _ in range(cfg.num_apps)]), axis=1)


def generate_instance(seed: int, cfg: GenerationConfig | None = None) -> Instance:
    """
    Draw a random instance.

    Fields are drawn from one PCG64 generator in a fixed order: task sizes
    (application-major), then generation times, then the channel trace.
    Generation times are sorted per application before they are assigned
    to task indices.
    """
    cfg = cfg or GenerationConfig()
    rng = np.random.default_rng(seed)

    sizes = rng.uniform(cfg.size_low, cfg.size_high, size=(cfg.num_apps, cfg.tasks_per_app))
    gen_times = _draw_gen_times(rng, cfg)
    gains = rng.uniform(cfg.gain_low, cfg.gain_high, size=cfg.horizon)

    apps = tuple(
        tuple(
            Task(app=n + 1, index=k + 1, size_bits=float(sizes[n, k]), gen_time=float(gen_times[n, k]))
            for k in range(cfg.tasks_per_app)
        )
        for n in range(cfg.num_apps)
    )
    params = EnergyParams(gamma=cfg.gamma, omega=cfg.omega, tau=cfg.tau, lambda0=cfg.lambda0, m=cfg.m)
    inst = Instance(
        apps=apps,
        channel=ChannelTrace(gains=tuple(float(h) for h in gains)),
        params=params,
        e_max=cfg.e_max,
        tau0=cfg.tau0,
        horizon=cfg.horizon,
    )
    logger.debug("Generated instance seed=%s with %s tasks", seed, inst.total_tasks)
    return ensure_valid(inst)


def instance_pairs(inst: Instance) -> list[tuple[str, object]]:
    p = inst.params
    pairs: list[tuple[str, object]] = [
        ("format", INSTANCE_FORMAT),
        ("tau0", float(inst.tau0)),
        ("horizon", inst.horizon),
        ("e_max", float(inst.e_max)),
        ("params.gamma", float(p.gamma)),
        ("params.omega", float(p.omega)),
        ("params.tau", float(p.tau)),
        ("params.lambda0", float(p.lambda0)),
        ("params.m", p.m),
        ("apps", inst.num_apps),
    ]
    for n, tasks in enumerate(inst.apps, start=1):
        pairs.append((f"app.{n}.tasks", len(tasks)))
        for task in tasks:
            pairs.append((f"task.{n}.{task.index}.size_bits", float(task.size_bits)))
            pairs.append((f"task.{n}.{task.index}.gen_time", float(task.gen_time)))
    pairs.append(("channel.length", len(inst.channel.gains)))
    pairs.extend((f"channel.{t}", float(h)) for t, h in enumerate(inst.channel.gains, start=1))
    return pairs


def dump_instance(inst: Instance) -> str:
    return keyvalue.dumps(instance_pairs(inst), header="AoT scheduling instance")


def load_instance(text: str) -> Instance:
    """Parse an instance file; the result is not validated, call `validate_instance` on it."""
    values = keyvalue.loads(text)
    fmt = values.get("format", INSTANCE_FORMAT)
    if fmt != INSTANCE_FORMAT:
        raise KeyValueFormatError(f"Unsupported instance format {fmt!r}")

    params = EnergyParams(
        gamma=keyvalue.get_float(values, "params.gamma"),
        omega=keyvalue.get_float(values, "params.omega"),
        tau=keyvalue.get_float(values, "params.tau"),
        lambda0=keyvalue.get_float(values, "params.lambda0"),
        m=keyvalue.get_int(values, "params.m"),
    )
    apps = []
    for n in range(1, keyvalue.get_int(values, "apps") + 1):
        apps.append(tuple(
            Task(
                app=n,
                index=k,
                size_bits=keyvalue.get_float(values, f"task.{n}.{k}.size_bits"),
                gen_time=keyvalue.get_float(values, f"task.{n}.{k}.gen_time"),
            )
            for k in range(1, keyvalue.get_int(values, f"app.{n}.tasks") + 1)
        ))
    gains = tuple(
        keyvalue.get_float(values, f"channel.{t}")
        for t in range(1, keyvalue.get_int(values, "channel.length") + 1)
    )
    return Instance(
        apps=tuple(apps),
        channel=ChannelTrace(gains=gains),
        params=params,
        e_max=keyvalue.get_float(values, "e_max"),
        tau0=keyvalue.get_float(values, "tau0"),
        horizon=keyvalue.get_int(values, "horizon"),
    )
