import logging

from .config import Settings
from .errors import UnknownStrategyError
from .heuristic import schedule_heuristic
from .models import Instance, OracleMode, OracleResult, Strategy, StrategyResult
from .oracle import solve_exact


logger = logging.getLogger(__name__)


def parse_strategy(name: str | Strategy) -> Strategy:
    if isinstance(name, Strategy):
        return name
    try:
        return Strategy(name.strip().lower())
    except ValueError:
        known = ", ".join(s.value for s in Strategy)
        raise UnknownStrategyError(f"Unknown strategy {name!r} (known: {known})") from None


def to_strategy_result(result: OracleResult) -> StrategyResult:
    return StrategyResult(
        strategy=Strategy(result.mode.value),
        sum_age=result.sum_age,
        completion_time=result.completion_time,
        schedule=result.schedule,
        completion_log=result.completion_log,
        ledger=result.ledger,
        order=result.order,
    )


class StrategyService:
    """Runs any of the compared strategies on an instance with the configured search limits."""

    def __init__(self, settings: Settings):
        self.settings = settings

    def solve_exact(self, inst: Instance, mode: OracleMode) -> OracleResult:
        return solve_exact(
            inst,
            mode,
            node_limit=self.settings.node_limit,
            delay_objective=self.settings.delay_objective,
        )

    def run(self, inst: Instance, strategy: str | Strategy) -> StrategyResult:
        strategy = parse_strategy(strategy)
        logger.debug("Running %s on %s tasks, E_max = %.6g J", strategy.value, inst.total_tasks, inst.e_max)
        if strategy == Strategy.HEURISTIC:
            return schedule_heuristic(inst)
        return to_strategy_result(self.solve_exact(inst, OracleMode(strategy.value)))
