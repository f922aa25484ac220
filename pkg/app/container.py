"""
Dependency injection container for the AoT scheduler.

This module wires settings, the file store and the service layer with
dependency-injector so the command line and the tests build the same
object graph, and tests can swap the settings.
"""

from dependency_injector import containers, providers

from .cli import CliApp
from .config import Settings
from .experiments import ExperimentService
from .files import FileStore
from .strategies import StrategyService


class Container(containers.DeclarativeContainer):
    """
    Application dependency injection container.

    Usage:
        container = Container()
        container.settings.override(Settings(output_dir=Path("out")))
        result = container.strategy_service().run(inst, "heuristic")
    """

    # Settings provider
    settings = providers.Singleton(
        Settings,
    )

    file_store = providers.Factory(
        FileStore,
        settings=settings,
    )

    # Service layer
    strategy_service = providers.Factory(
        StrategyService,
        settings=settings,
    )

    experiment_service = providers.Factory(
        ExperimentService,
        settings=settings,
        store=file_store,
    )

    cli_app = providers.Factory(
        CliApp,
        settings,
        file_store,
        strategy_service,
        experiment_service,
    )
