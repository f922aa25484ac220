import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError

from .cli import EXIT_VALIDATION, build_parser, settings_from_args
from .container import Container


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    container = Container()
    try:
        settings = settings_from_args(args, container.settings())
    except ValidationError as e:
        print(e, file=sys.stderr)
        return EXIT_VALIDATION
    container.settings.override(settings)

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    app = container.cli_app()
    return app.run(args)


if __name__ == "__main__":
    sys.exit(main())
