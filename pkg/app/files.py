import logging
from pathlib import Path

from .config import Settings
from .instances import dump_instance, load_instance
from .models import Instance


logger = logging.getLogger(__name__)


class FileStore:
    """Reads inputs and writes every artifact below the configured output directory."""

    def __init__(self, settings: Settings):
        self.settings = settings

    @property
    def output_dir(self) -> Path:
        return self.settings.output_dir.expanduser()

    def path(self, name: str | Path) -> Path:
        return self.output_dir / name

    def read_text(self, path: str | Path) -> str:
        path = Path(path).expanduser()
        if not path.exists():
            raise FileNotFoundError(f"Input file not found at: {path}")
        return path.read_text(encoding="utf-8")

    def write_text(self, name: str | Path, text: str) -> Path:
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps the "\n" line endings of CSV output on every platform
        with target.open("w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("Wrote %s", target)
        return target

    def read_instance(self, path: str | Path) -> Instance:
        return load_instance(self.read_text(path))

    def write_instance(self, name: str | Path, inst: Instance) -> Path:
        return self.write_text(name, dump_instance(inst))
