"""Project directory layout and the single-writer lock.

One directory per project: the audit log lives in events.ndjson, exported
reports go to reports/. Mutating commands take an exclusive flock on .lock so
concurrent invocations on the same project are rejected instead of interleaved.
"""

from __future__ import annotations

import fcntl
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

from .catalog import Catalog
from .engine import ProjectEngine
from .errors import HazardManagementError
from .replay import replay_file

EVENTS_FILENAME = "events.ndjson"
LOCK_FILENAME = ".lock"
REPORTS_DIRNAME = "reports"


class ProjectDirectory:
    def __init__(self, path: str | Path):
        self.path = Path(path)

    @property
    def events_path(self) -> Path:
        return self.path / EVENTS_FILENAME

    @property
    def reports_path(self) -> Path:
        return self.path / REPORTS_DIRNAME

    def exists(self) -> bool:
        return self.events_path.exists()

    def require_exists(self) -> None:
        if not self.exists():
            raise HazardManagementError(
                "project-not-found", f"no project found in {self.path} (missing {EVENTS_FILENAME})"
            )

    def prepare_new(self) -> Path:
        if self.exists():
            raise HazardManagementError("project-exists", f"{self.events_path} already exists")
        self.path.mkdir(parents=True, exist_ok=True)
        return self.events_path

    def load_engine(self, catalog: Catalog | None = None) -> ProjectEngine:
        self.require_exists()
        return replay_file(self.events_path, catalog)

    @contextmanager
    def lock(self) -> Iterator[None]:
        """Exclusive, non-blocking writer lock for the whole invocation."""
        self.path.mkdir(parents=True, exist_ok=True)
        fd = os.open(self.path / LOCK_FILENAME, os.O_RDWR | os.O_CREAT, 0o644)
        try:
            try:
                fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
            except BlockingIOError:
                raise HazardManagementError(
                    "project-locked",
                    f"another writer holds the lock on {self.path}; retry when it finishes",
                ) from None
            yield
        finally:
            os.close(fd)
