from __future__ import annotations

import contextlib
import csv
import io
import json
import os
import tempfile
from collections.abc import Generator
from collections.abc import Iterable
from collections.abc import Mapping
from collections.abc import Sequence
from typing import IO
from typing import Any

from ._constants import SERIAL_DIGITS
from ._errors import DomainError

__all__ = ["ArtifactStore", "format_number", "render_csv", "render_json"]


def format_number(value: Any) -> str:
    """Render one CSV cell; floats keep enough digits for a lossless round trip."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, f".{SERIAL_DIGITS}g")
    return str(value)


def render_csv(rows: Sequence[Mapping[str, Any]]) -> str:
    """Header row from the first row's keys, then one line per row."""
    if not rows:
        raise DomainError("No rows to write")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(row[key]) for key in header])

    return buffer.getvalue()


def render_json(payload: Mapping[str, Any] | Sequence[Any]) -> str:
    """Indented JSON; floats use repr, which is already the shortest round-trip form."""
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


class ArtifactStore:
    """Write run outputs atomically without ever touching the run's inputs."""

    def __init__(self, protected: Iterable[str] = ()) -> None:
        """
        Create an ArtifactStore.

        Args:
            protected: Paths (usually input files) that must never be written
        """
        self._protected = {os.path.realpath(path) for path in protected}

    def _check_target(self, path: str) -> str:
        target = os.path.realpath(path)
        if target in self._protected:
            raise DomainError(f"Refusing to overwrite input file: {path}")
        if os.path.isdir(target):
            raise DomainError(f"Output path is a directory: {path}")
        return target

    @contextlib.contextmanager
    def open(  # noqa: A003 allow shadow of open keyword
        self,
        path: str,
        encoding: str = "utf-8",
    ) -> Generator[IO[str], None, None]:
        """
        Open a temporary sibling of path; it replaces path only on a clean exit.

        Raises:
            DomainError: When path is protected or a directory
        """
        target = self._check_target(path)
        directory = os.path.dirname(target)
        os.makedirs(directory, exist_ok=True)

        fd, temp_path = tempfile.mkstemp(prefix=".partial-", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding=encoding, newline="") as filehandler:
                yield filehandler
                filehandler.flush()
                os.fsync(filehandler.fileno())
            os.replace(temp_path, target)

        except BaseException:
            with contextlib.suppress(FileNotFoundError):
                os.remove(temp_path)
            raise

    def write_text(self, path: str, text: str) -> None:
        with self.open(path) as outfile:
            outfile.write(text)

    def write_csv(self, path: str, rows: Sequence[Mapping[str, Any]]) -> None:
        self.write_text(path, render_csv(rows))

    def write_json(self, path: str, payload: Mapping[str, Any] | Sequence[Any]) -> None:
        self.write_text(path, render_json(payload))
