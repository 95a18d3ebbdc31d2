"""Atomic CSV/JSON writers and the per-run manifest.

Every CSV starts with a `# schema: <name>` comment line followed by the
header row; floats are written with 12 significant digits, UTF-8, LF line
endings, `.` decimal separator.  Files land via a temp file and os.replace in
the target directory, so readers never observe partial output.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

__all__ = ["write_csv", "write_json", "sha256_file", "RunManifest", "format_value"]


def _atomic_write(path: str | os.PathLike[str], text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def write_csv(
    path: str | os.PathLike[str],
    schema: str,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    lines = [f"# schema: {schema}", ",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str | os.PathLike[str], obj: Any) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def sha256_file(path: str | os.PathLike[str]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Reproducibility record written next to every CLI output."""

    command: list[str]
    version: str
    backend: str
    threads: int
    scenario: dict[str, Any]
    parameters: dict[str, Any] = field(default_factory=dict)
    outputs: list[dict[str, str]] = field(default_factory=list)
    duration_s: float = 0.0

    def add_output(self, path: str | os.PathLike[str]) -> None:
        path = os.fspath(path)
        self.outputs.append({"path": path, "sha256": sha256_file(path)})

    def write(self, path: str | os.PathLike[str]) -> None:
        write_json(path, dataclasses.asdict(self))
