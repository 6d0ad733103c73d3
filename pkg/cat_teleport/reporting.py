"""CSV output and run manifests.

CSV files follow RFC 4180 (comma separated, CRLF line endings, mandatory header row). Floats are
written with 12 significant digits. Every file is written to a temporary file in the target
directory and renamed into place, so an interrupted run never leaves a partial file. Each CSV gets a
JSON manifest next to it that records how to regenerate it and the SHA-256 of its bytes.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
from collections.abc import Iterable, Sequence
import csv
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
import hashlib
import io
import json
import logging
import os
from pathlib import Path
import tempfile
from typing import Any

# Project dependencies
from cat_teleport import __version__
from cat_teleport.errors import InvalidParameter


logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"


def format_value(value: Any) -> str:
    match value:
        case bool():
            return "true" if value else "false"
        case int():
            return str(value)
        case float():
            return format(value, ".12g")
        case _:
            return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buffer = io.StringIO(newline="")
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise InvalidParameter(f"row has {len(row)} fields, header has {len(header)}")
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue().encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_atomic(path: Path, data: bytes) -> None:
    """Write `data` to `path` through a temporary file and `os.replace`"""
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(dir=path.parent, prefix=f".{path.name}.", delete=False)
    try:
        with handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(handle.name, path)
    except BaseException:
        Path(handle.name).unlink(missing_ok=True)
        raise
    logger.debug(f"wrote {len(data)} bytes to {path}")


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + MANIFEST_SUFFIX)


@dataclass(frozen=True)
class RunManifest:
    """How a CSV was produced. `arguments` is the command line minus `--out`, so `replay` can
    run it again and compare `checksum`.
    """

    command: str
    arguments: list[str]
    parameters: dict[str, Any]
    seed: int | None
    checksum: str
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def write(self, path: Path) -> None:
        data = json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"
        write_atomic(path, data.encode("utf-8"))

    @classmethod
    def load(cls, path: Path) -> RunManifest:
        try:
            fields = json.loads(path.read_text(encoding="utf-8"))
            return cls(**fields)
        except (json.JSONDecodeError, TypeError) as error:
            raise InvalidParameter(f"{path} is not a run manifest: {error}") from error


def write_report(
    out: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    command: str,
    arguments: list[str],
    parameters: dict[str, Any],
    seed: int | None = None,
) -> RunManifest:
    """Write the CSV and its manifest sidecar. Returns the manifest."""
    data = render_csv(header, rows)
    write_atomic(out, data)
    manifest = RunManifest(command, arguments, parameters, seed, sha256_hex(data))
    manifest.write(manifest_path(out))
    return manifest
