"""
Result files: CSV tables, ``metadata.json`` and optional state dumps.

Output is byte-stable for identical inputs: fixed column order, 12
significant digits, sorted JSON keys and no timestamps.
"""

import csv
import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from app.core.exceptions import OutputWriteException
from app.core.logging import get_logger
from app.schemas.experiment_schema import (
    BoundsResponse,
    RunMetadata,
    SingleQubitResponse,
    StateDump,
    TwoQubitResponse,
)
from app.utils.helpers import format_float

logger = get_logger(__name__)


class ResultWriter:
    """Write one run's files into an output directory."""

    def __init__(self, out_dir: str | Path) -> None:
        self._out_dir = Path(out_dir)

    def write_single(self, response: SingleQubitResponse) -> list[Path]:
        paths = [self._csv("single.csv", response.rows), self._metadata(response.metadata)]
        if response.metadata.flags.get("dump_states"):
            paths.append(self._states(response.states))
        return paths

    def write_two_qubit(self, response: TwoQubitResponse) -> list[Path]:
        paths = [self._csv("two_qubit.csv", response.rows), self._metadata(response.metadata)]
        if response.metadata.flags.get("dump_states"):
            paths.append(self._states(response.states))
        return paths

    def write_bounds(self, response: BoundsResponse) -> list[Path]:
        return [
            self._csv("bounds.csv", response.rows),
            self._csv("haar.csv", response.haar),
            self._metadata(response.metadata),
        ]

    # ── Internals ─────────────────────────────────────────────────────

    def _csv(self, name: str, rows: Sequence[BaseModel]) -> Path:
        path = self._out_dir / name
        columns = list(type(rows[0]).model_fields) if rows else []
        try:
            self._out_dir.mkdir(parents=True, exist_ok=True)
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([_cell(getattr(row, column)) for column in columns])
        except OSError as exc:
            raise OutputWriteException(path=str(path), reason=str(exc)) from exc
        logger.debug("CSV written", extra={"path": str(path), "rows": len(rows)})
        return path

    def _metadata(self, metadata: RunMetadata) -> Path:
        return self._json("metadata.json", metadata.model_dump(mode="json"))

    def _states(self, states: Sequence[StateDump]) -> Path:
        return self._json("states.json", [s.model_dump(mode="json") for s in states])

    def _json(self, name: str, payload: Any) -> Path:
        path = self._out_dir / name
        try:
            self._out_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(
                json.dumps(payload, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        except OSError as exc:
            raise OutputWriteException(path=str(path), reason=str(exc)) from exc
        logger.debug("JSON written", extra={"path": str(path)})
        return path


def _cell(value: Any) -> str:
    if value is None:
        return "nan"
    if isinstance(value, (int, float)):
        return format_float(value)
    return str(value)
