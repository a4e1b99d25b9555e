"""
Run context for log records.

``run_context`` tags every log record emitted while a CLI command or an
HTTP request is executing with a ``run_id`` plus any extra fields (command
name, seed), so interleaved runs can be told apart in collected logs.

The active run lives in a ``ContextVar``: concurrent requests (asyncio tasks
or worker threads) each see their own run, and one shared filter on the
root handlers reads it.
"""

import logging
import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any

from app.core.logging import get_logger

logger = get_logger(__name__)

_current_run: ContextVar[tuple[str, dict[str, Any]] | None] = ContextVar("current_run", default=None)


class RunContextFilter(logging.Filter):
    """Inject the active run's id and fixed fields into every log record."""

    def filter(self, record: logging.LogRecord) -> bool:
        current = _current_run.get()
        if current is None:
            return True
        run_id, fields = current
        record.run_id = run_id  # type: ignore[attr-defined]
        for key, value in fields.items():
            if not hasattr(record, key):
                setattr(record, key, value)
        return True


_FILTER = RunContextFilter()


def current_run_id() -> str | None:
    current = _current_run.get()
    return None if current is None else current[0]


@contextmanager
def run_context(run_id: str | None = None, **fields: Any) -> Iterator[str]:
    """Attach ``run_id`` and ``fields`` to every log record until exit."""
    run_id = run_id or uuid.uuid4().hex

    # Filters on the root logger are not consulted for records propagated from
    # child loggers, so the filter goes on the handlers.
    for handler in logging.getLogger().handlers:
        if _FILTER not in handler.filters:
            handler.addFilter(_FILTER)

    token = _current_run.set((run_id, fields))
    try:
        yield run_id
    finally:
        _current_run.reset(token)
