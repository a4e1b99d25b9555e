"""
Tests for run-scoped log context.
"""

import logging
import threading
from collections.abc import Iterator

import pytest

from app.core.context import current_run_id, run_context
from app.core.logging import get_logger

logger = get_logger("tests.context")


class _Collector(logging.Handler):
    def __init__(self) -> None:
        super().__init__()
        self.records: list[logging.LogRecord] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.records.append(record)


@pytest.fixture
def collector() -> Iterator[_Collector]:
    handler = _Collector()
    root = logging.getLogger()
    previous_level = root.level
    root.addHandler(handler)
    root.setLevel(logging.INFO)
    try:
        yield handler
    finally:
        root.removeHandler(handler)
        root.setLevel(previous_level)


def _messages(collector: _Collector, message: str) -> list[logging.LogRecord]:
    return [r for r in collector.records if r.getMessage() == message]


def test_records_carry_run_id_and_fields(collector: _Collector) -> None:
    with run_context("run-7", command="bounds", seed=3) as run_id:
        assert current_run_id() == run_id == "run-7"
        logger.info("inside")
    logger.info("outside")

    (inside,) = _messages(collector, "inside")
    assert inside.run_id == "run-7"
    assert inside.command == "bounds"
    assert inside.seed == 3

    (outside,) = _messages(collector, "outside")
    assert not hasattr(outside, "run_id")
    assert current_run_id() is None


def test_generated_run_id() -> None:
    with run_context() as run_id:
        assert len(run_id) == 32


def test_overlapping_runs_keep_their_own_ids(collector: _Collector) -> None:
    barrier = threading.Barrier(4)

    def worker(run_id: str) -> None:
        with run_context(run_id):
            barrier.wait()
            logger.info("overlap", extra={"owner": run_id})
            barrier.wait()

    threads = [threading.Thread(target=worker, args=(f"run-{i}",)) for i in range(4)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    records = _messages(collector, "overlap")
    assert len(records) == 4
    assert all(r.run_id == r.owner for r in records)
