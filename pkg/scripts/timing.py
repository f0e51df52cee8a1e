from __future__ import annotations

import time
from contextlib import contextmanager
from collections.abc import Iterator


class PhaseTimer:
    """Accumulates wall time per named phase, in milliseconds."""

    def __init__(self) -> None:
        self.phases: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = (time.perf_counter() - start) * 1000.0
            self.phases[name] = self.phases.get(name, 0.0) + elapsed


class NullTimer(PhaseTimer):
    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        yield


def timer_or_null(timer: PhaseTimer | None) -> PhaseTimer:
    return timer if timer is not None else NullTimer()
