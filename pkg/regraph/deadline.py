"""Cooperative wall-clock deadlines."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .exceptions import DeadlineExceeded


@dataclass
class Deadline:
    """Expires ``seconds`` after construction; ``None`` never expires.

    Long-running loops call :meth:`check` at round or branch granularity.
    """

    seconds: float | None = None
    started: float = field(default_factory=time.perf_counter)

    @classmethod
    def never(cls) -> Deadline:
        return cls(None)

    @property
    def expired(self) -> bool:
        if self.seconds is None:
            return False
        return time.perf_counter() - self.started >= self.seconds

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def check(self) -> None:
        if self.expired:
            raise DeadlineExceeded(f"deadline of {self.seconds:.3f}s exceeded")


def resolve(deadline: Deadline | float | None) -> Deadline:
    """Accept a Deadline, a timeout in seconds, or None."""
    if isinstance(deadline, Deadline):
        return deadline
    return Deadline(deadline)
