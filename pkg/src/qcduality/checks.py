"""Uniform result record for identity checks."""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Iterator


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    elapsed: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict[str, Any]:
        return {"name": self.name, "status": self.status,
                "residual": float(self.residual), "elapsed": round(self.elapsed, 6)}


@contextmanager
def stopwatch() -> Iterator[list[float]]:
    """Yields a one-element list that receives the elapsed wall time."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start
