"""Collects one result line per acceptance criterion."""

from __future__ import annotations

import math
from dataclasses import dataclass

RESULTS: dict[int, "Result"] = {}


@dataclass
class Result:
    number: int
    title: str
    ok: bool
    detail: str
    table: list[str]

    def line(self) -> str:
        return f"criterion {self.number}: {'PASS' if self.ok else 'FAIL'}  {self.title}  ({self.detail})"


def record(number: int, title: str, ok: bool, detail: str, table: list[str] | None = None) -> bool:
    res = Result(number, title, bool(ok), detail, table or [])
    RESULTS[number] = res
    print(res.line())
    for row in res.table:
        print("    " + row)
    return res.ok


def sigma(p: float, trials: int) -> float:
    """Binomial standard error of a rate p over the given number of trials."""
    return math.sqrt(p * (1 - p) / trials)
