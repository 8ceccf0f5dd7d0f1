"""Optional instrumentation counting real arithmetic operations.

Kernels report closed-form operation counts for the block operations they
execute (one tally per vectorized update, never per scalar), so enabling a
counter adds no measurable overhead. Multiplications, additions and
subtractions, divisions, and square roots are tracked separately; sign
flips, comparisons, and assignments are not arithmetic and are never
counted. ``total`` is the plain sum of the four categories.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class OpCount:
    muls: int = 0
    adds: int = 0
    divs: int = 0
    sqrts: int = 0

    @property
    def total(self) -> int:
        return self.muls + self.adds + self.divs + self.sqrts

    @property
    def fma_equiv(self) -> int:
        """Multiply-add-equivalent count: each multiplication can absorb
        one addition (fused multiply-add); leftover additions count one."""
        return self.muls + self.divs + self.sqrts + max(0, self.adds - self.muls)

    def reset(self) -> None:
        self.muls = self.adds = self.divs = self.sqrts = 0

    def __str__(self) -> str:
        return (f"{self.total} ops (mul {self.muls}, add {self.adds}, "
                f"div {self.divs}, sqrt {self.sqrts})")


_stack: list[OpCount] = []


def counting() -> bool:
    return bool(_stack)


def tally(muls: int = 0, adds: int = 0, divs: int = 0, sqrts: int = 0) -> None:
    if not _stack:
        return
    for c in _stack:
        c.muls += muls
        c.adds += adds
        c.divs += divs
        c.sqrts += sqrts


@contextmanager
def count_ops():
    """Activate a counter for the duration of the block and yield it."""
    c = OpCount()
    _stack.append(c)
    try:
        yield c
    finally:
        _stack.remove(c)
