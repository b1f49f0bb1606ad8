"""Exact predicates on the conjugates of an element.

Every decision goes through a Sturm chain of the minimal polynomial plus an
exact evaluation at rational endpoints, so open and closed interval ends are
told apart exactly (the values 0 and 4 in Kronecker's setting depend on it).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NotTotallyReal
from .poly import SturmChain, count_real_roots, rat, rat_to_str


@dataclass(frozen=True)
class IntervalSpec:
    """An interval of the real line; ``None`` endpoints stand for -inf / +inf."""

    lo: Optional[Fraction]
    hi: Optional[Fraction]
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", rat(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", rat(self.hi))
        if self.lo is not None and self.hi is not None and not self.lo < self.hi:
            raise ValueError("interval needs lo < hi")

    @classmethod
    def open(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, False, False)

    def contains(self, x) -> bool:
        x = rat(x)
        if self.lo is not None and (x < self.lo or (self.lo_open and x == self.lo)):
            return False
        if self.hi is not None and (x > self.hi or (self.hi_open and x == self.hi)):
            return False
        return True

    def to_json(self):
        return {
            "lo": "-inf" if self.lo is None else rat_to_str(self.lo),
            "hi": "+inf" if self.hi is None else rat_to_str(self.hi),
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
        }

    @classmethod
    def from_json(cls, data):
        lo = None if data["lo"] in ("-inf", None) else rat(data["lo"])
        hi = None if data["hi"] in ("+inf", "inf", None) else rat(data["hi"])
        return cls(lo, hi, bool(data.get("lo_open", True)), bool(data.get("hi_open", True)))


NONNEGATIVE = IntervalSpec(Fraction(0), None, lo_open=False)
POSITIVE = IntervalSpec(Fraction(0), None, lo_open=True)


def count_roots_in(p, interval: IntervalSpec) -> int:
    """Distinct real roots of squarefree ``p`` lying in ``interval``."""
    chain = SturmChain(p)
    n = chain.count(interval.lo, interval.hi)
    if interval.lo is not None and not interval.lo_open and p(interval.lo) == 0:
        n += 1
    if interval.hi is not None and interval.hi_open and p(interval.hi) == 0:
        n -= 1
    return n


def is_totally_real(alpha) -> bool:
    mp = alpha.min_poly()
    return count_real_roots(mp) == mp.degree


def totally_in(alpha, interval: IntervalSpec) -> bool:
    """True iff every conjugate of ``alpha`` is real and lies in ``interval``."""
    mp = alpha.min_poly()
    if count_real_roots(mp) != mp.degree:
        return False
    return count_roots_in(mp, interval) == mp.degree


def totally_avoids(alpha, interval: IntervalSpec) -> bool:
    """True iff no conjugate of the totally real ``alpha`` lies in ``interval``."""
    mp = alpha.min_poly()
    if count_real_roots(mp) != mp.degree:
        raise NotTotallyReal(f"{alpha} is not totally real")
    return count_roots_in(mp, interval) == 0


def is_totally_nonnegative(alpha) -> bool:
    return totally_in(alpha, NONNEGATIVE)


def is_totally_positive(alpha) -> bool:
    return totally_in(alpha, POSITIVE)
