"""Named inequality checks carried through reports."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import operator

_OPS = {">=": operator.ge, "<=": operator.le, "==": operator.eq}


def _num(v):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else float(v)
    return v


@dataclass(frozen=True)
class Bound:
    name: str
    lhs: object
    rhs: object
    relation: str = ">="
    holds: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": _num(self.lhs), "rhs": _num(self.rhs), "holds": self.holds}


def bound(name: str, lhs, relation: str, rhs) -> Bound:
    """Evaluate ``lhs <relation> rhs`` exactly (operands may be Fractions)."""
    return Bound(name, lhs, rhs, relation, bool(_OPS[relation](lhs, rhs)))


def all_hold(bounds) -> bool:
    return all(b.holds for b in bounds)
