"""BoundReport: the universal output record of every inequality evaluator.

Conventions: lhs is the bound/budget side, rhs the constrained quantity,
margin = lhs - rhs.  A report is satisfied iff margin >= -tolerance.  Reports
whose status is "inconclusive" leave satisfied undefined (None) unless the
evaluator can still decide it; "informational" reports are never asserted.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..policy import policy

STATUSES = ("ok", "informational", "inconclusive", "error")


def default_tolerance(lhs, rhs):
    return policy.violation_rtol * max(abs(lhs), abs(rhs), 1.0)


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return value
    return str(value)


@dataclass
class BoundReport:
    name: str
    lhs: float
    rhs: float
    margin: float = None
    satisfied: bool = None
    tolerance: float = None
    status: str = "ok"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.margin is None:
            self.margin = self.lhs - self.rhs
        if self.tolerance is None:
            self.tolerance = default_tolerance(self.lhs, self.rhs)
        if self.status == "ok":
            for v in (self.lhs, self.rhs, self.margin):
                if not math.isfinite(v):
                    raise ValueError(f"non-finite quantity in report {self.name!r}")
            self.satisfied = bool(self.margin >= -self.tolerance)
        self.metadata = _jsonable(self.metadata)

    @property
    def assertable(self):
        return self.status == "ok"

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "tolerance": self.tolerance,
            "status": self.status,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def oneline(self):
        flag = {True: "PASS", False: "FAIL", None: "----"}[self.satisfied]
        return (f"{flag} {self.name}: lhs={self.lhs:.6g} rhs={self.rhs:.6g} "
                f"margin={self.margin:.3g} [{self.status}]")
