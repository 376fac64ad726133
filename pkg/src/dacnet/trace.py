"""Per-iteration convergence records and their CSV form."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

HEADER = ("iter", "seconds", "err_l2", "err_linf", "objective")


def fmt(v) -> str:
    return format(float(v), ".17g")


@dataclass
class ConvergenceTrace:
    rows: list = field(default_factory=list)
    method: str = ""

    def record(self, it: int, seconds: float, x, x_ref, objective: float):
        if self.rows and it <= self.rows[-1][0]:
            raise ValueError("trace iterations must be strictly increasing")
        if x_ref is None:
            e2 = einf = math.nan
        else:
            d = x - x_ref
            e2 = float(np.linalg.norm(d))
            einf = float(np.max(np.abs(d))) if d.size else 0.0
        self.rows.append((int(it), float(seconds), e2, einf, float(objective)))

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        k = HEADER.index(name)
        return np.array([r[k] for r in self.rows], dtype=float)

    @property
    def iters(self):
        return [r[0] for r in self.rows]

    def first_iter_below(self, tol: float, column: str = "err_l2"):
        """First iteration whose error is ``<= tol``; ``None`` if never."""
        for r, e in zip(self.rows, self.column(column)):
            if e <= tol:
                return r[0]
        return None

    def first_time_below(self, tol: float, column: str = "err_l2"):
        for r, e in zip(self.rows, self.column(column)):
            if e <= tol:
                return r[1]
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(HEADER) + "\n")
        for it, sec, e2, einf, obj in self.rows:
            buf.write(f"{it},{fmt(sec)},{fmt(e2)},{fmt(einf)},{fmt(obj)}\n")
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path, method: str = "") -> "ConvergenceTrace":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            head = next(reader)
            if tuple(head) != HEADER:
                raise ValueError(f"unexpected trace header {head}")
            rows = [(int(r[0]), float(r[1]), float(r[2]), float(r[3]), float(r[4]))
                    for r in reader]
        return cls(rows, method)
