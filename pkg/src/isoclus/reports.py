"""Named inequality instances with lhs/rhs/slack bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass

SAT_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """One checked inequality, oriented so that slack >= 0 means satisfied."""

    name: str
    lhs: float
    rhs: float
    fitted_constant: float | None = None
    inputs_digest: str = ""

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def satisfied(self) -> bool:
        scale = max(abs(self.lhs), abs(self.rhs), 1.0)
        return self.slack >= -SAT_TOL * scale

    def as_row(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "satisfied": self.satisfied,
            "fitted_constant": "" if self.fitted_constant is None else self.fitted_constant,
        }

    def __str__(self) -> str:  # pragma: no cover - display helper
        tail = "" if self.fitted_constant is None else f", fitted={self.fitted_constant:.6g}"
        flag = "ok" if self.satisfied else "VIOLATED"
        return f"{self.name}: lhs={self.lhs:.9g} rhs={self.rhs:.9g} slack={self.slack:.3g} [{flag}{tail}]"
