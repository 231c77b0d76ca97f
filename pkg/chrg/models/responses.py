"""Pydantic models for command output."""
from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, Field


class ParseStatus(str, Enum):
    ACCEPT = "ACCEPT"
    ROBUST_PARTIAL = "ROBUST-PARTIAL"
    FAIL = "FAIL"


class ParseReport(BaseModel):
    """Outcome of parsing one token string.

    Attributes:
        status: ACCEPT when start(0,n) is in the final store, ROBUST-PARTIAL
            when it is not, FAIL when every branch failed.
        store: Final store dump, one constraint per line in id order.
        spans: Recognized nonterminal constraints (ROBUST-PARTIAL only).
        firings: Rule firings of the run.
    """
    status: ParseStatus
    store: list[str] = Field(default_factory=list)
    spans: list[str] = Field(default_factory=list)
    firings: int = 0

    def lines(self) -> list[str]:
        if self.status is ParseStatus.FAIL:
            return [ParseStatus.FAIL.value]
        status = self.status.value
        if self.status is ParseStatus.ROBUST_PARTIAL and self.spans:
            status += " " + " ".join(self.spans)
        return [*self.store, status]


class BenchRow(BaseModel):
    n: int
    mean_store: float
    median_time_ms: float


class BenchReport(BaseModel):
    """Benchmark table plus the log-log slope of time against length."""
    rows: list[BenchRow]
    slope: float
    fitted_lengths: list[int] = Field(default_factory=list, description="Lengths the slope was fitted on")

    def lines(self) -> list[str]:
        out = [f"{'n':>4}  {'mean_store':>12}  {'median_time_ms':>15}"]
        for row in self.rows:
            out.append(f"{row.n:>4}  {row.mean_store:>12.1f}  {row.median_time_ms:>15.3f}")
        out.append(f"slope {self.slope:.3f}")
        return out
