from typing import List, Optional


class BudgetLedger:
    """
    Cumulative revenue B_t of the platform.

    Single-owner mutable state. The running sum uses Neumaier compensation so
    that `current` tracks the exact sum of recorded revenues at T = 10^6.
    """

    def __init__(self, keep_history: bool = False):
        self._sum = 0.0
        self._compensation = 0.0
        self._count = 0
        self.history: Optional[List[float]] = [] if keep_history else None

    @property
    def current(self) -> float:
        return self._sum + self._compensation

    @property
    def rounds(self) -> int:
        return self._count

    def record(self, revenue: float) -> float:
        """Add one round's revenue and return the updated budget"""
        total = self._sum + revenue
        if abs(self._sum) >= abs(revenue):
            self._compensation += (self._sum - total) + revenue
        else:
            self._compensation += (revenue - total) + self._sum
        self._sum = total
        self._count += 1
        if self.history is not None:
            self.history.append(revenue)
        return self.current

    def __repr__(self):
        return f"<BudgetLedger(current={self.current}, rounds={self._count})>"
