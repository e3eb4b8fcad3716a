"""Exception types shared across the package."""


class TwoPathsError(Exception):
    """Base class for all package errors."""


class InvalidTerminals(TwoPathsError):
    """The four designated terminals are not pairwise-distinct known nodes."""


class ParseError(TwoPathsError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class MissingTerminals(TwoPathsError):
    """Graph file lacks an `inputs` or `outputs` line."""


class CapExceeded(TwoPathsError):
    """Loop or forward-path enumeration exceeded its cap; the gain-formula
    oracle is inapplicable at this size."""


class SearchBudgetExceeded(TwoPathsError):
    """Backtracking search used up its node-expansion budget."""


class DivisibilityViolation(TwoPathsError):
    """tr(A*R_k) was not divisible by k inside the characteristic-polynomial
    recurrence.  Mathematically impossible; signals an implementation bug."""


class BoundViolation(TwoPathsError):
    """A measured coefficient exceeded its predicted magnitude bound.

    Recorded as a finding by callers rather than raised on the decision path.
    """


class OracleDisagreement(TwoPathsError):
    """The two combinatorial oracles disagreed; a bug in one of them."""
