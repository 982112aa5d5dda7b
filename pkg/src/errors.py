from typing import Any, Optional


class SkewMotzkinError(Exception):
    """Base class for every error raised by the package."""


class InvalidPathError(SkewMotzkinError, ValueError):
    """A word violates the automaton rules where a valid path is required."""


class OracleLimitError(SkewMotzkinError, ValueError):
    """Brute-force enumeration was asked for a length above the oracle limit."""

    def __init__(self, n: int, limit: int):
        super().__init__(f"oracle limit exceeded: length {n} > limit {limit}")
        self.n = n
        self.limit = limit


class SeriesError(SkewMotzkinError, ArithmeticError):
    """Unsupported or ill-posed truncated series operation."""


class TruncationError(SeriesError, IndexError):
    """A coefficient beyond the known precision was requested."""


class NonIntegerCoefficientError(SeriesError):
    """A counting series produced a coefficient that is not a nonnegative integer."""


class TableRangeError(SkewMotzkinError, IndexError):
    """A count was requested for a length the table does not cover."""


class EmptyClassError(SkewMotzkinError, ValueError):
    """There is no path with the requested length and final level."""


class ConvergenceError(SkewMotzkinError, ArithmeticError):
    """A numeric extraction did not stabilise to the requested accuracy."""


class VerificationError(SkewMotzkinError):
    """
    Two independent computations disagree.

    Attributes:
        check (str): Name of the cross-check.
        generator (str): The quantity being compared (e.g. 'gf_level').
        n (Optional[int]): Length (coefficient index) of the first mismatch.
        j (Optional[int]): Level or height parameter, when relevant.
        expected: Value from the reference computation.
        got: Value from the computation under test.
    """

    def __init__(
        self,
        check: str,
        generator: str,
        n: Optional[int] = None,
        j: Optional[int] = None,
        expected: Any = None,
        got: Any = None,
    ):
        self.check = check
        self.generator = generator
        self.n = n
        self.j = j
        self.expected = expected
        self.got = got
        super().__init__(
            f"{check}: {generator} n={n} j={j} expected={expected} got={got}"
        )
