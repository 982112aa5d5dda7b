"""
Cross-check battery: brute-force oracle, DP tables and closed forms must agree.

Each check compares two or more independent computations coefficient by
coefficient and records the first disagreement as a ``VerificationError``.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .closedforms import (
    BOUNDED_METHODS,
    gf_bounded,
    gf_bounded_limit,
    gf_layer_level,
    gf_level,
    gf_marked,
    gf_sm,
    gf_total,
    kernel_cancellation_check,
    radicand_factorisation_check,
)
from .config import get_config
from .dpcount import build_table, return_counts
from .errors import SkewMotzkinError, VerificationError
from .paths import Layer, tally_paths

logger = logging.getLogger(__name__)

DEFAULT_MAX_LENGTH = 12
MAX_CHECKED_HEIGHT = 6


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    compared: int = 0
    error: Optional[VerificationError] = None

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


@dataclass
class VerificationReport:
    max_length: int
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((r for r in self.results if not r.passed), None)

    def digest(self) -> str:
        """
        Compile a human-readable summary of the battery.

        Returns:
            str: One line per check, failures followed by their first mismatch.
        """
        body = f"Verification up to length {self.max_length}\n\n"
        for result in self.results:
            body += f"{result.status} {result.name} ({result.compared} values)\n"
            if result.error is not None:
                e = result.error
                body += (
                    f"  generator: {e.generator}, n: {e.n}, j: {e.j}, "
                    f"expected: {e.expected}, got: {e.got}\n"
                )
        passed = sum(r.passed for r in self.results)
        body += f"\n{passed}/{len(self.results)} checks passed"
        return body


class _Comparer:
    """Counts comparisons for one check and raises on the first mismatch."""

    def __init__(self, check: str):
        self.check = check
        self.compared = 0

    def same(self, generator: str, expected, got, n: Optional[int] = None, j: Optional[int] = None):
        self.compared += 1
        if expected != got:
            raise VerificationError(self.check, generator, n=n, j=j, expected=expected, got=got)

    def sequences(
        self, generator: str, expected: Sequence, got: Sequence, j: Optional[int] = None
    ) -> None:
        for n, (e, g) in enumerate(zip(expected, got)):
            self.same(generator, e, g, n=n, j=j)


@dataclass
class _OracleData:
    by_level_layer: Dict[Tuple[int, int, Layer], int]
    capped_returns: Dict[Tuple[int, int], int]
    marks: Dict[Tuple[int, int], Counter]


def _collect_oracle(max_length: int, limit: int) -> _OracleData:
    by_level_layer: Dict[Tuple[int, int, Layer], int] = Counter()
    capped: Dict[Tuple[int, int], int] = Counter()
    marks: Dict[Tuple[int, int], Counter] = {}
    for (n, level, layer, height, flats, lefts), c in tally_paths(max_length, limit=limit).items():
        by_level_layer[(n, level, layer)] += c
        marks.setdefault((n, level), Counter())[(flats, lefts)] += c
        if level == 0:
            for H in range(height, MAX_CHECKED_HEIGHT + 1):
                capped[(n, H)] += c
    return _OracleData(by_level_layer, capped, marks)


def _check_levels(N: int, oracle: _OracleData, cmp: _Comparer) -> None:
    table = build_table(N)
    for n in range(N + 1):
        for j in range(n + 1):
            for layer in Layer:
                cmp.same(
                    f"dp.layer:{layer}", oracle.by_level_layer.get((n, j, layer), 0),
                    table.entry(n, j, layer), n=n, j=j,
                )
    for j in range(N + 1):
        dp = [table.count(n, j) for n in range(N + 1)]
        cmp.sequences("gf_level", dp, gf_level(j, N).integer_coefficients(), j=j)
        for layer in Layer:
            dp_layer = [table.entry(n, j, layer) for n in range(N + 1)]
            cmp.sequences(
                f"gf_layer_level:{layer}", dp_layer,
                gf_layer_level(layer, j, N).integer_coefficients(), j=j,
            )
    cmp.sequences("gf_sm", [table.count(n, 0) for n in range(N + 1)], gf_sm(N).integer_coefficients())


def _check_totals(N: int, oracle: _OracleData, cmp: _Comparer) -> None:
    table = build_table(N)
    dp = [table.count_all_levels(n) for n in range(N + 1)]
    brute = [
        sum(c for (m, _, _), c in oracle.by_level_layer.items() if m == n) for n in range(N + 1)
    ]
    cmp.sequences("count_all_levels", brute, dp)
    cmp.sequences("gf_total", dp, gf_total(N).integer_coefficients())


def _check_bounded(N: int, oracle: _OracleData, cmp: _Comparer) -> None:
    for H in range(MAX_CHECKED_HEIGHT + 1):
        dp = return_counts(N, height_cap=H)
        brute = [oracle.capped_returns.get((n, H), 0) for n in range(N + 1)]
        cmp.sequences("dp.height_capped", brute, dp, j=H)
        for method in BOUNDED_METHODS:
            got = gf_bounded(H, N, method=method).integer_coefficients()
            cmp.sequences(f"gf_bounded:{method}", dp, got, j=H)
    cmp.sequences("gf_bounded_limit", gf_sm(N).integer_coefficients(), gf_bounded_limit(N).integer_coefficients())


def _check_marks(N: int, oracle: _OracleData, cmp: _Comparer) -> None:
    table = build_table(N, marks=True)
    marked = gf_marked(N)
    for n in range(N + 1):
        for j in range(n + 1):
            brute = dict(oracle.marks.get((n, j), Counter()))
            cmp.same("dp.marked", brute, table.distribution(n, j), n=n, j=j)
        series = {m: int(c) for m, c in marked.coeff(n).items()}
        cmp.same("gf_marked", table.distribution(n, 0), series, n=n, j=0)


def _check_kernel(N: int, cmp: _Comparer) -> None:
    for j in range(min(N, 6) + 1):
        cmp.same("kernel_cancellation", None, kernel_cancellation_check(j, N), j=j)
    cmp.same("radicand_factorisation", True, radicand_factorisation_check(N))


def _run_check(name: str, fn: Callable[[_Comparer], None]) -> CheckResult:
    cmp = _Comparer(name)
    try:
        fn(cmp)
    except VerificationError as e:
        logger.error(f"Check {name} failed: {e}")
        return CheckResult(name, False, cmp.compared, e)
    logger.info(f"Check {name} passed ({cmp.compared} values)")
    return CheckResult(name, True, cmp.compared)


def run_verification(max_length: int = DEFAULT_MAX_LENGTH, oracle_limit: Optional[int] = None) -> VerificationReport:
    """
    Run every cross-check for lengths ``0..max_length``.

    Args:
        max_length (int): Largest length compared.
        oracle_limit (Optional[int]): Brute-force limit; defaults to ``ORACLE_LIMIT``.

    Returns:
        VerificationReport: Per-check results; ``passed`` is True iff all agree.
    """
    if max_length < 1:
        raise ValueError("Verification needs max_length >= 1")
    limit = get_config().ORACLE_LIMIT if oracle_limit is None else oracle_limit
    logger.info(f"Running verification up to length {max_length}")
    report = VerificationReport(max_length=max_length)
    oracle = _collect_oracle(max_length, limit)

    N = max_length
    checks: List[Tuple[str, Callable[[_Comparer], None]]] = [
        ("levels-and-layers", lambda c: _check_levels(N, oracle, c)),
        ("totals", lambda c: _check_totals(N, oracle, c)),
        ("bounded-height", lambda c: _check_bounded(N, oracle, c)),
        ("marks", lambda c: _check_marks(N, oracle, c)),
        ("kernel", lambda c: _check_kernel(N, c)),
    ]
    for name, fn in checks:
        report.results.append(_run_check(name, fn))
    return report


def require_verified(report: VerificationReport) -> None:
    """Raise the first recorded mismatch, if any."""
    failure = report.first_failure
    if failure is not None:
        raise failure.error or SkewMotzkinError(f"Check {failure.name} failed")
