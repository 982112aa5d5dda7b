"""
Exact dynamic-programming counts over the four-layer automaton.

A table row for length ``n`` holds, for every level ``j``, the four counts
``[f, g, h, k]`` of paths ending at ``j`` whose last step is up, down, flat or
left. One step of the sweep applies

    f(n+1, j+1) += f + g + h      at (n, j)
    g(n+1, j)   += f + g + h + k  at (n, j+1)
    h(n+1, j)   += f + g + h + k  at (n, j)
    k(n+1, j)   += g + h + k      at (n, j+1)

with targets above an optional height cap discarded.
"""

import asyncio
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from .errors import TableRangeError
from .paths import Layer

logger = logging.getLogger(__name__)

F, G, H, K = range(4)
LAYER_SLOT: Dict[Layer, int] = {Layer.F: F, Layer.G: G, Layer.H: H, Layer.K: K}

Row = List[List[int]]
MarkCounts = Counter
MarkedRow = List[List[MarkCounts]]


@dataclass(frozen=True)
class LayerCounts:
    f: int
    g: int
    h: int
    k: int

    @property
    def total(self) -> int:
        return self.f + self.g + self.h + self.k

    def __getitem__(self, layer: Layer) -> int:
        return (self.f, self.g, self.h, self.k)[LAYER_SLOT[Layer(layer)]]


def _advance(prev: Row, top: int) -> Row:
    cur = [[0, 0, 0, 0] for _ in range(top + 1)]
    for j, (f, g, h, k) in enumerate(prev):
        if j > top + 1:
            break
        total = f + g + h + k
        if j + 1 <= top:
            cur[j + 1][F] += f + g + h
        if j <= top:
            cur[j][H] += total
        if 1 <= j <= top + 1:
            cur[j - 1][G] += total
            cur[j - 1][K] += g + h + k
    return cur


def _top(n: int, N: int, height_cap: Optional[int], target: Optional[int]) -> int:
    top = n + 1
    if height_cap is not None:
        top = min(top, height_cap)
    if target is not None:
        top = min(top, target + N - n - 1)
    return top


def sweep(
    N: int, height_cap: Optional[int] = None, target: Optional[int] = None
) -> Iterator[Tuple[int, Row]]:
    """
    Yield ``(n, row)`` for ``n = 0..N``.

    Args:
        N (int): Last length.
        height_cap (Optional[int]): Discard levels above this cap.
        target (Optional[int]): If set, drop levels that can no longer reach
            ``target`` by length ``N``; rows are then only complete at level
            ``target`` for ``n = N``.
    """
    row: Row = [[1, 0, 0, 0]]
    yield 0, row
    for n in range(N):
        row = _advance(row, _top(n, N, height_cap, target))
        yield n + 1, row


def _advance_marked(prev: MarkedRow, top: int) -> MarkedRow:
    cur: MarkedRow = [[Counter() for _ in range(4)] for _ in range(top + 1)]
    for j, (f, g, h, k) in enumerate(prev):
        if j > top + 1:
            break
        if j + 1 <= top:
            for src in (f, g, h):
                cur[j + 1][F].update(src)
        if j <= top:
            for src in (f, g, h, k):
                for (a, b), c in src.items():
                    cur[j][H][(a + 1, b)] += c
        if 1 <= j <= top + 1:
            for src in (f, g, h, k):
                cur[j - 1][G].update(src)
            for src in (g, h, k):
                for (a, b), c in src.items():
                    cur[j - 1][K][(a, b + 1)] += c
    return cur


@dataclass(frozen=True)
class CountTable:
    """
    Counts indexed by (length, level, layer).

    Attributes:
        N (int): Largest length covered.
        height_cap (Optional[int]): Height cap applied, if any.
        rows (List[Row]): ``rows[n][j] = [f, g, h, k]``.
    """

    N: int
    height_cap: Optional[int]
    rows: Tuple[Row, ...]

    marks = False

    def _check(self, n: int) -> None:
        if not 0 <= n <= self.N:
            raise TableRangeError(f"Length {n} outside table range 0..{self.N}")

    def layer_counts(self, n: int, j: int) -> LayerCounts:
        self._check(n)
        row = self.rows[n]
        if not 0 <= j < len(row):
            return LayerCounts(0, 0, 0, 0)
        return LayerCounts(*row[j])

    def entry(self, n: int, j: int, layer: Layer) -> int:
        return self.layer_counts(n, j)[layer]

    def count(self, n: int, j: int) -> int:
        return self.layer_counts(n, j).total

    def count_all_levels(self, n: int) -> int:
        self._check(n)
        return sum(sum(cell) for cell in self.rows[n])

    def export_rows(self) -> Iterator[Tuple[int, int, int, int, int, int, int]]:
        """Yield ``(n, j, f, g, h, k, total)`` for every stored cell."""
        for n, row in enumerate(self.rows):
            for j, (f, g, h, k) in enumerate(row):
                yield n, j, f, g, h, k, f + g + h + k


@dataclass(frozen=True)
class MarkedCountTable:
    """
    Counts refined by the number of flat steps ``a`` and left steps ``b``.

    ``rows[n][j][slot]`` is a ``Counter`` mapping ``(a, b)`` to a count.
    """

    N: int
    height_cap: Optional[int]
    rows: Tuple[MarkedRow, ...]

    marks = True

    def _check(self, n: int) -> None:
        if not 0 <= n <= self.N:
            raise TableRangeError(f"Length {n} outside table range 0..{self.N}")

    def marked_entry(self, n: int, j: int, layer: Layer) -> Dict[Tuple[int, int], int]:
        self._check(n)
        row = self.rows[n]
        if not 0 <= j < len(row):
            return {}
        return dict(row[j][LAYER_SLOT[Layer(layer)]])

    def distribution(self, n: int, j: int) -> Dict[Tuple[int, int], int]:
        self._check(n)
        row = self.rows[n]
        out: Counter = Counter()
        if 0 <= j < len(row):
            for cell in row[j]:
                out.update(cell)
        return {m: c for m, c in out.items() if c}

    def forget_marks(self) -> CountTable:
        rows = tuple(
            [[sum(cell.values()) for cell in cells] for cells in row] for row in self.rows
        )
        return CountTable(N=self.N, height_cap=self.height_cap, rows=rows)

    def layer_counts(self, n: int, j: int) -> LayerCounts:
        return self.forget_marks().layer_counts(n, j)

    def count(self, n: int, j: int) -> int:
        return sum(self.distribution(n, j).values())


def build_table(N: int, height_cap: Optional[int] = None, marks: bool = False):
    """
    Build the full count table up to length ``N``.

    Args:
        N (int): Largest length.
        height_cap (Optional[int]): Discard paths that climb above this level.
        marks (bool): Refine every count by (flats, lefts).

    Returns:
        CountTable | MarkedCountTable: The populated table.
    """
    if N < 0:
        raise ValueError("Table length cannot be negative")
    if height_cap is not None and height_cap < 0:
        raise ValueError("Height cap cannot be negative")
    logger.info(f"Building {'marked ' if marks else ''}count table N={N} cap={height_cap}")
    if not marks:
        rows = tuple(row for _, row in sweep(N, height_cap))
        return CountTable(N=N, height_cap=height_cap, rows=rows)

    row: MarkedRow = [[Counter({(0, 0): 1}), Counter(), Counter(), Counter()]]
    marked_rows = [row]
    for n in range(N):
        row = _advance_marked(row, _top(n, N, height_cap, None))
        marked_rows.append(row)
    return MarkedCountTable(N=N, height_cap=height_cap, rows=tuple(marked_rows))


def count(n: int, j: int, height_cap: Optional[int] = None) -> int:
    """Count paths of length ``n`` ending at level ``j`` (optionally height-capped)."""
    if n < 0 or j < 0 or j > n:
        return 0
    last: Row = []
    for _, last in sweep(n, height_cap, target=j):
        pass
    return sum(last[j]) if j < len(last) else 0


def layer_counts(n: int, j: int, height_cap: Optional[int] = None) -> LayerCounts:
    """Per-layer counts of paths of length ``n`` ending at level ``j``."""
    if n < 0 or j < 0 or j > n:
        return LayerCounts(0, 0, 0, 0)
    last: Row = []
    for _, last in sweep(n, height_cap, target=j):
        pass
    return LayerCounts(*last[j]) if j < len(last) else LayerCounts(0, 0, 0, 0)


def count_all_levels(n: int) -> int:
    """Count paths of length ``n`` regardless of their final level."""
    if n < 0:
        return 0
    last: Row = []
    for _, last in sweep(n):
        pass
    return sum(sum(cell) for cell in last)


def return_counts(N: int, height_cap: Optional[int] = None) -> List[int]:
    """Return the counts of return paths (final level 0) for lengths ``0..N``."""
    out = []
    for _, row in sweep(N, height_cap):
        out.append(sum(row[0]))
    return out


@dataclass(frozen=True)
class HeightProfile:
    """
    Height statistics of return paths of length ``n``.

    Attributes:
        n (int): Path length.
        at_most (Tuple[int, ...]): ``at_most[H]`` counts return paths of height <= H, H = 0..n.
        expected_height (Fraction): Exact mean height, ``sum_h P(height > h)``.
    """

    n: int
    at_most: Tuple[int, ...]
    expected_height: Fraction

    @property
    def total(self) -> int:
        return self.at_most[-1]

    def exactly(self, h: int) -> int:
        return self.at_most[h] - (self.at_most[h - 1] if h else 0)


def _capped_return_count(n: int, cap: int) -> int:
    last: Row = []
    for _, last in sweep(n, height_cap=cap, target=0):
        pass
    return sum(last[0])


async def _capped_counts_parallel(n: int, caps: List[int]) -> List[int]:
    return list(
        await asyncio.gather(*(asyncio.to_thread(_capped_return_count, n, h) for h in caps))
    )


def height_distribution(n: int, workers: int = 1) -> HeightProfile:
    """
    Compute the height profile of return paths of length ``n``.

    One capped sweep is run per cap ``H``; a return path of length ``n`` never
    climbs above ``n // 2``, so larger caps reuse the uncapped total.

    Args:
        n (int): Path length.
        workers (int): Run the capped sweeps in worker threads when > 1.
    """
    if n < 0:
        raise ValueError("Path length cannot be negative")
    caps = list(range(n // 2))
    logger.info(f"Height profile for n={n}: {len(caps)} capped sweeps")
    if workers > 1 and caps:
        capped = asyncio.run(_capped_counts_parallel(n, caps))
    else:
        capped = [_capped_return_count(n, h) for h in caps]
    total = _capped_return_count(n, n)
    at_most = tuple(capped + [total] * (n + 1 - len(capped)))
    expected = sum((Fraction(total - a, total) for a in at_most), Fraction(0))
    return HeightProfile(n=n, at_most=at_most, expected_height=expected)


def marked_distribution(n: int, level: int = 0) -> Dict[Tuple[int, int], int]:
    """
    Distribution of (flats, lefts) over paths of length ``n`` ending at ``level``.
    """
    if n < 0:
        raise ValueError("Path length cannot be negative")
    table = build_table(n, marks=True)
    return table.distribution(n, level)
