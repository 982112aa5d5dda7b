"""
Exact uniform sampling of skew Motzkin paths.

A completion table counts, for every remaining length, level and previous
step, the number of ways to finish a valid path. A sample is the path with a
uniformly drawn rank in the canonical order U < D < F < L, recovered step by
step from the completion counts. All arithmetic is on Python integers; the
only randomness is one exact integer draw per sample.
"""

import asyncio
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from .errors import EmptyClassError
from .paths import LEVEL_CHANGE, STEP_ORDER, Path, Step, forbidden_after

logger = logging.getLogger(__name__)

RNG_ID = "numpy.PCG64"
MAX_SEED = 2**64

_SLOT: Dict[Step, int] = {step: i for i, step in enumerate(STEP_ORDER)}


@dataclass(frozen=True)
class SamplerSpec:
    """
    What to sample.

    Attributes:
        n (int): Path length.
        final_level (Optional[int]): Required final level, or None for any level.
        seed (int): 64-bit seed.
        count (int): Number of samples.
    """

    n: int
    final_level: Optional[int] = None
    seed: int = 0
    count: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Path length cannot be negative")
        if self.count < 0:
            raise ValueError("Sample count cannot be negative")
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError("Seed must be a 64-bit unsigned integer")

    def metadata(self) -> Dict[str, object]:
        return {
            "seed": self.seed,
            "rng_id": RNG_ID,
            "n": self.n,
            "level": self.final_level,
            "count": self.count,
        }


class CompletionTable:
    """
    ``table[r][j][slot]``: completions of ``r`` more steps from level ``j`` when
    the previous step has index ``slot`` in ``STEP_ORDER``.

    The empty prefix behaves like a flat step, which restricts nothing.
    """

    def __init__(self, n: int, final_level: Optional[int] = None):
        self.n = n
        self.final_level = final_level
        top = n
        first = [1 if final_level is None or j == final_level else 0 for j in range(top + 1)]
        table: List[List[List[int]]] = [[[c] * 4 for c in first]]
        for r in range(1, n + 1):
            below = table[-1]
            row = []
            for j in range(top + 1):
                cells = []
                for prev in STEP_ORDER:
                    total = 0
                    for step in STEP_ORDER:
                        if forbidden_after(prev, step) is not None:
                            continue
                        nj = j + LEVEL_CHANGE[step]
                        if 0 <= nj <= top:
                            total += below[nj][_SLOT[step]]
                    cells.append(total)
                row.append(cells)
            table.append(row)
        self.table = table

    def completions(self, remaining: int, level: int, previous: Optional[Step]) -> int:
        if not 0 <= level <= self.n:
            return 0
        slot = _SLOT[previous if previous is not None else Step.FLAT]
        return self.table[remaining][level][slot]

    @property
    def total(self) -> int:
        return self.completions(self.n, 0, None)

    def unrank(self, rank: int) -> Path:
        """
        Return the path of the given rank in canonical order.

        Raises:
            IndexError: If ``rank`` is not in ``[0, total)``.
        """
        if not 0 <= rank < self.total:
            raise IndexError(f"Rank {rank} outside [0, {self.total})")
        steps: List[Step] = []
        level = 0
        previous: Optional[Step] = None
        for remaining in range(self.n, 0, -1):
            for step in STEP_ORDER:
                if forbidden_after(previous, step) is not None:
                    continue
                nxt = level + LEVEL_CHANGE[step]
                c = self.completions(remaining - 1, nxt, step)
                if rank < c:
                    steps.append(step)
                    level, previous = nxt, step
                    break
                rank -= c
        return Path.from_word(steps)


def randbelow(rng: Generator, bound: int) -> int:
    """
    Draw an integer uniformly from ``[0, bound)`` by rejection on random bytes.

    Works for bounds of any size.
    """
    if bound <= 0:
        raise ValueError("Bound must be positive")
    bits = (bound - 1).bit_length()
    if bits == 0:
        return 0
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if x < bound:
            return x


def _draw(table: CompletionTable, rng: Generator, count: int) -> List[Path]:
    total = table.total
    return [table.unrank(randbelow(rng, total)) for _ in range(count)]


def _chunks(count: int, workers: int) -> List[int]:
    base, extra = divmod(count, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


async def _draw_parallel(
    table: CompletionTable, seeds: Sequence[SeedSequence], sizes: Sequence[int]
) -> List[Path]:
    parts = await asyncio.gather(
        *(
            asyncio.to_thread(_draw, table, Generator(PCG64(ss)), size)
            for ss, size in zip(seeds, sizes)
        )
    )
    return [p for part in parts for p in part]


def sample_uniform(spec: SamplerSpec, workers: int = 1) -> List[Path]:
    """
    Draw ``spec.count`` paths uniformly from the requested class.

    With ``workers > 1`` the samples are split into contiguous batches, batch
    ``i`` drawn from the ``i``-th stream spawned from ``SeedSequence(seed)``;
    output is deterministic for a fixed worker count.

    Raises:
        EmptyClassError: If no path has the requested length and level.
    """
    table = CompletionTable(spec.n, spec.final_level)
    if table.total == 0:
        raise EmptyClassError(
            f"No path of length {spec.n} ends at level {spec.final_level}"
        )
    logger.info(
        f"Sampling {spec.count} of {table.total} paths "
        f"(n={spec.n}, level={spec.final_level}, workers={workers})"
    )
    root = SeedSequence(spec.seed)
    if workers <= 1:
        return _draw(table, Generator(PCG64(root)), spec.count)
    return asyncio.run(
        _draw_parallel(table, root.spawn(workers), _chunks(spec.count, workers))
    )


@dataclass(frozen=True)
class SampleStatistics:
    count: int
    mean_height: float
    height_stderr: float
    mean_flats: float
    mean_lefts: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "count": self.count,
            "mean_height": self.mean_height,
            "height_stderr": self.height_stderr,
            "mean_flats": self.mean_flats,
            "mean_lefts": self.mean_lefts,
        }


def sample_statistics(samples: Sequence[Path]) -> SampleStatistics:
    """Empirical means of height, flats and lefts over a batch of samples."""
    if not samples:
        raise ValueError("No samples")
    heights = np.array([p.height for p in samples], dtype=float)
    stderr = float(heights.std(ddof=1) / np.sqrt(len(heights))) if len(heights) > 1 else 0.0
    return SampleStatistics(
        count=len(samples),
        mean_height=float(heights.mean()),
        height_stderr=stderr,
        mean_flats=float(np.mean([p.flats for p in samples])),
        mean_lefts=float(np.mean([p.lefts for p in samples])),
    )


def frequencies(samples: Sequence[Path]) -> Dict[str, int]:
    return dict(Counter(p.word for p in samples))
