"""
Skew Motzkin paths as words over the four-step automaton.

A path is a word over ``U`` (up), ``D`` (down), ``F`` (flat) and ``L`` (left).
Levels are computed in the red coding, where a left step acts as ``(1, -1)``:
every prefix must stay at level >= 0 and the factors ``UL`` and ``LU`` are
forbidden. The module also provides the brute-force oracle used to check every
generating function in the package.
"""

import asyncio
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import InvalidPathError, OracleLimitError

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_LIMIT = 16


class Step(str, Enum):
    UP = "U"
    DOWN = "D"
    FLAT = "F"
    LEFT = "L"

    def __str__(self) -> str:
        return self.value


class Layer(str, Enum):
    """Layer of the automaton, named by the series that counts it."""

    F = "F"
    G = "G"
    H = "H"
    K = "K"

    def __str__(self) -> str:
        return self.value


class Coding(str, Enum):
    GEOMETRIC = "geometric"
    RED = "red"


class ViolationKind(str, Enum):
    BELOW_AXIS = "below-axis"
    UP_THEN_LEFT = "up-then-left"
    LEFT_THEN_UP = "left-then-up"


# Canonical enumeration order.
STEP_ORDER: Tuple[Step, ...] = (Step.UP, Step.DOWN, Step.FLAT, Step.LEFT)

LAYER_OF_STEP: Dict[Step, Layer] = {
    Step.UP: Layer.F,
    Step.DOWN: Layer.G,
    Step.FLAT: Layer.H,
    Step.LEFT: Layer.K,
}

LEVEL_CHANGE: Dict[Step, int] = {
    Step.UP: 1,
    Step.DOWN: -1,
    Step.FLAT: 0,
    Step.LEFT: -1,
}

_DISPLACEMENTS: Dict[Coding, Dict[Step, Tuple[int, int]]] = {
    Coding.GEOMETRIC: {
        Step.UP: (1, 1),
        Step.DOWN: (1, -1),
        Step.FLAT: (1, 0),
        Step.LEFT: (-1, -1),
    },
    Coding.RED: {
        Step.UP: (1, 1),
        Step.DOWN: (1, -1),
        Step.FLAT: (1, 0),
        Step.LEFT: (1, -1),
    },
}

Word = Union[str, Sequence[Step]]


def step_displacement(
    step: Step, coding: Union[Coding, str] = Coding.GEOMETRIC
) -> Tuple[int, int]:
    """
    Return the ``(dx, dy)`` displacement of a step.

    The geometric and red codings differ only on the left step:
    ``(-1, -1)`` versus ``(1, -1)``.
    """
    return _DISPLACEMENTS[Coding(coding)][Step(step)]


def forbidden_after(previous: Optional[Step], step: Step) -> Optional[ViolationKind]:
    """Return the adjacency violation caused by ``step`` following ``previous``."""
    if previous is Step.UP and step is Step.LEFT:
        return ViolationKind.UP_THEN_LEFT
    if previous is Step.LEFT and step is Step.UP:
        return ViolationKind.LEFT_THEN_UP
    return None


def parse_word(word: Word) -> Tuple[Step, ...]:
    """
    Convert a word over ``{U, D, F, L}`` (string or sequence of steps) to steps.

    Raises:
        InvalidPathError: If a character is not one of the four step letters.
    """
    try:
        return tuple(Step(s) for s in word)
    except ValueError as e:
        raise InvalidPathError(f"Unknown step in word {word!r}: {e}") from e


@dataclass(frozen=True)
class Violation:
    index: int
    kind: ViolationKind


@dataclass(frozen=True)
class ValidityReport:
    violation: Optional[Violation] = None

    @property
    def valid(self) -> bool:
        return self.violation is None


def validate(word: Word) -> ValidityReport:
    """
    Check a word against the automaton rules.

    The earliest offence is reported: a below-axis violation at the step that
    first makes the level negative, an adjacency violation at the second step of
    the offending pair.

    Args:
        word (Word): The word to check.

    Returns:
        ValidityReport: ``valid`` is True iff no violation was found.
    """
    level = 0
    previous: Optional[Step] = None
    for index, step in enumerate(parse_word(word)):
        kind = forbidden_after(previous, step)
        if kind is not None:
            return ValidityReport(Violation(index, kind))
        level += LEVEL_CHANGE[step]
        if level < 0:
            return ValidityReport(Violation(index, ViolationKind.BELOW_AXIS))
        previous = step
    return ValidityReport()


@dataclass(frozen=True)
class PathStats:
    final_level: int
    height: int
    flats: int
    lefts: int
    layer: Layer


@dataclass(frozen=True)
class Path:
    """
    A valid skew Motzkin path with cached statistics.

    Attributes:
        steps (Tuple[Step, ...]): The steps of the path.
        final_level (int): Level after the last step.
        height (int): Maximum level over all prefixes.
        flats (int): Number of flat steps.
        lefts (int): Number of left steps.
    """

    steps: Tuple[Step, ...]
    final_level: int = field(compare=False)
    height: int = field(compare=False)
    flats: int = field(compare=False)
    lefts: int = field(compare=False)

    @classmethod
    def from_word(cls, word: Word) -> "Path":
        """
        Build a path from a word, rejecting words that break the automaton rules.

        Raises:
            InvalidPathError: If the word is not a valid skew Motzkin path.
        """
        steps = parse_word(word)
        report = validate(steps)
        if not report.valid:
            v = report.violation
            raise InvalidPathError(
                f"Invalid path {''.join(steps)!r}: {v.kind.value} at index {v.index}"
            )
        level = height = 0
        for step in steps:
            level += LEVEL_CHANGE[step]
            height = max(height, level)
        return cls(
            steps=steps,
            final_level=level,
            height=height,
            flats=steps.count(Step.FLAT),
            lefts=steps.count(Step.LEFT),
        )

    @property
    def word(self) -> str:
        return "".join(s.value for s in self.steps)

    @property
    def layer(self) -> Layer:
        # The empty path sits in layer F, matching the seed f_0 = 1.
        return LAYER_OF_STEP[self.steps[-1]] if self.steps else Layer.F

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self) -> str:
        return self.word

    def to_dict(self) -> Dict[str, Union[str, int]]:
        return {
            "word": self.word,
            "level": self.final_level,
            "height": self.height,
            "flats": self.flats,
            "lefts": self.lefts,
            "layer": self.layer.value,
        }


def path_stats(path: Union[Path, Word]) -> PathStats:
    """
    Return the statistics of a path.

    Raises:
        InvalidPathError: If a word is given and it is not a valid path.
    """
    if not isinstance(path, Path):
        path = Path.from_word(path)
    return PathStats(
        final_level=path.final_level,
        height=path.height,
        flats=path.flats,
        lefts=path.lefts,
        layer=path.layer,
    )


# Allowed next steps after each previous step: (step, level change, is flat, is left).
_SUCCESSORS: Dict[Optional[Step], Tuple[Tuple[Step, int, int, int], ...]] = {
    previous: tuple(
        (step, LEVEL_CHANGE[step], int(step is Step.FLAT), int(step is Step.LEFT))
        for step in STEP_ORDER
        if forbidden_after(previous, step) is None
    )
    for previous in (None, *STEP_ORDER)
}


def _extend(
    prefix: List[Step],
    level: int,
    height: int,
    flats: int,
    lefts: int,
    remaining: int,
    final_level: Optional[int],
    max_height: Optional[int],
    out: List[Path],
) -> None:
    # Prefixes are valid by construction, so leaves become paths without re-validation.
    if remaining == 0:
        if final_level is None or level == final_level:
            out.append(
                Path(steps=tuple(prefix), final_level=level, height=height, flats=flats, lefts=lefts)
            )
        return
    for step, change, flat, left in _SUCCESSORS[prefix[-1] if prefix else None]:
        nxt = level + change
        if nxt < 0:
            continue
        if max_height is not None and nxt > max_height:
            continue
        if final_level is not None and abs(nxt - final_level) > remaining - 1:
            continue
        prefix.append(step)
        _extend(
            prefix, nxt, nxt if nxt > height else height, flats + flat, lefts + left,
            remaining - 1, final_level, max_height, out,
        )
        prefix.pop()


def _enumerate_from(
    first: Step, n: int, final_level: Optional[int], max_height: Optional[int]
) -> List[Path]:
    out: List[Path] = []
    level = LEVEL_CHANGE[first]
    if level < 0 or (max_height is not None and level > max_height):
        return out
    if final_level is not None and abs(level - final_level) > n - 1:
        return out
    _extend(
        [first], level, level, int(first is Step.FLAT), int(first is Step.LEFT),
        n - 1, final_level, max_height, out,
    )
    return out


async def _enumerate_parallel(
    n: int, final_level: Optional[int], max_height: Optional[int]
) -> List[Path]:
    parts = await asyncio.gather(
        *(
            asyncio.to_thread(_enumerate_from, first, n, final_level, max_height)
            for first in STEP_ORDER
        )
    )
    return [p for part in parts for p in part]


def enumerate_paths(
    n: int,
    final_level: Optional[int] = None,
    max_height: Optional[int] = None,
    limit: int = DEFAULT_ORACLE_LIMIT,
    parallel: bool = False,
) -> List[Path]:
    """
    Exhaustively list all valid paths of length ``n``.

    Paths come out in lexicographic order of the step tags with U < D < F < L.
    Branches that can no longer reach ``final_level`` or that climb above
    ``max_height`` are pruned.

    Args:
        n (int): Path length.
        final_level (Optional[int]): Required final level, or None for any level.
        max_height (Optional[int]): Height cap, or None for no cap.
        limit (int): Largest length accepted by the oracle.
        parallel (bool): Split the search over the first step in worker threads.

    Returns:
        List[Path]: The matching paths in canonical order.

    Raises:
        OracleLimitError: If ``n`` exceeds ``limit``.
        ValueError: If ``n`` is negative.
    """
    if n < 0:
        raise ValueError("Path length cannot be negative")
    if n > limit:
        raise OracleLimitError(n, limit)
    if n == 0:
        return [Path.from_word(())] if final_level in (None, 0) else []

    logger.debug(
        f"Enumerating length {n} (level={final_level}, max_height={max_height})"
    )
    if parallel:
        return asyncio.run(_enumerate_parallel(n, final_level, max_height))
    return [
        p
        for first in STEP_ORDER
        for p in _enumerate_from(first, n, final_level, max_height)
    ]


def tally_paths(max_length: int, limit: int = DEFAULT_ORACLE_LIMIT) -> Counter:
    """
    Count every valid path of length ``0..max_length`` by its statistics.

    A single depth-first walk visits each path once; every prefix of a valid
    path is itself valid, so all lengths are tallied in the same pass.

    Returns:
        Counter: Keys ``(n, final_level, layer, height, flats, lefts)``.

    Raises:
        OracleLimitError: If ``max_length`` exceeds ``limit``.
        ValueError: If ``max_length`` is negative.
    """
    if max_length < 0:
        raise ValueError("Path length cannot be negative")
    if max_length > limit:
        raise OracleLimitError(max_length, limit)
    logger.debug(f"Tallying all paths up to length {max_length}")
    tally: Counter = Counter()

    def walk(n: int, level: int, previous: Optional[Step], height: int, flats: int, lefts: int):
        layer = LAYER_OF_STEP[previous] if previous is not None else Layer.F
        tally[(n, level, layer, height, flats, lefts)] += 1
        if n == max_length:
            return
        for step, change, flat, left in _SUCCESSORS[previous]:
            nxt = level + change
            if nxt >= 0:
                walk(n + 1, nxt, step, nxt if nxt > height else height, flats + flat, lefts + left)

    walk(0, 0, None, 0, 0, 0)
    return tally


def geometric_self_overlap(word: Word) -> bool:
    """
    Report whether the geometric polyline traverses some unit segment twice.

    Segments are compared as unordered endpoint pairs; crossings at segment
    midpoints are not flagged.
    """
    x = y = 0
    seen = set()
    for step in parse_word(word):
        dx, dy = step_displacement(step, Coding.GEOMETRIC)
        segment = frozenset(((x, y), (x + dx, y + dy)))
        if segment in seen:
            return True
        seen.add(segment)
        x, y = x + dx, y + dy
    return False


def coding_discrepancies(n: int, limit: int = DEFAULT_ORACLE_LIMIT) -> List[Path]:
    """
    List automaton-valid paths of length ``n`` whose geometric polyline reuses a segment.

    Both codings give the same levels, and every ``UL``/``LU`` factor retraces a
    segment, so geometric validity implies automaton validity; the only possible
    disagreements are the paths returned here.
    """
    found = [p for p in enumerate_paths(n, limit=limit) if geometric_self_overlap(p.steps)]
    if found:
        logger.warning(
            f"{len(found)} automaton paths of length {n} overlap geometrically, "
            f"first {found[0].word}"
        )
    return found


def words(paths: Iterable[Path]) -> List[str]:
    return [p.word for p in paths]
