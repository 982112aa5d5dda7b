"""
High-precision singularity data for the return series and the height law.

The dominant singularity ``rho`` is the root of ``1 - 3z - z^2 - z^3`` in
``(0, 1/3]``. Near ``rho`` the square-root part behaves like
``W ~ sqrt(C) sqrt(rho - z)`` with ``C = (1 - rho)(3 + 2 rho + 3 rho^2)``, which
gives the counting estimate ``amp / (2 sqrt(pi)) rho^-n n^-3/2``.

The height constants come from the limits of two ratios divided by
``s = sqrt(rho - z)``, evaluated on the ladder ``z = rho (1 - 10^-k)`` and
extrapolated to ``s = 0``. With ``c = z^3 + z^2 + 3z - 1`` and
``omega = (1 + z) W`` the bounded-height numerators and denominators split as
``A_o = P + Q omega``, ``B_o = P - Q omega``, ``A_u = R + S omega`` and
``B_u = R - S omega``, so ``A_o B_u - A_u B_o = 2 omega (QR - PS)`` has no
cancelling terms.
"""

import logging
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
from cachetools import LRUCache, cached
from mpmath import mp, mpf

from .dpcount import HeightProfile, height_distribution, return_counts
from .errors import ConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 50
LADDER = tuple(range(6, 13))
# Successive extrapolations must agree to this many significant digits.
STABLE_DIGITS = 9
GUARD_DIGITS = 20

# Reference values, used for reporting |delta| only.
TARGETS: Dict[str, str] = {
    "rho": "0.295597742522084770980996",
    "a0": "2.8392867552141611323",
    "C": "2.714294041",
    "amp": "5.1256244361431546460",
    "sqrt_coefficient": "9.4274931376",
    "p_at_rho": "0.8176090299",
    "omega_coefficient": "2.1345121404",
    "half_ratio": "2.6106758394",
    "K_diff": "18.854986275200314363",
    "K_exp": "5.2213516788791457598",
    "K_log": "1.8055656307800996608",
    "K_height": "0.70452513767814089508",
}

# 1 - 3z - z^2 - z^3, highest degree first for mpmath.polyval.
_SINGULAR_POLY = [-1, -1, -3, 1]
_SINGULAR_DERIV = [-3, -2, -3]

_rho_cache: LRUCache = LRUCache(maxsize=16)
_rho_lock = threading.Lock()
_height_cache: LRUCache = LRUCache(maxsize=16)
_height_lock = threading.Lock()


def singular_polynomial(z) -> mpf:
    return mpmath.polyval(_SINGULAR_POLY, z)


@cached(_rho_cache, lock=_rho_lock)
def find_rho(digits: int = DEFAULT_DIGITS) -> mpf:
    """
    Locate the dominant singularity to ``digits`` decimal digits.

    A sign-checked bisection on ``[0, 1/3]`` isolates the root, then Newton
    steps polish it.

    Args:
        digits (int): Decimal digits of precision (>= 10).

    Returns:
        mpf: The root of ``1 - 3z - z^2 - z^3`` in ``(0, 1/3]``.

    Raises:
        ValueError: If fewer than 10 digits are requested.
        ConvergenceError: If the residual is not below ``10^(-digits + 2)``.
    """
    if digits < 10:
        raise ValueError("At least 10 digits are required")
    with mp.workdps(digits + GUARD_DIGITS):
        lo, hi = mpf(0), mpf(1) / 3
        f_lo = singular_polynomial(lo)
        if f_lo * singular_polynomial(hi) > 0:
            raise ConvergenceError("No sign change on [0, 1/3]")
        for _ in range(40):
            mid = (lo + hi) / 2
            f_mid = singular_polynomial(mid)
            if (f_mid > 0) == (f_lo > 0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        rho = mpmath.findroot(
            singular_polynomial,
            (lo + hi) / 2,
            solver="newton",
            df=lambda z: mpmath.polyval(_SINGULAR_DERIV, z),
        )
        residual = abs(singular_polynomial(rho))
        if residual >= mpf(10) ** (-digits + 2):
            raise ConvergenceError(f"Residual {mpmath.nstr(residual, 5)} too large")
        logger.debug(f"rho = {mpmath.nstr(rho, digits)}")
        return +rho


@dataclass(frozen=True)
class AmplitudeConstants:
    """Local data of the return series at ``rho``."""

    a0: mpf
    C: mpf
    amp: mpf
    sqrt_coefficient: mpf
    p_at_rho: mpf
    omega_coefficient: mpf
    half_ratio: mpf


def amplitude_constants(digits: int = DEFAULT_DIGITS) -> AmplitudeConstants:
    """
    Derive the amplitude chain from ``rho`` alone.

    ``a0 = (1 - rho)^2 / (2 rho^2)``, ``amp = sqrt(C rho) / (2 rho^2)``; the
    ``sqrt(rho - z)`` coefficient of the return series is ``sqrt(C) / (2 rho^2)``.
    """
    rho = find_rho(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        C = (1 - rho) * (3 + 2 * rho + 3 * rho**2)
        p_at_rho = 1 - rho + rho**2 + rho**3
        omega_coefficient = (1 + rho) * mpmath.sqrt(C)
        return AmplitudeConstants(
            a0=(1 - rho) ** 2 / (2 * rho**2),
            C=C,
            amp=mpmath.sqrt(C * rho) / (2 * rho**2),
            sqrt_coefficient=mpmath.sqrt(C) / (2 * rho**2),
            p_at_rho=p_at_rho,
            omega_coefficient=omega_coefficient,
            half_ratio=omega_coefficient / p_at_rho,
        )


@dataclass(frozen=True)
class CountEstimate:
    n: int
    exact: int
    estimate: mpf
    rel_error: mpf


def count_estimate(
    n: int, exact: Optional[int] = None, digits: int = DEFAULT_DIGITS
) -> CountEstimate:
    """
    Compare the leading-order estimate with the exact number of return paths.

    Args:
        n (int): Length (>= 1).
        exact (Optional[int]): Exact count; computed by the DP sweep when omitted.
        digits (int): Working precision.
    """
    if n < 1:
        raise ValueError("Counting estimate needs n >= 1")
    if exact is None:
        exact = return_counts(n)[n]
    rho = find_rho(digits)
    amp = amplitude_constants(digits).amp
    with mp.workdps(digits + GUARD_DIGITS):
        estimate = amp / (2 * mpmath.sqrt(mp.pi)) * rho ** (-n) * mpf(n) ** mpf(-1.5)
        rel_error = abs(estimate - exact) / exact
    return CountEstimate(n=n, exact=exact, estimate=estimate, rel_error=rel_error)


def count_estimates(ns: Iterable[int], digits: int = DEFAULT_DIGITS) -> List[CountEstimate]:
    """Estimates for several lengths from a single DP sweep."""
    ns = sorted(set(ns))
    if not ns:
        return []
    exact = return_counts(ns[-1])
    return [count_estimate(n, exact[n], digits) for n in ns]


def _ladder_parts(z: mpf) -> Tuple[mpf, mpf, mpf, mpf, mpf, mpf]:
    c = z**3 + z**2 + 3 * z - 1
    W = mpmath.sqrt((1 - z) * -c)
    omega = (1 + z) * W
    P = c * (1 + z)
    Q = z - 1
    R = (1 - z**2) * c
    S = (z**3 - z**2 + 3 * z - 1) / (1 - z)
    return omega, P, Q, R, S, c


def _exp_ratio(z: mpf, s: mpf) -> mpf:
    omega = _ladder_parts(z)[0]
    p = 1 - z + z**2 + z**3
    return 2 * omega / ((p + omega) * s)


def _diff_ratio(z: mpf, s: mpf) -> mpf:
    omega, P, Q, R, S, _ = _ladder_parts(z)
    A_u = R + S * omega
    return 2 * omega * (Q * R - P * S) / A_u**2 / s


_RATIOS: Dict[str, Callable[[mpf, mpf], mpf]] = {
    "K_exp": _exp_ratio,
    "K_diff": _diff_ratio,
}


def ladder_point(name: str, k: int, digits: int = DEFAULT_DIGITS) -> mpf:
    """
    Evaluate one ladder ratio at ``z = rho (1 - 10^-k)``.

    Args:
        name (str): ``"K_exp"`` or ``"K_diff"``.
        k (int): Ladder exponent.
        digits (int): Working precision.
    """
    ratio = _RATIOS[name]
    rho = find_rho(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        gap = rho * mpf(10) ** (-k)
        return ratio(rho - gap, mpmath.sqrt(gap))


def _extrapolate(nodes: Sequence[mpf], values: Sequence[mpf]) -> mpf:
    # Polynomial in s through the points, read off at s = 0. Nodes are
    # rescaled to (0, 1] to keep the Vandermonde system well conditioned.
    size = len(nodes)
    scale = max(nodes)
    A = mpmath.matrix(size, size)
    for i, s in enumerate(nodes):
        for j in range(size):
            A[i, j] = (s / scale) ** j
    return mpmath.lu_solve(A, mpmath.matrix(values))[0]


def _ladder_limit(name: str, digits: int) -> mpf:
    rho = find_rho(digits)
    ratio = _RATIOS[name]
    with mp.workdps(digits + GUARD_DIGITS):
        nodes, values = [], []
        for k in LADDER:
            gap = rho * mpf(10) ** (-k)
            s = mpmath.sqrt(gap)
            nodes.append(s)
            values.append(ratio(rho - gap, s))
            logger.debug(f"{name} ladder k={k}: {mpmath.nstr(values[-1], 20)}")
        previous = _extrapolate(nodes[:-1], values[:-1])
        limit = _extrapolate(nodes, values)
        if abs(limit - previous) > abs(limit) * mpf(10) ** (-STABLE_DIGITS):
            raise ConvergenceError(
                f"{name} ladder unstable: {mpmath.nstr(previous, 15)} "
                f"vs {mpmath.nstr(limit, 15)}"
            )
        return +limit


@dataclass(frozen=True)
class HeightConstants:
    K_diff: mpf
    K_exp: mpf
    K_log: mpf
    K_height: mpf


@cached(_height_cache, lock=_height_lock)
def height_constants(digits: int = DEFAULT_DIGITS) -> HeightConstants:
    """
    Extract the constants of the average-height law.

    ``K_log = K_diff / (2 K_exp)`` is the coefficient of ``-log(rho - z)`` in
    the excess-height sum and ``K_height = 2 K_log / amp``, so the mean height
    of return paths of length ``n`` is ``K_height sqrt(pi n)`` to leading order.

    Raises:
        ValueError: If fewer than 15 digits are requested.
        ConvergenceError: If successive ladder extrapolations disagree.
    """
    if digits < 15:
        raise ValueError("At least 15 digits are required")
    logger.info(f"Extracting height constants at {digits} digits")
    K_diff = _ladder_limit("K_diff", digits)
    K_exp = _ladder_limit("K_exp", digits)
    amp = amplitude_constants(digits).amp
    with mp.workdps(digits + GUARD_DIGITS):
        K_log = K_diff / (2 * K_exp)
        K_height = 2 * K_log / amp
    return HeightConstants(K_diff=K_diff, K_exp=K_exp, K_log=K_log, K_height=K_height)


@dataclass(frozen=True)
class HeightEstimate:
    n: int
    exact: Fraction
    estimate: mpf
    rel_error: Optional[mpf]

    @property
    def ratio(self) -> Optional[mpf]:
        """Exact mean height over ``sqrt(pi n)``."""
        if self.n == 0:
            return None
        return mpf(self.exact.numerator) / self.exact.denominator / mpmath.sqrt(mp.pi * self.n)


def expected_height_estimate(
    n: int,
    profile: Optional[HeightProfile] = None,
    digits: int = DEFAULT_DIGITS,
    workers: int = 1,
) -> HeightEstimate:
    """
    Compare ``K_height sqrt(pi n)`` with the exact mean height at length ``n``.

    At ``n = 0`` the exact mean is 0 and no relative error is reported.
    """
    if profile is None:
        profile = height_distribution(n, workers=workers)
    K_height = height_constants(digits).K_height
    with mp.workdps(digits + GUARD_DIGITS):
        estimate = K_height * mpmath.sqrt(mp.pi * n)
        exact = profile.expected_height
        rel_error = None
        if n > 0:
            exact_mp = mpf(exact.numerator) / exact.denominator
            rel_error = abs(estimate - exact_mp) / exact_mp
    return HeightEstimate(n=n, exact=exact, estimate=estimate, rel_error=rel_error)


@dataclass(frozen=True)
class ConstantCheck:
    name: str
    value: mpf
    target: mpf
    delta: mpf


@dataclass(frozen=True)
class AsymptoticReport:
    """
    Every recomputed constant with its reference value, plus the count table.

    Attributes:
        digits (int): Working precision in decimal digits.
        rho (mpf): Dominant singularity.
        amplitude (AmplitudeConstants): ``a0``, ``C``, ``amp`` and the local data.
        heights (HeightConstants): ``K_diff``, ``K_exp``, ``K_log``, ``K_height``.
        estimates (Tuple[CountEstimate, ...]): Exact count versus estimate per n.
    """

    digits: int
    rho: mpf
    amplitude: AmplitudeConstants
    heights: HeightConstants
    estimates: Tuple[CountEstimate, ...] = field(default_factory=tuple)

    def values(self) -> Dict[str, mpf]:
        out = {"rho": self.rho}
        out.update({k: getattr(self.amplitude, k) for k in AmplitudeConstants.__dataclass_fields__})
        out.update({k: getattr(self.heights, k) for k in HeightConstants.__dataclass_fields__})
        return out

    def checks(self) -> List[ConstantCheck]:
        out = []
        with mp.workdps(self.digits + GUARD_DIGITS):
            for name, value in self.values().items():
                target = mpf(TARGETS[name])
                out.append(ConstantCheck(name, value, target, abs(value - target)))
        return out


DEFAULT_CHECK_N = (50, 100, 200, 400)


def build_report(
    digits: int = DEFAULT_DIGITS, check_n: Sequence[int] = DEFAULT_CHECK_N
) -> AsymptoticReport:
    """Assemble the full report at the given precision."""
    logger.info(f"Building asymptotic report at {digits} digits for n={list(check_n)}")
    return AsymptoticReport(
        digits=digits,
        rho=find_rho(digits),
        amplitude=amplitude_constants(digits),
        heights=height_constants(digits),
        estimates=tuple(count_estimates(check_n, digits)),
    )
