"""
Closed-form generating functions for skew Motzkin paths, evaluated as exact series.

Every function takes ``order`` ``N`` and returns a series known exactly through
``z^N`` (absolute precision ``N + 1``). Intermediate quantities are computed with
a few extra coefficients and truncated at the end, so the result never claims
more than its inputs determine.

The kernel of the functional equation is
``2z - u + zu - z^2 u + z u^2 - z^3 - z^3 u = z (u - u1)(u - u2)``,
with ``u1 ~ 1/z`` the good root and ``u2 ~ 2z`` the root that cancels.
Level ``j`` is extracted with ``[u^j] 1/(u - u1) = -1/u1^(j+1)``.
"""

import functools
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from cachetools import LRUCache, cached

from .config import get_config
from .errors import SeriesError, VerificationError
from .paths import Layer
from .series import MarkPoly, MarkedSeries, TruncatedSeries

logger = logging.getLogger(__name__)

# Extra coefficients carried through intermediate steps.
SLACK = 3

BOUNDED_METHODS = ("closed", "recurrence", "system")

_memo_lock = threading.Lock()


def _memoised(fn: Callable) -> Callable:
    """
    Cache ``fn`` in an LRU cache sized by ``KERNEL_CACHE_SIZE``.

    The cache is created on the first call, so the setting is read when the
    series are first needed rather than at import.
    """
    memo: Dict[str, Callable] = {}

    @functools.wraps(fn)
    def wrapper(order: int):
        call = memo.get("call")
        if call is None:
            with _memo_lock:
                call = memo.get("call")
                if call is None:
                    cache = LRUCache(maxsize=get_config().KERNEL_CACHE_SIZE)
                    call = memo["call"] = cached(cache, lock=threading.Lock())(fn)
        return call(order)

    return wrapper


def _poly(coeffs: List[int], precision: int) -> TruncatedSeries:
    return TruncatedSeries.polynomial(coeffs, precision)


def _check_order(order: int) -> None:
    if order < 0:
        raise ValueError("Order cannot be negative")


@dataclass(frozen=True)
class KernelRoots:
    """
    Roots of the kernel polynomial in ``u`` as series in ``z``.

    Attributes:
        u1 (TruncatedSeries): Root with a simple pole at ``z = 0``.
        u2 (TruncatedSeries): Root vanishing like ``2z``.
        W (TruncatedSeries): ``sqrt(1 - 4z + 2z^2 + z^4)``.
    """

    u1: TruncatedSeries
    u2: TruncatedSeries
    W: TruncatedSeries

    @property
    def precision(self) -> int:
        return min(self.u1.precision, self.u2.precision, self.W.precision)


@_memoised
def kernel_roots(order: int) -> KernelRoots:
    """
    Compute ``u1``, ``u2`` and ``W`` through ``z^order``.

    Args:
        order (int): Highest power of ``z`` required (>= 1).

    Returns:
        KernelRoots: The roots, each truncated to absolute precision ``order + 1``.
    """
    if order < 1:
        raise ValueError("Kernel roots need order >= 1")
    logger.debug(f"Computing kernel roots to order {order}")
    precision = order + 2
    W = _poly([1, -4, 2, 0, 1], precision).sqrt()
    p = _poly([1, -1, 1, 1], precision)
    omega = _poly([1, 1], precision) * W
    half = Fraction(1, 2)
    u1 = ((p + omega) * half).shift(-1)
    u2 = ((p - omega) * half).shift(-1)
    return KernelRoots(
        u1=u1.truncate(order + 1),
        u2=u2.truncate(order + 1),
        W=W.truncate(order + 1),
    )


def _inverse_u1_power(kr: KernelRoots, j: int) -> TruncatedSeries:
    return kr.u1.invert() ** (j + 1)


def _one_plus_z_inverse(precision: int) -> TruncatedSeries:
    return _poly([1, 1], precision).invert()


def gf_sm(order: int) -> TruncatedSeries:
    """
    Return paths returning to the x-axis: ``((1 - z)^2 - W) / (2 z^2)``.
    """
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    numerator = _poly([1, -2, 1], kr.W.precision) - kr.W
    return (numerator.shift(-2) * Fraction(1, 2)).truncate(order + 1)


def _level_numerator(kr: KernelRoots) -> TruncatedSeries:
    # 1 + z - 2z^2 - z^3 + z u2
    return _poly([1, 1, -2, -1], kr.precision + 1) + kr.u2.shift(1)


def gf_level(j: int, order: int) -> TruncatedSeries:
    """
    Return partial paths ending at level ``j``:
    ``(1 + z - 2z^2 - z^3 + z u2) / (z (1 + z) u1^(j+1))``.
    """
    if j < 0:
        raise ValueError("Level cannot be negative")
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    precision = kr.precision + j + SLACK
    series = _level_numerator(kr) * _inverse_u1_power(kr, j) * _one_plus_z_inverse(precision)
    return series.shift(-1).truncate(order + 1)


def layer_numerator(layer: Layer, kr: KernelRoots) -> TruncatedSeries:
    """
    Return ``C_layer`` such that the layer series at level ``j`` is ``C_layer / u1^(j+1)``.
    """
    precision = kr.precision + SLACK
    u2 = kr.u2
    layer = Layer(layer)
    if layer is Layer.F:
        return (_poly([1, -1, 1, 1], precision) - u2.shift(1)).shift(-1)
    inv = _one_plus_z_inverse(precision)
    if layer is Layer.G:
        return (u2 - _poly([0, 1], precision)) * inv
    if layer is Layer.H:
        return (_poly([1, 1, -2, -1], precision) + u2.shift(1)) * inv
    return (u2 - _poly([0, 2, 1], precision)) * inv


def gf_layer_level(layer: Layer, j: int, order: int) -> TruncatedSeries:
    """Return paths ending at level ``j`` whose last step puts them in ``layer``."""
    if j < 0:
        raise ValueError("Level cannot be negative")
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    return (layer_numerator(layer, kr) * _inverse_u1_power(kr, j)).truncate(order + 1)


def gf_layer0_constants(order: int) -> Tuple[TruncatedSeries, TruncatedSeries, TruncatedSeries]:
    """
    Return ``(g0, h0, k0)``, the explicit boundary series found by the kernel method.
    """
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    W = kr.W
    precision = W.precision + SLACK
    denominator = _poly([0, 0, -4, 0, 2], precision).invert()  # 1 / (2 z^2 (z^2 - 2))

    g0 = (
        _poly([-1, 3, -1, 0, 0, -1], precision)
        + _poly([1, -1, 0, 1], precision) * W
    ) * denominator
    h0 = (_poly([1, -2, 1], precision) - W).shift(-1) * Fraction(1, 2)
    k0 = -(
        _poly([1, -3, 0, 1, -1], precision) + _poly([-1, 1, 1], precision) * W
    ) * denominator
    return tuple(s.truncate(order + 1) for s in (g0, h0, k0))


def gf_total_closed(order: int) -> TruncatedSeries:
    """
    Return all partial paths by length, from the rational expression in ``W``:
    ``(2 - 3z - 7z^2 - z^3 + z^4 - (2 + z)(1 + z) W) / (2z (1 + z)(2z^2 + 3z - 1))``.
    """
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    precision = kr.W.precision + SLACK
    numerator = _poly([2, -3, -7, -1, 1], precision) - _poly([2, 3, 1], precision) * kr.W
    denominator = _poly([0, 2], precision) * _poly([1, 1], precision) * _poly([-1, 3, 2], precision)
    return (numerator / denominator).truncate(order + 1)


def gf_total(order: int) -> TruncatedSeries:
    """
    Return all partial paths counted by length (the substitution ``u = 1``).

    Computed as ``(-1 - z + 2z^2 + z^3 - z u2) / (z (1 - u1)(1 + z))`` and
    checked against the rational expression of ``gf_total_closed``.

    Raises:
        VerificationError: If the two expressions disagree.
    """
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    precision = kr.precision + SLACK
    numerator = -_level_numerator(kr)
    one_minus_u1 = _poly([1], precision) - kr.u1
    series = (numerator * one_minus_u1.invert() * _one_plus_z_inverse(precision)).shift(-1)
    series = series.truncate(order + 1)
    closed = gf_total_closed(order)
    diff = series.first_difference(closed)
    if diff is not None:
        raise VerificationError(
            "total-substitution", "gf_total", n=diff, expected=closed.coeff(diff), got=series.coeff(diff)
        )
    return series


def gf_marked(order: int, cap: Optional[int] = None) -> MarkedSeries:
    """
    Return return paths with flat steps marked by ``t`` and left steps by ``w``.

    Uses ``(u2 - z w) / (z (1 + t w z))`` with the marked kernel root
    ``u2 = (1 - tz + wz^2 + twz^3 - sqrt(R)) / (2z)`` and
    ``R = (1 - z^2 w)(1 - 2tz + (t^2 - 4 - w) z^2 - 2tw z^3 - w t^2 z^4)``.

    Args:
        order (int): Highest power of ``z`` required.
        cap (Optional[int]): Mark degree cap; defaults to ``order``, which is exact
            because a path of length ``n`` has at most ``n`` flats and ``n`` lefts.
    """
    _check_order(order)
    cap = order if cap is None else cap
    precision = order + SLACK
    zero = MarkPoly(cap=cap)
    one = MarkPoly.constant(1, cap)
    t = MarkPoly.monomial(1, 0, cap=cap)
    w = MarkPoly.monomial(0, 1, cap=cap)

    def poly(coeffs) -> MarkedSeries:
        return TruncatedSeries.polynomial(coeffs, precision, zero=zero)

    radicand = poly([one, zero, -w]) * poly(
        [one, -2 * t, t * t - 4 - w, -2 * t * w, -(w * t * t)]
    )
    q = poly([one, -t, w, t * w])
    u2 = ((q - radicand.sqrt()) * Fraction(1, 2)).shift(-1)
    series = (u2 - poly([zero, w])).shift(-1) / poly([one, t * w])
    logger.debug(f"Marked series computed to order {order} with mark cap {cap}")
    return series.truncate(order + 1)


@dataclass(frozen=True)
class BoundedHeightForm:
    """
    Data of the bounded-height closed form.

    ``s[H] = (Ao lp^H + Bo lm^H) / (Au lp^H + Bu lm^H)`` where ``lp``, ``lm``
    are the roots of ``X^2 - (1 - z + z^2 + z^3) X + (2z^2 - z^4)``.
    """

    Ao: TruncatedSeries
    Bo: TruncatedSeries
    Au: TruncatedSeries
    Bu: TruncatedSeries
    omega: TruncatedSeries
    lambda_plus: TruncatedSeries
    lambda_minus: TruncatedSeries


@_memoised
def bounded_height_form(order: int) -> BoundedHeightForm:
    _check_order(order)
    kr = kernel_roots(order + SLACK)
    precision = kr.precision
    omega = _poly([1, 1], precision) * kr.W
    c = _poly([-1, 3, 1, 1], precision)  # z^3 + z^2 + 3z - 1
    p = _poly([1, -1, 1, 1], precision)
    P = c * _poly([1, 1], precision)
    Q = _poly([-1, 1], precision)
    R = _poly([1, 0, -1], precision) * c
    S = _poly([-1, 3, -1, 1], precision) / _poly([1, -1], precision)
    half = Fraction(1, 2)
    return BoundedHeightForm(
        Ao=P + Q * omega,
        Bo=P - Q * omega,
        Au=R + S * omega,
        Bu=R - S * omega,
        omega=omega,
        lambda_plus=(p + omega) * half,
        lambda_minus=(p - omega) * half,
    )


def _bounded_closed(H: int, order: int) -> TruncatedSeries:
    form = bounded_height_form(order)
    lp = form.lambda_plus ** H
    lm = form.lambda_minus ** H
    numerator = form.Ao * lp + form.Bo * lm
    denominator = form.Au * lp + form.Bu * lm
    return (numerator / denominator).truncate(order + 1)


def _system_variables(H: int) -> List[Tuple[str, int]]:
    variables = []
    for j in range(H + 1):
        if j >= 1:
            variables.append(("f", j))
        if j < H:
            variables.append(("g", j))
        variables.append(("h", j))
        if j < H:
            variables.append(("k", j))
    return variables


def solve_bounded_system(H: int, order: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """
    Solve the finite height-``H`` system by series elimination.

    Unknowns are ``f_j`` (1 <= j <= H), ``g_j``, ``k_j`` (0 <= j < H) and ``h_j``
    (0 <= j <= H); ``f_0 = 1``. The matrix is ``I - zM``, so every pivot is a
    unit and no row exchange is needed.

    Returns:
        Tuple[TruncatedSeries, TruncatedSeries]: ``s[H] = f0 + g0 + h0 + k0`` and
        the determinant of the system, both through ``z^order``.
    """
    if H < 0:
        raise ValueError("Height cap cannot be negative")
    _check_order(order)
    precision = order + 1
    variables = _system_variables(H)
    index = {v: i for i, v in enumerate(variables)}
    z = _poly([0, 1], precision)
    one = _poly([1], precision)

    rows: List[Dict[int, TruncatedSeries]] = []
    rhs: List[TruncatedSeries] = []

    def add_equation(target: Tuple[str, int], sources: List[Tuple[str, int]]) -> None:
        row: Dict[int, TruncatedSeries] = {index[target]: one}
        constant = TruncatedSeries.zeros(precision)
        for src in sources:
            if src == ("f", 0):
                constant = constant + z
            elif src in index:
                col = index[src]
                row[col] = row.get(col, TruncatedSeries.zeros(precision)) - z
        rows.append(row)
        rhs.append(constant)

    for kind, j in variables:
        if kind == "f":
            add_equation(("f", j), [("f", j - 1), ("g", j - 1), ("h", j - 1)])
        elif kind == "g":
            add_equation(("g", j), [("f", j + 1), ("g", j + 1), ("h", j + 1), ("k", j + 1)])
        elif kind == "h":
            add_equation(("h", j), [("f", j), ("g", j), ("h", j), ("k", j)])
        else:
            add_equation(("k", j), [("g", j + 1), ("h", j + 1), ("k", j + 1)])

    n = len(variables)
    determinant = one
    for col in range(n):
        pivot_row = rows[col]
        pivot = pivot_row[col]
        determinant = determinant * pivot
        inv = pivot.invert()
        for r in range(col + 1, n):
            factor = rows[r].pop(col, None)
            if factor is None or factor.is_zero:
                continue
            factor = factor * inv
            for c, value in pivot_row.items():
                if c == col:
                    continue
                rows[r][c] = rows[r].get(c, TruncatedSeries.zeros(precision)) - factor * value
            rhs[r] = rhs[r] - factor * rhs[col]

    solution: List[Optional[TruncatedSeries]] = [None] * n
    for r in range(n - 1, -1, -1):
        acc = rhs[r]
        for c, value in rows[r].items():
            if c > r:
                acc = acc - value * solution[c]
        solution[r] = acc / rows[r][r]

    s = one
    for name in ("g", "h", "k"):
        if (name, 0) in index:
            s = s + solution[index[(name, 0)]]
    return s.truncate(order + 1), determinant.truncate(order + 1)


def bounded_seeds(order: int) -> List[Tuple[TruncatedSeries, TruncatedSeries]]:
    """
    Return numerator/denominator pairs of ``s[0]`` and ``s[1]`` from the solved systems.

    The denominator is the system determinant and the numerator ``s * det``.
    """
    seeds = []
    for H in (0, 1):
        s, det = solve_bounded_system(H, order)
        seeds.append((s * det, det))
    return seeds


def _bounded_recurrence(H: int, order: int) -> TruncatedSeries:
    precision = order + 1
    (n0, d0), (n1, d1) = bounded_seeds(order)
    if H == 0:
        return (n0 / d0).truncate(precision)
    p = _poly([1, -1, 1, 1], precision)
    q = _poly([0, 0, 2, 0, -1], precision)
    for _ in range(H - 1):
        n0, n1 = n1, p * n1 - q * n0
        d0, d1 = d1, p * d1 - q * d0
    return (n1 / d1).truncate(precision)


def gf_bounded(H: int, order: int, method: str = "closed") -> TruncatedSeries:
    """
    Return return paths of height at most ``H``.

    Args:
        H (int): Height cap (>= 0).
        order (int): Highest power of ``z`` required.
        method (str): ``closed`` (ratio of characteristic-root powers),
            ``recurrence`` (three-term recurrence on numerator and denominator,
            seeded from the solved H=0 and H=1 systems) or ``system`` (direct
            elimination of the height-H system).
    """
    if H < 0:
        raise ValueError("Height cap cannot be negative")
    _check_order(order)
    if method == "closed":
        return _bounded_closed(H, order)
    if method == "recurrence":
        return _bounded_recurrence(H, order)
    if method == "system":
        return solve_bounded_system(H, order)[0]
    raise SeriesError(f"Unknown bounded-height method {method!r}; expected one of {BOUNDED_METHODS}")


def gf_bounded_limit(order: int) -> TruncatedSeries:
    """Return ``Ao / Au``, the limit of ``s[H]`` as ``H`` grows."""
    form = bounded_height_form(order)
    return (form.Ao / form.Au).truncate(order + 1)


def gf_excess_height(H: int, order: int) -> TruncatedSeries:
    """Return return paths of height greater than ``H``: ``s[inf] - s[H]``."""
    return gf_sm(order) - gf_bounded(H, order)


def kernel_cancellation_check(j: int, order: int) -> Optional[int]:
    """
    Compare the un-cancelled and cancelled forms of ``F(u)`` at ``u^j``.

    The un-cancelled form is the published numerator
    ``2z - z^3 + u(-1 + z + z^2 + (z^2 + z^3)(g0 + h0 + k0))`` over the full
    kernel, expanded as a power series in ``u`` with Laurent coefficients in ``z``.

    Returns:
        Optional[int]: First power of ``z`` where they differ, or None.
    """
    if j < 0:
        raise ValueError("Level cannot be negative")
    precision = order + 2 * SLACK + j
    sm = gf_sm(precision)
    d0 = _poly([0, 2, 0, -1], precision)
    d1 = _poly([-1, 1, -1, -1], precision)
    d2 = _poly([0, 1], precision)
    f0 = d0
    f1 = _poly([-1, 1, 1], precision) + _poly([0, 0, 1, 1], precision) * (sm - 1)

    inv_d0 = d0.invert()
    e: List[TruncatedSeries] = [inv_d0]
    for m in range(1, j + 1):
        acc = d1 * e[m - 1]
        if m >= 2:
            acc = acc + d2 * e[m - 2]
        e.append(-(acc * inv_d0))
    uncancelled = f0 * e[j]
    if j >= 1:
        uncancelled = uncancelled + f1 * e[j - 1]
    uncancelled = uncancelled.truncate(order + 1)
    return uncancelled.first_difference(gf_layer_level(Layer.F, j, order))


def radicand_factorisation_check(order: int) -> bool:
    """Check ``W^2 = (1 - z)(1 - 3z - z^2 - z^3) = 1 - 4z + 2z^2 + z^4`` to order."""
    W = kernel_roots(max(order, 1)).W
    precision = W.precision
    square = W * W
    factored = _poly([1, -1], precision) * _poly([1, -3, -1, -1], precision)
    expanded = _poly([1, -4, 2, 0, 1], precision)
    return square.agrees_with(factored) and square.agrees_with(expanded)


def gf_by_name(name: str, order: int):
    """
    Resolve a generator name as used on the command line.

    Accepted: ``sm``, ``total``, ``marked``, ``level:<j>``, ``bounded:<H>``,
    ``layer:<F|G|H|K>:<j>``.
    """
    parts = name.split(":")
    try:
        if parts == ["sm"]:
            return gf_sm(order)
        if parts == ["total"]:
            return gf_total(order)
        if parts == ["marked"]:
            return gf_marked(order)
        if parts[0] == "level" and len(parts) == 2:
            return gf_level(int(parts[1]), order)
        if parts[0] == "bounded" and len(parts) == 2:
            return gf_bounded(int(parts[1]), order)
        if parts[0] == "layer" and len(parts) == 3:
            return gf_layer_level(Layer(parts[1].upper()), int(parts[2]), order)
    except ValueError as e:
        raise ValueError(f"Bad generator {name!r}: {e}") from e
    raise ValueError(f"Unknown generator {name!r}")
