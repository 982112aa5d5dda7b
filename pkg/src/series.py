"""
Exact truncated Laurent series in ``z``.

A ``TruncatedSeries`` stores a valuation and a dense list of coefficients, so
``c_0 z^v + c_1 z^(v+1) + ... + O(z^p)`` with ``p = v + len(coeffs)``. The
absolute precision ``p`` is propagated through every operation, so a result
never claims more coefficients than its operands determine.

Coefficients live in one of two rings:

- ``fractions.Fraction`` (the default), used for every unmarked closed form;
- ``MarkPoly``, polynomials in the marks ``t`` (flat steps) and ``w`` (left
  steps) reduced modulo ``(t^(cap+1), w^(cap+1))``. Series over this ring are
  ``MarkedSeries``.
"""

import logging
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import NonIntegerCoefficientError, SeriesError, TruncationError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 64

Rational = Union[int, Fraction]
Monomial = Tuple[int, int]


class MarkPoly:
    """
    Polynomial in the marks ``t`` and ``w`` with exact rational coefficients.

    Every result is reduced modulo ``(t^(cap+1), w^(cap+1))``; combining two
    polynomials with different caps uses the smaller one.
    """

    __slots__ = ("terms", "cap")

    def __init__(self, terms: Optional[Dict[Monomial, Rational]] = None, cap: int = DEFAULT_ORDER):
        if cap < 0:
            raise ValueError("Mark degree cap cannot be negative")
        self.cap = cap
        self.terms: Dict[Monomial, Fraction] = {}
        for (a, b), c in (terms or {}).items():
            if a < 0 or b < 0:
                raise ValueError("Mark exponents must be nonnegative")
            if c and a <= cap and b <= cap:
                self.terms[(a, b)] = Fraction(c)

    @classmethod
    def constant(cls, c: Rational, cap: int = DEFAULT_ORDER) -> "MarkPoly":
        return cls({(0, 0): c}, cap)

    @classmethod
    def monomial(cls, a: int, b: int, c: Rational = 1, cap: int = DEFAULT_ORDER) -> "MarkPoly":
        return cls({(a, b): c}, cap)

    def _coerce(self, other) -> Optional["MarkPoly"]:
        if isinstance(other, MarkPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return MarkPoly.constant(other, self.cap)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MarkPoly(out, min(self.cap, other.cap))

    __radd__ = __add__

    def __neg__(self) -> "MarkPoly":
        return MarkPoly({m: -c for m, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MarkPoly({m: c * other for m, c in self.terms.items()}, self.cap)
        if not isinstance(other, MarkPoly):
            return NotImplemented
        cap = min(self.cap, other.cap)
        out: Dict[Monomial, Fraction] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                a, b = a1 + a2, b1 + b2
                if a > cap or b > cap:
                    continue
                out[(a, b)] = out.get((a, b), 0) + c1 * c2
        return MarkPoly(out, cap)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0, 0), Fraction(0))

    def degree(self) -> Monomial:
        """Return the largest ``t`` and ``w`` exponents present."""
        if not self.terms:
            return (0, 0)
        return (max(a for a, _ in self.terms), max(b for _, b in self.terms))

    def inverse(self) -> "MarkPoly":
        """
        Invert in the quotient ring by geometric expansion.

        Raises:
            SeriesError: If the constant term is zero (the element is nilpotent).
        """
        c0 = self.constant_term()
        if not c0:
            raise SeriesError("Mark polynomial with zero constant term is not invertible")
        inv0 = 1 / c0
        step = -(self - c0) * inv0
        result = MarkPoly.constant(inv0, self.cap)
        power = MarkPoly.constant(1, self.cap)
        # Any product of more than 2*cap nilpotent factors vanishes.
        for _ in range(2 * self.cap + 1):
            power = power * step
            if not power:
                break
            result = result + power * inv0
        return result

    def substitute(self, t: Rational, w: Rational) -> Fraction:
        return sum((c * Fraction(t) ** a * Fraction(w) ** b for (a, b), c in self.terms.items()), Fraction(0))

    def items(self) -> List[Tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in self.items():
            marks = "*".join(
                f"{v}^{e}" if e > 1 else v for v, e in (("t", a), ("w", b)) if e
            )
            if not marks:
                parts.append(str(c))
            elif c == 1:
                parts.append(marks)
            else:
                parts.append(f"{c}*{marks}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MarkPoly({self})"


Coefficient = Union[Fraction, MarkPoly]


def _inverse(c: Coefficient) -> Coefficient:
    if isinstance(c, MarkPoly):
        return c.inverse()
    return 1 / Fraction(c)


def _fraction_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class TruncatedSeries:
    """
    Truncated Laurent series with exact coefficients.

    Attributes:
        valuation (int): Exponent of the first stored coefficient. For the zero
            series it equals the precision.
        coeffs (List[Coefficient]): Dense coefficients; ``coeffs[0]`` is nonzero
            unless the list is empty.
        zero (Coefficient): Zero of the coefficient ring.
    """

    __slots__ = ("valuation", "coeffs", "zero")

    def __init__(self, coeffs: Sequence[Coefficient], valuation: int = 0, zero: Coefficient = Fraction(0)):
        coeffs = list(coeffs)
        lead = 0
        while lead < len(coeffs) and not coeffs[lead]:
            lead += 1
        self.valuation = valuation + lead
        self.coeffs = coeffs[lead:]
        self.zero = zero

    # Construction

    @classmethod
    def _make(cls, coeffs: Sequence[Coefficient], valuation: int, zero: Coefficient) -> "TruncatedSeries":
        kind = MarkedSeries if isinstance(zero, MarkPoly) else TruncatedSeries
        return kind(coeffs, valuation, zero)

    @classmethod
    def polynomial(
        cls,
        coeffs: Sequence[Rational],
        precision: int,
        valuation: int = 0,
        zero: Coefficient = Fraction(0),
    ) -> "TruncatedSeries":
        """
        Build ``sum coeffs[i] z^(valuation+i)`` known to absolute precision ``precision``.

        Coefficients beyond the precision are dropped, missing ones are zero.
        """
        length = precision - valuation
        if length < 0:
            raise SeriesError("Precision below the valuation")
        dense = [zero + c for c in coeffs[:length]]
        dense.extend([zero] * (length - len(dense)))
        return cls._make(dense, valuation, zero)

    @classmethod
    def monomial(cls, c: Coefficient, k: int, precision: int) -> "TruncatedSeries":
        zero = MarkPoly(cap=c.cap) if isinstance(c, MarkPoly) else Fraction(0)
        return cls.polynomial([c], precision, valuation=k, zero=zero)

    @classmethod
    def one(cls, precision: int, zero: Coefficient = Fraction(0)) -> "TruncatedSeries":
        return cls.polynomial([1], precision, zero=zero)

    @classmethod
    def variable(cls, precision: int, zero: Coefficient = Fraction(0)) -> "TruncatedSeries":
        return cls.polynomial([0, 1], precision, zero=zero)

    @classmethod
    def zeros(cls, precision: int, zero: Coefficient = Fraction(0)) -> "TruncatedSeries":
        return cls._make([], precision, zero)

    # Shape

    @property
    def precision(self) -> int:
        """Absolute precision: the series is exact modulo ``z^precision``."""
        return self.valuation + len(self.coeffs)

    @property
    def order(self) -> int:
        """Number of retained coefficients from the valuation on."""
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> Coefficient:
        """
        Return the coefficient of ``z^n``.

        Raises:
            TruncationError: If ``n`` is at or beyond the precision.
        """
        if n >= self.precision:
            raise TruncationError(
                f"Coefficient of z^{n} requested but series is only known to O(z^{self.precision})"
            )
        if n < self.valuation:
            return self.zero
        return self.coeffs[n - self.valuation]

    def __getitem__(self, n: int) -> Coefficient:
        return self.coeff(n)

    def coefficients(self, start: int = 0, stop: Optional[int] = None) -> List[Coefficient]:
        """Return coefficients of ``z^start`` up to (excluding) ``z^stop``; ``stop`` defaults to the precision."""
        stop = self.precision if stop is None else stop
        return [self.coeff(n) for n in range(start, stop)]

    def terms(self) -> Iterator[Tuple[int, Coefficient]]:
        for i, c in enumerate(self.coeffs):
            if c:
                yield self.valuation + i, c

    def truncate(self, precision: int) -> "TruncatedSeries":
        """
        Drop every coefficient at or beyond ``z^precision``.

        Raises:
            TruncationError: If the series is not known to that precision.
        """
        if precision > self.precision:
            raise TruncationError(
                f"Cannot truncate to O(z^{precision}); series is known to O(z^{self.precision})"
            )
        if precision <= self.valuation:
            return self._make([], precision, self.zero)
        return self._make(self.coeffs[: precision - self.valuation], self.valuation, self.zero)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by ``z^k``."""
        return self._make(self.coeffs, self.valuation + k, self.zero)

    # Arithmetic

    def _lift(self, c: Coefficient) -> "TruncatedSeries":
        zero = self.zero
        if isinstance(c, MarkPoly) and not isinstance(zero, MarkPoly):
            zero = MarkPoly(cap=c.cap)
        if self.precision <= 0:
            return self._make([], self.precision, zero)
        return self.polynomial([c], self.precision, zero=zero)

    def _coerce(self, other) -> Optional["TruncatedSeries"]:
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, (int, Fraction, MarkPoly)):
            return self._lift(other)
        return None

    def _ring_zero(self, other: "TruncatedSeries") -> Coefficient:
        if isinstance(self.zero, MarkPoly) or isinstance(other.zero, MarkPoly):
            caps = [s.zero.cap for s in (self, other) if isinstance(s.zero, MarkPoly)]
            return MarkPoly(cap=min(caps))
        return Fraction(0)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        zero = self._ring_zero(other)
        precision = min(self.precision, other.precision)
        start = min(self.valuation, other.valuation)
        length = precision - start
        if length <= 0:
            return self._make([], precision, zero)
        out = [zero] * length
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.valuation + i - start
                if k >= length:
                    break
                out[k] = out[k] + c
        return self._make(out, start, zero)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return self._make([-c for c in self.coeffs], self.valuation, self.zero)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, MarkPoly)):
            zero = self.zero
            if isinstance(other, MarkPoly) and not isinstance(zero, MarkPoly):
                zero = MarkPoly(cap=other.cap)
            return self._make([c * other for c in self.coeffs], self.valuation, zero)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        zero = self._ring_zero(other)
        valuation = self.valuation + other.valuation
        precision = min(self.valuation + other.precision, other.valuation + self.precision)
        length = precision - valuation
        if length <= 0 or self.is_zero or other.is_zero:
            return self._make([], precision, zero)
        a, b = self.coeffs, other.coeffs
        la, lb = len(a), len(b)
        out = []
        for k in range(length):
            acc = zero
            for i in range(max(0, k - lb + 1), min(k, la - 1) + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return self._make(out, valuation, zero)

    __rmul__ = __mul__

    def invert(self) -> "TruncatedSeries":
        """
        Return ``b`` with ``self * b == 1`` to the available precision.

        Raises:
            SeriesError: If the series is zero to its precision.
        """
        if self.is_zero:
            raise SeriesError("Cannot invert a series that is zero to its precision")
        a = self.coeffs
        inv0 = _inverse(a[0])
        out = [inv0]
        for n in range(1, len(a)):
            acc = self.zero
            for k in range(1, n + 1):
                acc = acc + a[k] * out[n - k]
            out.append(-(inv0 * acc))
        return self._make(out, -self.valuation, self.zero)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, MarkPoly):
            return self * other.inverse()
        if isinstance(other, TruncatedSeries):
            return self * other.invert()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction, MarkPoly)):
            return self.invert() * other
        return NotImplemented

    def __pow__(self, k: int) -> "TruncatedSeries":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        if k == 0:
            length = max(self.precision, len(self.coeffs), 1)
            return self._make([self.zero + 1] + [self.zero] * (length - 1), 0, self.zero)
        result: Optional[TruncatedSeries] = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def sqrt(self) -> "TruncatedSeries":
        """
        Square root of a series with valuation 0 and constant term 1.

        Uses the coefficient recursion ``2 b_n = a_n - sum_{k=1}^{n-1} b_k b_{n-k}``.

        Raises:
            SeriesError: If the constant term is not 1.
        """
        if self.is_zero or self.valuation != 0 or self.coeffs[0] != 1:
            raise SeriesError("Square root is only supported for series with constant term 1")
        a = self.coeffs
        half = Fraction(1, 2)
        out = [a[0]]
        for n in range(1, len(a)):
            acc = a[n]
            for k in range(1, n):
                acc = acc - out[k] * out[n - k]
            out.append(acc * half)
        return self._make(out, 0, self.zero)

    # Comparison and conversion

    def agrees_with(self, other: "TruncatedSeries", precision: Optional[int] = None) -> bool:
        """Compare coefficients below ``precision`` (default: the common precision)."""
        limit = min(self.precision, other.precision) if precision is None else precision
        start = min(self.valuation, other.valuation)
        return all(self.coeff(n) == other.coeff(n) for n in range(start, limit))

    def first_difference(self, other: "TruncatedSeries") -> Optional[int]:
        """Return the first exponent where the series differ, or None."""
        limit = min(self.precision, other.precision)
        for n in range(min(self.valuation, other.valuation), limit):
            if self.coeff(n) != other.coeff(n):
                return n
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.precision == other.precision and self.agrees_with(other)

    __hash__ = None

    def integer_coefficients(self, start: int = 0, stop: Optional[int] = None) -> List[int]:
        """
        Return coefficients as nonnegative Python integers.

        Raises:
            NonIntegerCoefficientError: If a coefficient is fractional or negative.
        """
        out = []
        for n, c in zip(range(start, self.precision), self.coefficients(start, stop)):
            if isinstance(c, MarkPoly) or c.denominator != 1 or c < 0:
                raise NonIntegerCoefficientError(f"Coefficient of z^{n} is {c}, not a count")
            out.append(int(c))
        return out

    def __str__(self) -> str:
        parts = []
        for k, c in self.terms():
            text = f"({c})" if isinstance(c, MarkPoly) else _fraction_text(c)
            parts.append(text if k == 0 else f"{text}*z^{k}")
        parts.append(f"O(z^{self.precision})")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"

    def to_json(self) -> Dict:
        def encode(c: Coefficient):
            if isinstance(c, MarkPoly):
                return [[a, b, str(v.numerator), str(v.denominator)] for (a, b), v in c.items()]
            return [str(c.numerator), str(c.denominator)]

        return {
            "valuation": self.valuation,
            "precision": self.precision,
            "coeffs": [encode(c) for c in self.coeffs],
        }


class MarkedSeries(TruncatedSeries):
    """Truncated series in ``z`` whose coefficients are ``MarkPoly`` values."""

    __slots__ = ()

    @property
    def cap(self) -> int:
        return self.zero.cap

    def substitute(self, t: Rational, w: Rational) -> TruncatedSeries:
        """Evaluate the marks, returning an ordinary rational series."""
        return TruncatedSeries([c.substitute(t, w) for c in self.coeffs], self.valuation)


def mark_poly(terms: Iterable[Tuple[Monomial, Rational]], cap: int = DEFAULT_ORDER) -> MarkPoly:
    return MarkPoly(dict(terms), cap)


def ring_op(a: TruncatedSeries, b: TruncatedSeries, op: str) -> TruncatedSeries:
    """Apply ``add``, ``sub`` or ``mul`` to two series."""
    ops = {
        "add": lambda x, y: x + y,
        "sub": lambda x, y: x - y,
        "mul": lambda x, y: x * y,
    }
    try:
        return ops[op](a, b)
    except KeyError:
        raise SeriesError(f"Unknown ring operation {op!r}") from None
