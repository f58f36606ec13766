"""
Exact arithmetic on rationals, dense polynomials and truncated power series.

Everything in the package is expressed in the single small variable ``eta``
(the offset from t = 1). Three value types are provided:

* ``Ratio``  -- an alias of :class:`fractions.Fraction`; always canonical.
* :class:`PolyQ` -- a dense polynomial in ``eta`` with Ratio coefficients.
* :class:`JetQ`  -- a power series at ``eta = 0`` truncated after order ``K``.

All values are immutable; every operation returns a new object.

    >>> x = JetQ.variable(3)
    >>> (1 + x).recip().coeffs == (1, -1, 1, -1)
    True
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from .errors import DomainError

Ratio = Fraction

_ZERO = Fraction(0)
_CHUNK = 4000  # stays below CPython's int/str conversion limit


def int_to_str(n: int) -> str:
    """Decimal string of an integer of any size."""
    if n < 0:
        return "-" + int_to_str(-n)
    if n < 10**_CHUNK:
        return str(n)
    # split at a power of ten near the middle
    k = _CHUNK
    while 10 ** (2 * k) <= n:
        k *= 2
    hi, lo = divmod(n, 10**k)
    return int_to_str(hi) + int_to_str(lo).rjust(k, "0")


def str_to_int(text: str) -> int:
    """Inverse of :func:`int_to_str`; accepts a leading sign."""
    text = text.strip()
    if text[:1] in "+-":
        sign, text = (-1 if text[0] == "-" else 1), text[1:]
    else:
        sign = 1
    if not text.isdigit() or not text.isascii():
        raise ValueError(f"not an integer: {text[:20]!r}")
    if len(text) <= _CHUNK:
        return sign * int(text)
    mid = len(text) // 2
    return sign * (str_to_int(text[:mid]) * 10 ** (len(text) - mid) + str_to_int(text[mid:]))


def as_ratio(value: Union[int, Fraction, str]) -> Fraction:
    """Coerce ``value`` to a Ratio without any rounding.

    Strings are parsed as ``"p/q"``, ``"p"`` or an exact decimal such as
    ``"0.001"``. Floats are refused: their binary expansion is rarely what
    the caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if len(text) > _CHUNK and "/" in text:
                p, q = text.split("/")
                return Fraction(str_to_int(p), str_to_int(q))
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value[:40]!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def ratio_str(r: Fraction) -> str:
    """Render ``r`` as ``"p/q"`` (always with an explicit denominator)."""
    return f"{int_to_str(r.numerator)}/{int_to_str(r.denominator)}"


def _coerce_coeffs(coeffs: Iterable) -> tuple:
    return tuple(as_ratio(c) for c in coeffs)


# ----------------------------------------------------------------------------
# Polynomials
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyQ:
    """Dense exact polynomial; ``coeffs[i]`` multiplies ``eta**i``.

    The stored tuple never ends in a zero, so the zero polynomial is the
    empty tuple and equality is structural.
    """

    coeffs: tuple = ()

    def __post_init__(self):
        c = list(_coerce_coeffs(self.coeffs))
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def const(cls, value) -> "PolyQ":
        return cls((value,))

    @classmethod
    def variable(cls) -> "PolyQ":
        return cls((0, 1))

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "PolyQ":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return _ZERO

    def __add__(self, other) -> "PolyQ":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return PolyQ(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "PolyQ":
        return PolyQ(-c for c in self.coeffs)

    def __sub__(self, other) -> "PolyQ":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "PolyQ":
        return (-self) + other

    def __mul__(self, other) -> "PolyQ":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PolyQ":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = PolyQ.const(1), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __call__(self, x):
        return poly_eval(self, x)

    def derive(self) -> "PolyQ":
        return PolyQ(i * c for i, c in enumerate(self.coeffs) if i)

    def reflect(self) -> "PolyQ":
        """Substitute ``eta -> -eta``."""
        return PolyQ(-c if i & 1 else c for i, c in enumerate(self.coeffs))

    def scale(self, factor) -> "PolyQ":
        factor = as_ratio(factor)
        return PolyQ(factor * c for c in self.coeffs)

    def to_jet(self, order: int) -> "JetQ":
        """Embed into the truncated series ring of the given order."""
        return JetQ(order, self.coeffs[: order + 1])

    def __repr__(self) -> str:
        return f"PolyQ({[ratio_str(c) for c in self.coeffs]})"


def _as_poly(value):
    if isinstance(value, PolyQ):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return PolyQ.const(value)
    return NotImplemented


def poly_mul(a: PolyQ, b: PolyQ) -> PolyQ:
    """Exact schoolbook product."""
    if a.is_zero() or b.is_zero():
        return PolyQ()
    ac, bc = a.coeffs, b.coeffs
    out = [_ZERO] * (len(ac) + len(bc) - 1)
    for i, x in enumerate(ac):
        if x == 0:
            continue
        for j, y in enumerate(bc):
            out[i + j] += x * y
    return PolyQ(out)


def poly_eval(p: PolyQ, x) -> Fraction:
    """Exact Horner evaluation at a rational point."""
    x = as_ratio(x)
    acc = _ZERO
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


# ----------------------------------------------------------------------------
# Truncated power series
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class JetQ:
    """Taylor coefficients ``c_0 .. c_K`` of a function at ``eta = 0``.

    Coefficients beyond ``order`` are unknown, not zero. Binary operations
    between jets of different orders truncate to the smaller order.
    """

    order: int
    coeffs: tuple = ()

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"jet order must be >= 0, got {self.order}")
        c = _coerce_coeffs(self.coeffs[: self.order + 1])
        c = c + (_ZERO,) * (self.order + 1 - len(c))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def const(cls, value, order: int) -> "JetQ":
        return cls(order, (value,))

    @classmethod
    def variable(cls, order: int) -> "JetQ":
        return cls(order, (0, 1))

    def __getitem__(self, i: int) -> Fraction:
        if i > self.order:
            raise IndexError(f"coefficient {i} lies beyond jet order {self.order}")
        return self.coeffs[i]

    def truncate(self, order: int) -> "JetQ":
        if order > self.order:
            raise ValueError("cannot extend a jet beyond its known order")
        return JetQ(order, self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def leading_term(self):
        """First ``(index, coefficient)`` with a nonzero coefficient, or None."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i, c
        return None

    def _pair(self, other):
        if isinstance(other, JetQ):
            k = min(self.order, other.order)
            return k, self.coeffs[: k + 1], other.coeffs[: k + 1]
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.order, self.coeffs, (as_ratio(other),) + (_ZERO,) * self.order
        return None

    def __add__(self, other) -> "JetQ":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        k, a, b = p
        return JetQ(k, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "JetQ":
        return JetQ(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "JetQ":
        p = self._pair(other)
        if p is None:
            return NotImplemented
        k, a, b = p
        return JetQ(k, tuple(x - y for x, y in zip(a, b)))

    def __rsub__(self, other) -> "JetQ":
        return (-self) + other

    def __mul__(self, other) -> "JetQ":
        if isinstance(other, JetQ):
            return jet_mul(self, other)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            f = as_ratio(other)
            return JetQ(self.order, tuple(f * c for c in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> "JetQ":
        if isinstance(other, JetQ):
            return jet_mul(self, jet_recip(other))
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self * (1 / as_ratio(other))
        return NotImplemented

    def recip(self) -> "JetQ":
        return jet_recip(self)

    def derive(self) -> "JetQ":
        return jet_derive(self)

    def log(self) -> "JetQ":
        return jet_log(self)

    def reflect(self) -> "JetQ":
        """Substitute ``eta -> -eta``."""
        return JetQ(self.order, tuple(-c if i & 1 else c for i, c in enumerate(self.coeffs)))

    def to_poly(self) -> PolyQ:
        return PolyQ(self.coeffs)

    def __repr__(self) -> str:
        return f"JetQ({self.order}, {[ratio_str(c) for c in self.coeffs]})"


def jet_mul(a: JetQ, b: JetQ) -> JetQ:
    """Truncated Cauchy product, O(K^2)."""
    k = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    out = [_ZERO] * (k + 1)
    for i in range(k + 1):
        x = ac[i]
        if x == 0:
            continue
        for j in range(k + 1 - i):
            out[i + j] += x * bc[j]
    return JetQ(k, out)


def jet_recip(a: JetQ) -> JetQ:
    """Series reciprocal; raises DomainError when ``a(0) == 0``."""
    c = a.coeffs
    if c[0] == 0:
        raise DomainError("reciprocal of a series vanishing at eta = 0")
    inv0 = 1 / c[0]
    out = [inv0]
    for n in range(1, a.order + 1):
        s = sum((c[i] * out[n - i] for i in range(1, n + 1) if c[i]), _ZERO)
        out.append(-s * inv0)
    return JetQ(a.order, out)


def jet_derive(a: JetQ) -> JetQ:
    """d/d(eta); the result is known to one order less."""
    if a.order == 0:
        raise ValueError("derivative of an order-0 jet carries no information")
    return JetQ(a.order - 1, tuple(i * a.coeffs[i] for i in range(1, a.order + 1)))


def jet_log(a: JetQ) -> JetQ:
    """Natural logarithm of a series with constant term exactly 1.

    Uses the recurrence n*L_n = n*a_n - sum_{k<n} k*L_k*a_{n-k}, obtained
    from ``a * L' = a'``.
    """
    c = a.coeffs
    if c[0] != 1:
        raise DomainError(f"log needs constant term 1, got {ratio_str(c[0])}")
    out = [_ZERO]
    for n in range(1, a.order + 1):
        s = sum((k * out[k] * c[n - k] for k in range(1, n) if out[k]), _ZERO)
        out.append((n * c[n] - s) / n)
    return JetQ(a.order, out)


def jet_product(factors: Sequence[JetQ]) -> JetQ:
    it = iter(factors)
    acc = next(it)
    for f in it:
        acc = jet_mul(acc, f)
    return acc


def abs_sum(jet: JetQ) -> Fraction:
    """Sum of absolute coefficient values (an exact l1 norm)."""
    return sum((abs(c) for c in jet.coeffs), _ZERO)
