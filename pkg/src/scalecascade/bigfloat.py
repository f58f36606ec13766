"""Binary floating point with an explicit precision on every value.

Backed by mpmath's correctly rounded kernels. Mixed-precision operations
round to the coarser operand precision (round-to-nearest).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath.libmp import from_rational, round_nearest

from .arith import JetQ, PolyQ, as_ratio


@dataclass(frozen=True)
class BigFloat:
    value: mpmath.mpf
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be a positive number of bits")

    @classmethod
    def from_ratio(cls, r, precision: int) -> "BigFloat":
        r = as_ratio(r)
        raw = from_rational(r.numerator, r.denominator, precision, round_nearest)
        # mpf() normalizes to the ambient precision, so set it explicitly
        with mpmath.workprec(precision):
            return cls(mpmath.mpf(raw), precision)

    def _binary(self, other, op):
        if not isinstance(other, BigFloat):
            if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
                other = BigFloat.from_ratio(other, self.precision)
            else:
                return NotImplemented
        prec = min(self.precision, other.precision)
        with mpmath.workprec(prec):
            return BigFloat(op(self.value, other.value), prec)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __neg__(self):
        with mpmath.workprec(self.precision):
            return BigFloat(-self.value, self.precision)

    def __abs__(self):
        with mpmath.workprec(self.precision):
            return BigFloat(abs(self.value), self.precision)

    def __float__(self) -> float:
        return float(self.value)

    def to_fraction(self) -> Fraction:
        """The exact binary value held (no rounding)."""
        sign, man, exp, _ = self.value._mpf_
        if not man:
            return Fraction(0)  # special values are never produced here
        if sign:
            man = -man
        if exp >= 0:
            return Fraction(man * 2**exp)
        return Fraction(man, 2**-exp)

    def decimal(self, digits: int = None) -> str:
        """Decimal string carrying enough digits to represent the precision."""
        if digits is None:
            digits = int(self.precision * 0.30103) + 1
        with mpmath.workprec(self.precision):
            return mpmath.nstr(self.value, digits, strip_zeros=False,
                               min_fixed=-mpmath.inf, max_fixed=mpmath.inf)

    def __repr__(self) -> str:
        return f"BigFloat({self.decimal(20)}, precision={self.precision})"


def float_eval(p: Union[PolyQ, JetQ], x: BigFloat) -> BigFloat:
    """Horner evaluation with each coefficient rounded to ``x.precision``."""
    prec = x.precision
    acc = BigFloat.from_ratio(0, prec)
    for c in reversed(p.coeffs):
        acc = acc * x + BigFloat.from_ratio(c, prec)
    return acc
