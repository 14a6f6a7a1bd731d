"""Exact scalars: :class:`fractions.Fraction` plus a symbolic +infinity.

Costs that may be prohibitive are ``ExtRational`` values, i.e. either a
``Fraction`` or the singleton :data:`INF`.  Nothing in the computation path
ever touches a float.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Union


@total_ordering
class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __hash__(self):
        return hash("stackprice.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or isinstance(other, Rational):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, Rational):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, Rational):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("inf - inf is undefined")
        if isinstance(other, Rational):
            return self
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Rational):
            raise ArithmeticError("finite - inf has no representation")
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Rational):
            if other > 0:
                return self
            raise ArithmeticError("inf may only be scaled by a positive rational")
        return NotImplemented

    __rmul__ = __mul__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

ExtRational = Union[Fraction, _Infinity]


def is_inf(x) -> bool:
    return x is INF


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction.

    Floats are rejected: they would silently introduce rounding.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text.lower() in ("inf", "+inf", "infinity"):
            raise ValueError("infinity is not a finite rational")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def as_ext_rational(value) -> ExtRational:
    if value is INF:
        return INF
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    return as_rational(value)


def format_rational(value: ExtRational) -> str | int:
    """Serialize for JSON: integers stay ints, others become ``"a/b"``."""
    if value is INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def format_str(value: ExtRational) -> str:
    return str(format_rational(value))


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))
