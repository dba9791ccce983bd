"""Exact scalar arithmetic.

Everything downstream computes over Q or over Q(i), so this module pins the
scalar types once:

* plain rationals are ``fractions.Fraction``;
* ``GaussRat`` is a Gaussian rational a + b*i with Fraction parts, used for
  one family whose admissible parameters may come in conjugate complex
  pairs.

``GaussRat`` results with zero imaginary part demote themselves back to
``Fraction``, so code that mixes the two stays on plain Fractions whenever
values are real.  Comparisons like ``GaussRat(2, 0) == Fraction(2)`` hold.

Also provides the small combinatorial helpers (Pochhammer symbols, falling
factorials, Stirling numbers) everything else leans on.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

__all__ = [
    "Fraction",
    "GaussRat",
    "Scalar",
    "as_fraction",
    "demote",
    "falling",
    "fmt_scalar",
    "gbinom",
    "is_real_scalar",
    "parse_scalar",
    "pochhammer",
    "scalar_abs2",
    "stirling2",
]


class GaussRat:
    """Gaussian rational: ``re + im*i`` with exact Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction] = 0, im: Union[int, Fraction] = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    # -- basic protocol ----------------------------------------------------

    def __repr__(self) -> str:
        return f"GaussRat({self.re!r}, {self.im!r})"

    def __str__(self) -> str:
        return fmt_scalar(self)

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return demote(GaussRat(self.re + o.re, self.im + o.im))

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return demote(GaussRat(self.re - o.re, self.im - o.im))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return demote(GaussRat(o.re - self.re, o.im - self.im))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return demote(
            GaussRat(
                self.re * o.re - self.im * o.im,
                self.re * o.im + self.im * o.re,
            )
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n2 = o.re * o.re + o.im * o.im
        if n2 == 0:
            raise ZeroDivisionError("division by zero GaussRat")
        return demote(
            GaussRat(
                (self.re * o.re + self.im * o.im) / n2,
                (self.im * o.re - self.re * o.im) / n2,
            )
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out: Scalar = Fraction(1)
        base: Scalar = demote(self)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


Scalar = Union[Fraction, GaussRat]


def demote(x: Scalar) -> Scalar:
    """Collapse a real-valued GaussRat to a plain Fraction."""
    if isinstance(x, GaussRat) and x.im == 0:
        return x.re
    return x


def is_real_scalar(x: Scalar) -> bool:
    return not isinstance(x, GaussRat) or x.im == 0


def as_fraction(x: Scalar) -> Fraction:
    """Return x as a Fraction, rejecting genuinely complex values."""
    if isinstance(x, GaussRat):
        if x.im != 0:
            raise ValueError(f"scalar has nonzero imaginary part: {x}")
        return x.re
    return Fraction(x)


def scalar_abs2(x: Scalar) -> Fraction:
    """|x|^2 as an exact Fraction."""
    if isinstance(x, GaussRat):
        return x.re * x.re + x.im * x.im
    f = Fraction(x)
    return f * f


_RAT_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_scalar(text: str) -> Scalar:
    """Parse 'p/q', 'p', or 'a+b*i' / 'a-b*i' forms into an exact scalar.

    Decimal literals are rejected on purpose, exactness is the contract.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar literal")
    if _RAT_RE.match(s):
        return Fraction(s)
    # complex form a+b*i or b*i alone
    m = re.match(r"^([+-]?\d+(?:/\d+)?)?([+-]\d+(?:/\d+)?|[+-])?\*?i$", s)
    if m:
        re_part = Fraction(0)
        b = m.group(1), m.group(2)
        if b[1] is not None:
            re_part = Fraction(b[0]) if b[0] else Fraction(0)
            imtxt = b[1]
            im_part = Fraction(imtxt + "1") if imtxt in ("+", "-") else Fraction(imtxt)
        else:
            im_part = Fraction(b[0]) if b[0] else Fraction(1)
        return demote(GaussRat(re_part, im_part))
    raise ValueError(f"cannot parse exact scalar from {text!r}")


def fmt_scalar(x: Scalar) -> str:
    """Canonical string form, inverse of parse_scalar."""
    if isinstance(x, GaussRat):
        if x.im == 0:
            return str(x.re)
        sign = "+" if x.im >= 0 else "-"
        return f"{x.re}{sign}{abs(x.im)}*i"
    return str(Fraction(x))


# -- combinatorial helpers --------------------------------------------------


def pochhammer(a: Scalar, n: int) -> Scalar:
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out: Scalar = Fraction(1)
    for t in range(n):
        out = out * (a + t)
    return out


def falling(a: Scalar, n: int) -> Scalar:
    """Falling factorial a (a-1) ... (a-n+1)."""
    if n < 0:
        raise ValueError("falling needs n >= 0")
    out: Scalar = Fraction(1)
    for t in range(n):
        out = out * (a - t)
    return out


def gbinom(a: Scalar, k: int) -> Scalar:
    """Generalized binomial coefficient C(a, k) for scalar a, integer k >= 0."""
    return falling(a, k) / math.factorial(k)


_STIRLING2 = {(0, 0): 1}


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k) (memoized)."""
    if k < 0 or k > n:
        return 0
    if (n, k) in _STIRLING2:
        return _STIRLING2[(n, k)]
    if n == 0 or k == 0:
        val = 1 if n == k else 0
    else:
        val = k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
    _STIRLING2[(n, k)] = val
    return val


def lg_gamma(x: float) -> float:
    """log |Gamma(x)| for real x that is not a nonpositive integer."""
    if x > 0:
        return math.lgamma(x)
    # reflection: |Gamma(x)| = pi / (|Gamma(1-x)| |sin(pi x)|)
    s = abs(math.sin(math.pi * x))
    if s == 0.0:
        raise ValueError(f"Gamma pole at {x}")
    return math.log(math.pi) - math.lgamma(1.0 - x) - math.log(s)
