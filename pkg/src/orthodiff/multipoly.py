"""Sparse multivariate polynomials over exact scalars.

A polynomial in d variables is a dict mapping exponent tuples (length d,
nonnegative ints) to nonzero scalar coefficients.  Zero coefficients are
never stored; the zero polynomial is the empty dict.  Term order, wherever
an order matters (serialization, leading terms), is graded lexicographic:
sort key ``(total degree, exponent tuple)``.

The module also provides the shift/difference calculus on the integer grid
(forward shift E_i, forward difference, backward difference) and the
terminating hypergeometric-sum constructor used by every polynomial family
here.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .rationals import GaussRat, Scalar, demote, fmt_scalar, parse_scalar

Exponent = Tuple[int, ...]
ScalarLike = Union[int, Fraction, Scalar]

NEG_INF = float("-inf")


def _glex_key(e: Exponent):
    return (sum(e), e)


class Poly:
    """Immutable-by-convention sparse polynomial."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Exponent, Scalar] | None = None):
        self.nvars = nvars
        t: Dict[Exponent, Scalar] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong arity for {nvars} vars")
                c = demote(c if not isinstance(c, int) else Fraction(c))
                if c:
                    t[tuple(e)] = c
        self.terms = t

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: ScalarLike) -> "Poly":
        return cls(nvars, {(0,) * nvars: _coerce(c)})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} vars")
        e = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {e: Fraction(1)})

    @classmethod
    def monomial(cls, nvars: int, exps: Sequence[int], c: ScalarLike = 1) -> "Poly":
        return cls(nvars, {tuple(exps): _coerce(c)})

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self):
        """Total degree; the zero polynomial reports -inf."""
        if not self.terms:
            return NEG_INF
        return max(sum(e) for e in self.terms)

    def coeff(self, exps: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exps), Fraction(0))

    def sorted_terms(self) -> List[Tuple[Exponent, Scalar]]:
        return sorted(self.terms.items(), key=lambda kv: _glex_key(kv[0]))

    def leading_term(self) -> Tuple[Exponent, Scalar]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_glex_key)
        return e, self.terms[e]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussRat)):
            return self.terms == Poly.const(self.nvars, other).terms
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.__str__()!r})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.sorted_terms():
            mon = "*".join(
                f"x{i+1}" + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e)
                if k > 0
            )
            cs = fmt_scalar(c)
            if mon:
                bits.append(f"({cs})*{mon}" if ("/" in cs or "+" in cs or "-" in cs[1:]) else f"{cs}*{mon}")
            else:
                bits.append(f"({cs})" if "+" in cs else cs)
        return " + ".join(bits)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomial arity mismatch")

    def __add__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            t = dict(self.terms)
            for e, c in other.terms.items():
                s = t.get(e, Fraction(0)) + c
                if s:
                    t[e] = s
                elif e in t:
                    del t[e]
            out = Poly.__new__(Poly)
            out.nvars = self.nvars
            out.terms = t
            return out
        return self + Poly.const(self.nvars, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        out.nvars = self.nvars
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, Poly):
            return self + (-other)
        return self + Poly.const(self.nvars, -_coerce(other))

    def __rsub__(self, other):
        return (-self) + Poly.const(self.nvars, _coerce(other))

    def __mul__(self, other):
        if isinstance(other, Poly):
            self._check(other)
            t: Dict[Exponent, Scalar] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    s = t.get(e, Fraction(0)) + c1 * c2
                    if s:
                        t[e] = s
                    elif e in t:
                        del t[e]
            out = Poly.__new__(Poly)
            out.nvars = self.nvars
            out.terms = t
            return out
        c = _coerce(other)
        if not c:
            return Poly.zero(self.nvars)
        out = Poly.__new__(Poly)
        out.nvars = self.nvars
        out.terms = {e: demote(c0 * c) for e, c0 in self.terms.items()}
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _coerce(other)
        return self * (Fraction(1) / c)

    def __pow__(self, n: int) -> "Poly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative ints")
        out = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- substitution and evaluation ----------------------------------------

    def shift(self, i: int, h: ScalarLike) -> "Poly":
        """Substitute x_i -> x_i + h."""
        h = _coerce(h)
        if not h:
            return self
        t: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            m = e[i]
            if m == 0:
                s = t.get(e, Fraction(0)) + c
                if s:
                    t[e] = s
                elif e in t:
                    del t[e]
                continue
            hp: Scalar = Fraction(1)
            # k = m down to 0, accumulating h^(m-k) * C(m, k)
            for k in range(m, -1, -1):
                e2 = e[:i] + (k,) + e[i + 1 :]
                add = c * math.comb(m, k) * hp
                s = t.get(e2, Fraction(0)) + add
                if s:
                    t[e2] = s
                elif e2 in t:
                    del t[e2]
                hp = hp * h
        out = Poly.__new__(Poly)
        out.nvars = self.nvars
        out.terms = t
        return out

    def subs_const(self, i: int, val: ScalarLike) -> "Poly":
        """Substitute x_i -> val, keeping the arity (exponent becomes 0)."""
        v = _coerce(val)
        t: Dict[Exponent, Scalar] = {}
        for e, c in self.terms.items():
            c2 = c * (v ** e[i]) if e[i] else c
            if not c2:
                continue
            e2 = e[:i] + (0,) + e[i + 1 :]
            s = t.get(e2, Fraction(0)) + c2
            if s:
                t[e2] = s
            elif e2 in t:
                del t[e2]
        out = Poly.__new__(Poly)
        out.nvars = self.nvars
        out.terms = t
        return out

    def eval(self, point: Sequence[ScalarLike]) -> Scalar:
        if len(point) != self.nvars:
            raise ValueError("point arity mismatch")
        pt = [_coerce(v) for v in point]
        total: Scalar = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    v = v * pt[i] ** k
            total = total + v
        return demote(total)

    def map_coeffs(self, fn) -> "Poly":
        return Poly(self.nvars, {e: fn(c) for e, c in self.terms.items()})

    # -- serialization -------------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [[list(e), fmt_scalar(c)] for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "Poly":
        terms = {tuple(e): parse_scalar(c) for e, c in obj["terms"]}
        return cls(obj["nvars"], terms)


def _coerce(c: ScalarLike) -> Scalar:
    if isinstance(c, int):
        return Fraction(c)
    return demote(c)


# -- difference calculus ------------------------------------------------------


def shift_poly(p: Poly, i: int, h: int = 1) -> Poly:
    """E_i^h p, the substitution x_i -> x_i + h."""
    return p.shift(i, h)


def delta(p: Poly, i: int) -> Poly:
    """Forward difference in variable i: p(x + e_i) - p(x)."""
    return p.shift(i, 1) - p


def nabla(p: Poly, i: int) -> Poly:
    """Backward difference in variable i: p(x) - p(x - e_i)."""
    return p - p.shift(i, -1)


# -- structured builders -------------------------------------------------------


def neg_falling(nvars: int, var: int, k: int) -> Poly:
    """The polynomial (-x_var)_k = prod_{t=0}^{k-1} (t - x_var)."""
    out = Poly.const(nvars, 1)
    x = Poly.variable(nvars, var)
    for t in range(k):
        out = out * (Poly.const(nvars, t) - x)
    return out


def falling_poly(nvars: int, var: int, k: int) -> Poly:
    """The ordinary falling factorial x_var (x_var - 1) ... (x_var - k + 1)."""
    out = Poly.const(nvars, 1)
    x = Poly.variable(nvars, var)
    for t in range(k):
        out = out * (x - Poly.const(nvars, t))
    return out


def hyper_poly(
    nums: Sequence[ScalarLike],
    dens: Sequence[ScalarLike],
    z: ScalarLike,
    n: int,
    var: int = 0,
    nvars: int = 1,
) -> Poly:
    """Terminating hypergeometric sum in one grid variable.

    Returns ``sum_{k=0}^{n} [prod_a (a)_k / prod_c (c)_k] * z^k / k! * (-x)_k``
    as a Poly.  ``nums`` are the scalar numerator parameters (the terminating
    parameter, usually -n, belongs in this list), ``dens`` the denominator
    parameters, ``z`` the argument.

    The sum stops early when a numerator Pochhammer hits zero (all later
    terms vanish).  A zero denominator factor at a live term raises
    ZeroDivisionError, those series are genuinely ill defined.
    """
    nums = [_coerce(a) for a in nums]
    dens = [_coerce(c) for c in dens]
    zz = _coerce(z)
    coef: Scalar = Fraction(1)
    acc = Poly.const(nvars, 1)  # (-x)_k, built incrementally
    x = Poly.variable(nvars, var)
    out = Poly.const(nvars, coef)
    for k in range(1, n + 1):
        numfac: Scalar = Fraction(1)
        for a in nums:
            numfac = numfac * (a + (k - 1))
        if not numfac:
            break
        denfac: Scalar = Fraction(k)
        for c in dens:
            denfac = denfac * (c + (k - 1))
        if not denfac:
            raise ZeroDivisionError(
                f"hypergeometric denominator parameter hits zero at k={k}"
            )
        coef = coef * numfac * zz / denfac
        acc = acc * (Poly.const(nvars, k - 1) - x)
        if coef:
            out = out + coef * acc
    return out


def falling_decomp(p: Poly) -> Dict[Exponent, Scalar]:
    """Expand p in products of ordinary falling factorials.

    Returns c with ``p = sum_k c[k] * prod_i x_i^(k_i)`` where x^(m) denotes
    x (x-1) ... (x-m+1).  Uses x^m = sum_k S(m, k) x^(k) variable by
    variable.
    """
    from .rationals import stirling2

    out: Dict[Exponent, Scalar] = {}
    for e, c in p.terms.items():
        partial: Dict[Exponent, Scalar] = {(): c}
        for m in e:
            nxt: Dict[Exponent, Scalar] = {}
            for pref, pc in partial.items():
                for k in range(0, m + 1):
                    s2 = stirling2(m, k)
                    if not s2:
                        continue
                    key = pref + (k,)
                    v = nxt.get(key, Fraction(0)) + pc * s2
                    if v:
                        nxt[key] = v
                    elif key in nxt:
                        del nxt[key]
            partial = nxt
        for key, v in partial.items():
            s = out.get(key, Fraction(0)) + v
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return out
