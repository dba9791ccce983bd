"""Supported point sets on the nonnegative integer grid.

Four shapes cover every family in this package:

* ``FullGrid(d)``: all of N_0^d.
* ``Box(l)``: 0 <= x_i <= l_i (a parallelepiped).
* ``Simplex(d, N)``: x_i >= 0, x_1 + ... + x_d <= N.
* ``TruncatedSimplex(d, N, caps)``: the simplex with extra caps x_i <= l_i
  imposed on a nonempty subset of coordinates.

Each shape knows its boundary slices (the point sets where a backward,
forward, or mixed shift leaves the set), the monomial index set of its
polynomial space (which for all four shapes equals the point set itself),
the generators of the ideal of polynomials vanishing on the set, and its
rank profile (number of degree-k monomial indices).

Coordinates are 0-based internally.  Serialized forms label coordinates
1-based, matching the usual mathematical indexing.
"""

from __future__ import annotations

import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .multipoly import Poly, neg_falling

Point = Tuple[int, ...]


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of `parts` nonnegative ints summing to exactly `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class LatticeBase:
    d: int
    is_finite: bool

    # -- membership ------------------------------------------------------

    def contains(self, x: Sequence[int]) -> bool:
        raise NotImplementedError

    def on_boundary_lower(self, x: Sequence[int], j: int) -> bool:
        """x in V but x - e_j not in V."""
        x = tuple(x)
        return self.contains(x) and not self.contains(_step(x, j, -1))

    def on_boundary_upper(self, x: Sequence[int], j: int) -> bool:
        """x in V but x + e_j not in V."""
        x = tuple(x)
        return self.contains(x) and not self.contains(_step(x, j, +1))

    def on_boundary_mixed(self, x: Sequence[int], i: int, j: int) -> bool:
        """x in V but x + e_i - e_j not in V."""
        x = tuple(x)
        return self.contains(x) and not self.contains(_step(_step(x, i, +1), j, -1))

    # -- enumeration (finite shapes) ----------------------------------------

    def points(self) -> Iterator[Point]:
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError

    def max_total_degree(self) -> Optional[int]:
        """Largest |x| over the set, None when unbounded."""
        raise NotImplementedError

    def boundary_lower(self, j: int) -> List[Point]:
        return [x for x in self.points() if self.on_boundary_lower(x, j)]

    def boundary_upper(self, j: int) -> List[Point]:
        return [x for x in self.points() if self.on_boundary_upper(x, j)]

    def boundary_mixed(self, i: int, j: int) -> List[Point]:
        return [x for x in self.points() if self.on_boundary_mixed(x, i, j)]

    # -- polynomial structure ---------------------------------------------

    def index_set_upto(self, k: int) -> List[Point]:
        """Monomial multi-indices of the degree-<=k polynomial space on V.

        For these shapes that index set coincides with the point set itself,
        restricted to total degree <= k.
        """
        return [mu for t in range(k + 1) for mu in self.degree_indices(t)]

    def degree_indices(self, k: int) -> List[Point]:
        """Multi-indices of total degree exactly k belonging to the set."""
        return [mu for mu in _compositions(k, self.d) if self.contains(mu)]

    def rank_profile(self, kmax: Optional[int] = None) -> List[int]:
        """r_k = number of degree-k indices, k = 0..kmax.

        Finite shapes default kmax to their degree bound; FullGrid requires
        an explicit kmax.
        """
        if kmax is None:
            m = self.max_total_degree()
            if m is None:
                raise ValueError("rank_profile needs kmax on an infinite lattice")
            kmax = m
        return [len(self.degree_indices(k)) for k in range(kmax + 1)]

    def ideal_generators(self) -> List[Poly]:
        raise NotImplementedError

    # -- serialization -----------------------------------------------------

    def to_obj(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_obj()})"


def _step(x: Point, j: int, h: int) -> Point:
    return x[:j] + (x[j] + h,) + x[j + 1 :]


class FullGrid(LatticeBase):
    is_finite = False

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = d

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.d and all(v >= 0 for v in x)

    def points(self) -> Iterator[Point]:
        raise ValueError("FullGrid is infinite; enumerate a window instead")

    def size(self) -> int:
        raise ValueError("FullGrid is infinite")

    def max_total_degree(self) -> Optional[int]:
        return None

    def degree_indices(self, k: int) -> List[Point]:
        return list(_compositions(k, self.d))

    def rank_count(self, k: int) -> int:
        return math.comb(k + self.d - 1, self.d - 1)

    def ideal_generators(self) -> List[Poly]:
        return []

    def window_points(self, caps: Sequence[int]) -> Iterator[Point]:
        """All grid points with x_i <= caps_i."""
        if len(caps) != self.d:
            raise ValueError("window caps arity mismatch")
        return Box(tuple(caps)).points() if min(caps) >= 0 else iter(())

    def to_obj(self) -> dict:
        return {"shape": "full_grid", "d": self.d}

    def __eq__(self, other):
        return isinstance(other, FullGrid) and other.d == self.d


class Box(LatticeBase):
    is_finite = True

    def __init__(self, caps: Sequence[int]):
        caps = tuple(int(v) for v in caps)
        if not caps or any(v < 0 for v in caps):
            raise ValueError("box caps must be nonnegative ints")
        self.caps = caps
        self.d = len(caps)

    def contains(self, x: Sequence[int]) -> bool:
        return len(x) == self.d and all(0 <= v <= c for v, c in zip(x, self.caps))

    def points(self) -> Iterator[Point]:
        def rec(i: int, pref: Point) -> Iterator[Point]:
            if i == self.d:
                yield pref
                return
            for v in range(self.caps[i] + 1):
                yield from rec(i + 1, pref + (v,))

        return rec(0, ())

    def size(self) -> int:
        n = 1
        for c in self.caps:
            n *= c + 1
        return n

    def max_total_degree(self) -> Optional[int]:
        return sum(self.caps)

    def ideal_generators(self) -> List[Poly]:
        return [neg_falling(self.d, i, c + 1) for i, c in enumerate(self.caps)]

    def to_obj(self) -> dict:
        return {"shape": "box", "caps": list(self.caps)}

    def __eq__(self, other):
        return isinstance(other, Box) and other.caps == self.caps


class Simplex(LatticeBase):
    is_finite = True

    def __init__(self, d: int, N: int):
        if d < 1 or N < 1:
            raise ValueError("need d >= 1 and N >= 1")
        self.d = d
        self.N = N

    def contains(self, x: Sequence[int]) -> bool:
        return (
            len(x) == self.d
            and all(v >= 0 for v in x)
            and sum(x) <= self.N
        )

    def points(self) -> Iterator[Point]:
        for t in range(self.N + 1):
            yield from _compositions(t, self.d)

    def size(self) -> int:
        return math.comb(self.N + self.d, self.d)

    def max_total_degree(self) -> Optional[int]:
        return self.N

    def ideal_generators(self) -> List[Poly]:
        gens = []
        for mu in _compositions(self.N + 1, self.d):
            g = Poly.const(self.d, 1)
            for i, m in enumerate(mu):
                if m:
                    g = g * neg_falling(self.d, i, m)
            gens.append(g)
        return gens

    def to_obj(self) -> dict:
        return {"shape": "simplex", "d": self.d, "N": self.N}

    def __eq__(self, other):
        return isinstance(other, Simplex) and (other.d, other.N) == (self.d, self.N)


class TruncatedSimplex(LatticeBase):
    """Simplex points with caps x_i <= l_i for i in a nonempty subset S.

    ``caps`` maps 0-based coordinate -> cap.  Caps must satisfy
    1 <= l_i <= N.  When every coordinate is capped the caps must overflow
    the simplex bound (sum l_i > N); otherwise the set is just a box and
    must be constructed as one.
    """

    is_finite = True

    def __init__(self, d: int, N: int, caps: Dict[int, int]):
        if d < 1 or N < 1:
            raise ValueError("need d >= 1 and N >= 1")
        if not caps:
            raise ValueError("truncation set must be nonempty; use Simplex instead")
        caps = {int(i): int(v) for i, v in caps.items()}
        for i, v in caps.items():
            if not 0 <= i < d:
                raise ValueError(f"capped coordinate {i} out of range")
            if not 1 <= v <= N:
                raise ValueError(f"cap for coordinate {i} must lie in [1, {N}]")
        if len(caps) == d and sum(caps.values()) <= N:
            raise ValueError(
                "all coordinates capped with cap sum <= N: the set is a "
                "parallelepiped, construct a Box instead"
            )
        self.d = d
        self.N = N
        self.caps = dict(sorted(caps.items()))

    def contains(self, x: Sequence[int]) -> bool:
        if len(x) != self.d or any(v < 0 for v in x) or sum(x) > self.N:
            return False
        return all(x[i] <= v for i, v in self.caps.items())

    def points(self) -> Iterator[Point]:
        for t in range(self.N + 1):
            for mu in _compositions(t, self.d):
                if all(mu[i] <= v for i, v in self.caps.items()):
                    yield mu

    def size(self) -> int:
        return sum(1 for _ in self.points())

    def max_total_degree(self) -> Optional[int]:
        free = [i for i in range(self.d) if i not in self.caps]
        if free:
            return self.N
        return min(self.N, sum(self.caps.values()))

    def ideal_generators(self) -> List[Poly]:
        gens = Simplex(self.d, self.N).ideal_generators()
        # re-anchor to this arity (same d, so reuse directly)
        for i, v in self.caps.items():
            gens.append(neg_falling(self.d, i, v + 1))
        return gens

    def to_obj(self) -> dict:
        return {
            "shape": "truncated_simplex",
            "d": self.d,
            "N": self.N,
            "caps": {str(i + 1): v for i, v in self.caps.items()},
        }

    def __eq__(self, other):
        return isinstance(other, TruncatedSimplex) and (
            other.d,
            other.N,
            other.caps,
        ) == (self.d, self.N, self.caps)


def lattice_from_obj(obj: dict) -> LatticeBase:
    shape = obj["shape"]
    if shape == "full_grid":
        return FullGrid(obj["d"])
    if shape == "box":
        return Box(obj["caps"])
    if shape == "simplex":
        return Simplex(obj["d"], obj["N"])
    if shape == "truncated_simplex":
        caps = {int(k) - 1: v for k, v in obj["caps"].items()}
        return TruncatedSimplex(obj["d"], obj["N"], caps)
    raise ValueError(f"unknown lattice shape {shape!r}")
