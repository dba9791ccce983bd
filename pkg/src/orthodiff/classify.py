"""Admissible self-adjoint operators and what they classify into.

A second-order difference operator that is symmetric for some weight and
acts triangularly on polynomial degrees is, up to affine changes of
variable, pinned down by a small set of rational parameters.  Two regimes
occur:

* quadratic leading part (two parametrized coefficient solutions, only the
  first of which admits an orthogonality weight), and
* linear leading part, which factors into independent blocks, each block a
  product of one of five building families.

This module constructs the parametrized operators exactly, decides which
family a given parameter choice lands in, splits linear operators into
blocks, and reconstructs the weight from the operator by telescoping the
defining ratio identities (verifying path independence along the way).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .lattice import Box, FullGrid, LatticeBase, Simplex, TruncatedSimplex
from .multipoly import Poly
from .operators import ShiftForm
from .rationals import Scalar, as_fraction

Point = Tuple[int, ...]


class ClassifyError(ValueError):
    """Parameter choice does not land in any classified family."""


class WeightlessOperatorError(ValueError):
    """Operator satisfies the structural identities but has no weight."""


def _is_nonneg_int(q: Fraction) -> bool:
    return q.denominator == 1 and q >= 0


def _is_pos_int(q: Fraction) -> bool:
    return q.denominator == 1 and q >= 1


# -- parametrized coefficient solutions ----------------------------------------


def quadratic_operator(
    b: Fraction,
    r: Fraction | Sequence[Fraction],
    caps: Sequence[Fraction],
    variant: int = 1,
) -> ShiftForm:
    """The two quadratic-leading-part coefficient solutions, in shift form.

    Variant 1 (scalar r):
        alpha_{i,j} = x_j (x_i - l_i)
        beta_i  = -(x_i - l_i) (|x| - b - r)
        gamma_i = -x_i (|x| - |l| - r)

    Variant 2 (vector r, b forced to |l| - 1):
        alpha as above
        beta_i  = -(x_i - l_i) (|x| - |l| + 1 - r_i)
        gamma_i = -x_i (|x| - |l| - r_i)

    Variant 2 is tagged "no_weight": it passes the compatibility identities
    but the telescoped weight has no finite mass on any of the supported
    lattices.
    """
    caps = [Fraction(v) for v in caps]
    d = len(caps)
    if d < 1:
        raise ValueError("need at least one variable")
    x = [Poly.variable(d, i) for i in range(d)]
    tot = Poly.zero(d)
    for xi in x:
        tot = tot + xi
    lsum = sum(caps, Fraction(0))

    zero = Poly.zero(d)
    alpha = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            if i != j:
                alpha[i][j] = x[j] * (x[i] - caps[i])

    beta: List[Poly] = []
    gamma: List[Poly] = []
    if variant == 1:
        rr = Fraction(r)  # type: ignore[arg-type]
        for i in range(d):
            beta.append(-(x[i] - caps[i]) * (tot - (b + rr)))
            gamma.append(-x[i] * (tot - (lsum + rr)))
        tag = None
    elif variant == 2:
        rvec = [Fraction(v) for v in r]  # type: ignore[union-attr]
        if len(rvec) != d:
            raise ValueError("variant 2 needs one r per variable")
        if b != lsum - 1:
            raise ValueError("variant 2 requires b = |l| - 1")
        for i in range(d):
            beta.append(-(x[i] - caps[i]) * (tot - (lsum - 1 + rvec[i])))
            gamma.append(-x[i] * (tot - (lsum + rvec[i])))
        tag = "no_weight"
    else:
        raise ValueError("variant must be 1 or 2")

    delta0 = Poly.zero(d)
    # delta0 chosen so that D annihilates constants: sum of all coefficient
    # rows must vanish (the operator has eigenvalue 0 on constants).
    for i in range(d):
        delta0 = delta0 - beta[i] - gamma[i]
        for j in range(d):
            if i != j:
                delta0 = delta0 - alpha[i][j]
    return ShiftForm(d, tuple(tuple(row) for row in alpha), tuple(beta), tuple(gamma), delta0, tag)


def linear_operator(lmat: Sequence[Sequence[Fraction]], s: Sequence[Fraction]) -> ShiftForm:
    """The linear-leading-part coefficient solution, in shift form.

        alpha_{i,j} = -l_{i,j} x_j
        beta_i  = sum_{k != i} l_{i,k} x_k + (l_{i,i} - 1) x_i + s_i
        gamma_i = x_i sum_k l_{k,i}

    delta0 is chosen so constants are annihilated.
    """
    d = len(s)
    lm = [[Fraction(v) for v in row] for row in lmat]
    if len(lm) != d or any(len(row) != d for row in lm):
        raise ValueError("l matrix shape mismatch")
    sv = [Fraction(v) for v in s]
    x = [Poly.variable(d, i) for i in range(d)]
    zero = Poly.zero(d)
    alpha = [[zero] * d for _ in range(d)]
    beta: List[Poly] = []
    gamma: List[Poly] = []
    for i in range(d):
        for j in range(d):
            if i != j:
                alpha[i][j] = -lm[i][j] * x[j]
        bi = (lm[i][i] - 1) * x[i] + Poly.const(d, sv[i])
        for k in range(d):
            if k != i:
                bi = bi + lm[i][k] * x[k]
        beta.append(bi)
        col = sum((lm[k][i] for k in range(d)), Fraction(0))
        gamma.append(col * x[i])
    delta0 = Poly.zero(d)
    for i in range(d):
        delta0 = delta0 - beta[i] - gamma[i]
        for j in range(d):
            if i != j:
                delta0 = delta0 - alpha[i][j]
    return ShiftForm(d, tuple(tuple(row) for row in alpha), tuple(beta), tuple(gamma), delta0)


# -- case resolution -------------------------------------------------------------


@dataclass
class CaseResolution:
    kind: str
    lattice: LatticeBase
    params: dict
    notes: List[str]


def resolve_quadratic_case(
    b: Fraction, r: Fraction, caps: Sequence[Fraction]
) -> CaseResolution:
    """Decide which family the variant-1 quadratic parameters produce.

    The support is decided by exact integrality tests:

    * b + r a nonnegative integer N cuts the support to |x| <= N
      (simplex, possibly truncated by integer caps),
    * positive integer caps l_i cut coordinate i to x_i <= l_i,
    * otherwise the support is the full grid.
    """
    b = Fraction(b)
    r = Fraction(r)
    caps = [Fraction(v) for v in caps]
    d = len(caps)
    notes: List[str] = []
    n_total = b + r
    int_caps = {i: v for i, v in enumerate(caps) if _is_pos_int(v)}

    if _is_nonneg_int(n_total):
        N = int(n_total)
        if N < 1:
            raise ClassifyError("degenerate support: b + r = 0 leaves a single point")
        sigma = [-(v) - 1 for v in caps]
        sigma_last = r - N - sum(sigma) - d - 1
        eff = {i: int(v) for i, v in int_caps.items() if v <= N - 1}
        vacuous = [i for i, v in int_caps.items() if v >= N]
        if vacuous:
            notes.append(
                "integer caps at or above the simplex bound are vacuous: "
                f"coordinates {[i + 1 for i in vacuous]}"
            )
        if not eff:
            lat: LatticeBase = Simplex(d, N)
            return CaseResolution(
                "simplex_hahn",
                lat,
                {"sigma": sigma + [sigma_last], "N": N},
                notes,
            )
        if len(eff) == d and sum(eff.values()) <= N:
            notes.append(
                "all coordinates capped inside the simplex bound; support is a box"
            )
            beta = -b - r - 1
            return CaseResolution(
                "box_hahn",
                Box([int(v) for v in caps]),
                {"beta": beta, "r": r, "caps": [int(v) for v in caps]},
                notes,
            )
        return CaseResolution(
            "truncated_simplex_hahn",
            TruncatedSimplex(d, N, eff),
            {"sigma": sigma + [sigma_last], "N": N, "trunc": dict(eff)},
            notes,
        )

    if len(int_caps) == d:
        beta = -b - r - 1
        return CaseResolution(
            "box_hahn",
            Box([int(v) for v in caps]),
            {"beta": beta, "r": r, "caps": [int(v) for v in caps]},
            notes,
        )
    if int_caps:
        raise ClassifyError(
            "mixed support (some coordinates capped by integer parameters, "
            "others not) does not belong to any classified family; offending "
            f"coordinates: {sorted(i + 1 for i in int_caps)}"
        )
    sigma = [-(v) - 1 for v in caps]
    beta = -n_total - 1
    gamma = sum(sigma, Fraction(0)) + d - r
    return CaseResolution(
        "grid_hahn",
        FullGrid(d),
        {"sigma": sigma, "beta": beta, "gamma": gamma},
        notes,
    )


@dataclass
class LinearBlock:
    coords: Tuple[int, ...]
    kind: str
    params: dict


def split_linear_blocks(
    lmat: Sequence[Sequence[Fraction]], s: Sequence[Fraction]
) -> List[LinearBlock]:
    """Split a linear-case operator into independent product blocks.

    Coordinates interact when an off-diagonal l entry between them is
    nonzero.  Interacting groups must be complete (every pair inside a group
    nonzero) with row-constant structure l_{i,j} = l_{i,i} - 1 for j != i
    and s_i proportional to that row constant; the group is then one
    multivariate building family.  Singleton groups are one-variable
    families picked by the sign of l_{i,i} - 1.
    """
    d = len(s)
    lm = [[Fraction(v) for v in row] for row in lmat]
    sv = [Fraction(v) for v in s]

    # connected components of the interaction graph
    seen = [False] * d
    groups: List[List[int]] = []
    for i in range(d):
        if seen[i]:
            continue
        comp = [i]
        seen[i] = True
        stack = [i]
        while stack:
            u = stack.pop()
            for v in range(d):
                if v != u and not seen[v] and (lm[u][v] or lm[v][u]):
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        groups.append(sorted(comp))

    blocks: List[LinearBlock] = []
    for g in groups:
        if len(g) == 1:
            i = g[0]
            blocks.append(_resolve_linear_1d(lm[i][i], sv[i], i))
            continue
        for u in g:
            for v in g:
                if u != v and not lm[u][v]:
                    raise ClassifyError(
                        f"coordinates {u + 1} and {v + 1} interact only "
                        "indirectly; interacting groups must be complete"
                    )
        lvec = []
        for u in g:
            row = {lm[u][v] for v in g if v != u}
            if len(row) != 1:
                raise ClassifyError(f"row {u + 1} has non-constant interaction entries")
            lu = row.pop()
            if lm[u][u] - 1 != lu:
                raise ClassifyError(
                    f"diagonal entry in row {u + 1} must exceed the row constant by 1"
                )
            lvec.append(lu)
        svals = set()
        for t, u in enumerate(g):
            if not lvec[t]:
                raise ClassifyError(f"zero row constant in interacting row {u + 1}")
            svals.add(sv[u] / lvec[t])
        if len(svals) != 1:
            raise ClassifyError("shift terms are not proportional to the row constants")
        s_common = svals.pop()
        if all(v < 0 for v in lvec):
            N = -s_common
            if not _is_pos_int(N):
                raise ClassifyError(
                    "negative row constants need a positive integer size "
                    f"parameter, got {-s_common}"
                )
            p = [-v for v in lvec]
            if sum(p) >= 1:
                raise ClassifyError("success probabilities must sum below 1")
            blocks.append(
                LinearBlock(tuple(g), "krawtchouk_multi", {"p": p, "N": int(N)})
            )
        elif all(v > 0 for v in lvec):
            if s_common <= 0:
                raise ClassifyError("positive row constants need a positive shift scale")
            tot = sum(lvec, Fraction(0))
            c = [v / (1 + tot) for v in lvec]
            blocks.append(
                LinearBlock(tuple(g), "meixner_multi", {"s": s_common, "c": c})
            )
        else:
            raise ClassifyError(
                "interacting row constants must all share one sign; "
                f"group {[u + 1 for u in g]} mixes signs"
            )
    blocks.sort(key=lambda blk: blk.coords[0])
    return blocks


def _resolve_linear_1d(lii: Fraction, si: Fraction, coord: int) -> LinearBlock:
    l = lii - 1
    if l == 0:
        if si <= 0:
            raise ClassifyError(f"coordinate {coord + 1}: rate parameter must be positive")
        return LinearBlock((coord,), "charlier", {"s": si})
    if l < 0:
        p = -l
        if p >= 1:
            raise ClassifyError(
                f"coordinate {coord + 1}: success probability {p} not below 1"
            )
        N = si / p
        if not _is_pos_int(N):
            raise ClassifyError(
                f"coordinate {coord + 1}: trial count {N} is not a positive integer"
            )
        return LinearBlock((coord,), "krawtchouk", {"p": p, "N": int(N)})
    c = l / (1 + l)
    beta = si / l
    if beta <= 0:
        raise ClassifyError(f"coordinate {coord + 1}: shape parameter must be positive")
    return LinearBlock((coord,), "meixner", {"beta": beta, "c": c})


# -- weight recovery ----------------------------------------------------------------


@dataclass
class WeightTable:
    values: Dict[Point, Scalar]
    sign: str  # "positive", "nonnegative", "mixed"
    unreachable: List[Point]

    def to_obj(self) -> dict:
        from .rationals import fmt_scalar

        return {
            "sign": self.sign,
            "values": {",".join(map(str, k)): fmt_scalar(v) for k, v in sorted(self.values.items())},
            "unreachable": [list(p) for p in self.unreachable],
        }


def weight_from_operator(
    op: ShiftForm,
    lat: LatticeBase,
    window: Optional[Sequence[int]] = None,
    allow_formal: bool = False,
) -> WeightTable:
    """Telescope the weight from the pairing identities, origin-normalized.

    W(0) = 1 and W(x) = W(x - e_i) beta_i(x - e_i) / gamma_i(x) along any
    coordinate direction with gamma_i(x) != 0; every applicable direction is
    cross-checked, so path dependence raises immediately.

    Operators tagged "no_weight" raise WeightlessOperatorError unless
    allow_formal is set, in which case the formal (sign-alternating,
    non-summable) table is returned for inspection.
    """
    if op.tag == "no_weight" and not allow_formal:
        raise WeightlessOperatorError(
            "this operator is symmetrizable only formally: the telescoped "
            "ratios define no finite-mass weight on the lattice "
            "(pass allow_formal=True to inspect the formal table)"
        )
    if lat.is_finite:
        pts = list(lat.points())
    else:
        if window is None:
            raise ValueError("infinite lattice: a window is required")
        pts = [x for x in Box(tuple(window)).points() if lat.contains(x)]
    pts.sort(key=lambda x: (sum(x), x))
    origin = (0,) * op.nvars
    if pts[0] != origin:
        raise ValueError("weight recovery assumes the origin belongs to the lattice")
    values: Dict[Point, Scalar] = {origin: Fraction(1)}
    unreachable: List[Point] = []
    for x in pts[1:]:
        cands: List[Scalar] = []
        for i in range(op.nvars):
            if x[i] == 0:
                continue
            xm = x[:i] + (x[i] - 1,) + x[i + 1 :]
            if xm not in values:
                continue
            g = op.gamma[i].eval(x)
            if not g:
                continue
            cands.append(values[xm] * op.beta[i].eval(xm) / g)
        if not cands:
            unreachable.append(x)
            continue
        first = cands[0]
        for other in cands[1:]:
            if other != first:
                raise ValueError(
                    f"weight recovery is path dependent at {x}: {first} vs {other}"
                )
        values[x] = first
    signs = {(_sign(v)) for v in values.values()}
    if signs <= {1}:
        sign = "positive"
    elif signs <= {0, 1}:
        sign = "nonnegative"
    else:
        sign = "mixed"
    return WeightTable(values, sign, unreachable)


def _sign(v: Scalar) -> int:
    f = as_fraction(v)
    if f > 0:
        return 1
    if f < 0:
        return -1
    return 0
