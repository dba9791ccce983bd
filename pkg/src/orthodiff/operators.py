"""Second-order difference operators on the integer grid, in two forms.

The *difference form* writes an operator as

    D = sum_{i,j} A_{i,j} Delta_i Nabla_j + sum_i B_i Delta_i + C

with polynomial coefficients, where Delta/Nabla are forward/backward
differences.  The *shift form* writes the same operator as

    D = sum_{i != j} alpha_{i,j} E_i E_j^{-1} + sum_i beta_i E_i
        + sum_i gamma_i E_i^{-1} + delta0

in terms of the unit shifts E_i.  The two are interconvertible and both are
kept because each makes a different set of checks natural: eigenvalue
structure lives in the difference form, while symmetry with respect to a
weight (and the boundary and compatibility conditions) lives in the shift
form.

All checks here are exact, no floating point is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .lattice import LatticeBase, Box, FullGrid
from .multipoly import Poly, delta, nabla
from .rationals import Scalar

PolyMat = Tuple[Tuple[Poly, ...], ...]
PolyVec = Tuple[Poly, ...]


def _as_mat(nvars: int, rows) -> PolyMat:
    m = tuple(tuple(rows[i][j] for j in range(nvars)) for i in range(nvars))
    for row in m:
        for p in row:
            if p.nvars != nvars:
                raise ValueError("coefficient arity mismatch")
    return m


def _as_vec(nvars: int, v) -> PolyVec:
    out = tuple(v)
    if len(out) != nvars:
        raise ValueError("coefficient vector has wrong length")
    for p in out:
        if p.nvars != nvars:
            raise ValueError("coefficient arity mismatch")
    return out


@dataclass(frozen=True)
class DiffForm:
    """Operator as sum A_{i,j} Delta_i Nabla_j + sum B_i Delta_i + C."""

    nvars: int
    a: PolyMat
    b: PolyVec
    c: Poly

    def __post_init__(self):
        object.__setattr__(self, "a", _as_mat(self.nvars, self.a))
        object.__setattr__(self, "b", _as_vec(self.nvars, self.b))

    def apply(self, p: Poly) -> Poly:
        out = self.c * p
        for i in range(self.nvars):
            out = out + self.b[i] * delta(p, i)
            for j in range(self.nvars):
                if self.a[i][j]:
                    out = out + self.a[i][j] * delta(nabla(p, j), i)
        return out

    def to_obj(self) -> dict:
        return {
            "form": "difference",
            "nvars": self.nvars,
            "a": [[p.to_obj() for p in row] for row in self.a],
            "b": [p.to_obj() for p in self.b],
            "c": self.c.to_obj(),
        }


@dataclass(frozen=True)
class ShiftForm:
    """Operator as sum alpha_{i,j} E_i E_j^{-1} + beta_i E_i + gamma_i E_i^{-1} + delta0.

    ``tag`` carries provenance notes that downstream consumers must respect
    (currently only "no_weight", marking operators that satisfy all the
    structural identities but admit no orthogonality weight).
    """

    nvars: int
    alpha: PolyMat
    beta: PolyVec
    gamma: PolyVec
    delta0: Poly
    tag: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_mat(self.nvars, self.alpha))
        object.__setattr__(self, "beta", _as_vec(self.nvars, self.beta))
        object.__setattr__(self, "gamma", _as_vec(self.nvars, self.gamma))
        for i in range(self.nvars):
            if self.alpha[i][i]:
                raise ValueError("diagonal alpha entries must be zero")

    def apply(self, p: Poly) -> Poly:
        out = self.delta0 * p
        for i in range(self.nvars):
            out = out + self.beta[i] * p.shift(i, 1)
            out = out + self.gamma[i] * p.shift(i, -1)
            for j in range(self.nvars):
                if i != j and self.alpha[i][j]:
                    out = out + self.alpha[i][j] * p.shift(i, 1).shift(j, -1)
        return out

    def apply_at(self, f: Callable[[Tuple[int, ...]], Scalar], x: Sequence[int]) -> Scalar:
        """Apply to a function given pointwise (stencil evaluation at x)."""
        x = tuple(x)
        val = self.delta0.eval(x) * f(x)
        for i in range(self.nvars):
            xi = x[:i] + (x[i] + 1,) + x[i + 1 :]
            val = val + self.beta[i].eval(x) * f(xi)
            xm = x[:i] + (x[i] - 1,) + x[i + 1 :]
            val = val + self.gamma[i].eval(x) * f(xm)
            for j in range(self.nvars):
                if i == j or not self.alpha[i][j]:
                    continue
                xij = list(x)
                xij[i] += 1
                xij[j] -= 1
                val = val + self.alpha[i][j].eval(x) * f(tuple(xij))
        return val

    def to_obj(self) -> dict:
        return {
            "form": "shift",
            "nvars": self.nvars,
            "alpha": [[p.to_obj() for p in row] for row in self.alpha],
            "beta": [p.to_obj() for p in self.beta],
            "gamma": [p.to_obj() for p in self.gamma],
            "delta0": self.delta0.to_obj(),
            "tag": self.tag,
        }


def operator_from_obj(obj: dict):
    nv = obj["nvars"]
    if obj["form"] == "difference":
        return DiffForm(
            nv,
            tuple(tuple(Poly.from_obj(p) for p in row) for row in obj["a"]),
            tuple(Poly.from_obj(p) for p in obj["b"]),
            Poly.from_obj(obj["c"]),
        )
    if obj["form"] == "shift":
        return ShiftForm(
            nv,
            tuple(tuple(Poly.from_obj(p) for p in row) for row in obj["alpha"]),
            tuple(Poly.from_obj(p) for p in obj["beta"]),
            tuple(Poly.from_obj(p) for p in obj["gamma"]),
            Poly.from_obj(obj["delta0"]),
            obj.get("tag"),
        )
    raise ValueError(f"unknown operator form {obj['form']!r}")


# -- conversions ---------------------------------------------------------------


def to_shift_form(op: DiffForm, tag: Optional[str] = None) -> ShiftForm:
    d = op.nvars
    zero = Poly.zero(d)
    alpha = [[zero] * d for _ in range(d)]
    beta = []
    gamma = []
    delta0 = op.c
    for i in range(d):
        for j in range(d):
            if i != j:
                alpha[i][j] = -op.a[i][j]
                delta0 = delta0 - op.a[i][j]
    for i in range(d):
        bi = op.b[i]
        for k in range(d):
            bi = bi + op.a[i][k]
        beta.append(bi)
        gi = Poly.zero(d)
        for k in range(d):
            gi = gi + op.a[k][i]
        gamma.append(gi)
        delta0 = delta0 - 2 * op.a[i][i] - op.b[i]
    return ShiftForm(d, tuple(tuple(r) for r in alpha), tuple(beta), tuple(gamma), delta0, tag)


def to_diff_form(op: ShiftForm) -> DiffForm:
    d = op.nvars
    a = [[Poly.zero(d)] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            if i != j:
                a[i][j] = -op.alpha[i][j]
    for i in range(d):
        aii = op.gamma[i]
        for k in range(d):
            if k != i:
                aii = aii - a[k][i]
        a[i][i] = aii
    b = []
    for i in range(d):
        bi = op.beta[i]
        for k in range(d):
            bi = bi - a[i][k]
        b.append(bi)
    c = op.delta0
    for i in range(d):
        for j in range(d):
            if i != j:
                c = c + a[i][j]
    for i in range(d):
        c = c + 2 * a[i][i] + b[i]
    return DiffForm(d, tuple(tuple(r) for r in a), tuple(b), c)


# -- structural checks ---------------------------------------------------------


@dataclass
class Violation:
    rule: str
    location: object
    residual: object

    def to_obj(self) -> dict:
        return {
            "rule": self.rule,
            "location": repr(self.location),
            "residual": str(self.residual),
        }


@dataclass
class CheckReport:
    ok: bool
    checked: int
    violations: List[Violation] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "status": "pass" if self.ok else "fail",
            "checked": self.checked,
            "violations": [v.to_obj() for v in self.violations],
        }


def _enum_points(lat: LatticeBase, window: Optional[Sequence[int]]):
    if lat.is_finite:
        return list(lat.points())
    if window is None:
        raise ValueError("infinite lattice: a window is required")
    return [x for x in Box(tuple(window)).points() if lat.contains(x)]


def check_self_adjoint(
    op: ShiftForm,
    lat: LatticeBase,
    weight: Callable[[Tuple[int, ...]], Scalar],
    window: Optional[Sequence[int]] = None,
    max_violations: int = 25,
) -> CheckReport:
    """Verify symmetry of D with respect to a weight on the lattice.

    Checks the pairing identities W(x) gamma_i(x) = W(x - e_i) beta_i(x - e_i)
    and W(x - e_i) alpha_{i,j}(x - e_i) = W(x - e_j) alpha_{j,i}(x - e_j),
    plus the boundary vanishing of gamma, beta and alpha on the lower, upper
    and mixed boundary slices.  On an infinite lattice the check runs over a
    finite window (boundary conditions there are still exact because upper
    slices are empty and lower/mixed slices are hyperplane pieces that the
    window meets).
    """
    d = op.nvars
    pts = _enum_points(lat, window)
    rep = CheckReport(ok=True, checked=0)

    def bad(rule, loc, res):
        rep.ok = False
        if len(rep.violations) < max_violations:
            rep.violations.append(Violation(rule, loc, res))

    wcache = {}

    def w(x):
        if x not in wcache:
            wcache[x] = weight(x)
        return wcache[x]

    for x in pts:
        for i in range(d):
            xm = x[:i] + (x[i] - 1,) + x[i + 1 :]
            if lat.contains(xm):
                lhs = w(x) * op.gamma[i].eval(x)
                rhs = w(xm) * op.beta[i].eval(xm)
                rep.checked += 1
                if lhs != rhs:
                    bad("weight-pairing", (x, i), lhs - rhs)
            if lat.on_boundary_lower(x, i):
                rep.checked += 1
                v = op.gamma[i].eval(x)
                if v:
                    bad("lower-boundary-gamma", (x, i), v)
            if lat.on_boundary_upper(x, i):
                rep.checked += 1
                v = op.beta[i].eval(x)
                if v:
                    bad("upper-boundary-beta", (x, i), v)
            for j in range(d):
                if i == j:
                    continue
                if lat.on_boundary_mixed(x, i, j):
                    rep.checked += 1
                    v = op.alpha[i][j].eval(x)
                    if v:
                        bad("mixed-boundary-alpha", (x, i, j), v)
        # cross pairing: y = x + e_i must satisfy y - e_j in V
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                y = x[:i] + (x[i] + 1,) + x[i + 1 :]
                ymj = y[:j] + (y[j] - 1,) + y[j + 1 :]
                if not lat.contains(ymj):
                    continue
                lhs = w(x) * op.alpha[i][j].eval(x)
                rhs = w(ymj) * op.alpha[j][i].eval(ymj)
                rep.checked += 1
                if lhs != rhs:
                    bad("cross-pairing", (x, i, j), lhs - rhs)
    return rep


def check_compatibility(op: ShiftForm) -> CheckReport:
    """Exact polynomial identities required for a symmetrizing weight to exist.

    For every pair i != j:

      alpha_{i,j}(x-e_i) beta_j(x-e_j) gamma_i(x)
        = alpha_{j,i}(x-e_j) beta_i(x-e_i) gamma_j(x)

      beta_i(x-e_i) beta_j(x-e_i-e_j) gamma_j(x) gamma_i(x-e_j)
        = beta_j(x-e_j) beta_i(x-e_i-e_j) gamma_i(x) gamma_j(x-e_i)
    """
    d = op.nvars
    rep = CheckReport(ok=True, checked=0)
    for i in range(d):
        for j in range(i + 1, d):
            lhs = op.alpha[i][j].shift(i, -1) * op.beta[j].shift(j, -1) * op.gamma[i]
            rhs = op.alpha[j][i].shift(j, -1) * op.beta[i].shift(i, -1) * op.gamma[j]
            rep.checked += 1
            if lhs != rhs:
                rep.ok = False
                rep.violations.append(Violation("mixed-cycle", (i, j), lhs - rhs))
            lhs2 = (
                op.beta[i].shift(i, -1)
                * op.beta[j].shift(i, -1).shift(j, -1)
                * op.gamma[j]
                * op.gamma[i].shift(j, -1)
            )
            rhs2 = (
                op.beta[j].shift(j, -1)
                * op.beta[i].shift(i, -1).shift(j, -1)
                * op.gamma[i]
                * op.gamma[j].shift(i, -1)
            )
            rep.checked += 1
            if lhs2 != rhs2:
                rep.ok = False
                rep.violations.append(Violation("plane-cycle", (i, j), lhs2 - rhs2))
    return rep


# -- admissible normal form -----------------------------------------------------


@dataclass
class AdmissibleFit:
    """Leading structure of an operator that acts triangularly on degrees.

    ``a`` and ``b`` are the two scalars with A_{i,i} = a x_i^2 + lower,
    A_{i,j} = a x_i x_j + lower, B_i = b x_i + constant.  The eigenvalue on
    the degree-k slice is k ((k-1) a + b).
    """

    ok: bool
    a: Optional[Fraction]
    b: Optional[Fraction]
    problems: List[str]
    collisions: List[Tuple[int, int]]

    def eigenvalue(self, k: int) -> Fraction:
        if self.a is None or self.b is None:
            raise ValueError("operator is not in admissible form")
        return Fraction(k) * ((k - 1) * self.a + self.b)


def fit_admissible_form(op: DiffForm, kmax: int = 50) -> AdmissibleFit:
    d = op.nvars
    problems: List[str] = []

    def deg2_part(p: Poly):
        return {e: c for e, c in p.terms.items() if sum(e) == 2}

    a_vals = []
    for i in range(d):
        for j in range(d):
            p = op.a[i][j]
            if p.degree() > 2:
                problems.append(f"A[{i}][{j}] has degree {p.degree()} > 2")
                continue
            top = deg2_part(p)
            want = tuple(
                (2 if k == i else 0) if i == j else (1 if k in (i, j) else 0)
                for k in range(d)
            )
            extra = {e for e in top if e != want}
            if extra:
                problems.append(f"A[{i}][{j}] has off-pattern quadratic terms {sorted(extra)}")
            a_vals.append(("aa" if i == j else "ab", i, j, top.get(want, Fraction(0))))
    a_set = {v for _, _, _, v in a_vals}
    a: Optional[Fraction] = None
    if not a_vals:
        problems.append("operator has no second-order part")
    elif len(a_set) == 1:
        a = a_vals[0][3]
    else:
        problems.append(f"quadratic leading coefficients disagree: {sorted(map(str, a_set))}")

    b_vals = []
    for i in range(d):
        p = op.b[i]
        if p.degree() > 1:
            problems.append(f"B[{i}] has degree {p.degree()} > 1")
            continue
        for e, cval in p.terms.items():
            if sum(e) == 1 and e[i] != 1 and cval:
                problems.append(f"B[{i}] depends on a foreign variable: {e}")
        ei = tuple(1 if k == i else 0 for k in range(d))
        b_vals.append(p.coeff(ei))
    b: Optional[Fraction] = None
    bset = set(b_vals)
    if len(bset) == 1 and b_vals:
        b = b_vals[0]
    elif b_vals:
        problems.append(f"linear leading coefficients disagree: {sorted(map(str, bset))}")

    if op.c.degree() > 0:
        problems.append("zeroth-order term is not constant")

    collisions: List[Tuple[int, int]] = []
    if a is not None and b is not None:
        lam = [Fraction(k) * ((k - 1) * a + b) for k in range(kmax + 1)]
        seen = {}
        for k, v in enumerate(lam):
            if v in seen:
                collisions.append((seen[v], k))
            else:
                seen[v] = k
    ok = not problems and not collisions and a is not None and b is not None
    return AdmissibleFit(ok, a, b, problems, collisions)
