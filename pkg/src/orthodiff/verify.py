"""Verification engine: Gram matrices, eigen identities, norms, ranks, limits.

Everything on a finite support is checked in exact rational arithmetic; a
report only passes when the identity holds on the nose.  Infinite supports
are summed over a truncation window in exact rationals as well, and every
truncated entry carries a rigorous tail bound: the mass outside the window
is dominated, through the family's exact moment functional, by moments of
even powers of the coordinate sum (a Chebyshev-style argument), so a reader
can tell a certified zero from a small number.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .families import (
    FamilyError,
    OrthoSystem,
    limit_relation,
    limit_target,
    r_recurrence_coeffs,
    poly_1d,
)
from .lattice import FullGrid, LatticeBase
from .multipoly import Poly
from .operators import ShiftForm, fit_admissible_form, to_diff_form
from .rationals import Scalar, as_fraction, fmt_scalar, is_real_scalar

DEFAULT_WINDOW_CAP = 40
Index = Tuple[int, ...]


class VerifyError(ValueError):
    """Invalid verification request (not a failed check)."""


@dataclass
class VerifyReport:
    """Outcome of one verification run.

    ``failures`` holds one dict per violated instance, with a location and
    the exact or numeric residual; a passing report has none.  ``meta``
    records whatever the check needs to be reproducible (windows, schedules,
    skipped indices, runtimes).
    """

    name: str
    ok: bool
    failures: List[dict] = field(default_factory=list)
    meta: Dict[str, object] = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "check": self.name,
            "status": "pass" if self.ok else "fail",
            "failures": self.failures,
            "meta": self.meta,
        }


def _fail(report: VerifyReport, location: object, residual: object) -> None:
    report.ok = False
    report.failures.append({"location": location, "residual": residual})


# -- Gram matrices -----------------------------------------------------------


class GramReport:
    """Pairwise inner products of a family, exact or truncated.

    For a finite support ``entries[i][j]`` is an exact Scalar.  For an
    infinite support it is a (partial sum, tail bound) pair of floats, or
    None when the entry's defining series is outside the family's
    convergence range and was not computed.  A tail bound of ``inf`` means
    the series converges and the partial sum was computed, but no moment of
    high enough order converges to certify a bound.  ``verdicts`` carries
    one label per entry: "diagonal", "zero"/"nonzero" (exact case),
    "below tail", "above tail", "unbounded", or "not convergent".
    """

    def __init__(
        self,
        indices: List[Index],
        finite: bool,
        entries: List[List[object]],
        verdicts: List[List[str]],
        window: Optional[Tuple[int, ...]],
    ):
        self.indices = indices
        self.finite = finite
        self.entries = entries
        self.verdicts = verdicts
        self.window = window

    def entry(self, i: int, j: int):
        return self.entries[i][j]

    def diagonal(self) -> List[object]:
        return [self.entries[i][i] for i in range(len(self.indices))]

    def is_orthogonal(self) -> bool:
        """Off-diagonal entries all certified zero (exactly, or below tail)."""
        for i in range(len(self.indices)):
            for j in range(len(self.indices)):
                if i != j and self.verdicts[i][j] not in ("zero", "below tail"):
                    return False
        return True

    def to_obj(self) -> dict:
        def cell(i, j):
            e = self.entries[i][j]
            out: Dict[str, object] = {"verdict": self.verdicts[i][j]}
            if e is None:
                return out
            if self.finite:
                out["value"] = fmt_scalar(e)
            else:
                out["partial"] = e[0]
                out["tail_bound"] = e[1]
            return out

        n = len(self.indices)
        return {
            "indices": [list(v) for v in self.indices],
            "finite": self.finite,
            "window": list(self.window) if self.window else None,
            "orthogonal": self.is_orthogonal(),
            "matrix": [[cell(i, j) for j in range(n)] for i in range(n)],
        }

    def to_csv(self) -> str:
        head = ["nu"] + ["|".join(map(str, v)) for v in self.indices]
        rows = [",".join(head)]
        for i, v in enumerate(self.indices):
            cells = ["|".join(map(str, v))]
            for j in range(len(self.indices)):
                e = self.entries[i][j]
                if e is None:
                    cells.append("not-convergent")
                elif self.finite:
                    cells.append(fmt_scalar(e))
                else:
                    cells.append(f"{e[0]!r}(tail<={e[1]!r})")
            rows.append(",".join(cells))
        return "\n".join(rows) + "\n"


def _window_caps(
    system: OrthoSystem, window: Optional[Sequence[int]]
) -> Tuple[int, ...]:
    if window is None:
        return tuple([DEFAULT_WINDOW_CAP] * system.nvars)
    caps = tuple(int(v) for v in window)
    if len(caps) == 1 and system.nvars > 1:
        caps = caps * system.nvars
    if len(caps) != system.nvars:
        raise VerifyError(
            f"window has {len(caps)} bounds for {system.nvars} variables"
        )
    return caps


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _TailBounder:
    """Rigorous truncation-tail bounds from exact moments.

    Every point outside a window with per-coordinate caps >= m has
    coordinate sum |x| >= m + 1, so for any K >= 1 whose moments converge,

        sum_outside W(x) (1 + |x|^B)
            <= sum_all W(x) (1 + |x|^B) (|x| / (m+1))^(2K)
            =  <1, 1> (P(2K) + P(B + 2K)) / (m+1)^(2K),

    where P(n) is the mass-normalized power moment E[|x|^n], computed
    exactly from the falling-factorial moment functional.  Since any
    polynomial of degree B with absolute coefficient sum A satisfies
    |p(x)| <= A (1 + |x|^B) on the nonnegative orthant, and the total mass
    is at most window_mass / (1 - tau(0)) whenever the normalized tail-mass
    bound tau(0) is below 1, the truncation error of sum_window W p is
    certified to be at most A * mass_upper * tau(B).  Everything is an
    exact rational; bounds are None when no convergent moment order can
    certify one.
    """

    K_MAX = 40

    def __init__(self, moments, nvars: int, limit: Optional[Fraction], m: int,
                 window_mass: Fraction):
        self.moments = moments
        self.nvars = nvars
        self.limit = limit
        self.m = m
        self.window_mass = window_mass
        self._radial: Dict[int, Fraction] = {}
        self._power: Dict[int, Fraction] = {}
        self._tau: Dict[int, Optional[Fraction]] = {}

    def _radial_falling(self, j: int) -> Fraction:
        """E[(|x|)_(j)] via the multinomial expansion of falling powers."""
        if j not in self._radial:
            total = Fraction(0)
            fj = math.factorial(j)
            for k in _compositions(j, self.nvars):
                weight = fj
                for part in k:
                    weight //= math.factorial(part)
                total += weight * as_fraction(self.moments(k))
            self._radial[j] = total
        return self._radial[j]

    def _power_moment(self, n: int) -> Optional[Fraction]:
        """E[|x|^n] exactly, or None when the series does not converge."""
        if self.limit is not None and n >= self.limit:
            return None
        if n not in self._power:
            from .rationals import stirling2

            total = Fraction(0)
            for j in range(n + 1):
                s2 = stirling2(n, j)
                if s2:
                    total += s2 * self._radial_falling(j)
            self._power[n] = total
        return self._power[n]

    def tau(self, b: int) -> Optional[Fraction]:
        """Least certified bound on the normalized tail sum of (1 + |x|^b).

        For b = 0 the integrand is 1 rather than 2, matching the pointwise
        bound |constant| <= A.
        """
        if b in self._tau:
            return self._tau[b]
        best: Optional[Fraction] = None
        worse = 0
        for k in range(1, self.K_MAX + 1):
            base = self._power_moment(2 * k)
            if base is None:
                break
            if b == 0:
                top = base
            else:
                extra = self._power_moment(b + 2 * k)
                if extra is None:
                    break
                top = base + extra
            val = top / Fraction(self.m + 1) ** (2 * k)
            if best is None or val < best:
                best = val
                worse = 0
            else:
                worse += 1
                if worse >= 2:
                    break
        self._tau[b] = best
        return best

    def bound(self, b: int, coeff_abs_sum: Fraction) -> Optional[Fraction]:
        """Certified truncation-error bound for a degree-b pairing."""
        tau0 = self.tau(0)
        if tau0 is None or tau0 >= 1:
            return None
        mass_upper = self.window_mass / (1 - tau0)
        tau_b = self.tau(b)
        if tau_b is None:
            return None
        return coeff_abs_sum * mass_upper * tau_b


def gram(
    system: OrthoSystem,
    deg_max: int,
    window: Optional[Sequence[int]] = None,
) -> GramReport:
    """Gram matrix of all admissible indices with |nu| <= deg_max.

    Finite supports get exact entries; infinite supports get truncated
    sums over the window (default cap 40 per coordinate) with tail bounds,
    except that entries outside the family's convergence range are marked
    "not convergent" and never computed.
    """
    indices = system.indices(deg_max)
    n = len(indices)
    if system.is_finite:
        pts = list(system.lattice.points())
        wv = [system.weight(x) for x in pts]
        values = [[system.poly(v).eval(x) for x in pts] for v in indices]
        entries: List[List[object]] = [[None] * n for _ in range(n)]
        verdicts = [["" for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc: Scalar = Fraction(0)
                for t in range(len(pts)):
                    acc = acc + wv[t] * values[i][t] * values[j][t]
                entries[i][j] = entries[j][i] = acc
                if i == j:
                    verdicts[i][j] = "diagonal"
                else:
                    verdicts[i][j] = verdicts[j][i] = (
                        "zero" if acc == 0 else "nonzero"
                    )
        return GramReport(indices, True, entries, verdicts, None)

    caps = _window_caps(system, window)
    grid = FullGrid(system.nvars)
    pts = list(grid.window_points(caps))
    wv = [as_fraction(system.weight(x)) for x in pts]
    window_mass = sum(wv, Fraction(0))
    polys = [system.poly(v) for v in indices]
    values = [[as_fraction(p.eval(x)) for x in pts] for p in polys]
    weighted = [[wv[t] * col[t] for t in range(len(pts))] for col in values]
    limit = system.conv_limit()
    degs = [polys[i].degree() for i in range(n)]
    bounder = None
    if system.moments is not None:
        bounder = _TailBounder(
            system.moments, system.nvars, limit, min(caps), window_mass
        )
    entries = [[None] * n for _ in range(n)]
    verdicts = [["" for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if limit is not None and degs[i] + degs[j] >= limit:
                entries[i][j] = entries[j][i] = None
                verdicts[i][j] = verdicts[j][i] = "not convergent"
                continue
            partial = Fraction(0)
            wi, vj = weighted[i], values[j]
            for t in range(len(pts)):
                partial += wi[t] * vj[t]
            bound = None
            if bounder is not None:
                coeff_abs = Fraction(0)
                for c in (polys[i] * polys[j]).terms.values():
                    coeff_abs += abs(as_fraction(c))
                bound = bounder.bound(degs[i] + degs[j], coeff_abs)
            if bound is None:
                entries[i][j] = entries[j][i] = (float(partial), math.inf)
                if i == j:
                    verdicts[i][j] = "diagonal"
                else:
                    verdicts[i][j] = verdicts[j][i] = "unbounded"
                continue
            entries[i][j] = entries[j][i] = (float(partial), float(bound))
            if i == j:
                verdicts[i][j] = "diagonal"
            else:
                verdicts[i][j] = verdicts[j][i] = (
                    "below tail" if abs(partial) <= bound else "above tail"
                )
    return GramReport(indices, False, entries, verdicts, caps)


# -- eigen identities -----------------------------------------------------------


def eigencheck(
    system: OrthoSystem,
    deg_max: int,
    mode: str = "symbolic",
    window: Optional[Sequence[int]] = None,
) -> VerifyReport:
    """Verify D P_nu = lambda_{|nu|} P_nu for all admissible |nu| <= deg_max.

    Symbolic mode expands the identity as an exact polynomial equation.
    Pointwise mode applies the shift-form operator at every support point
    (or at every window point on an infinite support) and compares values
    exactly.
    """
    if mode not in ("symbolic", "pointwise"):
        raise VerifyError(f"unknown eigencheck mode {mode!r}")
    t0 = time.monotonic()
    report = VerifyReport("eigencheck", True)
    indices = system.indices(deg_max)
    if mode == "pointwise":
        if system.is_finite:
            pts = list(system.lattice.points())
        else:
            pts = list(
                FullGrid(system.nvars).window_points(_window_caps(system, window))
            )
    for nu in indices:
        p = system.poly(nu)
        lam = system.eigenvalue(sum(nu))
        if mode == "symbolic":
            residual = system.diff.apply(p) - lam * p
            if not residual.is_zero():
                _fail(report, {"nu": list(nu)}, str(residual))
            continue
        fn = p.eval
        for x in pts:
            got = system.shift.apply_at(fn, x)
            want = lam * p.eval(x)
            if got != want:
                _fail(
                    report,
                    {"nu": list(nu), "x": list(x)},
                    fmt_scalar(got - want),
                )
                break
    report.meta = {
        "mode": mode,
        "deg_max": deg_max,
        "indices": len(indices),
        "seconds": round(time.monotonic() - t0, 6),
    }
    return report


# -- norm checks ------------------------------------------------------------------


def normcheck(
    system: OrthoSystem,
    deg_max: int,
    window: Optional[Sequence[int]] = None,
    tol: float = 1e-8,
) -> VerifyReport:
    """Compare the Gram diagonal against the closed-form norm ratios.

    On a finite support the comparison is exact: each diagonal entry must
    equal norm_ratio(nu) times the exact mass.  On an infinite support the
    truncated diagonal, normalized by the truncated mass, must match the
    rational ratio within tol.  A mismatch only counts as a failure when
    the certified truncation uncertainty is too small to explain it; an
    entry whose uncertainty swamps the tolerance is reported as skipped
    (inconclusive at this window), never silently passed.
    """
    t0 = time.monotonic()
    report = VerifyReport("normcheck", True)
    g = gram(system, deg_max, window)
    checked = 0
    skipped = []
    for i, nu in enumerate(g.indices):
        try:
            ratio = system.norm_ratio(nu)
        except FamilyError as exc:
            skipped.append({"nu": list(nu), "reason": str(exc)})
            continue
        entry = g.entries[i][i]
        if entry is None:
            skipped.append({"nu": list(nu), "reason": "gram entry not convergent"})
            continue
        checked += 1
        if g.finite:
            want = ratio * system.mass_exact
            if entry != want:
                _fail(
                    report,
                    {"nu": list(nu)},
                    f"gram {fmt_scalar(entry)} != {fmt_scalar(want)}",
                )
        else:
            mass_partial, mass_tail = g.entries[0][0]
            got = entry[0] / mass_partial
            want_f = float(as_fraction(ratio)) if is_real_scalar(ratio) else None
            if want_f is None:
                skipped.append({"nu": list(nu), "reason": "ratio is not real"})
                continue
            if math.isinf(mass_tail) or mass_tail >= mass_partial:
                certified = math.inf
            else:
                certified = (entry[1] + abs(got) * mass_tail) / (
                    mass_partial - mass_tail
                )
            gap = abs(got - want_f)
            allowance = tol * max(1.0, abs(want_f))
            if gap <= allowance:
                continue
            if gap <= allowance + certified:
                skipped.append(
                    {
                        "nu": list(nu),
                        "reason": "inconclusive at this window: certified "
                        f"uncertainty {certified!r} covers the gap {gap!r}",
                    }
                )
                checked -= 1
                continue
            _fail(
                report,
                {"nu": list(nu)},
                f"truncated ratio {got!r} vs exact {want_f!r} "
                f"(certified uncertainty {certified!r})",
            )
    report.meta = {
        "deg_max": deg_max,
        "tol": tol,
        "window": list(g.window) if g.window else None,
        "checked": checked,
        "skipped": skipped,
        "seconds": round(time.monotonic() - t0, 6),
    }
    return report


# -- rank / admissibility checks -----------------------------------------------------


def _bit_size(q: Fraction) -> int:
    return abs(q.numerator).bit_length() + q.denominator.bit_length()


def _rank_exact(rows: List[List[Fraction]]) -> int:
    """Rank by fraction-preserving elimination.

    Pivots are chosen among the nonzero candidates of each column by the
    smallest combined bit length of numerator and denominator, which keeps
    intermediate fractions from blowing up while staying exact.
    """
    if not rows:
        return 0
    m = [row[:] for row in rows]
    nrows, ncols = len(m), len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        best = None
        for r in range(row, nrows):
            if m[r][col] != 0:
                size = _bit_size(m[r][col])
                if best is None or size < best[0]:
                    best = (size, r)
        if best is None:
            continue
        _, piv = best
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for r in range(nrows):
            if r != row and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == nrows:
            break
    return rank


def rankcheck(op: ShiftForm, lat: LatticeBase, k_max: int) -> VerifyReport:
    """Check the operator has full polynomial eigenspaces on a finite set.

    For each k <= k_max the span of monomials x^mu, mu in the index set of
    the lattice with |mu| <= k, must meet the lambda_k eigenspace of D (as
    a map on functions over the set) in dimension exactly r_k, the number
    of degree-k indices.  Eigenvalue collisions among k <= k_max are
    reported as failures since they preclude this count.
    """
    t0 = time.monotonic()
    if lat.max_total_degree() is None:
        raise VerifyError("rankcheck needs a finite lattice set")
    report = VerifyReport("rankcheck", True)
    dop = to_diff_form(op)
    fit = fit_admissible_form(dop)
    if fit.a is None or fit.b is None:
        report.ok = False
        for problem in fit.problems:
            report.failures.append({"location": "leading form", "residual": problem})
        report.meta = {"k_max": k_max}
        return report
    lam = [fit.eigenvalue(k) for k in range(k_max + 1)]
    for j, k in fit.collisions:
        if k <= k_max:
            _fail(
                report,
                {"k": k},
                f"eigenvalue collision lambda_{j} = lambda_{k} = {lam[j]}",
            )
    kcap = min(k_max, lat.max_total_degree())
    pts = list(lat.points())
    mus = lat.index_set_upto(kcap)
    dvecs: Dict[Index, List[Fraction]] = {}
    svecs: Dict[Index, List[Fraction]] = {}
    for mu in mus:
        mono = Poly.monomial(lat.d, mu, Fraction(1))
        dvecs[mu] = [as_fraction(dop.apply(mono).eval(x)) for x in pts]
        svecs[mu] = [as_fraction(mono.eval(x)) for x in pts]
    dims = []
    expected = lat.rank_profile(kcap)
    for k in range(kcap + 1):
        cols = [mu for mu in mus if sum(mu) <= k]
        # columns of (D - lambda_k) x^mu as value vectors over the set
        matrix_cols = []
        for mu in cols:
            matrix_cols.append(
                [dv - lam[k] * sv for dv, sv in zip(dvecs[mu], svecs[mu])]
            )
        rows = [
            [matrix_cols[c][r] for c in range(len(cols))] for r in range(len(pts))
        ]
        dim = len(cols) - _rank_exact(rows)
        dims.append(dim)
        if dim != expected[k]:
            _fail(
                report,
                {"k": k},
                f"eigenspace dimension {dim} != expected {expected[k]}",
            )
    report.meta = {
        "k_max": k_max,
        "dims": dims,
        "expected": expected,
        "eigenvalues": [fmt_scalar(v) for v in lam[: kcap + 1]],
        "seconds": round(time.monotonic() - t0, 6),
    }
    return report


# -- three-term recurrence ------------------------------------------------------------


def three_term_check(alpha1, alpha2, alpha3, n_max: int) -> VerifyReport:
    """Exact three-term identity for the r family up to degree n_max.

    x r_n = a_n r_{n+1} - (a_n + c_n) r_n + c_n r_{n-1} is expanded as an
    exact polynomial identity for every n <= n_max whose recurrence
    denominators are nonzero; degrees with a vanishing denominator are
    listed in meta["skipped"] instead of failing the check.
    """
    t0 = time.monotonic()
    report = VerifyReport("three_term_check", True)
    params = {"alpha1": alpha1, "alpha2": alpha2, "alpha3": alpha3}
    x = Poly.variable(1, 0)
    skipped = []
    checked = []
    cache: Dict[int, Poly] = {}

    def rp(k: int) -> Poly:
        if k not in cache:
            cache[k] = poly_1d("r", k, params)
        return cache[k]

    for n in range(n_max + 1):
        try:
            an, cn = r_recurrence_coeffs(n, alpha1, alpha2, alpha3)
        except FamilyError:
            skipped.append(n)
            continue
        prev = rp(n - 1) if n >= 1 else Poly.zero(1)
        residual = x * rp(n) - (an * rp(n + 1) - (an + cn) * rp(n) + cn * prev)
        if residual.is_zero():
            checked.append(n)
        else:
            _fail(report, {"n": n}, str(residual))
    report.meta = {
        "n_max": n_max,
        "checked": checked,
        "skipped": skipped,
        "seconds": round(time.monotonic() - t0, 6),
    }
    return report


# -- limit relations -------------------------------------------------------------------


def limitcheck(
    relation: str,
    params: Mapping[str, object],
    index,
    t_schedule: Sequence[object],
    tol: Optional[float] = 1e-3,
) -> VerifyReport:
    """Coefficientwise convergence of a limit relation along a schedule.

    At each t the maximum absolute coefficient deviation between the
    approximant and the limit target is computed exactly and the sequence
    must be non-increasing (ties allowed).  With a tolerance the final
    deviation must drop below it; with tol=None the final deviation must
    be strictly smaller than the first (pure-convergence mode for slow
    schedules).
    """
    t0 = time.monotonic()
    report = VerifyReport("limitcheck", True)
    target = limit_target(relation, params, index)
    devs: List[Fraction] = []
    for t in t_schedule:
        approx = limit_relation(relation, params, t, index)
        diff = approx - target
        dev = max(
            (abs(as_fraction(c)) for c in diff.terms.values()),
            default=Fraction(0),
        )
        devs.append(dev)
    for i in range(len(devs) - 1):
        if devs[i + 1] > devs[i]:
            _fail(
                report,
                {"t": str(t_schedule[i + 1])},
                f"deviation grew: {float(devs[i])!r} -> {float(devs[i + 1])!r}",
            )
    if devs:
        if tol is not None:
            if float(devs[-1]) >= tol:
                _fail(
                    report,
                    {"t": str(t_schedule[-1])},
                    f"final deviation {float(devs[-1])!r} >= tol {tol!r}",
                )
        elif len(devs) >= 2 and not devs[-1] < devs[0]:
            _fail(
                report,
                {"t": str(t_schedule[-1])},
                "schedule did not shrink the deviation",
            )
    report.meta = {
        "relation": relation,
        "index": list(index) if not isinstance(index, int) else [index],
        "schedule": [str(t) for t in t_schedule],
        "deviations": [float(v) for v in devs],
        "tol": tol,
        "seconds": round(time.monotonic() - t0, 6),
    }
    return report


# -- adjoint symmetry --------------------------------------------------------------------


def _random_poly(rng: random.Random, exps: Sequence[Index], nvars: int) -> Poly:
    out = Poly.zero(nvars)
    for e in exps:
        if rng.random() < 0.6:
            num = rng.randint(-9, 9)
            den = rng.randint(1, 9)
            if num:
                out = out + Poly.monomial(nvars, e, Fraction(num, den))
    if out.is_zero():
        out = Poly.const(nvars, Fraction(rng.randint(1, 9)))
    return out


def adjoint_symmetry_check(
    system: OrthoSystem,
    pairs: int = 50,
    deg_max: int = 4,
    seed: int = 0,
) -> VerifyReport:
    """<Du, v> = <u, Dv> exactly on random polynomial pairs.

    Inner products are exact: weighted sums on finite supports and the
    moment functional on infinite ones, so each pair either matches
    exactly or is a genuine counterexample.  Infinite families must have
    enough convergence margin for degree 2*deg_max pairings.
    """
    t0 = time.monotonic()
    report = VerifyReport("adjoint_symmetry_check", True)
    rng = random.Random(seed)
    exps = [tuple(e) for e in system.lattice.index_set_upto(deg_max)]
    limit = system.conv_limit()
    if not system.is_finite and limit is not None and 2 * deg_max >= limit:
        raise VerifyError(
            f"degree {deg_max} pairs need convergence margin > {2 * deg_max}, "
            f"family has {limit}"
        )
    for trial in range(pairs):
        u = _random_poly(rng, exps, system.nvars)
        v = _random_poly(rng, exps, system.nvars)
        lhs = system.inner_ratio(system.diff.apply(u), v)
        rhs = system.inner_ratio(u, system.diff.apply(v))
        if lhs != rhs:
            _fail(
                report,
                {"trial": trial},
                f"<Du,v>={fmt_scalar(lhs)} vs <u,Dv>={fmt_scalar(rhs)}",
            )
    report.meta = {
        "pairs": pairs,
        "deg_max": deg_max,
        "seed": seed,
        "seconds": round(time.monotonic() - t0, 6),
    }
    return report
