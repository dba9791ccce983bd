"""Constructors for every discrete orthogonal polynomial family handled here.

Eleven kinds are exposed, five in one variable and six in several:

==================  =========================================  ==============
kind                parameters                                 support
==================  =========================================  ==============
hahn                alpha1, beta1, N                           {0, ..., N}
r                   alpha1, alpha2, alpha3                     N_0
charlier            s                                          N_0
krawtchouk          p, N                                       {0, ..., N}
meixner             beta, c                                    N_0
grid-r              sigma (d entries), beta, gamma             N_0^d
box-hahn            l (d integer caps), beta, r                box <= l
simplex-hahn        sigma (d+1 entries), N                     |x| <= N
trunc-simplex-hahn  sigma (d+1 entries), N, caps on a subset   |x| <= N, x_i <= l_i
krawtchouk-d        p (d entries), N                           |x| <= N
meixner-d           s, c (d entries)                           N_0^d
==================  =========================================  ==============

Every family comes with an exact weight, a second-order difference operator
having the family as eigenfunctions, a closed-form norm (as a ratio to
<1,1>, always rational), and for the infinite-support kinds an exact moment
functional.  The multivariable polynomials are built by a chained product:
factor j is a terminating hypergeometric sum in x_j whose "denominator"
parameter is itself a polynomial in x_1, ..., x_{j-1}, accumulated through
a telescoping product so that no division by symbolic quantities is ever
needed.

All arithmetic is exact: Fraction throughout, GaussRat for the
complex-conjugate branch of the r family.  Floating point appears only in
norm_numeric, the secondary Gamma-function path for absolute norms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .classify import linear_operator, quadratic_operator
from .lattice import Box, FullGrid, LatticeBase, Simplex, TruncatedSimplex
from .multipoly import (
    Poly,
    falling_decomp,
    falling_poly,
    hyper_poly,
    neg_falling,
)
from .operators import (
    DiffForm,
    ShiftForm,
    check_self_adjoint,
    fit_admissible_form,
    to_diff_form,
    to_shift_form,
)
from .rationals import (
    GaussRat,
    Scalar,
    as_fraction,
    demote,
    fmt_scalar,
    gbinom,
    is_real_scalar,
    lg_gamma,
    parse_scalar,
    pochhammer,
)

Index = Tuple[int, ...]

KINDS_1D = ("hahn", "r", "charlier", "krawtchouk", "meixner")
KINDS_MULTI = (
    "grid-r",
    "box-hahn",
    "simplex-hahn",
    "trunc-simplex-hahn",
    "krawtchouk-d",
    "meixner-d",
)
ALL_KINDS = KINDS_1D + KINDS_MULTI

# kinds whose eigenvalue law is linear (a = 0); only these may enter products
LINEAR_KINDS = ("charlier", "krawtchouk", "meixner", "krawtchouk-d", "meixner-d")
# kinds with finite support (exact Gram sums); the rest live on N_0^d
FINITE_KINDS = (
    "hahn",
    "krawtchouk",
    "box-hahn",
    "simplex-hahn",
    "trunc-simplex-hahn",
    "krawtchouk-d",
)

LIMIT_RELATIONS = ("hahn-to-krawtchouk", "hahn-to-meixner", "box-to-meixner-d")
# accept the CamelCase spellings as aliases on the API surface
_RELATION_ALIASES = {
    "HahnToKrawtchouk": "hahn-to-krawtchouk",
    "HahnToMeixner": "hahn-to-meixner",
    "ParHahnToMeixnerD": "box-to-meixner-d",
}

# one-line signature and validity summary per kind, used by the CLI listing
KIND_INFO: Dict[str, Tuple[str, str]] = {
    "hahn": (
        "alpha1, beta1, N",
        "V={0..N}; (i) alpha1,beta1 > -1 or (ii) alpha1,beta1 < -N",
    ),
    "r": (
        "alpha1, alpha2, alpha3",
        "V=N_0; alpha3 > 0; (i) alpha1,alpha2 real, positive or in a common "
        "(k,k+1), k<0, or (ii) alpha2 = conj(alpha1) off the real line; "
        "norms need 2n < alpha3-alpha1-alpha2-1",
    ),
    "charlier": ("s", "V=N_0; s > 0"),
    "krawtchouk": ("p, N", "V={0..N}; 0 < p < 1"),
    "meixner": ("beta, c", "V=N_0; beta > 0, 0 < c < 1"),
    "grid-r": (
        "sigma[1..d], beta, gamma",
        "V=N_0^d; sigma_i > -1; weight ratio sign fixed; norms need "
        "2|nu| < gamma-|sigma|-beta-d-1",
    ),
    "box-hahn": (
        "l[1..d] (integers), beta, r",
        "V=prod{0..l_i}; (i) beta > -1, r > 0 or (ii) beta < -|l|, r < 1-|l|",
    ),
    "simplex-hahn": (
        "sigma[1..d+1], N",
        "V={|x| <= N}; (i) sigma_i > -1 or (ii) sigma_i < -N",
    ),
    "trunc-simplex-hahn": (
        "sigma[1..d+1], N, l_i on a subset S",
        "V={|x| <= N, x_i <= l_i for i in S}; sigma_i = -l_i-1 on S, "
        "1 <= l_i <= N-1; remaining sigma_i > -1",
    ),
    "krawtchouk-d": ("p[1..d], N", "V={|x| <= N}; p_i > 0, |p| < 1"),
    "meixner-d": ("s, c[1..d]", "V=N_0^d; s > 0, c_i > 0, |c| < 1"),
}


class FamilyError(ValueError):
    """Invalid family parameters or an index outside the admissible set."""


# -- parameter normalization and validity ------------------------------------


def _scalar(value: object, name: str) -> Scalar:
    if isinstance(value, (Fraction, GaussRat)):
        return demote(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_scalar(value)
    raise FamilyError(f"parameter {name!r} must be an exact scalar, got {value!r}")


def _real(value: object, name: str) -> Fraction:
    v = _scalar(value, name)
    if not is_real_scalar(v):
        raise FamilyError(f"parameter {name!r} must be real, got {fmt_scalar(v)}")
    return as_fraction(v)


def _real_tuple(value: object, name: str) -> Tuple[Fraction, ...]:
    if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
        raise FamilyError(f"parameter {name!r} must be a sequence")
    return tuple(_real(v, name) for v in value)


def _nonneg_int(value: object, name: str) -> int:
    if isinstance(value, Fraction) and value.denominator == 1:
        value = int(value)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise FamilyError(f"parameter {name!r} must be a nonnegative integer")
    return value


def _int_tuple(value: object, name: str) -> Tuple[int, ...]:
    if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
        raise FamilyError(f"parameter {name!r} must be a sequence of integers")
    return tuple(_nonneg_int(v, name) for v in value)


def _neg_count(q: Fraction) -> int:
    """Number of integers n >= 0 with q + 1 + n < 0."""
    return max(0, math.ceil(-q - 1))


def _normalize_params(kind: str, raw: Mapping[str, object]) -> Dict[str, object]:
    """Coerce raw parameters into canonical exact form for the kind."""
    raw = dict(raw)
    out: Dict[str, object] = {}

    def take(name):
        if name not in raw:
            raise FamilyError(f"{kind} needs parameter {name!r}")
        return raw.pop(name)

    if kind == "hahn":
        out["alpha1"] = _real(take("alpha1"), "alpha1")
        out["beta1"] = _real(take("beta1"), "beta1")
        out["N"] = _nonneg_int(take("N"), "N")
    elif kind == "r":
        a1 = _scalar(take("alpha1"), "alpha1")
        a2 = _scalar(take("alpha2"), "alpha2")
        out["alpha1"], out["alpha2"] = a1, a2
        out["alpha3"] = _real(take("alpha3"), "alpha3")
    elif kind == "charlier":
        out["s"] = _real(take("s"), "s")
    elif kind == "krawtchouk":
        out["p"] = _real(take("p"), "p")
        out["N"] = _nonneg_int(take("N"), "N")
    elif kind == "meixner":
        out["beta"] = _real(take("beta"), "beta")
        out["c"] = _real(take("c"), "c")
    elif kind == "grid-r":
        out["sigma"] = _real_tuple(take("sigma"), "sigma")
        out["beta"] = _real(take("beta"), "beta")
        out["gamma"] = _real(take("gamma"), "gamma")
    elif kind == "box-hahn":
        out["l"] = _int_tuple(take("l"), "l")
        out["beta"] = _real(take("beta"), "beta")
        out["r"] = _real(take("r"), "r")
    elif kind == "simplex-hahn":
        out["sigma"] = _real_tuple(take("sigma"), "sigma")
        out["N"] = _nonneg_int(take("N"), "N")
        if len(out["sigma"]) < 2:
            raise FamilyError("simplex-hahn sigma needs d+1 >= 2 entries")
    elif kind == "trunc-simplex-hahn":
        out["N"] = _nonneg_int(take("N"), "N")
        if "trunc" in raw:
            trunc_raw = raw.pop("trunc")
            trunc = {int(i): _nonneg_int(c, "l") for i, c in dict(trunc_raw).items()}
        else:
            coords = [int(i) - 1 for i in take("S")]
            caps = _int_tuple(take("l"), "l")
            if len(coords) != len(caps):
                raise FamilyError("S and l must have the same length")
            trunc = dict(zip(coords, caps))
        if not trunc:
            raise FamilyError("trunc-simplex-hahn needs a nonempty cap set S")
        out["trunc"] = dict(sorted(trunc.items()))
        if "sigma" in raw:
            sigma = list(_real_tuple(raw.pop("sigma"), "sigma"))
        else:
            d = max(trunc) + 1
            sigma = [Fraction(0)] * (d + 1)
            for i, cap in trunc.items():
                sigma[i] = Fraction(-cap - 1)
        out["sigma"] = tuple(sigma)
    elif kind == "krawtchouk-d":
        out["p"] = _real_tuple(take("p"), "p")
        out["N"] = _nonneg_int(take("N"), "N")
    elif kind == "meixner-d":
        out["s"] = _real(take("s"), "s")
        out["c"] = _real_tuple(take("c"), "c")
    else:
        raise FamilyError(f"unknown family kind {kind!r}")
    if raw:
        raise FamilyError(f"{kind} got unexpected parameters {sorted(raw)}")
    return out


def _validity(kind: str, p: Mapping[str, object]) -> Tuple[Optional[str], List[str]]:
    """Return (branch label or None, list of violated conditions)."""
    errors: List[str] = []
    branch: Optional[str] = None
    if kind == "hahn":
        a1, b1, n_cap = p["alpha1"], p["beta1"], p["N"]
        if a1 > -1 and b1 > -1:
            branch = "i"
        elif a1 < -n_cap and b1 < -n_cap:
            branch = "ii"
        else:
            errors.append(
                "hahn parameters satisfy neither branch (i) alpha1, beta1 > -1 "
                "nor branch (ii) alpha1, beta1 < -N"
            )
    elif kind == "r":
        a1, a2, a3 = p["alpha1"], p["alpha2"], p["alpha3"]
        if a3 <= 0:
            errors.append("r needs alpha3 > 0")
        if is_real_scalar(a1) and is_real_scalar(a2):
            f1, f2 = as_fraction(a1), as_fraction(a2)
            if f1 > -1 and f2 > -1:
                branch = "i"
            elif (
                f1 < -1
                and f2 < -1
                and f1.denominator > 1
                and f2.denominator > 1
                and math.floor(f1) == math.floor(f2)
            ):
                branch = "i"
            else:
                errors.append(
                    "r branch (i) needs real alpha1, alpha2 either > -1 or "
                    "inside a common interval (k, k+1) with k a negative integer"
                )
        elif isinstance(a1, GaussRat) and a2 == a1.conjugate():
            branch = "ii"
        else:
            errors.append(
                "r branch (ii) needs alpha2 equal to the complex conjugate "
                "of alpha1"
            )
    elif kind == "charlier":
        if p["s"] <= 0:
            errors.append("charlier needs s > 0")
        else:
            branch = "i"
    elif kind == "krawtchouk":
        if not 0 < p["p"] < 1:
            errors.append("krawtchouk needs 0 < p < 1")
        else:
            branch = "i"
    elif kind == "meixner":
        if p["beta"] <= 0:
            errors.append("meixner needs beta > 0")
        if not 0 < p["c"] < 1:
            errors.append("meixner needs 0 < c < 1")
        if not errors:
            branch = "i"
    elif kind == "grid-r":
        sigma, beta, gamma = p["sigma"], p["beta"], p["gamma"]
        for i, sv in enumerate(sigma):
            if sv <= -1:
                errors.append(f"grid-r needs sigma_{i + 1} > -1")
        for name, q in (("beta", beta), ("gamma", gamma)):
            if q <= -1 and q.denominator == 1:
                errors.append(f"grid-r {name} at a negative integer kills the weight")
        if _neg_count(beta) != _neg_count(gamma):
            errors.append(
                "grid-r weight changes sign: (beta+1+n)/(gamma+1+n) must keep "
                "one sign for all n >= 0"
            )
        d = len(sigma)
        if gamma - beta - sum(sigma, Fraction(0)) - d - 1 <= 0:
            errors.append(
                "grid-r orthogonality range is empty: needs "
                "gamma - beta - |sigma| - d - 1 > 0"
            )
        if not errors:
            branch = "i"
    elif kind == "box-hahn":
        beta, r, caps = p["beta"], p["r"], p["l"]
        lsum = sum(caps)
        if beta > -1 and r > 0:
            branch = "i"
        elif beta < -lsum and r < 1 - lsum:
            branch = "ii"
        else:
            errors.append(
                "box-hahn parameters satisfy neither branch (i) beta > -1, "
                "r > 0 nor branch (ii) beta < -|l|, r < 1-|l|"
            )
    elif kind == "simplex-hahn":
        sigma, n_cap = p["sigma"], p["N"]
        if all(sv > -1 for sv in sigma):
            branch = "i"
        elif all(sv < -n_cap for sv in sigma):
            branch = "ii"
        else:
            errors.append(
                "simplex-hahn parameters satisfy neither branch (i) all "
                "sigma_i > -1 nor branch (ii) all sigma_i < -N"
            )
    elif kind == "trunc-simplex-hahn":
        sigma, n_cap, trunc = p["sigma"], p["N"], p["trunc"]
        d = len(sigma) - 1
        for i, cap in trunc.items():
            if not 0 <= i < d:
                errors.append(f"capped coordinate {i + 1} outside 1..{d}")
                continue
            if not 1 <= cap <= n_cap - 1:
                errors.append(f"cap l_{i + 1} = {cap} must satisfy 1 <= l <= N-1")
            if sigma[i] != -cap - 1:
                errors.append(
                    f"sigma_{i + 1} must equal -l_{i + 1}-1 = {-cap - 1}, "
                    f"got {sigma[i]}"
                )
        for i in range(d + 1):
            if i not in trunc and sigma[i] <= -1:
                errors.append(f"uncapped sigma_{i + 1} must be > -1")
        if not errors:
            branch = "i"
    elif kind == "krawtchouk-d":
        pv = p["p"]
        if any(pi <= 0 for pi in pv) or sum(pv, Fraction(0)) >= 1:
            errors.append("krawtchouk-d needs p_i > 0 and |p| < 1")
        else:
            branch = "i"
    elif kind == "meixner-d":
        s, c = p["s"], p["c"]
        if s <= 0:
            errors.append("meixner-d needs s > 0")
        if any(ci <= 0 for ci in c) or sum(c, Fraction(0)) >= 1:
            errors.append("meixner-d needs c_i > 0 and |c| < 1")
        if not errors:
            branch = "i"
    return branch, errors


class FamilySpec:
    """A family kind plus exact parameters, validated on construction.

    Invalid parameter sets raise FamilyError naming the violated branch;
    passing unchecked=True records the problems instead of raising, for
    deliberately out-of-range experiments.
    """

    def __init__(self, kind: str, unchecked: bool = False, **params: object):
        if kind not in ALL_KINDS:
            raise FamilyError(f"unknown family kind {kind!r}")
        self.kind = kind
        self.params = _normalize_params(kind, params)
        self.unchecked = bool(unchecked)
        branch, errors = _validity(kind, self.params)
        self.branch = branch
        self.problems: Tuple[str, ...] = tuple(errors)
        if errors and not unchecked:
            raise FamilyError("; ".join(errors))

    @property
    def d(self) -> int:
        """Number of lattice variables."""
        return _dim(self.kind, self.params)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FamilySpec)
            and self.kind == other.kind
            and self.params == other.params
        )

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"FamilySpec({self.kind}, {inner})"

    def to_obj(self) -> dict:
        params: Dict[str, object] = {}
        for key, val in self.params.items():
            if key == "trunc":
                params["S"] = [i + 1 for i in sorted(val)]
                params["l"] = [val[i] for i in sorted(val)]
            elif isinstance(val, tuple):
                params[key] = [fmt_scalar(v) for v in val]
            elif isinstance(val, int):
                params[key] = val
            else:
                params[key] = fmt_scalar(val)
        obj: Dict[str, object] = {"kind": self.kind, "params": params}
        if self.unchecked:
            obj["unchecked"] = True
        return obj

    @classmethod
    def from_obj(cls, obj: Mapping[str, object]) -> "FamilySpec":
        kind = obj.get("kind")
        if not isinstance(kind, str):
            raise FamilyError("spec object needs a 'kind' string")
        params = dict(obj.get("params", {}))
        if kind == "box-hahn" and "l" in params:
            params["l"] = [int(Fraction(str(v))) for v in params["l"]]
        return cls(kind, unchecked=bool(obj.get("unchecked", False)), **params)


# -- chained product engine ---------------------------------------------------


def _head_sum(nvars: int, j: int) -> Poly:
    """x_1 + ... + x_j as a Poly (arguments are 0-based: variables < j)."""
    out = Poly.zero(nvars)
    for t in range(j):
        out = out + Poly.variable(nvars, t)
    return out


def _chained_factor(nvars: int, j: int, nu_j: int, pivot: Poly, tcoeffs) -> Poly:
    """sum_{k=0}^{nu_j} T_k (-x_j)_k prod_{t=k}^{nu_j-1}(pivot + t).

    The trailing product telescopes the symbolic lower parameter of the
    terminating series: dividing term k by (pivot)_k is replaced by
    multiplying it by (pivot+k)_{nu_j-k}, which keeps everything polynomial.
    The factor comes out scaled by the full product (pivot)_{nu_j}, which is
    exactly the normalization the closed-form norms below expect.
    """
    tails = [Poly.const(nvars, 1)] * (nu_j + 1)
    for k in range(nu_j - 1, -1, -1):
        tails[k] = (pivot + Poly.const(nvars, k)) * tails[k + 1]
    out = Poly.zero(nvars)
    for k in range(nu_j + 1):
        if tcoeffs[k]:
            out = out + tcoeffs[k] * neg_falling(nvars, j, k) * tails[k]
    return out


def _hahn_terms(nu_j: int, top: Scalar, bot: Scalar) -> List[Scalar]:
    """T_k = (-nu_j)_k (top)_k / ((bot)_k k!) for k = 0..nu_j."""
    out: List[Scalar] = [Fraction(1)]
    for k in range(1, nu_j + 1):
        num = (Fraction(-nu_j) + (k - 1)) * (top + (k - 1))
        den = (bot + (k - 1)) * k
        if den == 0:
            raise FamilyError(
                f"vanishing denominator Pochhammer at k={k} (parameter {bot})"
            )
        out.append(out[-1] * num / den)
    return out


def _dim(kind: str, p: Mapping[str, object]) -> int:
    """Variable count from normalized parameters."""
    if kind in KINDS_1D:
        return 1
    if kind == "grid-r":
        return len(p["sigma"])
    if kind == "box-hahn":
        return len(p["l"])
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        return len(p["sigma"]) - 1
    if kind == "krawtchouk-d":
        return len(p["p"])
    return len(p["c"])


def _as_index(nu: Union[int, Sequence[int]], d: int) -> Index:
    if isinstance(nu, int):
        nu = (nu,)
    nu = tuple(int(v) for v in nu)
    if len(nu) != d:
        raise FamilyError(f"index {nu} has {len(nu)} entries, expected {d}")
    if any(v < 0 for v in nu):
        raise FamilyError(f"index {nu} has negative entries")
    return nu


# -- one-variable families ----------------------------------------------------


def poly_1d(kind: str, n: int, params: Mapping[str, object]) -> Poly:
    """The degree-n polynomial of a one-variable kind, exactly.

    hahn and krawtchouk terminate against their support and need n <= N;
    the infinite-support kinds accept any n >= 0.
    """
    if kind not in KINDS_1D:
        raise FamilyError(f"poly_1d got non-1-D kind {kind!r}")
    p = _normalize_params(kind, params)
    if n < 0:
        raise FamilyError("degree must be nonnegative")
    try:
        if kind == "hahn":
            if n > p["N"]:
                raise FamilyError(f"hahn degree n={n} exceeds N={p['N']}")
            a1, b1 = p["alpha1"], p["beta1"]
            return hyper_poly(
                [Fraction(-n), Fraction(n) + a1 + b1 + 1],
                [a1 + 1, Fraction(-p["N"])],
                Fraction(1),
                n,
            )
        if kind == "r":
            a1, a2, a3 = p["alpha1"], p["alpha2"], p["alpha3"]
            out = hyper_poly(
                [Fraction(-n), Fraction(n) - a3 + a1 + a2 + 1],
                [a1 + 1, a2 + 1],
                Fraction(1),
                n,
            )
            return out.map_coeffs(demote)
        if kind == "charlier":
            return hyper_poly([Fraction(-n)], [], -1 / p["s"], n)
        if kind == "krawtchouk":
            if n > p["N"]:
                raise FamilyError(f"krawtchouk degree n={n} exceeds N={p['N']}")
            return hyper_poly([Fraction(-n)], [Fraction(-p["N"])], 1 / p["p"], n)
        # meixner
        return hyper_poly([Fraction(-n)], [p["beta"]], 1 - 1 / p["c"], n)
    except ZeroDivisionError:
        raise FamilyError(
            f"{kind} parameters hit a vanishing denominator before degree {n}"
        ) from None


def _r_coeff_a(n: int, a1, a2, a3) -> Scalar:
    g = -a3 + a1 + a2
    den = (2 * n + g + 1) * (2 * n + g + 2)
    if den == 0:
        raise FamilyError(f"r recurrence coefficient a_{n} has a pole")
    return demote((n + a1 + 1) * (n + a2 + 1) * (n + g + 1) / den)


def _r_coeff_c(n: int, a1, a2, a3) -> Scalar:
    g = -a3 + a1 + a2
    den = (2 * n + g) * (2 * n + g + 1)
    if den == 0:
        raise FamilyError(f"r recurrence coefficient c_{n} has a pole")
    return demote(-Fraction(n) * (n - a3 + a1) * (n - a3 + a2) / den)


def r_recurrence_coeffs(n: int, alpha1, alpha2, alpha3) -> Tuple[Scalar, Scalar]:
    """Three-term coefficients (a_n, c_n) of the r family.

    x r_n = a_n r_{n+1} - (a_n + c_n) r_n + c_n r_{n-1}; c_0 = 0.  Either
    coefficient can hit a parameter pole at isolated n; the error names the
    coefficient so callers needing only one of the two can recover.
    """
    a1 = _scalar(alpha1, "alpha1")
    a2 = _scalar(alpha2, "alpha2")
    a3 = _scalar(alpha3, "alpha3")
    return _r_coeff_a(n, a1, a2, a3), _r_coeff_c(n, a1, a2, a3)


def _norm_hahn_abs(a1, b1, n_cap: int, n: int) -> Fraction:
    """Absolute Hahn norm <Q_n, Q_n> for the binomial-product weight."""
    if n == 0:
        return pochhammer(a1 + b1 + 2, n_cap) / math.factorial(n_cap)
    out = Fraction(-1) ** n * math.factorial(n) * pochhammer(b1 + 1, n)
    out = out * pochhammer(Fraction(n) + a1 + b1 + 1, n_cap + 1)
    den = (
        math.factorial(n_cap)
        * (2 * n + a1 + b1 + 1)
        * pochhammer(Fraction(-n_cap), n)
        * pochhammer(a1 + 1, n)
    )
    if den == 0:
        raise FamilyError(f"hahn norm denominator vanishes at n={n}")
    return out / den


# -- multivariable families ---------------------------------------------------


def _poly_simplex(sigma, n_cap: int, nu: Index) -> Poly:
    d = len(nu)
    out = Poly.const(
        d, Fraction(-1) ** sum(nu) / pochhammer(Fraction(-n_cap), sum(nu))
    )
    for j in range(d):
        a_j = sum(sigma[j + 1:], Fraction(0)) + 2 * sum(nu[j + 1:]) + (d - 1 - j)
        pivot = _head_sum(d, j) + Poly.const(d, Fraction(sum(nu[j + 1:]) - n_cap))
        tk = _hahn_terms(nu[j], Fraction(nu[j]) + sigma[j] + a_j + 1, sigma[j] + 1)
        fac = _chained_factor(d, j, nu[j], pivot, tk)
        pref = pochhammer(sigma[j] + 1, nu[j]) / pochhammer(a_j + 1, nu[j])
        out = out * (pref * fac)
    return out


def _norm_simplex_abs(sigma, n_cap: int, nu: Index) -> Fraction:
    d = len(nu)
    n = sum(nu)
    ssum = sum(sigma, Fraction(0))
    out = Fraction(-1) ** n * pochhammer(ssum + d + 2 * n + 1, n_cap - n)
    out = out / (pochhammer(Fraction(-n_cap), n) * math.factorial(n_cap))
    for j in range(d):
        a_j = sum(sigma[j + 1:], Fraction(0)) + 2 * sum(nu[j + 1:]) + (d - 1 - j)
        out = out * pochhammer(sigma[j] + a_j + nu[j] + 1, nu[j])
        out = out * pochhammer(sigma[j] + 1, nu[j]) * math.factorial(nu[j])
        out = out / pochhammer(a_j + 1, nu[j])
    return out


def _poly_box(caps, beta, r, nu: Index) -> Poly:
    d = len(nu)
    out = Poly.const(d, 1)
    for j in range(d):
        h_j = (
            beta
            + sum((Fraction(c) for c in caps[:j]), Fraction(0))
            + 2 * sum(nu[j + 1:])
            + r
            - 1
        )
        pivot = _head_sum(d, j) + Poly.const(d, beta + sum(nu[j + 1:]) + 1)
        tk = _hahn_terms(nu[j], Fraction(nu[j]) + h_j + 1, Fraction(-caps[j]))
        out = out * _chained_factor(d, j, nu[j], pivot, tk)
    return out


def _norm_box_abs(caps, beta, r, nu: Index) -> Fraction:
    d = len(nu)
    n = sum(nu)
    lsum = sum(caps)
    out = Fraction(-1) ** n * pochhammer(beta + 1, n) / pochhammer(r + n, lsum - n)
    for j in range(d):
        lhead = sum(caps[:j])
        tail = sum(nu[j + 1:])
        out = out * math.factorial(nu[j])
        out = out * pochhammer(beta + r + 2 * tail + nu[j] + lhead, caps[j] + 1)
        out = out / (
            pochhammer(Fraction(-caps[j]), nu[j])
            * (beta + r + 2 * (nu[j] + tail) + lhead)
        )
    return out


def _poly_krawtchouk_multi(p, n_cap: int, nu: Index) -> Poly:
    d = len(nu)
    out = Poly.const(
        d, Fraction(-1) ** sum(nu) / pochhammer(Fraction(-n_cap), sum(nu))
    )
    for j in range(d):
        q_j = p[j] / (1 - sum(p[:j], Fraction(0)))
        pivot = _head_sum(d, j) + Poly.const(d, Fraction(sum(nu[j + 1:]) - n_cap))
        tk: List[Scalar] = [Fraction(1)]
        for k in range(1, nu[j] + 1):
            tk.append(tk[-1] * (Fraction(-nu[j]) + (k - 1)) / (q_j * k))
        fac = _chained_factor(d, j, nu[j], pivot, tk)
        pref = (p[j] / (1 - sum(p[: j + 1], Fraction(0)))) ** nu[j]
        out = out * (pref * fac)
    return out


def _norm_krawtchouk_multi_abs(p, n_cap: int, nu: Index) -> Fraction:
    d = len(nu)
    n = sum(nu)
    out = Fraction(-1) ** n / (
        pochhammer(Fraction(-n_cap), n) * math.factorial(n_cap)
    )
    for j in range(d):
        head = 1 - sum(p[: j + 1], Fraction(0))
        nxt = nu[j + 1] if j + 1 < d else 0
        out = out * math.factorial(nu[j]) * p[j] ** nu[j] / head ** (nu[j] - nxt)
    return out


def _poly_meixner_multi(s, c, nu: Index) -> Poly:
    d = len(nu)
    out = Poly.const(d, 1)
    for j in range(d):
        e_j = c[j] / (1 - sum(c[j + 1:], Fraction(0)))
        pivot = _head_sum(d, j) + Poly.const(d, s + sum(nu[j + 1:]))
        z = 1 - 1 / e_j
        tk: List[Scalar] = [Fraction(1)]
        for k in range(1, nu[j] + 1):
            tk.append(tk[-1] * (Fraction(-nu[j]) + (k - 1)) * z / k)
        out = out * _chained_factor(d, j, nu[j], pivot, tk)
    return out


def _norm_ratio_meixner_multi(s, c, nu: Index) -> Fraction:
    """<M_nu, M_nu> / <1, 1> for the several-variable Meixner family.

    The per-coordinate sum at level j runs against a mass whose exponent
    carries the running tail |nu^{j+1}|, so the effective chain parameter is
    c_j (1-|c|) / ((1-|C_j|)(1-|C_{j+1}|)) with |C_j| = c_j + ... + c_d; it
    collapses to c_j at d = 1.
    """
    out = pochhammer(s, sum(nu))
    csum = sum(c, Fraction(0))
    for j in range(len(nu)):
        gtail = 1 - sum(c[j + 1:], Fraction(0))
        e_j = c[j] * (1 - csum) / (gtail * (gtail - c[j]))
        out = out * math.factorial(nu[j]) / e_j ** nu[j]
    return out


def _poly_grid_r(sigma, beta, gamma, nu: Index) -> Poly:
    d = len(nu)
    out = Poly.const(d, 1)
    for j in range(d):
        g_j = (
            gamma
            - beta
            - sum(sigma[j + 1:], Fraction(0))
            - 2 * sum(nu[j + 1:])
            - (d - 1 - j)
        )
        pivot = _head_sum(d, j) + Poly.const(d, beta + sum(nu[j + 1:]) + 1)
        tk = _hahn_terms(nu[j], Fraction(nu[j]) + sigma[j] + 1 - g_j, sigma[j] + 1)
        out = out * _chained_factor(d, j, nu[j], pivot, tk)
    return out


def _norm_ratio_grid_r(sigma, beta, gamma, nu: Index) -> Fraction:
    d = len(nu)
    n = sum(nu)
    ssum = sum(sigma, Fraction(0))
    g0 = gamma - beta - ssum - 2 * n - d
    out = pochhammer(beta + 1, n) * pochhammer(gamma - ssum + 1 - d - n, n)
    out = out / pochhammer(g0, 2 * n)
    gs = [
        gamma
        - beta
        - sum(sigma[j + 1:], Fraction(0))
        - 2 * sum(nu[j + 1:])
        - (d - 1 - j)
        for j in range(d)
    ]
    for j in range(d):
        gprev = gs[j - 1] if j >= 1 else g0
        out = out * math.factorial(nu[j]) * pochhammer(gs[j] - nu[j], nu[j])
        out = out * pochhammer(gprev + 1, nu[j]) / pochhammer(sigma[j] + 1, nu[j])
    return out


# -- public constructors -------------------------------------------------------


def _lattice_for(kind: str, p: Mapping[str, object]) -> LatticeBase:
    if kind in ("hahn", "krawtchouk"):
        return Simplex(1, p["N"])
    if kind in ("r", "charlier", "meixner"):
        return FullGrid(1)
    if kind == "grid-r":
        return FullGrid(len(p["sigma"]))
    if kind == "box-hahn":
        return Box(tuple(p["l"]))
    if kind == "simplex-hahn":
        return Simplex(len(p["sigma"]) - 1, p["N"])
    if kind == "trunc-simplex-hahn":
        return TruncatedSimplex(len(p["sigma"]) - 1, p["N"], dict(p["trunc"]))
    if kind == "krawtchouk-d":
        return Simplex(len(p["p"]), p["N"])
    return FullGrid(len(p["c"]))


def _check_admissible(kind: str, lat: LatticeBase, nu: Index) -> None:
    if kind in FINITE_KINDS and not lat.contains(nu):
        raise FamilyError(f"index {nu} is outside the admissible set of {kind}")


def poly_multi(kind: str, nu: Sequence[int], params: Mapping[str, object]) -> Poly:
    """The product-form polynomial of a several-variable kind at index nu.

    Index admissibility mirrors the support: |nu| <= N for the simplex
    kinds, nu <= l for the box, nu inside the truncated simplex for the
    capped kind.  Convergence ranges are not construction preconditions.
    """
    if kind in KINDS_1D:
        p1 = poly_1d(kind, _as_index(nu, 1)[0], params)
        return p1
    if kind not in KINDS_MULTI:
        raise FamilyError(f"unknown family kind {kind!r}")
    p = _normalize_params(kind, params)
    nu = _as_index(nu, _dim(kind, p))
    _check_admissible(kind, _lattice_for(kind, p), nu)
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        return _poly_simplex(p["sigma"], p["N"], nu)
    if kind == "box-hahn":
        return _poly_box(p["l"], p["beta"], p["r"], nu)
    if kind == "krawtchouk-d":
        return _poly_krawtchouk_multi(p["p"], p["N"], nu)
    if kind == "meixner-d":
        return _poly_meixner_multi(p["s"], p["c"], nu)
    return _poly_grid_r(p["sigma"], p["beta"], p["gamma"], nu)


def weight_closed(kind: str, x: Sequence[int], params: Mapping[str, object]) -> Scalar:
    """Exact weight value at lattice point x (rational for rational input)."""
    p = _normalize_params(kind, params)
    x = _as_index(x, _dim(kind, p))
    lat = _lattice_for(kind, p)
    if not lat.contains(x):
        raise FamilyError(f"point {x} is outside the support of {kind}")
    if kind == "hahn":
        a1, b1, n_cap = p["alpha1"], p["beta1"], p["N"]
        return gbinom(Fraction(x[0]) + a1, x[0]) * gbinom(
            Fraction(n_cap - x[0]) + b1, n_cap - x[0]
        )
    if kind == "r":
        a1, a2, a3 = p["alpha1"], p["alpha2"], p["alpha3"]
        num = pochhammer(a1 + 1, x[0]) * pochhammer(a2 + 1, x[0])
        return demote(num) / (math.factorial(x[0]) * pochhammer(a3 + 1, x[0]))
    if kind == "charlier":
        return p["s"] ** x[0] / math.factorial(x[0])
    if kind == "krawtchouk":
        pv, n_cap = p["p"], p["N"]
        return (
            pv ** x[0]
            * (1 - pv) ** (n_cap - x[0])
            * math.comb(n_cap, x[0])
        )
    if kind == "meixner":
        return p["c"] ** x[0] * pochhammer(p["beta"], x[0]) / math.factorial(x[0])
    if kind == "grid-r":
        sigma, beta, gamma = p["sigma"], p["beta"], p["gamma"]
        out = pochhammer(beta + 1, sum(x)) / pochhammer(gamma + 1, sum(x))
        for i, xi in enumerate(x):
            out = out * pochhammer(sigma[i] + 1, xi) / math.factorial(xi)
        return out
    if kind == "box-hahn":
        caps, beta, r = p["l"], p["beta"], p["r"]
        lsum = sum(caps)
        out = pochhammer(beta + 1, sum(x)) / pochhammer(
            Fraction(-lsum) - r + 1, sum(x)
        )
        for i, xi in enumerate(x):
            out = out * pochhammer(Fraction(-caps[i]), xi) / math.factorial(xi)
        return out
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        sigma, n_cap = p["sigma"], p["N"]
        out = gbinom(Fraction(n_cap - sum(x)) + sigma[-1], n_cap - sum(x))
        for i, xi in enumerate(x):
            out = out * gbinom(Fraction(xi) + sigma[i], xi)
        return out
    if kind == "krawtchouk-d":
        pv, n_cap = p["p"], p["N"]
        plast = 1 - sum(pv, Fraction(0))
        out = plast ** (n_cap - sum(x)) / math.factorial(n_cap - sum(x))
        for i, xi in enumerate(x):
            out = out * pv[i] ** xi / math.factorial(xi)
        return out
    # meixner-d
    s, c = p["s"], p["c"]
    out = pochhammer(s, sum(x))
    for i, xi in enumerate(x):
        out = out * c[i] ** xi / math.factorial(xi)
    return out


def _conv_limit(kind: str, p: Mapping[str, object]) -> Optional[Fraction]:
    """Strict upper bound g with convergence condition 2|nu| < g, or None."""
    if kind == "r":
        a1, a2, a3 = p["alpha1"], p["alpha2"], p["alpha3"]
        return as_fraction(demote(a3 - a1 - a2 - 1))
    if kind == "grid-r":
        sigma, beta, gamma = p["sigma"], p["beta"], p["gamma"]
        d = len(sigma)
        return gamma - sum(sigma, Fraction(0)) - beta - d - 1
    return None


def norm_ratio(kind: str, nu, params: Mapping[str, object]) -> Scalar:
    """<P_nu, P_nu> / <1, 1>, exact.

    Always rational: for the infinite-support kinds every transcendental
    factor of the absolute norm cancels in the ratio.  The r and grid-r
    kinds enforce their convergence condition 2|nu| below the family's
    margin; other kinds only need admissibility.
    """
    p = _normalize_params(kind, params)
    d = _dim(kind, p)
    nu = _as_index(nu, d)
    _check_admissible(kind, _lattice_for(kind, p), nu)
    limit = _conv_limit(kind, p)
    if limit is not None and 2 * sum(nu) >= limit:
        raise FamilyError(
            f"index {nu} outside the convergence range 2|nu| < {limit} of {kind}"
        )
    if kind == "hahn":
        a1, b1, n_cap = p["alpha1"], p["beta1"], p["N"]
        return _norm_hahn_abs(a1, b1, n_cap, nu[0]) / _norm_hahn_abs(
            a1, b1, n_cap, 0
        )
    if kind == "r":
        a1 = _scalar(p["alpha1"], "alpha1")
        a2 = _scalar(p["alpha2"], "alpha2")
        a3 = _scalar(p["alpha3"], "alpha3")
        acc: Scalar = Fraction(1)
        for k in range(1, nu[0] + 1):
            a_prev = _r_coeff_a(k - 1, a1, a2, a3)
            c_k = _r_coeff_c(k, a1, a2, a3)
            if a_prev == 0:
                raise FamilyError(f"r recurrence coefficient a_{k - 1} vanishes")
            acc = acc * c_k / a_prev
        return demote(acc)
    if kind == "charlier":
        return Fraction(math.factorial(nu[0])) / p["s"] ** nu[0]
    if kind == "krawtchouk":
        pv, n_cap = p["p"], p["N"]
        n = nu[0]
        return (
            Fraction(-1) ** n
            * math.factorial(n)
            * ((1 - pv) / pv) ** n
            / pochhammer(Fraction(-n_cap), n)
        )
    if kind == "meixner":
        n = nu[0]
        return math.factorial(n) / (p["c"] ** n * pochhammer(p["beta"], n))
    if kind == "grid-r":
        return _norm_ratio_grid_r(p["sigma"], p["beta"], p["gamma"], nu)
    if kind == "box-hahn":
        caps, beta, r = p["l"], p["beta"], p["r"]
        return _norm_box_abs(caps, beta, r, nu) / _norm_box_abs(
            caps, beta, r, tuple([0] * d)
        )
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        sigma, n_cap = p["sigma"], p["N"]
        return _norm_simplex_abs(sigma, n_cap, nu) / _norm_simplex_abs(
            sigma, n_cap, tuple([0] * d)
        )
    if kind == "krawtchouk-d":
        pv, n_cap = p["p"], p["N"]
        return _norm_krawtchouk_multi_abs(
            pv, n_cap, nu
        ) / _norm_krawtchouk_multi_abs(pv, n_cap, tuple([0] * d))
    # meixner-d
    return _norm_ratio_meixner_multi(p["s"], p["c"], nu)


def _gamma_product(nums: Sequence[Fraction], dens: Sequence[Fraction]) -> float:
    """prod Gamma(nums) / prod Gamma(dens) in floating point, sign-tracked."""
    log = 0.0
    sign = 1.0
    for group, flip in ((nums, 1.0), (dens, -1.0)):
        for q in group:
            if q <= 0 and q.denominator == 1:
                raise FamilyError(f"Gamma pole at nonpositive integer {q}")
            xf = float(q)
            log += flip * lg_gamma(xf)
            if xf < 0 and math.ceil(-xf) % 2 == 1:
                sign = -sign
    return sign * math.exp(log)


def mass_numeric(kind: str, params: Mapping[str, object]) -> float:
    """<1, 1> in floating point (exact mass for finite kinds)."""
    p = _normalize_params(kind, params)
    if kind == "hahn":
        return float(_norm_hahn_abs(p["alpha1"], p["beta1"], p["N"], 0))
    if kind == "r":
        a1 = demote(p["alpha1"] + 0)
        a2 = demote(p["alpha2"] + 0)
        a3 = p["alpha3"]
        if not (is_real_scalar(a1) and is_real_scalar(a2)):
            raise FamilyError(
                "numeric mass needs real r parameters; the conjugate-pair "
                "branch keeps exact ratios only"
            )
        f1, f2 = as_fraction(a1), as_fraction(a2)
        return _gamma_product(
            [as_fraction(a3) + 1, as_fraction(a3) - f1 - f2 - 1],
            [as_fraction(a3) - f1, as_fraction(a3) - f2],
        )
    if kind == "charlier":
        return math.exp(float(p["s"]))
    if kind == "krawtchouk":
        return 1.0
    if kind == "meixner":
        return float(1 - p["c"]) ** (-float(p["beta"]))
    if kind == "grid-r":
        sigma, beta, gamma = p["sigma"], p["beta"], p["gamma"]
        d = len(sigma)
        ssum = sum(sigma, Fraction(0))
        return _gamma_product(
            [gamma + 1, gamma - beta - ssum - d],
            [gamma - ssum + 1 - d, gamma - beta],
        )
    if kind == "box-hahn":
        d = len(p["l"])
        return float(_norm_box_abs(p["l"], p["beta"], p["r"], tuple([0] * d)))
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        d = len(p["sigma"]) - 1
        return float(_norm_simplex_abs(p["sigma"], p["N"], tuple([0] * d)))
    if kind == "krawtchouk-d":
        return 1.0 / math.factorial(p["N"])
    # meixner-d
    return float(1 - sum(p["c"], Fraction(0))) ** (-float(p["s"]))


def norm_numeric(
    kind: str, nu, params: Mapping[str, object], rel_tol: float = 1e-12
) -> Tuple[float, float]:
    """Absolute norm <P_nu, P_nu> in floating point.

    Returns (value, stated relative-error target).  Finite kinds evaluate
    their exact rational norm; infinite kinds combine the Gamma-expression
    mass with the exact rational ratio.  The r kind uses its direct
    Gamma-product norm formula.
    """
    p = _normalize_params(kind, params)
    d = _dim(kind, p)
    nu = _as_index(nu, d)
    if kind == "r":
        a1, a2, a3 = p["alpha1"], p["alpha2"], p["alpha3"]
        if not (is_real_scalar(a1) and is_real_scalar(a2)):
            raise FamilyError("norm_numeric needs real parameters")
        f1, f2, f3 = as_fraction(a1), as_fraction(a2), as_fraction(a3)
        n = nu[0]
        if 2 * n >= f3 - f1 - f2 - 1:
            raise FamilyError(
                f"index {nu} outside the convergence range of r"
            )
        head = Fraction(math.factorial(n)) / (
            (f3 - f1 - f2 - 2 * n - 1)
            * pochhammer(1 + f1, n)
            * pochhammer(1 + f2, n)
        )
        value = float(head) * _gamma_product(
            [f3 - f1 - f2 - n, f3 + 1], [f3 - f1 - n, f3 - f2 - n]
        )
        return value, rel_tol
    ratio = norm_ratio(kind, nu, params)
    if not is_real_scalar(ratio):
        raise FamilyError("norm_numeric needs real parameters")
    return mass_numeric(kind, params) * float(as_fraction(ratio)), rel_tol


# -- moment functionals (infinite-support kinds) --------------------------------


def _moments_for(kind: str, p: Mapping[str, object]):
    """Mass-normalized falling-factorial moment functional, or None.

    The functional maps a falling-exponent multi-index k to
    sum_x W(x) (x_1)_(k_1) ... (x_d)_(k_d) / sum_x W(x), exactly.
    """
    if kind == "charlier":
        s = p["s"]

        def mom_charlier(k: Index) -> Scalar:
            return s ** k[0]

        return mom_charlier
    if kind == "meixner":
        beta, c = p["beta"], p["c"]

        def mom_meixner(k: Index) -> Scalar:
            return c ** k[0] * pochhammer(beta, k[0]) / (1 - c) ** k[0]

        return mom_meixner
    if kind == "meixner-d":
        s, c = p["s"], p["c"]
        gap = 1 - sum(c, Fraction(0))

        def mom_meixner_multi(k: Index) -> Scalar:
            out = pochhammer(s, sum(k)) / gap ** sum(k)
            for i, ki in enumerate(k):
                out = out * c[i] ** ki
            return out

        return mom_meixner_multi
    if kind in ("r", "grid-r"):
        if kind == "r":
            sigma = (p["alpha1"],)
            beta, gamma = p["alpha2"], p["alpha3"]
        else:
            sigma, beta, gamma = p["sigma"], p["beta"], p["gamma"]
        d = len(sigma)
        ssum = demote(sum(sigma, Fraction(0)))

        def mom_grid(k: Index) -> Scalar:
            n = sum(k)
            den = pochhammer(demote(gamma - beta - ssum) - d - n, n)
            if den == 0:
                raise FamilyError(f"moment of order {k} hits a pole")
            out = pochhammer(demote(beta + 0) + 1, n) / den
            for i, ki in enumerate(k):
                out = out * pochhammer(sigma[i] + 1, ki)
            return demote(out)

        return mom_grid
    return None


def moment_pair(p1: Poly, p2: Poly, moments) -> Scalar:
    """<p1, p2> / <1, 1> through a falling-factorial moment functional."""
    dec = falling_decomp(p1 * p2)
    out: Scalar = Fraction(0)
    for k, coeff in dec.items():
        out = out + coeff * moments(k)
    return demote(out)


# -- operators ------------------------------------------------------------------


def _op_diff_for(kind: str, p: Mapping[str, object]) -> DiffForm:
    """The family's difference operator, in difference form."""
    if kind == "hahn":
        a1, b1, n_cap = p["alpha1"], p["beta1"], p["N"]
        x = Poly.variable(1, 0)
        a = ((x * (Poly.const(1, Fraction(n_cap) + b1 + 1) - x),),)
        b = ((a1 + 1) * n_cap - (a1 + b1 + 2) * x,)
        return DiffForm(1, a, b, Poly.zero(1))
    if kind == "r":
        return _op_grid_r((p["alpha1"],), p["alpha2"], p["alpha3"])
    if kind == "charlier":
        return to_diff_form(linear_operator([[Fraction(1)]], [p["s"]]))
    if kind == "krawtchouk":
        pv, n_cap = p["p"], p["N"]
        return to_diff_form(linear_operator([[1 - pv]], [pv * n_cap]))
    if kind == "meixner":
        beta, c = p["beta"], p["c"]
        lm = c / (1 - c)
        return to_diff_form(linear_operator([[lm + 1]], [lm * beta]))
    if kind == "grid-r":
        return _op_grid_r(p["sigma"], p["beta"], p["gamma"])
    if kind == "box-hahn":
        caps, beta, r = p["l"], p["beta"], p["r"]
        b = -beta - 1 - r
        return to_diff_form(
            quadratic_operator(b, r, [Fraction(c) for c in caps])
        )
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        return _op_simplex(p["sigma"], p["N"])
    if kind == "krawtchouk-d":
        pv, n_cap = p["p"], p["N"]
        d = len(pv)
        lmat = [[-pv[i] for _ in range(d)] for i in range(d)]
        for i in range(d):
            lmat[i][i] = 1 - pv[i]
        return to_diff_form(
            linear_operator(lmat, [pv[i] * n_cap for i in range(d)])
        )
    # meixner-d
    s, c = p["s"], p["c"]
    d = len(c)
    csum = sum(c, Fraction(0))
    lv = [c[i] / (1 - csum) for i in range(d)]
    lmat = [[lv[i] for _ in range(d)] for i in range(d)]
    for i in range(d):
        lmat[i][i] = lv[i] + 1
    return to_diff_form(linear_operator(lmat, [lv[i] * s for i in range(d)]))


def _op_grid_r(sigma, beta, gamma) -> DiffForm:
    d = len(sigma)
    ssum = demote(sum(sigma, Fraction(0)))
    x = [Poly.variable(d, i) for i in range(d)]
    a = []
    b = []
    for i in range(d):
        row = []
        for j in range(d):
            coef = x[i] + (sigma[i] + 1)
            if i == j:
                coef = coef + Poly.const(d, demote(gamma - ssum - d))
            row.append(-x[j] * coef)
        a.append(tuple(row))
        b.append(
            demote(gamma - beta - ssum - d - 1) * x[i]
            - Poly.const(d, demote((1 + beta) * (1 + sigma[i])))
        )
    return DiffForm(d, tuple(a), tuple(b), Poly.zero(d))


def _op_simplex(sigma, n_cap: int) -> DiffForm:
    d = len(sigma) - 1
    ssum = sum(sigma, Fraction(0))
    x = [Poly.variable(d, i) for i in range(d)]
    a = []
    b = []
    for i in range(d):
        row = []
        for j in range(d):
            if i == j:
                row.append(
                    x[i] * (Poly.const(d, Fraction(n_cap) + ssum - sigma[i] + d) - x[i])
                )
            else:
                row.append(-x[j] * (x[i] + (sigma[i] + 1)))
        a.append(tuple(row))
        b.append(
            (sigma[i] + 1) * (Poly.const(d, Fraction(n_cap)) - x[i])
            - (ssum - sigma[i] + d) * x[i]
        )
    return DiffForm(d, tuple(a), tuple(b), Poly.zero(d))


def _eig_law(kind: str, p: Mapping[str, object]) -> Tuple[Fraction, Fraction]:
    """(a, b) with eigenvalue law lambda_k = k((k-1) a + b)."""
    if kind == "hahn":
        return Fraction(-1), -(p["alpha1"] + p["beta1"] + 2)
    if kind == "r":
        a1, a2, a3 = p["alpha1"], p["alpha2"], p["alpha3"]
        return Fraction(-1), as_fraction(demote(a3 - a1 - a2 - 2))
    if kind == "grid-r":
        sigma, beta, gamma = p["sigma"], p["beta"], p["gamma"]
        d = len(sigma)
        return Fraction(-1), gamma - beta - sum(sigma, Fraction(0)) - d - 1
    if kind == "box-hahn":
        return Fraction(-1), -p["beta"] - p["r"] - 1
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        sigma = p["sigma"]
        d = len(sigma) - 1
        return Fraction(-1), -sum(sigma, Fraction(0)) - d - 1
    return Fraction(0), Fraction(-1)


def _mass_exact(kind: str, p: Mapping[str, object]) -> Optional[Fraction]:
    if kind == "hahn":
        return _norm_hahn_abs(p["alpha1"], p["beta1"], p["N"], 0)
    if kind == "krawtchouk":
        return Fraction(1)
    if kind == "box-hahn":
        d = len(p["l"])
        return _norm_box_abs(p["l"], p["beta"], p["r"], tuple([0] * d))
    if kind in ("simplex-hahn", "trunc-simplex-hahn"):
        d = len(p["sigma"]) - 1
        return _norm_simplex_abs(p["sigma"], p["N"], tuple([0] * d))
    if kind == "krawtchouk-d":
        return Fraction(1, math.factorial(p["N"]))
    return None


# -- assembled systems -----------------------------------------------------------


class OrthoSystem:
    """One family bound to its lattice, weight, operator, and norms."""

    def __init__(self, spec: FamilySpec):
        self.spec = spec
        p = spec.params
        kind = spec.kind
        self.lattice = _lattice_for(kind, p)
        self.diff = _op_diff_for(kind, p)
        self.shift = to_shift_form(self.diff, tag=kind)
        self.eig_a, self.eig_b = _eig_law(kind, p)
        self.moments = _moments_for(kind, p)
        self.mass_exact = _mass_exact(kind, p)

    @property
    def nvars(self) -> int:
        return self.spec.d

    @property
    def is_finite(self) -> bool:
        return self.spec.kind in FINITE_KINDS

    def eigenvalue(self, k: int) -> Fraction:
        return Fraction(k) * ((k - 1) * self.eig_a + self.eig_b)

    def weight(self, x: Sequence[int]) -> Scalar:
        return weight_closed(self.spec.kind, x, self.spec.params)

    def poly(self, nu) -> Poly:
        nu = _as_index(nu, self.nvars)
        if self.spec.kind in KINDS_1D:
            return poly_1d(self.spec.kind, nu[0], self.spec.params)
        return poly_multi(self.spec.kind, nu, self.spec.params)

    def norm_ratio(self, nu) -> Scalar:
        return norm_ratio(self.spec.kind, nu, self.spec.params)

    def norm_numeric(self, nu, rel_tol: float = 1e-12) -> Tuple[float, float]:
        return norm_numeric(self.spec.kind, nu, self.spec.params, rel_tol)

    def mass_numeric(self) -> float:
        return mass_numeric(self.spec.kind, self.spec.params)

    def indices(self, deg_max: int) -> List[Index]:
        """Admissible polynomial indices with |nu| <= deg_max, graded order."""
        return [tuple(v) for v in self.lattice.index_set_upto(deg_max)]

    def conv_limit(self) -> Optional[Fraction]:
        return _conv_limit(self.spec.kind, self.spec.params)

    def inner_ratio(self, u: Poly, v: Poly) -> Scalar:
        """<u, v> / <1, 1>, exact: a finite sum, or the moment functional."""
        if self.is_finite:
            mass = self.mass_exact
            acc: Scalar = Fraction(0)
            for x in self.lattice.points():
                acc = acc + self.weight(x) * u.eval(x) * v.eval(x)
            return demote(acc / mass)
        if self.moments is None:
            raise FamilyError(f"{self.spec.kind} has no exact inner product")
        limit = self.conv_limit()
        if limit is not None:
            du = u.degree()
            dv = v.degree()
            if du + dv >= limit:
                raise FamilyError(
                    f"inner product of degrees {du}+{dv} outside the "
                    f"convergence range (< {limit}) of {self.spec.kind}"
                )
        return moment_pair(u, v, self.moments)

    def self_check(self, window: Optional[Sequence[int]] = None) -> None:
        """Verify the operator fits the eigenvalue law and is self-adjoint.

        Raises FamilyError with the failing instance on any violation.
        """
        fit = fit_admissible_form(self.diff)
        if fit.problems or fit.a != self.eig_a or fit.b != self.eig_b:
            raise FamilyError(
                f"{self.spec.kind} operator does not fit the eigenvalue law: "
                f"{fit.problems or (fit.a, fit.b)}"
            )
        if window is None and self.lattice.max_total_degree() is None:
            window = [8] * self.nvars
        report = check_self_adjoint(self.shift, self.lattice, self.weight, window)
        if not report.ok:
            first = report.violations[0]
            raise FamilyError(
                f"{self.spec.kind} operator is not self-adjoint for its "
                f"weight: {first.to_obj() if hasattr(first, 'to_obj') else first}"
            )

    def to_obj(self) -> dict:
        return {
            "spec": self.spec.to_obj(),
            "lattice": self.lattice.to_obj(),
            "eigenvalue_law": {
                "a": fmt_scalar(self.eig_a),
                "b": fmt_scalar(self.eig_b),
            },
            "finite": self.is_finite,
        }


def build_system(
    spec: FamilySpec, checks: bool = True, window: Optional[Sequence[int]] = None
) -> OrthoSystem:
    """Assemble the full system for a spec and run its invariant checks."""
    system = OrthoSystem(spec)
    if checks:
        system.self_check(window)
    return system


# -- product systems --------------------------------------------------------------


def _embed_poly(p: Poly, nvars: int, coords: Sequence[int]) -> Poly:
    out = Poly.zero(nvars)
    for mono, coeff in p.terms.items():
        exps = [0] * nvars
        for local, e in enumerate(mono):
            exps[coords[local]] = e
        out = out + Poly.monomial(nvars, tuple(exps), coeff)
    return out


def _embed_diff(op: DiffForm, nvars: int, coords: Sequence[int]) -> DiffForm:
    zero = Poly.zero(nvars)
    a = [[zero for _ in range(nvars)] for _ in range(nvars)]
    b = [zero for _ in range(nvars)]
    for bi in range(op.nvars):
        for bj in range(op.nvars):
            a[coords[bi]][coords[bj]] = _embed_poly(op.a[bi][bj], nvars, coords)
        b[coords[bi]] = _embed_poly(op.b[bi], nvars, coords)
    c = _embed_poly(op.c, nvars, coords)
    return DiffForm(nvars, tuple(tuple(r) for r in a), tuple(b), c)


def _add_diff(lhs: DiffForm, rhs: DiffForm) -> DiffForm:
    a = tuple(
        tuple(lhs.a[i][j] + rhs.a[i][j] for j in range(lhs.nvars))
        for i in range(lhs.nvars)
    )
    b = tuple(lhs.b[i] + rhs.b[i] for i in range(lhs.nvars))
    return DiffForm(lhs.nvars, a, b, lhs.c + rhs.c)


class ProductSystem:
    """Products of linear-eigenvalue systems on disjoint variable blocks.

    The combined operator is the sum of the trivially extended block
    operators, polynomials are products of block polynomials, and the
    eigenvalue of a product of total degree k is -k.
    """

    def __init__(self, blocks: Sequence[Tuple[Tuple[int, ...], OrthoSystem]]):
        self.blocks = list(blocks)
        self.nvars = sum(len(coords) for coords, _ in self.blocks)
        diff = None
        for coords, system in self.blocks:
            embedded = _embed_diff(system.diff, self.nvars, coords)
            diff = embedded if diff is None else _add_diff(diff, embedded)
        self.diff = diff
        self.shift = to_shift_form(diff, tag="product")

    def eigenvalue(self, k: int) -> Fraction:
        return Fraction(-k)

    def poly(self, nu: Sequence[int]) -> Poly:
        nu = _as_index(nu, self.nvars)
        out = Poly.const(self.nvars, 1)
        for coords, system in self.blocks:
            block_nu = tuple(nu[c] for c in coords)
            out = out * _embed_poly(system.poly(block_nu), self.nvars, coords)
        return out

    def weight(self, x: Sequence[int]) -> Scalar:
        x = _as_index(x, self.nvars)
        out: Scalar = Fraction(1)
        for coords, system in self.blocks:
            out = out * system.weight(tuple(x[c] for c in coords))
        return demote(out)

    def to_obj(self) -> dict:
        return {
            "blocks": [
                {
                    "coords": [c + 1 for c in coords],
                    "spec": system.spec.to_obj(),
                }
                for coords, system in self.blocks
            ]
        }


def product_system(
    partition: Sequence[Sequence[int]],
    specs: Sequence[FamilySpec],
    checks: bool = True,
) -> ProductSystem:
    """Combine component systems on a disjoint partition of coordinates.

    Every component must have a linear eigenvalue law (a = 0); block sizes
    must match each spec's variable count; coordinates are 0-based,
    disjoint, and must cover 0..d-1.
    """
    if len(partition) != len(specs):
        raise FamilyError("partition and specs must have the same length")
    seen: set = set()
    blocks = []
    for coords, spec in zip(partition, specs):
        coords = tuple(int(c) for c in coords)
        if spec.kind not in LINEAR_KINDS:
            raise FamilyError(
                f"product components need a linear eigenvalue law; "
                f"{spec.kind} has a quadratic one"
            )
        if len(coords) != spec.d:
            raise FamilyError(
                f"block {coords} has {len(coords)} coordinates but "
                f"{spec.kind} uses {spec.d}"
            )
        if seen & set(coords):
            raise FamilyError(f"block {coords} overlaps an earlier block")
        seen |= set(coords)
        blocks.append((coords, build_system(spec, checks=checks)))
    total = sum(len(c) for c, _ in blocks)
    if seen != set(range(total)):
        raise FamilyError("blocks must cover the coordinates 0..d-1 exactly")
    return ProductSystem(blocks)


def product_type_enumeration(d: int) -> List[Tuple[str, List[str]]]:
    """All product types of linear-eigenvalue families in d variables.

    Blocks of size one contribute C (charlier), K (krawtchouk), or
    M (meixner); blocks of size m >= 2 contribute Km (several-variable
    krawtchouk, simplex support) or Mm (several-variable meixner, full
    grid).  Types are unordered multisets of block labels, grouped by their
    domain of orthogonality; the domain treats an Mm block as m copies of
    N_0 but keeps a Km block as one irreducible simplex factor.
    """
    label_domain = {"C": ("N0",), "K": ("V1",), "M": ("N0",)}

    def block_labels(size: int) -> List[str]:
        if size == 1:
            return ["C", "K", "M"]
        return [f"K{size}", f"M{size}"]

    def partitions(n: int, most: int) -> List[List[int]]:
        if n == 0:
            return [[]]
        out = []
        for first in range(min(n, most), 0, -1):
            for rest in partitions(n - first, first):
                out.append([first] + rest)
        return out

    def choose(labels: List[str], count: int) -> List[List[str]]:
        if count == 0:
            return [[]]
        out = []
        for i, lab in enumerate(labels):
            for rest in choose(labels[i:], count - 1):
                out.append([lab] + rest)
        return out

    types: List[Tuple[Tuple[str, ...], str]] = []
    for shape in partitions(d, d):
        if d > 1 and len(shape) < 2:
            # a single block is the family itself, not a product of
            # lower-dimensional ones
            continue
        sizes: Dict[int, int] = {}
        for size in shape:
            sizes[size] = sizes.get(size, 0) + 1
        combos: List[List[str]] = [[]]
        for size, count in sorted(sizes.items()):
            new = []
            for combo in combos:
                for extra in choose(block_labels(size), count):
                    new.append(combo + extra)
            combos = new
        for combo in combos:
            domain: List[str] = []
            for lab in combo:
                if lab in label_domain:
                    domain.extend(label_domain[lab])
                elif lab.startswith("M"):
                    domain.extend(["N0"] * int(lab[1:]))
                else:
                    domain.append(f"V{lab[1:]}")
            key = tuple(sorted(domain))
            types.append((key, "".join(sorted(combo))))

    def domain_rank(key: Tuple[str, ...]) -> Tuple[int, int, str]:
        # all-N0 first, then increasing simplex dimension, widest last
        weight = sum(0 if f == "N0" else int(f[1:]) for f in key)
        return (weight, -key.count("N0"), str(key))

    groups: Dict[Tuple[str, ...], List[str]] = {}
    for key, name in types:
        groups.setdefault(key, []).append(name)
    out = []
    for key in sorted(groups, key=domain_rank):
        names = sorted(set(groups[key]))
        out.append((" x ".join(key), names))
    return out


# the five d=2 weight/support cases of the quadratic eigenvalue law
QUADRATIC_CASES_D2: List[Tuple[str, str, str, str]] = [
    (
        "i",
        "grid-r",
        "N_0^2",
        "(sigma1+1)_{x1} (sigma2+1)_{x2} / (x1! x2!) "
        "* (beta+1)_{|x|} / (gamma+1)_{|x|}",
    ),
    (
        "ii",
        "box-hahn",
        "{0..l1} x {0..l2}",
        "(-l1)_{x1} (-l2)_{x2} / (x1! x2!) * (beta+1)_{|x|} / (1-|l|-r)_{|x|}",
    ),
    (
        "iii",
        "simplex-hahn",
        "{|x| <= N}",
        "(sigma1+1)_{x1} (sigma2+1)_{x2} / (x1! x2!) "
        "* (sigma3+1)_{N-|x|} / (N-|x|)!",
    ),
    (
        "iv",
        "trunc-simplex-hahn (S = {1,2})",
        "{|x| <= N, x1 <= l1, x2 <= l2}",
        "(-l1)_{x1} (-l2)_{x2} / (x1! x2!) * (sigma3+1)_{N-|x|} / (N-|x|)!",
    ),
    (
        "v",
        "trunc-simplex-hahn (S = {1})",
        "{|x| <= N, x1 <= l1}",
        "(-l1)_{x1} (sigma2+1)_{x2} / (x1! x2!) "
        "* (sigma3+1)_{N-|x|} / (N-|x|)!  (swap x1, x2 for S = {2})",
    ),
]


# -- limit relations ----------------------------------------------------------------


def _canon_relation(relation: str) -> str:
    name = _RELATION_ALIASES.get(relation, relation)
    if name not in LIMIT_RELATIONS:
        raise FamilyError(
            f"unknown limit relation {relation!r}; choose from {LIMIT_RELATIONS}"
        )
    return name


def limit_relation(
    relation: str, params: Mapping[str, object], t, index
) -> Poly:
    """The finite-t polynomial approximating a limit target family.

    hahn-to-krawtchouk: degree-n hahn polynomial with (alpha1, beta1) =
    (p t, (1-p) t) on {0..N}; coefficients converge to the krawtchouk
    polynomial as t grows.

    hahn-to-meixner: degree-n hahn polynomial with alpha1 = beta - 1,
    beta1 = t (1-c)/c on {0..t}; t runs over integers >= n.

    box-to-meixner-d: box polynomial with caps l_j = c_j t, beta = s - 1,
    r = (1 - |c|) t; t must make every cap a nonnegative integer >= nu_j.
    """
    name = _canon_relation(relation)
    t = _scalar(t, "t")
    if name == "hahn-to-krawtchouk":
        pv = _real(params["p"], "p")
        n_cap = _nonneg_int(params["N"], "N")
        n = _as_index(index, 1)[0]
        return poly_1d(
            "hahn",
            n,
            {"alpha1": pv * t, "beta1": (1 - pv) * t, "N": n_cap},
        )
    if name == "hahn-to-meixner":
        beta = _real(params["beta"], "beta")
        c = _real(params["c"], "c")
        n = _as_index(index, 1)[0]
        tf = as_fraction(t)
        if tf.denominator != 1 or tf < n:
            raise FamilyError("hahn-to-meixner needs an integer t >= n")
        return poly_1d(
            "hahn",
            n,
            {"alpha1": beta - 1, "beta1": tf * (1 - c) / c, "N": int(tf)},
        )
    # box-to-meixner-d
    s = _real(params["s"], "s")
    c = _real_tuple(params["c"], "c")
    nu = _as_index(index, len(c))
    caps = []
    for j, cj in enumerate(c):
        cap = cj * as_fraction(t)
        if cap.denominator != 1:
            raise FamilyError(
                f"cap c_{j + 1} t = {cap} is not an integer; pick t on the "
                "integer schedule"
            )
        if cap < nu[j]:
            raise FamilyError(f"cap c_{j + 1} t = {cap} is below nu_{j + 1}")
        caps.append(int(cap))
    r = (1 - sum(c, Fraction(0))) * as_fraction(t)
    return _poly_box(caps, s - 1, r, nu)


def limit_target(relation: str, params: Mapping[str, object], index) -> Poly:
    """The limiting polynomial of a limit relation, exactly."""
    name = _canon_relation(relation)
    if name == "hahn-to-krawtchouk":
        n = _as_index(index, 1)[0]
        return poly_1d(
            "krawtchouk", n, {"p": params["p"], "N": params["N"]}
        )
    if name == "hahn-to-meixner":
        n = _as_index(index, 1)[0]
        return poly_1d("meixner", n, {"beta": params["beta"], "c": params["c"]})
    c = _real_tuple(params["c"], "c")
    nu = _as_index(index, len(c))
    return poly_multi("meixner-d", nu, {"s": params["s"], "c": c})


# -- support for finite-box monomial reduction ----------------------------------


def reduce_box_monomials(p: Poly, caps: Mapping[int, int]) -> Poly:
    """Rewrite p modulo the products x_i (x_i - 1) ... (x_i - cap_i).

    Those products vanish at every point with 0 <= x_i <= cap_i, so the
    result agrees with p on the capped box while using no exponent above
    cap_i in a capped variable.
    """
    out = p
    for var, cap in sorted(caps.items()):
        gen = falling_poly(out.nvars, var, cap + 1)
        # x^(cap+1) reduced: x^(cap+1) - gen has degree <= cap in x_i
        top = Poly.monomial(out.nvars, _unit_exp(out.nvars, var, cap + 1), Fraction(1))
        rep = {cap + 1: top - gen}
        max_exp = max((m[var] for m in out.terms), default=0)
        for e in range(cap + 2, max_exp + 1):
            nxt = rep[e - 1] * Poly.variable(out.nvars, var)
            rep[e] = _substitute_power(nxt, var, cap, rep)
        reduced = Poly.zero(out.nvars)
        for mono, coeff in out.terms.items():
            term = Poly.monomial(
                out.nvars, _drop_exp(mono, var), coeff
            )
            e = mono[var]
            if e <= cap:
                term = term * Poly.monomial(
                    out.nvars, _unit_exp(out.nvars, var, e), Fraction(1)
                )
            else:
                term = term * rep[e]
            reduced = reduced + term
        out = reduced
    return out


def _unit_exp(nvars: int, var: int, e: int) -> Tuple[int, ...]:
    exps = [0] * nvars
    exps[var] = e
    return tuple(exps)


def _drop_exp(mono: Tuple[int, ...], var: int) -> Tuple[int, ...]:
    exps = list(mono)
    exps[var] = 0
    return tuple(exps)


def _substitute_power(p: Poly, var: int, cap: int, rep) -> Poly:
    out = Poly.zero(p.nvars)
    for mono, coeff in p.terms.items():
        e = mono[var]
        if e <= cap:
            out = out + Poly.monomial(p.nvars, mono, coeff)
        else:
            rest = Poly.monomial(p.nvars, _drop_exp(mono, var), coeff)
            out = out + rest * rep[e]
    return out
