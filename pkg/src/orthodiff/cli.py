"""Command-line surface for building, classifying, and verifying families.

Subcommands: list, poly, gram, verify, classify, weights, limits.  All
rational parameters are written as exact "p/q" strings (decimals are
rejected: exactness is the product).  Output is pretty JSON on stdout by
default; --output writes to a file; --format csv is available for matrices
and weight tables.  Exit codes: 0 when everything passed, 1 when at least
one verification failed, 2 on invalid input.  Identical invocations
produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .classify import (
    ClassifyError,
    WeightlessOperatorError,
    quadratic_operator,
    linear_operator,
    resolve_quadratic_case,
    split_linear_blocks,
    weight_from_operator,
)
from .families import (
    ALL_KINDS,
    FamilyError,
    FamilySpec,
    KIND_INFO,
    KINDS_1D,
    LIMIT_RELATIONS,
    QUADRATIC_CASES_D2,
    build_system,
    product_type_enumeration,
    weight_closed,
)
from .lattice import Box, FullGrid, Simplex, TruncatedSimplex
from .operators import check_compatibility, operator_from_obj, to_shift_form
from .rationals import as_fraction, fmt_scalar, parse_scalar
from .verify import (
    DEFAULT_WINDOW_CAP,
    VerifyError,
    adjoint_symmetry_check,
    eigencheck,
    gram,
    limitcheck,
    normcheck,
    rankcheck,
    three_term_check,
)


class CliError(ValueError):
    """Invalid command-line input (exit code 2)."""


# -- argument coercion -----------------------------------------------------------


def _scalar_arg(text: str, name: str):
    try:
        return parse_scalar(text)
    except ValueError as exc:
        raise CliError(f"--{name}: {exc}") from exc


def _scalar_list(text: str, name: str) -> List:
    return [_scalar_arg(tok, name) for tok in text.split(",") if tok.strip()]


def _int_arg(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise CliError(f"--{name}: expected an integer, got {text!r}") from exc


def _int_list(text: str, name: str) -> List[int]:
    return [_int_arg(tok, name) for tok in text.split(",") if tok.strip()]


# positional --params order for the one-variable kinds
_PARAM_ORDER: Dict[str, Tuple[str, ...]] = {
    "hahn": ("alpha1", "beta1", "N"),
    "r": ("alpha1", "alpha2", "alpha3"),
    "charlier": ("s",),
    "krawtchouk": ("p", "N"),
    "meixner": ("beta", "c"),
}

_INT_PARAMS = {"N"}


def spec_from_args(args) -> FamilySpec:
    """Build a FamilySpec from the command-line flags."""
    kind = args.family
    if kind is None:
        raise CliError("--family is required")
    if kind not in ALL_KINDS:
        raise CliError(f"unknown family {kind!r}; see the `list` subcommand")
    params: Dict[str, object] = {}
    if getattr(args, "params", None):
        if kind not in _PARAM_ORDER:
            raise CliError(
                f"--params is positional shorthand for the one-variable kinds "
                f"{sorted(_PARAM_ORDER)}; use named flags for {kind}"
            )
        order = _PARAM_ORDER[kind]
        toks = [t for t in args.params.split(",") if t.strip()]
        if len(toks) != len(order):
            raise CliError(
                f"{kind} takes {len(order)} parameters ({', '.join(order)}), "
                f"got {len(toks)}"
            )
        for name, tok in zip(order, toks):
            if name in _INT_PARAMS:
                params[name] = _int_arg(tok, "params")
            else:
                params[name] = _scalar_arg(tok, "params")
    else:
        if kind == "hahn":
            raise CliError("hahn needs --params alpha1,beta1,N")
        if kind == "r":
            raise CliError("r needs --params alpha1,alpha2,alpha3")
        if kind == "charlier":
            if args.s is None:
                raise CliError("charlier needs --s (or --params s)")
            params["s"] = _scalar_arg(args.s, "s")
        elif kind == "krawtchouk":
            if args.p is None or args.N is None:
                raise CliError("krawtchouk needs --p and --N")
            params["p"] = _scalar_arg(args.p, "p")
            params["N"] = args.N
        elif kind == "meixner":
            if args.beta is None or args.c is None:
                raise CliError("meixner needs --beta and --c")
            params["beta"] = _scalar_arg(args.beta, "beta")
            params["c"] = _scalar_arg(args.c, "c")
        elif kind == "simplex-hahn":
            if args.sigma is None or args.N is None:
                raise CliError("simplex-hahn needs --sigma (d+1 values) and --N")
            params["sigma"] = _scalar_list(args.sigma, "sigma")
            params["N"] = args.N
            if args.d is not None and args.d + 1 != len(params["sigma"]):
                raise CliError(
                    f"--d {args.d} needs {args.d + 1} sigma values, "
                    f"got {len(params['sigma'])}"
                )
        elif kind == "trunc-simplex-hahn":
            if args.N is None or args.S is None or args.l is None:
                raise CliError(
                    "trunc-simplex-hahn needs --N, --S (capped coordinates, "
                    "1-based) and --l (their caps); --sigma is optional"
                )
            params["N"] = args.N
            coords = _int_list(args.S, "S")
            caps = _int_list(args.l, "l")
            params["S"] = coords
            params["l"] = caps
            if args.sigma is not None:
                params["sigma"] = _scalar_list(args.sigma, "sigma")
            elif args.d is not None:
                if coords and args.d < max(coords):
                    raise CliError(f"--d {args.d} is below the largest capped coordinate")
                sigma = [Fraction(0)] * (args.d + 1)
                for i, cap in zip(coords, caps):
                    sigma[i - 1] = Fraction(-cap - 1)
                params["sigma"] = sigma
        elif kind == "box-hahn":
            if args.l is None or args.beta is None or args.r is None:
                raise CliError("box-hahn needs --l (integer caps), --beta and --r")
            params["l"] = _int_list(args.l, "l")
            params["beta"] = _scalar_arg(args.beta, "beta")
            params["r"] = _scalar_arg(args.r, "r")
        elif kind == "grid-r":
            if args.sigma is None or args.beta is None or args.gamma is None:
                raise CliError("grid-r needs --sigma (d values), --beta and --gamma")
            params["sigma"] = _scalar_list(args.sigma, "sigma")
            params["beta"] = _scalar_arg(args.beta, "beta")
            params["gamma"] = _scalar_arg(args.gamma, "gamma")
        elif kind == "krawtchouk-d":
            if args.p is None or args.N is None:
                raise CliError("krawtchouk-d needs --p (d values) and --N")
            params["p"] = _scalar_list(args.p, "p")
            params["N"] = args.N
        elif kind == "meixner-d":
            if args.s is None or args.c is None:
                raise CliError("meixner-d needs --s and --c (d values)")
            params["s"] = _scalar_arg(args.s, "s")
            params["c"] = _scalar_list(args.c, "c")
        else:
            raise CliError(f"no flag mapping for {kind}")
    try:
        return FamilySpec(kind, unchecked=bool(args.unchecked), **params)
    except FamilyError as exc:
        raise CliError(str(exc)) from exc


def _index_from_args(args, nvars: int) -> Tuple[int, ...]:
    if getattr(args, "nu", None) is not None:
        nu = tuple(_int_list(args.nu, "nu"))
        if len(nu) != nvars:
            raise CliError(f"--nu has {len(nu)} entries for {nvars} variables")
        if any(v < 0 for v in nu):
            raise CliError("--nu entries must be nonnegative")
        return nu
    if getattr(args, "n", None) is not None:
        if nvars != 1:
            raise CliError("--n is for one-variable families; use --nu")
        if args.n < 0:
            raise CliError("--n must be nonnegative")
        return (args.n,)
    raise CliError("an index is required: --n for one variable, --nu otherwise")


def _window_from_args(args, nvars: int) -> Optional[List[int]]:
    if getattr(args, "window", None) is None:
        return None
    caps = _int_list(args.window, "window")
    if len(caps) == 1 and nvars > 1:
        caps = caps * nvars
    if len(caps) != nvars:
        raise CliError(f"--window has {len(caps)} bounds for {nvars} variables")
    if any(v < 0 for v in caps):
        raise CliError("--window bounds must be nonnegative")
    return caps


# -- output plumbing -----------------------------------------------------------


def _emit(args, obj: object, csv_text: Optional[str] = None) -> None:
    fmt = getattr(args, "format", "json") or "json"
    if fmt == "csv":
        if csv_text is None:
            raise CliError("this subcommand has no CSV form; use --format json")
        payload = csv_text
    elif fmt == "json":
        payload = json.dumps(obj, indent=2) + "\n"
    else:
        raise CliError(f"unknown format {fmt!r}")
    out = getattr(args, "output", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


# -- subcommands -----------------------------------------------------------


def cmd_list(args) -> int:
    if getattr(args, "quadratic", False) and getattr(args, "products", False):
        raise CliError("--quadratic and --products are mutually exclusive")
    if getattr(args, "quadratic", False):
        if args.d not in (None, 2):
            raise CliError("the quadratic case catalogue is tabulated for --d 2")
        cases = [
            {"case": label, "family": fam, "support": supp, "weight": weight}
            for label, fam, supp, weight in QUADRATIC_CASES_D2
        ]
        _emit(args, {"d": 2, "count": len(cases), "cases": cases})
        return 0
    if getattr(args, "products", False):
        if not getattr(args, "linear", False):
            raise CliError("--products enumerates linear-eigenvalue products; add --linear")
        d = args.d if args.d is not None else 3
        groups = product_type_enumeration(d)
        total = sum(len(types) for _, types in groups)
        _emit(
            args,
            {
                "d": d,
                "types": total,
                "groups": [
                    {"domain": dom, "types": types} for dom, types in groups
                ],
            },
        )
        return 0
    kinds = [
        {
            "kind": k,
            "parameters": KIND_INFO[k][0],
            "support_and_validity": KIND_INFO[k][1],
        }
        for k in ALL_KINDS
    ]
    _emit(
        args,
        {
            "count": len(kinds),
            "kinds": kinds,
            "limit_relations": list(LIMIT_RELATIONS),
        },
    )
    return 0


def cmd_poly(args) -> int:
    spec = spec_from_args(args)
    system = build_system(spec, checks=False)
    out: Dict[str, object] = {"family": spec.to_obj()}
    if getattr(args, "n", None) is None and getattr(args, "nu", None) is None:
        deg = args.deg if args.deg is not None else 2
        if deg < 0:
            raise CliError("--deg must be nonnegative")
        items = []
        for nu in system.indices(deg):
            p = system.poly(nu)
            items.append(
                {"nu": list(nu), "pretty": str(p), "terms": p.to_obj()["terms"]}
            )
        out["polynomials"] = items
    else:
        nu = _index_from_args(args, system.nvars)
        p = system.poly(nu)
        out["nu"] = list(nu)
        out["pretty"] = str(p)
        out["terms"] = p.to_obj()["terms"]
    _emit(args, out)
    return 0


def cmd_gram(args) -> int:
    spec = spec_from_args(args)
    system = build_system(spec, checks=False)
    deg = args.deg if args.deg is not None else 2
    if deg < 0:
        raise CliError("--deg must be nonnegative")
    window = _window_from_args(args, system.nvars)
    report = gram(system, deg, window)
    _emit(args, {"family": spec.to_obj(), **report.to_obj()}, report.to_csv())
    return 0


_FAMILY_CHECKS = (
    "gram",
    "eigen",
    "norm",
    "rank",
    "self-adjoint",
    "adjoint-symmetry",
    "compatibility",
    "three-term",
)


def _run_family_checks(args, spec: FamilySpec) -> Tuple[List[dict], bool]:
    system = build_system(spec, checks=False)
    deg = args.deg if args.deg is not None else 3
    if deg < 0:
        raise CliError("--deg must be nonnegative")
    window = _window_from_args(args, system.nvars)
    tol = args.tol if args.tol is not None else 1e-8
    if tol <= 0:
        raise CliError("--tol must be positive")
    if args.checks:
        wanted = [c.strip() for c in args.checks.split(",") if c.strip()]
        for c in wanted:
            if c not in _FAMILY_CHECKS:
                raise CliError(
                    f"unknown check {c!r}; choose from {', '.join(_FAMILY_CHECKS)}"
                )
    else:
        wanted = ["gram", "eigen", "norm", "self-adjoint", "adjoint-symmetry"]
        if system.is_finite:
            wanted.append("rank")
    reports: List[dict] = []
    all_ok = True

    def add(obj: dict, ok: bool):
        nonlocal all_ok
        reports.append(obj)
        all_ok = all_ok and ok

    for check in wanted:
        if check == "gram":
            g = gram(system, deg, window)
            ok = g.is_orthogonal()
            add(
                {
                    "check": "gram-orthogonality",
                    "status": "pass" if ok else "fail",
                    "report": g.to_obj(),
                },
                ok,
            )
        elif check == "eigen":
            rep = eigencheck(system, deg, mode="symbolic")
            add(rep.to_obj(), rep.ok)
        elif check == "norm":
            rep = normcheck(system, deg, window, tol)
            add(rep.to_obj(), rep.ok)
        elif check == "rank":
            if not system.is_finite:
                raise CliError("rank check needs a finite support")
            rep = rankcheck(system.shift, system.lattice, deg)
            add(rep.to_obj(), rep.ok)
        elif check == "self-adjoint":
            from .operators import check_self_adjoint

            win = window
            if win is None and not system.is_finite:
                win = [DEFAULT_WINDOW_CAP] * system.nvars
            sa = check_self_adjoint(system.shift, system.lattice, system.weight, win)
            add(
                {
                    "check": "self-adjoint",
                    "status": "pass" if sa.ok else "fail",
                    "checked": sa.checked,
                    "violations": [v.to_obj() for v in sa.violations],
                },
                sa.ok,
            )
        elif check == "adjoint-symmetry":
            rep = adjoint_symmetry_check(
                system, pairs=20, deg_max=min(deg, 3), seed=args.seed
            )
            add(rep.to_obj(), rep.ok)
        elif check == "compatibility":
            rep = check_compatibility(system.shift)
            add(
                {
                    "check": "compatibility",
                    "status": "pass" if rep.ok else "fail",
                    "checked": rep.checked,
                    "violations": [v.to_obj() for v in rep.violations],
                },
                rep.ok,
            )
        elif check == "three-term":
            if spec.kind != "r":
                raise CliError("the three-term check applies to the r family")
            p = spec.params
            rep = three_term_check(p["alpha1"], p["alpha2"], p["alpha3"], deg)
            add(rep.to_obj(), rep.ok)
    return reports, all_ok


def _load_json_arg(text: str, name: str) -> dict:
    if os.path.exists(text):
        with open(text, "r", encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = text
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"--{name}: not valid JSON and not a readable file: {exc}") from exc
    if not isinstance(obj, dict):
        raise CliError(f"--{name}: expected a JSON object")
    return obj


def _lattice_from_args(args, nvars: int):
    shape = getattr(args, "lattice", None)
    if shape is None:
        return FullGrid(nvars)
    if shape == "grid":
        return FullGrid(nvars)
    if shape == "simplex":
        if args.N is None:
            raise CliError("--lattice simplex needs --N")
        return Simplex(nvars, args.N)
    if shape == "box":
        if args.l is None:
            raise CliError("--lattice box needs --l")
        caps = _int_list(args.l, "l")
        if len(caps) != nvars:
            raise CliError(f"--l has {len(caps)} caps for {nvars} variables")
        return Box(caps)
    if shape == "trunc-simplex":
        if args.N is None or args.S is None or args.l is None:
            raise CliError("--lattice trunc-simplex needs --N, --S and --l")
        coords = _int_list(args.S, "S")
        caps = _int_list(args.l, "l")
        if len(coords) != len(caps):
            raise CliError("--S and --l must have the same length")
        return TruncatedSimplex(
            nvars, args.N, {i - 1: v for i, v in zip(coords, caps)}
        )
    raise CliError(f"unknown lattice shape {shape!r}")


def cmd_verify(args) -> int:
    if getattr(args, "operator", None):
        obj = _load_json_arg(args.operator, "operator")
        try:
            op = operator_from_obj(obj)
        except (KeyError, ValueError, TypeError) as exc:
            raise CliError(f"bad operator object: {exc}") from exc
        shift = op if hasattr(op, "alpha") else to_shift_form(op)
        wanted = ["compatibility"]
        if args.checks:
            wanted = [c.strip() for c in args.checks.split(",") if c.strip()]
        reports: List[dict] = []
        all_ok = True
        for check in wanted:
            if check == "compatibility":
                rep = check_compatibility(shift)
                reports.append(
                    {
                        "check": "compatibility",
                        "status": "pass" if rep.ok else "fail",
                        "checked": rep.checked,
                        "violations": [v.to_obj() for v in rep.violations],
                    }
                )
                all_ok = all_ok and rep.ok
            elif check == "self-adjoint":
                lat = _lattice_from_args(args, shift.nvars)
                window = _window_from_args(args, shift.nvars)
                if not lat.is_finite and window is None:
                    window = [DEFAULT_WINDOW_CAP] * shift.nvars
                try:
                    table = weight_from_operator(shift, lat, window)
                except (WeightlessOperatorError, ValueError) as exc:
                    reports.append(
                        {
                            "check": "self-adjoint",
                            "status": "fail",
                            "violations": [{"rule": "weight-recovery", "residual": str(exc)}],
                        }
                    )
                    all_ok = False
                    continue
                from .operators import check_self_adjoint

                rep2 = check_self_adjoint(
                    shift, lat, lambda x: table.values[x], window=window
                )
                reports.append(
                    {
                        "check": "self-adjoint",
                        "status": "pass" if rep2.ok else "fail",
                        "checked": rep2.checked,
                        "violations": [v.to_obj() for v in rep2.violations],
                    }
                )
                all_ok = all_ok and rep2.ok
            else:
                raise CliError(
                    f"operator input supports the checks compatibility and "
                    f"self-adjoint, not {check!r}"
                )
        _emit(
            args,
            {
                "operator": "inline" if not os.path.exists(args.operator) else args.operator,
                "status": "pass" if all_ok else "fail",
                "checks": reports,
            },
        )
        return 0 if all_ok else 1
    spec = spec_from_args(args)
    reports, all_ok = _run_family_checks(args, spec)
    _emit(
        args,
        {
            "family": spec.to_obj(),
            "status": "pass" if all_ok else "fail",
            "checks": reports,
        },
    )
    return 0 if all_ok else 1


_CASE_KIND_NAMES = {
    "simplex_hahn": "simplex-hahn",
    "box_hahn": "box-hahn",
    "grid_hahn": "grid-r",
    "truncated_simplex_hahn": "trunc-simplex-hahn",
    "krawtchouk_multi": "krawtchouk-d",
    "meixner_multi": "meixner-d",
    "charlier": "charlier",
    "krawtchouk": "krawtchouk",
    "meixner": "meixner",
}


def _spec_for_resolution(kind: str, params: dict) -> FamilySpec:
    public = _CASE_KIND_NAMES[kind]
    kw = dict(params)
    if kind == "box_hahn":
        kw = {"l": kw["caps"], "beta": kw["beta"], "r": kw["r"]}
    return FamilySpec(public, unchecked=True, **kw)


def cmd_classify(args) -> int:
    if getattr(args, "input", None):
        obj = _load_json_arg(args.input, "input")
        case = obj.get("case")
        b = obj.get("b")
        r = obj.get("r")
        l = obj.get("l")
        s = obj.get("s")
    else:
        case = args.case
        b, r, l, s = args.b, args.r, args.l, args.s
        if case is None:
            raise CliError("classify needs --case (quadratic-1, quadratic-2, linear) or --input")

    def _sc(v, name):
        if isinstance(v, str):
            return _scalar_arg(v, name)
        if isinstance(v, (int, Fraction)):
            return Fraction(v)
        raise CliError(f"--{name}: expected an exact rational, got {v!r}")

    def _sc_list(v, name):
        if isinstance(v, str):
            return _scalar_list(v, name)
        if isinstance(v, list):
            return [_sc(t, name) for t in v]
        raise CliError(f"--{name}: expected a list")

    if case == "quadratic-1":
        if b is None or r is None or l is None:
            raise CliError("quadratic-1 needs --b, --r and --l (d values)")
        bq = _sc(b, "b")
        rq = _sc(r, "r")
        caps = _sc_list(l, "l")
        try:
            res = resolve_quadratic_case(bq, rq, caps)
        except ClassifyError as exc:
            raise CliError(str(exc)) from exc
        op = quadratic_operator(bq, rq, caps, variant=1)
        compat = check_compatibility(op)
        spec = _spec_for_resolution(res.kind, res.params)
        _emit(
            args,
            {
                "case": "quadratic-1",
                "family": _CASE_KIND_NAMES[res.kind],
                "lattice": res.lattice.to_obj(),
                "params": spec.to_obj()["params"],
                "validity": {
                    "branch": spec.branch,
                    "problems": spec.problems,
                },
                "compatibility": "pass" if compat.ok else "fail",
                "notes": res.notes,
            },
        )
        return 0
    if case == "quadratic-2":
        if r is None or l is None:
            raise CliError("quadratic-2 needs --r (d values) and --l (d values)")
        rvec = _sc_list(r, "r")
        caps = _sc_list(l, "l")
        lsum = sum(caps, Fraction(0))
        try:
            op = quadratic_operator(lsum - 1, rvec, caps, variant=2)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        compat = check_compatibility(op)
        _emit(
            args,
            {
                "case": "quadratic-2",
                "family": None,
                "compatibility": "pass" if compat.ok else "fail",
                "weight": "none: the identities hold but the telescoped "
                "ratios give no finite-mass weight",
            },
        )
        return 0
    if case == "linear":
        if l is None or s is None:
            raise CliError("linear needs --l (vector or matrix) and --s")
        if isinstance(l, list) and l and isinstance(l[0], list):
            lm = [[_sc(v, "l") for v in row] for row in l]
            if isinstance(s, list):
                sv = [_sc(v, "s") for v in s]
            else:
                raise CliError("matrix --l needs a vector --s of the same length")
        else:
            lvec = _sc_list(l, "l")
            sc = _sc(s, "s") if not isinstance(s, list) else None
            if sc is None:
                raise CliError("vector --l takes a scalar --s")
            d = len(lvec)
            lm = [
                [lvec[u] + 1 if u == v else lvec[u] for v in range(d)]
                for u in range(d)
            ]
            sv = [lvec[u] * sc for u in range(d)]
        if len(sv) != len(lm):
            raise CliError("--l and --s dimensions do not match")
        try:
            blocks = split_linear_blocks(lm, sv)
        except ClassifyError as exc:
            raise CliError(str(exc)) from exc
        out_blocks = []
        for blk in blocks:
            public = _CASE_KIND_NAMES[blk.kind]
            kw = {
                k: (
                    [fmt_scalar(v) for v in val]
                    if isinstance(val, list)
                    else (val if isinstance(val, int) else fmt_scalar(val))
                )
                for k, val in blk.params.items()
            }
            out_blocks.append(
                {
                    "coords": [c + 1 for c in blk.coords],
                    "family": public,
                    "params": kw,
                }
            )
        op = linear_operator(lm, sv)
        compat = check_compatibility(op)
        result: Dict[str, object] = {
            "case": "linear",
            "blocks": out_blocks,
            "compatibility": "pass" if compat.ok else "fail",
        }
        if len(out_blocks) == 1 and len(out_blocks[0]["coords"]) == len(sv):
            result["family"] = out_blocks[0]["family"]
            result["params"] = out_blocks[0]["params"]
        _emit(args, result)
        return 0
    raise CliError(f"unknown case {case!r}; choose quadratic-1, quadratic-2 or linear")


def cmd_weights(args) -> int:
    if getattr(args, "operator", None):
        obj = _load_json_arg(args.operator, "operator")
        try:
            op = operator_from_obj(obj)
        except (KeyError, ValueError, TypeError) as exc:
            raise CliError(f"bad operator object: {exc}") from exc
        shift = op if hasattr(op, "alpha") else to_shift_form(op)
        lat = _lattice_from_args(args, shift.nvars)
        window = _window_from_args(args, shift.nvars)
        if not lat.is_finite and window is None:
            window = [DEFAULT_WINDOW_CAP] * shift.nvars
        try:
            table = weight_from_operator(shift, lat, window)
        except WeightlessOperatorError as exc:
            _emit(args, {"status": "fail", "error": str(exc)})
            return 1
        except ValueError as exc:
            if "path dependent" in str(exc):
                _emit(args, {"status": "fail", "error": str(exc)})
                return 1
            raise CliError(str(exc)) from exc
        rows = ["x,weight"] + [
            f"{'|'.join(map(str, k))},{fmt_scalar(v)}"
            for k, v in sorted(table.values.items())
        ]
        _emit(args, {"status": "pass", **table.to_obj()}, "\n".join(rows) + "\n")
        return 0
    spec = spec_from_args(args)
    system = build_system(spec, checks=False)
    if system.is_finite:
        pts = list(system.lattice.points())
        window = None
    else:
        window = _window_from_args(args, system.nvars)
        if window is None:
            window = [DEFAULT_WINDOW_CAP] * system.nvars
        pts = list(FullGrid(system.nvars).window_points(window))
    values = [(x, system.weight(x)) for x in pts]
    signs = {1 if as_fraction(v) > 0 else (0 if v == 0 else -1) for _, v in values}
    sign = "positive" if signs <= {1} else ("nonnegative" if signs <= {0, 1} else "mixed")
    obj = {
        "family": spec.to_obj(),
        "support": system.lattice.to_obj(),
        "window": list(window) if window else None,
        "sign": sign,
        "values": {",".join(map(str, x)): fmt_scalar(v) for x, v in values},
    }
    rows = ["x,weight"] + [
        f"{'|'.join(map(str, x))},{fmt_scalar(v)}" for x, v in values
    ]
    _emit(args, obj, "\n".join(rows) + "\n")
    return 0


def cmd_limits(args) -> int:
    relation = getattr(args, "relation", None)
    if relation is None:
        raise CliError(f"--relation is required; choose from {', '.join(LIMIT_RELATIONS)}")
    params: Dict[str, object] = {}
    if args.p is not None:
        vals = _scalar_list(args.p, "p")
        params["p"] = vals[0] if len(vals) == 1 else vals
    if args.N is not None:
        params["N"] = args.N
    if args.beta is not None:
        params["beta"] = _scalar_arg(args.beta, "beta")
    if args.c is not None:
        vals = _scalar_list(args.c, "c")
        params["c"] = vals[0] if len(vals) == 1 else vals
    if args.s is not None:
        params["s"] = _scalar_arg(args.s, "s")
    if getattr(args, "nu", None) is not None:
        index: object = tuple(_int_list(args.nu, "nu"))
    elif getattr(args, "n", None) is not None:
        index = args.n
    else:
        raise CliError("an index is required: --n or --nu")
    if not getattr(args, "schedule", None):
        raise CliError("--schedule is required (comma-separated growing t values)")
    schedule = [_scalar_arg(tok, "schedule") for tok in args.schedule.split(",")]
    tol = args.tol if args.tol is not None else 1e-3
    if tol <= 0:
        raise CliError("--tol must be positive")
    try:
        rep = limitcheck(relation, params, index, schedule, tol)
    except (FamilyError, VerifyError) as exc:
        raise CliError(str(exc)) from exc
    _emit(args, rep.to_obj())
    return 0 if rep.ok else 1


# -- parser -----------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--family", help="family kind (see `list`)")
    shared.add_argument("--params", help="comma-separated parameters for one-variable kinds")
    shared.add_argument("--d", type=int, help="number of variables")
    shared.add_argument("--sigma", help="comma-separated sigma parameters")
    shared.add_argument("--N", type=int, help="size parameter")
    shared.add_argument("--l", help="comma-separated caps / row constants")
    shared.add_argument("--S", help="comma-separated capped coordinates (1-based)")
    shared.add_argument("--p", help="success probability (or comma-separated list)")
    shared.add_argument("--c", help="rate parameter (or comma-separated list)")
    shared.add_argument("--s", help="shape/rate parameter")
    shared.add_argument("--beta", help="beta parameter")
    shared.add_argument("--gamma", help="gamma parameter")
    shared.add_argument("--r", help="r parameter (or comma-separated list)")
    shared.add_argument("--b", help="b parameter")
    shared.add_argument("--nu", help="comma-separated multi-index")
    shared.add_argument("--n", type=int, help="degree index for one-variable families")
    shared.add_argument("--deg", type=int, help="total-degree bound")
    shared.add_argument("--window", help="comma-separated truncation caps per variable")
    shared.add_argument("--tol", type=float, help="numeric tolerance")
    shared.add_argument("--output", help="write output to this file instead of stdout")
    shared.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    shared.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    shared.add_argument(
        "--unchecked",
        action="store_true",
        help="skip parameter validity checks (expert use)",
    )

    parser = argparse.ArgumentParser(
        prog="orthodiff",
        description=(
            "Exact discrete orthogonal polynomial families, their difference "
            "operators, and verification reports."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_list = sub.add_parser("list", parents=[shared], help="list kinds, cases, product types")
    p_list.add_argument("--linear", action="store_true", help="linear-eigenvalue catalogue")
    p_list.add_argument("--products", action="store_true", help="enumerate product types")
    p_list.add_argument("--quadratic", action="store_true", help="quadratic case catalogue")
    p_list.set_defaults(func=cmd_list)

    p_poly = sub.add_parser("poly", parents=[shared], help="emit exact polynomials")
    p_poly.set_defaults(func=cmd_poly)

    p_gram = sub.add_parser("gram", parents=[shared], help="Gram matrix (exact or truncated)")
    p_gram.set_defaults(func=cmd_gram)

    p_verify = sub.add_parser("verify", parents=[shared], help="run verification checks")
    p_verify.add_argument("--checks", help="comma-separated subset of checks")
    p_verify.add_argument("--operator", help="operator JSON (inline or file path)")
    p_verify.add_argument(
        "--lattice",
        choices=("grid", "simplex", "box", "trunc-simplex"),
        help="support lattice for operator checks",
    )
    p_verify.set_defaults(func=cmd_verify)

    p_classify = sub.add_parser("classify", parents=[shared], help="resolve operator cases")
    p_classify.add_argument(
        "--case", choices=("quadratic-1", "quadratic-2", "linear"), help="which coefficient case"
    )
    p_classify.add_argument("--input", help="JSON input (inline or file path)")
    p_classify.set_defaults(func=cmd_classify)

    p_weights = sub.add_parser("weights", parents=[shared], help="weight tables")
    p_weights.add_argument("--operator", help="operator JSON (inline or file path)")
    p_weights.add_argument(
        "--lattice",
        choices=("grid", "simplex", "box", "trunc-simplex"),
        help="support lattice for operator weights",
    )
    p_weights.set_defaults(func=cmd_weights)

    p_limits = sub.add_parser("limits", parents=[shared], help="limit-relation convergence")
    p_limits.add_argument("--relation", help="which limit relation")
    p_limits.add_argument("--schedule", help="comma-separated growing parameter values")
    p_limits.set_defaults(func=cmd_limits)

    return parser


_VALUE_FLAGS = {
    "--params", "--d", "--sigma", "--N", "--l", "--S", "--p", "--c", "--s",
    "--beta", "--gamma", "--r", "--b", "--nu", "--n", "--deg", "--window",
    "--tol", "--seed", "--schedule",
}


def _merge_negative_values(argv: List[str]) -> List[str]:
    """Join value flags with following negative-number arguments.

    argparse treats a bare "-3/2" as an option; "--r -3/2" therefore needs
    to become "--r=-3/2" before parsing so exact negative rationals work
    without forcing the = spelling on callers.
    """
    out: List[str] = []
    skip = False
    for pos, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[pos + 1] if pos + 1 < len(argv) else None
        if (
            tok in _VALUE_FLAGS
            and nxt is not None
            and len(nxt) >= 2
            and nxt[0] == "-"
            and nxt[1].isdigit()
        ):
            out.append(f"{tok}={nxt}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_negative_values(list(argv)))
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (FamilyError, ClassifyError, VerifyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, KeyError, TypeError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
