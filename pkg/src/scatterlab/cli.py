"""Command-line front end: ``scatterlab <group> <command> [options]``."""

from __future__ import annotations

import argparse
import json
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GuardError, ScatterlabError, ValidationError, VerificationError, check_guard

EXIT_VALIDATION, EXIT_GUARD, EXIT_VERIFICATION = 2, 3, 4


def parse_range(text: str) -> list[int]:
    """``8..13`` (inclusive), ``8,10,12`` or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError(f"bad range {text!r}; use a..b or a,b,c") from None


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        x = int(x)
        # exact integers that do not fit a double go out as strings
        return x if abs(x) < 2**53 else str(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x if x is None or isinstance(x, str) else str(x)


def versions() -> dict:
    return {"scatterlab": __version__, "python": platform.python_version(), "numpy": np.__version__}


def _config(args) -> dict:
    skip = {"func", "out", "command_name", "group", "cmd"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def emit(result, args, fmt: str = "json") -> str:
    if fmt == "csv":
        return result if isinstance(result, str) else str(result)
    doc = {"command": args.command_name, "config": _config(args), "seed": getattr(args, "seed", None),
           "versions": versions(), "result": result}
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# helpers


def _tower(args):
    from .fields import tower_for
    return tower_for(args.q, args.m)


def _spread(args, tower):
    from .spreads import desarguesian_spread, loads_spread
    if getattr(args, "spread", None):
        return loads_spread(Path(args.spread).read_text(), tower.base, tower)
    return desarguesian_spread(tower, args.n)


def _subspace(args, tower):
    from .scattered import construct_family
    from .subspaces import loads_subspace
    if getattr(args, "subspace", None):
        return loads_subspace(Path(args.subspace).read_text(), tower.base)
    if getattr(args, "family", None):
        return construct_family(args.family, tower, t=args.t, n=args.n, h=args.h)
    raise ValidationError("give --subspace FILE or --family KIND")


# spread


def cmd_spread_build(args):
    from .spreads import construct_tight_spread, dumps_spread, partial_spread_tight, validate
    from .subspaces import dumps_subspace
    tower = _tower(args)
    U = None
    if args.kind == "desarguesian":
        A = _spread(args, tower)
    elif args.kind == "tight":
        A, U = construct_tight_spread(tower, args.n, args.h)
    else:
        A, U = partial_spread_tight(tower, args.n, args.h)
    if args.spread_out:
        Path(args.spread_out).write_text(dumps_spread(A))
    if U is not None and args.subspace_out:
        Path(args.subspace_out).write_text(dumps_subspace(U))
    res = {"kind": A.kind, "size": len(A), "report": validate(A, check_normal=args.normal).to_dict()}
    if U is not None:
        res["subspace_dim"] = U.dim
    return res


def cmd_spread_validate(args):
    from .spreads import loads_spread, validate
    tower = _tower(args)
    A = loads_spread(Path(args.file).read_text(), tower.base, tower)
    return validate(A, check_normal=args.normal).to_dict()


# scattered


def cmd_scattered_check(args):
    from .scattered import scatter_profile
    tower = _tower(args)
    U = _subspace(args, tower)
    prof = scatter_profile(U, _spread(args, tower))
    return {"dim": U.dim, "profile": prof.to_record(), "h": args.h,
            "scattered": prof.max_dim <= args.h}


def cmd_scattered_construct(args):
    from .scattered import scatter_profile
    from .spreads import desarguesian_spread
    from .subspaces import dumps_subspace
    tower = _tower(args)
    U = _subspace(args, tower)
    if args.subspace_out:
        Path(args.subspace_out).write_text(dumps_subspace(U))
    n = U.N // tower.m
    return {"family": args.family, "dim": U.dim, "n": n,
            "max_intersection": scatter_profile(U, desarguesian_spread(tower, n)).max_dim,
            "basis": U.rows}


def cmd_scattered_search(args):
    from .scattered import max_scattered_dimension
    tower = _tower(args)
    A = _spread(args, tower)
    return max_scattered_dimension(A, args.h, args.mode, seed=args.seed, trials=args.trials,
                                   start=args.start).to_dict()


def cmd_scattered_bounds(args):
    from .scattered import bound_table, general_sharper_condition
    res = bound_table(args.m, args.n, args.h).to_dict()
    res["sharper_condition"] = general_sharper_condition(args.m, args.n, args.h)
    return res


# count


def cmd_count_delta(args):
    from .counting import delta_report
    return delta_report(args.N, args.k, args.m, args.h, args.q).to_dict()


def cmd_count_omega(args):
    from .counting import omega_report
    return omega_report(args.N, args.k, args.m, args.h, args.q).to_dict()


def cmd_count_bounds(args):
    from .counting import scattered_count_bounds
    return scattered_count_bounds(args.size, args.N, args.k, args.m, args.h, args.q).to_dict()


def cmd_count_thresholds(args):
    from .counting import thresholds
    return thresholds(args.q, args.h, N=args.N, m=args.m, n=args.n, m_prime=args.m_prime,
                      k=args.k, A_size=args.size)


def cmd_count_trend(args):
    from .counting import trend_check
    return trend_check(args.N, args.k, args.m, args.h, tuple(parse_range(args.qs))).to_dict()


# density


def cmd_density(args):
    from .counting import empirical_density
    curve = empirical_density(args.q, args.m, args.n, args.h, parse_range(args.k), args.samples,
                              seed=args.seed, workers=args.workers)
    if args.format == "csv":
        return curve.to_csv()
    return {"rows": [{"k": k, "scattered": s, "proportion": f"{s / curve.samples:.6f}"}
                     for k, s in curve.rows], "samples": curve.samples}


# lattice


def _lattice(args):
    from .lattice import lattice_of
    tower = _tower(args)
    A = _spread(args, tower)
    return A, lattice_of(A, args.h)


def cmd_lattice_chi(args):
    from .lattice import characteristic_polynomial
    _, L = _lattice(args)
    chi = characteristic_polynomial(L)
    return {"chi": chi.descending(), "chi_str": str(chi), "lattice_size": len(L), "atoms": len(L.atoms)}


def cmd_lattice_critexp(args):
    from .lattice import critical_exponent
    A, L = _lattice(args)
    s = critical_exponent(L, A.field.order)
    return {"critical_exponent": s, "N": A.N, "max_scattered_dim": A.N - s}


def cmd_lattice_verify(args):
    from .lattice import verify_crapo_rota
    tower = _tower(args)
    return verify_crapo_rota(_spread(args, tower), args.h).to_dict()


# rank-metric


def _matrix_code(args):
    from .fields import make_tower, tower_for
    from .rankmetric import MatrixCode, field_multiplication_code, loads_code
    if args.code:
        return loads_code(Path(args.code).read_text())
    if args.preset and (args.q is None or args.m is None):
        raise ValidationError("--preset needs --q and --m")
    if args.preset == "multiplication":
        return field_multiplication_code(tower_for(args.q, args.m))
    if args.preset == "full":
        q, m, mp = args.q, args.m, args.m_prime or args.m
        check_guard("full matrix space", q ** (m * mp), 1 << 20)
        idx = np.arange(q ** (m * mp))
        mats = np.stack([(idx // q**i) % q for i in range(m * mp)], axis=-1)
        return MatrixCode(q, m, mp, mats)
    raise ValidationError("give --code FILE or --preset")


def cmd_rm_covrad(args):
    from .rankmetric import min_rank_distance
    from .rankmetric import covering_radius_exact
    C = _matrix_code(args)
    res = covering_radius_exact(C).to_dict()
    res.update({"size": len(C), "m": C.m, "m_prime": C.mp, "min_distance": min_rank_distance(C),
                "linear": C.linear})
    return res


def cmd_rm_bound(args):
    from .rankmetric import covering_radius_lower_bound
    return covering_radius_lower_bound(args.m, args.m_prime, args.q, s=args.s, size=args.size).to_dict()


def cmd_rm_from_scattered(args):
    from .rankmetric import code_from_scattered, dumps_code
    from .scattered import max_scattered_dimension
    from .spreads import second_order_closure
    tower = _tower(args)
    A = _spread(args, tower)
    if getattr(args, "subspace", None) or getattr(args, "family", None):
        U = _subspace(args, tower)
    else:
        U = max_scattered_dimension(second_order_closure(A), args.h, "exhaustive", start=A.N).witness
    C, rep = code_from_scattered(A, U, args.h)
    if args.code_out:
        Path(args.code_out).write_text(dumps_code(C))
    res = rep.to_dict()
    res.update({"U_dim": U.dim, "shape": [C.m, C.mp], "transposed": C.transposed})
    return res


# minimal


def cmd_minimal_build(args):
    from .minimal import construct_minimal_code, dumps_vector_code
    rep = construct_minimal_code(_tower(args), check_minimality=not args.skip_minimality)
    if args.code_out:
        Path(args.code_out).write_text(dumps_vector_code(rep.code))
    return rep.to_dict()


def cmd_minimal_check(args):
    from .minimal import is_cutting, is_minimal_code, linear_set, loads_vector_code
    C = loads_vector_code(Path(args.code).read_text())
    rep = is_minimal_code(C, args.method).to_dict()
    L = linear_set(C.system, C.tower, C.k)
    rep["nondegenerate"] = C.nondegenerate
    if C.k >= 3:
        rep["cutting"] = bool(is_cutting(L, C.k - 2))
    return rep


def cmd_selftest(args):
    from .oracles import selftest
    res = selftest(args.level)
    if not res["ok"]:
        raise _SelftestFailed(res)
    return res


class _SelftestFailed(VerificationError):
    def __init__(self, res):
        super().__init__("selftest failed")
        self.res = res


# parser


def _field_args(p, n=True, h=True):
    p.add_argument("--q", type=int, required=True, help="base field order")
    p.add_argument("--m", type=int, required=True, help="extension degree")
    if n:
        p.add_argument("--n", type=int, help="F_{q^m}-dimension of the ambient space")
    if h:
        p.add_argument("--h", type=int, default=1)


def _count_args(p):
    for name in ("N", "k", "m", "h", "q"):
        p.add_argument(f"--{name}", type=int, required=True)


def _sub(group, name, func, help_):
    p = group.add_parser(name, help=help_)
    p.set_defaults(func=func)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatterlab", description="Scattered subspaces with respect to spreads.")
    ap.add_argument("--version", action="version", version=f"scatterlab {__version__}")
    top = ap.add_subparsers(dest="group", required=True)

    g = top.add_parser("spread").add_subparsers(dest="cmd", required=True)
    p = _sub(g, "build", cmd_spread_build, "Desarguesian or tight spreads")
    _field_args(p)
    p.add_argument("--kind", choices=["desarguesian", "tight", "partial-tight"], default="desarguesian")
    p.add_argument("--spread", help=argparse.SUPPRESS)
    p.add_argument("--spread-out")
    p.add_argument("--subspace-out")
    p.add_argument("--normal", action="store_true", help="also test normality")
    p = _sub(g, "validate", cmd_spread_validate, "validate a spread file")
    _field_args(p, n=False, h=False)
    p.add_argument("--file", required=True)
    p.add_argument("--normal", action="store_true")

    g = top.add_parser("scattered").add_subparsers(dest="cmd", required=True)
    for name, func, help_ in (("check", cmd_scattered_check, "intersection profile of a subspace"),
                              ("construct", cmd_scattered_construct, "explicit scattered families")):
        p = _sub(g, name, func, help_)
        _field_args(p)
        p.add_argument("--spread", help="spread file (default: Desarguesian)")
        p.add_argument("--subspace", help="subspace file")
        p.add_argument("--family", choices=["even-n", "odd-n", "pseudoregulus", "alt-pseudoregulus"])
        p.add_argument("--t", type=int)
        p.add_argument("--subspace-out")
    p = _sub(g, "search", cmd_scattered_search, "largest scattered dimension")
    _field_args(p)
    p.add_argument("--spread")
    p.add_argument("--mode", choices=["exhaustive", "randomized"], default="exhaustive")
    p.add_argument("--start", type=int, help="first dimension tried (exhaustive)")
    p.add_argument("--trials", type=int, default=200)
    p = _sub(g, "bounds", cmd_scattered_bounds, "dimension bounds")
    for name in ("m", "n", "h"):
        p.add_argument(f"--{name}", type=int, required=True)

    g = top.add_parser("count").add_subparsers(dest="cmd", required=True)
    _count_args(_sub(g, "delta", cmd_count_delta, "k-spaces meeting an m-space in dim >= h+1"))
    _count_args(_sub(g, "omega", cmd_count_omega, "k-spaces meeting two disjoint m-spaces"))
    p = _sub(g, "bounds", cmd_count_bounds, "bounds on the number of scattered k-spaces")
    _count_args(p)
    p.add_argument("--size", type=int, required=True, help="partial spread size")
    p = _sub(g, "thresholds", cmd_count_thresholds, "existence thresholds")
    for name in ("q", "h", "m"):
        p.add_argument(f"--{name}", type=int, required=True)
    for name in ("N", "n", "k", "size"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--m-prime", type=int, dest="m_prime")
    p = _sub(g, "trend", cmd_count_trend, "finite-q asymptotic trend check")
    for name in ("N", "k", "m", "h"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--qs", default="2..5")

    p = _sub(top, "density", cmd_density, "Monte Carlo density of scattered k-spaces")
    _field_args(p)
    p.add_argument("--k", required=True, help="e.g. 8..13")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    g = top.add_parser("lattice").add_subparsers(dest="cmd", required=True)
    for name, func, help_ in (("chi", cmd_lattice_chi, "characteristic polynomial"),
                              ("critexp", cmd_lattice_critexp, "critical exponent"),
                              ("verify", cmd_lattice_verify, "Crapo-Rota equality")):
        p = _sub(g, name, func, help_)
        _field_args(p)
        p.add_argument("--spread")

    g = top.add_parser("rm").add_subparsers(dest="cmd", required=True)
    p = _sub(g, "covrad", cmd_rm_covrad, "exact covering radius")
    p.add_argument("--code", help="code file")
    p.add_argument("--preset", choices=["multiplication", "full"])
    p.add_argument("--q", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--m-prime", type=int, dest="m_prime")
    p = _sub(g, "bound", cmd_rm_bound, "covering radius lower bound")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--m-prime", type=int, dest="m_prime", required=True)
    p.add_argument("--s", type=int)
    p.add_argument("--size", type=int)
    p = _sub(g, "from-scattered", cmd_rm_from_scattered, "code from a scattered subspace")
    _field_args(p)
    p.add_argument("--spread")
    p.add_argument("--subspace")
    p.add_argument("--family", choices=["even-n", "odd-n", "pseudoregulus"])
    p.add_argument("--t", type=int)
    p.add_argument("--code-out")

    g = top.add_parser("minimal").add_subparsers(dest="cmd", required=True)
    p = _sub(g, "build", cmd_minimal_build, "[m+3,3] minimal code")
    _field_args(p, n=False, h=False)
    p.add_argument("--code-out")
    p.add_argument("--skip-minimality", action="store_true")
    p = _sub(g, "check", cmd_minimal_check, "check a vector code file")
    p.add_argument("--code", required=True)
    p.add_argument("--method", choices=["both", "support", "hyperplane"], default="both")

    p = _sub(top, "selftest", cmd_selftest, "run the oracle suites")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    return ap


def _needs_n(args) -> bool:
    if getattr(args, "n", "absent") is not None:
        return False
    return not any(getattr(args, a, None) for a in ("spread", "subspace", "family"))


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    args.command_name = " ".join(x for x in (args.group, getattr(args, "cmd", None)) if x)
    fmt = getattr(args, "format", "json")
    try:
        if _needs_n(args):
            raise ValidationError("--n is required")
        result = args.func(args)
    except _SelftestFailed as exc:
        _write(emit(exc.res, args), args.out)
        return EXIT_VERIFICATION
    except GuardError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (ValidationError, FileNotFoundError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScatterlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _write(emit(result, args, fmt), args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
