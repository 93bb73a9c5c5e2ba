"""Brute-force oracles and the self-test suites built on them."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .counting import delta_count, omega_count
from .fields import make_field, make_tower, tower_for
from .subspaces import batch_rank, enumerate_subspaces


def _section_dims(F, batch: np.ndarray, keep_cols) -> np.ndarray:
    """dim(W ∩ T) for T the coordinate subspace on ``keep_cols``: k minus the
    rank of W restricted to the other columns."""
    k, N = batch.shape[1], batch.shape[2]
    other = [j for j in range(N) if j not in set(keep_cols)]
    if not other:
        return np.full(batch.shape[0], k, dtype=np.int64)
    return k - batch_rank(F, batch[:, :, other])


def brute_counts(N: int, k: int, q: int) -> dict:
    """For every m and h: (#k-spaces meeting span(e_0..e_{m-1}) in dim >= h+1,
    #k-spaces also meeting span(e_m..e_{2m-1}) in dim >= h+1)."""
    F = make_field(q)
    one: dict = {}
    two: dict = {}
    for batch in enumerate_subspaces(F, N, k).batches(1 << 14):
        for m in range(1, N + 1):
            a = _section_dims(F, batch, range(m))
            b = _section_dims(F, batch, range(m, 2 * m)) if 2 * m <= N else None
            for h in range(0, m + 1):
                one[(m, h)] = one.get((m, h), 0) + int((a >= h + 1).sum())
                if b is not None:
                    two[(m, h)] = two.get((m, h), 0) + int(((a >= h + 1) & (b >= h + 1)).sum())
    return {"delta": one, "omega": two}


@dataclass
class OracleSweep:
    checked: int = 0
    mismatches: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.checked > 0


def counting_oracle_sweep(max_N: int = 6, qs=(2, 3)) -> OracleSweep:
    out = OracleSweep()
    t0 = time.perf_counter()
    for q in qs:
        for N in range(1, max_N + 1):
            for k in range(1, N + 1):
                bc = brute_counts(N, k, q)
                for (m, h), v in bc["delta"].items():
                    out.checked += 1
                    f = delta_count(N, k, m, h, q)
                    if f != v:
                        out.mismatches.append(("delta", N, k, m, h, q, f, v))
                for (m, h), v in bc["omega"].items():
                    out.checked += 1
                    f = omega_count(N, k, m, h, q)
                    if f != v:
                        out.mismatches.append(("omega", N, k, m, h, q, f, v))
    out.seconds = time.perf_counter() - t0
    return out


# self-test suites


def _suite_counting(level: str) -> dict:
    r = counting_oracle_sweep(6 if level == "full" else 4, (2, 3) if level == "full" else (2,))
    return {"ok": r.ok, "checked": r.checked, "mismatches": len(r.mismatches)}


def _suite_spreads(level: str) -> dict:
    from .spreads import construct_tight_spread, desarguesian_spread, partial_spread_tight, validate
    t = make_tower(2, 1, 2)
    ok = validate(desarguesian_spread(t, 3)).is_full
    for n in (2, 3):
        for h in (1, 2):
            A, U = construct_tight_spread(t, n, h)
            P, V = partial_spread_tight(t, n, h)
            ok &= U.dim == 2 * (n - 1) + h - 1 and len(P) == 2 ** (2 * (n - 1)) and V.dim == 2 * (n - 1) + h
    return {"ok": bool(ok)}


def _suite_scattered(level: str) -> dict:
    from .scattered import construct_family, is_h_scattered, is_scattered
    from .spreads import desarguesian_spread
    ok = True
    grid = [(2, 2, 1), (3, 2, 1), (2, 3, 1)] if level == "quick" else \
        [(q, m, t) for q in (2, 3) for m in (2, 3, 4) for t in (1, 2)]
    for q, m, t in grid:
        tower = tower_for(q, m)
        if q ** (m * t) > 1 << 20:
            continue
        U = construct_family("even-n", tower, t=t)
        ok &= U.dim == m * t and is_scattered(U, desarguesian_spread(tower, 2 * t), 1)
    t22 = make_tower(2, 1, 2)
    U = construct_family("odd-n", t22, t=1)
    ok &= U.dim == 3 and is_scattered(U, desarguesian_spread(t22, 3), 1)
    t23 = make_tower(2, 1, 3)
    ok &= is_h_scattered(construct_family("pseudoregulus", t23, n=3), t23, 3, 2)
    return {"ok": bool(ok)}


def _suite_lattice(level: str) -> dict:
    from .lattice import verify_crapo_rota
    from .spreads import desarguesian_spread
    t = make_tower(2, 1, 2)
    D = desarguesian_spread(t, 2)
    r1 = verify_crapo_rota(D, 1, raise_on_failure=False)
    r2 = verify_crapo_rota(D, 2, raise_on_failure=False)
    ok = r1.holds and r2.holds and r1.chi.descending() == [1, 0, -5, 0, 4] and r1.lhs == 2
    return {"ok": bool(ok), "chi": r1.chi.descending()}


def _suite_duality(level: str) -> dict:
    from .duality import DualityContext, check_dual_weight, perp_fq
    from .subspaces import enumerate_subspaces as enum
    t = make_tower(2, 1, 2)
    ctx = DualityContext(t, 2)
    ok = True
    Us = list(enum(t.base, 4, 2)) if level == "full" else list(enum(t.base, 4, 2))[:10]
    for U in Us:
        ok &= perp_fq(perp_fq(U, ctx), ctx) == U
        for W in enum(t.top, 2, 1):
            ok &= check_dual_weight(U, W, ctx).holds
    return {"ok": bool(ok)}


def _suite_rankmetric(level: str) -> dict:
    from .rankmetric import covering_radius_exact, covering_radius_lower_bound, field_multiplication_code
    t = make_tower(2, 1, 2)
    r = covering_radius_exact(field_multiplication_code(t))
    lb = covering_radius_lower_bound(6, 6, 2, s=6)
    return {"ok": r.exact == 1 and bool(r.agree) and lb.bound == 4}


def _suite_minimal(level: str) -> dict:
    from .minimal import construct_minimal_code
    rep = construct_minimal_code(make_tower(2, 1, 4))
    return {"ok": bool(rep.minimality is not None and rep.minimality.minimal and rep.cutting.cutting)}


SUITES = {
    "counting": _suite_counting,
    "spreads": _suite_spreads,
    "scattered": _suite_scattered,
    "lattice": _suite_lattice,
    "duality": _suite_duality,
    "rank-metric": _suite_rankmetric,
    "minimal": _suite_minimal,
}


def selftest(level: str = "quick") -> dict:
    results = {}
    for name, fn in SUITES.items():
        try:
            results[name] = fn(level)
        except Exception as exc:  # report, do not abort the remaining suites
            results[name] = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
    return {"level": level, "ok": all(r["ok"] for r in results.values()), "suites": results}
