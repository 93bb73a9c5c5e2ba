"""Trace-form duality on F_q-subspaces of F_{q^m}^n."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError, ValidationError
from .expansion import fq_expansion
from .fields import FieldTower
from .scattered import is_h_scattered, scatter_profile
from .spreads import PartialSpread, desarguesian_spread
from .subspaces import Subspace, canonicalize, full_space, matmul, nullspace, rank, zero_space


class DualityContext:
    """A nondegenerate reflexive bilinear form sigma on F_{q^m}^n and its
    trace form sigma' = Tr(sigma) on the F_q-expansion."""

    def __init__(self, tower: FieldTower, n: int, form=None):
        F = tower.top
        self.tower, self.n = tower, n
        M = np.eye(n, dtype=np.int64) if form is None else np.asarray(form, dtype=np.int64)
        if M.shape != (n, n):
            raise ValidationError("form must be an n x n matrix over F_{q^m}")
        symmetric = bool((M == M.T).all())
        alternating = bool((M == F.neg(M.T)).all()) and not np.diagonal(M).any()
        if not (symmetric or alternating):
            raise ValidationError("form must be symmetric or alternating (reflexive)")
        if rank(F, M) != n:
            raise ValidationError("form is degenerate")
        self.form = M
        self.gram = self._gram()
        if rank(tower.base, self.gram) != n * tower.m:
            raise ValidationError("trace form is degenerate")

    def _gram(self) -> np.ndarray:
        t = self.tower
        F, m, n = t.top, t.m, self.n
        beta = np.array(t.basis, dtype=np.int64)
        G = np.zeros((n * m, n * m), dtype=np.int64)
        for i in range(n):
            for k in range(n):
                # Tr(beta_j * F_ik * beta_l)
                vals = F.mul(F.mul(beta[:, None], int(self.form[i, k])), beta[None, :])
                G[i * m:(i + 1) * m, k * m:(k + 1) * m] = t.trace(vals)
        return G

    def sigma_prime(self, u, v) -> int:
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return int(matmul(self.tower.base, matmul(self.tower.base, u[None, :], self.gram), v[:, None])[0, 0])


def perp_fq(U: Subspace, ctx: DualityContext) -> Subspace:
    N = ctx.n * ctx.tower.m
    if U.N != N:
        raise ValidationError("subspace not in the expansion of F_{q^m}^n")
    F = ctx.tower.base
    if U.dim == 0:
        return full_space(F, N)
    return canonicalize(F, nullspace(F, matmul(F, U.rows, ctx.gram), N), N)


def perp_fqm(W: Subspace, ctx: DualityContext) -> Subspace:
    F = ctx.tower.top
    if W.N != ctx.n or W.field != F:
        raise ValidationError("W must be an F_{q^m}-subspace of F_{q^m}^n")
    if W.dim == 0:
        return full_space(F, ctx.n)
    return canonicalize(F, nullspace(F, matmul(F, W.rows, ctx.form), ctx.n), ctx.n)


@dataclass
class DualWeight:
    lhs: int
    rhs: int
    terms: dict

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def check_dual_weight(U: Subspace, W: Subspace, ctx: DualityContext) -> DualWeight:
    """Both sides of dim(U^perp ∩ W^perp) - dim(U ∩ W) = mn - dim U - s m."""
    m, n = ctx.tower.m, ctx.n
    Wq = fq_expansion(ctx.tower, W.rows, n)
    Up, Wp = perp_fq(U, ctx), perp_fq(Wq, ctx)
    a, b = Up.meet(Wp).dim, U.meet(Wq).dim
    return DualWeight(a - b, m * n - U.dim - W.dim * m,
                      {"dim_perp_meet": a, "dim_meet": b, "dim_U": U.dim, "s": W.dim})


@dataclass
class DualReport:
    dual: Subspace
    dual_dim: int
    dual_max_intersection: int | None
    checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"dual_dim": self.dual_dim, "dual_max_intersection": self.dual_max_intersection,
                "checks": self.checks}


def dual_scattered(U: Subspace, ctx: DualityContext, A: PartialSpread | None = None, h: int = 1) -> DualReport:
    """U^perp with the transfer statements that apply to U's parameters.

    Each check is reported as ``verified``, ``failed``, ``not-applicable``
    or ``too-large``.
    """
    t, n = ctx.tower, ctx.n
    m, N = t.m, t.m * ctx.n
    D = A if A is not None else desarguesian_spread(t, n)
    V = perp_fq(U, ctx)
    try:
        vmax = scatter_profile(V, D).max_dim
        umax = scatter_profile(U, D).max_dim
    except GuardError:
        vmax = umax = None
    checks = {}
    if h == 1 and N % 2 == 0 and U.dim == N // 2 and vmax is not None:
        if umax <= 1:
            checks["maximum_scattered_transfer"] = "verified" if vmax <= 1 else "failed"
        else:
            checks["maximum_scattered_transfer"] = "not-applicable"
    else:
        checks["maximum_scattered_transfer"] = "not-applicable"
    if N % (h + 1) == 0 and m >= h + 3 and U.dim == N // (h + 1) and 1 <= h <= n - 1:
        try:
            left = is_h_scattered(U, t, n, h)
            right = vmax is not None and vmax <= h
            checks["h_scattered_equivalence"] = "verified" if left == right else "failed"
            checks["U_h_scattered"] = bool(left)
        except GuardError:
            checks["h_scattered_equivalence"] = "too-large"
    else:
        checks["h_scattered_equivalence"] = "not-applicable"
    return DualReport(V, V.dim, vmax, checks)


def fqm_point(tower: FieldTower, n: int, vec) -> Subspace:
    return canonicalize(tower.top, np.asarray(vec, dtype=np.int64).reshape(1, n), n)


__all__ = ["DualityContext", "perp_fq", "perp_fqm", "check_dual_weight", "dual_scattered",
           "DualReport", "DualWeight", "zero_space"]
