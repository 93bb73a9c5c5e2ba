"""Linear sets, cutting blocking sets and minimal vector rank-metric codes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .duality import DualityContext, perp_fq
from .errors import ValidationError, VerificationError, check_guard
from .expansion import codes_to_fqm, contract, expand, fq_expansion, fqm_span, point_codes_of
from .fields import FieldTower
from .qmath import gauss_binomial
from .scattered import construct_family, scatter_profile
from .spreads import desarguesian_points, desarguesian_spread
from .subspaces import Subspace, canonicalize, enumerate_subspaces, inverse, matmul, nullspace, rank

CUTTING_GUARD = 10**6
MINIMAL_PAIR_GUARD = 10**8
BITSET_GUARD = 1 << 16


@dataclass
class LinearSet:
    """L_U: the F_{q^m}-points spanned by nonzero vectors of U, with weights."""

    U: Subspace
    tower: FieldTower
    n: int
    points: np.ndarray  # sorted normalized point codes
    weights: np.ndarray

    @property
    def rank(self) -> int:
        return self.U.dim

    def __len__(self) -> int:
        return len(self.points)

    def point_vectors(self) -> np.ndarray:
        return codes_to_fqm(self.points, self.tower.Q, self.n)

    def partition_holds(self) -> bool:
        q = self.tower.q
        return sum(q ** int(w) - 1 for w in self.weights) == q**self.rank - 1


def linear_set(U: Subspace, tower: FieldTower, n: int) -> LinearSet:
    if U.N != tower.m * n or U.field != tower.base:
        raise ValidationError("U is not an F_q-subspace of F_{q^m}^n")
    if U.dim == 0:
        return LinearSet(U, tower, n, np.zeros(0, np.int64), np.zeros(0, np.int64))
    check_guard("linear set vectors", tower.q**U.dim, 1 << 24)
    pc = point_codes_of(tower, U.codes()[1:], n)
    pts, counts = np.unique(pc, return_counts=True)
    q = tower.q
    w = np.array([round(math.log(c + 1, q)) for c in counts], dtype=np.int64)
    if (q**w - 1 != counts).any():
        raise VerificationError("point multiplicity is not q^w - 1")
    return LinearSet(U, tower, n, pts, w)


def _points_in(F, P: np.ndarray, Ann: np.ndarray) -> np.ndarray:
    """Mask of points P (rows) lying in the subspace with annihilator rows Ann."""
    if Ann.shape[0] == 0:
        return np.ones(P.shape[0], dtype=bool)
    return ~np.asarray(matmul(F, P, Ann.T)).any(axis=1)


@dataclass
class CuttingReport:
    cutting: bool
    subspaces_checked: int
    witness: Subspace | None = None  # a subspace not spanned by its points


def is_cutting(L: LinearSet, codim: int, report: bool = False):
    """True iff the points of L inside every (n - codim)-dimensional
    F_{q^m}-subspace span it."""
    tower, n = L.tower, L.n
    F = tower.top
    d = n - codim
    if not 1 <= d < n:
        raise ValidationError("need 1 <= n - codim < n")
    check_guard("cutting subspaces", gauss_binomial(n, d, tower.Q), CUTTING_GUARD)
    P = L.point_vectors()
    checked = 0
    if d == n - 1:
        # hyperplanes x^perp, x ranging over the points of PG(n-1, q^m)
        X = codes_to_fqm(desarguesian_points(tower, n), tower.Q, n)
        for s in range(0, X.shape[0], 1 << 12):
            Xs = X[s:s + (1 << 12)]
            inside = ~np.asarray(matmul(F, P, Xs.T)).astype(bool).T  # (B, |L|)
            for j in range(Xs.shape[0]):
                checked += 1
                sub = P[inside[j]]
                ok = (sub.shape[0] >= d) if d == 2 else rank(F, sub) == d if sub.shape[0] else False
                if not ok:
                    W = canonicalize(F, nullspace(F, Xs[j:j + 1], n), n)
                    rep = CuttingReport(False, checked, W)
                    return rep if report else False
        rep = CuttingReport(True, checked)
        return rep if report else True
    for W in enumerate_subspaces(F, n, d, guard=CUTTING_GUARD):
        checked += 1
        Ann = nullspace(F, W.rows, n)
        sub = P[_points_in(F, P, Ann)]
        ok = sub.shape[0] >= 2 if d == 2 else (sub.shape[0] > 0 and rank(F, sub) == d)
        if not ok:
            rep = CuttingReport(False, checked, W)
            return rep if report else False
    rep = CuttingReport(True, checked)
    return rep if report else True


def cutting_feasible(m: int, n: int, h: int) -> bool:
    """(n-2)m + h + 1 <= hnm/(h+1), i.e. n <= (h+1)(2m-h-1)/m."""
    return n * m <= (h + 1) * (2 * m - h - 1)


def cutting_from_scattered(tower: FieldTower, n: int, h: int) -> tuple[Subspace, LinearSet]:
    """A (D,h)-scattered subspace of dimension (n-2)m + h + 1 whose linear set
    is 2-cutting, carved out of the dual of the pseudoregulus (h = n - 1).

    Subspaces of the dual are tried in a fixed order (row subsets of its
    canonical basis, lexicographically) until the span and cutting checks pass.
    """
    m = tower.m
    if not cutting_feasible(m, n, h):
        raise ValidationError(f"no such subspace: n <= (h+1)(2m-h-1)/m fails for m={m}, n={n}, h={h}")
    if h != n - 1:
        raise ValidationError("only h = n - 1 is constructed (dual of the pseudoregulus)")
    if n < 2:
        raise ValidationError("need n >= 2")
    D = desarguesian_spread(tower, n)
    U0 = construct_family("pseudoregulus", tower, n=n, verify=False)
    V = perp_fq(U0, DualityContext(tower, n))
    if scatter_profile(V, D).max_dim > h:
        raise VerificationError("dual of the pseudoregulus is not (D, n-1)-scattered")
    target = (n - 2) * m + h + 1
    for rows in itertools.combinations(range(V.dim), target):
        U = canonicalize(tower.base, V.rows[list(rows)], V.N)
        if fqm_span(tower, U).dim != n:
            continue
        if scatter_profile(U, D).max_dim > h:
            raise VerificationError("subspace of a scattered space is not scattered")
        L = linear_set(U, tower, n)
        if is_cutting(L, n - 2):
            return U, L
    raise VerificationError("no cutting subspace found among the deterministic choices")


# vector rank-metric codes


class VectorRankCode:
    """[l, k]_{q^m/q} code given by a k x l generator matrix over F_{q^m}."""

    def __init__(self, tower: FieldTower, G):
        G = np.asarray(G, dtype=np.int64)
        if G.ndim != 2:
            raise ValidationError("generator matrix must be 2-dimensional")
        if ((G < 0) | (G >= tower.Q)).any():
            raise ValidationError("entries must lie in [0, q^m)")
        self.tower, self.G = tower, G
        self.k, self.length = G.shape
        if rank(tower.top, G) != self.k:
            raise ValidationError("generator matrix must have full row rank")
        # system: F_q-span of the columns of G inside F_{q^m}^k
        self.system = canonicalize(tower.base, expand(tower, G.T), self.k * tower.m)

    def __repr__(self) -> str:
        t = self.tower
        return f"VectorRankCode([{self.length},{self.k}]_{{{t.Q}/{t.q}}})"

    @property
    def nondegenerate(self) -> bool:
        return self.system.dim == self.length and fqm_span(self.tower, self.system).dim == self.k

    def encode(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        if X.ndim == 1:
            return matmul(self.tower.top, X[None, :], self.G)[0]
        return matmul(self.tower.top, X, self.G)

    def projective_messages(self) -> np.ndarray:
        return codes_to_fqm(desarguesian_points(self.tower, self.k), self.tower.Q, self.k)

    def rank_weight(self, c) -> int:
        return rank_support(c, self.tower).dim


def code_from_system(U: Subspace, tower: FieldTower, n: int) -> VectorRankCode:
    """Generator matrix whose columns are an F_q-basis of U."""
    if U.N != tower.m * n:
        raise ValidationError("U is not in F_{q^m}^n")
    return VectorRankCode(tower, contract(tower, U.rows).T)


def gamma(c, tower: FieldTower, basis=None) -> np.ndarray:
    """Gamma(c): the l x m coordinate matrix of c in the given F_q-basis."""
    C = tower.coords(np.asarray(c, dtype=np.int64))
    if basis is None:
        return C
    B = tower.coords(np.asarray(basis, dtype=np.int64))  # rows: coords of basis elements
    if rank(tower.base, B) != tower.m:
        raise ValidationError("not a basis of F_{q^m} over F_q")
    return matmul(tower.base, C, inverse(tower.base, B))


def rank_support(c, tower: FieldTower, basis=None) -> Subspace:
    """Column space of Gamma(c) in F_q^l."""
    Gm = gamma(c, tower, basis)
    return canonicalize(tower.base, Gm.T, Gm.shape[0])


def _bitsets(mask: np.ndarray) -> np.ndarray:
    return np.packbits(mask, axis=1)


def _find_inclusion(B: np.ndarray) -> tuple[int, int] | None:
    """First (i, j), i != j, with set_i contained in set_j (rows of packed bitsets)."""
    P = B.shape[0]
    step = max(1, (1 << 22) // max(1, P * B.shape[1]))
    for s in range(0, P, step):
        Bi = B[s:s + step]
        sub = ~((Bi[:, None, :] & ~B[None, :, :]).any(axis=2))  # (b, P): Bi ⊆ Bj
        idx = np.arange(s, s + Bi.shape[0])
        sub[np.arange(Bi.shape[0]), idx] = False
        hit = np.argwhere(sub)
        if hit.size:
            return int(idx[hit[0, 0]]), int(hit[0, 1])
    return None


@dataclass
class MinimalityReport:
    minimal: bool
    method: str
    classes: int
    certificate: tuple | None = None  # (x, y): supp(xG) contained in supp(yG)
    agree: bool | None = None
    weight_identity: bool | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        cert = None if self.certificate is None else [np.asarray(v).tolist() for v in self.certificate]
        return {"minimal": self.minimal, "method": self.method, "classes": self.classes,
                "certificate": cert, "methods_agree": self.agree,
                "weight_identity": self.weight_identity}


def _support_method(C: VectorRankCode, X: np.ndarray):
    """(a): pairwise support inclusion over projective classes."""
    tower, l = C.tower, C.length
    q = tower.q
    check_guard("support bitsets", q**l, BITSET_GUARD)
    cw = C.encode(X)
    masks = np.zeros((X.shape[0], q**l), dtype=bool)
    dims = np.zeros(X.shape[0], dtype=np.int64)
    for i, c in enumerate(cw):
        S = rank_support(c, tower)
        dims[i] = S.dim
        masks[i, S.codes()] = True
    return _find_inclusion(_bitsets(masks)), dims


def _hyperplane_method(C: VectorRankCode, X: np.ndarray):
    """(b): supp(xG) <= supp(yG) iff U ∩ x^perp contains U ∩ y^perp."""
    tower, k = C.tower, C.k
    U = C.system
    q = tower.q
    check_guard("system vectors", q**U.dim, BITSET_GUARD)
    Uv = contract(tower, U.vectors())  # (q^l, k) over F_{q^m}
    dots = np.asarray(matmul(tower.top, X, Uv.T))  # (P, q^l)
    inside = dots == 0
    found = _find_inclusion(_bitsets(inside))
    dims = np.array([int(round(math.log(int(r.sum()), q))) for r in inside], dtype=np.int64)
    # containment of hyperplane sections reverses support inclusion
    return (None if found is None else (found[1], found[0])), dims


def is_minimal_code(C: VectorRankCode, method: str = "both") -> MinimalityReport:
    if method not in ("both", "support", "hyperplane"):
        raise ValidationError(f"unknown method {method!r}")
    X = C.projective_messages()
    P = X.shape[0]
    check_guard("minimality pairs", P * P, MINIMAL_PAIR_GUARD)
    res_a = res_b = None
    weight_ok = None
    if method in ("both", "support"):
        res_a, wa = _support_method(C, X)
    if method in ("both", "hyperplane"):
        res_b, hb = _hyperplane_method(C, X)
    if method == "both":
        weight_ok = bool((wa == C.length - hb).all())
        if not weight_ok:
            raise VerificationError("rk(xG) = l - dim(U ∩ x^perp) fails")
        if (res_a is None) != (res_b is None):
            raise VerificationError("support and hyperplane minimality checks disagree")
    res = res_a if method != "hyperplane" else res_b
    cert = None if res is None else (X[res[0]], X[res[1]])
    return MinimalityReport(res is None, method, P, cert,
                            agree=True if method == "both" else None, weight_identity=weight_ok)


@dataclass
class MinimalCodeReport:
    code: VectorRankCode
    system: Subspace
    cutting: CuttingReport
    minimality: MinimalityReport | None
    certified_by: str

    def to_dict(self) -> dict:
        t = self.code.tower
        return {"length": self.code.length, "k": self.code.k, "q": t.q, "m": t.m,
                "nondegenerate": self.code.nondegenerate, "system_dim": self.system.dim,
                "cutting": self.cutting.cutting, "planes_checked": self.cutting.subspaces_checked,
                "minimality": None if self.minimality is None else self.minimality.to_dict(),
                "certified_by": self.certified_by, "G": self.code.G.tolist()}


def construct_minimal_code(tower: FieldTower, check_minimality: bool = True) -> MinimalCodeReport:
    """[m+3, 3]_{q^m/q} minimal code from a 2-cutting system of rank m + 3."""
    m = tower.m
    if m < 4:
        raise ValidationError("need m >= 4")
    U, L = cutting_from_scattered(tower, 3, 2)
    cut = is_cutting(L, 1, report=True)
    if not cut.cutting:
        raise VerificationError("system is not 2-cutting")
    C = code_from_system(U, tower, 3)
    if not C.nondegenerate or C.length != m + 3:
        raise VerificationError("code is degenerate or has the wrong length")
    rep = None
    how = "cutting-correspondence"
    if check_minimality:
        try:
            rep = is_minimal_code(C)
            how = "support+hyperplane"
        except Exception as exc:
            if type(exc).__name__ != "GuardError":
                raise
        if rep is not None and not rep.minimal:
            raise VerificationError("code built from a cutting system is not minimal")
    return MinimalCodeReport(C, U, cut, rep, how)


# text format


def dumps_vector_code(C: VectorRankCode) -> str:
    t = C.tower
    lines = [f"{t.q} {t.m} {C.k} {C.length}"]
    lines += [" ".join(map(str, row)) for row in C.G.tolist()]
    return "\n".join(lines) + "\n"


def loads_vector_code(text: str, tower: FieldTower | None = None) -> VectorRankCode:
    from .fields import tower_for
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        q, m, k, l = map(int, lines[0].split())
        G = np.array([list(map(int, ln.split())) for ln in lines[1:1 + k]], dtype=np.int64)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"malformed code file: {exc}") from None
    if G.shape != (k, l):
        raise ValidationError("generator matrix does not match header")
    tower = tower or tower_for(q, m)
    if tower.q != q or tower.m != m:
        raise ValidationError("tower does not match header")
    return VectorRankCode(tower, G)


__all__ = [
    "LinearSet", "linear_set", "is_cutting", "cutting_feasible", "cutting_from_scattered",
    "VectorRankCode", "code_from_system", "gamma", "rank_support", "is_minimal_code",
    "construct_minimal_code", "MinimalityReport", "CuttingReport", "dumps_vector_code",
    "loads_vector_code", "fq_expansion",
]
