"""Matrix rank-metric codes, the spread/code dictionary and covering radius."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GuardError, ValidationError, VerificationError, check_guard
from .expansion import codes_to_fqm, expand
from .fields import FieldTower, FiniteField, make_field
from .scattered import batch_max_intersection, is_scattered
from .spreads import PartialSpread, second_order_closure
from .subspaces import Subspace, batch_rank, canonicalize, inverse, matmul, rank, rref

SWEEP_GUARD = 1 << 24
PAIR_GUARD = 10**7
CHUNK = 1 << 14


def _codes_of(F: FiniteField, flat: np.ndarray) -> list[bytes]:
    return [r.tobytes() for r in np.ascontiguousarray(flat, dtype=np.int64)]


class MatrixCode:
    """A set of m x m' matrices over F_q (at least two of them).

    Inputs with m > m' are transposed; ``transposed`` records it.
    Linearity is detected (C is linear iff |C| = q^rank of its span) and,
    when claimed, checked.
    """

    def __init__(self, q: int, m: int, mp: int, matrices, linear: bool | None = None,
                 field: FiniteField | None = None):
        F = field or make_field(q)
        if F.order != q:
            raise ValidationError("field order does not match q")
        M = np.asarray(matrices, dtype=np.int64).reshape(-1, m, mp)
        if ((M < 0) | (M >= q)).any():
            raise ValidationError("matrix entries must lie in [0, q)")
        self.transposed = m > mp
        if self.transposed:
            M = M.transpose(0, 2, 1)
            m, mp = mp, m
        flat = np.unique(M.reshape(M.shape[0], -1), axis=0)
        if flat.shape[0] < 2:
            raise ValidationError("a rank-metric code needs at least two codewords")
        self.field, self.q, self.m, self.mp = F, q, m, mp
        self.flat = flat
        self.matrices = flat.reshape(-1, m, mp)
        r = rank(F, flat)
        self.span_dim = r
        detected = q**r == len(flat)
        if linear and not detected:
            raise ValidationError("code claimed linear but is not closed under F_q-combinations")
        self.linear = detected
        self._index = None
        self._d = None

    def __len__(self) -> int:
        return self.flat.shape[0]

    def __repr__(self) -> str:
        return f"MatrixCode(q={self.q}, {self.m}x{self.mp}, size={len(self)}, linear={self.linear})"

    def __contains__(self, Y) -> bool:
        if self._index is None:
            self._index = set(_codes_of(self.field, self.flat))
        return np.asarray(Y, dtype=np.int64).reshape(-1).tobytes() in self._index

    def basis(self) -> np.ndarray:
        if not self.linear:
            raise ValidationError("nonlinear code has no F_q-basis")
        R, piv = rref(self.field, self.flat)
        return R[:len(piv)].reshape(-1, self.m, self.mp)


def _ranks(F: FiniteField, mats: np.ndarray) -> np.ndarray:
    out = np.empty(mats.shape[0], dtype=np.int64)
    for s in range(0, mats.shape[0], CHUNK):
        out[s:s + CHUNK] = batch_rank(F, mats[s:s + CHUNK])
    return out


def min_rank_distance(C: MatrixCode) -> int:
    if C._d is not None:
        return C._d
    F = C.field
    if C.linear:
        nz = C.matrices[(C.flat != 0).any(axis=1)]
        d = int(_ranks(F, nz).min())
    else:
        n = len(C)
        check_guard("pairwise distances", n * (n - 1) // 2, PAIR_GUARD)
        d = C.m
        for i in range(n - 1):
            diff = F.sub(C.matrices[i + 1:], C.matrices[i][None])
            d = min(d, int(_ranks(F, np.asarray(diff)).min()))
            if d == 1:
                break
    C._d = d
    return d


def singleton_log_bound(m: int, mp: int, d: int) -> int:
    """log_q of the Singleton-like bound on |C| for minimum distance d."""
    return max(m, mp) * (min(m, mp) - d + 1)


def singleton_defect(C: MatrixCode) -> Fraction | float:
    """log_q(bound) - log_q|C|; exact when |C| is a power of q. Zero iff MRD."""
    d = min_rank_distance(C)
    top = singleton_log_bound(C.m, C.mp, d)
    if len(C) > C.q**top:
        raise VerificationError("code exceeds the Singleton-like bound")
    s = _exact_log(len(C), C.q)
    return Fraction(top - s) if s is not None else top - math.log(len(C), C.q)


def _exact_log(x: int, q: int) -> int | None:
    s, v = 0, 1
    while v < x:
        v *= q
        s += 1
    return s if v == x else None


def is_mrd(C: MatrixCode) -> bool:
    return singleton_defect(C) == 0


# standard codes


def field_multiplication_code(tower: FieldTower) -> MatrixCode:
    """{x -> a x : a in F_{q^m}} as m x m matrices over F_q (rows = images of the basis)."""
    F = tower.top
    a = F.elements()
    beta = np.array(tower.basis, dtype=np.int64)
    mats = tower.coords(F.mul(a[:, None], beta[None, :]))
    return MatrixCode(tower.q, tower.m, tower.m, mats, field=tower.base)


def random_linear_code(q: int, m: int, mp: int, dim: int, d: int, seed=0,
                       field: FiniteField | None = None, tries: int = 64) -> MatrixCode:
    """Random F_q-linear code of the given dimension with minimum distance >= d.

    Grows a basis greedily among all matrices (q^{m m'} must be small);
    restarts up to ``tries`` times when the greedy choice gets stuck.
    """
    F = field or make_field(q)
    size = q**(m * mp)
    check_guard("matrix space", size, 1 << 20)
    if dim > singleton_log_bound(m, mp, d) or dim < 1:
        raise ValidationError("no such code: dimension outside the Singleton-like range")
    rng = np.random.default_rng(seed)
    idx = np.arange(size, dtype=np.int64)
    allm = np.stack([(idx // q**i) % q for i in range(m * mp)], axis=-1)
    rk = _ranks(F, allm.reshape(-1, m, mp))
    good = rk >= d
    weights = q ** np.arange(m * mp, dtype=np.int64)
    scal = F.nonzero()
    for _ in range(tries):
        code = np.zeros((1, m * mp), dtype=np.int64)
        basis = []
        while len(basis) < dim:
            ok = good.copy()
            for lam in scal:
                # every lam*X + c must have rank >= d
                for c in code:
                    shifted = (np.asarray(F.add(F.mul(int(lam), allm), c[None, :])) * weights).sum(axis=1)
                    ok &= good[shifted]
            cand = np.flatnonzero(ok)
            if cand.size == 0:
                break
            X = allm[int(rng.choice(cand))]
            basis.append(X)
            code = np.concatenate([np.asarray(F.add(code, F.mul(int(lam), X[None, :]))) for lam in F.elements()])
        if len(basis) == dim:
            return MatrixCode(q, m, mp, code, linear=True, field=F)
    raise VerificationError("greedy search for a random linear code failed")


# spread <-> code dictionary


def graph_space(F: FiniteField, A: np.ndarray) -> Subspace:
    m, mp = A.shape
    return canonicalize(F, np.hstack([np.eye(m, dtype=np.int64), A]), m + mp)


def s_infinity(F: FiniteField, m: int, mp: int) -> Subspace:
    return canonicalize(F, np.hstack([np.zeros((mp, m), np.int64), np.eye(mp, dtype=np.int64)]), m + mp)


def code_to_partial_spread(C: MatrixCode) -> tuple[PartialSpread, Subspace]:
    """S_A = {(x, xA)} for each codeword; needs minimum distance m."""
    if min_rank_distance(C) != C.m:
        raise ValidationError(f"minimum distance {min_rank_distance(C)} < m = {C.m}")
    F, N = C.field, C.m + C.mp
    els = [graph_space(F, A) for A in C.matrices]
    return PartialSpread(F, N, C.m, "constructed", elements=els), s_infinity(F, C.m, C.mp)


def partial_spread_to_code(A: PartialSpread, S_inf: Subspace) -> MatrixCode:
    """Inverse direction: change coordinates so S_inf = 0 + F^{m'} and read off
    each element as a graph {(x, xY)}."""
    F, m, N = A.field, A.m, A.N
    mp = N - m
    if S_inf.dim != mp:
        raise ValidationError("S_inf must have dimension N - m")
    # P: rows = complement basis, then S_inf basis; new coords c = v P^{-1}
    comp = _complement(F, S_inf)
    P = np.vstack([comp, S_inf.rows])
    Pinv = inverse(F, P)
    mats = []
    for S in A.elements:
        T = canonicalize(F, matmul(F, S.rows, Pinv), N)
        if T.pivots != tuple(range(m)):
            raise ValidationError("spread element meets S_inf nontrivially")
        mats.append(T.rows[:, m:])
    return MatrixCode(F.order, m, mp, np.array(mats), field=F)


def _complement(F: FiniteField, U: Subspace) -> np.ndarray:
    free = [j for j in range(U.N) if j not in U.pivots]
    E = np.zeros((len(free), U.N), dtype=np.int64)
    E[np.arange(len(free)), free] = 1
    return E


# covering radius


@dataclass
class LowerBound:
    bound: int
    h_star: int
    simplified: int | None  # ceil(m - sqrt(s+1)), only for q not in {2,3}

    def to_dict(self) -> dict:
        return {"bound": self.bound, "h_star": self.h_star, "simplified_bound": self.simplified}


def covering_radius_lower_bound(m: int, mp: int, q: int, *, s: int | None = None,
                                size: int | None = None) -> LowerBound:
    """Smallest h >= 0 with 4|C| < q^{(h+1)(m'-m+h+1)}; the bound is m - h."""
    if (s is None) == (size is None):
        raise ValidationError("give exactly one of s or size")
    if m > mp:
        m, mp = mp, m
    size = q**s if size is None else size
    if size < 1:
        raise ValidationError("code size must be positive")
    h = 0
    while h < m and not 4 * size < q ** ((h + 1) * (mp - m + h + 1)):
        h += 1
    s_exact = s if s is not None else _exact_log(size, q)
    simplified = None
    if q not in (2, 3) and s_exact is not None:
        simplified = max(m - math.isqrt(s_exact + 1), 0)
    return LowerBound(m - h, h, simplified)


@dataclass
class CoveringReport:
    exact: int | None
    lower_bound: int
    h_star: int
    witness: np.ndarray | None
    scattered_h_min: int | None = None
    extendable: bool | None = None

    @property
    def agree(self) -> bool | None:
        if self.exact is None or self.scattered_h_min is None:
            return None
        return self.exact == self.witness.shape[0] - self.scattered_h_min

    def to_dict(self) -> dict:
        return {"exact": self.exact, "lower_bound": self.lower_bound, "h_star": self.h_star,
                "witness": None if self.witness is None else self.witness.tolist(),
                "scattered_h_min": self.scattered_h_min, "scattered_agrees": self.agree,
                "extendable": self.extendable}


def _sweep_space(C: MatrixCode) -> tuple[np.ndarray, int]:
    """Free positions to sweep Y over, and their count. For a linear code
    Y only matters modulo C, so the pivot positions of C's basis are fixed to 0."""
    L = C.m * C.mp
    if C.linear:
        _, piv = rref(C.field, C.flat)
        free = np.array([j for j in range(L) if j not in piv], dtype=np.int64)
    else:
        free = np.arange(L, dtype=np.int64)
    return free, C.q ** len(free)


def _iter_Y(C: MatrixCode, free: np.ndarray, total: int, chunk: int):
    q, L = C.q, C.m * C.mp
    for s in range(0, total, chunk):
        idx = np.arange(s, min(s + chunk, total), dtype=np.int64)
        Y = np.zeros((idx.size, L), dtype=np.int64)
        for i, j in enumerate(free):
            Y[:, j] = (idx // q**i) % q
        yield Y.reshape(-1, C.m, C.mp)


def _min_distances(C: MatrixCode, Y: np.ndarray) -> np.ndarray:
    F = C.field
    D = np.asarray(F.sub(C.matrices[None], Y[:, None]))
    return _ranks(F, D.reshape(-1, C.m, C.mp)).reshape(Y.shape[0], -1).min(axis=1)


def covering_radius_exact(C: MatrixCode, cross_check: bool = True) -> CoveringReport:
    """rho(C) by sweeping every Y; the deep hole found first is the witness.

    With ``cross_check`` and d = m, also computes the least h such that some
    m-space disjoint from S_inf is (A_C, h)-scattered, measured as subspace
    intersections, and requires rho = m - h.
    """
    n_, mp = len(C), C.mp
    lb = covering_radius_lower_bound(C.m, mp, C.q, size=n_)
    free, total = _sweep_space(C)
    check_guard("covering radius sweep", total, SWEEP_GUARD)
    chunk = max(1, CHUNK // n_)
    best, witness = -1, None
    for Y in _iter_Y(C, free, total, chunk):
        dist = _min_distances(C, Y)
        i = int(dist.argmax())
        if dist[i] > best:
            best, witness = int(dist[i]), Y[i].copy()
        if best == C.m:
            break
    rep = CoveringReport(best, lb.bound, lb.h_star, witness)
    if min_rank_distance(C) == C.m:
        rep.extendable = best == C.m
        if cross_check:
            rep.scattered_h_min = scattered_h_min(C)
            if not rep.agree:
                raise VerificationError("covering radius disagrees with the scattered-space formulation")
        if lb.bound > best:
            raise VerificationError("lower bound exceeds the exact covering radius")
    return rep


def scattered_h_min(C: MatrixCode) -> int:
    """min over m-spaces U disjoint from S_inf of max_{S in A_C} dim(U ∩ S).

    Every such U is the row space of [I | Y]; intersections are measured
    directly against the spread elements.
    """
    A, _ = code_to_partial_spread(C)
    F, m, mp = C.field, C.m, C.mp
    total = C.q ** (m * mp)
    check_guard("scattered formulation sweep", total, SWEEP_GUARD)
    all_free = np.arange(m * mp, dtype=np.int64)
    best = m
    eye = np.broadcast_to(np.eye(m, dtype=np.int64), (1, m, m))
    for Y in _iter_Y(C, all_free, total, CHUNK):
        Ms = np.concatenate([np.broadcast_to(eye, (Y.shape[0], m, m)), Y], axis=2)
        best = min(best, int(batch_max_intersection(A, Ms).min()))
        if best == 0:
            break
    return best


def find_extension(C: MatrixCode) -> np.ndarray | None:
    """A matrix Y with rank(A - Y) = m for all A in C, or None."""
    free = np.arange(C.m * C.mp, dtype=np.int64)
    total = C.q ** len(free)
    check_guard("extension search", total, SWEEP_GUARD)
    for Y in _iter_Y(C, free, total, max(1, CHUNK // len(C))):
        dist = _min_distances(C, Y)
        hit = np.flatnonzero(dist == C.m)
        if hit.size:
            return Y[hit[0]].copy()
    return None


# codes from scattered subspaces


@dataclass
class ScatteredCodeReport:
    size: int
    expected_size: int
    distance: int
    distance_bound: int
    linear_by_criterion: bool
    linear_by_closure: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _abar(A: PartialSpread) -> np.ndarray:
    tower = A.tower
    F = tower.top
    P = codes_to_fqm(A.points, tower.Q, A.n)
    lam = F.nonzero()
    V = np.asarray(F.mul(lam[None, :, None], P[:, None, :])).reshape(-1, A.n)
    return np.vstack([np.zeros((1, A.n), np.int64), V])


def _points_form_subspace(A: PartialSpread) -> bool:
    tower = A.tower
    if len(A) == 0:
        return False
    W = canonicalize(tower.top, codes_to_fqm(A.points, tower.Q, A.n), A.n)
    return (tower.Q**W.dim - 1) // (tower.Q - 1) == len(A)


def code_from_scattered(A: PartialSpread, U: Subspace, h: int,
                        check_precondition: bool = True) -> tuple[MatrixCode, ScatteredCodeReport]:
    """{G o tau_v : v in Abar} with G any F_q-map whose kernel is U.

    G is the annihilator of U, so G(x) = Ann(U) x; each codeword is the
    m x (mn - k) matrix whose row i is G(beta_i v).
    """
    if not A.is_point_indexed or A.tower is None:
        raise ValidationError("need a partial Desarguesian spread")
    tower, n = A.tower, A.n
    m, N, F = tower.m, A.N, tower.base
    if not 1 <= h < m:
        raise ValidationError("need 1 <= h < m")
    if U.N != N:
        raise ValidationError("U lives in a different ambient space")
    if check_precondition and not is_scattered(U, second_order_closure(A), h):
        raise ValidationError("U is not (A^(2), h)-scattered")
    G = U.annihilator().rows
    if G.shape[0] == 0:
        raise ValidationError("U is the whole space")
    V = _abar(A)
    beta = np.array(tower.basis, dtype=np.int64)
    BV = np.asarray(tower.top.mul(beta[None, :, None], V[:, None, :]))
    E = expand(tower, BV)
    mats = matmul(F, E, G.T)
    expected = len(A) * (tower.Q - 1) + 1
    if len(np.unique(mats.reshape(mats.shape[0], -1), axis=0)) != expected:
        raise VerificationError("code size differs from s(q^m - 1) + 1")
    C = MatrixCode(tower.q, m, G.shape[0], mats, field=F)
    d = min_rank_distance(C)
    if d < m - h:
        raise VerificationError(f"minimum distance {d} < m - h = {m - h}")
    crit = _points_form_subspace(A)
    if crit != C.linear:
        raise VerificationError("linearity criterion and closure test disagree")
    return C, ScatteredCodeReport(len(C), expected, d, m - h, crit, C.linear)


# text format


def dumps_code(C: MatrixCode) -> str:
    lines = [f"{C.q} {C.m} {C.mp} {len(C)} {int(C.linear)}"]
    lines += [" ".join(map(str, row)) for row in C.flat.tolist()]
    return "\n".join(lines) + "\n"


def loads_code(text: str) -> MatrixCode:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValidationError("empty code file")
    try:
        q, m, mp, count, lin = map(int, lines[0].split())
        mats = np.array([list(map(int, ln.split())) for ln in lines[1:1 + count]], dtype=np.int64)
    except ValueError as exc:
        raise ValidationError(f"malformed code file: {exc}") from None
    if mats.shape != (count, m * mp):
        raise ValidationError("code file body does not match its header")
    return MatrixCode(q, m, mp, mats.reshape(count, m, mp), linear=bool(lin) or None)


__all__ = [
    "MatrixCode", "min_rank_distance", "singleton_defect", "singleton_log_bound", "is_mrd",
    "field_multiplication_code", "random_linear_code", "code_to_partial_spread",
    "partial_spread_to_code", "covering_radius_lower_bound", "covering_radius_exact",
    "scattered_h_min", "find_extension", "code_from_scattered", "CoveringReport",
    "LowerBound", "dumps_code", "loads_code", "GuardError",
]
