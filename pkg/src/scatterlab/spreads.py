"""Partial m-spreads: the Desarguesian spread, validation, closures and the
tight constructions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError, VerificationError, check_guard
from .expansion import (codes_to_fqm, expand, fq_expansion, fqm_to_codes, normalize,
                        point_codes_of)
from .fields import FieldTower, FiniteField
from .subspaces import (Subspace, _parse_subspace, canonicalize, dumps_subspace, full_space,
                        inverse, matmul, zero_space)

KINDS = ("desarguesian", "partial-desarguesian", "constructed", "adhoc")
TABLE_GUARD = 1 << 24
PAIR_GUARD = 10**6


def desarguesian_points(tower: FieldTower, n: int) -> np.ndarray:
    """Sorted codes of all normalized nonzero vectors of F_{q^m}^n."""
    Q = tower.Q
    check_guard("Desarguesian spread size", (Q**n - 1) // (Q - 1), 10**7)
    out = []
    for lead in range(n):
        tail = np.arange(Q ** (n - 1 - lead), dtype=np.int64)
        out.append(Q**lead + tail * Q ** (lead + 1))
    return np.sort(np.concatenate(out)) if out else np.zeros(0, np.int64)


class PartialSpread:
    """A family of m-subspaces of F_q^N pairwise meeting in {0}.

    Desarguesian-tagged spreads are stored by their projective point codes
    (sorted); the elements are expanded on demand. Other spreads hold
    explicit elements sorted by canonical RREF bytes.
    """

    def __init__(self, field: FiniteField, N: int, m: int, kind: str,
                 elements: Sequence[Subspace] | None = None, tower: FieldTower | None = None,
                 points: np.ndarray | None = None):
        if kind not in KINDS:
            raise ValidationError(f"unknown spread kind {kind!r}")
        self.field, self.N, self.m, self.kind, self.tower = field, N, m, kind, tower
        self.n = N // m if tower is not None else None
        self._classifier: PointClassifier | None = None
        if points is not None:
            if tower is None:
                raise ValidationError("point-indexed spreads need a tower")
            self.points = np.unique(np.asarray(points, dtype=np.int64))
            self._elements = None
        else:
            self.points = None
            els = sorted(set(elements or []))
            for S in els:
                if S.N != N or S.field != field:
                    raise ValidationError("element in wrong ambient space")
                if S.dim != m:
                    raise ValidationError(f"element of dimension {S.dim}, expected {m}")
            self._elements = els

    def __len__(self) -> int:
        return len(self.points) if self.points is not None else len(self._elements)

    def __repr__(self) -> str:
        return f"PartialSpread(kind={self.kind}, q={self.field.order}, N={self.N}, m={self.m}, size={len(self)})"

    @property
    def is_point_indexed(self) -> bool:
        return self.points is not None

    def point_vector(self, i: int) -> np.ndarray:
        return codes_to_fqm(self.points[i], self.tower.Q, self.n)

    def element(self, i: int) -> Subspace:
        if self.points is None:
            return self._elements[i]
        return fq_expansion(self.tower, self.point_vector(i).reshape(1, -1), self.n)

    @property
    def elements(self) -> list[Subspace]:
        if self._elements is None:
            check_guard("spread element expansion", len(self), 10**6)
            self._elements = [self.element(i) for i in range(len(self))]
        return self._elements

    def __iter__(self):
        return iter(self.elements)

    def classifier(self) -> PointClassifier:
        if self._classifier is None:
            strategy = "desarguesian-normalize" if self.is_point_indexed else "generic-meet"
            self._classifier = PointClassifier(self, strategy)
        return self._classifier

    def index_of(self, S: Subspace) -> int:
        """Index of element S, or -1."""
        if self.points is not None:
            if S.dim != self.m or self.tower is None:
                return -1
            codes = S.codes()
            nz = codes[codes != 0]
            pc = np.unique(point_codes_of(self.tower, nz, self.n))
            if pc.size != 1:
                return -1
            i = int(np.searchsorted(self.points, pc[0]))
            return i if i < len(self.points) and self.points[i] == pc[0] else -1
        els = self._elements
        lo, hi = 0, len(els)
        while lo < hi:
            mid = (lo + hi) // 2
            if els[mid].key < S.key:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo < len(els) and els[lo] == S else -1


class PointClassifier:
    """Maps F_q^N vector codes to the index of the spread element containing them.

    ``desarguesian-normalize`` normalizes the F_{q^m}-vector and looks up its
    point code; ``generic-meet`` uses a dense table filled from the elements.
    Vectors outside every element (and the zero vector) map to -1.
    """

    def __init__(self, spread: PartialSpread, strategy: str = "generic-meet"):
        if strategy not in ("desarguesian-normalize", "generic-meet"):
            raise ValidationError(f"unknown strategy {strategy!r}")
        if strategy == "desarguesian-normalize" and not spread.is_point_indexed:
            raise ValidationError("desarguesian-normalize needs a point-indexed spread")
        self.spread = spread
        self.strategy = strategy
        self._table = None
        if strategy == "generic-meet":
            size = spread.field.order**spread.N
            check_guard("generic classifier table", size, TABLE_GUARD)
            table = np.full(size, -1, dtype=np.int64)
            for i, S in enumerate(spread.elements):
                c = S.codes()
                table[c[c != 0]] = i
            self._table = table

    def point_codes(self, codes) -> np.ndarray:
        sp = self.spread
        return point_codes_of(sp.tower, codes, sp.n)

    def classify(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if self._table is not None:
            return self._table[codes]
        pts = self.spread.points
        if len(pts) == 0:
            return np.full(codes.shape, -1, dtype=np.int64)
        pc = self.point_codes(codes)
        idx = np.searchsorted(pts, pc)
        idx_c = np.minimum(idx, len(pts) - 1)
        ok = (pc != 0) & (pts[idx_c] == pc)
        return np.where(ok, idx_c, -1)


def desarguesian_spread(tower: FieldTower, n: int) -> PartialSpread:
    if n < 1:
        raise ValidationError("n must be >= 1")
    return PartialSpread(tower.base, tower.m * n, tower.m, "desarguesian", tower=tower,
                         points=desarguesian_points(tower, n))


def spread_from_points(tower: FieldTower, n: int, vectors, kind: str = "partial-desarguesian") -> PartialSpread:
    """Partial Desarguesian spread given F_{q^m}-vectors spanning its points."""
    V = np.asarray(vectors, dtype=np.int64).reshape(-1, n)
    if (V == 0).all(axis=1).any():
        raise ValidationError("zero vector does not span a point")
    pc = fqm_to_codes(normalize(tower.top, V), tower.Q)
    return PartialSpread(tower.base, tower.m * n, tower.m, kind, tower=tower, points=pc)


@dataclass
class SpreadReport:
    is_partial: bool
    is_full: bool
    is_normal: bool
    normal_vacuous: bool
    desarguesian_inferred: bool
    size: int
    expected_full_size: int | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _all_nonzero_codes(A: PartialSpread) -> np.ndarray:
    if A.is_point_indexed:
        return np.concatenate([A.element(i).codes()[1:] for i in range(len(A))]) if len(A) else np.zeros(0, np.int64)
    return np.concatenate([S.codes()[1:] for S in A.elements]) if len(A) else np.zeros(0, np.int64)


def validate(A: PartialSpread, check_normal: bool = True) -> SpreadReport:
    q, N, m = A.field.order, A.N, A.m
    dims_ok = all(S.dim == m for S in A.elements)
    codes = _all_nonzero_codes(A)
    is_partial = dims_ok and np.unique(codes).size == codes.size
    full_size = (q**N - 1) // (q**m - 1) if m and N % m == 0 else None
    is_full = is_partial and full_size is not None and len(A) == full_size
    n_blocks = N // m if m and N % m == 0 else None
    normal = is_partial and (_is_normal(A) if check_normal else False)
    vacuous = n_blocks is not None and n_blocks <= 2
    return SpreadReport(
        is_partial=bool(is_partial), is_full=bool(is_full), is_normal=bool(normal),
        normal_vacuous=bool(vacuous),
        desarguesian_inferred=bool(is_full and normal and n_blocks is not None and n_blocks >= 3),
        size=len(A), expected_full_size=full_size)


def _is_normal(A: PartialSpread) -> bool:
    """Every pair spans a subspace that the spread elements meeting it tile."""
    s = len(A)
    if s < 2:
        return True
    check_guard("normality pair sweep", s * (s - 1) // 2, PAIR_GUARD)
    q, m = A.field.order, A.m
    cls = A.classifier()
    els = A.elements
    per_element = q**m - 1
    for i in range(s):
        for j in range(i + 1, s):
            W = els[i].join(els[j])
            c = W.codes()[1:]
            idx = cls.classify(c)
            if (idx < 0).any():
                return False
            counts = np.bincount(idx, minlength=s)
            touched = counts[counts > 0]
            if (touched != per_element).any():
                return False
    return True


def second_order_closure(A: PartialSpread) -> PartialSpread:
    """All F_{q^m}-points on lines joining two points of A."""
    if not A.is_point_indexed or A.tower is None:
        raise ValidationError("second-order closure needs a partial Desarguesian spread with a tower")
    tower, n = A.tower, A.n
    F = tower.top
    s = len(A)
    check_guard("second-order closure", s * (s - 1) // 2 * tower.Q, 10**8)
    P = codes_to_fqm(A.points, tower.Q, n)
    lam = F.elements()
    found = [A.points]
    for i in range(s):
        if i + 1 >= s:
            break
        # P_i + lambda * P_j for all j > i and all lambda
        Pj = P[i + 1:]
        comb = F.add(P[i][None, None, :], F.mul(lam[None, :, None], Pj[:, None, :]))
        found.append(fqm_to_codes(normalize(F, comb.reshape(-1, n)), tower.Q))
    pts = np.unique(np.concatenate(found))
    kind = "desarguesian" if len(pts) == (tower.Q**n - 1) // (tower.Q - 1) else "partial-desarguesian"
    return PartialSpread(A.field, A.N, A.m, kind, tower=tower, points=pts)


def restrict_spread(A: PartialSpread, avoid: Subspace) -> PartialSpread:
    """Elements of A not contained in ``avoid``."""
    if avoid.N != A.N:
        raise ValidationError("avoid lives in a different ambient space")
    if A.is_point_indexed:
        inside = np.zeros(len(A), dtype=bool)
        if avoid.dim >= A.m:
            tower = A.tower
            P = codes_to_fqm(A.points, tower.Q, A.n)
            inside[:] = True
            for b in tower.basis:
                R = avoid.reduce(expand(tower, tower.top.mul(P, b)))
                inside &= ~R.any(axis=1)
        keep = ~inside
        kind = "partial-desarguesian" if (~keep).any() else A.kind
        return PartialSpread(A.field, A.N, A.m, kind, tower=A.tower, points=A.points[keep])
    els = [S for S in A.elements if not avoid.contains_subspace(S)]
    kind = A.kind if len(els) == len(A) else ("adhoc" if A.kind == "adhoc" else "constructed")
    return PartialSpread(A.field, A.N, A.m, kind, elements=els, tower=A.tower)


def _max_intersection(U: Subspace, A: PartialSpread) -> int:
    from .scattered import scatter_profile
    return scatter_profile(U, A).max_dim


def _fq_coordinate_block(tower: FieldTower, n: int, coords: Sequence[int]) -> Subspace:
    """F_q-expansion of the F_{q^m}-coordinate subspace on ``coords``."""
    m = tower.m
    rows = np.zeros((len(coords) * m, n * m), dtype=np.int64)
    for t, j in enumerate(coords):
        for i in range(m):
            rows[t * m + i, j * m + i] = 1
    return canonicalize(tower.base, rows, n * m)


def _tight_base(tower: FieldTower, h: int) -> tuple[Subspace, Subspace]:
    """n = 2: U = {(x, x^q)} + (h-1)-subspace of <e_1>. Returns (U, U_1)."""
    m, q = tower.m, tower.q
    x = np.array(tower.basis, dtype=np.int64)
    U0 = np.concatenate([tower.coords(x), tower.coords(tower.frobenius(x, 1))], axis=1)
    U1 = np.zeros((h - 1, 2 * m), dtype=np.int64)
    for i in range(h - 1):
        U1[i, i] = 1
    U = canonicalize(tower.base, np.vstack([U0, U1]), 2 * m)
    return U, canonicalize(tower.base, U1, 2 * m)


def _extend_basis(F: FiniteField, U: Subspace) -> np.ndarray:
    """Rows of U followed by unit vectors completing it to a basis."""
    free = [c for c in range(U.N) if c not in U.pivots]
    E = np.zeros((len(free), U.N), dtype=np.int64)
    for t, c in enumerate(free):
        E[t, c] = 1
    return np.vstack([U.rows, E])


def _tight_spread(tower: FieldTower, n: int, h: int) -> tuple[list[Subspace], Subspace]:
    F = tower.base
    m = tower.m
    if n == 2:
        D = desarguesian_spread(tower, 2)
        U, _ = _tight_base(tower, h)
        return list(D.elements), U
    N = m * n
    U2, U1 = _tight_base(tower, h)
    # U = U_2 (+) X_{n-2}, with X_2 the first two F_{q^m}-coordinates
    U_rows = [np.hstack([U2.rows, np.zeros((U2.dim, N - 2 * m), np.int64)])]
    U_rows.append(_fq_coordinate_block(tower, n, range(2, n)).rows)
    U = canonicalize(F, np.vstack(U_rows), N)
    # X_{n-1} = S (+) X_{n-2}, S the first coordinate; elements of D inside it are replaced
    keep_cols = list(range(m)) + list(range(2 * m, N))
    Dbar = desarguesian_spread(tower, n)
    P = codes_to_fqm(Dbar.points, tower.Q, n)
    outside = [Dbar.element(i) for i in np.nonzero(P[:, 1] != 0)[0]]
    sub_elements, sub_U = _tight_spread(tower, n - 1, h)
    # target: U cap X_{n-1}, written in X_{n-1}'s own coordinates
    target = canonicalize(F, U.meet(_fq_coordinate_block(tower, n, [0] + list(range(2, n)))).rows[:, keep_cols],
                          N - m)
    if target.dim != sub_U.dim:
        raise VerificationError("tight spread: dimension mismatch in inductive step")
    phi = matmul(F, inverse(F, _extend_basis(F, sub_U)), _extend_basis(F, target))
    inside = []
    for S in sub_elements:
        img = matmul(F, S.rows, phi)
        full = np.zeros((S.dim, N), dtype=np.int64)
        full[:, keep_cols] = img
        inside.append(canonicalize(F, full, N))
    return outside + inside, U


def construct_tight_spread(tower: FieldTower, n: int, h: int) -> tuple[PartialSpread, Subspace]:
    """Full m-spread and an (A,h)-scattered subspace of dimension m(n-1)+h-1."""
    m = tower.m
    if m < 2 or not 1 <= h <= m:
        raise ValidationError("need m >= 2 and 1 <= h <= m")
    if n < 2:
        raise ValidationError("need n >= 2")
    check_guard("tight spread size", (tower.Q**n - 1) // (tower.Q - 1), 10**5)
    elements, U = _tight_spread(tower, n, h)
    A = PartialSpread(tower.base, m * n, m, "constructed", elements=elements, tower=tower)
    rep = validate(A, check_normal=False)
    if not rep.is_full:
        raise VerificationError("tight spread is not a full spread")
    if U.dim != m * (n - 1) + h - 1:
        raise VerificationError("tight spread: wrong subspace dimension")
    if _max_intersection(U, A) > h:
        raise VerificationError("tight spread: subspace is not (A,h)-scattered")
    return A, U


def partial_spread_tight(tower: FieldTower, n: int, h: int) -> tuple[PartialSpread, Subspace]:
    """Partial Desarguesian spread of size q^{m(n-1)} and an (A,h)-scattered
    subspace X_1 + H of dimension m(n-1)+h."""
    m = tower.m
    if not 1 <= h <= m or n < 2:
        raise ValidationError("need 1 <= h <= m and n >= 2")
    N = m * n
    D = desarguesian_spread(tower, n)
    P = codes_to_fqm(D.points, tower.Q, n)
    A = PartialSpread(tower.base, N, m, "partial-desarguesian", tower=tower,
                      points=D.points[P[:, 0] != 0])
    X1 = _fq_coordinate_block(tower, n, range(1, n))
    H = np.zeros((h, N), dtype=np.int64)
    for i in range(h):
        H[i, i] = 1
    U = canonicalize(tower.base, np.vstack([X1.rows, H]), N)
    if len(A) != tower.q ** (m * (n - 1)) or U.dim != m * (n - 1) + h:
        raise VerificationError("partial tight spread: wrong size or dimension")
    if _max_intersection(U, A) > h:
        raise VerificationError("partial tight spread: subspace is not (A,h)-scattered")
    return A, U


# text format


def dumps_spread(A: PartialSpread) -> str:
    n = A.N // A.m if A.m else 0
    parts = [f"{A.field.order} {A.m} {n} {A.kind} {len(A)}\n"]
    parts += [dumps_subspace(S) for S in A.elements]
    return "".join(parts)


def loads_spread(text: str, field: FiniteField, tower: FieldTower | None = None) -> PartialSpread:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    try:
        q, m, n, kind, count = lines[0].split()
        q, m, n, count = int(q), int(m), int(n), int(count)
    except (ValueError, IndexError) as exc:
        raise ValidationError("bad spread header, expected 'q m n kind count'") from exc
    if q != field.order:
        raise ValidationError("spread file field order mismatch")
    pos = 1
    els = []
    for _ in range(count):
        S, used = _parse_subspace(lines[pos:], field)
        els.append(S)
        pos += used
    if kind in ("desarguesian", "partial-desarguesian") and tower is not None:
        pcs = []
        for S in els:
            c = S.codes()[1:]
            pc = np.unique(point_codes_of(tower, c, n))
            if pc.size != 1:
                raise ValidationError("element is not an F_{q^m}-point")
            pcs.append(pc[0])
        return PartialSpread(field, m * n, m, kind, tower=tower, points=np.array(pcs, dtype=np.int64))
    if kind in ("desarguesian", "partial-desarguesian"):
        kind = "adhoc"
    return PartialSpread(field, m * n, m, kind, elements=els, tower=tower)


def single_element_spread(S: Subspace, tower: FieldTower | None = None) -> PartialSpread:
    return PartialSpread(S.field, S.N, S.dim, "adhoc", elements=[S], tower=tower)


__all__ = [
    "PartialSpread", "PointClassifier", "SpreadReport", "desarguesian_spread", "spread_from_points",
    "validate", "second_order_closure", "restrict_spread", "construct_tight_spread",
    "partial_spread_tight", "dumps_spread", "loads_spread", "single_element_spread",
    "full_space", "zero_space",
]
