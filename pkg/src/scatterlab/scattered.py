"""(A,h)-scattered subspaces: profiles, constructions, searches and bounds."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ValidationError, VerificationError, check_guard
from .expansion import contract, expand, fqm_span
from .fields import FieldTower
from .qmath import gauss_binomial
from .spreads import PartialSpread, desarguesian_spread, restrict_spread, _fq_coordinate_block
from .subspaces import (Subspace, batch_rank, canonicalize, enumerate_subspaces, max_run_lengths,
                        sample_full_rank, span_codes, zero_space)

VECTOR_GUARD = 1 << 24
VERIFY_VECTORS = 1 << 22
VERIFY_POINTS = 10**7
SUBSPACE_GUARD = 10**6


@dataclass
class ScatterProfile:
    """Nonzero intersection dimensions per spread element index."""

    dims: dict[int, int]
    max_dim: int
    witness: int | None

    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.dims.values()).items()))

    def to_record(self) -> dict:
        return {"max_dim": self.max_dim, "witness_index": self.witness,
                "histogram": {str(k): v for k, v in self.histogram().items()}}


def _dim_lookup(q: int, top: int) -> np.ndarray:
    """lookup[c] = d when c = q^d - 1, else -1."""
    lut = np.full(top + 2, -1, dtype=np.int64)
    d = 0
    while q**d - 1 <= top + 1:
        lut[q**d - 1] = d
        d += 1
    return lut


def scatter_profile(U: Subspace, A: PartialSpread, path: str = "auto") -> ScatterProfile:
    """Exact dim(U ∩ S) for every element S of A meeting U nontrivially."""
    if U.N != A.N or U.field != A.field:
        raise ValidationError("subspace and spread live in different ambient spaces")
    if U.dim == 0 or len(A) == 0:
        return ScatterProfile({}, 0, None)
    q = U.field.order
    if path == "auto":
        path = "fast" if q**U.dim <= VECTOR_GUARD else "generic"
    if path == "fast":
        check_guard("scatter profile vectors", q**U.dim, VECTOR_GUARD)
        idx = A.classifier().classify(U.codes()[1:])
        idx = idx[idx >= 0]
        if idx.size == 0:
            return ScatterProfile({}, 0, None)
        elems, counts = np.unique(idx, return_counts=True)
        lut = _dim_lookup(q, int(counts.max()))
        dims = lut[counts]
        if (dims < 0).any():
            raise VerificationError("intersection size is not a power of q")
        dmap = {int(e): int(d) for e, d in zip(elems, dims)}
    elif path == "generic":
        dmap = {}
        for i, S in enumerate(A.elements):
            d = U.dim + S.dim - U.join(S).dim
            if d:
                dmap[i] = d
    else:
        raise ValidationError(f"unknown path {path!r}")
    if not dmap:
        return ScatterProfile({}, 0, None)
    witness = min(dmap, key=lambda i: (-dmap[i], i))
    return ScatterProfile(dmap, dmap[witness], witness)


def is_scattered(U: Subspace, A: PartialSpread, h: int) -> bool:
    return scatter_profile(U, A).max_dim <= h


def batch_max_intersection(A: PartialSpread, Ms: np.ndarray) -> np.ndarray:
    """max_S dim(rowspace(M) ∩ S) for a stack (B, k, N) of full-rank matrices."""
    Ms = np.asarray(Ms, dtype=np.int64)
    B, k, _ = Ms.shape
    q = A.field.order
    if B == 0:
        return np.zeros(0, dtype=np.int64)
    if k == 0:
        return np.zeros(B, dtype=np.int64)
    check_guard("batch scatter vectors", q**k, VECTOR_GUARD)
    codes = span_codes(A.field, Ms)[:, 1:]
    idx = A.classifier().classify(codes.reshape(-1)).reshape(codes.shape)
    idx.sort(axis=1)
    counts = max_run_lengths(idx)
    lut = _dim_lookup(q, int(counts.max()) if counts.size else 0)
    dims = lut[counts]
    if (dims < 0).any():
        raise VerificationError("intersection size is not a power of q")
    return dims


# h-scattered subspaces (w.r.t. all h-dimensional F_{q^m}-subspaces)


def _hscatter_max(U: Subspace, tower: FieldTower, n: int, h: int) -> int:
    """max over h-dim F_{q^m}-subspaces W of dim_{F_q}(U ∩ W)."""
    if h >= n:
        return U.dim
    if h == 0 or U.dim == 0:
        return 0
    F = tower.top
    cursor = enumerate_subspaces(F, n, n - h, guard=SUBSPACE_GUARD)
    Uq = contract(tower, U.rows)  # (dimU, n) over F_Q
    best = 0
    for V in cursor.batches(1 << 12):
        # W = V^perp; U ∩ W = kernel of u -> (u . v_i)_i
        dots = np.zeros((V.shape[0], U.dim, n - h), dtype=np.int64)
        for c in range(n):
            dots = F.add(dots, F.mul(Uq[None, :, None, c], V[:, None, :, c]))
        M = tower.coords(dots).reshape(V.shape[0], U.dim, (n - h) * tower.m)
        best = max(best, int(U.dim - batch_rank(tower.base, M).min()))
        if best > h:
            break
    return best


def is_h_scattered(U: Subspace, tower: FieldTower, n: int, h: int) -> bool:
    if U.N != tower.m * n:
        raise ValidationError("U is not in F_q^{mn}")
    if not 1 <= h <= n - 1:
        raise ValidationError("need 1 <= h <= n-1")
    if fqm_span(tower, U).dim != n:
        return False
    return _hscatter_max(U, tower, n, h) <= h


# explicit families


def _frob_rows(tower: FieldTower, exps: Sequence[int | None]) -> np.ndarray:
    """Rows (x^{q^e1}, ..., x^{q^en}) for x over the F_q-basis; None gives 0."""
    x = np.array(tower.basis, dtype=np.int64)
    cols = [tower.coords(tower.frobenius(x, e)) if e is not None else np.zeros((tower.m, tower.m), np.int64)
            for e in exps]
    return np.concatenate(cols, axis=1)


def _block_diag(parts: Sequence[np.ndarray], widths: Sequence[int]) -> np.ndarray:
    total = sum(widths)
    rows = []
    off = 0
    for P, w in zip(parts, widths):
        R = np.zeros((P.shape[0], total), dtype=np.int64)
        R[:, off:off + w] = P
        rows.append(R)
        off += w
    return np.vstack(rows) if rows else np.zeros((0, total), np.int64)


def _verify(U: Subspace, A: PartialSpread, h: int, what: str) -> None:
    q = U.field.order
    if q**U.dim > VERIFY_VECTORS or len(A) > VERIFY_POINTS:
        return
    if scatter_profile(U, A).max_dim > h:
        raise VerificationError(f"{what}: construction is not (A,{h})-scattered")


def construct_family(kind: str, tower: FieldTower, *, t: int | None = None, n: int | None = None,
                     h: int | None = None, parts: Sequence[Subspace] | None = None,
                     inner: Subspace | None = None, t2: int | None = None,
                     verify: bool = True) -> Subspace:
    """Build an explicit scattered subspace of F_q^{mn}.

    kinds: ``even-n`` (t), ``odd-n`` (t), ``pseudoregulus`` (n), ``alt-pseudoregulus``,
    ``direct-sum`` (parts, h), ``padded`` (inner, n, h), ``complement-augmented``
    (inner, t2, h).
    """
    F, m, q = tower.base, tower.m, tower.q
    if kind == "even-n":
        if t is None or t < 1:
            raise ValidationError("even-n needs t >= 1")
        n = 2 * t
        block = _frob_rows(tower, [0, 1])
        U = canonicalize(F, _block_diag([block] * t, [2 * m] * t), m * n)
        if U.dim != m * t:
            raise VerificationError("even-n: wrong dimension")
        if verify:
            _verify(U, desarguesian_spread(tower, n), 1, kind)
        return U
    if kind == "odd-n":
        if t is None or t < 0:
            raise ValidationError("odd-n needs t >= 0")
        n = 2 * t + 1
        block = _frob_rows(tower, [0, 1])
        last = np.zeros((1, m), dtype=np.int64)
        last[0, 0] = 1
        U = canonicalize(F, _block_diag([block] * t + [last], [2 * m] * t + [m]), m * n)
        if U.dim != m * t + 1:
            raise VerificationError("odd-n: wrong dimension")
        if verify:
            _verify(U, desarguesian_spread(tower, n), 1, kind)
        return U
    if kind == "pseudoregulus":
        if n is None or not 1 <= n <= m:
            raise ValidationError("pseudoregulus needs 1 <= n <= m")
        U = canonicalize(F, _frob_rows(tower, list(range(n))), m * n)
        if U.dim != m:
            raise VerificationError("pseudoregulus: wrong dimension")
        if verify and n >= 2:
            try:
                ok = is_h_scattered(U, tower, n, n - 1)
            except Exception as exc:  # guard: too large to verify
                if type(exc).__name__ != "GuardError":
                    raise
                ok = True
            if not ok:
                raise VerificationError("pseudoregulus is not (n-1)-scattered")
        return U
    if kind == "alt-pseudoregulus":
        p = tower.p
        if not ((m == 7 and p != 2) or (m == 8 and q % 3 == 1)):
            raise ValidationError("alt-pseudoregulus needs m=7 with q odd, or m=8 with q = 1 mod 3")
        U = canonicalize(F, _frob_rows(tower, [0, 1, 3]), 3 * m)
        # scatteredness is only known from outside, so this check is mandatory
        if not is_h_scattered(U, tower, 3, 2):
            raise VerificationError("alt-pseudoregulus failed its 2-scattered check")
        return U
    if kind == "direct-sum":
        if not parts or h is None:
            raise ValidationError("direct-sum needs parts and h")
        widths = [P.N for P in parts]
        if any(w % m or w // m < 2 for w in widths):
            raise ValidationError("each summand must live in F_{q^m}^{d} with d >= 2")
        N = sum(widths)
        U = canonicalize(F, _block_diag([P.rows for P in parts], widths), N)
        if verify:
            _verify(U, desarguesian_spread(tower, N // m), h, kind)
        return U
    if kind == "padded":
        if inner is None or n is None or h is None:
            raise ValidationError("padded needs inner, n and h")
        if inner.N % m or inner.N > m * n:
            raise ValidationError("inner subspace does not fit")
        rows = np.zeros((inner.dim, m * n), dtype=np.int64)
        rows[:, :inner.N] = inner.rows
        U = canonicalize(F, rows, m * n)
        if verify:
            _verify(U, desarguesian_spread(tower, n), h, kind)
        return U
    if kind == "complement-augmented":
        if inner is None or t2 is None or h is None:
            raise ValidationError("complement-augmented needs inner, t2 and h")
        if inner.N % m:
            raise ValidationError("inner subspace must live in F_{q^m}^{t1}")
        t1 = inner.N // m
        n = t1 + t2
        T2 = _fq_coordinate_block(tower, n, range(t1, n))
        rows = np.zeros((inner.dim, m * n), dtype=np.int64)
        rows[:, :inner.N] = inner.rows
        U = canonicalize(F, np.vstack([rows, T2.rows]), m * n)
        if verify:
            A = restrict_spread(desarguesian_spread(tower, n), T2)
            _verify(U, A, h, kind)
        return U
    raise ValidationError(f"unknown family kind {kind!r}")


# bounds


@dataclass(frozen=True)
class BoundTable:
    m: int
    n: int
    h: int
    general_bound: int
    spread_bound: int
    desarguesian_bound: int
    sharper: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def bound_table(m: int, n: int, h: int) -> BoundTable:
    """Dimension bounds for (A,h)-scattered subspaces of F_q^{mn}.

    ``sharper`` compares the full-spread bound m(n-1)+h-1 with hmn/(h+1).
    """
    if not 1 <= h <= m:
        raise ValidationError("need 1 <= h <= m")
    general = m * (n - 1) + h
    spread = general - 1
    desarg = (h * m * n) // (h + 1)
    sharper = "general" if (h + 1) * spread < h * m * n else "desarguesian"
    return BoundTable(m, n, h, general, spread, desarg, sharper)


def general_sharper_condition(m: int, n: int, h: int) -> bool:
    return n < h + 1 and Fraction(m) > Fraction(h * h - 1, h + 1 - n)


def partial_desarguesian_size_bound(m: int, n: int, k: int, h: int, q: int) -> int:
    """Upper bound on s(q^m-1)+1 when an (A^(2),h)-scattered k-space exists."""
    if k <= m * n - m:
        return q ** ((m * n - k) * (h + 1))
    return q ** (m * (m * n - k - m + h + 1))


def upper_bound_for(A: PartialSpread, h: int) -> int:
    """Best applicable dimension bound for an (A,h)-scattered subspace."""
    m, N = A.m, A.N
    n = N // m
    t = bound_table(m, n, h) if N % m == 0 else None
    if t is None:
        return N
    from .spreads import validate
    best = t.general_bound
    if len(A) and A.kind == "desarguesian":
        best = min(best, t.spread_bound, t.desarguesian_bound)
    elif len(A) == (A.field.order**N - 1) // (A.field.order**m - 1) and validate(A, check_normal=False).is_full:
        best = min(best, t.spread_bound)
    return min(best, N)


# search


@dataclass
class SearchResult:
    k_max: int
    witness: Subspace | None
    exhaustive: bool
    lower_bound_only: bool
    checked: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"k_max": self.k_max, "exhaustive": self.exhaustive,
                "lower_bound_only": self.lower_bound_only,
                "witness": None if self.witness is None else self.witness.rows.tolist(),
                "checked": {str(k): v for k, v in self.checked.items()}}


def _find_scattered(A: PartialSpread, h: int, k: int) -> Subspace | None:
    F, N = A.field, A.N
    cursor = enumerate_subspaces(F, N, k)
    for batch in cursor.batches(max(1, min(1 << 14, (1 << 22) // max(1, F.order**k)))):
        dims = batch_max_intersection(A, batch)
        hit = np.nonzero(dims <= h)[0]
        if hit.size:
            return canonicalize(F, batch[hit[0]], N)
    return None


def max_scattered_dimension(A: PartialSpread, h: int, mode: str = "exhaustive", *, seed=0,
                            trials: int = 200, start: int | None = None) -> SearchResult:
    """Largest k admitting an (A,h)-scattered k-space.

    Exhaustive mode descends from ``start`` (default: the best theoretical
    bound) and stops at the first k with a witness.  Randomized mode climbs
    from k = h and only ever reports a lower bound.
    """
    F, N = A.field, A.N
    if h < 0:
        raise ValidationError("h must be >= 0")
    if h >= A.m or len(A) == 0:
        from .subspaces import full_space
        return SearchResult(N, full_space(F, N), mode == "exhaustive", mode != "exhaustive")
    if mode == "exhaustive":
        top = upper_bound_for(A, h) if start is None else min(start, N)
        total = sum(gauss_binomial(N, k, F.order) for k in range(h + 1, top + 1))
        check_guard("exhaustive scattered search", total, 10**8)
        checked = {}
        for k in range(top, h, -1):
            W = _find_scattered(A, h, k)
            checked[k] = W is not None
            if W is not None:
                return SearchResult(k, W, True, False, checked)
        return SearchResult(h, _first_k_space(F, N, h), True, False, checked)
    if mode == "randomized":
        rng = np.random.default_rng(seed)
        best_k, best = h, _first_k_space(F, N, h)
        for k in range(h + 1, N + 1):
            Ms = sample_full_rank(F, N, k, trials, rng)
            dims = batch_max_intersection(A, Ms)
            hit = np.nonzero(dims <= h)[0]
            if not hit.size:
                break
            best_k, best = k, canonicalize(F, Ms[hit[0]], N)
        return SearchResult(best_k, best, False, True)
    raise ValidationError(f"unknown mode {mode!r}")


def _first_k_space(F, N: int, k: int) -> Subspace:
    if k == 0:
        return zero_space(F, N)
    return canonicalize(F, np.eye(N, dtype=np.int64)[:k], N)


# hyperplane spectra


def hyperplane_weight_spectrum(U: Subspace, tower: FieldTower, n: int) -> Counter:
    """Multiset {dim(H ∩ U)} over all F_{q^m}-hyperplanes H of F_{q^m}^n."""
    if U.N != tower.m * n:
        raise ValidationError("U is not in F_q^{mn}")
    count = (tower.Q**n - 1) // (tower.Q - 1)
    check_guard("hyperplane enumeration", count, 10**7)
    if U.dim == 0:
        return Counter({0: count})
    from .spreads import desarguesian_points
    from .expansion import codes_to_fqm
    F = tower.top
    pts = codes_to_fqm(desarguesian_points(tower, n), tower.Q, n)
    Uq = contract(tower, U.rows)
    out: Counter = Counter()
    for s in range(0, pts.shape[0], 1 << 14):
        P = pts[s:s + (1 << 14)]
        dots = np.zeros((P.shape[0], U.dim), dtype=np.int64)
        for c in range(n):
            dots = F.add(dots, F.mul(Uq[None, :, c], P[:, None, c]))
        M = tower.coords(dots)  # (B, dimU, m)
        dims = U.dim - batch_rank(tower.base, M)
        out.update(dims.tolist())
    return out


def charscatt_criterion(spectrum: Counter, m: int, n: int) -> bool:
    """All hyperplane intersections lie in {mn/2 - m, mn/2 - m + 1}."""
    if (m * n) % 2:
        return False
    lo = m * n // 2 - m
    return set(spectrum) <= {lo, lo + 1}


def charhscatt_criterion(spectrum: Counter, m: int, n: int, h: int) -> bool:
    """All hyperplane intersections are at most mn/(h+1) - m + h."""
    bound = Fraction(m * n, h + 1) - m + h
    return all(d <= bound for d in spectrum)
