"""Subspaces of F^N in canonical reduced row-echelon form.

Matrices are numpy int64 arrays of element codes of a :class:`FiniteField`.
The same routines serve F_q-subspaces of F_q^N and F_{q^m}-subspaces of
F_{q^m}^n, since they only depend on the field passed in.
"""

from __future__ import annotations

import itertools
from typing import Iterator

import numpy as np

from .errors import GuardError, ValidationError, check_guard
from .fields import FiniteField
from .qmath import gauss_binomial

ENUM_GUARD = 10**8


# dense linear algebra


def _as_matrix(M, N: int | None = None) -> np.ndarray:
    A = np.asarray(M, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, N or 0)
    if A.ndim != 2:
        raise ValidationError("expected a matrix")
    return A


def rref(F: FiniteField, M) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row-echelon form with zero rows dropped, plus pivot columns."""
    A = _as_matrix(M).copy()
    rows, cols = A.shape
    if rows and (A.min() < 0 or A.max() >= F.order):
        raise ValidationError("matrix entry outside the field")
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        piv = int(A[r, c])
        if piv != 1:
            A[r] = F.mul(A[r], F.inv(piv))
        col = A[:, c].copy()
        col[r] = 0
        others = np.nonzero(col)[0]
        if others.size:
            A[others] = F.sub(A[others], F.mul(col[others, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], tuple(pivots)


def rank(F: FiniteField, M) -> int:
    return len(rref(F, M)[1])


def nullspace(F: FiniteField, M, N: int | None = None) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    A = _as_matrix(M, N)
    n = A.shape[1] if N is None else N
    R, pivots = rref(F, A)
    free = [c for c in range(n) if c not in pivots]
    out = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        out[t, f] = 1
        for i, pc in enumerate(pivots):
            out[t, pc] = F.neg(int(R[i, f]))
    return out


def matmul(F: FiniteField, A, B) -> np.ndarray:
    """Matrix product over F; broadcasts over leading axes."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if F.base is None and F.degree == 1:
        return (A @ B) % F.p if F.p != 2 else (A @ B) & 1
    k = A.shape[-1]
    out = None
    for t in range(k):
        term = F.mul(A[..., :, t, None], B[..., t, None, :])
        out = term if out is None else F.add(out, term)
    if out is None:
        return np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
    return np.asarray(out, dtype=np.int64)


def inverse(F: FiniteField, M) -> np.ndarray:
    A = _as_matrix(M)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ValidationError("matrix must be square")
    R, pivots = rref(F, np.hstack([A, np.eye(n, dtype=np.int64)]))
    if pivots[:n] != tuple(range(n)) or len(pivots) < n:
        raise ValidationError("matrix is singular")
    return R[:n, n:]


def batch_rank(F: FiniteField, Ms) -> np.ndarray:
    """Ranks of a stack of matrices with shape (B, k, N)."""
    A = np.array(Ms, dtype=np.int64, copy=True)
    B, k, N = A.shape
    r = np.zeros(B, dtype=np.int64)
    if k == 0 or B == 0:
        return r
    rows = np.arange(k)
    bidx = np.arange(B)
    for c in range(N):
        cand = (A[:, :, c] != 0) & (rows[None, :] >= r[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = bidx[has]
        piv = cand[has].argmax(axis=1)
        rb = r[has]
        done = rb >= k
        b, piv, rb = b[~done], piv[~done], rb[~done]
        pr = A[b, piv].copy()
        A[b, piv] = A[b, rb]
        pr = np.asarray(F.mul(pr, np.asarray(F.inv(pr[:, c]))[:, None]), dtype=np.int64)
        A[b, rb] = pr
        col = A[b, :, c].copy()
        col[np.arange(b.size), rb] = 0
        A[b] = F.sub(A[b], F.mul(col[:, :, None], pr[:, None, :]))
        r[b] += 1
        if (r >= k).all():
            break
    return r


# canonical subspaces


class Subspace:
    """An F-subspace of F^N stored as its RREF basis (immutable, hashable)."""

    __slots__ = ("field", "N", "rows", "pivots", "_key")

    def __init__(self, field: FiniteField, N: int, rows: np.ndarray, pivots: tuple[int, ...]):
        self.field = field
        self.N = N
        rows = np.asarray(rows, dtype=np.int64).reshape(len(pivots), N)
        rows.setflags(write=False)
        self.rows = rows
        self.pivots = tuple(pivots)
        self._key = (N, len(pivots), rows.tobytes())

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def key(self) -> tuple:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self._key == other._key and self.field == other.field

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: Subspace) -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        return f"Subspace(q={self.field.order}, N={self.N}, dim={self.dim})"

    def _check(self, other: Subspace) -> None:
        if self.N != other.N or self.field != other.field:
            raise ValidationError("subspaces live in different ambient spaces")

    def reduce(self, V) -> np.ndarray:
        """Remainder of each row of V modulo this subspace (zero iff contained)."""
        V = _as_matrix(V, self.N).copy()
        F = self.field
        for i, c in enumerate(self.pivots):
            coef = V[:, c].copy()
            nz = np.nonzero(coef)[0]
            if nz.size:
                V[nz] = F.sub(V[nz], F.mul(coef[nz, None], self.rows[i][None, :]))
        return V

    def contains(self, V) -> bool:
        return not self.reduce(V).any()

    def contains_subspace(self, other: Subspace) -> bool:
        self._check(other)
        return other.dim <= self.dim and self.contains(other.rows)

    def join(self, other: Subspace) -> Subspace:
        self._check(other)
        return canonicalize(self.field, np.vstack([self.rows, other.rows]), self.N)

    def annihilator(self) -> Subspace:
        """{x : <x, u> = 0 for all u in self} under the standard dot product."""
        if self.dim == 0:
            return full_space(self.field, self.N)
        return canonicalize(self.field, nullspace(self.field, self.rows, self.N), self.N)

    def meet(self, other: Subspace) -> Subspace:
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return zero_space(self.field, self.N)
        return self.annihilator().join(other.annihilator()).annihilator()

    def coefficient_vectors(self) -> np.ndarray:
        q, k = self.field.order, self.dim
        idx = np.arange(q**k, dtype=np.int64)
        return np.stack([(idx // q**i) % q for i in range(k)], axis=-1) if k else np.zeros((1, 0), np.int64)

    def vectors(self) -> np.ndarray:
        """All q^dim vectors, as a (q^dim, N) array."""
        if self.dim == 0:
            return np.zeros((1, self.N), dtype=np.int64)
        return matmul(self.field, self.coefficient_vectors(), self.rows)

    def codes(self) -> np.ndarray:
        """Integer codes sum(v_i q^i) of all vectors, in coefficient order."""
        q = self.field.order
        weights = q ** np.arange(self.N, dtype=np.int64)
        if self.dim == 0:
            return np.zeros(1, dtype=np.int64)
        if self.field.p == 2 and q == 2:
            rc = (self.rows * weights).sum(axis=1)
            out = np.zeros(1, dtype=np.int64)
            for c in rc:
                out = np.concatenate([out, out ^ c])
            return out
        return (self.vectors() * weights).sum(axis=1)

    def basis_codes(self) -> np.ndarray:
        q = self.field.order
        return (self.rows * q ** np.arange(self.N, dtype=np.int64)).sum(axis=1)


def canonicalize(F: FiniteField, generators, N: int | None = None) -> Subspace:
    A = _as_matrix(generators, N)
    if N is not None and A.shape[1] != N:
        raise ValidationError(f"generators have {A.shape[1]} columns, ambient has {N}")
    R, piv = rref(F, A)
    return Subspace(F, A.shape[1], R, piv)


def zero_space(F: FiniteField, N: int) -> Subspace:
    return Subspace(F, N, np.zeros((0, N), dtype=np.int64), ())


def full_space(F: FiniteField, N: int) -> Subspace:
    return Subspace(F, N, np.eye(N, dtype=np.int64), tuple(range(N)))


def meet(U: Subspace, V: Subspace) -> Subspace:
    return U.meet(V)


def join(U: Subspace, V: Subspace) -> Subspace:
    return U.join(V)


def vectors_from_codes(codes, q: int, N: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return np.stack([(codes // q**i) % q for i in range(N)], axis=-1)


def vector_codes(V, q: int) -> np.ndarray:
    V = np.asarray(V, dtype=np.int64)
    return (V * q ** np.arange(V.shape[-1], dtype=np.int64)).sum(axis=-1)


# enumeration and sampling


class GrassmannianCursor:
    """Iterates over every k-subspace of F^N once, in canonical order.

    The order is by pivot pattern (lexicographic), then by free entries.
    """

    def __init__(self, F: FiniteField, N: int, k: int, guard: int = ENUM_GUARD):
        if not 0 <= k <= N:
            raise ValidationError(f"need 0 <= k <= N, got k={k}, N={N}")
        self.field, self.N, self.k = F, N, k
        self.count = gauss_binomial(N, k, F.order)
        check_guard(f"Grassmannian G_{F.order}({k},{N})", self.count, guard)

    def __len__(self) -> int:
        return self.count

    def batches(self, max_batch: int = 1 << 16) -> Iterator[np.ndarray]:
        """Yield stacks (B, k, N) of RREF matrices."""
        F, N, k = self.field, self.N, self.k
        q = F.order
        for piv in itertools.combinations(range(N), k):
            free = [(i, c) for i in range(k) for c in range(piv[i] + 1, N) if c not in piv]
            base = np.zeros((k, N), dtype=np.int64)
            for i, c in enumerate(piv):
                base[i, c] = 1
            total = q ** len(free)
            for start in range(0, total, max_batch):
                idx = np.arange(start, min(total, start + max_batch), dtype=np.int64)
                out = np.broadcast_to(base, (idx.size, k, N)).copy()
                for t, (i, c) in enumerate(free):
                    out[:, i, c] = (idx // q**t) % q
                yield out

    def __iter__(self) -> Iterator[Subspace]:
        piv_cache: dict[bytes, tuple[int, ...]] = {}
        for batch in self.batches():
            if batch.shape[0] == 0:
                continue
            key = batch[0].tobytes()
            piv = piv_cache.get(key)
            if piv is None:
                piv = tuple(int(np.nonzero(row)[0][0]) for row in batch[0]) if self.k else ()
            for M in batch:
                yield Subspace(self.field, self.N, M, piv)


def enumerate_subspaces(F: FiniteField, N: int, k: int, guard: int = ENUM_GUARD) -> GrassmannianCursor:
    return GrassmannianCursor(F, N, k, guard)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_subspace(F: FiniteField, N: int, k: int, seed=None) -> Subspace:
    """Uniform random k-subspace: rejection-sample full-rank k x N matrices."""
    if not 0 <= k <= N:
        raise ValidationError(f"need 0 <= k <= N, got k={k}, N={N}")
    rng = _rng(seed)
    while True:
        M = rng.integers(0, F.order, size=(k, N), dtype=np.int64)
        R, piv = rref(F, M)
        if len(piv) == k:
            return Subspace(F, N, R, piv)


def sample_full_rank(F: FiniteField, N: int, k: int, count: int, seed=None) -> np.ndarray:
    """``count`` uniformly random full-rank k x N matrices, shape (count, k, N).

    Their row spaces are uniform on the Grassmannian.
    """
    rng = _rng(seed)
    out = []
    have = 0
    while have < count:
        need = count - have
        M = rng.integers(0, F.order, size=(max(need + need // 2, 8), k, N), dtype=np.int64)
        M = M[batch_rank(F, M) == k][:need]
        out.append(M)
        have += M.shape[0]
    return np.concatenate(out) if out else np.zeros((0, k, N), np.int64)


# text format


def dumps_subspace(U: Subspace) -> str:
    lines = [f"{U.field.order} {U.N} {U.dim}"]
    lines += [" ".join(str(int(x)) for x in row) for row in U.rows]
    return "\n".join(lines) + "\n"


def loads_subspace(text: str, F: FiniteField) -> Subspace:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    return _parse_subspace(lines, F)[0]


def _parse_subspace(lines: list[str], F: FiniteField) -> tuple[Subspace, int]:
    try:
        q, N, k = (int(x) for x in lines[0].split())
    except (ValueError, IndexError) as exc:
        raise ValidationError("bad subspace header, expected 'q N k'") from exc
    if q != F.order:
        raise ValidationError(f"file field order {q} does not match {F.order}")
    rows = [[int(x) for x in ln.split()] for ln in lines[1:1 + k]]
    if len(rows) != k or any(len(r) != N for r in rows):
        raise ValidationError("subspace block has wrong shape")
    U = canonicalize(F, np.array(rows, dtype=np.int64).reshape(k, N), N)
    if U.dim != k:
        raise ValidationError("subspace rows are not independent")
    return U, 1 + k


__all__ = [
    "GuardError", "Subspace", "GrassmannianCursor", "rref", "rank", "nullspace", "matmul",
    "inverse", "batch_rank", "canonicalize", "meet", "join", "zero_space", "full_space",
    "enumerate_subspaces", "sample_subspace", "sample_full_rank", "dumps_subspace",
    "loads_subspace", "vector_codes", "vectors_from_codes",
]


def span_codes(F: FiniteField, Ms) -> np.ndarray:
    """Codes of every vector in the row span of each matrix in a (B, k, N) stack.

    Returns shape (B, q^k); column 0 is the zero vector. Rows need not be
    independent (repeated codes then appear).
    """
    Ms = np.asarray(Ms, dtype=np.int64)
    B, k, N = Ms.shape
    q = F.order
    weights = q ** np.arange(N, dtype=np.int64)
    if q == 2:
        rc = (Ms * weights).sum(axis=2)
        out = np.zeros((B, 1), dtype=np.int64)
        for i in range(k):
            out = np.concatenate([out, out ^ rc[:, i:i + 1]], axis=1)
        return out
    idx = np.arange(q**k, dtype=np.int64)
    coeffs = np.stack([(idx // q**i) % q for i in range(k)], axis=-1) if k else np.zeros((1, 0), np.int64)
    vecs = matmul(F, coeffs[None, :, :], Ms)
    return (vecs * weights).sum(axis=2)


def max_run_lengths(S: np.ndarray, ignore: int = -1) -> np.ndarray:
    """Largest multiplicity of a value in each row of a row-sorted array,
    not counting entries equal to ``ignore``."""
    S = np.asarray(S)
    B, L = S.shape
    if L == 0:
        return np.zeros(B, dtype=np.int64)
    j = np.arange(L, dtype=np.int64)
    new = np.ones((B, L), dtype=bool)
    new[:, 1:] = S[:, 1:] != S[:, :-1]
    start = np.maximum.accumulate(np.where(new, j[None, :], 0), axis=1)
    runs = j[None, :] - start + 1
    runs[S == ignore] = 0
    return runs.max(axis=1)
