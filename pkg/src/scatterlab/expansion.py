"""Moving between F_{q^m}^n and its F_q-expansion F_q^{mn}.

Coordinate j of a vector over F_{q^m} occupies the F_q-coordinates
``j*m .. j*m+m-1`` of the expansion, holding ``tower.coords(x_j)``.  With this
layout the integer code of a vector is the same on both sides:
``sum(v_i q^i) == sum(x_j Q^j)``.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .fields import FieldTower
from .subspaces import Subspace, canonicalize


def expand(tower: FieldTower, X) -> np.ndarray:
    """(..., n) over F_{q^m} to (..., n*m) over F_q."""
    X = np.asarray(X, dtype=np.int64)
    C = tower.coords(X)
    return C.reshape(X.shape[:-1] + (X.shape[-1] * tower.m,))


def contract(tower: FieldTower, V) -> np.ndarray:
    """(..., n*m) over F_q to (..., n) over F_{q^m}."""
    V = np.asarray(V, dtype=np.int64)
    m = tower.m
    if V.shape[-1] % m:
        raise ValidationError(f"length {V.shape[-1]} is not a multiple of m={m}")
    B = V.reshape(V.shape[:-1] + (V.shape[-1] // m, m))
    return np.asarray(tower.uncoords(B), dtype=np.int64)


def codes_to_fqm(codes, Q: int, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return np.stack([(codes // Q**j) % Q for j in range(n)], axis=-1)


def fqm_to_codes(X, Q: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.int64)
    return (X * Q ** np.arange(X.shape[-1], dtype=np.int64)).sum(axis=-1)


def normalize(F, X) -> np.ndarray:
    """Scale each nonzero row so its first nonzero coordinate is 1."""
    X = np.asarray(X, dtype=np.int64)
    lead = np.zeros(X.shape[:-1], dtype=np.int64)
    for j in range(X.shape[-1]):
        lead = np.where(lead == 0, X[..., j], lead)
    safe = np.where(lead == 0, 1, lead)
    inv = np.asarray(F.inv(safe), dtype=np.int64)
    return np.asarray(F.mul(X, inv[..., None]), dtype=np.int64)


def point_codes_of(tower: FieldTower, codes, n: int) -> np.ndarray:
    """Projective point code of each F_q^{mn} vector code (0 stays 0)."""
    X = codes_to_fqm(codes, tower.Q, n)
    return fqm_to_codes(normalize(tower.top, X), tower.Q)


def fq_expansion(tower: FieldTower, rows, n: int | None = None) -> Subspace:
    """F_q-subspace underlying the F_{q^m}-span of ``rows`` (vectors of F_{q^m}^n)."""
    R = np.asarray(rows, dtype=np.int64)
    if R.ndim == 1:
        R = R.reshape(1, -1) if R.size else R.reshape(0, n or 0)
    n = R.shape[1] if n is None else n
    gens = [expand(tower, tower.top.mul(R, b)) for b in tower.basis]
    M = np.vstack(gens) if R.shape[0] else np.zeros((0, n * tower.m), np.int64)
    return canonicalize(tower.base, M, n * tower.m)


def fqm_span(tower: FieldTower, U: Subspace) -> Subspace:
    """F_{q^m}-span of an F_q-subspace of F_q^{mn}, as a subspace of F_{q^m}^n."""
    n = U.N // tower.m
    return canonicalize(tower.top, contract(tower, U.rows), n)


def is_fqm_linear(tower: FieldTower, U: Subspace) -> bool:
    """True iff U is closed under multiplication by F_{q^m}."""
    g = tower.top.primitive
    if U.dim == 0:
        return True
    moved = expand(tower, tower.top.mul(contract(tower, U.rows), g))
    return U.contains(moved)


def fqm_subspace_to_fq(tower: FieldTower, W: Subspace) -> Subspace:
    return fq_expansion(tower, W.rows, W.N)
