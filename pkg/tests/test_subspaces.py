import numpy as np
import pytest

from scatterlab.fields import make_field
from scatterlab.qmath import gauss_binomial
from scatterlab.subspaces import (batch_rank, canonicalize, dumps_subspace, enumerate_subspaces,
                                  loads_subspace, rank, sample_full_rank, sample_subspace)


@pytest.mark.parametrize("q,N,k", [(2, 4, 2), (3, 4, 2), (2, 5, 3), (4, 3, 1), (2, 6, 3)])
def test_grassmannian_count_and_distinct(q, N, k):
    F = make_field(q)
    subs = list(enumerate_subspaces(F, N, k))
    assert len(subs) == gauss_binomial(N, k, q)
    assert len(set(subs)) == len(subs)
    assert all(U.dim == k for U in subs)


def test_gauss_binomial_values():
    assert gauss_binomial(4, 2, 2) == 35
    assert gauss_binomial(4, 2, 3) == 130
    assert gauss_binomial(5, 7, 2) == 0
    assert gauss_binomial(6, 0, 5) == 1


def test_canonical_form_is_basis_independent():
    F = make_field(3)
    rng = np.random.default_rng(1)
    for _ in range(50):
        U = sample_subspace(F, 6, 3, rng)
        P = rng.integers(0, 3, (3, 3))
        while rank(F, P) < 3:
            P = rng.integers(0, 3, (3, 3))
        from scatterlab.subspaces import matmul
        assert canonicalize(F, matmul(F, P, U.rows), 6) == U


def test_meet_join_dimension_law():
    F = make_field(2)
    rng = np.random.default_rng(2)
    for _ in range(100):
        U = sample_subspace(F, 6, int(rng.integers(0, 7)), rng)
        V = sample_subspace(F, 6, int(rng.integers(0, 7)), rng)
        assert U.meet(V).dim + U.join(V).dim == U.dim + V.dim
        assert U.contains_subspace(U.meet(V)) and U.join(V).contains_subspace(V)


def test_batch_rank_matches_rank():
    F = make_field(4)
    rng = np.random.default_rng(3)
    Ms = rng.integers(0, 4, (200, 3, 5))
    br = batch_rank(F, Ms)
    assert br.tolist() == [rank(F, M) for M in Ms]


def test_sample_full_rank_is_full_rank_and_seeded():
    F = make_field(2)
    a = sample_full_rank(F, 10, 6, 300, seed=5)
    b = sample_full_rank(F, 10, 6, 300, seed=5)
    assert (a == b).all()
    assert (batch_rank(F, a) == 6).all()


def test_text_roundtrip():
    F = make_field(3)
    U = sample_subspace(F, 5, 2, 9)
    assert loads_subspace(dumps_subspace(U), F) == U


def test_codes_enumerate_all_vectors():
    F = make_field(3)
    U = sample_subspace(F, 4, 2, 4)
    c = U.codes()
    assert len(set(c.tolist())) == 9 and c[0] == 0
