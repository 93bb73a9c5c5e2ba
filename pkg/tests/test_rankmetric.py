import numpy as np
import pytest

from scatterlab.errors import ValidationError
from scatterlab.fields import make_field
from scatterlab.rankmetric import (MatrixCode, code_from_scattered, code_to_partial_spread,
                                   covering_radius_exact, covering_radius_lower_bound, dumps_code,
                                   field_multiplication_code, find_extension, is_mrd, loads_code,
                                   min_rank_distance, partial_spread_to_code, random_linear_code,
                                   singleton_defect)
from scatterlab.scattered import construct_family, max_scattered_dimension
from scatterlab.spreads import desarguesian_spread, second_order_closure, spread_from_points, validate


def _full(q, m, mp):
    idx = np.arange(q ** (m * mp))
    return MatrixCode(q, m, mp, np.stack([(idx // q**i) % q for i in range(m * mp)], -1))


def test_full_space_code():
    C = _full(2, 2, 2)
    assert C.linear and min_rank_distance(C) == 1
    assert covering_radius_exact(C).exact == 0


def test_multiplication_code(t22):
    G = field_multiplication_code(t22)
    assert len(G) == 4 and min_rank_distance(G) == 2 and is_mrd(G)
    r = covering_radius_exact(G)
    assert r.exact == 1 and r.agree and r.extendable is False


def test_nonlinear_distance_and_defect():
    I = np.eye(2, dtype=int)
    C = MatrixCode(2, 2, 2, [np.zeros((2, 2), int), I])
    assert C.linear  # {0, I} is a 1-dim subspace
    C = MatrixCode(2, 2, 2, [I, [[0, 1], [1, 0]], [[1, 1], [0, 1]]])
    assert not C.linear and min_rank_distance(C) == 1
    assert singleton_defect(_full(2, 2, 2)) == 0


def test_transpose_convention():
    C = MatrixCode(2, 3, 2, np.random.default_rng(0).integers(0, 2, (5, 3, 2)))
    assert C.transposed and (C.m, C.mp) == (2, 3)


def test_too_small_code():
    with pytest.raises(ValidationError):
        MatrixCode(2, 2, 2, [np.eye(2, dtype=int)])


def test_spread_code_roundtrip(t22):
    G = field_multiplication_code(t22)
    A, Sinf = code_to_partial_spread(G)
    assert len(A) == 4 and validate(A, check_normal=False).is_partial
    assert all(S.meet(Sinf).dim == 0 for S in A.elements)
    assert (partial_spread_to_code(A, Sinf).flat == G.flat).all()


def test_code_to_spread_needs_full_distance():
    with pytest.raises(ValidationError):
        code_to_partial_spread(_full(2, 2, 2))


@pytest.mark.parametrize("seed", range(6))
def test_random_codes_covering(seed):
    C = random_linear_code(2, 3, 3, 1 + seed % 3, 3, seed=seed)
    assert min_rank_distance(C) == 3
    r = covering_radius_exact(C)
    assert r.agree and r.lower_bound <= r.exact
    assert (find_extension(C) is not None) == (r.exact == 3)
    if len(C) == 8:
        assert r.exact <= 2  # MRD codes are not extendable


def test_lower_bound_values():
    assert covering_radius_lower_bound(6, 6, 2, s=6).bound == 4
    assert covering_radius_lower_bound(6, 6, 2, s=6).simplified is None
    lb = covering_radius_lower_bound(6, 6, 5, s=6)
    assert lb.simplified == 6 - 2
    # s = 0: smallest h with (h+1)^2 > log_q 4
    assert covering_radius_lower_bound(3, 3, 2, s=0).h_star == 1
    assert covering_radius_lower_bound(3, 3, 5, s=0).h_star == 0


def test_code_from_scattered_full_spread(t22):
    D = desarguesian_spread(t22, 2)
    U = construct_family("even-n", t22, t=1)
    C, rep = code_from_scattered(D, U, 1)
    assert len(C) == 16 and rep.distance >= 1 and C.linear


def test_code_from_scattered_nonlinear(t23):
    A = spread_from_points(t23, 3, [[1, 0, 0], [0, 1, 0]])
    U = max_scattered_dimension(second_order_closure(A), 1, start=9).witness
    C, rep = code_from_scattered(A, U, 1)
    assert len(C) == 2 * 7 + 1 and not C.linear and not rep.linear_by_criterion
    assert rep.distance >= 2


def test_code_from_scattered_precondition(t22):
    D = desarguesian_spread(t22, 2)
    with pytest.raises(ValidationError):
        code_from_scattered(D, D.element(0), 1)


def test_code_file_roundtrip(t22):
    G = field_multiplication_code(t22)
    H = loads_code(dumps_code(G))
    assert (H.flat == G.flat).all() and H.linear
