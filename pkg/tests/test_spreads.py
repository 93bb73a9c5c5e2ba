import numpy as np
import pytest

from scatterlab.errors import ValidationError
from scatterlab.fields import tower_for
from scatterlab.spreads import (construct_tight_spread, desarguesian_spread, dumps_spread,
                                loads_spread, partial_spread_tight, restrict_spread,
                                second_order_closure, spread_from_points, validate)
from scatterlab.scattered import scatter_profile


@pytest.mark.parametrize("q,m,n", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (4, 2, 2)])
def test_desarguesian_is_full_spread(q, m, n):
    t = tower_for(q, m)
    D = desarguesian_spread(t, n)
    Q = q**m
    assert len(D) == (Q**n - 1) // (Q - 1)
    rep = validate(D)
    assert rep.is_partial and rep.is_full and rep.is_normal
    assert rep.normal_vacuous == (n <= 2)


def test_classifier_strategies_agree(t22):
    D = desarguesian_spread(t22, 3)
    from scatterlab.spreads import PartialSpread, PointClassifier
    G = PartialSpread(D.field, D.N, D.m, "constructed", elements=D.elements, tower=t22)
    codes = np.arange(1, 2**6)
    a = D.classifier().classify(codes)
    b = PointClassifier(G, "generic-meet").classify(codes)
    # same partition of the nonzero vectors, possibly different labels
    pairs = set(zip(a.tolist(), b.tolist()))
    assert len(pairs) == len(D) and (a >= 0).all()


@pytest.mark.parametrize("n,h", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_tight_spread(t22, n, h):
    A, U = construct_tight_spread(t22, n, h)
    assert validate(A, check_normal=False).is_full
    assert U.dim == 2 * (n - 1) + h - 1
    assert scatter_profile(U, A).max_dim <= h


@pytest.mark.parametrize("n,h", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_partial_tight_spread(t22, n, h):
    A, U = partial_spread_tight(t22, n, h)
    assert len(A) == 2 ** (2 * (n - 1))
    assert U.dim == 2 * (n - 1) + h
    assert scatter_profile(U, A).max_dim <= h


def test_non_spread_rejected(t22):
    from scatterlab.spreads import PartialSpread
    from scatterlab.subspaces import canonicalize
    F = t22.base
    S1 = canonicalize(F, [[1, 0, 0, 0], [0, 1, 0, 0]], 4)
    S2 = canonicalize(F, [[1, 0, 0, 0], [0, 0, 1, 0]], 4)
    A = PartialSpread(F, 4, 2, "adhoc", elements=[S1, S2])
    assert not validate(A).is_partial


def test_second_order_closure_of_two_points(t23):
    A = spread_from_points(t23, 3, [[1, 0, 0], [0, 1, 0]])
    A2 = second_order_closure(A)
    assert len(A2) == 9  # all points of the F_8-line
    B = spread_from_points(t23, 3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert len(second_order_closure(B)) == 3 * 9 - 3


def test_restrict_spread(t22):
    D = desarguesian_spread(t22, 3)
    X0 = D.element(0)
    R = restrict_spread(D, X0)
    assert len(R) == len(D) - 1


def test_spread_text_roundtrip(t22):
    A, _ = construct_tight_spread(t22, 2, 1)
    B = loads_spread(dumps_spread(A), t22.base, t22)
    assert sorted(B.elements) == sorted(A.elements)
    D = desarguesian_spread(t22, 2)
    D2 = loads_spread(dumps_spread(D), t22.base, t22)
    assert (D2.points == D.points).all()


def test_bad_header(t22):
    with pytest.raises(ValidationError):
        loads_spread("garbage", t22.base, t22)
