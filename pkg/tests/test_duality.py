import numpy as np
import pytest

from scatterlab.duality import DualityContext, check_dual_weight, dual_scattered, perp_fq, perp_fqm
from scatterlab.errors import ValidationError
from scatterlab.expansion import fq_expansion
from scatterlab.scattered import construct_family, is_scattered
from scatterlab.spreads import desarguesian_spread
from scatterlab.subspaces import enumerate_subspaces, sample_subspace


def test_perp_is_involution_and_dimension(t22):
    ctx = DualityContext(t22, 2)
    for k in range(5):
        for U in enumerate_subspaces(t22.base, 4, k):
            P = perp_fq(U, ctx)
            assert P.dim == 4 - U.dim
            assert perp_fq(P, ctx) == U


def test_fqm_perp_agrees_with_trace_perp(t22):
    ctx = DualityContext(t22, 2)
    for s in range(3):
        for W in enumerate_subspaces(t22.top, 2, s):
            Wp = perp_fqm(W, ctx)
            assert Wp.dim == 2 - W.dim
            assert fq_expansion(t22, Wp.rows, 2) == perp_fq(fq_expansion(t22, W.rows, 2), ctx)


def test_symplectic_form_accepted(t22):
    ctx = DualityContext(t22, 2, form=[[0, 1], [1, 0]])
    U = sample_subspace(t22.base, 4, 2, 0)
    assert perp_fq(perp_fq(U, ctx), ctx) == U


def test_bad_forms(t22):
    with pytest.raises(ValidationError):
        DualityContext(t22, 2, form=[[1, 1], [0, 1]])
    with pytest.raises(ValidationError):
        DualityContext(t22, 2, form=[[1, 1], [1, 1]])


def test_dual_weight_random(t22):
    ctx = DualityContext(t22, 3)
    rng = np.random.default_rng(4)
    for _ in range(100):
        U = sample_subspace(t22.base, 6, int(rng.integers(0, 7)), rng)
        W = sample_subspace(t22.top, 3, int(rng.integers(0, 4)), rng)
        assert check_dual_weight(U, W, ctx).holds


def test_dual_of_maximum_scattered(t22):
    ctx = DualityContext(t22, 2)
    U = construct_family("even-n", t22, t=1)
    rep = dual_scattered(U, ctx)
    assert rep.dual_dim == 2 and rep.dual_max_intersection <= 1
    assert rep.checks["maximum_scattered_transfer"] == "verified"


def test_dual_of_pseudoregulus(t24):
    ctx = DualityContext(t24, 3)
    U = construct_family("pseudoregulus", t24, n=3)
    rep = dual_scattered(U, ctx, h=2)
    assert rep.dual_dim == 8
    assert is_scattered(rep.dual, desarguesian_spread(t24, 3), 2)
