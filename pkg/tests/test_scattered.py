from collections import Counter

import numpy as np
import pytest

from scatterlab.errors import ValidationError
from scatterlab.fields import make_tower, tower_for
from scatterlab.scattered import (bound_table, charhscatt_criterion, charscatt_criterion,
                                  construct_family, general_sharper_condition,
                                  hyperplane_weight_spectrum, is_h_scattered, is_scattered,
                                  max_scattered_dimension, scatter_profile, upper_bound_for)
from scatterlab.spreads import desarguesian_spread, partial_spread_tight, construct_tight_spread
from scatterlab.subspaces import canonicalize, sample_subspace


def test_fast_and_generic_paths_agree(t22):
    D = desarguesian_spread(t22, 3)
    rng = np.random.default_rng(0)
    for _ in range(30):
        U = sample_subspace(t22.base, 6, int(rng.integers(1, 6)), rng)
        a = scatter_profile(U, D, "fast")
        b = scatter_profile(U, D, "generic")
        assert a.max_dim == b.max_dim
        assert sorted(a.dims.values()) == sorted(b.dims.values())


@pytest.mark.parametrize("q,m,t", [(q, m, t) for q in (2, 3) for m in (2, 3, 4) for t in (1, 2)
                                   if q ** (m * t) <= 1 << 16])
def test_even_n_family(q, m, t):
    tower = tower_for(q, m)
    U = construct_family("even-n", tower, t=t)
    assert U.dim == m * t
    assert is_scattered(U, desarguesian_spread(tower, 2 * t), 1)


def test_odd_n_family(t22):
    U = construct_family("odd-n", t22, t=1)
    assert U.dim == 3 and is_scattered(U, desarguesian_spread(t22, 3), 1)


def test_pseudoregulus(t23):
    U = construct_family("pseudoregulus", t23, n=3)
    assert U.dim == 3
    assert is_h_scattered(U, t23, 3, 2)
    assert is_scattered(U, desarguesian_spread(t23, 3), 1)


def test_alt_pseudoregulus_rejects_other_parameters(t23):
    with pytest.raises(ValidationError):
        construct_family("alt-pseudoregulus", t23)


def test_bound_table():
    b = bound_table(2, 2, 1)
    assert (b.general_bound, b.spread_bound, b.desarguesian_bound) == (3, 2, 2)
    for m in range(1, 9):
        for n in range(1, 6):
            for h in range(1, m + 1):
                b = bound_table(m, n, h)
                sharper = (b.sharper == "general")
                if n < h + 1:
                    assert sharper == general_sharper_condition(m, n, h)
                else:
                    assert not sharper


def test_exhaustive_search_matches_known_values(t22):
    r = max_scattered_dimension(desarguesian_spread(t22, 2), 1, start=4)
    assert r.k_max == 2 and r.exhaustive
    A, _ = construct_tight_spread(t22, 2, 1)
    assert max_scattered_dimension(A, 1, start=4).k_max == 2
    P, _ = partial_spread_tight(t22, 2, 1)
    assert max_scattered_dimension(P, 1, start=4).k_max == 3


def test_randomized_search_is_lower_bound(t22):
    D = desarguesian_spread(t22, 3)
    r = max_scattered_dimension(D, 1, "randomized", seed=1)
    assert r.lower_bound_only and r.k_max <= upper_bound_for(D, 1)
    assert is_scattered(r.witness, D, 1)


def test_hyperplane_spectrum_characterization(t22):
    D = desarguesian_spread(t22, 2)
    U = construct_family("even-n", t22, t=1)
    spec = hyperplane_weight_spectrum(U, t22, 2)
    assert spec == Counter({1: 3, 0: 2})
    assert charscatt_criterion(spec, 2, 2)
    # a 2-space inside one spread element is not scattered
    bad = D.element(0)
    assert not charscatt_criterion(hyperplane_weight_spectrum(bad, t22, 2), 2, 2)


def test_h_scattered_spectrum_bound(t23):
    U = construct_family("pseudoregulus", t23, n=3)
    spec = hyperplane_weight_spectrum(U, t23, 3)
    assert charhscatt_criterion(spec, 3, 3, 2)
