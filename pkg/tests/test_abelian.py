from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqmub.abelian import (
    CyclicProductGroup,
    HughesGroup,
    brute_force_difference_set,
    character_sum_over,
    character_table_check,
    characters_of,
    cyclic_group,
    difference_counts,
    is_difference_set,
    is_relative_difference_set,
    singer_difference_set,
    trivial_on,
)
from eqmub.cyclotomic import Cyclotomic, root_of_unity
from eqmub.fields import gf
from eqmub.semifield import semifield_make_dickson, semifield_make_field


def test_z7_difference_sets():
    Z7 = cyclic_group(7)
    assert is_difference_set(Z7, [1, 2, 4], 7, 3, 1)
    bad = is_difference_set(Z7, [1, 2, 3], 7, 3, 1)
    assert not bad and bad.witness == 1
    assert is_difference_set(Z7, [3], 7, 1, 0)


def test_difference_counts_oracle():
    # hand count of d1 - d2 over {1, 2, 4} in Z7
    c = difference_counts(cyclic_group(7), [1, 2, 4])
    assert list(c) == [3, 1, 1, 1, 1, 1, 1]


def test_hughes_gf3_rds():
    H = HughesGroup(semifield_make_field(gf(3)))
    cert = is_relative_difference_set(H, H.N, H.D)
    assert cert.verified and cert.params == (3, 3, 3, 1) and cert.semiregular


def test_rds_double_coset_hit_fails():
    # D meets the coset 1 + N twice, so some difference lands in N
    G = cyclic_group(4)
    cert = is_relative_difference_set(G, [0, 2], [1, 3])
    assert not cert.verified


def test_z4_rds():
    cert = is_relative_difference_set(cyclic_group(4), [0, 2], [0, 1])
    assert cert.verified and cert.params == (2, 2, 2, 1)
    doc = cert.to_json()
    assert doc["kind"] == "rds" and doc["params"] == [2, 2, 2, 1] and doc["normal_subgroup"] == [0, 2]


def test_rds_rejects_non_subgroup():
    with pytest.raises(ValueError):
        is_relative_difference_set(cyclic_group(6), [0, 1], [0, 2])


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_singer_sets_certified(q):
    G, D = singer_difference_set(q)
    v = q * q + q + 1
    assert G.order == v and len(D) == q + 1
    assert is_difference_set(G, D, v, q + 1, 1)


def test_singer_q2_is_multiple_of_124():
    _, D = singer_difference_set(2)
    # every planar (7,3,1) set is a translate of {1,2,4} or of its negative
    translates = [sorted((d + t) % 7 for d in base) for base in ([1, 2, 4], [3, 5, 6]) for t in range(7)]
    assert sorted(D) in translates


def test_brute_force_examples():
    assert brute_force_difference_set(7, 3, 1) == [0, 1, 3]
    assert brute_force_difference_set(8, 3, 1) is None
    assert brute_force_difference_set(5, 5, 5) == [0, 1, 2, 3, 4]
    assert brute_force_difference_set(13, 4, 1) == [0, 1, 3, 9]


def test_character_basics():
    Z7 = cyclic_group(7)
    ch = characters_of(Z7)
    assert ch[0].is_trivial()
    assert ch[1](3) == root_of_unity(7, 3)
    assert character_sum_over([1, 2, 4], ch[0]) == 3
    assert character_sum_over(range(7), ch[3]) == 0
    assert character_sum_over([1, 2, 4], ch[1]).abs_squared() == 2


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9])
@pytest.mark.parametrize("form", ["dot", "trace"])
def test_hughes_characters_multiplicative(q, form):
    H = HughesGroup(semifield_make_field(gf(q)), form)
    assert H.verify()
    assert character_table_check(H)
    X = H.char_exponents()
    A = H.op_table
    N = H.char_order
    # chi(gh) = chi(g) chi(h) for every character and every pair, exhaustively at q <= 4
    if q <= 4:
        for g, h in itertools.product(range(H.order), repeat=2):
            assert np.array_equal(X[:, A[g, h]] % N, (X[:, g] + X[:, h]) % N)


def test_hughes_gf3_characters_distinct():
    H = HughesGroup(semifield_make_field(gf(3)))
    X = H.char_exponents()
    assert len({tuple(r) for r in X}) == 9
    assert not np.any(X[0])


def test_dickson_hughes_rds():
    H = HughesGroup(semifield_make_dickson(9))
    cert = is_relative_difference_set(H, H.N, H.D)
    assert cert.verified and cert.params == (81, 81, 81, 1)
    assert character_table_check(H, np.arange(0, H.order, 97))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_singer_character_sums(q):
    G, D = singer_difference_set(q)
    k = q + 1
    for chi in characters_of(G):
        s = character_sum_over(D, chi).abs_squared()
        assert s == (k * k if chi.is_trivial() else k - 1)


@pytest.mark.parametrize("q", [3, 4, 5, 8])
def test_rds_character_sum_trichotomy(q):
    H = HughesGroup(semifield_make_field(gf(q)))
    Hstar = set(trivial_on(H, H.N).tolist())
    for chi in characters_of(H):
        s = character_sum_over(H.D, chi).abs_squared()
        if chi.is_trivial():
            assert s == q * q
        elif chi.label in Hstar:
            assert s == 0
        else:
            assert s == q


@pytest.mark.parametrize("factors", [(7,), (12,), (2, 4), (2, 2, 3), (3, 9)])
def test_character_orthogonality(factors):
    G = CyclicProductGroup(factors)
    assert G.verify()
    X = G.char_exponents() % G.char_order
    V = np.exp(2j * np.pi * X / G.char_order)
    assert np.allclose(V @ V.conj().T, G.order * np.eye(G.order), atol=1e-9)


@settings(max_examples=100)
@given(st.integers(2, 30), st.lists(st.integers(0, 29), min_size=1, max_size=8, unique=True))
def test_difference_count_total(v, D):
    D = [d % v for d in D]
    D = sorted(set(D))
    c = difference_counts(cyclic_group(v), D)
    assert c.sum() == len(D) ** 2 and c[0] == len(D)
    assert np.array_equal(c, c[(-np.arange(v)) % v])
