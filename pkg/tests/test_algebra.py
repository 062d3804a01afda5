from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqmub.fields import ff_make, gf, gr_make, prime_power
from eqmub.semifield import (
    Semifield,
    Z4ModuleEmbedding,
    affine_plane_check,
    associativity_witness,
    hughes_point_map,
    semifield_make_dickson,
    semifield_make_field,
    semifield_verify,
    translation,
)

FIELD_ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 125, 128, 243, 256, 343, 512]


def test_prime_power():
    assert prime_power(81) == (3, 4)
    assert prime_power(2) == (2, 1)
    assert prime_power(12) is None
    assert prime_power(1) is None


def test_gf4_trace_values():
    F = ff_make(2, 2)
    w = F.primitive
    t = F.trace_table
    assert (t[0], t[1], t[w], t[F.mul(w, w)]) == (0, 0, 1, 1)


def test_gf3_trace_is_identity():
    assert list(ff_make(3, 1).trace_table) == [0, 1, 2]


def test_ff_make_rejects_composite_characteristic():
    with pytest.raises(ValueError):
        ff_make(4, 1)


@pytest.mark.parametrize("q", FIELD_ORDERS)
def test_trace_additive_and_frobenius_invariant(q):
    F = gf(q)
    x = np.arange(q)
    t = F.trace_table
    assert np.array_equal(t[F.add(x[:, None], x[None, :])], (t[:, None] + t[None, :]) % F.p)
    assert np.array_equal(t[F.frobenius(x)], t)


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9, 16, 27])
def test_field_axioms_exhaustive(q):
    F = gf(q)
    x = np.arange(q)
    nz = x[1:]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    M = F.mul(x[:, None], x[None, :])
    assert np.array_equal(M, M.T)
    # distributivity over all triples
    a, b, c = np.meshgrid(x, x, x, indexing="ij")
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))
    assert len({int(F.pow(F.primitive, k)) for k in range(q - 1)}) == q - 1


def test_gr1_is_z4():
    R = gr_make(1)
    assert R.teichmuller == [(0,), (1,)]
    assert list(R.trace_table) == [0, 1]


def test_gr2_xi_cubed():
    R = gr_make(2)
    assert R.modulus == (1, 1, 1)
    xi = R.xi
    assert R.mul(R.mul(xi, xi), xi) == R.one


def test_gr3_teichmuller_closed():
    R = gr_make(3)
    T = set(R.teichmuller)
    assert len(T) == 8
    assert all(R.mul(a, b) in T for a in T for b in T)


def test_teich_sqrt_examples():
    R = gr_make(2)
    assert R.teich_sqrt(R.one) == R.one
    assert R.teich_sqrt(R.zero) == R.zero
    assert R.teich_sqrt(R.xi) == R.mul(R.xi, R.xi)
    with pytest.raises(ValueError):
        R.teich_sqrt((2, 0))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_mod2_reduction_homomorphism(n):
    R = gr_make(n)
    F = R.field
    elems = list(R.elements()) if n <= 3 else [R.add(a, R.smul(2, b)) for a in R.teichmuller for b in R.teichmuller[:3]]
    for a, b in itertools.product(elems[:64], repeat=2):
        assert R.reduce_mod2(R.add(a, b)) == F.add(R.reduce_mod2(a), R.reduce_mod2(b))
        assert R.reduce_mod2(R.mul(a, b)) == F.mul(R.reduce_mod2(a), R.reduce_mod2(b))
    assert sorted(R.unlift(t) for t in R.teichmuller) == list(range(2**n))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_teichmuller_trace_of_square(n):
    R = gr_make(n)
    for t in R.teichmuller:
        assert R.trace(R.mul(t, t)) == R.trace(t)
        s = R.teich_sqrt(t)
        assert R.mul(s, s) == t


# semifields --------------------------------------------------------------

@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9, 16, 27])
def test_fields_are_semifields(q):
    E = semifield_make_field(gf(q))
    assert semifield_verify(E)
    assert associativity_witness(E) is None


def test_dickson_81_axioms_and_witness():
    E = semifield_make_dickson(9)
    assert E.q == 81 and E.params["j"] == gf(9).first_nonsquare()
    assert semifield_verify(E)
    a, b, c = E.params["nonassociative_witness"]
    M = E.mul
    assert M[M[a, b], c] != M[a, M[b, c]]
    assert associativity_witness(E) == (a, b, c)


def test_dickson_rejects_even():
    with pytest.raises(ValueError):
        semifield_make_dickson(4)


@pytest.mark.parametrize("q0", [3, 5, 7])
def test_small_dickson_orders_are_fields(q0):
    # orders p and p^2: the construction collapses to an associative algebra
    E = semifield_make_dickson(q0)
    assert semifield_verify(E)
    assert associativity_witness(E) is None


def test_z4_ring_is_not_a_semifield():
    z = np.arange(4)
    bad = Semifield(4, 2, (z[:, None] + z[None, :]) % 4, (z[:, None] * z[None, :]) % 4, 1, "z4")
    chk = semifield_verify(bad)
    assert not chk and chk.witness == (2, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_affine_plane_maps(q):
    assert affine_plane_check(semifield_make_field(gf(q)))


def test_translation_identity():
    E = semifield_make_field(gf(3))
    t = translation(E, 0, 0)
    assert all(t(x, y) == (x, y) for x in range(3) for y in range(3))


def test_hughes_product_rule_gf4():
    E = semifield_make_field(gf(4))
    A, M = E.add, E.mul
    pts = [(x, y) for x in range(4) for y in range(4)]
    for u, b, v, d in itertools.product(range(4), repeat=4):
        f, g = hughes_point_map(E, u, b), hughes_point_map(E, v, d)
        h = hughes_point_map(E, int(A[u, v]), int(A[A[b, d], M[u, v]]))
        assert all(f(*g(*p)) == h(*p) for p in pts)


@pytest.mark.parametrize("q", [2, 4, 8, 16])
def test_z4_module_embedding(q):
    assert Z4ModuleEmbedding(semifield_make_field(gf(q))).verify()


@settings(max_examples=200)
@given(st.sampled_from([9, 25, 27, 81]), st.data())
def test_semifield_distributive_random(q, data):
    E = semifield_make_field(gf(q)) if q != 81 else semifield_make_dickson(9)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    A, M = E.add, E.mul
    assert M[a, A[b, c]] == A[M[a, b], M[a, c]]
    assert M[a, b] == M[b, a]
