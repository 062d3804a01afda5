from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqmub.cyclotomic import CycArray, Cyclotomic
from eqmub.spin import (
    TypeIIMatrix,
    default_theta,
    diagonal_conjugation_check,
    fourier_matrix,
    is_spin_model,
    is_type_ii,
    potts,
    quadratic_circulant,
    schur_inverse,
    schur_product,
    schur_ratio,
    spin_diagonals,
    spin_family_report,
    spin_mub_triple,
    two_of_three_check,
)


def J(n):
    return CycArray.from_exponents(np.zeros((n, n), dtype=int), 1)


def test_schur_identities():
    W = quadratic_circulant(5).matrix
    assert schur_product(W, J(5)).equals(W)
    assert schur_inverse(schur_inverse(W)).equals(W)
    assert schur_inverse(W).equals(W.conj())


def test_schur_inverse_rejects_zero():
    with pytest.raises(ZeroDivisionError):
        schur_inverse(CycArray.identity(2))


def test_potts_v4_row_oracle():
    P = potts(4)
    assert P.params["a"] == -1 and P.exact
    M = P.matrix
    # diagonal entries 1 + 3 = 4, off-diagonal -1 - 1 + 2 = 0
    prod = M @ schur_inverse(M).T
    assert prod.equals(CycArray.identity(4).scale(4))
    assert is_type_ii(M) and P.spin_model


def test_all_ones_not_type_ii():
    assert not is_type_ii(J(3))
    assert is_type_ii(J(1))


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_fourier_type_ii(n):
    assert fourier_matrix(n).type_ii


def test_two_of_three_examples():
    F = fourier_matrix(4).matrix
    chk = two_of_three_check(F)
    assert chk and all(chk.info.values())
    P = potts(5).matrix
    chk = two_of_three_check(P)
    assert chk and chk.info == {"type_ii": True, "unitary": False, "flat": False}
    D = CycArray.from_scalars([[1, 0], [0, 2]])
    chk = two_of_three_check(D)
    assert chk and not any(chk.info.values())


def test_self_ratio_is_all_ones():
    W = quadratic_circulant(6).matrix
    r = schur_ratio(W, 2, 2)
    assert r.equals(CycArray.from_exponents(np.zeros(6, dtype=int), 1))


@pytest.mark.parametrize("v", [5, 9])
@pytest.mark.parametrize("sign", ["+", "-"])
def test_potts_float(v, sign):
    P = potts(v, sign)
    assert not P.exact
    assert is_type_ii(P.matrix, 1e-9)
    chk = is_spin_model(P.matrix, 1e-9)
    assert chk and chk.info["max_residual"] <= 1e-9


def test_potts_v5_value():
    a = potts(5).params["a"]
    assert abs(a - (-3 + np.sqrt(5)) / 2) < 1e-12


def test_potts_v5_exact_square_root():
    P = potts(5, exact=True)
    assert P.exact and P.type_ii and P.spin_model


def test_potts_v1_complex():
    P = potts(1)
    assert abs(P.params["a"] - (1 + 1j * np.sqrt(3)) / 2) < 1e-12
    assert P.type_ii


def test_potts_rejects_bad_input():
    with pytest.raises(ValueError):
        potts(0)
    with pytest.raises(ValueError):
        potts(3, "x")


@pytest.mark.parametrize("n", range(2, 13))
def test_quadratic_circulants(n):
    W = quadratic_circulant(n)
    assert W.type_ii and W.flat and W.unitary
    assert W.spin_model is True


def test_theta_choices():
    assert default_theta(4) == (8, 1)
    assert default_theta(3) == (6, 4)
    W = quadratic_circulant(4, (8, 1))
    assert W.type_ii and W.spin_model


@pytest.mark.parametrize("n", [3, 5])
def test_zeta_2n_at_odd_n_is_not_a_spin_model(n):
    W = quadratic_circulant(n, (2 * n, 1))
    assert W.type_ii
    assert W.spin_model is False


def test_non_primitive_theta_not_type_ii():
    W = quadratic_circulant(4, (4, 1))
    assert not W.type_ii
    assert W.spin_model is None


def test_spin_model_rejects_non_type_ii():
    with pytest.raises(ValueError):
        is_spin_model(J(3))


@pytest.mark.parametrize("n", range(2, 13))
def test_diagonal_conjugation_and_triples(n):
    W = quadratic_circulant(n)
    chk = diagonal_conjugation_check(W)
    assert chk, chk.info
    c = chk.info["scalar"]
    assert c.abs_squared() == Fraction(1, n)
    for j in range(n):
        assert spin_mub_triple(W, j).verify()


def test_circulant_n3_traces_equal():
    W = quadratic_circulant(3)
    Ds = spin_diagonals(W)
    traces = [sum((D.entry(i, i) for i in range(3)), Cyclotomic.rational(0)) for D in Ds]
    assert traces[0] == traces[1] == traces[2]


def test_fourier_z4_fails_diagonal_conjugation():
    F = fourier_matrix(4)
    assert F.type_ii and F.spin_model is False
    chk = diagonal_conjugation_check(F)
    assert not chk and chk.info["identity_fails"]


def test_family_report():
    rep = spin_family_report(quadratic_circulant(5))
    assert rep["size"] >= 3
    assert rep["names"][:2] == ["I", "A"]
    for clique in rep["largest"]:
        idx = [rep["names"].index(x) for x in clique]
        assert all(rep["unbiased"][a][b] for a in idx for b in idx if a != b)


def test_matrix_json():
    doc = quadratic_circulant(3).to_json()
    assert doc["kind"] == "matrix" and doc["dim"] == 3


def test_zero_entry_rejected():
    with pytest.raises(ZeroDivisionError):
        TypeIIMatrix(CycArray.identity(2))


@settings(max_examples=60)
@given(st.integers(2, 9), st.integers(1, 30))
def test_circulant_type_ii_iff_theta_squared_primitive(n, k):
    order = 2 * n
    k = k % order or 1
    W = quadratic_circulant(n, (order, k))
    # theta^2 = zeta_n^k primitive iff gcd(k, n) = 1
    assert W.type_ii == (math.gcd(k, n) == 1)


@settings(max_examples=60)
@given(st.sampled_from(["circ", "fourier", "potts", "diag", "ones"]), st.integers(2, 7))
def test_two_of_three_never_inconsistent(kind, n):
    if kind == "circ":
        M = quadratic_circulant(n).matrix
    elif kind == "fourier":
        M = fourier_matrix(n).matrix
    elif kind == "potts":
        M = potts(n).matrix
    elif kind == "diag":
        M = CycArray.from_scalars([[i + 1 if i == j else 0 for j in range(n)] for i in range(n)])
    else:
        M = J(n)
    assert two_of_three_check(M)
