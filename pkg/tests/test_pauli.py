from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqmub.constructions import family_projective_match, wf
from eqmub.cyclotomic import CycArray
from eqmub.lineset import LineSet, is_flat
from eqmub.pauli import (
    all_paulis,
    commute,
    eigen_exponents,
    eigen_family,
    eigenbasis,
    eigenvector_check,
    maximal_commuting_partition_check,
    monomiality_check,
    nice_error_basis_check,
    pauli,
    pauli_context,
    phase_commutation_check,
    slope_bases,
    slope_partition,
    trace_orthogonality,
)
from eqmub.spin import fourier_matrix

QS = [2, 3, 4, 5, 8, 9]


def as_int(M):
    return np.rint(M.to_complex().real).astype(int)


def test_identity():
    assert pauli(0, 0, 3).matrix().equals(CycArray.identity(3))
    assert pauli(0, 0, 4).is_identity()


def test_qubit_paulis():
    X, Z, Y = (pauli(a, b, 2).matrix() for a, b in [(1, 0), (0, 1), (1, 1)])
    assert (as_int(X) == [[0, 1], [1, 0]]).all()
    assert (as_int(Z) == [[1, 0], [0, -1]]).all()
    assert (X @ Z).equals(Y)


def test_q3_z1_diagonal():
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(pauli(0, 1, 3).matrix().to_complex(), np.diag([1, w, w * w]))


def test_c0_eigenbasis_is_fourier():
    # phi_{0,d}[x] = omega^tr(2dx): the characters, eigenvectors of every X(a)
    for q in [3, 5, 9]:
        ctx = pauli_context(q)
        E = eigen_exponents(0, ctx)
        F = ctx.fq
        x = np.arange(q)
        assert np.array_equal(E, F.trace_table[F.scalar(2, F.mul(x[:, None], x[None, :]))])


def test_q3_eigenvalue_oracle():
    # direct product: (X(1)Z(2) phi)[u+1] = omega^(2u + u^2) = omega^-1 phi[u+1]
    w = np.exp(2j * np.pi / 3)
    phi = w ** (np.arange(3) ** 2)
    D = pauli(1, 2, 3).matrix().to_complex()
    assert np.allclose(D @ phi, w ** -1 * phi)
    assert np.allclose(eigenbasis(1, 3).to_complex()[0], phi)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_eigenvector_relation(q):
    assert eigenvector_check(q)


@pytest.mark.parametrize("q", QS)
def test_eigen_family_matches_wf(q):
    F = eigen_family(q)
    assert F.verify()
    assert F.labels[0] == "Z"
    assert family_projective_match(F, wf(q)) and family_projective_match(wf(q), F)
    for b in range(1, F.bases):
        assert is_flat(F.basis(b))


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9])
def test_error_basis_predicates(q):
    ops = all_paulis(q)
    assert len(ops) == q * q
    assert nice_error_basis_check(ops)
    assert monomiality_check(ops)
    assert phase_commutation_check(q)


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9])
def test_slope_partition(q):
    classes = slope_partition(q)
    assert len(classes) == q + 1
    chk = maximal_commuting_partition_check(all_paulis(q), classes, slope_bases(q))
    assert chk and chk.info["classes"] == q + 1


def test_identity_substitution_fails_orthogonality():
    ops = all_paulis(3)
    ops[1] = pauli(0, 0, 3)
    chk = nice_error_basis_check(ops)
    assert not chk


def test_mixed_slopes_fail_commutation():
    ctx = pauli_context(3)
    cl = slope_partition(ctx)
    cl[0], cl[1] = cl[0][:2] + cl[1][2:], cl[1][:2] + cl[0][2:]
    chk = maximal_commuting_partition_check(all_paulis(ctx), cl)
    assert not chk and chk.info["condition"] == "commute"


def test_trivial_partition():
    I1 = CycArray.identity(1)
    assert maximal_commuting_partition_check([I1], [[I1]])


def test_monomiality_examples():
    assert not monomiality_check([fourier_matrix(5).matrix])
    assert monomiality_check([CycArray.identity(4)])


def test_trace_orthogonality_direct():
    assert trace_orthogonality([p.matrix() for p in all_paulis(2)])


def test_bad_context():
    with pytest.raises(ValueError):
        pauli_context(6)


@settings(max_examples=80)
@given(st.sampled_from([3, 4, 5, 7, 8, 9]), st.data())
def test_paulis_commute_up_to_scalar(q, data):
    a, b, c, d = (data.draw(st.integers(0, q - 1)) for _ in range(4))
    P, Q = pauli(a, b, q), pauli(c, d, q)
    PQ = (P @ Q).matrix().to_complex()
    QP = (Q @ P).matrix().to_complex()
    i, j = np.unravel_index(np.argmax(np.abs(QP)), QP.shape)
    lam = PQ[i, j] / QP[i, j]
    assert np.allclose(PQ, lam * QP)
    order = 4 if q % 2 == 0 else q
    assert np.isclose(abs(lam), 1) and np.isclose(lam ** order, 1)
    assert commute(P.matrix(), Q.matrix()) == np.isclose(lam, 1)


@settings(max_examples=40)
@given(st.sampled_from([3, 5, 9, 4, 8]), st.data())
def test_monomial_matrix_agrees_with_dense(q, data):
    a, b = data.draw(st.integers(0, q - 1)), data.draw(st.integers(0, q - 1))
    P = pauli(a, b, q)
    M = P.matrix().to_complex()
    assert np.allclose(M @ M.conj().T, np.eye(q))
    assert ((np.abs(M) > 0.5).sum(axis=0) == 1).all()
