from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqmub.abelian import HughesGroup, cyclic_group, singer_difference_set
from eqmub.constructions import (
    NotSchurClosed,
    _family,
    alltop,
    alltop_target,
    alltop_wf_equivalence,
    alpha_from_l,
    eal_from_difference_set,
    extract_rds_from_schur_group,
    family_projective_match,
    fiducial_diagnostics,
    hoggar,
    hoggar_vector,
    mubs_from_rds,
    mubs_from_semifield,
    pauli_orbit,
    profile_from_alpha,
    sic_fiducial_d2,
    wf,
    wf_even,
    wf_odd,
)
from eqmub.cyclotomic import CycArray, root_of_unity
from eqmub.fields import gf
from eqmub.lineset import (
    LineSet,
    flat_equiangular_cap,
    gram,
    is_equiangular,
    is_flat,
    meets_with_equality,
    relative_bound,
)
from eqmub.semifield import semifield_make_field


@pytest.mark.parametrize("q,k,alpha", [(2, 3, Fraction(2, 9)), (3, 4, Fraction(3, 16)),
                                       (4, 5, Fraction(4, 25)), (5, 6, Fraction(5, 36))])
def test_singer_lines(q, k, alpha):
    ls = eal_from_difference_set(*singer_difference_set(q))
    assert (ls.m, ls.dim) == (k * k - k + 1, k)
    chk = is_equiangular(ls)
    assert chk.info["alpha"] == alpha == Fraction(k - 1, k * k)
    assert meets_with_equality(ls) and ls.m == flat_equiangular_cap(k)
    assert is_flat(ls)


def test_eal_rejects_non_difference_set():
    with pytest.raises(ValueError):
        eal_from_difference_set(cyclic_group(7), [1, 2, 3])


def test_rds_families():
    H = HughesGroup(semifield_make_field(gf(3)))
    F = mubs_from_rds(H, H.N, H.D)
    assert F.bases == 4 and F.k == 3 and F.verify()
    Z = mubs_from_rds(cyclic_group(4), [0, 2], [0, 1])
    assert Z.bases == 3 and Z.k == 2 and Z.verify()
    H4 = HughesGroup(semifield_make_field(gf(4)))
    F4 = mubs_from_rds(H4, H4.N, H4.D)
    assert F4.bases == 5 and F4.verify()


@pytest.mark.parametrize("q", [3, 4, 5, 8, 9])
def test_semifield_families(q):
    F = mubs_from_semifield(semifield_make_field(gf(q)))
    chk = F.verify()
    assert chk and F.bases == q + 1 and F.k == q
    assert F.labels[0] == "I"
    rep = gram(F.lines)
    assert rep.values("cross") == [Fraction(1, q)] and rep.values("within") == [0]


@pytest.mark.parametrize("q,b", [(3, 4), (5, 6), (9, 10)])
def test_wf_odd(q, b):
    F = wf_odd(q)
    assert F.bases == b and F.verify()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wf_even(n):
    F = wf_even(n)
    assert F.bases == 2**n + 1 and F.verify()
    if n == 2:
        assert F.lines.order == 4


def test_wf_dispatch_and_errors():
    assert wf(4).bases == 5 and wf(5).bases == 6
    with pytest.raises(ValueError):
        wf(6)


@pytest.mark.parametrize("q", [5, 7])
def test_alltop(q):
    F = alltop(q)
    assert F.bases == q + 1 and F.verify()


@pytest.mark.parametrize("q", [2, 3, 9])
def test_alltop_rejects_small_characteristic(q):
    with pytest.raises(ValueError):
        alltop(q)


def test_alltop_target_q5_alpha1():
    beta, cmap = alltop_target(gf(5), 1)
    assert beta == 2                       # -1/12 = -1/2 = 2 in GF(5)
    assert cmap == [3, 4, 0, 1, 2]         # (3 + y)/6 = 3 + y at alpha = 1


def test_alltop_target_q5_alpha2_oracle():
    # 12*alpha = 24 = 4, so beta = -1/4 = 1; (12 + y)/12 = (2 + y)/2 = 1 + 3y
    beta, cmap = alltop_target(gf(5), 2)
    assert beta == 1
    assert cmap == [(1 + 3 * y) % 5 for y in range(5)]


@pytest.mark.parametrize("q", [5, 7])
def test_alltop_wf_equivalence(q):
    cert = alltop_wf_equivalence(q)
    assert cert.check
    assert cert.basis_map["I"] == 0 and cert.basis_map[0] == "I"
    assert cert.column_maps[0] == list(range(q))
    # I goes to W_0 with columns negated
    assert cert.column_maps["I"] == [(-y) % q for y in range(q)]
    F = gf(q)
    for a in range(1, q):
        beta, cmap = alltop_target(F, a)
        assert cert.basis_map[a] == beta and cert.column_maps[a] == cmap


def test_hoggar():
    h = hoggar()
    assert h.m == 64 and h.dim == 8 and h.order == 8
    chk = is_equiangular(h)
    assert chk.info["alpha"] == Fraction(1, 9)
    rep = gram(h, keep_matrix=True)
    assert rep.count(Fraction(1, 9)) == 64 * 63 // 2
    assert relative_bound(8, Fraction(1, 9)) == 64
    # unnormalized |<Av, Bv>|^2 = 4 with |v|^2 = 6
    assert h.norms[0] == 6
    assert h.data[0].equals(hoggar_vector())


def test_hoggar_fiducial_profile():
    fd = fiducial_diagnostics(hoggar_vector())
    assert fd.alpha == [0, 0, Fraction(1, 6), Fraction(1, 6), Fraction(1, 6), Fraction(1, 6), 0, Fraction(1, 3)]
    assert fd.l == [-3, -3, 1, 1, 1, 1, -3, 5]
    assert fd.all_odd and fd.alpha_sum == 1
    # oracle: alpha_i = (3 + l_i) / 24 at d = 8
    assert all(a == Fraction(3 + l, 24) for a, l in zip(fd.alpha, fd.l))


def test_e1_profile_odd_but_not_equiangular():
    e1 = [1] + [0] * 7
    fd = fiducial_diagnostics(e1)
    assert fd.l == [21] + [-3] * 7 and fd.all_odd
    orbit = pauli_orbit(e1, 3)
    assert not is_equiangular(orbit)
    # the orbit collapses to the 8 standard lines, which are orthogonal, not at angle 1/9
    dedup = is_equiangular(orbit, identify_duplicates=True)
    assert dedup.info["lines"] == 8 and dedup.info["alpha"] == 0
    assert not is_equiangular(orbit, require_positive=True, identify_duplicates=True)


def test_uniform_profile_fails_parity():
    fd = fiducial_diagnostics([1] * 8)
    assert fd.l == [0] * 8 and not fd.all_odd


def test_float_fiducial():
    fd = fiducial_diagnostics(hoggar_vector().to_complex())
    assert fd.all_odd and not fd.exact


def test_pauli_orbit_of_basis_vector():
    ls = pauli_orbit([1, 0], 1)
    assert ls.m == 4
    assert is_equiangular(ls, identify_duplicates=True).info["lines"] == 2


def test_sic_d2():
    v = sic_fiducial_d2()
    ls = pauli_orbit(v, 1)
    assert is_equiangular(ls).info["alpha"] == Fraction(1, 3) and ls.m == 4
    assert fiducial_diagnostics(v).l == [-1, 1]


def test_pauli_orbit_k3_is_hoggar():
    assert pauli_orbit(hoggar_vector(), 3).data.equals(hoggar().data)


def test_pauli_orbit_rejects_bad_length():
    with pytest.raises(ValueError):
        pauli_orbit([1, 0, 0], 1)


@pytest.mark.parametrize("q", [3, 4, 5])
def test_rds_roundtrip(q):
    F = mubs_from_semifield(semifield_make_field(gf(q)))
    cert, dual = extract_rds_from_schur_group(F)
    assert cert.verified and cert.params == (q, q, q, 1)
    R = mubs_from_rds(dual, cert.normal_subgroup, cert.subset)
    assert family_projective_match(F, R) and family_projective_match(R, F)


def test_extract_rejects_perturbed_family():
    F = mubs_from_semifield(semifield_make_field(gf(3)))
    rows = [F.basis(b).data for b in range(F.bases)]
    r1 = rows[1].tolist()
    r1[1] = [x * root_of_unity(3) if j == 0 else x for j, x in enumerate(r1[1])]
    rows[1] = CycArray.from_scalars(r1, rows[1].order)
    bad = _family(rows, F.labels, True, "perturbed")
    with pytest.raises((NotSchurClosed, ValueError)):
        extract_rds_from_schur_group(bad)


def test_family_json():
    doc = wf_odd(3).to_json()
    assert doc["includes_standard"] and len(doc["labels"]) == 4
    assert doc["lines"]["dim"] == 3


@pytest.mark.parametrize("make", [lambda: wf_odd(5), lambda: wf_even(2), lambda: alltop(7),
                                  lambda: mubs_from_semifield(semifield_make_field(gf(8)))])
def test_nonstandard_bases_flat_with_modulus_one_over_q(make):
    F = make()
    for b in range(1, F.bases):
        B = F.basis(b)
        assert is_flat(B)
        w = B.data.abs2()
        for row in range(B.m):
            assert w.entry(row, 0) * B.dim == B.norms[row]


@settings(max_examples=60)
@given(st.lists(st.sampled_from([-3, -1, 1, 3]), min_size=3, max_size=3))
def test_dimension4_products_rational_only_for_opposite_l(head):
    # alpha_i alpha_j is rational iff l_i = -l_j when sqrt(d+1) = sqrt(5) is irrational
    l = head + [-sum(head)]
    alpha = alpha_from_l(l, 4)
    fd = profile_from_alpha(alpha)
    bad = set(fd.irrational_products)
    for i in range(4):
        for j in range(i + 1, 4):
            assert ((i, j) in bad) == (l[i] != -l[j])
    assert fd.alpha_sum == 1


@settings(max_examples=30)
@given(st.sampled_from([5, 7, 11, 13, 25, 49]), st.integers(1, 48))
def test_alltop_target_is_a_permutation(q, a):
    F = gf(q)
    a = a % q or 1
    beta, cmap = alltop_target(F, a)
    assert sorted(cmap) == list(range(q))
    # beta * 12 * a = -1 in GF(q)
    assert F.mul(F.mul(beta, F.scalar(12, 1)), a) == F.neg(1)
