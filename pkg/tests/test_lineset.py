from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqmub.abelian import singer_difference_set
from eqmub.constructions import eal_from_difference_set, hoggar, hoggar_vector
from eqmub.cyclotomic import CycArray, root_of_unity
from eqmub.lineset import (
    Backend,
    LineSet,
    dumps,
    equivalence_certificate_check,
    export_gram_csv,
    flat_equiangular_cap,
    gram,
    is_equiangular,
    is_flat,
    is_mub_family,
    lineset_from_json,
    lineset_to_json,
    match_columns_up_to_phase,
    meets_with_equality,
    relative_bound,
    unitary_scale,
)


def singer(q):
    return eal_from_difference_set(*singer_difference_set(q))


def fourier(k):
    return CycArray.from_exponents(np.outer(np.arange(k), np.arange(k)) % k, k)


def test_standard_basis_gram():
    rep = gram(LineSet.standard_basis(3))
    assert rep.values() == [0]


def test_singer_q2_gram():
    rep = gram(singer(2))
    assert rep.values() == [Fraction(2, 9)]
    assert rep.count(Fraction(2, 9)) == 21


def test_repeated_vector_gram():
    ls = LineSet.from_exponents([[0, 1, 2], [0, 1, 2]], 3)
    assert gram(ls).values() == [1]


def test_equiangular_examples():
    assert is_equiangular(singer(3)).info["alpha"] == Fraction(3, 16)
    assert is_equiangular(LineSet.standard_basis(3)).info["alpha"] == 0
    assert not is_equiangular(LineSet.standard_basis(3), require_positive=True)


def test_equiangular_witness_is_first_pair():
    both = LineSet.concat([LineSet.standard_basis(3), LineSet.from_exponents([[0, 0, 0]], 1)])
    chk = is_equiangular(both)
    assert not chk
    assert chk.info["kind"] == "two angles"
    assert chk.witness == (0, 3, Fraction(1, 3))


def test_duplicate_handling():
    ls = LineSet.from_exponents([[0, 1, 2], [1, 2, 0], [0, 0, 0]], 3)
    assert not is_equiangular(ls)
    assert is_equiangular(ls, identify_duplicates=True).info["lines"] == 2


def test_mub_examples():
    k = 5
    F = LineSet(fourier(k), partition=[list(range(k))])
    assert is_mub_family(LineSet.concat([LineSet.standard_basis(k), F])).info["bases"] == 2
    two = LineSet.concat([LineSet.standard_basis(k), LineSet.standard_basis(k)])
    chk = is_mub_family(two)
    assert not chk and chk.witness == (0, 5, 1)


def test_flat_examples():
    assert is_flat(singer(3))
    assert not is_flat(LineSet.standard_basis(3))
    assert not is_flat(LineSet.from_rows(hoggar_vector()[None, :]))


def test_relative_bound_examples():
    assert relative_bound(4, Fraction(3, 16)) == 13
    assert relative_bound(8, Fraction(1, 9)) == 64
    assert relative_bound(6, 0) == 6
    assert flat_equiangular_cap(4) == 13
    assert meets_with_equality(singer(3))
    assert meets_with_equality(hoggar())


def test_equivalence_certificate_examples():
    A = singer(2)
    I = CycArray.identity(3)
    assert equivalence_certificate_check(A, A, I, range(7), [1] * 7)
    # scale vector 2 by zeta_8 and supply the matching phase
    z = root_of_unity(8)
    rows = A.data.tolist()
    rows[2] = [x * z for x in rows[2]]
    B = LineSet.from_rows(rows)
    phases = [1] * 7
    phases[2] = z
    assert equivalence_certificate_check(A, B, I, range(7), phases)
    assert not equivalence_certificate_check(A, B, I, range(7), [1] * 7)
    with pytest.raises(ValueError):
        equivalence_certificate_check(A, A, CycArray.from_exponents([[0, 0, -1], [0, 0, -1], [-1, -1, 0]], 1),
                                      range(7), [1] * 7)


def test_match_columns_examples():
    F = fourier(4)
    rev = CycArray.from_scalars([row[::-1] for row in F.tolist()])
    perm, phases = match_columns_up_to_phase(F, rev)
    assert perm == [3, 2, 1, 0] and all(p == 1 for p in phases)
    i = root_of_unity(4)
    cols = [list(c) for c in zip(*F.tolist())]
    cols[2] = [x * i for x in cols[2]]
    scaled = CycArray.from_scalars([list(r) for r in zip(*cols)])
    perm, phases = match_columns_up_to_phase(F, scaled)
    assert perm == [0, 1, 2, 3] and phases[2] == i
    assert match_columns_up_to_phase(F, CycArray.identity(4, 4)) is None


def test_unitary_scale():
    assert unitary_scale(fourier(5)) == 5
    assert unitary_scale(CycArray.from_scalars([[1, 1], [1, 0]])) is None
    assert abs(unitary_scale(fourier(3).to_complex()) - 3) < 1e-12


def test_json_roundtrip_exact_and_float():
    ls = LineSet.concat([LineSet.standard_basis(3), LineSet(fourier(3), partition=[[0, 1, 2]])])
    doc = json.loads(dumps(lineset_to_json(ls)))
    back = lineset_from_json(doc)
    assert back.data.equals(ls.data) and back.partition == ls.partition
    assert dumps(lineset_to_json(back)) == dumps(lineset_to_json(ls))
    f = ls.with_backend(Backend("float"))
    fb = lineset_from_json(json.loads(dumps(lineset_to_json(f))))
    assert np.allclose(fb.data, f.data) and not fb.backend.exact


def test_json_rejects_bad_dims():
    doc = lineset_to_json(singer(2))
    doc["dim"] = 4
    with pytest.raises(ValueError):
        lineset_from_json(doc)


def test_zero_vector_rejected():
    with pytest.raises(ValueError):
        LineSet.from_rows([[0, 0], [1, 0]])


def test_csv_export():
    buf = io.StringIO()
    n = export_gram_csv(singer(2), buf)
    assert n == 28
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["row", "col", "num", "den"]
    assert rows[1] == ["0", "0", "1", "1"]
    assert rows[2] == ["0", "1", "2", "9"]


def test_float_backend_matches_exact():
    ls = singer(4)
    chk = is_equiangular(ls.with_backend(Backend("float", 1e-9)))
    assert chk and abs(chk.info["alpha"] - 4 / 25) < 1e-9


def test_thread_count_does_not_change_results():
    ls = singer(7)
    a = gram(ls, block_rows=8, threads=1)
    b = gram(ls, block_rows=8, threads=4)
    assert a.hist == b.hist and a.first == b.first


def test_backend_env(monkeypatch):
    monkeypatch.setenv("EQMUB_BACKEND", "float")
    assert Backend.from_env().mode == "float"
    monkeypatch.setenv("EQMUB_BACKEND", "weird")
    with pytest.raises(ValueError):
        Backend.from_env()


@settings(max_examples=60)
@given(st.sampled_from([2, 3, 4]), st.data())
def test_gram_invariant_under_phases_and_permutation_unitary(q, data):
    ls = singer(q)
    k, m = ls.dim, ls.m
    N = 8
    phases = data.draw(st.lists(st.integers(0, N - 1), min_size=m, max_size=m))
    perm = data.draw(st.permutations(range(k)))
    P = CycArray.from_exponents(np.where(np.arange(k)[None, :] == np.array(perm)[:, None], 0, -1), 1)
    lam = CycArray.from_exponents(np.array(phases)[:, None], N)
    moved = LineSet((ls.data @ P.T).schur(lam))
    assert gram(moved).hist == gram(ls).hist


@settings(max_examples=20)
@given(st.integers(2, 9))
def test_mub_bound_sanity_on_fourier_pairs(k):
    fam = LineSet.concat([LineSet.standard_basis(k), LineSet(fourier(k), partition=[list(range(k))])])
    chk = is_mub_family(fam)
    assert chk and chk.info["bases"] <= k + 1
