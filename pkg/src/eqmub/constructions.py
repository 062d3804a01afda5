"""Equiangular line sets and mutually unbiased bases built from characters, fields and Pauli orbits."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .abelian import (
    AbelianGroup,
    ExplicitGroup,
    HughesGroup,
    RelativeDifferenceSetCert,
    is_difference_set,
    is_relative_difference_set,
)
from .cyclotomic import CycArray, Cyclotomic, root_of_unity, sqrt_rational
from .fields import gf, gr_make, prime_power
from .lineset import (
    EXACT,
    Backend,
    LineSet,
    is_flat,
    is_mub_family,
    equivalence_certificate_check,
    lineset_to_json,
    match_columns_up_to_phase,
)
from .reports import Check, jsonable
from .semifield import Semifield

CHAR_VERIFY_CAP = 2048     # full character tables above this size are not materialized


# ---------------------------------------------------------------------------
# MUB families


@dataclass(eq=False)
class MubFamily:
    """A LineSet partitioned into bases, with one label per basis."""

    lines: LineSet
    labels: list
    includes_standard: bool
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lines.partition is None:
            raise ValueError("a MUB family needs a partition")
        if len(self.labels) != len(self.lines.partition):
            raise ValueError("one label per basis is required")

    @property
    def k(self) -> int:
        return self.lines.dim

    @property
    def bases(self) -> int:
        return len(self.lines.partition)

    def basis(self, b: int) -> LineSet:
        return self.lines.subset(self.lines.partition[b])

    def basis_matrix(self, b: int) -> CycArray | np.ndarray:
        """Columns are the vectors of basis b."""
        sub = self.basis(b).data
        return sub.T if isinstance(sub, CycArray) else sub.T.copy()

    def verify(self, threads: int | None = None) -> Check:
        chk = is_mub_family(self.lines, threads=threads)
        if not chk:
            return chk
        start = 1 if self.includes_standard else 0
        for b in range(start, self.bases):
            flat = is_flat(self.basis(b))
            if not flat:
                return Check(False, (b, flat.witness), {**chk.info, "kind": "non-flat basis"})
        return chk

    def to_json(self) -> dict:
        return {"lines": lineset_to_json(self.lines), "labels": jsonable(self.labels),
                "includes_standard": self.includes_standard, "params": jsonable(self.params)}


def _family(bases: list[CycArray], labels: list, includes_standard: bool, meta: str,
            params: dict | None = None) -> MubFamily:
    """Rows of each array are the vectors of one basis."""
    data = CycArray.concat(bases, axis=0)
    k = bases[0].shape[1]
    part = [list(range(b * k, (b + 1) * k)) for b in range(len(bases))]
    return MubFamily(LineSet(data, EXACT, part, meta), labels, includes_standard, params or {})


def family_projective_match(F1: MubFamily, F2: MubFamily) -> Check:
    """Every vector of F1 is proportional to a vector of F2 and bases go to bases."""
    A, B = F1.lines, F2.lines
    if A.dim != B.dim or A.m != B.m:
        return Check(False, None, {"kind": "shape"})
    if A.backend.exact and B.backend.exact:
        match = match_columns_up_to_phase(A.data.T, B.data.T)
    else:
        match = match_columns_up_to_phase(A.to_complex().T, B.to_complex().T)
    if match is None:
        return Check(False, None, {"kind": "vector without a proportional partner"})
    perm, _ = match
    pa, pb = A.part_index(), B.part_index()
    basis_map: dict[int, int] = {}
    for i, j in enumerate(perm):
        if basis_map.setdefault(int(pa[i]), int(pb[j])) != pb[j]:
            return Check(False, i, {"kind": "basis split"})
    return Check(True, None, {"basis_map": basis_map, "perm": perm})


# ---------------------------------------------------------------------------
# character constructions


def eal_from_difference_set(G: AbelianGroup, D) -> LineSet:
    """Line a has coordinates chi_a(d), d over D in group element order."""
    D = sorted(int(d) for d in D)
    cert = is_difference_set(G, D, G.order, len(D), 1)
    if not cert:
        raise ValueError(f"not a ({G.order},{len(D)},1) difference set; witness {cert.witness}")
    X = G.char_exponents(None, np.array(D))
    meta = f"equiangular lines from a ({G.order},{len(D)},1) difference set in {G.name}; D={D}"
    return LineSet.from_exponents(X, G.char_order, meta=meta)


def mubs_from_rds(G: AbelianGroup, N, D) -> MubFamily:
    """Standard basis plus one basis per coset of the characters trivial on N.

    Cosets are the classes of equal restriction to N, in order of first
    appearance among character labels; each basis holds the restrictions to D.
    """
    D = sorted(int(d) for d in D)
    N = sorted(int(x) for x in N)
    cert = is_relative_difference_set(G, N, D)
    if not cert:
        raise ValueError(f"not a relative difference set; witness {cert.witness}")
    if not cert.semiregular:
        raise ValueError(f"relative difference set {cert.params} is not semiregular")
    k, n = len(D), len(N)
    if G.order <= CHAR_VERIFY_CAP:
        from .abelian import character_table_check
        chk = character_table_check(G)
        if not chk:
            raise ArithmeticError(f"character table of {G.name} is broken: {chk}")
    XN = G.char_exponents(None, np.array(N)) % G.char_order
    XD = G.char_exponents(None, np.array(D)) % G.char_order
    _, first, inverse = np.unique(XN, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    cosets = []
    for c in np.argsort(first):
        members = np.flatnonzero(inverse == c)
        if len(members) != k:
            raise ArithmeticError(f"coset of size {len(members)}, expected {k}")
        cosets.append(members)
    if len(cosets) != n:
        raise ArithmeticError(f"{len(cosets)} cosets, expected {n}")
    bases = [CycArray.identity(k, G.char_order)]
    bases += [CycArray.from_exponents(XD[members], G.char_order) for members in cosets]
    labels = ["I"] + [G.label(int(m[0])) for m in cosets]
    meta = f"MUBs from a semiregular {tuple(cert.params)} relative difference set in {G.name}; D={D}"
    return _family(bases, labels, True, meta, {"rds": list(cert.params), "group": G.name})


def mubs_from_semifield(E: Semifield, form: str = "dot") -> MubFamily:
    """q + 1 bases of C^q from the Hughes group of a commutative semifield."""
    G = HughesGroup(E, form)
    fam = mubs_from_rds(G, G.N, G.D)
    fam.params.update({"semifield": E.kind, "q": E.q, "form": form})
    return fam


# ---------------------------------------------------------------------------
# Wootters-Fields and Alltop


def _odd_field(q: int):
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    if pe[0] == 2:
        raise ValueError("this construction needs odd characteristic")
    return gf(q)


def wf_odd(q: int) -> MubFamily:
    """Identity plus W_alpha[x, y] = omega^tr(alpha x^2 + x y); basis vectors are the columns."""
    F = _odd_field(q)
    x = np.arange(q)
    t = F.trace_table
    xy = F.mul(x[:, None], x[None, :])
    bases = [CycArray.identity(q, F.p)]
    for a in range(q):
        ax2 = F.mul(a, F.mul(x, x))
        W = t[F.add(ax2[:, None], xy)]          # [x, y]
        bases.append(CycArray.from_exponents(W.T, F.p))
    return _family(bases, ["I"] + list(range(q)), True, f"Wootters-Fields bases of C^{q}",
                   {"q": q, "kind": "wf_odd"})


def wf_even(n: int) -> MubFamily:
    """Identity plus W_alpha = (i^tr(alpha x^2 + 2 y x)) over the Teichmueller set of GR(4^n)."""
    R = gr_make(n)
    F = R.field
    q = F.q
    x = np.arange(q)
    tT = R.trace_table
    yx = tT[F.mul(x[:, None], x[None, :])]
    bases = [CycArray.identity(q, 4)]
    for a in range(q):
        axx = tT[F.mul(a, F.mul(x, x))]
        W = (axx[:, None] + 2 * yx) % 4        # [x, y]
        bases.append(CycArray.from_exponents(W.T, 4))
    return _family(bases, ["I"] + list(range(q)), True, f"Wootters-Fields bases of C^{q} (even)",
                   {"q": q, "n": n, "kind": "wf_even"})


def wf(q: int) -> MubFamily:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    return wf_even(pe[1]) if pe[0] == 2 else wf_odd(q)


def _alltop_field(q: int):
    F = _odd_field(q)
    if F.p == 3:
        raise ValueError("Alltop bases need characteristic p > 3")
    return F


def alltop(q: int) -> MubFamily:
    """Identity plus A_alpha[x, y] = omega^tr((x + alpha)^3 + y (x + alpha))."""
    F = _alltop_field(q)
    x = np.arange(q)
    t = F.trace_table
    bases = [CycArray.identity(q, F.p)]
    for a in range(q):
        s = F.add(x, a)
        cube = F.mul(s, F.mul(s, s))
        A = t[F.add(cube[:, None], F.mul(x[None, :], s[:, None]))]   # [x, y]
        bases.append(CycArray.from_exponents(A.T, F.p))
    return _family(bases, ["I"] + list(range(q)), True, f"Alltop bases of C^{q}",
                   {"q": q, "kind": "alltop"})


def alltop_target(F, a: int) -> tuple[int, list[int]]:
    """(beta, column map) for A_a: beta = -1/(12a) and y -> (3a^2 + y)/(6a).

    Completing the square in the Gauss sum of A_0^* A_a puts the linear
    coefficient (3a^2 + y)/(6a) in front of x, so the 1/a factor is required.
    """
    twelve_inv = F.inv(F.scalar(12, 1))
    beta = int(F.neg(F.mul(twelve_inv, F.inv(a))))
    six_a_inv = F.inv(F.mul(F.scalar(6, 1), a))
    three_a2 = F.scalar(3, F.mul(a, a))
    return beta, [int(F.mul(six_a_inv, F.add(three_a2, y))) for y in range(F.q)]


@dataclass
class EquivalenceCertificate:
    U: CycArray
    perm: list[int]
    phases: list[Cyclotomic]
    basis_map: dict
    column_maps: dict
    check: Check

    def to_json(self) -> dict:
        return jsonable({"perm": self.perm, "phases": self.phases, "basis_map": self.basis_map,
                         "column_maps": self.column_maps, "check": self.check,
                         "U": [[x for x in row] for row in self.U.tolist()]})


def alltop_wf_equivalence(q: int) -> EquivalenceCertificate:
    """U = A_0^* carries the Alltop family onto the Wootters-Fields family.

    The correspondence is discovered by projective matching and then compared
    with the closed form of ``alltop_target``; A_0 goes to I and I goes to W_0.
    """
    F = _alltop_field(q)
    A, W = alltop(q), wf_odd(q)
    A0 = A.basis_matrix(1)
    U = A0.H
    img = A.lines.data @ U.T                     # rows are U a_i
    match = match_columns_up_to_phase(img.T, W.lines.data.T)
    if match is None:
        raise ArithmeticError("no projective matching between U*Alltop and Wootters-Fields")
    perm, phases = match
    # normalizing by the row x = 0 entry gives the same phases as the matching
    rows0 = img[:, 0].tolist()
    for i, (ph, r0) in enumerate(zip(phases, rows0)):
        target = W.lines.data.entry(perm[i], 0)
        if ph * r0 != target:
            raise ArithmeticError(f"phase of vector {i} disagrees with the x = 0 normalization")
    basis_map, column_maps = {}, {}
    for b in range(A.bases):
        block = [perm[b * q + y] for y in range(q)]
        targets = {j // q for j in block}
        if len(targets) != 1:
            raise ArithmeticError(f"basis {A.labels[b]} is split across target bases")
        basis_map[A.labels[b]] = W.labels[targets.pop()]
        column_maps[A.labels[b]] = [j % q for j in block]
    if basis_map["I"] != 0 or basis_map[0] != "I":
        raise ArithmeticError(f"A_0 / I correspondence wrong: {basis_map}")
    if column_maps[0] != list(range(q)):
        raise ArithmeticError("A_0 is not carried column by column onto I")
    for a in range(1, q):
        beta, expect = alltop_target(F, a)
        if basis_map[a] != beta:
            raise ArithmeticError(f"A_{a} went to W_{basis_map[a]}, expected W_{beta}")
        if column_maps[a] != expect:
            raise ArithmeticError(f"column map of A_{a} is {column_maps[a]}, expected {expect}")
    check = equivalence_certificate_check(A.lines, W.lines, U, perm, phases)
    if not check:
        raise ArithmeticError(f"equivalence certificate rejected: {check}")
    return EquivalenceCertificate(U, perm, phases, basis_map, column_maps, check)


# ---------------------------------------------------------------------------
# Pauli orbits and Hoggar's lines

# single-qubit Paulis as (permutation of basis indices, sign per source index); Y = XZ
_PAULI_1 = {
    "I": (np.array([0, 1]), np.array([1, 1])),
    "X": (np.array([1, 0]), np.array([1, 1])),
    "Y": (np.array([1, 0]), np.array([1, -1])),
    "Z": (np.array([0, 1]), np.array([1, -1])),
}
PAULI_LABELS = ("I", "X", "Y", "Z")


def pauli_tensor(labels: str) -> tuple[np.ndarray, np.ndarray]:
    """(perm, sign) with P e_u = sign[u] e_perm[u]; the first factor is the most significant bit."""
    perm, sign = np.array([0]), np.array([1])
    for ch in labels:
        p1, s1 = _PAULI_1[ch]
        perm = (2 * perm[:, None] + p1[None, :]).ravel()
        sign = (sign[:, None] * s1[None, :]).ravel()
    return perm, sign


def pauli_orbit(v, k: int, backend: Backend | None = None) -> LineSet:
    """All 4^k vectors P v for P in {I, X, Y, Z}^(tensor k), labels in lexicographic order."""
    if isinstance(v, LineSet):
        v = v.data[0]
    exact = backend.exact if backend is not None else not (isinstance(v, np.ndarray) and v.dtype.kind == "c")
    if exact:
        V = v if isinstance(v, CycArray) else CycArray.from_scalars(list(v))
    else:
        V = np.asarray(v.to_complex() if isinstance(v, CycArray) else v, dtype=np.complex128)
    d = V.shape[0]
    if d != 2**k:
        raise ValueError(f"vector of length {d} is not in C^(2^{k})")
    labels = ["".join(t) for t in product(PAULI_LABELS, repeat=k)]
    rows_src, rows_sign = [], []
    for lab in labels:
        perm, sign = pauli_tensor(lab)
        src = np.empty(d, dtype=np.int64)
        src[perm] = np.arange(d)             # (P v)[perm[u]] = sign[u] v[u]
        rows_src.append(src)
        rows_sign.append(sign[src])
    src, sgn = np.array(rows_src), np.array(rows_sign)
    meta = f"Pauli orbit in C^{d}; rows labelled {','.join(labels)}"
    if exact:
        num = V.num[src] * sgn[..., None]
        return LineSet(CycArray(V.order, num, V.den), EXACT, None, meta)
    b = backend or Backend("float")
    return LineSet(V[src] * sgn, b, None, meta)


def hoggar_vector() -> CycArray:
    s, t = root_of_unity(8, 1), root_of_unity(8, 7)
    r = root_of_unity(8, 1) + root_of_unity(8, -1)
    return CycArray.from_scalars([0, 0, s, t, s, -s, 0, r])


def hoggar() -> LineSet:
    """64 lines in C^8: the orbit of (0,0,s,t,s,-s,0,r) under the three-qubit Pauli group."""
    ls = pauli_orbit(hoggar_vector(), 3)
    ls.meta = "Hoggar lines: " + ls.meta
    return ls


def sic_fiducial_d2() -> CycArray:
    """(1, zeta_12 + zeta_6): an exact fiducial whose qubit Pauli orbit is 4 lines at alpha = 1/3."""
    return CycArray.from_scalars([1, root_of_unity(12, 1) + root_of_unity(6, 1)])


# ---------------------------------------------------------------------------
# fiducial diagnostics


@dataclass
class FiducialDiagnostics:
    """alpha_i = |v_i|^2 / |v|^2 and l_i = sqrt(d+1) (d alpha_i - 1); equiangular orbits need every l_i odd."""

    dim: int
    alpha: list
    l: list
    odd: list[bool]
    alpha_sum: object
    exact: bool
    irrational_products: list[tuple[int, int]]

    @property
    def all_odd(self) -> bool:
        return all(self.odd)

    @property
    def products_rational(self) -> bool:
        return not self.irrational_products

    def to_json(self) -> dict:
        return jsonable({"dim": self.dim, "alpha": self.alpha, "l": self.l, "odd": self.odd,
                         "all_odd": self.all_odd, "alpha_sum": self.alpha_sum, "exact": self.exact,
                         "irrational_products": self.irrational_products})


def _odd_integer(x, tol: float) -> bool:
    if isinstance(x, Cyclotomic):
        if not x.is_rational():
            return False
        f = x.to_fraction()
        return f.denominator == 1 and f.numerator % 2 == 1
    r = round(x)
    return abs(x - r) <= tol and r % 2 == 1


def profile_from_alpha(alpha, tol: float = 1e-9) -> FiducialDiagnostics:
    """Diagnostics for a given profile alpha (exact Cyclotomic/Fraction or float)."""
    d = len(alpha)
    exact = not any(isinstance(a, (float, complex, np.floating)) for a in alpha)
    if exact:
        alpha = [Cyclotomic.coerce(a) for a in alpha]
        root = sqrt_rational(d + 1)
        ls = [root * (a * d - 1) for a in alpha]
        total = sum(alpha, Cyclotomic.rational(0))
        bad = [(i, j) for i in range(d) for j in range(i + 1, d)
               if not (alpha[i] * alpha[j]).is_rational()]
        alpha_out = [a.to_fraction() if a.is_rational() else a for a in alpha]
        l_out = [x.to_fraction() if x.is_rational() else x for x in ls]
        total = total.to_fraction() if total.is_rational() else total
    else:
        alpha_out = [float(np.real(a)) for a in alpha]
        root = float(np.sqrt(d + 1))
        ls = [root * (d * a - 1) for a in alpha_out]
        l_out = ls
        total = float(sum(alpha_out))
        bad = []
    odd = [_odd_integer(x, tol) for x in ls]
    return FiducialDiagnostics(d, alpha_out, l_out, odd, total, exact, bad)


def fiducial_diagnostics(v, tol: float = 1e-9) -> FiducialDiagnostics:
    """Alpha profile of a candidate fiducial vector (exact for cyclotomic entries)."""
    if isinstance(v, CycArray):
        v = v.tolist()
    if isinstance(v, np.ndarray) and v.dtype.kind in "fc":
        w = np.abs(v) ** 2
        if not w.sum() > 0:
            raise ValueError("zero vector")
        return profile_from_alpha(list(w / w.sum()), tol)
    vals = [Cyclotomic.coerce(x) for x in v]
    w = [x.abs_squared() for x in vals]
    total = sum(w, Cyclotomic.rational(0))
    if total.is_zero():
        raise ValueError("zero vector")
    inv = total.inverse()
    return profile_from_alpha([x * inv for x in w], tol)


def alpha_from_l(l, d: int) -> list[Cyclotomic]:
    """alpha_i = (sqrt(d+1) + l_i) / (d sqrt(d+1)), exactly."""
    root = sqrt_rational(d + 1)
    inv = (root * d).inverse()
    return [(root + li) * inv for li in l]


# ---------------------------------------------------------------------------
# Schur groups back to relative difference sets


class NotSchurClosed(ArithmeticError):
    def __init__(self, pair):
        super().__init__(f"Schur product of vectors {pair} leaves the family")
        self.pair = pair


def schur_normalize(family: MubFamily) -> CycArray:
    """Non-standard vectors rescaled so every coordinate is a root of unity; rows of the result.

    Entries must share a rational squared modulus c; the phases are kept.
    """
    if not family.includes_standard:
        raise ValueError("the family must contain the standard basis as basis 0")
    if not family.lines.backend.exact:
        raise ValueError("Schur groups need exact vectors")
    idx = [i for part in family.lines.partition[1:] for i in part]
    V = family.lines.data[np.array(idx)]
    flat = is_flat(LineSet(V, EXACT))
    if not flat:
        raise ValueError(f"non-flat vector {idx[flat.witness[0]]}")
    rows = []
    for r in range(V.shape[0]):
        c = V.entry(r, 0).abs_squared()
        if not c.is_rational():
            raise ValueError(f"vector {idx[r]} has irrational entry modulus")
        c = c.to_fraction()
        row = V[r]
        if c != 1:
            row = row.scale(sqrt_rational(c).inverse())
        rows.append(row)
    return CycArray.concat([CycArray(r.order, r.num[None], r.den) for r in rows], axis=0)


def extract_rds_from_schur_group(family: MubFamily) -> tuple[RelativeDifferenceSetCert, ExplicitGroup]:
    """Relative difference set {w_j} in the dual of the Schur group of the non-standard vectors.

    Gamma is the set of Schur-normalized vectors; closed under coordinatewise
    multiplication it is a group of order n k. The coordinate maps w_j are
    characters of Gamma; D = {w_j} and N is the annihilator of the basis
    containing the all-ones vector.
    """
    V = schur_normalize(family)
    E = V.root_exponents()
    if E is None or np.any(E < 0):
        raise ValueError("Schur-normalized entries are not roots of unity")
    order = V.order
    k = family.k
    m = E.shape[0]
    index = {tuple(row): i for i, row in enumerate(E.tolist())}
    if len(index) != m:
        raise NotSchurClosed("repeated vector")
    ones = index.get((0,) * k)
    if ones is None:
        raise NotSchurClosed("no all-ones vector")
    # relabel so that the identity is element 0
    order_idx = [ones] + [i for i in range(m) if i != ones]
    E = E[order_idx]
    index = {tuple(row): i for i, row in enumerate(E.tolist())}
    T = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        S = (E[i][None, :] + E) % order
        for j, row in enumerate(S.tolist()):
            t = index.get(tuple(row))
            if t is None:
                a, b = order_idx[i], order_idx[j]
                raise NotSchurClosed((family_index(family, a), family_index(family, b)))
            T[i, j] = t
    # characters of Gamma generated by the coordinate maps w_j (exponent vectors over Gamma)
    W = E.T % order                                  # W[j, g] = exponent of w_j(g)
    chars = [np.zeros(m, dtype=np.int64)]
    seen = {tuple(chars[0])}
    for w in W:
        if tuple(w) not in seen:
            seen.add(tuple(w))
            chars.append(w)
    frontier = list(chars)
    while frontier:
        nxt = []
        for c in frontier:
            for w in W:
                s = (c + w) % order
                key = tuple(s)
                if key not in seen:
                    seen.add(key)
                    chars.append(s)
                    nxt.append(s)
        frontier = nxt
    if len(chars) != m:
        raise ArithmeticError(f"coordinate characters generate {len(chars)} characters, expected {m}")
    C = np.array(chars)                              # C[psi, g]
    cindex = {tuple(r): i for i, r in enumerate(C.tolist())}
    DT = np.empty((m, m), dtype=np.int64)
    for i in range(m):
        S = (C[i][None, :] + C) % order
        DT[i] = [cindex[tuple(r)] for r in S.tolist()]
    dual = ExplicitGroup(DT, C.T, order, name=f"dual Schur group (order {m})")
    D = [cindex[tuple(w)] for w in W.tolist()]
    # B_1: the non-standard basis holding the all-ones vector
    part = family.lines.partition
    flat_idx = [i for p in part[1:] for i in p]
    ones_vec = flat_idx[ones]
    b1 = next(p for p in part[1:] if ones_vec in p)
    b1_elems = [order_idx.index(flat_idx.index(i)) for i in b1]
    N = [i for i in range(m) if not np.any(C[i, b1_elems] % order)]
    cert = is_relative_difference_set(dual, N, D)
    return cert, dual


def family_index(family: MubFamily, r: int) -> int:
    """Index in family.lines of the r-th non-standard vector."""
    return [i for p in family.lines.partition[1:] for i in p][r]
