"""Generalized Pauli operators D_(a,b) = X(a) Z(b), their eigenbases, and error-basis predicates.

Odd q: X(a) e_u = e_{u+a}, Z(b) e_u = omega^tr(bu) e_u with omega = zeta_p.
Even q = 2^n: the standard basis is indexed by the Teichmueller set T of
GR(4^n), identified with GF(2^n) by reduction mod 2; X(a) e_u = e_{u+a+2 sqrt(ua)}
and Z(b) e_u = i^tr(2bu) e_u.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .constructions import MubFamily, _family
from .cyclotomic import CycArray
from .fields import FiniteField, GaloisRing, gf, gr_make, prime_power
from .lineset import EXACT, LineSet, gram
from .reports import Check


@dataclass(frozen=True, eq=False)
class PauliContext:
    q: int
    fq: FiniteField = field(repr=False)
    ring: GaloisRing | None = field(default=None, repr=False)

    @property
    def p(self) -> int:
        return self.fq.p

    @property
    def even(self) -> bool:
        return self.fq.p == 2

    @property
    def order(self) -> int:
        """Order of the roots of unity appearing in the operators."""
        return 4 if self.even else self.fq.p

    @property
    def elements(self) -> np.ndarray:
        return np.arange(self.q)


@lru_cache(maxsize=None)
def pauli_context(q: int) -> PauliContext:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    if pe[0] == 2:
        R = gr_make(pe[1])
        return PauliContext(q, R.field, R)
    return PauliContext(q, gf(q))


@lru_cache(maxsize=None)
def _teich_shift(q: int) -> np.ndarray:
    """S[a, u] = index of u + a + 2 sqrt(ua) in T; equals the field sum a + u."""
    ctx = pauli_context(q)
    R = ctx.ring
    S = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        ta = R.lift(a)
        for u in range(q):
            tu = R.lift(u)
            s = R.add(R.add(tu, ta), R.smul(2, R.teich_sqrt(R.mul(tu, ta))))
            if not R.in_teichmuller(s):
                raise ArithmeticError("u + a + 2 sqrt(ua) left the Teichmueller set")
            S[a, u] = R.unlift(s)
    if not np.array_equal(S, ctx.fq.add(np.arange(q)[:, None], np.arange(q)[None, :])):
        raise ArithmeticError("Teichmueller addition disagrees with addition mod 2")
    return S


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """Monomial operator: column u carries zeta_order^exps[u] into row perm[u]."""

    label: tuple
    perm: np.ndarray = field(repr=False)
    exps: np.ndarray = field(repr=False)
    order: int

    @property
    def size(self) -> int:
        return len(self.perm)

    def matrix(self) -> CycArray:
        E = np.full((self.size, self.size), -1, dtype=np.int64)
        E[self.perm, np.arange(self.size)] = self.exps % self.order
        return CycArray.from_exponents(E, self.order)

    def __matmul__(self, other: PauliOperator) -> PauliOperator:
        if self.order != other.order:
            raise ValueError("operators over different roots of unity")
        perm = self.perm[other.perm]
        exps = (other.exps + self.exps[other.perm]) % self.order
        return PauliOperator((self.label, other.label), perm, exps, self.order)

    def apply_exponents(self, v: np.ndarray) -> np.ndarray:
        """Exponent vector of D v for a vector of roots of unity given by exponents (last axis)."""
        out = np.empty_like(v)
        out[..., self.perm] = v + self.exps
        return out % self.order

    def projective_key(self) -> tuple:
        return tuple(self.perm.tolist()), tuple(((self.exps - self.exps[0]) % self.order).tolist())

    def is_identity(self) -> bool:
        return bool(np.all(self.perm == np.arange(self.size)) and not np.any(self.exps % self.order))


def pauli(a: int, b: int, ctx: PauliContext | int) -> PauliOperator:
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    if not (0 <= a < ctx.q and 0 <= b < ctx.q):
        raise ValueError(f"label ({a}, {b}) is outside GF({ctx.q})")
    F = ctx.fq
    u = ctx.elements
    if ctx.even:
        perm = _teich_shift(ctx.q)[a]
        exps = (2 * ctx.ring.trace_table[F.mul(b, u)]) % 4
    else:
        perm = F.add(u, a)
        exps = F.trace_table[F.mul(b, u)]
    return PauliOperator((int(a), int(b)), np.asarray(perm, dtype=np.int64),
                         np.asarray(exps, dtype=np.int64), ctx.order)


def all_paulis(ctx: PauliContext | int) -> list[PauliOperator]:
    """D_(a,b) for all labels, in the order a*q + b."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    return [pauli(a, b, ctx) for a in range(ctx.q) for b in range(ctx.q)]


def slope_label(a: int, c: int, ctx: PauliContext) -> int:
    """b with D_(a,b) in the class of slope c: 2ac (odd) or ac (even)."""
    F = ctx.fq
    ac = F.mul(a, c)
    return int(ac if ctx.even else F.add(ac, ac))


# ---------------------------------------------------------------------------
# eigenbases


def eigen_exponents(c: int, ctx: PauliContext | int) -> np.ndarray:
    """E[d, x] with phi_{c,d}[x] = root^E: tr(c x^2 + 2 d x) over GF(p) or Z4."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    F = ctx.fq
    x = ctx.elements
    cxx = F.mul(c, F.mul(x, x))
    dx = F.mul(x[None, :], x[:, None])           # [d, x]
    if ctx.even:
        tT = ctx.ring.trace_table
        return (tT[cxx][None, :] + 2 * tT[dx]) % 4
    t = F.trace_table
    return t[F.add(cxx[None, :], F.add(dx, dx))] % ctx.p


def eigenbasis(c: int, ctx: PauliContext | int) -> CycArray:
    """Rows are phi_{c,d} for d in field order."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    return CycArray.from_exponents(eigen_exponents(c, ctx), ctx.order)


def eigenvalue_exponent(a: int, c: int, d, ctx: PauliContext) -> np.ndarray:
    """-tr(c a^2 + 2 d a)."""
    F = ctx.fq
    d = np.asarray(d)
    caa = F.mul(c, F.mul(a, a))
    da = F.mul(d, a)
    if ctx.even:
        tT = ctx.ring.trace_table
        return (-(tT[caa] + 2 * tT[da])) % 4
    return (-F.trace_table[F.add(caa, F.add(da, da))]) % ctx.p


def eigenvector_check(ctx: PauliContext | int) -> Check:
    """D_(a,b) phi_{c,d} = root^(-tr(ca^2 + 2da)) phi_{c,d} for every a, c, d with b on slope c."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    q = ctx.q
    for c in range(q):
        phi = eigen_exponents(c, ctx)
        for a in range(q):
            D = pauli(a, slope_label(a, c, ctx), ctx)
            lam = eigenvalue_exponent(a, c, np.arange(q), ctx)
            bad = np.any(D.apply_exponents(phi) != (phi + lam[:, None]) % ctx.order, axis=1)
            if np.any(bad):
                return Check(False, (a, c, int(np.argmax(bad))))
    return Check(True, None, {"q": q, "triples": q**3})


def eigen_family(ctx: PauliContext | int) -> MubFamily:
    """Standard basis (the Z class) plus eigenbasis(c) for every slope c."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    bases = [CycArray.identity(ctx.q, ctx.order)] + [eigenbasis(c, ctx) for c in range(ctx.q)]
    return _family(bases, ["Z"] + list(range(ctx.q)), True,
                   f"common eigenbases of the Pauli classes over GF({ctx.q})", {"q": ctx.q})


# ---------------------------------------------------------------------------
# predicates


def _as_matrix(M) -> CycArray:
    return M.matrix() if isinstance(M, PauliOperator) else M


def _matrix_key(M: CycArray) -> tuple:
    """Projective class of a matrix: canonical entries after dividing by the first nonzero one."""
    flat = M.num.reshape(-1, M.order)
    F = CycArray(M.order, flat, M.den)
    nz = np.flatnonzero(~F.is_zero())
    piv = F.entry(int(nz[0]))
    G = F.scale(piv.inverse())
    canon = G.canonical()
    return (M.order, G.den, tuple(np.asarray(canon).ravel().tolist()))


def trace_orthogonality(ops) -> Check:
    """tr(A^* B) = 0 for all distinct pairs: Gram of the flattened matrices."""
    mats = [_as_matrix(M) for M in ops]
    n2 = mats[0].shape[0] * mats[0].shape[1]
    rows = CycArray.concat([CycArray(m.order, m.num.reshape(1, n2, m.order), m.den) for m in mats], axis=0)
    rep = gram(LineSet(rows, EXACT))
    bad = rep.first_mismatch("all", lambda v: v == 0)
    if bad:
        return Check(False, bad[0], {"value": bad[1]})
    return Check(True)


def nice_error_basis_check(ops) -> Check:
    """Pairwise trace-orthogonal, and a group of order n^2 modulo scalars."""
    ops = list(ops)
    n = _as_matrix(ops[0]).shape[0]
    if len(ops) != n * n:
        return Check(False, None, {"condition": "count", "count": len(ops)})
    orth = trace_orthogonality(ops)
    if not orth:
        return Check(False, orth.witness, {"condition": "orthogonality", **orth.info})
    if all(isinstance(M, PauliOperator) for M in ops):
        keys = {M.projective_key(): i for i, M in enumerate(ops)}
        product = lambda i, j: (ops[i] @ ops[j]).projective_key()
    else:
        mats = [_as_matrix(M) for M in ops]
        keys = {_matrix_key(M): i for i, M in enumerate(mats)}
        product = lambda i, j: _matrix_key(mats[i] @ mats[j])
    if len(keys) != n * n:
        return Check(False, None, {"condition": "projective classes", "classes": len(keys)})
    for i in range(len(ops)):
        for j in range(len(ops)):
            if product(i, j) not in keys:
                return Check(False, (i, j), {"condition": "closure"})
    return Check(True, None, {"order": n * n})


def monomiality_check(ops) -> Check:
    """Every matrix has exactly one nonzero entry in each row and each column."""
    for i, M in enumerate(ops):
        nz = ~_as_matrix(M).is_zero()
        if not (np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1)):
            return Check(False, i)
    return Check(True)


def commute(A, B) -> bool:
    A, B = _as_matrix(A), _as_matrix(B)
    return (A @ B).equals(B @ A)


def phase_commutation_check(ctx: PauliContext | int) -> Check:
    """D D' = lambda D' D with lambda a root of unity, for every pair of labels."""
    ops = all_paulis(ctx)
    P = np.array([D.perm for D in ops])
    E = np.array([D.exps for D in ops])
    N = ops[0].order
    # (i, j, u): D_i D_j e_u
    perm_ij = np.take_along_axis(P[:, None, :].repeat(len(ops), 1), P[None, :, :].repeat(len(ops), 0), 2)
    exp_ij = (E[None, :, :] + np.take_along_axis(E[:, None, :].repeat(len(ops), 1),
                                                  P[None, :, :].repeat(len(ops), 0), 2)) % N
    perm_ji = perm_ij.transpose(1, 0, 2)
    exp_ji = exp_ij.transpose(1, 0, 2)
    same_perm = np.all(perm_ij == perm_ji, axis=2)
    diff = (exp_ij - exp_ji) % N
    const = np.all(diff == diff[:, :, :1], axis=2)
    bad = ~(same_perm & const)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        return Check(False, (ops[i].label, ops[j].label))
    return Check(True, None, {"pairs": len(ops) ** 2})


def slope_partition(ctx: PauliContext | int) -> list[list[PauliOperator]]:
    """Classes {D_(a, slope(a,c))}_a for each c, then {D_(0,b)}_b; each contains I."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    q = ctx.q
    classes = [[pauli(a, slope_label(a, c, ctx), ctx) for a in range(q)] for c in range(q)]
    classes.append([pauli(0, b, ctx) for b in range(q)])
    return classes


def slope_bases(ctx: PauliContext | int) -> list[CycArray]:
    """Common eigenbases matching slope_partition: eigenbasis(c) per slope, then the standard basis."""
    if isinstance(ctx, int):
        ctx = pauli_context(ctx)
    return [eigenbasis(c, ctx) for c in range(ctx.q)] + [CycArray.identity(ctx.q, ctx.order)]


def _common_eigenvectors(ops, V: CycArray) -> bool:
    """Every row of V is an eigenvector of every operator."""
    zero = V.is_zero()
    piv = np.argmax(~zero, axis=1)
    r = np.arange(V.shape[0])
    Vp = CycArray(V.order, V.num[r, piv][:, None, :], V.den)
    for M in ops:
        W = V @ _as_matrix(M).T                      # rows are M v
        Wp = CycArray(W.order, W.num[r, piv][:, None, :], W.den)
        if not W.schur(Vp).equals(V.schur(Wp)):
            return False
    return True


def maximal_commuting_partition_check(C, classes, bases=None) -> Check:
    """Classes of size n containing I, commuting inside, and C pairwise trace-orthogonal.

    I is shared by every class; orthogonality runs over I plus the non-identity
    members. With ``bases``, basis i must be an orthogonal common eigenbasis of class i.
    """
    C = list(C)
    n = _as_matrix(C[0]).shape[0]
    ident = CycArray.identity(n)
    for i, cls in enumerate(classes):
        if len(cls) != n:
            return Check(False, i, {"condition": "class size"})
        mats = [_as_matrix(M) for M in cls]
        if not any(M.equals(ident) for M in mats):
            return Check(False, i, {"condition": "identity"})
        for x in range(n):
            for y in range(x + 1, n):
                if not commute(mats[x], mats[y]):
                    return Check(False, (i, x, y), {"condition": "commute"})
    members = [ident] + [M for cls in classes for M in map(_as_matrix, cls) if not M.equals(ident)]
    if len(members) != len(C):
        return Check(False, None, {"condition": "partition", "members": len(members)})
    if len(members) > 1:
        orth = trace_orthogonality(members)
        if not orth:
            return Check(False, orth.witness, {"condition": "orthogonality"})
    if bases is not None:
        for i, (cls, V) in enumerate(zip(classes, bases)):
            if not _common_eigenvectors(cls, V):
                return Check(False, i, {"condition": "common eigenbasis"})
            rep = gram(LineSet(V, EXACT))
            if rep.first_mismatch("all", lambda v: v == 0):
                return Check(False, i, {"condition": "eigenbasis orthogonality"})
    return Check(True, None, {"classes": len(classes)})
