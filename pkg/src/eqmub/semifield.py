"""Finite commutative semifields, the Z4 module embedding, and the affine plane checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .fields import FiniteField, gf, prime_power
from .reports import Check

SEMIFIELD_CAP = 6561
PLANE_CAP = 32


@dataclass(eq=False)
class Semifield:
    """A finite semifield on ``range(q)`` given by full operation tables.

    The additive group is always GF(p)^e with the base-p digit encoding, so
    ``digits`` doubles as the coordinate map used by scalar products.
    """

    q: int
    p: int
    add: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)
    one: int
    kind: str
    params: dict = field(default_factory=dict)
    zero: int = 0

    @cached_property
    def e(self) -> int:
        return prime_power(self.q)[1]

    @cached_property
    def digits(self) -> np.ndarray:
        out = np.zeros((self.q, self.e), dtype=np.int64)
        v = np.arange(self.q)
        for i in range(self.e):
            v, out[:, i] = np.divmod(v, self.p)
        return out

    @cached_property
    def neg(self) -> np.ndarray:
        return np.argmax(self.add == self.zero, axis=1)

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    def scalar(self, c: int, a):
        """Integer multiple c*a (repeated addition)."""
        a = np.asarray(a)
        out = np.zeros_like(a)
        for _ in range(c % self.p):
            out = self.add[out, a]
        return out

    @cached_property
    def square(self) -> np.ndarray:
        x = np.arange(self.q)
        return self.mul[x, x]

    def dot(self, a, b):
        """Standard GF(p)-valued scalar product of the digit coordinates."""
        return (self.digits[a] * self.digits[b]).sum(axis=-1) % self.p

    def __repr__(self):
        return f"Semifield({self.kind}, q={self.q})"


def semifield_make_field(F: FiniteField) -> Semifield:
    if F.q > SEMIFIELD_CAP:
        raise ValueError(f"semifield order {F.q} exceeds cap {SEMIFIELD_CAP}")
    e = np.arange(F.q)
    add = F.add(e[:, None], e[None, :])
    mul = F.mul(e[:, None], e[None, :])
    E = Semifield(F.q, F.p, add, mul, one=1, kind="field", params={"field": F})
    return E


def semifield_make_dickson(q0: int, sigma_power: int = 1, j: int | None = None) -> Semifield:
    """Dickson's commutative semifield on GF(q0)^2.

    (a, b) o (c, d) = (ac + j (bd)^sigma, ad + bc) with sigma = x -> x^(p^sigma_power)
    and j a nonsquare.  Element (a, b) is encoded as a + q0*b.
    """
    pe = prime_power(q0)
    if pe is None:
        raise ValueError(f"{q0} is not a prime power")
    p, n = pe
    if p == 2:
        raise ValueError("Dickson semifields need odd q0")
    if q0 * q0 > SEMIFIELD_CAP:
        raise ValueError(f"semifield order {q0 * q0} exceeds cap {SEMIFIELD_CAP}")
    F = gf(q0)
    if j is None:
        j = F.first_nonsquare()
    if F.is_square(j):
        raise ValueError(f"{j} is a square in GF({q0})")
    e = np.arange(q0)
    b, a = np.meshgrid(e, e, indexing="ij")  # element a + q0*b
    a, b = a.ravel(), b.ravel()
    A, B = a[:, None], b[:, None]
    C, D = a[None, :], b[None, :]
    first = F.add(F.mul(A, C), F.mul(j, F.frobenius(F.mul(B, D), sigma_power)))
    second = F.add(F.mul(A, D), F.mul(B, C))
    mul = first + q0 * second
    add = F.add(A, C) + q0 * F.add(B, D)
    E = Semifield(q0 * q0, p, add, mul, one=1, kind="dickson",
                  params={"q0": q0, "sigma_power": sigma_power % n, "j": int(j), "field": F})
    if sigma_power % n:
        witness = associativity_witness(E)
        if witness is None:
            raise ArithmeticError("nontrivial Dickson semifield came out associative")
        E.params["nonassociative_witness"] = witness
    return E


def associativity_witness(E: Semifield):
    """First triple (a, b, c) in lexicographic order with (ab)c != a(bc), or None."""
    M = E.mul
    q = E.q
    for a in range(q):
        left = M[M[a][:, None], np.arange(q)[None, :]]  # (a*b)*c
        right = M[a][M]                                 # a*(b*c)
        bad = np.argwhere(left != right)
        if len(bad):
            b, c = bad[0]
            return (a, int(b), int(c))
    return None


def semifield_verify(E: Semifield) -> Check:
    """Exhaustive check of the semifield axioms plus commutativity."""
    q = E.q
    A, M = E.add, E.mul
    x = np.arange(q)
    zero = E.zero

    def fail(axiom, witness):
        return Check(False, witness, {"axiom": axiom})

    # (a) abelian group under addition
    if not np.all(A[zero] == x):
        return fail("additive identity", int(np.argmax(A[zero] != x)))
    if not np.all(A == A.T):
        i, j = np.argwhere(A != A.T)[0]
        return fail("additive commutativity", (int(i), int(j)))
    if not np.all(np.sort(A, axis=1) == x):
        return fail("additive inverses", int(np.argmax(np.any(np.sort(A, axis=1) != x, axis=1))))
    for a in range(q):
        bad = np.argwhere(A[A[a]][:, :] != A[a][A])
        if len(bad):
            return fail("additive associativity", (a, int(bad[0][0]), int(bad[0][1])))
    # (b) no zero divisors
    nz = x[x != zero]
    prods = M[np.ix_(nz, nz)]
    if np.any(prods == zero):
        i, j = np.argwhere(prods == zero)[0]
        return fail("zero divisor", (int(nz[i]), int(nz[j])))
    # (c) two-sided distributivity
    for a in range(q):
        lhs = M[a][A]                      # a o (y + z)
        rhs = A[M[a][:, None], M[a][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return fail("left distributivity", (a, int(bad[0][0]), int(bad[0][1])))
        lhs = M[:, a][A]                   # (y + z) o a
        rhs = A[M[:, a][:, None], M[:, a][None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            return fail("right distributivity", (a, int(bad[0][0]), int(bad[0][1])))
    # (d) identity
    if not (np.all(M[E.one] == x) and np.all(M[:, E.one] == x)):
        return fail("multiplicative identity", E.one)
    if not np.all(M == M.T):
        i, j = np.argwhere(M != M.T)[0]
        return fail("commutativity", (int(i), int(j)))
    return Check(True, None, {"order": q, "kind": E.kind})


# ---------------------------------------------------------------------------
# Z4 module embedding for even order


@dataclass(eq=False)
class Z4ModuleEmbedding:
    """Free Z4-module R on hat(e_1)..hat(e_n) with hat(e_i) hat(e_j) = hat(e_i o e_j).

    Module elements are integer vectors mod 4 of length n.
    """

    E: Semifield

    def __post_init__(self):
        if self.E.p != 2:
            raise ValueError("the Z4 embedding needs a semifield of even order")
        n = self.E.e
        basis = [1 << i for i in range(n)]
        self.n = n
        # structure constants C[i, j, :] = hat(e_i o e_j)
        self.C = np.array([[self.E.digits[self.E.mul[bi, bj]] for bj in basis] for bi in basis],
                          dtype=np.int64).reshape(n, n, n)

    def hat(self, x):
        return self.E.digits[np.asarray(x)]

    def mul(self, r, s):
        r, s = np.asarray(r), np.asarray(s)
        return np.einsum("...i,...j,ijk->...k", r, s, self.C) % 4

    def dot(self, r, s):
        return (np.asarray(r) * np.asarray(s)).sum(axis=-1) % 4

    @cached_property
    def hat_square(self) -> np.ndarray:
        h = self.hat(np.arange(self.E.q))
        return self.mul(h, h)

    def verify(self) -> Check:
        """The three mod-2 compatibility identities, exhaustively."""
        E = self.E
        x = np.arange(E.q)
        hx = self.hat(x)[:, None, :]
        hy = self.hat(x)[None, :, :]
        hsum = self.hat(E.add)            # hat(x + y)
        hprod = self.hat(E.mul)           # hat(x o y)
        if np.any((2 * (hx + hy)) % 4 != (2 * hsum) % 4):
            return Check(False, "2(x^ + y^) != 2(x+y)^")
        if np.any((2 * self.mul(hx, hy)) % 4 != (2 * hprod) % 4):
            return Check(False, "2 x^ y^ != 2 (xoy)^")
        s = (hx + hy) % 4
        if np.any(self.mul(s, s) != self.mul(hsum, hsum)):
            return Check(False, "(x^ + y^)^2 != ((x+y)^)^2")
        return Check(True)


# ---------------------------------------------------------------------------
# affine plane AG(2, E)


def affine_plane_check(E: Semifield, cap: int = PLANE_CAP) -> Check:
    """Every T_{a,b} and S_{u,v} preserves incidence; H_{u,b} = T_{u,b} S_{u,0} obeys the product rule.

    Point (x, y) lies on the line [m, c] iff y = m o x + c; vertical lines
    x = const are moved by translations only and are checked separately.
    """
    q = E.q
    if q > cap:
        raise ValueError(f"plane check is O(q^5); order {q} exceeds cap {cap}")
    A, M = E.add, E.mul
    r = np.arange(q)
    # every incident (point, line) pair: x, slope m, intercept c, y = m o x + c
    x, m, c = np.meshgrid(r, r, r, indexing="ij")
    y = A[M[m, x], c]
    for a in range(q):
        for b in range(q):
            # T_{a,b}: (x, y) -> (x + a, y + b); [m, c] -> [m, c + b - m o a]
            tc = E.sub(A[c, b], M[m, a])
            if np.any(A[y, b] != A[M[m, A[x, a]], tc]):
                return Check(False, ("T", a, b), {"map": "translation"})
            # S_{a,b}: (x, y) -> (x, y + a o x + b); [m, c] -> [m + a, c + b]
            if np.any(A[A[y, M[a, x]], b] != A[M[A[m, a], x], A[c, b]]):
                return Check(False, ("S", a, b), {"map": "shear"})
    # line maps above are bijections on non-vertical lines
    mm, cc = np.meshgrid(r, r, indexing="ij")
    for a in range(q):
        tc = E.sub(A[cc, 0], M[mm, a])
        if len(np.unique(mm * q + tc)) != q * q:
            return Check(False, ("T", a, 0), {"map": "translation line bijection"})
    # H_{u,b} H_{v,d} = H_{u+v, b+d+u o v} as maps on points
    v, d, px, py = np.meshgrid(r, r, r, r, indexing="ij")
    inner_x = A[px, v]
    inner_y = A[A[py, M[v, px]], d]
    for u in range(q):
        s = A[u, v]
        uv = M[u, v]
        out_x = A[inner_x, u]
        hx = A[px, s]
        if np.any(out_x != hx):
            return Check(False, (u, None), {"map": "hughes product"})
        for b in range(q):
            out_y = A[A[inner_y, M[u, inner_x]], b]
            t = A[A[b, d], uv]
            if np.any(out_y != A[A[py, M[s, px]], t]):
                idx = np.argwhere(out_y != A[A[py, M[s, px]], t])[0]
                return Check(False, ((u, b), (int(idx[0]), int(idx[1]))), {"map": "hughes product"})
    return Check(True, None, {"order": q, "maps_checked": 2 * q * q})


def hughes_point_map(E: Semifield, u: int, b: int):
    """H_{u,b} as a function on points."""
    def h(x, y):
        return int(E.add[x, u]), int(E.add[E.add[y, E.mul[u, x]], b])
    return h


def translation(E: Semifield, a: int, b: int):
    def t(x, y):
        return int(E.add[x, a]), int(E.add[y, b])
    return t
