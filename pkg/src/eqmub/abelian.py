"""Finite abelian groups with explicit characters, group rings and (relative) difference sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .cyclotomic import Cyclotomic, root_of_unity
from .fields import ff_make, gr_make, prime_power
from .reports import Check
from .semifield import Semifield, Z4ModuleEmbedding

GROUP_CAP = 2**16
VERIFY_CAP = 128        # exhaustive associativity is O(v^3)
BRUTE_FORCE_CAP = 40


class AbelianGroup:
    """Elements are the integers 0..v-1 with 0 the identity.

    Characters are indexed by the same range; ``char_exponents(L, X)`` returns
    e with chi_L(X) = zeta_N^e, where N = ``char_order``.
    """

    order: int
    char_order: int
    name: str = "group"

    def op(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def label(self, g: int):
        return int(g)

    def char_exponents(self, chars=None, elems=None) -> np.ndarray:
        raise NotImplementedError

    @property
    def elements(self) -> np.ndarray:
        return np.arange(self.order)

    @cached_property
    def op_table(self) -> np.ndarray:
        if self.order > 4096:
            raise ValueError("operation table too large; use op() on slices")
        g = self.elements
        return self.op(g[:, None], g[None, :])

    @cached_property
    def generators(self) -> list[int]:
        """A small generating set, found greedily in element order."""
        gens: list[int] = []
        span = np.zeros(self.order, dtype=bool)
        span[0] = True
        for g in range(1, self.order):
            if span.all():
                break
            if span[g]:
                continue
            gens.append(g)
            frontier = np.flatnonzero(span)
            while len(frontier):
                new = np.unique(self.op(frontier, g))
                new = new[~span[new]]
                span[new] = True
                frontier = new
        return gens

    def verify(self, cap: int = VERIFY_CAP) -> Check:
        """Group axioms and commutativity, exhaustively when |G| <= cap."""
        v = self.order
        g = self.elements
        if np.any(self.op(0, g) != g):
            return Check(False, "identity", {"axiom": "identity"})
        if np.any(self.op(g, self.inv(g)) != 0):
            return Check(False, int(np.argmax(self.op(g, self.inv(g)) != 0)), {"axiom": "inverse"})
        if v > cap:
            # commutativity and associativity against generators suffice for the character checks
            sample = np.array(self.generators, dtype=np.int64)
        else:
            sample = g
        for h in sample:
            if np.any(self.op(g, h) != self.op(h, g)):
                return Check(False, (int(np.argmax(self.op(g, h) != self.op(h, g))), int(h)),
                             {"axiom": "commutativity"})
        if v <= cap:
            T = self.op_table
            for a in range(v):
                bad = np.argwhere(T[T[a][:, None], g[None, :]] != T[a][T])
                if len(bad):
                    return Check(False, (a, int(bad[0][0]), int(bad[0][1])), {"axiom": "associativity"})
        return Check(True, None, {"order": v, "exhaustive": v <= cap})

    def character(self, label: int) -> Character:
        return Character(self, int(label), self.char_exponents([label])[0] % self.char_order)

    def to_json(self):
        return {"name": self.name, "order": self.order}

    def __repr__(self):
        return f"{type(self).__name__}({self.name}, order={self.order})"


class CyclicProductGroup(AbelianGroup):
    """Z_{d_1} x ... x Z_{d_r} with mixed-radix indices (first factor least significant)."""

    def __init__(self, factors):
        factors = tuple(int(d) for d in factors)
        if not factors or any(d < 1 for d in factors):
            raise ValueError("factors must be positive")
        self.factors = factors
        self.order = math.prod(factors)
        if self.order > GROUP_CAP:
            raise ValueError(f"group order {self.order} exceeds cap {GROUP_CAP}")
        self.char_order = math.lcm(*factors)
        self.name = " x ".join(f"Z{d}" for d in factors)
        self._weights = np.cumprod((1,) + factors[:-1]).astype(np.int64)
        self._d = np.array(factors, dtype=np.int64)

    def digits(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64)
        return (g[..., None] // self._weights) % self._d

    def from_digits(self, digits) -> np.ndarray:
        return (np.asarray(digits) % self._d) @ self._weights

    def op(self, g, h):
        return self.from_digits(self.digits(g) + self.digits(h))

    def inv(self, g):
        return self.from_digits(-self.digits(g))

    def label(self, g: int):
        if len(self.factors) == 1:
            return int(g)
        return tuple(int(x) for x in self.digits(g))

    def char_exponents(self, chars=None, elems=None) -> np.ndarray:
        chars = self.elements if chars is None else np.asarray(chars)
        elems = self.elements if elems is None else np.asarray(elems)
        scale = self.char_order // self._d
        a = self.digits(chars) * scale
        return (a @ self.digits(elems).T) % self.char_order

    def to_json(self):
        return {"name": self.name, "factors": list(self.factors)}


def cyclic_group(n: int) -> CyclicProductGroup:
    return CyclicProductGroup((n,))


class HughesGroup(AbelianGroup):
    """H = {H_{u,b}} with H_{u,b} H_{v,d} = H_{u+v, b+d+u o v}; element index u*q + b.

    Character phi_{a,b} has index a*q + b.  ``form`` picks the scalar product:
    "dot" uses the digit coordinates (any commutative semifield); "trace" uses
    the field or Galois-ring trace and needs E to be a field.
    """

    def __init__(self, E: Semifield, form: str = "dot"):
        if form not in ("dot", "trace"):
            raise ValueError(f"unknown form {form!r}")
        if form == "trace" and E.kind != "field":
            raise ValueError("the trace form needs a field")
        if not np.array_equal(E.mul, E.mul.T):
            raise ValueError("the Hughes group is abelian only for commutative semifields")
        self.E = E
        self.q = E.q
        self.form = form
        self.order = E.q * E.q
        if self.order > GROUP_CAP:
            raise ValueError(f"group order {self.order} exceeds cap {GROUP_CAP}")
        self.char_order = E.p if E.p != 2 else 4
        self.name = f"Hughes({E.kind}, q={E.q})"
        if E.p == 2:
            if form == "dot":
                self.module = Z4ModuleEmbedding(E)
            else:
                self.ring = gr_make(E.e)
                F = E.params["field"]
                if F.modulus != self.ring.field.modulus:
                    raise ValueError("field and Galois ring use different moduli")

    def split(self, g):
        g = np.asarray(g, dtype=np.int64)
        return g // self.q, g % self.q

    def join(self, u, b):
        return np.asarray(u) * self.q + np.asarray(b)

    def op(self, g, h):
        A, M = self.E.add, self.E.mul
        u, b = self.split(g)
        v, d = self.split(h)
        return self.join(A[u, v], A[A[b, d], M[u, v]])

    def inv(self, g):
        E = self.E
        u, b = self.split(g)
        return self.join(E.neg[u], E.sub(E.square[u], b))

    def label(self, g: int):
        u, b = self.split(g)
        return (int(u), int(b))

    @property
    def N(self) -> np.ndarray:
        """{H_{0,b}}."""
        return self.join(0, np.arange(self.q))

    @property
    def D(self) -> np.ndarray:
        """H_0 = {H_{u,0}}."""
        return self.join(np.arange(self.q), 0)

    def char_exponents(self, chars=None, elems=None) -> np.ndarray:
        E = self.E
        chars = self.elements if chars is None else np.asarray(chars)
        elems = self.elements if elems is None else np.asarray(elems)
        a, b = self.split(chars)
        x, y = self.split(elems)
        xx = E.square[x]
        if self.form == "dot" and E.p != 2:
            da, db = E.digits[a], E.digits[b]
            e = 2 * (da @ E.digits[x].T) + 2 * (db @ E.digits[y].T) - db @ E.digits[xx].T
            return e % E.p
        if self.form == "dot":
            Z = self.module
            ha, hb = Z.hat(a), Z.hat(b)
            e = 2 * (ha @ Z.hat(x).T) + 2 * (hb @ Z.hat(y).T) - hb @ Z.hat_square[x].T
            return e % 4
        F = E.params["field"]
        if E.p != 2:
            # tr(2ax + b(2y - x^2))
            t = F.trace_table
            arg = F.add(F.scalar(2, F.mul(a[:, None], x[None, :])),
                        F.mul(b[:, None], F.sub(F.scalar(2, y), xx)[None, :]))
            return t[arg] % E.p
        # Teichmueller lifts multiply like field elements; tr(2ax + 2by - bx^2)
        tT = self.ring.trace_table
        ax = F.mul(a[:, None], x[None, :])
        by = F.mul(b[:, None], y[None, :])
        bxx = F.mul(b[:, None], xx[None, :])
        return (2 * tT[ax] + 2 * tT[by] - tT[bxx]) % 4

    def to_json(self):
        return {"name": self.name, "q": self.q, "form": self.form}


class ExplicitGroup(AbelianGroup):
    """A group given by a full operation table and a full character exponent table."""

    def __init__(self, op_table, char_table, char_order: int, name: str = "explicit", labels=None):
        T = np.asarray(op_table, dtype=np.int64)
        C = np.asarray(char_table, dtype=np.int64) % char_order
        if T.shape != (len(T), len(T)) or C.shape != T.shape:
            raise ValueError("tables must be square and of equal size")
        self.order = len(T)
        self._table = T
        self._chars = C
        self.char_order = int(char_order)
        self.name = name
        self._labels = labels
        self._inv = np.argmax(T == 0, axis=1)
        if np.any(T[np.arange(self.order), self._inv] != 0):
            raise ValueError("operation table has no inverses")

    @cached_property
    def op_table(self) -> np.ndarray:
        return self._table

    def op(self, g, h):
        return self._table[np.asarray(g), np.asarray(h)]

    def inv(self, g):
        return self._inv[np.asarray(g)]

    def label(self, g: int):
        return self._labels[g] if self._labels is not None else int(g)

    def char_exponents(self, chars=None, elems=None) -> np.ndarray:
        C = self._chars
        if chars is not None:
            C = C[np.asarray(chars)]
        if elems is not None:
            C = C[:, np.asarray(elems)]
        return C


# ---------------------------------------------------------------------------
# characters


@dataclass(eq=False)
class Character:
    group: AbelianGroup
    label: int
    exponents: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.group.char_order

    def __call__(self, g) -> Cyclotomic:
        return root_of_unity(self.order, int(self.exponents[int(g)]))

    @property
    def values(self) -> list[Cyclotomic]:
        return [self(g) for g in range(self.group.order)]

    def is_trivial(self) -> bool:
        return not np.any(self.exponents % self.order)


def character_table_check(G: AbelianGroup, chars=None) -> Check:
    """Multiplicativity against generators, distinctness, and the count |G|."""
    v, N = G.order, G.char_order
    chars = G.elements if chars is None else np.asarray(chars)
    X = G.char_exponents(chars) % N
    g = G.elements
    for s in G.generators:
        prod = G.op(g, s)
        bad = np.argwhere(X[:, prod] != (X + X[:, [s]]) % N)
        if len(bad):
            c, h = bad[0]
            return Check(False, (G.label(int(chars[c])), G.label(int(h)), G.label(s)),
                         {"failure": "not multiplicative"})
    rows = np.ascontiguousarray(X).view(np.dtype((np.void, X.dtype.itemsize * v)))
    if len(np.unique(rows)) != len(chars):
        return Check(False, None, {"failure": "repeated character"})
    if len(chars) == v and np.any(X[:, 0] % N):
        return Check(False, None, {"failure": "character not trivial at identity"})
    return Check(True, None, {"count": len(chars)})


def characters_of(G: AbelianGroup, verify: bool = True) -> list[Character]:
    if verify:
        chk = character_table_check(G)
        if not chk:
            raise ArithmeticError(f"character table of {G.name} is broken: {chk}")
    X = G.char_exponents() % G.char_order
    return [Character(G, a, X[a]) for a in range(G.order)]


def character_sum_over(D, chi: Character) -> Cyclotomic:
    D = np.asarray(D, dtype=np.int64)
    counts = np.bincount(chi.exponents[D] % chi.order, minlength=chi.order)
    return Cyclotomic.from_power_sum(chi.order, [int(c) for c in counts])


def trivial_on(G: AbelianGroup, subgroup) -> np.ndarray:
    """Labels of the characters that are trivial on ``subgroup`` (the subgroup H* of the dual)."""
    X = G.char_exponents(None, subgroup) % G.char_order
    return np.flatnonzero(~np.any(X, axis=1))


# ---------------------------------------------------------------------------
# group ring


@dataclass(eq=False)
class GroupRingElement:
    group: AbelianGroup
    coeffs: np.ndarray

    @classmethod
    def from_subset(cls, G: AbelianGroup, S) -> GroupRingElement:
        c = np.zeros(G.order, dtype=np.int64)
        np.add.at(c, np.asarray(S, dtype=np.int64), 1)
        return cls(G, c)

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        return GroupRingElement(self.group, self.coeffs + other.coeffs)

    def __mul__(self, other: GroupRingElement) -> GroupRingElement:
        G = self.group
        i = np.flatnonzero(self.coeffs)
        j = np.flatnonzero(other.coeffs)
        prod = G.op(i[:, None], j[None, :]).ravel()
        w = (self.coeffs[i][:, None] * other.coeffs[j][None, :]).ravel()
        return GroupRingElement(G, np.bincount(prod, weights=w, minlength=G.order).astype(np.int64))

    def inverse_image(self) -> GroupRingElement:
        """S^{-1}: coefficients transported along g -> g^{-1}."""
        c = np.zeros_like(self.coeffs)
        c[self.group.inv(self.group.elements)] = self.coeffs
        return GroupRingElement(self.group, c)


def _check_subset(G: AbelianGroup, D) -> np.ndarray:
    D = np.asarray(D, dtype=np.int64).ravel()
    if len(D) and (D.min() < 0 or D.max() >= G.order):
        raise ValueError("subset is not contained in the group")
    if len(np.unique(D)) != len(D):
        raise ValueError("subset has repeated elements")
    return D


def difference_counts(G: AbelianGroup, D) -> np.ndarray:
    S = GroupRingElement.from_subset(G, D)
    return (S * S.inverse_image()).coeffs


# ---------------------------------------------------------------------------
# certificates


@dataclass
class DifferenceSetCert:
    group: AbelianGroup
    subset: list
    params: tuple
    verified: bool
    kind: str = "ds"
    normal_subgroup: list | None = None
    semiregular: bool | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return bool(self.verified)

    def to_json(self) -> dict:
        out = {"group": self.group.to_json(), "subset": [int(d) for d in self.subset],
               "params": [int(p) for p in self.params], "kind": self.kind,
               "verified": bool(self.verified)}
        if self.kind == "rds":
            out["normal_subgroup"] = [int(x) for x in self.normal_subgroup]
        return out


RelativeDifferenceSetCert = DifferenceSetCert


def is_difference_set(G: AbelianGroup, D, v: int, k: int, lam: int) -> DifferenceSetCert:
    D = _check_subset(G, D)
    c = difference_counts(G, D)
    expect = np.full(G.order, lam, dtype=np.int64)
    expect[0] = k
    ok = G.order == v and len(D) == k
    witness = None
    if not np.array_equal(c, expect):
        ok = False
        witness = G.label(int(np.argmax(c != expect)))
    return DifferenceSetCert(G, D.tolist(), (v, k, lam), bool(ok), witness=witness)


def is_subgroup(G: AbelianGroup, N) -> bool:
    N = np.unique(np.asarray(N, dtype=np.int64))
    if 0 not in N:
        return False
    closed = np.isin(G.op(N[:, None], G.inv(N)[None, :]), N)
    return bool(closed.all())


def is_relative_difference_set(G: AbelianGroup, N, D) -> RelativeDifferenceSetCert:
    """DD^{-1} = |D| 1 + lam (G - N) for some integer lam >= 0, which is inferred."""
    D = _check_subset(G, D)
    N = _check_subset(G, N)
    if not is_subgroup(G, N):
        raise ValueError("N is not a subgroup")
    c = difference_counts(G, D)
    k, n = len(D), len(N)
    m = G.order // n
    in_N = np.zeros(G.order, dtype=bool)
    in_N[N] = True
    outside = c[~in_N]
    lam = int(outside[0]) if len(outside) else 0
    ok, witness = True, None
    if c[0] != k:
        ok, witness = False, G.label(0)
    elif np.any(c[in_N & (np.arange(G.order) != 0)]):
        ok, witness = False, G.label(int(np.flatnonzero(in_N & (c != 0) & (np.arange(G.order) != 0))[0]))
    elif np.any(outside != lam):
        ok = False
        witness = G.label(int(np.flatnonzero(~in_N & (c != lam))[0]))
    return DifferenceSetCert(G, D.tolist(), (m, n, k, lam), ok, kind="rds",
                             normal_subgroup=N.tolist(), semiregular=(m == k), witness=witness)


def singer_difference_set(q: int, cap: int = GROUP_CAP) -> tuple[CyclicProductGroup, list[int]]:
    """D = {i : Tr_{GF(q^3)/GF(q)}(gamma^i) = 0} in Z_{q^2+q+1}."""
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    p, n = pe
    v = q * q + q + 1
    if v > cap:
        raise ValueError(f"Singer group order {v} exceeds cap {cap}")
    F = ff_make(p, 3 * n)
    i = np.arange(v)
    x = F.exp[i]
    tr = F.add(F.add(x, F.frobenius(x, n)), F.frobenius(x, 2 * n))
    D = np.flatnonzero(tr == 0).tolist()
    G = cyclic_group(v)
    if not is_difference_set(G, D, v, q + 1, 1):
        raise ArithmeticError("Singer construction failed to certify")
    return G, D


def brute_force_difference_set(v: int, k: int, lam: int, G: AbelianGroup | None = None):
    """Lexicographically first (v, k, lam) difference set, or None.

    The first set always contains 0 (translate by its least element), so the
    search fixes 0 and prunes as soon as some difference exceeds lam.
    """
    if v > BRUTE_FORCE_CAP:
        raise ValueError(f"v = {v} exceeds brute-force cap {BRUTE_FORCE_CAP}")
    G = cyclic_group(v) if G is None else G
    if G.order != v:
        raise ValueError("group order does not match v")
    if k == 0:
        return None
    T = G.op(G.elements[:, None], G.inv(G.elements)[None, :])  # T[a, b] = a b^{-1}
    counts = np.zeros(v, dtype=np.int64)
    chosen = [0]

    def extend(start: int):
        if len(chosen) == k:
            c = counts.copy()
            c[0] = 0
            return np.all(c[1:] == lam)
        for g in range(start, v):
            diffs = np.concatenate([T[g, chosen], T[chosen, g]])
            np.add.at(counts, diffs, 1)
            if counts[1:].max(initial=0) <= lam:
                chosen.append(g)
                if extend(g + 1):
                    return True
                chosen.pop()
            np.subtract.at(counts, diffs, 1)
        return False

    return list(chosen) if extend(1) else None
