"""Finite fields GF(p^n) and Galois rings GR(4^n).

Field elements are plain ints: the element ``sum c_i x^i`` (c_i in GF(p)) is
encoded as ``sum c_i p^i``.  The prime subfield is therefore ``range(p)``.
All arithmetic goes through log/antilog tables built from a primitive
polynomial, so scalar ops and numpy-vectorised ops share the same tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

FIELD_CAP = 2**14


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, e) with q == p**e, or None."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p == 0:
            e, m = 0, q
            while m % p == 0:
                m //= p
                e += 1
            return (p, e) if m == 1 else None
    return None


def _digits(value: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        value, r = divmod(value, p)
        out.append(r)
    return out


def _power_table(p: int, modulus: tuple[int, ...]) -> list[int] | None:
    """Successive powers of x modulo `modulus` while they stay != 1.

    Returns the list of encoded powers x^0 .. x^(q-2) when x has order
    p^n - 1 (i.e. the modulus is primitive), else None.
    """
    n = len(modulus) - 1
    q = p**n
    weights = [p**i for i in range(n)]
    cur = [1] + [0] * (n - 1)
    out = [1]
    for k in range(1, q - 1):
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [(c - top * m) % p for c, m in zip(cur, modulus)]
        enc = sum(c * w for c, w in zip(cur, weights))
        if enc == 1:
            return None
        out.append(enc)
    # x^(q-1) must come back to 1
    top = cur[-1]
    cur = [0] + cur[:-1]
    if top:
        cur = [(c - top * m) % p for c, m in zip(cur, modulus)]
    if cur != [1] + [0] * (n - 1):
        return None
    return out


@lru_cache(maxsize=None)
def primitive_polynomial(p: int, n: int) -> tuple[int, ...]:
    """First primitive monic polynomial of degree n over GF(p).

    Candidates are scanned in increasing order of the integer encoding of
    their lower coefficients (constant term least significant).
    """
    for code in range(1, p**n):
        low = _digits(code, p, n)
        if low[0] == 0:
            continue
        modulus = tuple(low) + (1,)
        if _power_table(p, modulus) is not None:
            return modulus
    raise ArithmeticError(f"no primitive polynomial of degree {n} over GF({p})")


@dataclass(eq=False)
class FiniteField:
    p: int
    n: int
    modulus: tuple[int, ...]
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)
    digits: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.n

    @property
    def primitive(self) -> int:
        return int(self.exp[1]) if self.q > 2 else 1

    @cached_property
    def _weights(self) -> np.ndarray:
        return self.p ** np.arange(self.n, dtype=np.int64)

    @cached_property
    def add_table(self) -> np.ndarray | None:
        if self.q > 1024:
            return None
        e = np.arange(self.q)
        return self.add(e[:, None], e[None, :])

    def elements(self) -> range:
        return range(self.q)

    # vectorised arithmetic: inputs may be ints or integer arrays
    def add(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        if self.p == 2:
            return a ^ b
        s = (self.digits[a] + self.digits[b]) % self.p
        return s @ self._weights

    def neg(self, a):
        a = np.asarray(a)
        if self.p == 2:
            return a
        return ((-self.digits[a]) % self.p) @ self._weights

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scalar(self, c: int, a):
        """Multiply by the prime-field integer c."""
        a = np.asarray(a)
        return ((c * self.digits[a]) % self.p) @ self._weights

    def mul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        la, lb = self.log[a], self.log[b]
        out = self.exp[(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, k: int):
        a = np.asarray(a)
        out = self.exp[(self.log[a] * k) % (self.q - 1)]
        if k == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def frobenius(self, a, k: int = 1):
        return self.pow(a, self.p**k)

    @cached_property
    def trace_table(self) -> np.ndarray:
        """tr(a) = a + a^p + ... + a^(p^(n-1)), an element of GF(p) (as int < p)."""
        e = np.arange(self.q)
        acc = np.zeros(self.q, dtype=np.int64)
        for i in range(self.n):
            acc = self.add(acc, self.frobenius(e, i))
        if np.any(acc >= self.p):
            raise ArithmeticError("trace left the prime field")
        return acc

    def trace(self, a):
        return self.trace_table[np.asarray(a)]

    def is_square(self, a) -> bool:
        a = int(a)
        return a == 0 or self.p == 2 or self.log[a] % 2 == 0

    def first_nonsquare(self) -> int:
        for a in range(1, self.q):
            if not self.is_square(a):
                return a
        raise ValueError("every element is a square in characteristic 2")

    def __repr__(self):
        return f"GF({self.p}^{self.n})"


@lru_cache(maxsize=None)
def ff_make(p: int, n: int = 1, cap: int = FIELD_CAP) -> FiniteField:
    """GF(p^n) with a stored primitive element and trace table."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("degree must be positive")
    q = p**n
    if q > cap:
        raise ValueError(f"field order {q} exceeds cap {cap}")
    modulus = primitive_polynomial(p, n)
    powers = _power_table(p, modulus)
    exp = np.array(powers, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    log[exp] = np.arange(q - 1)
    digits = np.array([_digits(a, p, n) for a in range(q)], dtype=np.int64).reshape(q, n)
    F = FiniteField(p, n, modulus, exp, log, digits)
    F.trace_table  # noqa: B018  -- build eagerly, fail fast
    return F


def gf(q: int) -> FiniteField:
    pe = prime_power(q)
    if pe is None:
        raise ValueError(f"{q} is not a prime power")
    return ff_make(*pe)


# ---------------------------------------------------------------------------
# Galois rings


def _polymul_mod4(a, b) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % 4
    return out


def graeffe_lift(f: tuple[int, ...]) -> tuple[int, ...]:
    """Lift a binary polynomial to Z4 via h(x^2) = +-f(x)f(-x) (mod 4)."""
    n = len(f) - 1
    f_neg = [c * (-1) ** i for i, c in enumerate(f)]
    prod = [0] * (2 * n + 1)
    for i, x in enumerate(f):
        for j, y in enumerate(f_neg):
            prod[i + j] += x * y
    if any(prod[k] for k in range(1, 2 * n + 1, 2)):
        raise ArithmeticError("f(x)f(-x) should be even")
    sign = (-1) ** n
    return tuple((sign * prod[2 * i]) % 4 for i in range(n + 1))


@dataclass(eq=False)
class GaloisRing:
    """GR(4^n) = Z4[x]/(h) with h the Graeffe lift of a binary primitive polynomial.

    Elements are tuples of n coefficients in Z4 (constant term first).
    The Teichmueller set is indexed by the elements of ``field`` (GF(2^n),
    built from the same binary polynomial), via reduction mod 2.
    """

    n: int
    modulus: tuple[int, ...]
    field: FiniteField = field(repr=False)

    def __post_init__(self):
        n = self.n
        # x^k mod h for k < 2n-1, used by mul
        self._xpow = []
        cur = [1] + [0] * (n - 1)
        for _ in range(2 * n - 1):
            self._xpow.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c - top * m) % 4 for c, m in zip(cur, self.modulus)]
        self.zero = (0,) * n
        self.one = (1,) + (0,) * (n - 1)
        self.xi = self._xpow[1] if n > 1 else ((-self.modulus[0]) % 4,)
        q1 = 2**n - 1
        powers = [self.one]
        for _ in range(q1 - 1):
            powers.append(self.mul(powers[-1], self.xi))
        if self.mul(powers[-1], self.xi) != self.one:
            raise ArithmeticError("xi does not have order 2^n - 1")
        if len(set(powers)) != q1:
            raise ArithmeticError("xi has order smaller than 2^n - 1")
        self.xi_powers = powers
        # field element (int) -> Teichmueller representative
        lift = {0: self.zero}
        for j, t in enumerate(powers):
            lift[self.reduce_mod2(t)] = t
        if len(lift) != 2**n:
            raise ArithmeticError("reduction mod 2 is not a bijection on T")
        self._lift = lift
        self._unlift = {v: k for k, v in lift.items()}

    # ring arithmetic on tuples
    def add(self, a, b):
        return tuple((x + y) % 4 for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % 4 for x in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def smul(self, c: int, a):
        return tuple((c * x) % 4 for x in a)

    def mul(self, a, b):
        prod = _polymul_mod4(a, b)
        out = [0] * self.n
        for k, c in enumerate(prod):
            if c:
                out = [(o + c * r) % 4 for o, r in zip(out, self._xpow[k])]
        return tuple(out)

    def elements(self):
        return itertools.product(range(4), repeat=self.n)

    # Teichmueller machinery
    def reduce_mod2(self, a) -> int:
        return int(sum((c % 2) << i for i, c in enumerate(a)))

    @property
    def teichmuller(self) -> list[tuple[int, ...]]:
        return [self.zero] + list(self.xi_powers)

    def lift(self, f: int) -> tuple[int, ...]:
        """Teichmueller representative of the field element f."""
        return self._lift[int(f)]

    def unlift(self, t) -> int:
        return self._unlift[tuple(t)]

    def in_teichmuller(self, a) -> bool:
        return tuple(a) in self._unlift

    def decompose(self, r) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(a, b) in T x T with r = a + 2b."""
        a = self.lift(self.reduce_mod2(r))
        diff = self.sub(r, a)
        assert all(c % 2 == 0 for c in diff)
        b = self.lift(self.reduce_mod2(tuple(c // 2 for c in diff)))
        return a, b

    def frobenius(self, r):
        a, b = self.decompose(r)
        return self.add(self.mul(a, a), self.smul(2, self.mul(b, b)))

    def trace(self, r) -> int:
        """Sum of the n Frobenius conjugates; lands in Z4."""
        acc, cur = self.zero, tuple(r)
        for _ in range(self.n):
            acc = self.add(acc, cur)
            cur = self.frobenius(cur)
        if any(acc[1:]):
            raise ArithmeticError("Galois ring trace is not in Z4")
        return acc[0]

    @cached_property
    def trace_table(self) -> np.ndarray:
        """trT[f] = tr(lift(f)) for every field element f."""
        return np.array([self.trace(self.lift(f)) for f in range(2**self.n)], dtype=np.int64)

    def teich_sqrt(self, a) -> tuple[int, ...]:
        a = tuple(a)
        if not self.in_teichmuller(a):
            raise ValueError(f"{a} is not in the Teichmueller set")
        if a == self.zero:
            return a
        j = self.xi_powers.index(a)
        q1 = 2**self.n - 1
        return self.xi_powers[(j * pow(2, self.n - 1, q1)) % q1] if q1 > 1 else a

    def __repr__(self):
        return f"GR(4^{self.n})"


@lru_cache(maxsize=None)
def gr_make(n: int, cap: int = FIELD_CAP) -> GaloisRing:
    if n < 1:
        raise ValueError("degree must be positive")
    if 2**n > cap:
        raise ValueError(f"Teichmueller set of size 2^{n} exceeds cap {cap}")
    F = ff_make(2, n)
    return GaloisRing(n, graeffe_lift(F.modulus), F)
