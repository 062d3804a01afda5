"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Two representations live here:

* :class:`Cyclotomic` -- a single field element in canonical form, i.e. its
  coordinates in the power basis ``1, z, ..., z^(phi(n)-1)`` after reduction
  modulo the n-th cyclotomic polynomial.
* :class:`CycArray` -- a numpy-backed array of elements of one field
  Q(zeta_N), stored as integer coefficient vectors modulo ``x^N - 1`` with a
  single common denominator.  This is what the line-set and matrix checks run
  on; it is exact, vectorised, and only reduced to canonical form on demand.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 4096

# float64 represents integers exactly below 2**53; keep a safety margin
_FLOAT_EXACT = 2**52
_INT64_SAFE = 2**62


class OrderTooLarge(ValueError):
    pass


# ---------------------------------------------------------------------------
# number theory helpers


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    """Exact division of integer polynomials (low degree first), den monic."""
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dd]
        out[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[:dd]):
        raise ArithmeticError("polynomial division is not exact")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first.

    Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d.
    """
    if n < 1:
        raise ValueError("order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_rows(n: int) -> tuple[tuple[int, ...], ...]:
    """Row t holds the canonical coordinates of x^t mod Phi_n, for 0 <= t < n."""
    phi = euler_phi(n)
    poly = cyclotomic_polynomial(n)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x, then fold x^phi back using Phi_n (monic)
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * poly[j]
    return tuple(rows)


@lru_cache(maxsize=None)
def reduction_matrix(n: int) -> np.ndarray:
    """(n, phi(n)) integer matrix mapping power sums mod x^n-1 to canonical coords."""
    rows = _reduction_rows(n)
    biggest = max(abs(c) for row in rows for c in row)
    dtype = np.int64 if biggest < 2**31 else object
    mat = np.array(rows, dtype=dtype)
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=None)
def _trace_of_basis(n: int) -> tuple[int, ...]:
    # Tr(zeta^j) is the Ramanujan sum c_n(j)
    phi = euler_phi(n)
    out = []
    for j in range(phi):
        g = math.gcd(j, n)
        out.append(_mobius(n // g) * phi // euler_phi(n // g))
    return tuple(out)


def _check_order(n: int) -> int:
    if n < 1:
        raise ValueError("cyclotomic order must be a positive integer")
    if n > MAX_ORDER:
        raise OrderTooLarge(f"cyclotomic order {n} exceeds cap {MAX_ORDER}")
    return n


def common_order(*orders: int) -> int:
    return _check_order(reduce(math.lcm, orders, 1))


def _reduce_power_sum(n: int, powers: Sequence[int]) -> list[int]:
    phi = euler_phi(n)
    rows = _reduction_rows(n)
    out = list(powers[:phi])
    out += [0] * (phi - len(out))
    for t in range(phi, len(powers)):
        c = powers[t]
        if c:
            for j, r in enumerate(rows[t % n]):
                if r:
                    out[j] += c * r
    return out


# ---------------------------------------------------------------------------
# scalar


class Cyclotomic:
    """An element of Q(zeta_n), immutable.

    ``num`` holds integer power-basis coordinates (length phi(n)) and ``den``
    a positive common denominator, with gcd(num, den) == 1.
    """

    __slots__ = ("order", "num", "den")

    def __init__(self, order: int, coeffs: Iterable = (), den: int = 1):
        order = _check_order(int(order))
        fr = [Fraction(c) for c in coeffs]
        phi = euler_phi(order)
        if len(fr) > phi:
            raise ValueError(f"at most phi({order}) = {phi} coordinates expected")
        fr += [Fraction(0)] * (phi - len(fr))
        lcd = reduce(math.lcm, (f.denominator for f in fr), 1) * int(den)
        nums = [f.numerator * (lcd // (f.denominator * int(den))) for f in fr]
        self._set(order, nums, lcd)

    def _set(self, order: int, nums: list[int], den: int) -> None:
        if den < 0:
            nums, den = [-c for c in nums], -den
        g = reduce(math.gcd, nums, den)
        if g > 1:
            nums = [c // g for c in nums]
            den //= g
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "num", tuple(nums))
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic values are immutable")

    @classmethod
    def _raw(cls, order: int, nums: list[int], den: int = 1) -> Cyclotomic:
        self = object.__new__(cls)
        self._set(order, nums, den)
        return self

    @classmethod
    def from_power_sum(cls, order: int, powers: Sequence, den: int = 1) -> Cyclotomic:
        """Value of sum_t powers[t] * zeta_order^t / den (any length)."""
        order = _check_order(order)
        fr = [Fraction(c) for c in powers]
        lcd = reduce(math.lcm, (f.denominator for f in fr), 1)
        ints = [f.numerator * (lcd // f.denominator) for f in fr]
        return cls._raw(order, _reduce_power_sum(order, ints), lcd * den)

    @classmethod
    def rational(cls, value) -> Cyclotomic:
        f = Fraction(value)
        return cls._raw(1, [f.numerator], f.denominator)

    # -- coercion ----------------------------------------------------------

    @staticmethod
    def coerce(value) -> Cyclotomic:
        if isinstance(value, Cyclotomic):
            return value
        if isinstance(value, (int, Rational)):
            return Cyclotomic.rational(value)
        raise TypeError(f"cannot interpret {value!r} as a cyclotomic number")

    def promote(self, order: int) -> Cyclotomic:
        """Re-express in Q(zeta_order); ``self.order`` must divide ``order``."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"order {self.order} does not divide {order}")
        _check_order(order)
        step = order // self.order
        powers = [0] * order
        for j, c in enumerate(self.num):
            powers[j * step] += c
        return Cyclotomic._raw(order, _reduce_power_sum(order, powers), self.den)

    def _align(self, other) -> tuple[Cyclotomic, Cyclotomic]:
        other = Cyclotomic.coerce(other)
        if other.order == self.order:
            return self, other
        n = common_order(self.order, other.order)
        return self.promote(n), other.promote(n)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        nums = [x * b.den + y * a.den for x, y in zip(a.num, b.num)]
        return Cyclotomic._raw(a.order, nums, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic._raw(self.order, [-c for c in self.num], self.den)

    def __sub__(self, other):
        try:
            return self + (-Cyclotomic.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        n, phi = a.order, len(a.num)
        if b.num[1:] == (0,) * (phi - 1):
            c = b.num[0]
            return Cyclotomic._raw(n, [x * c for x in a.num], a.den * b.den)
        if a.num[1:] == (0,) * (phi - 1):
            c = a.num[0]
            return Cyclotomic._raw(n, [x * c for x in b.num], a.den * b.den)
        powers = [0] * max(n, 2 * phi - 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        powers[i + j] += x * y
        folded = [0] * n
        for t, c in enumerate(powers):
            if c:
                folded[t % n] += c
        return Cyclotomic._raw(n, _reduce_power_sum(n, folded), a.den * b.den)

    __rmul__ = __mul__

    def galois(self, k: int) -> Cyclotomic:
        """Apply the automorphism zeta_n -> zeta_n^k (k coprime to n)."""
        n = self.order
        if math.gcd(k, n) != 1:
            raise ValueError(f"{k} is not a unit modulo {n}")
        powers = [0] * n
        for j, c in enumerate(self.num):
            powers[(j * k) % n] += c
        return Cyclotomic._raw(n, _reduce_power_sum(n, powers), self.den)

    def conjugate(self) -> Cyclotomic:
        return self.galois(-1 % self.order) if self.order > 2 else self

    def abs_squared(self) -> Cyclotomic:
        return self * self.conjugate()

    def norm(self) -> Fraction:
        """Field norm down to Q (product of all Galois conjugates)."""
        prod = self
        for k in range(2, self.order):
            if math.gcd(k, self.order) == 1:
                prod = prod * self.galois(k)
        assert prod.is_rational()
        return prod.to_fraction()

    def inverse(self) -> Cyclotomic:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Cyclotomic._raw(self.order, [self.den] + [0] * (len(self.num) - 1), self.num[0])
        # x^{-1} = (product of the other conjugates) / N(x)
        rest = Cyclotomic.rational(1).promote(self.order)
        for k in range(2, self.order):
            if math.gcd(k, self.order) == 1:
                rest = rest * self.galois(k)
        total = self * rest
        assert total.is_rational()
        return rest * Cyclotomic.rational(1 / total.to_fraction())

    def __truediv__(self, other):
        try:
            other = Cyclotomic.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Cyclotomic.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.rational(1).promote(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- predicates and conversions ---------------------------------------

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def trace(self) -> Fraction:
        """Absolute trace Tr_{Q(zeta_n)/Q}."""
        tr = _trace_of_basis(self.order)
        return Fraction(sum(c * t for c, t in zip(self.num, tr)), self.den)

    def to_complex(self) -> complex:
        n = self.order
        z = sum(c * complex(math.cos(2 * math.pi * j / n), math.sin(2 * math.pi * j / n))
                for j, c in enumerate(self.num) if c)
        return complex(z) / self.den

    def to_float(self) -> tuple[float, float]:
        z = self.to_complex()
        return (z.real, z.imag)

    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def __eq__(self, other):
        try:
            a, b = self._align(other)
        except (TypeError, OrderTooLarge):
            return NotImplemented
        return a.num == b.num and a.den == b.den

    def __hash__(self):
        # the normalised trace does not depend on the order used
        phi = euler_phi(self.order)
        if self.is_rational():
            return hash(Fraction(self.num[0], self.den))
        return hash((self.trace() / phi, "cyc"))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic({self.to_fraction()})"
        return f"Cyclotomic(order={self.order}, coeffs={[str(c) for c in self.coeffs()]})"

    def __str__(self):
        if self.is_rational():
            return str(self.to_fraction())
        terms = []
        for j, c in enumerate(self.coeffs()):
            if c:
                base = "1" if j == 0 else (f"z{self.order}" if j == 1 else f"z{self.order}^{j}")
                terms.append(f"{c}*{base}" if j else str(c))
        return " + ".join(terms)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs()]}

    @classmethod
    def from_json(cls, obj: dict) -> Cyclotomic:
        order = int(obj["order"])
        coeffs = [Fraction(int(n), int(d)) for n, d in obj["coeffs"]]
        if len(coeffs) != euler_phi(order):
            raise ValueError(f"order {order} needs {euler_phi(order)} coefficients")
        return cls(order, coeffs)


def root_of_unity(n: int, k: int = 1) -> Cyclotomic:
    """zeta_n^k in canonical form."""
    n = _check_order(n)
    powers = [0] * n
    powers[k % n] = 1
    return Cyclotomic._raw(n, _reduce_power_sum(n, powers), 1)


def abs_squared(x) -> Cyclotomic:
    return Cyclotomic.coerce(x).abs_squared()


def to_float(x) -> tuple[float, float]:
    return Cyclotomic.coerce(x).to_float()


def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * f with f squarefree; returns (s, f)."""
    s, f, d = 1, 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
            s *= d
        if n % d == 0:
            n //= d
            f *= d
        d += 1
    return s, f * n


def _sqrt_prime(p: int) -> Cyclotomic:
    """The positive square root of the prime p."""
    if p == 2:
        return root_of_unity(8, 1) + root_of_unity(8, 7)
    # quadratic Gauss sum: g^2 = p for p = 1 mod 4 and g = i sqrt(p) for p = 3 mod 4
    powers = [0] * p
    for a in range(1, p):
        powers[a] = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
    g = Cyclotomic.from_power_sum(p, powers)
    return g if p % 4 == 1 else -root_of_unity(4, 1) * g


def sqrt_rational(value) -> Cyclotomic:
    """Exact square root of a rational number inside a cyclotomic field.

    Positive reals get the positive root; negative values get i times the
    positive root of their absolute value.
    """
    f = Fraction(value)
    if f == 0:
        return Cyclotomic.rational(0)
    # sqrt(a/b) = sqrt(a*b) / b
    sn, rad = _squarefree_split(abs(f.numerator) * f.denominator)
    root = Cyclotomic.rational(Fraction(sn, f.denominator))
    d = 2
    while rad > 1:
        if rad % d == 0:
            root = root * _sqrt_prime(d)
            rad //= d
        d += 1
    if f < 0:
        root = root * root_of_unity(4, 1)
    if root * root != Cyclotomic.rational(f):
        raise ArithmeticError(f"square root of {f} failed")
    return root


@lru_cache(maxsize=None)
def _root_lookup(n: int) -> dict[tuple[int, ...], int]:
    return {root_of_unity(n, t).num: t for t in range(n)}


def root_exponent(x: Cyclotomic, order: int | None = None) -> int | None:
    """t with x == zeta_order^t, or None when x is not such a root of unity."""
    order = order or x.order
    if order % x.order:
        return None
    x = x.promote(order)
    if x.den != 1:
        return None
    return _root_lookup(order).get(x.num)


# ---------------------------------------------------------------------------
# arrays


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.flat)
    return int(np.abs(a).max())


def _as_object(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def _shrink(a: np.ndarray) -> np.ndarray:
    """Convert object integer arrays back to int64 when they fit."""
    if a.dtype == object and (a.size == 0 or _maxabs(a) < _INT64_SAFE):
        return a.astype(np.int64)
    return a


def exact_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer matrix product, via float64 BLAS whenever that is lossless."""
    inner = a.shape[-1]
    bound = _maxabs(a) * _maxabs(b) * max(inner, 1)
    if bound < _FLOAT_EXACT:
        out = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
        return np.rint(out).astype(np.int64)
    return _shrink(_as_object(a) @ _as_object(b))


def _cyclic_convolve(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Entrywise product mod x^n - 1 over the last axis (broadcasting)."""
    bound = _maxabs(a) * _maxabs(b) * n
    if bound >= _INT64_SAFE:
        a, b = _as_object(a), _as_object(b)
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (n,)
    out = np.zeros(shape, dtype=object if a.dtype == object else np.int64)
    for s in range(n):
        bs = b[..., s]
        if not np.any(bs):
            continue
        rolled = np.roll(a, s, axis=-1)  # rolled[..., t] = a[..., t - s]
        out += rolled * bs[..., None]
    return _shrink(out)


class CycArray:
    """Array of elements of Q(zeta_N), exact.

    ``num`` has shape ``shape + (N,)`` and holds the coefficients of
    ``zeta_N^0 .. zeta_N^(N-1)``; the represented values are ``num / den``.
    The representation is not unique (it lives modulo ``x^N - 1``); use
    :meth:`canonical` or :meth:`equals` for comparisons.
    """

    __slots__ = ("order", "num", "den")

    def __init__(self, order: int, num: np.ndarray, den: int = 1):
        self.order = _check_order(int(order))
        num = np.asarray(num)
        if num.dtype != object:
            num = num.astype(np.int64, copy=False)
        if num.shape[-1:] != (self.order,):
            raise ValueError("last axis must have length equal to the order")
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = num
        self.den = den

    # -- construction ------------------------------------------------------

    @classmethod
    def from_scalars(cls, values, order: int | None = None) -> CycArray:
        """Build from a nested sequence of Cyclotomic / int / Fraction values."""
        obj = np.empty(np.shape(values) if not isinstance(values, np.ndarray) else values.shape,
                       dtype=object)
        flat = list(_flatten(values))
        cyc = [Cyclotomic.coerce(v) for v in flat]
        order = common_order(order or 1, *(c.order for c in cyc))
        dens = reduce(math.lcm, (c.den for c in cyc), 1)
        num = np.zeros((len(cyc), order), dtype=object)
        for i, c in enumerate(cyc):
            c = c.promote(order)
            scale = dens // c.den
            for j, v in enumerate(c.num):
                if v:
                    num[i, j] = v * scale
        obj = num.reshape(obj.shape + (order,))
        return cls(order, _shrink(obj), dens)

    @classmethod
    def from_exponents(cls, exps, order: int) -> CycArray:
        """Entries zeta_order^e, with negative exponents meaning zero entries."""
        exps = np.asarray(exps, dtype=np.int64)
        num = np.zeros(exps.shape + (order,), dtype=np.int64)
        mask = exps >= 0
        idx = np.nonzero(mask)
        num[idx + (exps[mask] % order,)] = 1
        return cls(order, num)

    @classmethod
    def zeros(cls, shape, order: int = 1) -> CycArray:
        return cls(order, np.zeros(tuple(shape) + (order,), dtype=np.int64))

    @classmethod
    def identity(cls, n: int, order: int = 1) -> CycArray:
        num = np.zeros((n, n, order), dtype=np.int64)
        num[np.arange(n), np.arange(n), 0] = 1
        return cls(order, num)

    # -- basic structure ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.num.shape[:-1]

    @property
    def ndim(self) -> int:
        return self.num.ndim - 1

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, key) -> CycArray:
        if not isinstance(key, tuple):
            key = (key,)
        if any(k is Ellipsis for k in key):
            raise IndexError("ellipsis indexing is not supported")
        return CycArray(self.order, self.num[key + (slice(None),)], self.den)

    def entry(self, *idx) -> Cyclotomic:
        return Cyclotomic.from_power_sum(self.order, [int(v) for v in self.num[idx]], self.den)

    def tolist(self):
        def rec(a):
            if a.ndim == 1:
                return Cyclotomic.from_power_sum(self.order, [int(v) for v in a], self.den)
            return [rec(x) for x in a]
        return rec(self.num)

    @property
    def T(self) -> CycArray:
        axes = tuple(range(self.ndim))[::-1] + (self.ndim,)
        return CycArray(self.order, self.num.transpose(axes), self.den)

    def conj(self) -> CycArray:
        idx = (-np.arange(self.order)) % self.order
        return CycArray(self.order, self.num[..., idx], self.den)

    @property
    def H(self) -> CycArray:
        return self.conj().T

    def promote(self, order: int) -> CycArray:
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"order {self.order} does not divide {order}")
        _check_order(order)
        num = np.zeros(self.shape + (order,), dtype=self.num.dtype)
        num[..., :: order // self.order] = self.num
        return CycArray(order, num, self.den)

    def _align(self, other) -> tuple[CycArray, CycArray]:
        if not isinstance(other, CycArray):
            other = CycArray.from_scalars(other)
        n = common_order(self.order, other.order)
        return self.promote(n), other.promote(n)

    @staticmethod
    def concat(arrays: Sequence[CycArray], axis: int = 0) -> CycArray:
        n = common_order(*(a.order for a in arrays))
        lcd = reduce(math.lcm, (a.den for a in arrays), 1)
        parts = []
        for a in arrays:
            a = a.promote(n)
            parts.append(a.num * (lcd // a.den) if lcd != a.den else a.num)
        dtype = object if any(p.dtype == object for p in parts) else np.int64
        return CycArray(n, np.concatenate([p.astype(dtype) for p in parts], axis=axis), lcd)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> CycArray:
        a, b = self._align(other)
        lcd = math.lcm(a.den, b.den)
        num = _shrink(_as_object(a.num) * (lcd // a.den) + _as_object(b.num) * (lcd // b.den))
        return CycArray(a.order, num, lcd)

    def __neg__(self) -> CycArray:
        return CycArray(self.order, -self.num, self.den)

    def __sub__(self, other) -> CycArray:
        return self + (-other if isinstance(other, CycArray) else -CycArray.from_scalars(other))

    def scale(self, c) -> CycArray:
        """Multiply every entry by the scalar c."""
        c = Cyclotomic.coerce(c)
        n = common_order(self.order, c.order)
        a = self.promote(n)
        cp = c.promote(n)
        powers = np.zeros(n, dtype=object)
        for j, v in enumerate(cp.num):
            powers[j] = v
        num = _cyclic_convolve(a.num, _shrink(powers), n)
        return CycArray(n, num, a.den * cp.den)

    def schur(self, other: CycArray) -> CycArray:
        """Entrywise product (numpy broadcasting over the leading axes)."""
        a, b = self._align(other)
        return CycArray(a.order, _cyclic_convolve(a.num, b.num, a.order), a.den * b.den)

    def abs2(self) -> CycArray:
        return self.schur(self.conj())

    def __matmul__(self, other: CycArray) -> CycArray:
        a, b = self._align(other)
        n = a.order
        if a.ndim == 1:
            return (CycArray(n, a.num[None], a.den) @ b)[0]
        if b.ndim == 1:
            return (a @ CycArray(n, b.num[:, None], b.den))[:, 0]
        m, k = a.shape
        k2, p = b.shape
        if k != k2:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        out = np.zeros((m, p, n), dtype=np.int64)
        a_cat = a.num.reshape(m, k * n)
        idx = np.arange(n)
        results = []
        for d in range(n):
            # b_roll[l, s, j] = b[l, j, (d - s) % n]
            b_roll = b.num[:, :, (d - idx) % n].transpose(0, 2, 1).reshape(k * n, p)
            results.append(exact_matmul(a_cat, b_roll))
        if any(r.dtype == object for r in results):
            out = out.astype(object)
        for d, r in enumerate(results):
            out[:, :, d] = r
        return CycArray(n, out, a.den * b.den)

    def sum(self, axis=None) -> CycArray:
        if axis is None:
            num = self.num.reshape(-1, self.order).sum(axis=0)
        else:
            if axis < 0:
                axis += self.ndim
            num = self.num.sum(axis=axis)
        return CycArray(self.order, num, self.den)

    # -- comparison --------------------------------------------------------

    def canonical(self) -> np.ndarray:
        """Canonical power-basis numerators, shape ``shape + (phi(N),)`` (over ``den``)."""
        flat = self.num.reshape(-1, self.order)
        red = reduction_matrix(self.order)
        out = exact_matmul(flat, red) if flat.size else np.zeros((0, red.shape[1]), np.int64)
        return out.reshape(self.shape + (red.shape[1],))

    def is_zero(self) -> np.ndarray:
        return ~np.any(self.canonical() != 0, axis=-1)

    def equals(self, other) -> bool:
        a, b = self._align(other)
        if a.shape != b.shape:
            return False
        ca = _as_object(a.canonical()) * b.den
        cb = _as_object(b.canonical()) * a.den
        return bool(np.all(ca == cb))

    def elementwise_equal(self, other) -> np.ndarray:
        a, b = self._align(other)
        ca = _as_object(a.canonical()) * b.den
        cb = _as_object(b.canonical()) * a.den
        return np.all(ca == cb, axis=-1)

    def root_exponents(self) -> np.ndarray | None:
        """Exponent array (-1 for zeros) if all entries are 0 or N-th roots of unity."""
        if self.den != 1:
            canon = self.canonical()
            if np.any(_as_object(canon) % self.den != 0):
                return None
            canon = _shrink(_as_object(canon) // self.den)
        else:
            canon = self.canonical()
        n = self.order
        table = np.array([root_of_unity(n, t).num for t in range(n)], dtype=np.int64)
        flat = canon.reshape(-1, canon.shape[-1])
        if flat.dtype == object:
            if _maxabs(flat) > 1:
                return None
            flat = flat.astype(np.int64)
        out = np.empty(flat.shape[0], dtype=np.int64)
        step = max(1, 2**22 // (n * table.shape[1]))
        for lo in range(0, flat.shape[0], step):
            chunk = flat[lo:lo + step]
            hit = np.all(chunk[:, None, :] == table[None], axis=2)
            zero = ~np.any(chunk != 0, axis=1)
            if not np.all(hit.any(axis=1) | zero):
                return None
            out[lo:lo + step] = np.where(zero, -1, hit.argmax(axis=1))
        return out.reshape(self.shape)

    def to_complex(self) -> np.ndarray:
        n = self.order
        w = np.exp(2j * np.pi * np.arange(n) / n)
        return (np.asarray(self.num, dtype=np.float64) @ w) / self.den

    def __repr__(self):
        return f"CycArray(order={self.order}, shape={self.shape}, den={self.den})"


def _flatten(values):
    if isinstance(values, np.ndarray):
        yield from values.flat
        return
    if isinstance(values, (list, tuple)):
        for v in values:
            yield from _flatten(v)
    else:
        yield values
