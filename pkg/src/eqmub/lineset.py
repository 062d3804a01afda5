"""Line systems in C^k with exact Gram verification.

Vectors are stored unnormalized (rows of an m x k array); every predicate works
with normalized squared inner products |<u,v>|^2 / (|u|^2 |v|^2), which stay
rational for all the constructions in this package.
"""

from __future__ import annotations

import csv
import json
import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Callable, Iterator

import numpy as np

from .cyclotomic import (
    CycArray,
    Cyclotomic,
    _FLOAT_EXACT,
    _cyclic_convolve,
    _maxabs,
    common_order,
    euler_phi,
    exact_matmul,
    reduction_matrix,
)
from .reports import Check

DEFAULT_TOL = 1e-9
GRAM_FULL_CAP = 1024      # keep the full normalized matrix up to this many lines
BLOCK_ROWS = 256
BACKEND_ENV = "EQMUB_BACKEND"


@dataclass(frozen=True)
class Backend:
    """Scalar backend: exact cyclotomic arithmetic or complex floats with a tolerance."""

    mode: str = "exact"
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.mode!r}")
        if not self.tol >= 0:
            raise ValueError("tolerance must be nonnegative")

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @classmethod
    def from_env(cls, tol: float | None = None) -> Backend:
        return cls(os.environ.get(BACKEND_ENV, "exact"), DEFAULT_TOL if tol is None else tol)


EXACT = Backend("exact")


def default_threads() -> int:
    return os.cpu_count() or 1


def ordered_map(fn: Callable, items, threads: int | None = None) -> Iterator:
    """Map in a thread pool, yielding results in input order with a bounded window."""
    threads = threads or default_threads()
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        yield from map(fn, items)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        window: deque = deque()
        it = iter(items)
        for x in it:
            window.append(pool.submit(fn, x))
            if len(window) >= 2 * threads:
                yield window.popleft().result()
        while window:
            yield window.popleft().result()


# ---------------------------------------------------------------------------
# LineSet


@dataclass(eq=False)
class LineSet:
    """m vectors in C^k stored as rows; ``data`` is a CycArray (exact) or complex array (float)."""

    data: CycArray | np.ndarray
    backend: Backend = EXACT
    partition: list[list[int]] | None = None
    meta: str = ""

    def __post_init__(self):
        if self.backend.exact:
            if not isinstance(self.data, CycArray) or self.data.ndim != 2:
                raise TypeError("exact LineSets need a 2-d CycArray")
        else:
            self.data = np.asarray(self.to_complex() if isinstance(self.data, CycArray) else self.data,
                                   dtype=np.complex128)
            if self.data.ndim != 2:
                raise ValueError("vectors must form a 2-d array")
        if self.partition is not None:
            self.partition = [[int(i) for i in part] for part in self.partition]
            flat = [i for part in self.partition for i in part]
            if any(len(part) != self.dim for part in self.partition):
                raise ValueError(f"every part must hold exactly {self.dim} vectors")
            if len(set(flat)) != len(flat) or any(not 0 <= i < self.m for i in flat):
                raise ValueError("partition parts must be disjoint vector indices")
        if np.any(self.zero_norm):
            raise ValueError(f"vector {int(np.argmax(self.zero_norm))} is zero")

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_exponents(cls, exps, order: int, partition=None, meta: str = "") -> LineSet:
        return cls(CycArray.from_exponents(exps, order), EXACT, partition, meta)

    @classmethod
    def from_rows(cls, rows, partition=None, meta: str = "", backend: Backend = EXACT) -> LineSet:
        if backend.exact:
            data = rows if isinstance(rows, CycArray) else CycArray.from_scalars(rows)
        else:
            data = rows.to_complex() if isinstance(rows, CycArray) else np.asarray(rows, dtype=complex)
        return cls(data, backend, partition, meta)

    @classmethod
    def standard_basis(cls, k: int, order: int = 1) -> LineSet:
        return cls(CycArray.identity(k, order), EXACT, [list(range(k))], f"standard basis of C^{k}")

    @staticmethod
    def concat(sets: list[LineSet], meta: str = "") -> LineSet:
        backend = sets[0].backend
        if backend.exact:
            data = CycArray.concat([s.data for s in sets], axis=0)
        else:
            data = np.concatenate([s.data for s in sets], axis=0)
        partition, off = [], 0
        for s in sets:
            if s.partition is None:
                partition = None
                break
            partition += [[i + off for i in part] for part in s.partition]
            off += s.m
        return LineSet(data, backend, partition, meta)

    # -- structure -------------------------------------------------------

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def order(self) -> int:
        return self.data.order if self.backend.exact else 0

    def vector(self, i: int) -> list:
        return self.data[i].tolist() if self.backend.exact else list(self.data[i])

    def subset(self, idx, meta: str | None = None) -> LineSet:
        idx = np.asarray(idx, dtype=np.int64)
        data = self.data[idx] if self.backend.exact else self.data[idx]
        return LineSet(data, self.backend, None, self.meta if meta is None else meta)

    def with_backend(self, backend: Backend) -> LineSet:
        if backend.exact and not self.backend.exact:
            raise ValueError("cannot convert float vectors to exact ones")
        data = self.data if backend.exact else self.to_complex()
        return LineSet(data, backend, self.partition, self.meta)

    def to_complex(self) -> np.ndarray:
        return self.data.to_complex() if isinstance(self.data, CycArray) else np.asarray(self.data)

    @cached_property
    def norm_canon(self) -> np.ndarray:
        """Exact squared norms as canonical numerators (m, phi), over ``data.den**2``."""
        return self.data.abs2().sum(axis=1).canonical()

    @cached_property
    def int_norms(self) -> np.ndarray | None:
        """Squared norms times den^2 as integers, or None if some norm is irrational."""
        c = self.norm_canon
        if c.shape[1] > 1 and np.any(c[:, 1:] != 0):
            return None
        return c[:, 0]

    @cached_property
    def norms(self) -> list:
        """Squared norms as Cyclotomic (exact) or float values."""
        if not self.backend.exact:
            return list(np.sum(np.abs(self.data) ** 2, axis=1))
        d2 = self.data.den**2
        return [Cyclotomic(self.order, [Fraction(int(x), d2) for x in row]) for row in self.norm_canon]

    @property
    def zero_norm(self) -> np.ndarray:
        if self.backend.exact:
            return ~np.any(self.norm_canon != 0, axis=1)
        return np.sum(np.abs(self.data) ** 2, axis=1) <= self.backend.tol

    def part_index(self) -> np.ndarray:
        """Basis index per vector; vectors outside the partition get -1 - i (never equal)."""
        part = -1 - np.arange(self.m)
        for b, idx in enumerate(self.partition or []):
            part[idx] = b
        return part

    def __repr__(self):
        parts = "none" if self.partition is None else len(self.partition)
        return f"LineSet(m={self.m}, dim={self.dim}, backend={self.backend.mode}, parts={parts})"


# ---------------------------------------------------------------------------
# Gram kernel


@dataclass
class _Block:
    r0: int
    r1: int
    c0: int
    num: np.ndarray | None = None     # exact, reduced numerators (0 where irrational)
    den: np.ndarray | None = None     # exact, reduced denominators (0 where irrational)
    irr: dict = field(default_factory=dict)
    val: np.ndarray | None = None     # float values


def _exact_blocks(ls: LineSet, block_rows: int, threads: int | None) -> Iterator[_Block]:
    V = ls.data
    m, k = V.shape
    N = V.order
    idx = np.arange(N)
    A = V.num
    a_cat = A.reshape(m, k * N)
    conjA = A[..., (-idx) % N]
    # rolls[d][(l, s), j] = conj(v_j)[l] coefficient at (d - s) mod N, so that
    # (a_cat @ rolls[d])[i, j] is the zeta^d coefficient of <v_i, v_j>
    rolls = [conjA[:, :, (d - idx) % N].transpose(1, 2, 0).reshape(k * N, m) for d in range(N)]
    use_float = _maxabs(A) ** 2 * k * N < _FLOAT_EXACT
    if use_float:
        a_cat = a_cat.astype(np.float64)
        rolls = [r.astype(np.float64) for r in rolls]
    red = reduction_matrix(N)
    phi = red.shape[1]
    norms = ls.int_norms
    norm_cyc = None if norms is not None else ls.norms
    d4 = V.den**4

    def work(r0: int) -> _Block:
        r1 = min(m, r0 + block_rows)
        B, W = r1 - r0, m - r0
        parts = []
        for d in range(N):
            if use_float:
                parts.append(np.rint(a_cat[r0:r1] @ rolls[d][:, r0:]).astype(np.int64))
            else:
                parts.append(exact_matmul(a_cat[r0:r1], rolls[d][:, r0:]))
        dtype = object if any(p.dtype == object for p in parts) else np.int64
        G = np.stack([p.astype(dtype) for p in parts], axis=-1)
        P = _cyclic_convolve(G, G[..., (-idx) % N], N)
        canon = exact_matmul(P.reshape(B * W, N), red).reshape(B, W, phi)
        rational = ~np.any(canon[..., 1:] != 0, axis=-1) if phi > 1 else np.ones((B, W), bool)
        c = canon[..., 0]
        blk = _Block(r0, r1, r0)
        if norms is not None:
            den = norms[r0:r1][:, None] * norms[None, r0:]
            if c.dtype == object or _maxabs(den) >= 2**62:
                c, den = c.astype(object), den.astype(object)
            g = np.gcd(c, den)
            num = np.where(rational, c // g, 0)
            den = np.where(rational, den // g, 0)
        else:
            num = np.zeros((B, W), dtype=np.int64)
            den = np.zeros((B, W), dtype=np.int64)
            rational[:] = False
        for i, j in zip(*np.nonzero(~rational)):
            gi, gj = r0 + int(i), r0 + int(j)
            if gj < gi:
                continue
            val = Cyclotomic(N, [Fraction(int(x), d4) for x in canon[i, j]])
            if norms is not None:
                nn = Fraction(int(norms[gi]) * int(norms[gj]), d4)
                val = val / nn
            else:
                val = val / (norm_cyc[gi] * norm_cyc[gj])
            if val.is_rational():
                f = val.to_fraction()
                num[i, j], den[i, j] = f.numerator, f.denominator
            else:
                blk.irr[(gi, gj)] = val
        blk.num, blk.den = num, den
        return blk

    yield from ordered_map(work, range(0, m, block_rows), threads)


def _float_blocks(ls: LineSet, block_rows: int, threads: int | None) -> Iterator[_Block]:
    V = ls.data
    m = V.shape[0]
    nrm = np.sum(np.abs(V) ** 2, axis=1)
    VH = V.conj().T

    def work(r0: int) -> _Block:
        r1 = min(m, r0 + block_rows)
        G = V[r0:r1] @ VH[:, r0:]
        val = np.abs(G) ** 2 / (nrm[r0:r1][:, None] * nrm[None, r0:])
        return _Block(r0, r1, r0, val=val)

    yield from ordered_map(work, range(0, m, block_rows), threads)


def gram_blocks(ls: LineSet, block_rows: int = BLOCK_ROWS, threads: int | None = None):
    """Upper-triangular row blocks of the normalized Gram matrix, in row order."""
    if ls.backend.exact:
        return _exact_blocks(ls, block_rows, threads)
    return _float_blocks(ls, block_rows, threads)


@dataclass
class GramReport:
    """Normalized squared inner products for all pairs i < j, bucketed by pair class.

    Classes are "within" / "cross" (same or different basis) when the set has a
    partition and "all" otherwise.  For each distinct value the report keeps a
    count and the lexicographically first pair carrying it.  The full matrix is
    kept only up to ``GRAM_FULL_CAP`` lines.
    """

    m: int
    backend: Backend
    hist: dict = field(default_factory=dict)
    first: dict = field(default_factory=dict)
    matrix: np.ndarray | None = None

    def classes(self) -> list[str]:
        return list(self.hist)

    def values(self, cls: str | None = None) -> list:
        """Distinct off-diagonal values, ordered by first occurrence."""
        firsts: dict = {}
        for c in ([cls] if cls else self.hist):
            for v, pair in self.first.get(c, {}).items():
                if v not in firsts or pair < firsts[v]:
                    firsts[v] = pair
        return sorted(firsts, key=firsts.get)

    def count(self, value, cls: str | None = None) -> int:
        return sum(self.hist.get(c, {}).get(value, 0) for c in ([cls] if cls else self.hist))

    def entry(self, i: int, j: int):
        if self.matrix is None:
            raise ValueError("full matrix not kept for this many lines")
        return self.matrix[i, j]

    def first_mismatch(self, cls: str, accept: Callable) -> tuple | None:
        """Earliest pair in class ``cls`` whose value fails ``accept``."""
        bad = [(pair, v) for v, pair in self.first.get(cls, {}).items() if not accept(v)]
        return min(bad, key=lambda t: t[0]) if bad else None

    def to_json(self) -> dict:
        from .reports import jsonable

        return {
            "m": self.m,
            "backend": self.backend.mode,
            "histogram": {c: [[jsonable(v), n, list(self.first[c][v])] for v, n in h.items()]
                          for c, h in self.hist.items()},
        }


def _merge_float(acc: dict, firsts: dict, vals: np.ndarray, pairs: np.ndarray, tol: float):
    """Cluster float values (gaps > tol separate clusters) into acc/firsts."""
    if len(vals) == 0:
        return
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    cuts = np.flatnonzero(np.diff(sv) > tol) + 1
    for grp in np.split(np.arange(len(sv)), cuts):
        members = order[grp]
        first = int(members.min())
        rep = float(vals[first])
        pair = tuple(int(x) for x in pairs[first])
        match = next((v for v in acc if abs(v - rep) <= tol), None)
        if match is None:
            acc[rep] = len(members)
            firsts[rep] = pair
        else:
            acc[match] += len(members)
            if pair < firsts[match]:
                firsts[match] = pair


def gram(ls: LineSet, block_rows: int = BLOCK_ROWS, threads: int | None = None,
         keep_matrix: bool | None = None) -> GramReport:
    m = ls.m
    keep = (m <= GRAM_FULL_CAP) if keep_matrix is None else keep_matrix
    part = ls.part_index()
    has_part = ls.partition is not None
    rep = GramReport(m, ls.backend)
    if keep:
        rep.matrix = np.empty((m, m), dtype=object if ls.backend.exact else np.float64)
    for blk in gram_blocks(ls, block_rows, threads):
        rows = np.arange(blk.r0, blk.r1)
        cols = np.arange(blk.c0, m)
        upper = cols[None, :] > rows[:, None]
        same = part[rows][:, None] == part[None, cols]
        classes = [("within", same), ("cross", ~same)] if has_part else [("all", np.ones_like(same))]
        if ls.backend.exact:
            rational = blk.den != 0
            dmax = int(_maxabs(blk.den)) + 1
            for name, cmask in classes:
                mask = upper & cmask & rational
                pos = np.flatnonzero(mask)
                if len(pos):
                    key = blk.num.ravel()[pos].astype(object if dmax > 2**30 else np.int64) * dmax \
                        + blk.den.ravel()[pos]
                    uniq, first_idx, counts = np.unique(key, return_index=True, return_counts=True)
                    h = rep.hist.setdefault(name, {})
                    f = rep.first.setdefault(name, {})
                    for u, fi, cnt in zip(uniq, first_idx, counts):
                        value = Fraction(int(u) // dmax, int(u) % dmax)
                        i, j = divmod(int(pos[fi]), len(cols))
                        pair = (int(rows[i]), int(cols[j]))
                        h[value] = h.get(value, 0) + int(cnt)
                        if value not in f or pair < f[value]:
                            f[value] = pair
                else:
                    rep.hist.setdefault(name, {})
                    rep.first.setdefault(name, {})
                for (gi, gj), val in sorted(blk.irr.items()):
                    if gi == gj or not cmask[gi - blk.r0, gj - blk.c0]:
                        continue
                    h, f = rep.hist[name], rep.first[name]
                    h[val] = h.get(val, 0) + 1
                    f.setdefault(val, (gi, gj))
            if keep:
                for i, r in enumerate(rows):
                    for j in range(i, len(cols)):
                        c = cols[j]
                        if blk.den[i, j]:
                            v = Fraction(int(blk.num[i, j]), int(blk.den[i, j]))
                        else:
                            v = blk.irr.get((int(r), int(c)))
                        rep.matrix[r, c] = rep.matrix[c, r] = v
        else:
            for name, cmask in classes:
                mask = upper & cmask
                ii, jj = np.nonzero(mask)
                pairs = np.stack([rows[ii], cols[jj]], axis=1)
                h = rep.hist.setdefault(name, {})
                f = rep.first.setdefault(name, {})
                _merge_float(h, f, blk.val[mask], pairs, ls.backend.tol)
            if keep:
                rep.matrix[blk.r0:blk.r1, blk.c0:] = blk.val
                rep.matrix[blk.c0:, blk.r0:blk.r1] = blk.val.T
    return rep


# ---------------------------------------------------------------------------
# predicates


def _same(a, b, backend: Backend) -> bool:
    if backend.exact:
        return a == b
    return abs(complex(a) - complex(b)) <= backend.tol


def distinct_lines(ls: LineSet, report: GramReport | None = None) -> list[int]:
    """First index of each projective class (normalized value 1 means proportional)."""
    report = report or gram(ls, keep_matrix=True)
    if report.matrix is None:
        raise ValueError("duplicate detection needs the full Gram matrix")
    keep: list[int] = []
    for i in range(ls.m):
        if not any(_same(report.matrix[i, j], 1, ls.backend) for j in keep):
            keep.append(i)
    return keep


def is_equiangular(ls: LineSet, require_positive: bool = False, identify_duplicates: bool = False,
                   report: GramReport | None = None, threads: int | None = None) -> Check:
    """One common normalized squared inner product alpha < 1 over all distinct pairs."""
    if ls.m < 2:
        raise ValueError("equiangularity needs at least two lines")
    if identify_duplicates:
        rep_full = report if report is not None and report.matrix is not None else gram(ls, keep_matrix=True)
        lines = distinct_lines(ls, rep_full)
        if len(lines) < ls.m:
            sub = ls.subset(lines)
            if sub.m < 2:
                return Check(False, None, {"kind": "single line", "lines": 1})
            chk = is_equiangular(sub, require_positive, False, threads=threads)
            chk.info["lines"] = len(lines)
            chk.info["representatives"] = lines
            if chk.witness is not None and isinstance(chk.witness, tuple):
                i, j, v = chk.witness
                chk.witness = (lines[i], lines[j], v)
            return chk
        report = rep_full
    report = report or gram(ls, threads=threads)
    b = ls.backend
    vals = report.values()
    dup = [v for v in vals if _same(v, 1, b)]
    if dup:
        pair = min(report.first[c][v] for c in report.first for v in dup if v in report.first[c])
        return Check(False, (*pair, 1), {"kind": "duplicate line"})
    if len(vals) > 1:
        alpha = vals[0]
        pair, v = min(((report.first[c][x], x) for c in report.first for x in report.first[c]
                       if not _same(x, alpha, b)))
        return Check(False, (*pair, v), {"kind": "two angles", "alpha": alpha,
                                         "values": len(vals)})
    alpha = vals[0]
    if require_positive and _same(alpha, 0, b):
        return Check(False, (0, 1, alpha), {"kind": "orthogonal", "alpha": alpha})
    return Check(True, None, {"alpha": alpha, "lines": ls.m, "dim": ls.dim})


def is_mub_family(ls: LineSet, report: GramReport | None = None, threads: int | None = None) -> Check:
    """Within-basis pairs orthogonal, every cross-basis normalized value equal to 1/k."""
    if ls.partition is None:
        raise ValueError("MUB check needs a partition into bases")
    k = ls.dim
    if sorted(i for part in ls.partition for i in part) != list(range(ls.m)):
        raise ValueError("partition must cover every vector exactly once")
    report = report or gram(ls, threads=threads)
    b = ls.backend
    target = Fraction(1, k) if b.exact else 1.0 / k
    bad = [w for w in (report.first_mismatch("within", lambda v: _same(v, 0, b)),
                       report.first_mismatch("cross", lambda v: _same(v, target, b))) if w]
    nb = len(ls.partition)
    info = {"bases": nb, "dim": k, "bound_ok": nb <= k + 1}
    if bad:
        pair, v = min(bad, key=lambda t: t[0])
        info["kind"] = "within" if ls.part_index()[pair[0]] == ls.part_index()[pair[1]] else "cross"
        return Check(False, (*pair, v), info)
    if nb > k + 1:
        raise ArithmeticError(f"{nb} mutually unbiased bases in dimension {k} exceed k + 1")
    return Check(True, None, info)


def is_flat(ls: LineSet) -> Check:
    """Within every vector all coordinates share one squared modulus."""
    if ls.backend.exact:
        canon = ls.data.abs2().canonical()          # (m, k, phi)
        bad = np.any(canon != canon[:, :1], axis=-1)
    else:
        a = np.abs(ls.data) ** 2
        bad = np.abs(a - a[:, :1]) > ls.backend.tol
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        return Check(False, (int(i), int(j)))
    return Check(True)


def relative_bound(k: int, alpha) -> Fraction | float:
    """m <= (k - k alpha) / (1 - k alpha), valid for k alpha < 1."""
    if isinstance(alpha, float):
        if k * alpha >= 1:
            raise ValueError("relative bound needs k*alpha < 1")
        return (k - k * alpha) / (1 - k * alpha)
    alpha = Fraction(alpha)
    if k * alpha >= 1:
        raise ValueError("relative bound needs k*alpha < 1")
    return (k - k * alpha) / (1 - k * alpha)


def flat_equiangular_cap(k: int) -> int:
    return k * k - k + 1


def meets_with_equality(ls: LineSet, alpha=None) -> Check:
    """The set is equiangular and its size equals the relative bound at its angle."""
    if alpha is None:
        chk = is_equiangular(ls)
        if not chk:
            return chk
        alpha = chk.info["alpha"]
    bound = relative_bound(ls.dim, alpha)
    return Check(ls.m == bound, None, {"m": ls.m, "bound": bound, "alpha": alpha})


# ---------------------------------------------------------------------------
# restricted equivalence


def _as_cycarray(x) -> CycArray:
    return x if isinstance(x, CycArray) else CycArray.from_scalars(x)


def unitary_scale(U) -> Fraction | float | None:
    """c > 0 with U U* = c I, or None."""
    if isinstance(U, np.ndarray) and U.dtype.kind == "c":
        P = U @ U.conj().T
        c = P[0, 0].real
        ok = c > 0 and np.allclose(P, c * np.eye(len(U)), atol=DEFAULT_TOL)
        return float(c) if ok else None
    U = _as_cycarray(U)
    P = U @ U.H
    c = P.entry(0, 0)
    if not c.is_rational() or c.to_fraction() <= 0:
        return None
    if not P.equals(CycArray.identity(len(U), P.order).scale(c)):
        return None
    return c.to_fraction()


def equivalence_certificate_check(A: LineSet, B: LineSet, U, perm, phases) -> Check:
    """U a_i phases[i] = b_{perm[i]} for every i, with U a nonzero multiple of a unitary.

    The scalars in ``phases`` absorb both the projective freedom and the scale of U.
    """
    if A.dim != B.dim or A.m != B.m:
        raise ValueError("line sets differ in dimension or size")
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(A.m)):
        raise ValueError("perm is not a permutation")
    c = unitary_scale(U)
    if c is None:
        raise ValueError("U is not a scalar multiple of a unitary matrix")
    if A.backend.exact and B.backend.exact:
        U = _as_cycarray(U)
        img = A.data @ U.T                               # rows are (U a_i)^T
        lam = CycArray.from_scalars([[p] for p in phases])
        img = img.schur(lam)
        ok = img.elementwise_equal(B.data[np.array(perm)]).all(axis=1)
    else:
        Uc = U.to_complex() if isinstance(U, CycArray) else np.asarray(U, dtype=complex)
        ph = np.array([complex(Cyclotomic.coerce(p).to_complex()) if not isinstance(p, (complex, float))
                       else p for p in phases])
        img = (A.to_complex() @ Uc.T) * ph[:, None]
        tol = max(A.backend.tol, B.backend.tol)
        ok = np.all(np.abs(img - B.to_complex()[perm]) <= tol, axis=1)
    if not np.all(ok):
        return Check(False, int(np.argmin(ok)), {"scale": c})
    return Check(True, None, {"scale": c})


def _columns(M) -> list[list[Cyclotomic]]:
    M = _as_cycarray(M)
    return [list(col) for col in zip(*M.tolist())]


def _projective_key(col: list[Cyclotomic]):
    piv = next(i for i, x in enumerate(col) if not x.is_zero())
    inv = col[piv].inverse()
    return (piv, tuple(x * inv for x in col)), col[piv]


def match_columns_up_to_phase(A, B):
    """(perm, phases) with B[:, perm[j]] = phases[j] * A[:, j], or None.

    Columns are compared after dividing by their first nonzero entry; matching
    is greedy in column order, which is exact because projective classes are
    compared by identity.
    """
    if isinstance(A, np.ndarray) and A.dtype.kind == "c":
        return _match_float(A, np.asarray(B, dtype=complex))
    ca, cb = _columns(A), _columns(B)
    if len(ca) != len(cb) or (ca and len(ca[0]) != len(cb[0])):
        raise ValueError("matrices differ in shape")
    pool: dict = {}
    for j, col in enumerate(cb):
        key, piv = _projective_key(col)
        pool.setdefault(key, deque()).append((j, piv))
    perm, phases = [], []
    for col in ca:
        key, piv = _projective_key(col)
        if not pool.get(key):
            return None
        j, pb = pool[key].popleft()
        perm.append(j)
        phases.append(pb / piv)
    return perm, phases


def _match_float(A: np.ndarray, B: np.ndarray, tol: float = 1e-9):
    used = set()
    perm, phases = [], []
    for j in range(A.shape[1]):
        a = A[:, j]
        piv = int(np.argmax(np.abs(a) > tol))
        hit = None
        for l in range(B.shape[1]):
            if l in used or abs(B[piv, l]) <= tol:
                continue
            s = B[piv, l] / a[piv]
            if np.all(np.abs(B[:, l] - s * a) <= tol):
                hit = (l, s)
                break
        if hit is None:
            return None
        used.add(hit[0])
        perm.append(hit[0])
        phases.append(complex(hit[1]))
    return perm, phases


# ---------------------------------------------------------------------------
# serialization


def lineset_to_json(ls: LineSet) -> dict:
    if ls.backend.exact:
        V = ls.data
        canon = V.canonical()
        den = V.den
        g = np.gcd(canon.astype(object) if canon.dtype == object else canon, den)
        nums, dens = canon // g, den // g
        vectors = [[{"order": V.order,
                     "coeffs": [[int(a), int(b)] for a, b in zip(nums[i, j], dens[i, j])]}
                    for j in range(ls.dim)] for i in range(ls.m)]
        order = V.order
    else:
        vectors = [[[float(z.real), float(z.imag)] for z in row] for row in ls.data]
        order = None
    return {"dim": ls.dim, "backend": ls.backend.mode, "cyclotomic_order": order,
            "vectors": vectors, "partition": ls.partition, "meta": ls.meta}


def lineset_from_json(obj: dict, tol: float = DEFAULT_TOL) -> LineSet:
    backend = Backend(obj.get("backend", "exact"), tol)
    k = int(obj["dim"])
    vecs = obj["vectors"]
    if any(len(v) != k for v in vecs):
        raise ValueError("vector length does not match dim")
    part = obj.get("partition")
    meta = obj.get("meta", "")
    if not backend.exact:
        data = np.array([[complex(re, im) for re, im in v] for v in vecs], dtype=np.complex128)
        return LineSet(data.reshape(len(vecs), k), backend, part, meta)
    orders = {int(e["order"]) for v in vecs for e in v}
    N = common_order(int(obj.get("cyclotomic_order") or 1), *orders)
    entries = [Cyclotomic.from_json(e) for v in vecs for e in v]
    if len(orders) == 1 and N in orders:
        phi = euler_phi(N)
        lcd = reduce(math.lcm, (x.den for x in entries), 1)
        num = np.zeros((len(entries), N), dtype=object)
        for r, x in enumerate(entries):
            num[r, :phi] = [c * (lcd // x.den) for c in x.num]
        num = num.reshape(len(vecs), k, N)
        try:
            num = num.astype(np.int64)
        except OverflowError:
            pass
        data = CycArray(N, num, lcd)
    else:
        data = CycArray.from_scalars(np.array(entries, dtype=object).reshape(len(vecs), k), N)
    return LineSet(data, backend, part, meta)


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def save_lineset(ls: LineSet, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(lineset_to_json(ls)))
        fh.write("\n")


def load_lineset(path, tol: float = DEFAULT_TOL) -> LineSet:
    with open(path) as fh:
        return lineset_from_json(json.load(fh), tol)


def export_gram_csv(ls: LineSet, out, block_rows: int = BLOCK_ROWS, threads: int | None = None) -> int:
    """Write (row, col, num, den) for every pair row <= col; returns the number of rows written.

    Irrational exact values go to ``num`` in text form with an empty ``den``;
    float values go to ``num`` with ``den`` empty as well.
    """
    own = isinstance(out, (str, os.PathLike))
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh)
        w.writerow(["row", "col", "num", "den"])
        count = 0
        for blk in gram_blocks(ls, block_rows, threads):
            for i in range(blk.r1 - blk.r0):
                r = blk.r0 + i
                for j in range(r - blk.c0, ls.m - blk.c0):
                    c = blk.c0 + j
                    if blk.val is not None:
                        w.writerow([r, c, repr(float(blk.val[i, j])), ""])
                    elif r == c:
                        w.writerow([r, c, 1, 1])
                    elif blk.den[i, j]:
                        w.writerow([r, c, int(blk.num[i, j]), int(blk.den[i, j])])
                    else:
                        w.writerow([r, c, str(blk.irr[(r, c)]), ""])
                    count += 1
        return count
    finally:
        if own:
            fh.close()
