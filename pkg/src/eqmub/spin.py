"""Type-II matrices, spin models, and the MUB triples {I, A, D_j A} they produce.

Exact matrices are CycArrays; float matrices are complex numpy arrays and are
checked against a relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .constructions import MubFamily, _family
from .cyclotomic import CycArray, Cyclotomic, sqrt_rational
from .lineset import DEFAULT_TOL, EXACT, LineSet, is_mub_family, unitary_scale
from .reports import Check

SPIN_TOL = 1e-9


def _exact(M) -> bool:
    return isinstance(M, CycArray)


def _entries_nonzero(M) -> bool:
    if _exact(M):
        return not np.any(M.is_zero())
    return bool(np.all(np.abs(M) > 0))


def schur_product(M, N):
    if _exact(M) and _exact(N):
        if M.shape != N.shape:
            raise ValueError("shapes differ")
        return M.schur(N)
    M = M.to_complex() if _exact(M) else np.asarray(M)
    N = N.to_complex() if _exact(N) else np.asarray(N)
    if M.shape != N.shape:
        raise ValueError("shapes differ")
    return M * N


def schur_inverse(M):
    """Entrywise reciprocal; roots of unity are inverted by negating exponents."""
    if not _entries_nonzero(M):
        raise ZeroDivisionError("matrix has a zero entry")
    if not _exact(M):
        return 1.0 / np.asarray(M, dtype=complex)
    E = M.root_exponents()
    if E is not None:
        return CycArray.from_exponents((-E) % M.order, M.order)
    rows = [[x.inverse() for x in row] for row in M.tolist()]
    return CycArray.from_scalars(rows)


def _identity_like(M, scale=1):
    n = M.shape[0]
    if _exact(M):
        return CycArray.identity(n).scale(Cyclotomic.coerce(scale))
    return scale * np.eye(n)


def _close(A, B, tol: float) -> np.ndarray:
    """Entrywise |A - B| <= tol * max(1, max|B|)."""
    scale = max(1.0, float(np.max(np.abs(B)))) if np.size(B) else 1.0
    return np.abs(A - B) <= tol * scale


def is_type_ii(M, tol: float = SPIN_TOL) -> Check:
    """M (M^{o-})^T = v I."""
    if M.shape[0] != M.shape[1]:
        raise ValueError("type-II matrices are square")
    if not _entries_nonzero(M):
        raise ZeroDivisionError("type-II matrices have no zero entries")
    v = M.shape[0]
    S = schur_inverse(M)
    P = M @ S.T
    if _exact(M):
        eq = P.elementwise_equal(_identity_like(M, v))
    else:
        eq = _close(P, v * np.eye(v), tol)
    if not np.all(eq):
        i, j = np.argwhere(~eq)[0]
        return Check(False, (int(i), int(j)))
    return Check(True, None, {"order": v})


def is_flat_matrix(M, tol: float = SPIN_TOL) -> bool:
    if _exact(M):
        c = M.abs2().canonical()
        flat = c.reshape(-1, c.shape[-1])
        return bool(np.all(flat == flat[:1]))
    a = np.abs(np.asarray(M)) ** 2
    return bool(np.all(np.abs(a - a.flat[0]) <= tol * max(1.0, a.flat[0])))


def is_unitary_up_to_scale(M) -> bool:
    return unitary_scale(M) is not None


def two_of_three_check(M) -> Check:
    """Type-II, a multiple of a unitary, flat: never exactly two of the three."""
    t2 = _entries_nonzero(M) and bool(is_type_ii(M))
    un = is_unitary_up_to_scale(M)
    fl = is_flat_matrix(M)
    flags = {"type_ii": t2, "unitary": un, "flat": fl}
    return Check(sum(flags.values()) != 2, None if sum(flags.values()) != 2 else flags, flags)


def schur_ratio(M, i: int, j: int):
    """(M e_i) o (M e_j)^{o-}."""
    if _exact(M):
        ci, cj = M[:, i], M[:, j]
        return ci.schur(schur_inverse(CycArray(cj.order, cj.num[:, None], cj.den))[:, 0])
    M = np.asarray(M)
    return M[:, i] / M[:, j]


def _ratio_matrix(M):
    """Columns are all v^2 ratios, column i*v + j = M_{i/j}."""
    v = M.shape[0]
    S = schur_inverse(M)
    if _exact(M):
        R = M.num[:, :, None, :]                 # (r, i, 1, N)
        a = CycArray(M.order, np.broadcast_to(R, (v, v, v, M.order)), M.den)
        b = CycArray(S.order, np.broadcast_to(S.num[:, None, :, :], (v, v, v, S.order)), S.den)
        prod = a.schur(b)
        return CycArray(prod.order, prod.num.reshape(v, v * v, prod.order), prod.den)
    M = np.asarray(M)
    return (M[:, :, None] * S[:, None, :]).reshape(v, v * v)


def is_spin_model(M, tol: float = SPIN_TOL) -> Check:
    """Every Schur ratio M_{i/j} is an eigenvector of M; info['mu'][i][j] is its eigenvalue."""
    t2 = is_type_ii(M, tol)
    if not t2:
        raise ValueError(f"not a type-II matrix: {t2.witness}")
    v = M.shape[0]
    R = _ratio_matrix(M)
    MR = M @ R
    if _exact(M):
        r0 = CycArray(R.order, R.num[:1], R.den)
        m0 = CycArray(MR.order, MR.num[:1], MR.den)
        ok = MR.schur(r0).elementwise_equal(R.schur(m0)).all(axis=0)
        if not np.all(ok):
            c = int(np.argmin(ok))
            return Check(False, divmod(c, v))
        mu = [[MR.entry(0, i * v + j) / R.entry(0, i * v + j) for j in range(v)] for i in range(v)]
        return Check(True, None, {"mu": mu})
    mu = MR[0] / R[0]
    res = np.linalg.norm(MR - mu[None, :] * R, axis=0) / np.linalg.norm(R, axis=0)
    if np.any(res > tol):
        c = int(np.argmax(res > tol))
        return Check(False, divmod(c, v), {"residual": float(res[c])})
    return Check(True, None, {"mu": mu.reshape(v, v).tolist(), "max_residual": float(res.max())})


# ---------------------------------------------------------------------------
# matrix families


@dataclass(eq=False)
class TypeIIMatrix:
    """A square Schur-invertible matrix with its Schur inverse and lazily computed flags."""

    matrix: CycArray | np.ndarray
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError("matrix must be square")
        if not _entries_nonzero(self.matrix):
            raise ZeroDivisionError("matrix has a zero entry")
        self._flags: dict = {}

    @property
    def v(self) -> int:
        return self.matrix.shape[0]

    @property
    def exact(self) -> bool:
        return _exact(self.matrix)

    @property
    def schur_inverse(self):
        if "sinv" not in self._flags:
            self._flags["sinv"] = schur_inverse(self.matrix)
        return self._flags["sinv"]

    def _flag(self, key, fn):
        if key not in self._flags:
            self._flags[key] = fn()
        return self._flags[key]

    @property
    def type_ii(self) -> bool:
        return self._flag("type_ii", lambda: bool(is_type_ii(self.matrix)))

    @property
    def flat(self) -> bool:
        return self._flag("flat", lambda: is_flat_matrix(self.matrix))

    @property
    def unitary(self) -> bool:
        return self._flag("unitary", lambda: is_unitary_up_to_scale(self.matrix))

    @property
    def spin_model(self) -> bool | None:
        """True / False, or None while the matrix is not type-II (question undefined)."""
        if not self.type_ii:
            return None
        return self._flag("spin", lambda: bool(is_spin_model(self.matrix)))

    def to_complex(self) -> np.ndarray:
        return self.matrix.to_complex() if self.exact else np.asarray(self.matrix)

    def to_json(self) -> dict:
        from .lineset import lineset_to_json

        rows = LineSet.from_rows(self.matrix, meta=self.name) if self.exact else \
            LineSet.from_rows(self.matrix, meta=self.name, backend=_float_backend())
        out = lineset_to_json(rows)
        out["kind"] = "matrix"
        out["params"] = {k: str(v) for k, v in self.params.items()}
        return out


def _float_backend():
    from .lineset import Backend

    return Backend("float", DEFAULT_TOL)


def potts(v: int, sign: str = "+", exact: bool | None = None) -> TypeIIMatrix:
    """(a - 1) I + J with a = (-v + 2 +- sqrt(v^2 - 4v)) / 2.

    Exact when the discriminant is a perfect square, or on request (exact=True)
    through an exact cyclotomic square root; complex floats otherwise.
    """
    if v < 1:
        raise ValueError("v must be positive")
    if sign not in "+-":
        raise ValueError("sign must be '+' or '-'")
    s = 1 if sign == "+" else -1
    disc = v * v - 4 * v
    square = disc >= 0 and math.isqrt(disc) ** 2 == disc
    if exact is None:
        exact = square
    if exact:
        root = Cyclotomic.rational(math.isqrt(disc)) if square else sqrt_rational(disc)
        a = (Cyclotomic.rational(2 - v) + root * s) * Fraction(1, 2)
        rows = [[a if i == j else 1 for j in range(v)] for i in range(v)]
        M = CycArray.from_scalars(rows)
    else:
        a = (2 - v + s * np.sqrt(complex(disc))) / 2
        M = np.ones((v, v), dtype=complex) + (a - 1) * np.eye(v)
    return TypeIIMatrix(M, f"Potts v={v} ({sign})", {"v": v, "a": a, "sign": sign})


def default_theta(n: int) -> tuple[int, int]:
    """(order, k) with theta = zeta_order^k: zeta_2n for even n, zeta_2n^(n+1) for odd n.

    theta^2 is a primitive n-th root either way, and theta^(n^2) = 1 so the
    matrix theta^((i-j)^2) is a circulant.
    """
    return (2 * n, 1) if n % 2 == 0 else (2 * n, n + 1)


def quadratic_circulant(n: int, theta: tuple[int, int] | None = None) -> TypeIIMatrix:
    """W[i, j] = theta^((i - j)^2) with the integer difference i - j; theta = zeta_order^k."""
    if n < 1:
        raise ValueError("n must be positive")
    order, k = theta or default_theta(n)
    i = np.arange(n)
    E = (k * (i[:, None] - i[None, :]) ** 2) % order
    return TypeIIMatrix(CycArray.from_exponents(E, order), f"quadratic circulant n={n}",
                        {"n": n, "theta": f"zeta_{order}^{k}"})


def fourier_matrix(n: int) -> TypeIIMatrix:
    """Character table of Z_n."""
    i = np.arange(n)
    return TypeIIMatrix(CycArray.from_exponents(np.outer(i, i) % n, n), f"Fourier Z_{n}", {"n": n})


# ---------------------------------------------------------------------------
# diagonals D_j and MUB triples


def _unwrap(A):
    return A.matrix if isinstance(A, TypeIIMatrix) else A


def spin_diagonals(A) -> list[CycArray]:
    """D_j = diag(column j of A^{o-}) for an exact flat matrix with unit-modulus entries."""
    A = _unwrap(A)
    if not _exact(A):
        raise TypeError("spin diagonals need an exact matrix")
    if A.root_exponents() is None:
        raise ValueError("entries must be roots of unity")
    S = schur_inverse(A)
    n = A.shape[0]
    out = []
    for j in range(n):
        num = np.zeros((n, n, S.order), dtype=S.num.dtype)
        num[np.arange(n), np.arange(n)] = S.num[:, j]
        out.append(CycArray(S.order, num, S.den))
    return out


def _diag_inverse(D: CycArray) -> CycArray:
    n = D.shape[0]
    E = D.root_exponents()
    E = np.where(E >= 0, (-E) % D.order, -1)
    return CycArray.from_exponents(E, D.order)


def diagonal_conjugation_check(A) -> Check:
    """D_j A D_j^{-1} = c A^* D_j A with one scalar c, |c|^2 = 1/n, for every j.

    A has unit-modulus entries (so A / sqrt(n) is unitary); also checks that
    diag(A) is constant, tr(D_j) does not depend on j, and A^{o-} has constant
    column sums. Failures are reported, not raised.
    """
    A = _unwrap(A)
    n = A.shape[0]
    if unitary_scale(A) != n or A.root_exponents() is None:
        raise ValueError("A must be flat with unit-modulus entries and A A^* = n I")
    Ds = spin_diagonals(A)
    AH = A.H
    info: dict = {"n": n}
    failures = []
    scalars = []
    for j, D in enumerate(Ds):
        L = D @ A @ _diag_inverse(D)
        R = AH @ D @ A
        r0 = R.entry(0, 0)
        if r0.is_zero():
            failures.append(j)
            scalars.append(None)
            continue
        c = L.entry(0, 0) / r0
        if not L.equals(R.scale(c)) or c.abs_squared() != Fraction(1, n):
            failures.append(j)
            scalars.append(None)
        else:
            scalars.append(c)
    same_c = all(s is not None for s in scalars) and all(s == scalars[0] for s in scalars)
    diag = [A.entry(i, i) for i in range(n)]
    traces = [sum((D.entry(i, i) for i in range(n)), Cyclotomic.rational(0)) for D in Ds]
    S = schur_inverse(A)
    colsums = [sum((S.entry(i, j) for i in range(n)), Cyclotomic.rational(0)) for j in range(n)]
    info.update({
        "identity_fails": failures,
        "scalar": scalars[0] if same_c else None,
        "same_scalar": same_c,
        "constant_diagonal": all(x == diag[0] for x in diag),
        "constant_trace": all(t == traces[0] for t in traces),
        "constant_column_sums": all(c == colsums[0] for c in colsums),
        "trace": traces[0],
    })
    ok = not failures and same_c and info["constant_diagonal"] and info["constant_trace"] \
        and info["constant_column_sums"]
    return Check(ok, failures[0] if failures else None, info)


def _columns_as_rows(M: CycArray) -> CycArray:
    return M.T


def spin_mub_triple(A, j: int) -> MubFamily:
    """Standard basis, columns of A, columns of D_j A."""
    A = _unwrap(A)
    D = spin_diagonals(A)[j]
    fam = _family([CycArray.identity(A.shape[0]), _columns_as_rows(A), _columns_as_rows(D @ A)],
                  ["I", "A", f"D_{j}A"], True, f"spin model MUB triple, j={j}", {"j": j})
    return fam


def _unbiased_pair(X: CycArray, Y: CycArray) -> bool:
    ls = LineSet(CycArray.concat([X, Y]), EXACT, [list(range(len(X))), list(range(len(X), 2 * len(X)))])
    return bool(is_mub_family(ls))


def spin_family_report(A) -> dict:
    """Pairwise unbiasedness inside {I, A, D_1 A, ..., D_n A} and its largest unbiased subfamilies."""
    A = _unwrap(A)
    n = A.shape[0]
    bases = [CycArray.identity(n), A.T] + [(D @ A).T for D in spin_diagonals(A)]
    names = ["I", "A"] + [f"D_{j}A" for j in range(n)]
    m = len(bases)
    adj = np.zeros((m, m), dtype=bool)
    for x, y in combinations(range(m), 2):
        adj[x, y] = adj[y, x] = _unbiased_pair(bases[x], bases[y])
    best: list[list[int]] = [[]]

    def expand(clique, cand):
        if len(clique) > len(best[0]):
            best[:] = [list(clique)]
        elif len(clique) == len(best[0]) and clique:
            best.append(list(clique))
        for t, c in enumerate(cand):
            if len(clique) + len(cand) - t < len(best[0]):
                return
            expand(clique + [c], [d for d in cand[t + 1:] if adj[c, d]])

    expand([], list(range(m)))
    return {"names": names, "unbiased": adj.tolist(),
            "largest": [[names[i] for i in c] for c in best], "size": len(best[0])}
