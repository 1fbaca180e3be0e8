"""Quadratic functions, pencils, and the normalization that bounds their data.

A quadratic here is ``q(x) = x^T A x + 2 b^T x + c`` (note the factor of two on
the linear term).  Matrices are symmetric and stored once, upper triangle in
coordinate form; every algorithm touches them only through ``matvec``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateInputError, InputError

# Below this size a dense copy is used for products; it is faster than CSR
# dispatch and changes nothing observable.
_DENSE_MATVEC_MAX_N = 128


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_vector(v, n, what="vector"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != n:
        raise InputError(f"{what} has shape {v.shape}, expected ({n},)")
    return v


@dataclass(frozen=True, eq=False)
class SparseSymMatrix:
    """Symmetric ``n x n`` matrix from upper-triangle triplets ``(i, j, v)``, ``i <= j``."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    _op: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InputError(f"dimension must be a positive integer, got {self.n}")
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        vals = np.asarray(self.vals, dtype=float)
        if not (rows.shape == cols.shape == vals.shape) or rows.ndim != 1:
            raise InputError("rows, cols and vals must be 1-d arrays of equal length")
        if rows.size:
            if rows.min() < 0 or cols.min() < 0 or rows.max() >= self.n or cols.max() >= self.n:
                raise InputError("matrix index out of range")
            if np.any(rows > cols):
                raise InputError("only upper-triangle entries (i <= j) are accepted")
            if not np.all(np.isfinite(vals)):
                raise InputError("matrix entries must be finite")
            keys = rows * self.n + cols
            if np.unique(keys).size != keys.size:
                raise InputError("duplicate (row, col) entries; use from_triplets to sum them")
        for name, arr in (("rows", rows), ("cols", cols), ("vals", vals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "_op", self._build_operator())

    @classmethod
    def from_triplets(cls, n, triplets=(), *, sum_duplicates=True):
        """Build from an iterable of ``(i, j, value)``; duplicates are summed."""
        triplets = list(triplets)
        if not triplets:
            return cls(n, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))
        arr = np.array(triplets, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise InputError("triplets must be (i, j, value)")
        i, j = arr[:, 0], arr[:, 1]
        if np.any(i != np.round(i)) or np.any(j != np.round(j)):
            raise InputError("matrix indices must be integers")
        return cls.from_coo(n, i.astype(np.int64), j.astype(np.int64), arr[:, 2],
                            sum_duplicates=sum_duplicates)

    @classmethod
    def from_coo(cls, n, rows, cols, vals, *, sum_duplicates=True):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=float)
        if rows.size and sum_duplicates:
            if rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n:
                raise InputError("matrix index out of range")
            keys = rows * n + cols
            uniq, inv = np.unique(keys, return_inverse=True)
            summed = np.zeros(uniq.size)
            np.add.at(summed, inv, vals)
            rows, cols, vals = uniq // n, uniq % n, summed
        return cls(n, rows, cols, vals)

    @classmethod
    def from_dense(cls, a, *, tol=0.0):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("dense matrix must be square")
        if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max(initial=0))):
            raise InputError("dense matrix must be symmetric")
        iu, ju = np.triu_indices(a.shape[0])
        v = a[iu, ju]
        keep = np.abs(v) > tol
        return cls(a.shape[0], iu[keep], ju[keep], v[keep])

    @classmethod
    def from_diagonal(cls, d):
        d = np.asarray(d, dtype=float)
        idx = np.arange(d.size)
        return cls(d.size, idx, idx, d)

    @classmethod
    def zeros(cls, n):
        return cls.from_triplets(n, ())

    def _build_operator(self):
        off = self.rows != self.cols
        r = np.concatenate([self.rows, self.cols[off]])
        c = np.concatenate([self.cols, self.rows[off]])
        v = np.concatenate([self.vals, self.vals[off]])
        m = sp.csr_matrix((v, (r, c)), shape=(self.n, self.n))
        if self.n <= _DENSE_MATVEC_MAX_N:
            return m.toarray()
        return m

    @property
    def nnz(self):
        """Number of stored (upper-triangle) entries."""
        return int(self.vals.size)

    def matvec(self, v):
        return self._op @ v

    def to_dense(self):
        if isinstance(self._op, np.ndarray):
            return self._op.copy()
        return self._op.toarray()

    def triplets(self):
        return [(int(i), int(j), float(v)) for i, j, v in zip(self.rows, self.cols, self.vals)]

    def diagonal(self):
        d = np.zeros(self.n)
        on = self.rows == self.cols
        d[self.rows[on]] = self.vals[on]
        return d

    @property
    def is_diagonal(self):
        return bool(np.all((self.rows == self.cols) | (self.vals == 0)))

    def gershgorin_bound(self):
        """Max absolute row sum of the full symmetric matrix (an upper bound on the 2-norm)."""
        a = np.abs(self.vals)
        off = self.rows != self.cols
        sums = np.zeros(self.n)
        np.add.at(sums, self.rows, a)
        np.add.at(sums, self.cols[off], a[off])
        return float(sums.max(initial=0.0))

    def scaled(self, s):
        return SparseSymMatrix(self.n, self.rows, self.cols, s * self.vals)

    def __repr__(self):
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class Quadratic:
    """``q(x) = x^T A x + 2 b^T x + c``."""

    A: SparseSymMatrix
    b: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        b = _check_vector(self.b, self.A.n, "linear term b")
        if not np.all(np.isfinite(b)) or not np.isfinite(self.c):
            raise InputError("b and c must be finite")
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self):
        return self.A.n

    @classmethod
    def from_dense(cls, A, b=None, c=0.0):
        A = SparseSymMatrix.from_dense(A)
        return cls(A, np.zeros(A.n) if b is None else b, c)

    def __call__(self, x):
        return evaluate(self, x)

    def grad(self, x):
        return gradient(self, x)

    def scaled(self, s):
        return Quadratic(self.A.scaled(s), s * self.b, s * self.c)

    def is_zero(self):
        return not np.any(self.A.vals) and not np.any(self.b) and self.c == 0.0


def evaluate(q, x):
    """Value of ``q`` at ``x`` using one matrix-vector product."""
    x = _check_vector(x, q.n, "x")
    return float(x @ q.A.matvec(x) + 2.0 * (q.b @ x) + q.c)


def gradient(q, x):
    x = _check_vector(x, q.n, "x")
    return 2.0 * (q.A.matvec(x) + q.b)


@dataclass(frozen=True, eq=False)
class Pencil:
    """The pair ``(q0, q1)`` and the family ``q(gamma, .) = q0 + gamma * q1``."""

    q0: Quadratic
    q1: Quadratic

    def __post_init__(self):
        if self.q0.n != self.q1.n:
            raise InputError(f"dimension mismatch: q0 has n={self.q0.n}, q1 has n={self.q1.n}")

    @property
    def n(self):
        return self.q0.n

    @property
    def nnz(self):
        return self.q0.A.nnz + self.q1.A.nnz

    def b(self, gamma):
        return self.q0.b + gamma * self.q1.b

    def c(self, gamma):
        return self.q0.c + gamma * self.q1.c

    def matvec(self, gamma, v):
        return pencil_matvec(self, gamma, v)

    def operator(self, gamma):
        """A callable ``v -> A(gamma) v``."""
        A0, A1 = self.q0.A, self.q1.A
        return lambda v: A0.matvec(v) + gamma * A1.matvec(v)

    def __call__(self, gamma, x):
        return pencil_eval(self, gamma, x)

    def dense(self, gamma):
        """Dense ``A(gamma)``; small instances and oracles only."""
        return self.q0.A.to_dense() + gamma * self.q1.A.to_dense()

    def with_b0(self, b0):
        return Pencil(Quadratic(self.q0.A, b0, self.q0.c), self.q1)

    def with_c0(self, c0):
        return Pencil(Quadratic(self.q0.A, self.q0.b, c0), self.q1)

    def scaled(self, s0, s1):
        return Pencil(self.q0.scaled(s0), self.q1.scaled(s1))

    @property
    def is_diagonal(self):
        return self.q0.A.is_diagonal and self.q1.A.is_diagonal


def pencil_matvec(p, gamma, v):
    """``A0 v + gamma A1 v`` without forming ``A(gamma)``."""
    v = _check_vector(v, p.n, "v")
    return p.q0.A.matvec(v) + gamma * p.q1.A.matvec(v)


def pencil_eval(p, gamma, x):
    """``q0(x) + gamma q1(x)``, both values from a single pass over each matrix."""
    x = _check_vector(x, p.n, "x")
    y = pencil_matvec(p, gamma, x)
    return float(x @ y + 2.0 * (p.b(gamma) @ x) + p.c(gamma))


@dataclass(frozen=True)
class NormalizationScales:
    """Positive factors with ``q0' = s0 q0`` and ``q1' = s1 q1``."""

    s0: float
    s1: float
    norm_bound0: float
    norm_bound1: float

    def gamma_to_original(self, gamma):
        return gamma * self.s1 / self.s0

    def gamma_to_normalized(self, gamma):
        return gamma * self.s0 / self.s1

    def value_to_original(self, value):
        return value / self.s0


def spectral_norm_upper_bound(A, *, safety=1.01):
    """Upper bound on ``||A||_2``: min of Gershgorin and a safety-padded Krylov estimate."""
    from .lanczos import extreme_ritz_values

    gersh = A.gershgorin_bound()
    if gersh == 0.0:
        return 0.0
    lo, hi = extreme_ritz_values(A.matvec, A.n, steps=min(A.n, 64), seed=0)
    est = safety * max(abs(lo), abs(hi))
    return float(min(gersh, est))


def normalize(p):
    """Scale each quadratic so ``||A0||, ||A1||, ||b0||, ||b1||, |c1| <= 1``.

    Each scale divides by the largest of the bounded quantities, so any
    positive rescaling of the input produces the same normalized pencil.
    """
    if p.q0.is_zero() and p.q1.is_zero():
        raise DegenerateInputError("both quadratics are identically zero")
    ub0 = spectral_norm_upper_bound(p.q0.A)
    ub1 = spectral_norm_upper_bound(p.q1.A)
    m0 = max(ub0, float(np.linalg.norm(p.q0.b)))
    m1 = max(ub1, float(np.linalg.norm(p.q1.b)), abs(p.q1.c))
    s0 = 1.0 / m0 if m0 > 0 else 1.0
    s1 = 1.0 / m1 if m1 > 0 else 1.0
    scales = NormalizationScales(s0, s1, ub0, ub1)
    return p.scaled(s0, s1), scales
