"""Exact rational dense linear algebra.

Exact arrays are numpy ``object`` arrays holding :class:`fractions.Fraction`
entries; floating arrays are plain ``float64``.  Every contraction funnels
through :func:`dot`, which clears denominators and hands the integer product
to the fastest available kernel; the conversions between Fraction arrays and
integer arrays have kernels of their own.  The compiled kernels are used
when the extension imported, otherwise the numpy fallbacks;
``PARASOLV_PURE=1`` forces the fallbacks.
"""
from __future__ import annotations

import os
from fractions import Fraction
from math import lcm

import numpy as np

from . import _pykernels

if os.environ.get("PARASOLV_PURE"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

ZERO = Fraction(0)
ONE = Fraction(1)


class SingularMatrixError(ValueError):
    pass


def _kernels(name=None):
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    return _pykernels


def backend_matmul(name=None):
    """Return the int64 matmul kernel for ``name`` ('compiled' or 'python')."""
    return _kernels(name).matmul_i64


def is_exact(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def qarray(data) -> np.ndarray:
    """Object array of Fractions from nested lists, ints, strings or Fractions."""
    arr = np.array(data, dtype=object)
    flat = [v if isinstance(v, Fraction) else Fraction(v) for v in arr.ravel().tolist()]
    out = np.empty(arr.shape, dtype=object)
    out.ravel()[:] = flat if flat else []
    return out


def qzeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def qeye(n: int) -> np.ndarray:
    out = qzeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


def zeros_like_mode(shape, exact: bool) -> np.ndarray:
    return qzeros(shape) if exact else np.zeros(shape)


def to_float(a) -> np.ndarray:
    if is_exact(a):
        return np.array([float(v) for v in a.ravel().tolist()], dtype=float).reshape(a.shape)
    return np.asarray(a, dtype=float)


def to_integer(a):
    """Split an exact array into ``(numerators, denominator)``.

    The numerator array is int64 when it fits, otherwise an object array of
    Python ints.
    """
    flat = a.ravel().tolist()
    if not flat:
        return np.zeros(a.shape, dtype=np.int64), 1
    fast = _kernels().split_fractions(flat)
    if fast is not None:
        return fast[0].reshape(a.shape), fast[1]
    den = lcm(*{v.denominator for v in flat})
    num = np.array([v.numerator * (den // v.denominator) for v in flat], dtype=object)
    return num.reshape(a.shape), den


def from_integer(num, den: int) -> np.ndarray:
    out = np.empty(num.shape, dtype=object)
    if num.dtype == np.int64 and 0 < den < 2**63:
        out.ravel()[:] = _kernels().join_fractions(np.ascontiguousarray(num).ravel(), den)
    else:
        out.ravel()[:] = [ZERO if v == 0 else Fraction(v, den) for v in num.ravel().tolist()]
    return out


def imatmul(a, b):
    """Integer matrix product, exact for any magnitude."""
    if a.dtype == np.int64 and b.dtype == np.int64:
        try:
            return backend_matmul()(np.ascontiguousarray(a), np.ascontiguousarray(b))
        except OverflowError:
            pass
    return np.asarray(a, dtype=object).dot(np.asarray(b, dtype=object))


def dot(a, b) -> np.ndarray:
    """Matrix product of two 2-D arrays, exact when either operand is exact."""
    if not is_exact(a) and not is_exact(b):
        return np.asarray(a, dtype=float) @ np.asarray(b, dtype=float)
    if not is_exact(a) or not is_exact(b):
        return to_float(a) @ to_float(b)
    na, da = to_integer(a)
    nb, db = to_integer(b)
    return from_integer(imatmul(na, nb), da * db)


def lincomb(*terms) -> np.ndarray:
    """``sum c * a`` over ``(c, a)`` pairs of same-shape arrays, on a common denominator."""
    if not any(is_exact(a) for _, a in terms):
        return sum(float(c) * a for c, a in terms)
    if not all(is_exact(a) for _, a in terms):
        return sum(float(c) * to_float(a) for c, a in terms)
    parts = []
    for c, a in terms:
        c = Fraction(c)
        num, den = to_integer(a)
        parts.append((num, c.numerator, den * c.denominator))
    big = lcm(*(d for _, _, d in parts))
    scaled = [(num, cn * (big // d)) for num, cn, d in parts]
    bound = sum(abs(k) * (int(np.abs(num).max()) if num.size else 0) for num, k in scaled)
    if bound < 2**62 and all(num.dtype == np.int64 for num, _ in scaled):
        total = sum(num * np.int64(k) for num, k in scaled)
    else:
        total = sum(np.asarray(num, dtype=object) * k for num, k in scaled)
    return from_integer(np.asarray(total), big)


def tdot(a, b, axes) -> np.ndarray:
    """``numpy.tensordot`` with :func:`dot` as the inner product."""
    if not is_exact(a) and not is_exact(b):
        return np.tensordot(a, b, axes)
    ax_a, ax_b = axes
    ax_a = [x % a.ndim for x in ax_a]
    ax_b = [x % b.ndim for x in ax_b]
    free_a = [i for i in range(a.ndim) if i not in ax_a]
    free_b = [i for i in range(b.ndim) if i not in ax_b]
    k = 1
    for i in ax_a:
        k *= a.shape[i]
    am = a.transpose(free_a + ax_a).reshape(-1, k)
    bm = b.transpose(ax_b + free_b).reshape(k, -1)
    out = dot(am, bm)
    return out.reshape([a.shape[i] for i in free_a] + [b.shape[i] for i in free_b])


def is_zero(a, tol: float | None = None) -> bool:
    if is_exact(a):
        return all(v == 0 for v in a.ravel().tolist())
    if tol is None:
        return not np.any(a)
    return bool(np.max(np.abs(a), initial=0.0) <= tol)


def max_abs(a):
    """Largest absolute entry, as a Fraction for exact arrays."""
    flat = a.ravel().tolist()
    if not flat:
        return ZERO if is_exact(a) else 0.0
    return max(abs(v) for v in flat)


def rref(m: np.ndarray):
    """Reduced row echelon form of an exact matrix; returns ``(R, pivots)``."""
    r = np.array(m, dtype=object, copy=True)
    rows, cols = r.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        piv = next((i for i in range(row, rows) if r[i, col] != 0), None)
        if piv is None:
            continue
        if piv != row:
            r[[row, piv]] = r[[piv, row]]
        r[row] = r[row] / r[row, col]
        for i in range(rows):
            if i != row and r[i, col] != 0:
                r[i] = r[i] - r[i, col] * r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    if not is_exact(m):
        return int(np.linalg.matrix_rank(m))
    return len(rref(m)[1])


def nullspace(m: np.ndarray) -> np.ndarray:
    """Columns spanning ``{x : m x = 0}`` (exact)."""
    rows, cols = m.shape
    if rows == 0:
        return qeye(cols)
    r, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = qzeros((cols, len(free)))
    for j, f in enumerate(free):
        basis[f, j] = ONE
        for i, p in enumerate(pivots):
            basis[p, j] = -r[i, f]
    return basis


def column_basis(m: np.ndarray) -> np.ndarray:
    """A subset of columns of ``m`` forming a basis of its column space."""
    if m.shape[1] == 0:
        return m
    _, pivots = rref(m)
    return m[:, pivots]


def inverse(m: np.ndarray) -> np.ndarray:
    if not is_exact(m):
        return np.linalg.inv(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    aug = np.concatenate([np.array(m, dtype=object), qeye(n)], axis=1)
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return r[:, n:]


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unique exact solution of ``a x = b`` (``b`` a vector or matrix).

    ``a`` may be tall; the system must be consistent and ``a`` of full
    column rank.
    """
    vec = b.ndim == 1
    rhs = b.reshape(-1, 1) if vec else b
    n = a.shape[1]
    aug = np.concatenate([np.array(a, dtype=object), np.array(rhs, dtype=object)], axis=1)
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("coefficient matrix does not have full column rank")
    if any(p >= n for p in pivots):
        raise ValueError("inconsistent linear system")
    x = r[:n, n:]
    return x.ravel() if vec else x


def determinant(m: np.ndarray) -> Fraction:
    r = np.array(m, dtype=object, copy=True)
    n = r.shape[0]
    det = ONE
    for col in range(n):
        piv = next((i for i in range(col, n) if r[i, col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            r[[col, piv]] = r[[piv, col]]
            det = -det
        det *= r[col, col]
        for i in range(col + 1, n):
            if r[i, col] != 0:
                r[i] = r[i] - (r[i, col] / r[col, col]) * r[col]
    return Fraction(det)


def is_positive_definite(s: np.ndarray) -> bool:
    """Symmetric positive definiteness via exact LDL^T (or eigenvalues for floats)."""
    if not is_exact(s):
        if not np.allclose(s, s.T):
            return False
        return bool(s.shape[0] == 0 or np.linalg.eigvalsh(s).min() > 0)
    if not is_zero(s - s.T):
        return False
    r = np.array(s, dtype=object, copy=True)
    n = r.shape[0]
    for k in range(n):
        if r[k, k] <= 0:
            return False
        for i in range(k + 1, n):
            if r[i, k] != 0:
                r[i, k:] = r[i, k:] - (r[i, k] / r[k, k]) * r[k, k:]
    return True


def same_span(u: np.ndarray, v: np.ndarray) -> bool:
    """True when the column spaces of ``u`` and ``v`` coincide."""
    ru, rv = rank(u), rank(v)
    if ru != rv:
        return False
    return rank(np.concatenate([u, v], axis=1)) == ru


def contains_span(big: np.ndarray, small: np.ndarray) -> bool:
    """True when every column of ``small`` lies in the column space of ``big``."""
    if small.shape[1] == 0:
        return True
    return rank(np.concatenate([big, small], axis=1)) == rank(big)


def fmt(q) -> str:
    """``p/q`` string (``p`` for integers) for a rational."""
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
