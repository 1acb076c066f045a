# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled integer kernels.

Only the dense int64 matrix product lives here; everything exact in the
package reduces its hot contractions to it.
"""
import numpy as np

cdef extern from *:
    bint __builtin_mul_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_add_overflow(long long a, long long b, long long *res) nogil


def matmul_i64(const long long[:, ::1] a, const long long[:, ::1] b):
    """Return ``a @ b`` for int64 matrices, raising OverflowError on wraparound.

    Zero entries of ``a`` are skipped, which is what makes structure-constant
    tensors (mostly zeros) cheap.
    """
    cdef Py_ssize_t n = a.shape[0], kdim = a.shape[1], m = b.shape[1]
    if b.shape[0] != kdim:
        raise ValueError("inner dimensions differ: %d vs %d" % (kdim, b.shape[0]))
    out = np.zeros((n, m), dtype=np.int64)
    cdef long long[:, ::1] c = out
    cdef Py_ssize_t i, k, j
    cdef long long aik, prod, acc
    cdef bint bad = 0
    with nogil:
        for i in range(n):
            for k in range(kdim):
                aik = a[i, k]
                if aik == 0:
                    continue
                for j in range(m):
                    if b[k, j] == 0:
                        continue
                    if __builtin_mul_overflow(aik, b[k, j], &prod):
                        bad = 1
                        break
                    if __builtin_add_overflow(c[i, j], prod, &acc):
                        bad = 1
                        break
                    c[i, j] = acc
                if bad:
                    break
            if bad:
                break
    if bad:
        raise OverflowError("int64 overflow in matmul_i64")
    return out


from fractions import Fraction

cdef object _ZERO = Fraction(0)
cdef object _FRACTION = Fraction


cdef inline long long _gcd(long long a, long long b) nogil:
    if a < 0:
        a = -a
    while b:
        a, b = b, a % b
    return a


def split_fractions(list vals):
    """Common denominator and int64 numerators of a list of rationals.

    Returns ``None`` when the common denominator or a numerator does not fit
    in int64; the caller then falls back to Python integers.
    """
    cdef Py_ssize_t n = len(vals), i
    cdef long long den = 1, d, g, q, num, res
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    try:
        for i in range(n):
            v = vals[i]
            d = v._denominator if type(v) is _FRACTION else v.denominator
            if d == 1 or den % d == 0:
                continue
            g = _gcd(den, d)
            if __builtin_mul_overflow(den, d // g, &res):
                return None
            den = res
        for i in range(n):
            v = vals[i]
            if type(v) is _FRACTION:
                num = v._numerator
                d = v._denominator
            else:
                num = v.numerator
                d = v.denominator
            if num == 0:
                o[i] = 0
                continue
            q = den // d
            if __builtin_mul_overflow(num, q, &res):
                return None
            o[i] = res
    except OverflowError:
        return None
    return out, den


def join_fractions(const long long[::1] num, long long den):
    """List of reduced Fractions ``num[i] / den`` (``den > 0``)."""
    cdef Py_ssize_t n = num.shape[0], i
    cdef long long g, x
    out = [None] * n
    for i in range(n):
        x = num[i]
        if x == 0:
            out[i] = _ZERO
            continue
        g = _gcd(x, den)
        f = _FRACTION.__new__(_FRACTION)
        f._numerator = x // g
        f._denominator = den // g
        out[i] = f
    return out
