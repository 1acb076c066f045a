"""Pure numpy stand-ins for the compiled kernels in ``_kernels.pyx``."""
import numpy as np

_LIMIT = 2**62


def matmul_i64(a, b):
    """Return ``a @ b`` for int64 matrices, raising OverflowError on wraparound.

    numpy integer matmul wraps silently, so we only use it when a magnitude
    bound rules overflow out.
    """
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimensions differ: {a.shape[1]} vs {b.shape[0]}")
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    bound = int(np.abs(a).max()) * int(np.abs(b).max()) * a.shape[1]
    if bound >= _LIMIT:
        raise OverflowError("int64 overflow possible in matmul_i64")
    return a @ b


def split_fractions(vals):
    """Common denominator and int64 numerators, or ``None`` if they overflow int64."""
    from math import lcm

    if not vals:
        return np.zeros(0, dtype=np.int64), 1
    den = lcm(*{v.denominator for v in vals})
    nums = [v.numerator * (den // v.denominator) for v in vals]
    if den >= 2**63 or max(map(abs, nums)) >= 2**63:
        return None
    return np.array(nums, dtype=np.int64), den


def join_fractions(num, den):
    from fractions import Fraction

    zero = Fraction(0)
    return [zero if v == 0 else Fraction(v, den) for v in np.asarray(num).tolist()]
