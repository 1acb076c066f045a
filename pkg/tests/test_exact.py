from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parasolv import _pykernels
from parasolv import exact as ex

try:
    from parasolv import _kernels as compiled
except ImportError:  # pragma: no cover - extension not built
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def qmat(draw, rows, cols):
    return ex.qarray([[draw(fractions) for _ in range(cols)] for _ in range(rows)])


@st.composite
def matrix_pair(draw):
    n, k, m = draw(st.integers(1, 6)), draw(st.integers(1, 6)), draw(st.integers(1, 6))
    return qmat(draw, n, k), qmat(draw, k, m)


@st.composite
def square(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return qmat(draw, n, n)


def naive_dot(a, b):
    return np.array([[sum((a[i, k] * b[k, j] for k in range(a.shape[1])), Fraction(0)) for j in range(b.shape[1])] for i in range(a.shape[0])], dtype=object)


@settings(max_examples=60, deadline=None)
@given(matrix_pair())
def test_dot_matches_naive(pair):
    a, b = pair
    assert (ex.dot(a, b) == naive_dot(a, b)).all()


@settings(max_examples=30, deadline=None)
@given(matrix_pair())
def test_tdot_matches_tensordot_on_floats(pair):
    a, b = pair
    got = ex.to_float(ex.tdot(a, b, ([1], [0])))
    assert np.allclose(got, ex.to_float(a) @ ex.to_float(b))


@settings(max_examples=40, deadline=None)
@given(square())
def test_inverse_roundtrip(m):
    if ex.determinant(m) == 0:
        with pytest.raises(ex.SingularMatrixError):
            ex.inverse(m)
        return
    assert (ex.dot(m, ex.inverse(m)) == ex.qeye(m.shape[0])).all()


@settings(max_examples=40, deadline=None)
@given(square())
def test_rank_nullspace(m):
    null = ex.nullspace(m)
    assert ex.rank(m) + null.shape[1] == m.shape[1]
    assert ex.is_zero(ex.dot(m, null))


@settings(max_examples=40, deadline=None)
@given(square(4))
def test_positive_definite_matches_eigenvalues(m):
    s = ex.dot(m, m.T) + ex.qeye(m.shape[0]) * Fraction(1, 3)
    assert ex.is_positive_definite(s)
    assert not ex.is_positive_definite(-s)


@settings(max_examples=40, deadline=None)
@given(st.lists(fractions, min_size=1, max_size=30))
def test_integer_split_roundtrip(vals):
    a = ex.qarray(vals)
    num, den = ex.to_integer(a)
    assert (ex.from_integer(num, den) == a).all()


@settings(max_examples=40, deadline=None)
@given(st.lists(fractions, min_size=1, max_size=20), st.lists(fractions, min_size=1, max_size=20), fractions, fractions)
def test_lincomb(u, v, c, d):
    n = min(len(u), len(v))
    a, b = ex.qarray(u[:n]), ex.qarray(v[:n])
    assert (ex.lincomb((c, a), (d, b)) == c * a + d * b).all()


def test_huge_values_fall_back_to_python_ints():
    big = Fraction(2**70, 3)
    a = ex.qarray([[big, 1], [0, Fraction(1, 2**65)]])
    assert (ex.dot(a, a) == naive_dot(a, a)).all()
    assert (ex.lincomb((3, a), (-1, a)) == 2 * a).all()


def test_solve_and_inconsistent():
    a = ex.qarray([[1, 0], [0, 2], [1, 1]])
    x = ex.solve(a, ex.qarray([1, 4, 3]))
    assert list(x) == [1, 2]
    with pytest.raises(ValueError):
        ex.solve(a, ex.qarray([1, 4, 4]))


def test_fmt():
    assert ex.fmt(Fraction(-1, 4)) == "-1/4"
    assert ex.fmt(Fraction(3)) == "3"


class TestKernelParity:
    """The compiled and python kernels give identical answers."""

    @needs_compiled
    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**31))
    def test_matmul(self, n, k, m, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(-1000, 1000, (n, k)).astype(np.int64)
        b = rng.integers(-1000, 1000, (k, m)).astype(np.int64)
        assert (compiled.matmul_i64(a, b) == _pykernels.matmul_i64(a, b)).all()
        assert (compiled.matmul_i64(a, b) == a @ b).all()

    @pytest.mark.parametrize("kernel", ["compiled", "python"])
    def test_matmul_overflow_raises(self, kernel):
        if kernel == "compiled" and compiled is None:
            pytest.skip("compiled kernels not built")
        a = np.array([[2**40]], dtype=np.int64)
        module = compiled if kernel == "compiled" else _pykernels
        with pytest.raises(OverflowError):
            module.matmul_i64(a, a)

    def test_active_backend(self):
        a = np.array([[1, 2], [3, 4]], dtype=np.int64)
        assert (ex.backend_matmul()(a, a) == a @ a).all()
        assert ex.BACKEND in ("compiled", "python")

    @needs_compiled
    @settings(max_examples=40, deadline=None)
    @given(st.lists(fractions, min_size=0, max_size=40))
    def test_split_join(self, vals):
        c, p = compiled.split_fractions(vals), _pykernels.split_fractions(vals)
        if not vals:
            return
        assert c[1] == p[1] and (c[0] == p[0]).all()
        assert compiled.join_fractions(c[0], c[1]) == _pykernels.join_fractions(p[0], p[1]) == vals

    @needs_compiled
    def test_split_overflow_returns_none(self):
        assert compiled.split_fractions([Fraction(1, 2**62), Fraction(1, 3)]) is None
        assert _pykernels.split_fractions([Fraction(1, 2**62), Fraction(1, 3)]) is None

    @needs_compiled
    def test_mixed_int_entries(self):
        vals = [Fraction(1, 2), 3, Fraction(-5, 6)]
        num, den = compiled.split_fractions(vals)
        assert den == 6 and list(num) == [3, 18, -5]

    def test_backend_selected(self):
        assert ex.BACKEND in ("compiled", "python")
