from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parasolv import exact as ex
from parasolv import curvature as cv
from parasolv.parabolic import attached_solvmanifold, normal_a_component, solvable_frame
from parasolv.realization import root_vector
from parasolv.rootsystem import Root

from conftest import realization

Q = Fraction
H, E = 0, 1  # the A1 algebra has frame {h, e}


@pytest.fixture(scope="module")
def a1():
    return attached_solvmanifold(realization("A", 1), ()).algebra


def v(*coords):
    return ex.qarray(list(coords))


def metric(bracket_entries, gram, dim):
    c = ex.qzeros((dim, dim, dim))
    for (i, j, k), val in bracket_entries.items():
        c[i, j, k] = Q(val)
        c[j, i, k] = -Q(val)
    return c, ex.qarray(gram)


def heisenberg(gram=None):
    c, g = metric({(0, 1, 2): 1}, gram or np.eye(3, dtype=int).tolist(), 3)
    return cv.MetricLieAlgebra(c, g)


class TestA1Oracles:
    def test_frame(self, a1):
        assert a1.gram.tolist() == [[16, 0], [0, 4]]
        assert list(a1.br(v(1, 0), v(0, 1))) == [0, 2]

    def test_u_form(self, a1):
        assert list(cv.u_form(a1, v(0, 1), v(0, 1))) == [Q(1, 2), 0]
        assert list(cv.u_form(a1, v(1, 0), v(1, 0))) == [0, 0]
        assert list(cv.u_form(a1, v(1, 0), v(0, 1))) == [0, -1]

    def test_levi_civita(self, a1):
        assert list(cv.levi_civita(a1, v(1, 0), v(0, 1))) == [0, 0]
        assert list(cv.levi_civita(a1, v(0, 1), v(0, 1))) == [Q(1, 2), 0]
        h, e = v(1, 0), v(0, 1)
        assert a1.inner(cv.levi_civita(a1, e, h), e) + a1.inner(h, cv.levi_civita(a1, e, e)) == 0

    def test_riemann(self, a1):
        h, e = v(1, 0), v(0, 1)
        assert list(cv.riemann(a1, h, e, e)) == [-1, 0]
        assert ex.is_zero(cv.riemann(a1, e, e, h))
        bianchi = cv.riemann(a1, h, e, h) + cv.riemann(a1, e, h, h) + cv.riemann(a1, h, h, e)
        assert ex.is_zero(bianchi)

    @pytest.mark.parametrize("route", ["definition", "besse", "wolter"])
    def test_ricci(self, a1, route):
        ric = cv.ROUTES[route](a1).matrix
        assert ric.tolist() == [[-4, 0], [0, -1]]

    def test_besse_terms(self, a1):
        terms = cv.besse_terms(a1)
        assert [t[E, E] for t in terms] == [Q(-1, 2), 0, Q(1, 2), -1]
        assert [t[H, H] for t in terms] == [-2, -2, 0, 0]

    def test_mean_curvature(self, a1):
        assert list(cv.mean_curvature(a1)) == [Q(1, 8), 0]

    def test_einstein(self, a1):
        rep = cv.einstein_check(cv.ricci_besse(a1), a1.gram)
        assert rep.is_einstein and rep.constant == Q(-1, 4) and rep.residual == 0

    def test_float_mode(self, a1):
        f = a1.to_float()
        for fn in cv.ROUTES.values():
            assert np.allclose(fn(f).matrix, [[-4, 0], [0, -1]])
        rep = cv.einstein_check(cv.ricci_definition(f), f.gram)
        assert rep.is_einstein and abs(rep.constant + 0.25) < 1e-12


class TestNilpotent:
    def test_abelian_is_flat(self):
        c, g = metric({}, [[2, 1], [1, 3]], 2)
        m = cv.MetricLieAlgebra(c, g)
        assert ex.is_zero(cv.ricci_nilpotent(m).matrix)
        assert ex.is_zero(cv.ricci_besse(m).matrix)
        assert ex.is_zero(cv.mean_curvature(m))

    def test_rejects_non_nilpotent(self, a1):
        with pytest.raises(cv.PreconditionError):
            cv.ricci_nilpotent(a1)

    def test_a2_heisenberg(self):
        n = attached_solvmanifold(realization("A", 2), ()).algebra.nilradical()
        assert n.lower_central_series() == [3, 1, 0]
        assert (cv.ricci_nilpotent(n).matrix == cv.ricci_besse(n).matrix).all()
        assert ex.is_zero(n.killing) and ex.is_zero(cv.mean_curvature(n))

    def test_heisenberg_orthonormal(self):
        # classical values: Ric = diag(-1/2, -1/2, 1/2) for [X,Y] = Z orthonormal
        assert cv.ricci_nilpotent(heisenberg()).matrix.tolist() == [[Q(-1, 2), 0, 0], [0, Q(-1, 2), 0], [0, 0, Q(1, 2)]]


class TestWolterPreconditions:
    def test_needs_annotation(self):
        with pytest.raises(cv.PreconditionError):
            cv.ricci_wolter(heisenberg())

    def test_rejects_non_symmetric_ad(self, a1):
        c = a1.bracket.copy()
        c[0, 1, 0] = Q(1)  # [h, e] gains an h-component: n is no longer the derived algebra
        c[1, 0, 0] = Q(-1)
        with pytest.raises(cv.PreconditionError):
            cv.ricci_wolter(cv.MetricLieAlgebra(c, a1.gram, (0,), (1,)))


class TestEinsteinCheck:
    def test_negative_control(self):
        s = attached_solvmanifold(realization("A", 2), ()).algebra
        g = s.gram.copy()
        k = s.n_indices[0]
        g[k, k] *= 2
        bad = s.with_gram(g)
        assert not cv.einstein_check(cv.ricci_besse(bad), bad.gram).is_einstein
        assert not cv.einstein_check(cv.ricci_besse(bad.to_float()), bad.to_float().gram).is_einstein

    def test_scaling_covariance(self):
        s = attached_solvmanifold(realization("B", 2), (1,)).algebra
        scaled = s.with_gram(s.gram * 2)
        rep = cv.einstein_check(cv.ricci_besse(scaled), scaled.gram)
        assert rep.is_einstein and rep.constant == Q(-1, 8)

    def test_singular_gram(self):
        with pytest.raises(ValueError):
            cv.einstein_check(ex.qzeros((2, 2)), ex.qzeros((2, 2)))

    def test_empty(self):
        assert cv.einstein_check(ex.qzeros((0, 0)), ex.qzeros((0, 0))).is_einstein


# ----------------------------------------------------------------------------
# Identities on every basis, and random metrics
# ----------------------------------------------------------------------------

CASES = [(("A", 1), ()), (("A", 2), ()), (("A", 2), (0,)), (("B", 2), ()), (("G", 2), (1,))]


def case(key, sub, form="split"):
    return attached_solvmanifold(realization(*key, form=form), sub)


@pytest.mark.parametrize("key,sub", CASES)
def test_connection_identities(key, sub):
    m = case(key, sub).algebra
    nab = cv.connection_tensor(m)
    # torsion free
    assert ex.is_zero(nab - nab.transpose(1, 0, 2) - m.bracket)
    # metric: <nabla_z x, y> + <x, nabla_z y> = 0
    low = ex.tdot(nab, m.gram, ([2], [0]))  # low[z,x,y]
    assert ex.is_zero(low + low.transpose(0, 2, 1))


@pytest.mark.parametrize("key,sub", CASES)
def test_curvature_symmetries(key, sub):
    m = case(key, sub).algebra
    r = cv.riemann_tensor(m)
    assert ex.is_zero(r + r.transpose(1, 0, 2, 3))
    low = ex.tdot(r, m.gram, ([3], [0]))  # <R(x,y)z, w>
    assert ex.is_zero(low + low.transpose(0, 1, 3, 2))
    assert ex.is_zero(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3))


def random_gram(draw, n):
    lower = [[draw(st.integers(-2, 2)) if j < i else (draw(st.integers(1, 3)) if j == i else 0) for j in range(n)] for i in range(n)]
    lq = ex.qarray(lower)
    return ex.dot(lq, lq.T)


@st.composite
def random_metric(draw, pool=((("A", 2), ()), (("B", 2), ()), (("A", 2), (0,)), (("G", 2), (0,)))):
    key, sub = draw(st.sampled_from(pool))
    m = case(key, sub).algebra
    return m.with_gram(random_gram(draw, m.dim))


@settings(max_examples=15, deadline=None)
@given(random_metric())
def test_definition_equals_besse_for_any_metric(m):
    d = cv.ricci_definition(m).matrix
    assert (d == cv.ricci_besse(m).matrix).all()
    f = m.to_float()
    assert np.allclose(cv.ricci_definition(f).matrix, ex.to_float(d), rtol=0, atol=1e-9 * max(1.0, float(ex.max_abs(d))))


@settings(max_examples=15, deadline=None)
@given(random_metric())
def test_mean_curvature_traces_ad(m):
    # <H0, X> = tr ad_X
    h0 = cv.mean_curvature(m)
    for i in range(m.dim):
        x = m.basis_vector(i)
        assert m.inner(h0, x) == sum(m.ad(x)[k, k] for k in range(m.dim))


@st.composite
def random_nilpotent(draw):
    key = draw(st.sampled_from([("A", 2), ("A", 3), ("B", 2), ("G", 2)]))
    n = case(key, ()).algebra.nilradical()
    return n.with_gram(random_gram(draw, n.dim))


@settings(max_examples=15, deadline=None)
@given(random_nilpotent())
def test_nilpotent_equals_besse_for_any_metric(n):
    assert (cv.ricci_nilpotent(n).matrix == cv.ricci_besse(n).matrix).all()


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_abelian_any_metric_is_flat(dim, seed):
    rng = np.random.default_rng(seed)
    lq = ex.qarray(np.tril(rng.integers(-3, 4, (dim, dim)), -1) + np.eye(dim, dtype=int) * 2)
    m = cv.MetricLieAlgebra(ex.qzeros((dim, dim, dim)), ex.dot(lq, lq.T))
    for route in ("definition", "besse"):
        assert ex.is_zero(cv.ROUTES[route](m).matrix)


# ----------------------------------------------------------------------------
# Submanifolds
# ----------------------------------------------------------------------------


def sff(key, sub, form="split"):
    s = case(key, sub, form)
    return s, cv.second_fundamental_form(s.algebra, s.ambient, s.embedding)


def test_h_vanishes_on_a():
    s, rep = sff(("B", 3), (0,))
    for i in s.algebra.a_indices:
        assert ex.is_zero(rep.h_tensor[i, i])


def test_h_on_unit_root_vector():
    r = realization("A", 2)
    s, rep = sff(("A", 2), (0,))
    alpha2 = Root((0, 1))
    k = s.n_roots().index(alpha2)
    pos = s.algebra.n_indices[k]
    unit_h = rep.h_tensor[pos, pos] / s.algebra.gram[pos, pos]
    expect = normal_a_component(s, s.frame.from_g(root_vector(r, alpha2))) / 2
    assert (unit_h == expect).all()
    assert not ex.is_zero(unit_h)
    assert pos in rep.witnesses


def test_h_zero_for_empty_subset():
    _, rep = sff(("G", 2), ())
    assert rep.is_totally_geodesic and rep.is_minimal and rep.witnesses == ()


@pytest.mark.parametrize("key,sub", [(("A", 2), (0,)), (("B", 3), (1,)), (("C", 3), (0, 2))])
def test_h_normal_and_mean_curvature(key, sub):
    s, rep = sff(key, sub)
    assert rep.residuals["normal"] == 0
    amb, emb = s.ambient, list(s.embedding)
    # trace of h over the sub recomputed as <H, N> = sum_ij K_ij <[N, e_i], e_j>, K the inverse sub Gram
    basis = ex.qeye(amb.dim)[:, emb]
    k_inv = ex.inverse(s.algebra.gram)
    normals = ex.nullspace(ex.dot(basis.T, amb.gram))
    assert normals.shape[1] == amb.dim - len(emb)
    for k in range(normals.shape[1]):
        nvec = normals[:, k]
        total = sum(
            k_inv[i, j] * amb.inner(amb.br(nvec, basis[:, i]), basis[:, j])
            for i in range(len(emb))
            for j in range(len(emb))
        )
        assert total == amb.inner(rep.mean_curvature, nvec)
    assert rep.is_minimal and not rep.is_totally_geodesic


def test_ricci_restriction_a2():
    s = case(("A", 2), (0,))
    ok, res = cv.ricci_restriction_check(s.algebra, s.ambient, s.embedding)
    assert ok and res == 0
    ric = cv.ricci_besse(s.algebra).matrix
    a = list(s.algebra.a_indices)
    assert (ric[np.ix_(a, a)] == -s.algebra.gram[np.ix_(a, a)] / 4).all()


def test_restriction_trivial_for_empty_subset():
    s = case(("A", 2), ())
    assert cv.ricci_restriction_check(s.algebra, s.ambient, s.embedding)[0]


def test_embedding_errors():
    s = case(("A", 2), (0,))
    with pytest.raises(ValueError):
        cv.second_fundamental_form(s.algebra, s.ambient, s.embedding[:-1])
    with pytest.raises(ValueError):
        cv.second_fundamental_form(s.algebra, s.ambient, (0,) * s.algebra.dim)
    bad = s.algebra.with_gram(s.algebra.gram * 2)
    with pytest.raises(ValueError):
        cv.second_fundamental_form(bad, s.ambient, s.embedding)


def test_float_frame_keeps_blocks():
    s = case(("C", 3), (1,))
    f = s.algebra.to_float()
    exact = cv.ricci_wolter(s.algebra).matrix
    assert np.allclose(cv.ricci_wolter(f).matrix, ex.to_float(exact), atol=1e-12)
