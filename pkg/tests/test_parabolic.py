from fractions import Fraction

import numpy as np
import pytest

from parasolv import curvature as cv
from parasolv import exact as ex
from parasolv.parabolic import (
    SubsetSelection,
    all_subsets,
    attached_solvmanifold,
    characteristic_element,
    complement_trace,
    complementary_block_solvmanifold,
    eigenspace,
    gradation,
    iwasawa_type_check,
    langlands,
    layer_law_defects,
    mean_curvature_from_sigma,
    nilpotency_degree,
    normal_a_component,
    rank_one_reduction,
    solvable_frame,
)
from parasolv.realization import dual_basis
from parasolv.rootsystem import InputError, Root

from conftest import realization

Q = Fraction


class TestSubsets:
    def test_proper_only(self):
        with pytest.raises(InputError):
            SubsetSelection(2, frozenset({0, 1}))
        with pytest.raises(InputError):
            SubsetSelection(2, frozenset({2}))
        with pytest.raises(InputError):
            SubsetSelection.parse(3, "0,x")

    def test_parse(self):
        assert SubsetSelection.parse(3, "").indices == frozenset()
        sel = SubsetSelection.parse(3, "2, 0")
        assert sel.complement == (1,) and str(sel) == "{0,2}"

    def test_ordering(self):
        assert all_subsets(3) == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
        assert all_subsets(2, include_full=True)[-1] == (0, 1)
        assert len(all_subsets(4)) == 15


class TestCharacteristicElement:
    def test_a1(self):
        z = characteristic_element(realization("A", 1), ())
        assert list(z) == [Q(1, 2), 0, 0]  # h/2

    def test_a2_first_root(self):
        r = realization("A", 2)
        z = characteristic_element(r, (0,))
        assert (z == dual_basis(r)[1]).all()
        assert r.evaluate(Root((1, 0)), z) == 0 and r.evaluate(Root((0, 1)), z) == 1
        g = gradation(r, z)
        assert g.nu == 1
        assert {k: len(v) for k, v in g.layers.items()} == {-1: 2, 0: 4, 1: 2}

    def test_nu(self):
        r = realization("A", 2)
        assert gradation(realization("A", 1), characteristic_element(realization("A", 1), ())).nu == 1
        g = gradation(r, characteristic_element(r, ()))
        assert g.nu == 2 and len(g.layers[2]) == 1
        g0 = gradation(r, ex.qzeros(r.dimension))
        assert g0.nu == 0 and list(g0.layers) == [0]

    def test_non_integral(self):
        r = realization("A", 2)
        with pytest.raises(InputError):
            gradation(r, dual_basis(r)[0] / 2)

    def test_not_in_a(self):
        r = realization("A", 1)
        with pytest.raises(InputError):
            gradation(r, ex.qarray([0, 1, 0]))

    @pytest.mark.parametrize("key", [("A", 3), ("B", 3), ("G", 2), ("C", 3)])
    def test_eigenspaces_match_layers(self, key):
        r = realization(*key)
        for sub in all_subsets(r.rank):
            z = characteristic_element(r, sub)
            g = gradation(r, z)
            assert not layer_law_defects(r, g)
            for k, idx in g.layers.items():
                assert eigenspace(r, z, k).shape[1] == len(idx)


class TestLanglands:
    def test_a2_dims(self):
        r = realization("A", 2)
        assert langlands(r, (0,)).dims == {"m": 3, "a": 1, "n": 2}
        assert langlands(r, ()).dims == {"m": 0, "a": 2, "n": 3}

    def test_a1_complexified(self):
        d = langlands(realization("A", 1, form="complexified"), ()).dims
        assert d["m"] == 1 and d["n"] == 2

    @pytest.mark.parametrize("key", [("A", 3), ("B", 2), ("D", 4), ("G", 2)])
    def test_all_checks(self, key):
        r = realization(*key)
        for sub in all_subsets(r.rank):
            lang = langlands(r, sub)
            assert lang.ok, (sub, lang.checks)
            d = lang.dims
            assert d["m"] + d["a"] + 2 * d["n"] == r.dimension

    def test_complexified_checks(self):
        r = realization("A", 2, form="complexified")
        for sub in all_subsets(2):
            assert langlands(r, sub).ok


class TestAttached:
    def test_a1_frame(self):
        s = attached_solvmanifold(realization("A", 1), ())
        assert s.algebra.gram.tolist() == [[16, 0], [0, 4]]
        assert s.algebra.labels[0] == "2H0"

    def test_embedding(self):
        s = attached_solvmanifold(realization("A", 2), (0,))
        assert s.dim == 3 and s.embedding[0] == 1
        assert len(s.n_roots()) == 2

    def test_iwasawa(self):
        s = attached_solvmanifold(realization("A", 2), ())
        iw = iwasawa_type_check(s)
        assert iw["passed"] and iw["a0_eigenvalues"] == (1, 1, 2)
        iw = iwasawa_type_check(attached_solvmanifold(realization("A", 2), (0,)))
        assert iw["passed"] and iw["a0_eigenvalues"] == (1, 1)

    @pytest.mark.parametrize(
        "key,sub,expect",
        [(("A", 2), (), (2, 2)), (("A", 2), (0,), (1, 1)), (("G", 2), (), (5, 5)), (("B", 3), (1,), (3, 3))],
    )
    def test_nilpotency(self, key, sub, expect):
        assert nilpotency_degree(attached_solvmanifold(realization(*key), sub)) == expect

    def test_rank_one(self):
        s = attached_solvmanifold(realization("A", 1), ())
        red = rank_one_reduction(s, cv.mean_curvature(s.algebra))
        assert red.dim == 2
        s = attached_solvmanifold(realization("A", 2), ())
        red = rank_one_reduction(s, cv.mean_curvature(s.algebra))
        assert s.dim == 5 and red.dim == 4
        rep = cv.einstein_check(cv.ricci_besse(red), red.gram)
        assert rep.is_einstein and rep.constant == Q(-1, 4)

    def test_rank_one_zero(self):
        s = attached_solvmanifold(realization("A", 1), ())
        with pytest.raises(InputError):
            rank_one_reduction(s, ex.qzeros(2))

    def test_rank_one_float(self):
        s = attached_solvmanifold(realization("B", 2), (0,))
        red = rank_one_reduction(s, ex.to_float(cv.mean_curvature(s.algebra)))
        assert not red.exact
        rep = cv.einstein_check(cv.ricci_besse(red), red.gram, 1e-9)
        assert rep.is_einstein and abs(rep.constant + 0.25) < 1e-12


@pytest.mark.parametrize("key", [("A", 3), ("B", 3), ("C", 3), ("G", 2)])
def test_mean_curvature_routes(key):
    r = realization(*key)
    for sub in all_subsets(r.rank):
        s = attached_solvmanifold(r, sub)
        sig = mean_curvature_from_sigma(s)
        assert ex.is_zero(sig[r.rank :])
        assert ex.is_zero(normal_a_component(s, sig))
        frame = s.ambient.zeros(s.ambient.dim)
        frame[list(s.embedding)] = cv.mean_curvature(s.algebra)
        assert (frame == sig).all()


def test_complement_trace_empty_for_empty_subset():
    s = attached_solvmanifold(realization("B", 2), ())
    assert ex.is_zero(complement_trace(s))


def test_complement_trace_adds_up():
    # H0 of the empty subset splits into the part over s and the part over beta(Z) = 0
    r = realization("A", 3)
    amb = solvable_frame(r).algebra
    for sub in all_subsets(3)[1:]:
        s = attached_solvmanifold(r, sub)
        assert (mean_curvature_from_sigma(s) + complement_trace(s) == cv.mean_curvature(amb)).all()


@pytest.mark.parametrize("types,sub", [((("A", 1), ("A", 1)), (0,)), ((("A", 1), ("A", 2)), (0,)), ((("A", 1), ("G", 2)), (1, 2))])
def test_trivial_block(types, sub):
    r = realization(*types)
    s = attached_solvmanifold(r, sub)
    block = complementary_block_solvmanifold(r, sub)
    assert block is not None and block.dim == s.dim
    assert ex.is_zero(block.bracket - s.algebra.bracket) and ex.is_zero(block.gram - s.algebra.gram)


def test_nontrivial_has_no_block():
    assert complementary_block_solvmanifold(realization("A", 2), (0,)) is None
