"""Parabolic subalgebras from subsets of simple roots, and their solvable parts.

A subset ``L`` of the simple roots (0-based indices, proper) gives the
characteristic element ``Z = sum_{i not in L} H^i``.  The integer
eigenvalues of ``ad_Z`` grade the algebra; the non-negative part is the
parabolic subalgebra ``q = m + a + n`` and ``s = a + n`` with the inner
product ``2 B_sigma`` on ``a`` and ``B_sigma`` on ``n`` is the attached
solvable metric Lie algebra.

Every ``s`` is expressed in a coordinate subset of one basis shared by all
subsets of the same algebra: ``2H^1..2H^r`` followed by the positive root
vectors.  (``2H^1`` is the coroot ``h`` for ``sl2``, so the rank-one frame is
the familiar ``{h, e}``.)  That basis spans ``s`` for the empty subset, so the embedding into
the ambient algebra is a coordinate inclusion.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import exact as ex
from .curvature import MetricLieAlgebra, is_standard_split
from .exact import ONE, ZERO, tdot
from .realization import Realization, build_realization, dual_basis
from .rootsystem import InputError, is_trivial_subset, root_system, spanned_roots, validate_cartan


@dataclass(frozen=True)
class SubsetSelection:
    """A proper subset of simple-root indices."""

    rank: int
    indices: frozenset

    def __post_init__(self):
        idx = frozenset(int(i) for i in self.indices)
        bad = sorted(i for i in idx if not 0 <= i < self.rank)
        if bad:
            raise InputError(f"simple-root indices out of range 0..{self.rank - 1}: {bad}")
        if len(idx) == self.rank:
            raise InputError("the subset must be proper (it contains every simple root)")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def parse(cls, rank: int, text: str) -> "SubsetSelection":
        """From a comma-separated index list; the empty string is the empty subset."""
        text = text.strip()
        try:
            idx = [int(t) for t in text.split(",") if t.strip()] if text else []
        except ValueError as exc:
            raise InputError(f"bad subset {text!r}: expected comma-separated integers") from exc
        return cls(rank, frozenset(idx))

    @property
    def complement(self) -> tuple:
        return tuple(i for i in range(self.rank) if i not in self.indices)

    def __str__(self):
        return "{" + ",".join(str(i) for i in sorted(self.indices)) + "}"

    def key(self):
        return sorted(self.indices)


def all_subsets(rank: int, include_full: bool = False) -> list:
    """Every subset of ``range(rank)`` as a sorted tuple, ordered by size then lexicographically."""
    from itertools import combinations

    top = rank + 1 if include_full else rank
    return [c for k in range(top) for c in combinations(range(rank), k)]


def _selection(r: Realization, subset) -> SubsetSelection:
    if isinstance(subset, SubsetSelection):
        if subset.rank != r.rank:
            raise InputError(f"subset is for rank {subset.rank}, realization has rank {r.rank}")
        return subset
    return SubsetSelection(r.rank, frozenset(subset))


# ----------------------------------------------------------------------------
# Characteristic element and gradation
# ----------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _dual(r: Realization) -> tuple:
    return tuple(dual_basis(r))


def characteristic_element(r: Realization, subset) -> np.ndarray:
    """``Z = sum_{i not in L} H^i`` as a vector of ``g``."""
    sel = _selection(r, subset)
    h = _dual(r)
    z = ex.qzeros(r.dimension)
    for i in sel.complement:
        z = z + h[i]
    return z


@dataclass(frozen=True)
class Gradation:
    layers: dict  # grade -> tuple of basis indices
    grades: tuple  # grade of each basis vector
    nu: int

    def indices(self, pred) -> tuple:
        return tuple(i for i, k in enumerate(self.grades) if pred(k))


def gradation(r: Realization, z: np.ndarray) -> Gradation:
    """Eigenspace decomposition of ``ad_Z``.

    Every basis vector must be an eigenvector with an integer eigenvalue,
    which holds exactly when ``Z`` lies in ``a`` and all ``alpha(Z)`` are
    integers.
    """
    adz = r.ad(z)
    diag = [adz[i, i] for i in range(r.dimension)]
    off = adz.copy()
    for i in range(r.dimension):
        off[i, i] = ZERO
    if not ex.is_zero(off):
        raise InputError("Z is not diagonal on the basis (it does not lie in a)")
    if any(Fraction(v).denominator != 1 for v in diag):
        raise InputError("ad_Z has a non-integral eigenvalue")
    grades = tuple(int(v) for v in diag)
    layers = {}
    for i, k in enumerate(grades):
        layers.setdefault(k, []).append(i)
    return Gradation({k: tuple(v) for k, v in sorted(layers.items())}, grades, max(grades))


def eigenspace(r: Realization, z: np.ndarray, value) -> np.ndarray:
    """Column basis of ``{X : [Z, X] = value X}`` by an exact null-space computation."""
    adz = r.ad(z)
    return ex.nullspace(adz - Fraction(value) * ex.qeye(r.dimension))


def layer_law_defects(r: Realization, grad: Gradation, limit: int = 5) -> list:
    """Pairs of basis vectors violating ``[g^i, g^j] in g^{i+j}``."""
    bad = []
    c = r.bracket
    for i in range(r.dimension):
        for j in range(i + 1, r.dimension):
            want = grad.grades[i] + grad.grades[j]
            for k in range(r.dimension):
                if c[i, j, k] != 0 and grad.grades[k] != want:
                    bad.append((i, j, k))
                    if len(bad) >= limit:
                        return bad
    return bad


# ----------------------------------------------------------------------------
# Langlands decomposition
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LanglandsDecomposition:
    subset: SubsetSelection
    z: np.ndarray
    grading: Gradation
    m_basis: np.ndarray  # columns in g
    a_basis: np.ndarray
    n_indices: tuple
    q_indices: tuple
    checks: dict = field(default_factory=dict)

    @property
    def dims(self) -> dict:
        return {"m": self.m_basis.shape[1], "a": self.a_basis.shape[1], "n": len(self.n_indices)}

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _columns(vectors, n) -> np.ndarray:
    if not vectors:
        return ex.qzeros((n, 0))
    return np.stack(list(vectors), axis=1)


def _span_bracket(r: Realization, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Columns ``[u_i, v_j]`` for all pairs."""
    n = r.dimension
    if u.shape[1] == 0 or v.shape[1] == 0:
        return ex.qzeros((n, 0))
    t = tdot(tdot(r.bracket, v, ([1], [0])), u, ([0], [0]))  # [k, j, i]
    return t.reshape(n, -1)


def langlands(r: Realization, subset) -> LanglandsDecomposition:
    """``q = m + a + n`` with every structural claim checked exactly (see ``checks``)."""
    sel = _selection(r, subset)
    n = r.dimension
    eye = ex.qeye(n)
    z = characteristic_element(r, sel)
    grad = gradation(r, z)
    h = _dual(r)
    a_basis = _columns([h[i] for i in sel.complement], n)

    # a as the joint kernel of the roots spanned by L, inside the a of the realization
    a_full = eye[:, list(r.a_indices)]
    inner = [ex.qarray([r.evaluate(b, a_full[:, j]) for j in range(a_full.shape[1])]) for b in spanned_roots(r.rsd, sel.indices)]
    if inner:
        kernel = ex.dot(a_full, ex.nullspace(np.stack(inner, axis=0)))
    else:
        kernel = a_full

    g0 = grad.indices(lambda k: k == 0)
    g0_basis = eye[:, list(g0)]
    # m: B_sigma-orthogonal complement of a inside g^0
    pair = ex.dot(ex.dot(a_basis.T, r.bsigma), g0_basis)
    m_basis = ex.dot(g0_basis, ex.nullspace(pair))
    n_idx = grad.indices(lambda k: k > 0)
    q_idx = grad.indices(lambda k: k >= 0)

    # q from roots: g_0 plus root spaces of positive roots and of the roots spanned by L
    span = spanned_roots(r.rsd, sel.indices)
    q_roots = tuple(
        k for k, lab in enumerate(r.labels) if lab.kind != "root" or lab.root.is_positive or lab.root in span
    )
    q_eig = _columns([], n)
    for k in range(0, grad.nu + 1):
        q_eig = np.concatenate([q_eig, eigenspace(r, z, k)], axis=1)
    q_basis = eye[:, list(q_idx)]
    n_basis = eye[:, list(n_idx)]
    zero = ex.qzeros((n, 0))

    checks = {
        "a_two_definitions_agree": ex.same_span(a_basis, kernel),
        "q_from_roots": tuple(q_roots) == tuple(q_idx),
        "q_from_eigenspaces": ex.same_span(q_eig, q_basis),
        "dim_q": m_basis.shape[1] + a_basis.shape[1] + len(n_idx) == len(q_idx),
        "a_abelian": ex.is_zero(_span_bracket(r, a_basis, a_basis)),
        "a_m_commute": ex.is_zero(_span_bracket(r, a_basis, m_basis)),
        "n_ideal_in_q": ex.contains_span(n_basis if n_idx else zero, _span_bracket(r, q_basis, n_basis)),
        "layer_law": not layer_law_defects(r, grad, 1),
    }
    return LanglandsDecomposition(sel, z, grad, m_basis, a_basis, tuple(n_idx), tuple(q_idx), checks)


# ----------------------------------------------------------------------------
# Attached solvable metric Lie algebras
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolvableFrame:
    """``s`` for the empty subset in the shared basis ``2H^1..2H^r``, positive root vectors."""

    realization: Realization
    algebra: MetricLieAlgebra
    vectors: np.ndarray  # column k is the k-th basis vector of s as a vector of g
    roots: tuple  # root of each n basis vector (None for the H^i)

    def to_g(self, coords: np.ndarray) -> np.ndarray:
        return ex.dot(self.vectors, coords.reshape(-1, 1)).ravel()

    def from_g(self, vec: np.ndarray) -> np.ndarray:
        """Coordinates of a vector of ``g`` lying in ``s``; raises otherwise."""
        return ex.solve(self.vectors, vec)


@lru_cache(maxsize=16)
def solvable_frame(r: Realization) -> SolvableFrame:
    rank = r.rank
    n = r.dimension
    h = _dual(r)
    pos = [k for k, lab in enumerate(r.labels) if lab.kind == "root" and lab.root.is_positive]
    pos.sort(key=lambda k: (r.rsd.index(r.labels[k].root), r.labels[k].copy))
    eye = ex.qeye(n)
    vectors = np.concatenate([_columns([2 * v for v in h], n), eye[:, pos]], axis=1)
    d = vectors.shape[1]

    # coordinates of a g-vector known to lie in s: a-part through the H^i, root part read off
    a = list(r.a_indices)
    hinv = ex.inverse(vectors[np.ix_(a, list(range(rank)))])
    proj = ex.qzeros((d, n))
    proj[np.ix_(list(range(rank)), a)] = hinv
    for j, k in enumerate(pos):
        proj[rank + j, k] = ONE
    images = tdot(tdot(r.bracket, vectors, ([1], [0])), vectors, ([0], [0])).transpose(2, 1, 0)
    coords = tdot(images, proj, ([2], [1]))
    if not ex.is_zero(tdot(coords, vectors, ([2], [1])) - images):
        raise ArithmeticError("a + n is not closed under the bracket")

    bs = ex.dot(ex.dot(vectors.T, r.bsigma), vectors)
    gram = bs.copy()
    gram[:rank, :rank] = bs[:rank, :rank] * 2
    if not ex.is_zero(gram[:rank, rank:]):
        raise ArithmeticError("a and n are not B_sigma-orthogonal")
    labels = tuple(f"2H{i}" for i in range(rank)) + tuple(str(r.labels[k]) for k in pos)
    alg = MetricLieAlgebra(coords, gram, tuple(range(rank)), tuple(range(rank, d)), labels)
    roots = (None,) * rank + tuple(r.labels[k].root for k in pos)
    return SolvableFrame(r, alg, vectors, roots)


@dataclass(frozen=True, eq=False)
class AttachedSolvmanifold:
    algebra: MetricLieAlgebra
    embedding: tuple  # indices into the frame (the empty-subset algebra)
    subset: SubsetSelection
    frame: SolvableFrame

    @property
    def realization(self) -> Realization:
        return self.frame.realization

    @property
    def ambient(self) -> MetricLieAlgebra:
        return self.frame.algebra

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def to_g(self, coords: np.ndarray) -> np.ndarray:
        full = self.frame.algebra.zeros(self.frame.algebra.dim)
        full[list(self.embedding)] = coords
        return self.frame.to_g(full)

    def n_roots(self) -> tuple:
        return tuple(self.frame.roots[self.embedding[k]] for k in self.algebra.n_indices)


def attached_solvmanifold(r: Realization, subset) -> AttachedSolvmanifold:
    """``s = a + n`` for the subset, with ``<,> = 2 B_sigma`` on ``a`` and ``B_sigma`` on ``n``."""
    sel = _selection(r, subset)
    frame = solvable_frame(r)
    z = characteristic_element(r, sel)
    rank = r.rank
    n_part = [k for k in range(rank, frame.algebra.dim) if r.evaluate(frame.roots[k], z) > 0]
    emb = tuple(sel.complement) + tuple(n_part)
    k = len(sel.complement)
    sub = frame.algebra.restrict(emb)
    alg = MetricLieAlgebra(sub.bracket, sub.gram, tuple(range(k)), tuple(range(k, len(emb))), sub.labels)
    return AttachedSolvmanifold(alg, emb, sel, frame)


def iwasawa_type_check(s: AttachedSolvmanifold) -> dict:
    """Standard-split flags, plus positivity of ``ad_{A0}`` on ``n`` for ``A0 = sum_{i not in L} H^i``."""
    m = s.algebra
    out = is_standard_split(m)
    a0 = m.zeros(m.dim)
    for i in m.a_indices:
        a0[i] = Fraction(1, 2)  # frame vectors are 2H^i
    n = list(m.n_indices)
    ad_n = m.ad(a0)[np.ix_(n, n)]
    sym = ex.dot(m.gram[np.ix_(n, n)], ad_n)
    out["a0_positive_on_n"] = ex.is_positive_definite(sym) if n else True
    out["a0_eigenvalues"] = tuple(ad_n[i, i] for i in range(len(n))) if ex.is_zero(ad_n - np.diag(np.diag(ad_n))) else None
    out["passed"] = all(out[k] for k in ("n_is_derived", "a_perp_n", "a_abelian", "ad_a_symmetric", "a0_positive_on_n"))
    return out


def nilpotency_degree(s: AttachedSolvmanifold) -> tuple:
    """``(computed, predicted)``: last non-zero step of the lower central series of ``n``,
    and the largest value of a highest root on ``Z``."""
    series = s.algebra.nilradical().lower_central_series()
    computed = sum(1 for d in series if d > 0)
    z = set(s.subset.complement)
    predicted = max(sum(c for i, c in enumerate(hr.coeffs) if i in z) for hr in s.realization.rsd.highest_roots)
    return computed, predicted


def rank_one_reduction(s: AttachedSolvmanifold, h0: np.ndarray) -> MetricLieAlgebra:
    """Metric subalgebra ``R H0 + n`` (floating when ``h0`` is)."""
    m = s.algebra if ex.is_exact(h0) else s.algebra.to_float()
    if ex.is_zero(h0, None if m.exact else 1e-12):
        raise InputError("H0 is zero; the rank one reduction is undefined")
    eye = ex.qeye(m.dim) if m.exact else np.eye(m.dim)
    basis = np.concatenate([h0.reshape(-1, 1), eye[:, list(m.n_indices)]], axis=1)
    return m.subalgebra(basis, a_count=1)


def sigma_trace(s: AttachedSolvmanifold, n_coords: tuple | None = None) -> np.ndarray:
    """``(1/2) sum_ij K_ij [sigma b_i, b_j]`` over the given ``n`` basis vectors, as a vector of ``g``.

    ``K`` is the inverse Gram of those vectors.  With the full ``n`` this is
    the mean curvature vector of ``s``.
    """
    r = s.realization
    idx = list(s.algebra.n_indices if n_coords is None else n_coords)
    if not idx:
        return ex.qzeros(r.dimension)
    vecs = np.stack([s.to_g(s.algebra.basis_vector(k)) for k in idx], axis=1)
    k = ex.inverse(s.algebra.gram[np.ix_(idx, idx)])
    sv = ex.dot(r.involution, vecs)
    # sum_ij K_ij [sv_i, v_j]
    br = tdot(tdot(r.bracket, vecs, ([1], [0])), sv, ([0], [0]))  # [c, j, i]
    return tdot(br, k, ([2, 1], [0, 1])) / 2


def mean_curvature_from_sigma(s: AttachedSolvmanifold) -> np.ndarray:
    """Mean curvature vector through ``sigma``, in coordinates of the empty-subset frame."""
    return s.frame.from_g(sigma_trace(s))


def complement_trace(s: AttachedSolvmanifold) -> np.ndarray:
    """The same trace over root vectors of the frame with ``beta > 0`` and ``beta(Z) = 0``,
    in frame coordinates."""
    frame = s.frame
    emb = set(s.embedding)
    rest = [k for k in frame.algebra.n_indices if k not in emb]
    if not rest:
        return frame.algebra.zeros(frame.algebra.dim)
    amb = AttachedSolvmanifold(frame.algebra, tuple(range(frame.algebra.dim)), s.subset, frame)
    return frame.from_g(sigma_trace(amb, tuple(rest)))


def normal_a_component(s: AttachedSolvmanifold, vec: np.ndarray) -> np.ndarray:
    """Component of a frame vector in ``a_empty`` orthogonal to ``a`` of ``s``."""
    g = s.frame.algebra.gram
    rank = s.realization.rank
    keep = list(s.subset.complement)
    a_vec = vec.copy()
    a_vec[rank:] = ZERO if ex.is_exact(vec) else 0.0
    if not keep:
        return a_vec
    eye = ex.qeye(len(vec)) if ex.is_exact(vec) else np.eye(len(vec))
    basis = eye[:, keep]
    coef = ex.dot(ex.inverse(ex.dot(ex.dot(basis.T, g), basis)), ex.dot(basis.T, ex.dot(g, a_vec.reshape(-1, 1))))
    return a_vec - ex.dot(basis, coef).ravel()


def complementary_block_solvmanifold(r: Realization, subset) -> MetricLieAlgebra | None:
    """For a trivial subset of a builtin algebra, ``s`` of the empty subset of the complementary block.

    Returns ``None`` when the subset is not trivial or the realization is not
    builtin.
    """
    sel = _selection(r, subset)
    if r.form not in ("split", "complexified") or not is_trivial_subset(r.rsd.cartan, sel.indices):
        return None
    keep = list(sel.complement)
    cart = r.rsd.cartan.as_array()[np.ix_(keep, keep)]
    sub_r = build_realization(root_system(validate_cartan(cart.tolist())), r.form, check=False)
    return solvable_frame(sub_r).algebra
