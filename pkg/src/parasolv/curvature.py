"""Curvature of left-invariant metrics on Lie groups, from the metric Lie algebra.

Everything is computed in a fixed raw basis ``b_i`` with Gram matrix ``G``.
Sums over an orthonormal basis ``E_i`` are rewritten as contractions against
``K = G^{-1}`` (``sum_i f(E_i, E_i) = sum_ij K_ij f(b_i, b_j)``), so exact
mode never takes square roots.  Floating mode first moves to a Gram-Schmidt
frame, where ``K`` is the identity and the formulas are used as written.

Sign convention: ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`` and
``ric(X,Y) = tr(Z -> R(Z,X)Y)``, which makes the real hyperbolic plane have
``ric = -<,>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import exact as ex
from .exact import tdot

DEFAULT_TOL = 1e-9
LARGE_DIM_TOL = 1e-8


class PreconditionError(ValueError):
    """An operation was applied outside its domain (e.g. non-nilpotent input)."""


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    bracket: np.ndarray  # C[i,j,k]: [b_i, b_j] = sum_k C[i,j,k] b_k
    gram: np.ndarray
    a_indices: tuple | None = None
    n_indices: tuple | None = None
    labels: tuple = ()

    def __post_init__(self):
        n = self.gram.shape[0]
        if self.bracket.shape != (n, n, n) or self.gram.shape != (n, n):
            raise ValueError(f"bracket {self.bracket.shape} and gram {self.gram.shape} disagree")
        if (self.a_indices is None) != (self.n_indices is None):
            raise ValueError("give both a_indices and n_indices or neither")

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def exact(self) -> bool:
        return ex.is_exact(self.gram)

    @property
    def scalar_mode(self) -> str:
        return "exact" if self.exact else "float"

    @property
    def split(self) -> bool:
        return self.a_indices is not None

    @cached_property
    def gram_inv(self) -> np.ndarray:
        return ex.inverse(self.gram)

    @cached_property
    def killing(self) -> np.ndarray:
        """Killing form of this algebra (not of any ambient one)."""
        return tdot(self.bracket, self.bracket, ([1, 2], [2, 1]))

    def zeros(self, shape):
        return ex.zeros_like_mode(shape, self.exact)

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.zeros(self.dim)
        v[i] = 1 if not self.exact else Fraction(1)
        return v

    def br(self, x, y) -> np.ndarray:
        return tdot(tdot(self.bracket, y, ([1], [0])), x, ([0], [0]))

    def ad(self, x) -> np.ndarray:
        """Matrix of ``ad_x`` (column j is ``[x, b_j]``)."""
        return tdot(x, self.bracket, ([0], [0])).T

    def inner(self, x, y):
        return ex.dot(ex.dot(np.asarray(x).reshape(1, -1), self.gram), np.asarray(y).reshape(-1, 1))[0, 0]

    def to_float(self) -> "MetricLieAlgebra":
        return MetricLieAlgebra(ex.to_float(self.bracket), ex.to_float(self.gram), self.a_indices, self.n_indices, self.labels)

    def with_gram(self, gram) -> "MetricLieAlgebra":
        return MetricLieAlgebra(self.bracket, gram, self.a_indices, self.n_indices, self.labels)

    def restrict(self, indices, split: bool = False) -> "MetricLieAlgebra":
        """Coordinate subalgebra on ``indices``; raises if it is not closed under the bracket."""
        idx = list(indices)
        others = [k for k in range(self.dim) if k not in set(idx)]
        sub = self.bracket[np.ix_(idx, idx, others)]
        if not ex.is_zero(sub, None if self.exact else 1e-12):
            raise PreconditionError("coordinate subspace is not a subalgebra")
        a = n = None
        if split and self.split:
            pos = {k: p for p, k in enumerate(idx)}
            a = tuple(pos[k] for k in self.a_indices if k in pos)
            n = tuple(pos[k] for k in self.n_indices if k in pos)
        labels = tuple(self.labels[k] for k in idx) if self.labels else ()
        return MetricLieAlgebra(self.bracket[np.ix_(idx, idx, idx)], self.gram[np.ix_(idx, idx)], a, n, labels)

    def nilradical(self) -> "MetricLieAlgebra":
        if not self.split:
            raise PreconditionError("algebra carries no a/n annotation")
        return self.restrict(self.n_indices)

    def subalgebra(self, basis: np.ndarray, a_count: int | None = None) -> "MetricLieAlgebra":
        """Metric subalgebra spanned by the columns of ``basis`` (restricted bracket and Gram).

        The first ``a_count`` columns are annotated as ``a``, the rest as ``n``.
        """
        gram = ex.dot(ex.dot(basis.T, self.gram), basis)
        # coordinates of w in the span: solve (V^T G V) c = V^T G w
        proj = ex.dot(ex.inverse(gram), ex.dot(basis.T, self.gram))
        k = basis.shape[1]
        images = tdot(tdot(self.bracket, basis, ([1], [0])), basis, ([0], [0]))  # [k', j, i] -> coords
        images = images.transpose(2, 1, 0)  # [i, j, :] = [v_i, v_j]
        coords = tdot(images, proj, ([2], [1]))
        back = tdot(coords, basis, ([2], [1]))
        if not ex.is_zero(back - images, None if self.exact else 1e-9):
            raise PreconditionError("span is not closed under the bracket")
        a = n = None
        if a_count is not None:
            a, n = tuple(range(a_count)), tuple(range(a_count, k))
        return MetricLieAlgebra(coords, gram, a, n)

    def lower_central_series(self) -> list:
        """Dimensions of ``g^(1) = g, g^(k+1) = [g, g^(k)]`` until the series stabilises."""
        n = self.dim
        span = ex.qeye(n) if self.exact else np.eye(n)
        dims = [n]
        while span.shape[1]:
            imgs = tdot(self.bracket, span, ([1], [0]))  # imgs[i, k, j] = [b_i, v_j]_k
            flat = imgs.transpose(1, 0, 2).reshape(n, -1)
            basis = ex.column_basis(flat) if self.exact else _float_colbasis(flat)
            if basis.shape[1] == span.shape[1]:
                break
            span = basis
            dims.append(span.shape[1])
        return dims

    def is_nilpotent(self) -> bool:
        return self.lower_central_series()[-1] == 0 or self.dim == 0


def _float_colbasis(m, tol=1e-10):
    if m.size == 0:
        return m[:, :0]
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int((s > tol * max(1.0, s[0] if s.size else 0)).sum())
    return u[:, :r]


@dataclass(frozen=True)
class RicciTensor:
    matrix: np.ndarray
    route: str

    def __post_init__(self):
        m = self.matrix
        if not ex.is_zero(m - m.T, None if ex.is_exact(m) else 1e-8 * max(1.0, float(np.max(np.abs(m), initial=0)))):
            raise ArithmeticError(f"{self.route} Ricci tensor is not symmetric")


@dataclass(frozen=True)
class EinsteinReport:
    is_einstein: bool
    constant: object
    residual: object


@dataclass(frozen=True)
class SubmanifoldReport:
    mean_curvature: np.ndarray
    is_minimal: bool
    is_totally_geodesic: bool
    ricci_restriction_ok: bool | None
    h_tensor: np.ndarray = field(repr=False)
    residuals: dict = field(default_factory=dict)
    witnesses: tuple = ()  # sub-basis indices i with h(b_i, b_i) != 0


# ----------------------------------------------------------------------------
# Floating frames
# ----------------------------------------------------------------------------


def gram_schmidt(gram: np.ndarray) -> np.ndarray:
    """``T`` with ``T^T G T = I``; column ``j`` is the ``j``-th Gram-Schmidt vector."""
    n = gram.shape[0]
    t = np.zeros((n, n))
    for j in range(n):
        v = np.zeros(n)
        v[j] = 1.0
        for k in range(j):
            v -= (t[:, k] @ gram @ v) * t[:, k]
        for k in range(j):  # second pass for stability
            v -= (t[:, k] @ gram @ v) * t[:, k]
        t[:, j] = v / np.sqrt(v @ gram @ v)
    return t


def orthonormal_frame(m: MetricLieAlgebra):
    """Floating algebra re-expressed in a Gram-Schmidt frame, plus the frame ``T``."""
    t = gram_schmidt(ex.to_float(m.gram))
    tinv = np.linalg.inv(t)
    c = ex.to_float(m.bracket)
    c2 = np.tensordot(t, c, ([0], [0]))  # [a, j, k]
    c2 = np.tensordot(c2, t, ([1], [0]))  # [a, k, b]
    c2 = np.tensordot(c2, tinv, ([1], [1]))  # [a, b, c]
    return MetricLieAlgebra(c2, np.eye(m.dim), m.a_indices, m.n_indices, m.labels), t


def _frame_back(ric_on: np.ndarray, t: np.ndarray) -> np.ndarray:
    tinv = np.linalg.inv(t)
    return tinv.T @ ric_on @ tinv


def _framed(fn):
    """Run ``fn`` in an orthonormal frame when ``m`` is floating, then map back."""

    def wrapper(m: MetricLieAlgebra, *args, **kwargs):
        if m.exact or m.dim == 0:
            return fn(m, *args, **kwargs)
        if np.array_equal(m.gram, np.eye(m.dim)):
            return fn(m, *args, **kwargs)
        on, t = orthonormal_frame(m)
        res = fn(on, *args, **kwargs)
        return RicciTensor(_frame_back(res.matrix, t), res.route)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ----------------------------------------------------------------------------
# Connection and curvature
# ----------------------------------------------------------------------------


def _lowered(m: MetricLieAlgebra) -> np.ndarray:
    """``L[i,j,l] = <[b_i, b_j], b_l>``."""
    return tdot(m.bracket, m.gram, ([2], [0]))


def u_tensor(m: MetricLieAlgebra) -> np.ndarray:
    """``U[x,y,:]`` = coordinates of ``U(b_x, b_y)``."""
    low = _lowered(m)
    half = Fraction(1, 2)
    s = ex.lincomb((half, low.transpose(1, 2, 0)), (half, low.transpose(2, 1, 0)))  # s[x,y,z] = <U(b_x,b_y), b_z>
    return tdot(s, m.gram_inv, ([2], [0]))


def u_form(m: MetricLieAlgebra, x, y) -> np.ndarray:
    """``U(X,Y)`` defined by ``2<U(X,Y),Z> = <[Z,X],Y> + <X,[Z,Y]>``."""
    u = u_tensor(m)
    return tdot(tdot(u, y, ([1], [0])), x, ([0], [0]))


def connection_tensor(m: MetricLieAlgebra) -> np.ndarray:
    """``nabla[x,y,:]`` = coordinates of ``nabla_{b_x} b_y = [b_x,b_y]/2 + U(b_x,b_y)``."""
    return ex.lincomb((Fraction(1, 2), m.bracket), (1, u_tensor(m)))


def levi_civita(m: MetricLieAlgebra, x, y) -> np.ndarray:
    nab = connection_tensor(m)
    return tdot(tdot(nab, y, ([1], [0])), x, ([0], [0]))


def riemann_tensor(m: MetricLieAlgebra) -> np.ndarray:
    """``R[x,y,z,:]`` = coordinates of ``R(b_x,b_y)b_z``."""
    nab = connection_tensor(m)
    q = tdot(nab, nab, ([2], [1]))  # q[y,z,x,w] = sum_u nab[y,z,u] nab[x,u,w]
    p = q.transpose(2, 0, 1, 3)  # p[x,y,z,w]: nabla_x nabla_y b_z
    t = tdot(m.bracket, nab, ([2], [0]))  # nabla_[x,y] b_z
    return ex.lincomb((1, p), (-1, p.transpose(1, 0, 2, 3)), (-1, t))


def riemann(m: MetricLieAlgebra, x, y, z) -> np.ndarray:
    """``R(X,Y)Z``."""
    r = riemann_tensor(m)
    out = tdot(r, z, ([2], [0]))
    out = tdot(out, y, ([1], [0]))
    return tdot(out, x, ([0], [0]))


@_framed
def ricci_definition(m: MetricLieAlgebra) -> RicciTensor:
    """Ricci tensor as the trace ``ric(X,Y) = sum_i <R(E_i,X)Y, E_i>`` of the full curvature tensor."""
    if m.dim == 0:
        return RicciTensor(m.zeros((0, 0)), "definition")
    r = riemann_tensor(m)
    n = m.dim
    ric = ex.lincomb(*((1, r[i, :, :, i]) for i in range(n)))
    return RicciTensor(ric, "definition")


def mean_curvature(m: MetricLieAlgebra) -> np.ndarray:
    """``H_0 = sum_i U(E_i, E_i)``; satisfies ``<H_0, X> = tr ad_X``."""
    if m.dim == 0:
        return m.zeros(0)
    return tdot(m.gram_inv, u_tensor(m), ([0, 1], [0, 1]))


def mean_curvature_residual(m: MetricLieAlgebra, h0=None):
    """Largest ``n``-component of ``H_0`` (zero iff ``H_0`` lies in ``a``)."""
    if not m.split:
        raise PreconditionError("mean curvature containment needs an a/n annotation")
    h0 = mean_curvature(m) if h0 is None else h0
    return ex.max_abs(h0[list(m.n_indices)])


def besse_terms(m: MetricLieAlgebra) -> tuple:
    """The four summands of the Besse trace formula, each a matrix over the raw basis:

    ``-1/2 sum <[X,E_i],[Y,E_i]>``, ``-1/2 B(X,Y)``,
    ``1/4 sum <[E_i,E_j],X><[E_i,E_j],Y>`` and ``-<U(X,Y),H_0>``.
    """
    c, k = m.bracket, m.gram_inv
    low = _lowered(m)
    ck = tdot(c, k, ([1], [0]))  # ck[x,k,j] = sum_i C[x,i,k] K[i,j]
    t1 = tdot(ck, low, ([1, 2], [2, 1]))  # sum_ij K_ij <[x,b_i],[y,b_j]>
    w = tdot(k, tdot(k, low, ([1], [0])), ([1], [1])).transpose(1, 0, 2)  # w[i,j,y]
    t3 = tdot(low, w, ([0, 1], [0, 1]))
    u = u_tensor(m)
    h0 = tdot(k, u, ([0, 1], [0, 1]))
    t4 = tdot(u, ex.dot(m.gram, h0.reshape(-1, 1)).ravel(), ([2], [0]))
    half, quarter = Fraction(1, 2), Fraction(1, 4)
    return (
        ex.lincomb((-half, t1)),
        ex.lincomb((-half, m.killing)),
        ex.lincomb((quarter, t3)),
        ex.lincomb((-1, t4)),
    )


@_framed
def ricci_besse(m: MetricLieAlgebra) -> RicciTensor:
    """Ricci tensor through brackets, the Killing form of ``m`` and ``H_0``."""
    if m.dim == 0:
        return RicciTensor(m.zeros((0, 0)), "besse")
    return RicciTensor(ex.lincomb(*((1, t) for t in besse_terms(m))), "besse")


def ricci_operator(m: MetricLieAlgebra, ric: RicciTensor) -> np.ndarray:
    """``Ric`` with ``<Ric X, Y> = ric(X, Y)``, as a matrix acting on coordinates."""
    return ex.dot(m.gram_inv, ric.matrix.T)


def nilpotent_ricci_operator(m: MetricLieAlgebra) -> np.ndarray:
    """``Ric = 1/4 sum ad_E ad_E^* - 1/2 sum ad_E^* ad_E`` with Gram adjoints."""
    if not m.is_nilpotent():
        raise PreconditionError("ricci_nilpotent needs a nilpotent algebra")
    n = m.dim
    if n == 0:
        return m.zeros((0, 0))
    g, k = m.gram, m.gram_inv
    ad = m.bracket.transpose(0, 2, 1)  # ad[i] = matrix of ad_{b_i}
    adk = tdot(ad, k, ([2], [0]))  # (A_i K)[k, m]
    kad = tdot(k, ad, ([1], [0]))  # sum_j K[i,j] A_j
    s1 = tdot(adk, kad, ([0, 2], [0, 2]))  # sum_ij K_ij A_i K A_j^T
    gad = tdot(ad, g, ([1], [1])).transpose(0, 2, 1)  # (G A_j)[l, p]
    kgad = tdot(k, gad, ([1], [0]))
    s2 = tdot(ad, kgad, ([0, 1], [0, 1]))  # sum_ij K_ij A_i^T G A_j
    return ex.lincomb((Fraction(1, 4), ex.dot(s1, g)), (Fraction(-1, 2), ex.dot(k, s2)))


@_framed
def ricci_nilpotent(m: MetricLieAlgebra) -> RicciTensor:
    ric_op = nilpotent_ricci_operator(m)
    return RicciTensor(ex.dot(ric_op.T, m.gram), "nilpotent")


def is_standard_split(m: MetricLieAlgebra) -> dict:
    """Check the a/n annotation: ``n = [s,s]``, ``a`` its orthogonal complement, ``a`` abelian,
    and ``ad_A`` symmetric for ``A`` in ``a``.  Returns a dict of flags and residuals."""
    if not m.split:
        raise PreconditionError("algebra carries no a/n annotation")
    tol = None if m.exact else DEFAULT_TOL
    a, n = list(m.a_indices), list(m.n_indices)
    out = {}
    derived = m.bracket.reshape(m.dim * m.dim, m.dim).T
    if m.exact:
        out["n_is_derived"] = ex.same_span(derived, ex.qeye(m.dim)[:, n])
    else:
        both = np.concatenate([derived, np.eye(m.dim)[:, n]], axis=1)
        out["n_is_derived"] = _float_colbasis(both).shape[1] == len(n) == _float_colbasis(derived).shape[1]
    out["a_perp_n"] = ex.is_zero(m.gram[np.ix_(a, n)], tol)
    out["a_abelian"] = ex.is_zero(m.bracket[np.ix_(a, a)], tol)
    worst = ex.ZERO if m.exact else 0.0
    for i in a:
        ga = ex.dot(m.gram, m.ad(m.basis_vector(i)))
        worst = max(worst, ex.max_abs(ga - ga.T))
    out["ad_a_symmetric"] = worst == 0 if m.exact else worst <= DEFAULT_TOL
    out["symmetric_residual"] = worst
    return out


def is_positive_on_n(m: MetricLieAlgebra, a0) -> bool:
    n = list(m.n_indices)
    ga = ex.dot(m.gram, m.ad(a0))[np.ix_(n, n)]
    return ex.is_positive_definite(ga) if m.exact else bool(np.linalg.eigvalsh((ga + ga.T) / 2).min() > 0)


@_framed
def ricci_wolter(m: MetricLieAlgebra) -> RicciTensor:
    """Ricci tensor of an Iwasawa-type algebra from the nilradical's Ricci tensor and ``H_0``.

    The positivity part of the precondition is tested with ``A_0 = H_0``.
    """
    flags = is_standard_split(m)
    a0 = mean_curvature(m)
    if not (flags["n_is_derived"] and flags["a_perp_n"] and flags["a_abelian"] and flags["ad_a_symmetric"]):
        raise PreconditionError(f"not of Iwasawa type: {flags}")
    if not is_positive_on_n(m, a0):
        raise PreconditionError("ad_{A0} is not positive definite on n")
    a, n = list(m.a_indices), list(m.n_indices)
    ric = m.zeros((m.dim, m.dim))
    kill = m.killing
    ric[np.ix_(a, a)] = -kill[np.ix_(a, a)]
    ric_n = ricci_nilpotent(m.nilradical()).matrix
    h0 = mean_curvature(m)
    g_adh = ex.dot(m.ad(h0).T, m.gram)  # <ad_{H0} X, Y>
    ric[np.ix_(n, n)] = ric_n - g_adh[np.ix_(n, n)]
    return RicciTensor(ric, "wolter")


ROUTES = {
    "definition": ricci_definition,
    "besse": ricci_besse,
    "wolter": ricci_wolter,
}


def einstein_check(ric, gram, tol: float | None = None) -> EinsteinReport:
    """Is ``ric = c <,>``?  Exact: zero residual with ``c = ric_00 / gram_00``.
    Floating: max relative residual at most ``tol``."""
    mat = ric.matrix if isinstance(ric, RicciTensor) else ric
    n = gram.shape[0]
    if n == 0:
        return EinsteinReport(True, ex.ZERO if ex.is_exact(gram) else 0.0, ex.ZERO if ex.is_exact(gram) else 0.0)
    if ex.is_exact(gram) and ex.is_exact(mat):
        if gram[0, 0] == 0:
            raise ValueError("gram is singular (zero diagonal entry)")
        c = mat[0, 0] / gram[0, 0]
        res = ex.max_abs(mat - c * gram)
        return EinsteinReport(res == 0, c, res)
    g, r = ex.to_float(gram), ex.to_float(mat)
    if abs(np.linalg.det(g)) == 0:
        raise ValueError("gram is singular")
    if tol is None:
        tol = DEFAULT_TOL if n <= 100 else LARGE_DIM_TOL
    c = float(np.sum(r * g) / np.sum(g * g))
    scale = max(np.max(np.abs(r)), abs(c) * np.max(np.abs(g)))
    res = float(np.max(np.abs(r - c * g)) / scale) if scale > 0 else 0.0
    return EinsteinReport(res <= tol, c, res)


# ----------------------------------------------------------------------------
# Submanifolds
# ----------------------------------------------------------------------------


def _check_embedding(sub: MetricLieAlgebra, ambient: MetricLieAlgebra, embedding) -> list:
    emb = list(embedding)
    if len(emb) != sub.dim or len(set(emb)) != len(emb) or any(not 0 <= e < ambient.dim for e in emb):
        raise ValueError("embedding must be an injective list of ambient indices")
    tol = None if sub.exact else 1e-10
    if not ex.is_zero(ambient.gram[np.ix_(emb, emb)] - sub.gram, tol):
        raise ValueError("sub Gram is not the restricted ambient Gram")
    if not ex.is_zero(ambient.bracket[np.ix_(emb, emb, emb)] - sub.bracket, tol):
        raise ValueError("sub bracket is not the restricted ambient bracket")
    others = [k for k in range(ambient.dim) if k not in set(emb)]
    if not ex.is_zero(ambient.bracket[np.ix_(emb, emb, others)], tol):
        raise ValueError("sub is not a subalgebra of ambient")
    return emb


def second_fundamental_form(sub: MetricLieAlgebra, ambient: MetricLieAlgebra, embedding, u_ambient=None) -> SubmanifoldReport:
    """``h(X,Y) = U^ambient(X,Y) - U^sub(X,Y)`` on the tangent basis, with trace and flags."""
    emb = _check_embedding(sub, ambient, embedding)
    ua = u_tensor(ambient) if u_ambient is None else u_ambient
    us = u_tensor(sub)
    h = ua[np.ix_(emb, emb, list(range(ambient.dim)))].copy()
    h[:, :, emb] = h[:, :, emb] - us
    tol = None if sub.exact else 1e-9
    tangential = tdot(h, ambient.gram[:, emb], ([2], [0]))
    mean = tdot(sub.gram_inv, h, ([0, 1], [0, 1])) if sub.dim else ambient.zeros(ambient.dim)
    wit = tuple(i for i in range(sub.dim) if not ex.is_zero(h[i, i], tol))
    res = {
        "normal": ex.max_abs(tangential),
        "mean_curvature": ex.max_abs(mean),
        "h": ex.max_abs(h),
    }
    return SubmanifoldReport(
        mean_curvature=mean,
        is_minimal=ex.is_zero(mean, tol),
        is_totally_geodesic=ex.is_zero(h, tol),
        ricci_restriction_ok=None,
        h_tensor=h,
        residuals=res,
        witnesses=wit,
    )


def ricci_restriction_check(sub: MetricLieAlgebra, ambient: MetricLieAlgebra, embedding, route: str = "besse", ric_ambient=None, ric_sub=None, tol: float | None = None):
    """``ric^sub == ric^ambient`` restricted to the sub basis.  Returns ``(ok, residual)``."""
    emb = _check_embedding(sub, ambient, embedding)
    ra = (ric_ambient or ROUTES[route](ambient)).matrix[np.ix_(emb, emb)]
    rs = (ric_sub or ROUTES[route](sub)).matrix
    diff = ex.max_abs(ra - rs)
    if sub.exact:
        return diff == 0, diff
    scale = max(float(ex.max_abs(ra)), 1e-300)
    rel = float(diff) / scale
    return rel <= (tol or DEFAULT_TOL), rel
