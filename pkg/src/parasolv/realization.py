"""Concrete real semisimple Lie algebras over the rationals.

A :class:`Realization` is a basis adapted to a restricted root space
decomposition: every basis vector lies in ``a``, in ``k_0`` or in a single
root space.  Builtin realizations come from a Chevalley basis (structure
constants fixed by the extraspecial-pair sign rule) in two flavours:

``split``
    the split real form; every restricted root has multiplicity 1.
``complexified``
    the complex algebra viewed as a real one (basis ``x`` and ``i x``);
    restricted roots have multiplicity 2 and ``k_0 = i a``.

Other real forms can be loaded from a JSON file (:func:`load_realization`);
they go through the same validation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from . import exact as ex
from .exact import ONE, ZERO, qzeros
from .rootsystem import (
    CartanMatrix,
    InputError,
    Root,
    RootSystemData,
    root_order_key,
    validate_cartan,
)

FORMS = ("split", "complexified")


class ConstructionError(RuntimeError):
    """A realization failed one of its own consistency checks."""


@dataclass(frozen=True)
class BasisLabel:
    kind: str  # 'cartan' | 'compact' | 'root'
    index: int = -1  # simple-root index for cartan/compact generators
    root: Root | None = None
    copy: int = 0

    def __str__(self):
        if self.kind == "root":
            return f"X{self.root}.{self.copy}"
        return f"{'h' if self.kind == 'cartan' else 'ih'}{self.index}"

    def to_json(self):
        if self.kind == "root":
            return {"type": "root", "root": list(self.root.coeffs), "copy": self.copy}
        return {"type": self.kind, "index": self.index, "copy": self.copy}

    @classmethod
    def from_json(cls, d):
        try:
            kind = d["type"]
            if kind == "root":
                return cls("root", root=Root(tuple(d["root"])), copy=int(d.get("copy", 0)))
            if kind in ("cartan", "compact"):
                return cls(kind, index=int(d["index"]), copy=int(d.get("copy", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad basis label {d!r}") from exc
        raise InputError(f"unknown basis label type {d.get('type')!r}")


@dataclass(frozen=True, eq=False)
class Realization:
    name: str
    form: str
    rsd: RootSystemData
    labels: tuple
    bracket: np.ndarray  # C[i, j, k]: [b_i, b_j] = sum_k C[i,j,k] b_k
    involution: np.ndarray  # column j is sigma(b_j)
    a_indices: tuple
    k0_indices: tuple
    killing: np.ndarray = field(default=None)
    bsigma: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.killing is None:
            object.__setattr__(self, "killing", killing_form(self))
        if self.bsigma is None:
            object.__setattr__(self, "bsigma", -ex.dot(self.killing, self.involution))

    @property
    def dimension(self) -> int:
        return len(self.labels)

    @property
    def rank(self) -> int:
        return self.rsd.rank

    @cached_property
    def g0_indices(self) -> tuple:
        return tuple(sorted(self.a_indices + self.k0_indices))

    @cached_property
    def root_spaces(self) -> dict:
        out = {}
        for k, lab in enumerate(self.labels):
            if lab.kind == "root":
                out.setdefault(lab.root, []).append(k)
        return {r: tuple(v) for r, v in out.items()}

    @cached_property
    def roots(self) -> tuple:
        return tuple(sorted(self.root_spaces, key=lambda r: (not r.is_positive,) + root_order_key(r if r.is_positive else -r)))

    def multiplicity(self, root: Root) -> int:
        return len(self.root_spaces.get(root, ()))

    @cached_property
    def integer_bracket(self):
        return ex.to_integer(self.bracket)

    def vec(self, index: int) -> np.ndarray:
        v = qzeros(self.dimension)
        v[index] = ONE
        return v

    def br(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Bracket of two coordinate vectors."""
        return ex.tdot(ex.tdot(self.bracket, y, ([1], [0])), x, ([0], [0]))

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``ad_x`` (column j is ``[x, b_j]``)."""
        return ex.tdot(x, self.bracket, ([0], [0])).T

    def sigma(self, x: np.ndarray) -> np.ndarray:
        return ex.dot(self.involution, x.reshape(-1, 1)).ravel()

    def bs(self, x: np.ndarray, y: np.ndarray):
        """``B_sigma(x, y)``."""
        return ex.dot(ex.dot(x.reshape(1, -1), self.bsigma), y.reshape(-1, 1))[0, 0]

    @cached_property
    def root_values(self) -> dict:
        """``alpha -> (alpha(a_j))_j`` over the ``a`` basis vectors, read off the bracket."""
        out = {}
        for root, idx in self.root_spaces.items():
            x = idx[0]
            out[root] = tuple(self.bracket[a, x, x] for a in self.a_indices)
        return out

    def evaluate(self, root: Root, vector: np.ndarray) -> Fraction:
        """``root(A)`` for ``A`` in ``a`` given as a full coordinate vector."""
        vals = self.root_values.get(root)
        if vals is None:
            vals = tuple(-v for v in self.root_values[-root])
        return sum((v * vector[a] for v, a in zip(vals, self.a_indices)), ZERO)

    def a_vector(self, coords) -> np.ndarray:
        v = qzeros(self.dimension)
        for c, a in zip(coords, self.a_indices):
            v[a] = Fraction(c)
        return v


# ----------------------------------------------------------------------------
# Chevalley basis
# ----------------------------------------------------------------------------


def chevalley_structure_constants(rsd: RootSystemData) -> dict:
    """``N[(a, b)]`` with ``[e_a, e_b] = N e_{a+b}`` for every pair of roots with ``a+b`` a root.

    Extraspecial pairs get ``+(p+1)``; the rest follow from the Chevalley
    relations (Carter, *Simple groups of Lie type*, 4.1-4.2).
    """
    pos = rsd.positive_roots
    posset = set(pos)
    allroots = set(rsd.roots)
    order = {x: k for k, x in enumerate(pos)}
    norm = {x: rsd.inner(x, x) for x in pos}

    def nrm(x):
        return norm[x] if x in norm else norm[-x]

    def p_of(a, b):
        p = 0
        while b - a * (p + 1) in allroots:
            p += 1
        return p

    table = {}

    def n_of(a, b):
        s = a + b
        if s not in allroots:
            return 0
        if a.is_positive and b.is_positive:
            return table[(a, b)]
        if not a.is_positive and not b.is_positive:
            return -table[(-a, -b)]
        c = -s
        if c.is_positive == a.is_positive:
            return nrm(c) / nrm(b) * n_of(c, a)
        return nrm(c) / nrm(a) * n_of(b, c)

    for xi in pos:
        if xi.height == 1:
            continue
        pairs = [(a, xi - a) for a in pos if xi - a in posset]
        a1, b1 = pairs[0]
        ext = p_of(a1, b1) + 1
        table[(a1, b1)] = Fraction(ext)
        table[(b1, a1)] = Fraction(-ext)
        for a, b in pairs[1:]:
            if order[a] > order[b]:
                continue
            t1 = n_of(b, -a1) * n_of(a, -b1) / nrm(b - a1) if b - a1 in allroots else 0
            t2 = n_of(-a1, a) * n_of(b, -b1) / nrm(a - a1) if a - a1 in allroots else 0
            val = nrm(xi) / table[(a1, b1)] * (t1 + t2)
            if abs(val) != p_of(a, b) + 1:
                raise ConstructionError(f"|N({a},{b})| = {val}, expected {p_of(a, b) + 1}")
            table[(a, b)] = Fraction(val)
            table[(b, a)] = Fraction(-val)

    out = {}
    roots = rsd.roots
    for a in roots:
        for b in roots:
            if a + b in allroots:
                v = Fraction(n_of(a, b))
                if v.denominator != 1:
                    raise ConstructionError(f"non-integral N({a},{b}) = {v}")
                out[(a, b)] = int(v)
    return out


def _chevalley(rsd: RootSystemData):
    """Chevalley basis ``h_i, e_a (a > 0), e_{-a}``: labels, sparse bracket, involution."""
    r = rsd.rank
    pos = list(rsd.positive_roots)
    roots = pos + [-x for x in pos]
    idx = {x: r + k for k, x in enumerate(roots)}
    n = r + len(roots)
    N = chevalley_structure_constants(rsd)
    br = {}  # (i, j) -> {k: int}, i, j over all ordered pairs

    def put(i, j, vec):
        vec = {k: v for k, v in vec.items() if v}
        if vec:
            br[(i, j)] = vec
            br[(j, i)] = {k: -v for k, v in vec.items()}

    for i in range(r):
        for x in roots:
            put(i, idx[x], {idx[x]: rsd.pairing(x, i)})
    for x in pos:
        put(idx[x], idx[-x], dict(enumerate(rsd.coroot_coeffs(x))))
    for a in roots:
        for b in roots:
            if (a, b) in N and idx[a] < idx[b]:
                put(idx[a], idx[b], {idx[a + b]: N[(a, b)]})
    # Chevalley involution: e_a -> -e_{-a}, h -> -h; stored as column images.
    inv = {i: {i: -1} for i in range(r)}
    for x in roots:
        inv[idx[x]] = {idx[-x]: -1}
    return n, roots, br, inv


def build_realization(rsd: RootSystemData, form: str = "split", name: str | None = None, check: bool = True) -> Realization:
    """Builtin realization of the split or complexified algebra with root system ``rsd``."""
    if form not in FORMS:
        raise InputError(f"unknown form {form!r}; expected one of {FORMS}")
    r = rsd.rank
    n0, roots, br0, inv0 = _chevalley(rsd)
    if form == "split":
        labels = [BasisLabel("cartan", index=i) for i in range(r)] + [BasisLabel("root", root=x) for x in roots]
        n = n0
        where = {(k, 0): k for k in range(n0)}
        a_idx, k0_idx = tuple(range(r)), ()
    else:
        labels = [BasisLabel("cartan", index=i) for i in range(r)]
        labels += [BasisLabel("compact", index=i, copy=1) for i in range(r)]
        where = {(i, 0): i for i in range(r)}
        where.update({(i, 1): r + i for i in range(r)})
        for k, x in enumerate(roots):
            for c in (0, 1):
                where[(r + k, c)] = len(labels)
                labels.append(BasisLabel("root", root=x, copy=c))
        n = len(labels)
        a_idx, k0_idx = tuple(range(r)), tuple(range(r, 2 * r))

    C = np.zeros((n, n, n), dtype=np.int64)
    S = np.zeros((n, n), dtype=np.int64)
    copies = (0,) if form == "split" else (0, 1)
    for (i, j), vec in br0.items():
        for ci in copies:
            for cj in copies:
                c = ci + cj  # i^c
                sign, tc = (1, c) if c < 2 else (-1, 0)
                for k, v in vec.items():
                    C[where[(i, ci)], where[(j, cj)], where[(k, tc)]] = sign * v
    for j, vec in inv0.items():
        for cj in copies:
            sign = 1 if cj == 0 else -1  # conjugation flips the i-copy
            for k, v in vec.items():
                S[where[(k, cj)], where[(j, cj)]] = sign * v

    if name is None:
        name = rsd.cartan.label() + ("" if form == "split" else "(C)")
    real = Realization(
        name=name,
        form=form,
        rsd=rsd,
        labels=tuple(labels),
        bracket=ex.from_integer(C, 1),
        involution=ex.from_integer(S, 1),
        a_indices=a_idx,
        k0_indices=k0_idx,
    )
    if check:
        try:
            validate_realization(real)
        except InputError as exc:
            raise ConstructionError(str(exc)) from exc
    return real


# ----------------------------------------------------------------------------
# Forms and root data
# ----------------------------------------------------------------------------


def killing_form(r: Realization) -> np.ndarray:
    """``B(b_i, b_j) = tr(ad_{b_i} ad_{b_j})`` from the bracket, exact."""
    num, den = ex.to_integer(r.bracket)
    n = num.shape[0]
    left = num.reshape(n, n * n)
    right = num.transpose(0, 2, 1).reshape(n, n * n)
    return ex.from_integer(ex.imatmul(left, np.ascontiguousarray(right.T)), den * den)


def root_vector(r: Realization, root: Root) -> np.ndarray:
    """``H_root`` in ``a`` with ``B_sigma(H_root, A) = root(A)`` for all ``A`` in ``a``."""
    if root not in r.root_spaces:
        raise InputError(f"{root} is not a root of {r.name}")
    a = list(r.a_indices)
    gram = r.bsigma[np.ix_(a, a)]
    rhs = ex.qarray(
        [r.evaluate(root, r.vec(j)) for j in a]
    )
    return r.a_vector(ex.solve(gram, rhs))


def dual_basis(r: Realization) -> list:
    """``H^1..H^r`` in ``a`` with ``a_i(H^j) = delta_ij``."""
    rank = r.rank
    if len(r.a_indices) != rank:
        raise ConstructionError(f"dim a = {len(r.a_indices)} differs from rank {rank}")
    m = ex.qarray([[r.evaluate(Root.simple(i, rank), r.vec(a)) for a in r.a_indices] for i in range(rank)])
    try:
        inv = ex.inverse(m)
    except ex.SingularMatrixError as exc:
        raise ConstructionError("simple roots are linearly dependent on a") from exc
    return [r.a_vector(inv[:, j]) for j in range(rank)]


def eigenspaces_of_sigma(r: Realization):
    """Column bases of ``k`` (+1) and ``p`` (-1)."""
    n = r.dimension
    eye = ex.qeye(n)
    return ex.nullspace(r.involution - eye), ex.nullspace(r.involution + eye)


# ----------------------------------------------------------------------------
# Validation
# ----------------------------------------------------------------------------


def _sparse(bracket: np.ndarray) -> dict:
    n = bracket.shape[0]
    out = {}
    nz = np.argwhere(ex.to_integer(bracket)[0] != 0)
    for i, j, k in nz.tolist():
        out.setdefault((i, j), {})[k] = bracket[i, j, k]
    return out


def jacobi_defects(bracket: np.ndarray, limit: int = 5) -> list:
    """Up to ``limit`` basis triples violating the Jacobi identity (sparse, exact)."""
    sp = _sparse(bracket)
    n = bracket.shape[0]
    bad = []

    def apply(vec, k):
        # [vec, b_k]
        out = {}
        for m, c in vec.items():
            for l, d in sp.get((m, k), {}).items():
                out[l] = out.get(l, 0) + c * d
        return out

    for i in range(n):
        for j in range(i + 1, n):
            ij = sp.get((i, j), {})
            for k in range(j + 1, n):
                tot = apply(ij, k)
                for l, v in apply(sp.get((j, k), {}), i).items():
                    tot[l] = tot.get(l, 0) + v
                for l, v in apply(sp.get((k, i), {}), j).items():
                    tot[l] = tot.get(l, 0) + v
                if any(v != 0 for v in tot.values()):
                    bad.append((i, j, k))
                    if len(bad) >= limit:
                        return bad
    return bad


def validate_realization(r: Realization) -> None:
    """Assert every structural invariant exactly; raise InputError naming the first failure."""
    n = r.dimension
    C, S, B, Bs = r.bracket, r.involution, r.killing, r.bsigma
    if C.shape != (n, n, n) or S.shape != (n, n):
        raise InputError("bracket/involution shapes do not match the basis")
    if not ex.is_zero(C + C.transpose(1, 0, 2)):
        raise InputError("bracket is not antisymmetric")
    bad = jacobi_defects(C)
    if bad:
        raise InputError(f"Jacobi identity fails on basis triples {bad}")
    if not ex.is_zero(ex.dot(S, S) - ex.qeye(n)):
        raise InputError("involution does not square to the identity")
    # sigma[x, y] = [sigma x, sigma y]
    lhs = ex.tdot(C, S, ([2], [1]))
    rhs = ex.tdot(S, ex.tdot(S, C, ([0], [1])), ([0], [1]))
    if not ex.is_zero(lhs - rhs):
        raise InputError("involution is not a Lie algebra automorphism")
    if not ex.is_zero(B - killing_form(r)):
        raise InputError("stored Killing form does not match the bracket")
    t = ex.tdot(C, B, ([2], [0]))  # t[z,x,y] = B([z,x], y)
    if not ex.is_zero(t + t.transpose(0, 2, 1)):
        raise InputError("Killing form is not ad-invariant")
    if not ex.is_zero(Bs + ex.dot(B, S)) or not ex.is_zero(Bs - Bs.T):
        raise InputError("B_sigma is not -B(., sigma .) or not symmetric")
    if not ex.is_positive_definite(Bs):
        raise InputError("B_sigma is not positive definite")
    lhs = ex.tdot(C, Bs, ([2], [0]))  # B_sigma([z,x], y)
    r1 = ex.tdot(C, Bs, ([2], [1]))  # r1[p,y,x] = B_sigma(x, [b_p, b_y])
    rhs = -ex.tdot(S, r1, ([0], [0])).transpose(0, 2, 1)
    if not ex.is_zero(lhs - rhs):
        raise InputError("B_sigma([Z,X],Y) = -B_sigma(X,[sigma Z,Y]) fails")
    _validate_root_decomposition(r)


def _validate_root_decomposition(r: Realization) -> None:
    n = r.dimension
    a = list(r.a_indices)
    if not a:
        raise InputError("empty a")
    covered = sorted(list(r.g0_indices) + [k for idx in r.root_spaces.values() for k in idx])
    if covered != list(range(n)):
        raise InputError("a, k0 and the root spaces do not partition the basis")
    for i in a:
        for j in a:
            if not ex.is_zero(r.bracket[i, j]):
                raise InputError("a is not abelian")
        e = r.vec(i)
        if not ex.is_zero(r.sigma(e) + e):
            raise InputError("a is not contained in p")
    for k in r.g0_indices:
        for i in a:
            if not ex.is_zero(r.bracket[i, k]):
                raise InputError("g0 does not centralize a")
    for k in r.k0_indices:
        e = r.vec(k)
        if not ex.is_zero(r.sigma(e) - e):
            raise InputError("k0 is not contained in k")
    # centralizer of a in g has exactly the g0 dimension
    ads = np.concatenate([r.ad(r.vec(i)) for i in a], axis=0)
    if ex.rank(ads) != n - len(r.g0_indices):
        raise InputError("g0 is not the full centralizer of a")
    # a maximal abelian in p: centralizer of a inside p is a
    _, p = eigenspaces_of_sigma(r)
    cent_p = ex.nullspace(ex.dot(ads, p))
    if cent_p.shape[1] != len(a):
        raise InputError("a is not maximal abelian in p")
    zero_root = Root((0,) * r.rank)
    for root, idx in r.root_spaces.items():
        if root == zero_root:
            raise InputError("zero is not a root")
        for k in idx:
            for pos_a, i in enumerate(a):
                lam = r.root_values[root][pos_a]
                col = r.bracket[i, k]
                expect = qzeros(n)
                expect[k] = lam
                if not ex.is_zero(col - expect):
                    raise InputError(f"basis vector {k} is not an ad(a)-eigenvector in its root space")
        neg = -root
        if neg not in r.root_spaces:
            raise InputError(f"root {root} has no negative")
        img = r.involution[:, list(idx)]
        others = [j for j in range(n) if j not in r.root_spaces[neg]]
        if not ex.is_zero(img[others]):
            raise InputError(f"sigma does not map g_{root} onto g_{neg}")
    # functionals are consistent with the simple-root coefficients
    rank = r.rank
    simple = [tuple(r.root_values.get(Root.simple(i, rank), ())) for i in range(rank)]
    if any(len(s) != len(a) for s in simple):
        raise InputError("a simple root has no root space")
    for root, vals in r.root_values.items():
        lin = tuple(sum((c * s[j] for c, s in zip(root.coeffs, simple)), ZERO) for j in range(len(a)))
        if lin != tuple(vals):
            raise InputError(f"root {root} does not act as the combination of simple roots it names")


# ----------------------------------------------------------------------------
# File format
# ----------------------------------------------------------------------------

FILE_FORMAT = "parasolv-realization"
FILE_VERSION = 1


def dump_realization(r: Realization, path) -> None:
    """Write ``r`` as JSON (see README for the schema)."""
    n = r.dimension
    entries = []
    for (i, j), vec in sorted(_sparse(r.bracket).items()):
        if i < j:
            entries.extend([i, j, k, ex.fmt(v)] for k, v in sorted(vec.items()))
    doc = {
        "format": FILE_FORMAT,
        "version": FILE_VERSION,
        "name": r.name,
        "cartan_matrix": [list(row) for row in r.rsd.cartan.entries],
        "dimension": n,
        "basis_labels": [lab.to_json() for lab in r.labels],
        "bracket": entries,
        "involution": [[ex.fmt(v) for v in row] for row in r.involution.tolist()],
        "subspaces": {"a": list(r.a_indices), "k0": list(r.k0_indices)},
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def _q(v):
    try:
        return Fraction(v) if not isinstance(v, float) else Fraction(str(v))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {v!r}") from exc


def load_realization(path) -> Realization:
    """Read and fully validate a realization file; errors are InputError."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read realization file {path}: {exc}") from exc
    try:
        if doc.get("format") != FILE_FORMAT:
            raise InputError(f"not a {FILE_FORMAT} file")
        n = int(doc["dimension"])
        cartan: CartanMatrix = validate_cartan(doc["cartan_matrix"])
        labels = tuple(BasisLabel.from_json(d) for d in doc["basis_labels"])
        if len(labels) != n:
            raise InputError("basis_labels length differs from dimension")
        C = qzeros((n, n, n))
        given = set()
        for ent in doc["bracket"]:
            i, j, k, v = int(ent[0]), int(ent[1]), int(ent[2]), _q(ent[3])
            if not all(0 <= t < n for t in (i, j, k)):
                raise InputError(f"bracket entry {ent} out of range")
            if (j, i, k) in given and C[j, i, k] != -v:
                raise InputError(f"bracket entries {ent} contradict antisymmetry")
            C[i, j, k] = v
            C[j, i, k] = -v
            given.add((i, j, k))
        S = ex.qarray([[_q(v) for v in row] for row in doc["involution"]])
        sub = doc.get("subspaces", {})
        a_idx = tuple(int(i) for i in sub["a"])
        k0_idx = tuple(int(i) for i in sub.get("k0", []))
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed realization file: {exc!r}") from exc
    if S.shape != (n, n):
        raise InputError("involution must be dimension x dimension")
    pos = sorted({lab.root for lab in labels if lab.kind == "root" and lab.root.is_positive}, key=root_order_key)
    if any(len(lab.root.coeffs) != cartan.rank for lab in labels if lab.kind == "root"):
        raise InputError("root labels must have one coefficient per simple root")
    comps = tuple(cartan.components())
    highest = []
    for block in comps:
        mine = [x for x in pos if x.support <= set(block)]
        if not mine:
            raise InputError("a simple component carries no roots")
        highest.append(max(mine, key=lambda x: x.height))
    rsd = RootSystemData(cartan, tuple(pos), comps, tuple(highest))
    real = Realization(
        name=str(doc.get("name", Path(path).stem)),
        form="user",
        rsd=rsd,
        labels=labels,
        bracket=C,
        involution=S,
        a_indices=a_idx,
        k0_indices=k0_idx,
    )
    validate_realization(real)
    return real
