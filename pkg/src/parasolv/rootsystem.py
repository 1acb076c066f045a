"""Finite root systems from Cartan matrices.

Conventions
-----------
Simple roots are the 0-based indices ``0..r-1``.  Cartan matrix entries are
``C[i][j] = 2 (a_i, a_j) / (a_i, a_i)`` -- row ``i`` is the coroot of ``a_i``
paired against ``a_j`` -- so ``a_j(h_i) = C[i][j]`` for the Chevalley
coroots ``h_i``.

The builtin tables follow Bourbaki's labelling: in ``B_n`` the last node is
short, in ``C_n`` the last node is long, in ``F_4`` nodes 0,1 are long.  For
``G_2`` node 0 is the short root (so the table is ``[[2,-3],[-1,2]]`` and the
highest root is ``3a_0 + 2a_1``); the transposed labelling is accepted by
:func:`validate_cartan` like any other finite-type matrix.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import determinant, qarray


class InputError(ValueError):
    """Malformed or unsupported user input (CLI exit code 2)."""


@dataclass(frozen=True)
class CartanMatrix:
    entries: tuple
    series_labels: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rank, self.rank)

    def components(self) -> list[tuple[int, ...]]:
        """Index blocks of the irreducible summands, in order of smallest index."""
        seen, blocks = set(), []
        for start in range(self.rank):
            if start in seen:
                continue
            stack, block = [start], set()
            while stack:
                i = stack.pop()
                if i in block:
                    continue
                block.add(i)
                stack.extend(j for j in range(self.rank) if j != i and self[i, j] != 0)
            seen |= block
            blocks.append(tuple(sorted(block)))
        return blocks

    def symmetrizer(self) -> tuple[Fraction, ...]:
        """``d_i = (a_i, a_i) / 2``, normalised so short roots have ``d = 1``."""
        d = [None] * self.rank
        for block in self.components():
            d[block[0]] = Fraction(1)
            stack = [block[0]]
            while stack:
                i = stack.pop()
                for j in block:
                    if j != i and self[i, j] != 0 and d[j] is None:
                        d[j] = d[i] * self[i, j] / self[j, i]
                        stack.append(j)
            low = min(d[i] for i in block)
            for i in block:
                d[i] /= low
        return tuple(d)

    def label(self) -> str:
        if self.series_labels:
            return "x".join(f"{s}{n}" for s, n in self.series_labels)
        return "C" + str([list(row) for row in self.entries]).replace(" ", "")


@dataclass(frozen=True, order=True)
class Root:
    """A root as its integer coefficient vector over the simple roots."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def height(self) -> int:
        return sum(self.coeffs)

    @property
    def is_positive(self) -> bool:
        return all(c >= 0 for c in self.coeffs) and any(self.coeffs)

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.coeffs) if c)

    def __add__(self, other: "Root") -> "Root":
        return Root(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Root") -> "Root":
        return Root(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Root":
        return Root(tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "Root":
        return Root(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.coeffs)) + ")"

    @classmethod
    def simple(cls, i: int, rank: int) -> "Root":
        return cls(tuple(int(j == i) for j in range(rank)))


def root_order_key(root: Root):
    """Height first, then simple roots in index order (a_0 before a_1)."""
    return (root.height, tuple(-c for c in root.coeffs))


@dataclass(frozen=True)
class RootSystemData:
    cartan: CartanMatrix
    positive_roots: tuple
    components: tuple
    highest_roots: tuple
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {r: k for k, r in enumerate(self.positive_roots)})

    @property
    def rank(self) -> int:
        return self.cartan.rank

    @property
    def roots(self) -> tuple:
        """All roots: positive ones in order, then their negatives."""
        return self.positive_roots + tuple(-r for r in self.positive_roots)

    def is_root(self, root: Root) -> bool:
        return root in self._index or -root in self._index

    def index(self, root: Root) -> int:
        return self._index[root]

    def pairing(self, root: Root, i: int) -> int:
        """``<root, a_i^vee> = root(h_i)``."""
        return sum(c * self.cartan[i, j] for j, c in enumerate(root.coeffs))

    def inner(self, a: Root, b: Root) -> Fraction:
        """Invariant form with short simple roots of squared length 2."""
        d = self.cartan.symmetrizer()
        r = self.rank
        return sum(
            (a.coeffs[i] * b.coeffs[j] * d[i] * self.cartan[i, j] for i in range(r) for j in range(r)),
            Fraction(0),
        )

    def coroot_coeffs(self, root: Root) -> tuple:
        """Coefficients of ``root^vee`` over the simple coroots (integers)."""
        d = self.cartan.symmetrizer()
        norm = self.inner(root, root)
        out = []
        for i, c in enumerate(root.coeffs):
            k = Fraction(2 * d[i] * c) / norm
            if k.denominator != 1:
                raise ArithmeticError(f"non-integral coroot coefficient for {root}")
            out.append(int(k))
        return tuple(out)

    def component_of(self, root: Root) -> int:
        for k, block in enumerate(self.components):
            if root.support <= set(block):
                return k
        raise ValueError(f"{root} straddles components")


# Simple roots in Euclidean coordinates (Bourbaki plates); Cartan matrices
# are computed from them rather than typed in.
def _e(n, *pairs):
    v = [Fraction(0)] * n
    for i, c in pairs:
        v[i] += Fraction(c)
    return v


def _simple_vectors(series: str, rank: int):
    if series == "A":
        return [_e(rank + 1, (i, 1), (i + 1, -1)) for i in range(rank)]
    if series == "B":
        return [_e(rank, (i, 1), (i + 1, -1)) for i in range(rank - 1)] + [_e(rank, (rank - 1, 1))]
    if series == "C":
        return [_e(rank, (i, 1), (i + 1, -1)) for i in range(rank - 1)] + [_e(rank, (rank - 1, 2))]
    if series == "D":
        return [_e(rank, (i, 1), (i + 1, -1)) for i in range(rank - 1)] + [
            _e(rank, (rank - 2, 1), (rank - 1, 1))
        ]
    if series == "E":
        h = Fraction(1, 2)
        e8 = [
            _e(8, (0, h), (7, h), *[(k, -h) for k in range(1, 7)]),
            _e(8, (0, 1), (1, 1)),
            _e(8, (1, 1), (0, -1)),
            _e(8, (2, 1), (1, -1)),
            _e(8, (3, 1), (2, -1)),
            _e(8, (4, 1), (3, -1)),
            _e(8, (5, 1), (4, -1)),
            _e(8, (6, 1), (5, -1)),
        ]
        return e8[:rank]
    if series == "F":
        h = Fraction(1, 2)
        return [_e(4, (1, 1), (2, -1)), _e(4, (2, 1), (3, -1)), _e(4, (3, 1)), _e(4, (0, h), (1, -h), (2, -h), (3, -h))]
    if series == "G":
        return [_e(3, (0, 1), (1, -1)), _e(3, (0, -2), (1, 1), (2, 1))]
    raise InputError(f"unknown series {series!r}")


_VALID = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 3,
    "D": lambda n: n >= 4,
    "E": lambda n: n in (6, 7, 8),
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


def cartan_matrix(series: str, rank: int) -> CartanMatrix:
    """Cartan matrix of the simple type ``series`` + ``rank``."""
    series = str(series).upper()
    if series not in _VALID or not isinstance(rank, (int, np.integer)) or not _VALID[series](rank):
        raise InputError(f"not a finite simple type: {series}{rank}")
    vecs = _simple_vectors(series, int(rank))
    ip = lambda u, v: sum(a * b for a, b in zip(u, v))
    entries = tuple(
        tuple(int(2 * ip(vecs[i], vecs[j]) / ip(vecs[i], vecs[i])) for j in range(rank)) for i in range(rank)
    )
    return CartanMatrix(entries, ((series, int(rank)),))


def direct_sum(*mats: CartanMatrix) -> CartanMatrix:
    """Block-diagonal Cartan matrix of a semisimple sum."""
    n = sum(m.rank for m in mats)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i in range(m.rank):
            for j in range(m.rank):
                rows[off + i][off + j] = m[i, j]
        off += m.rank
    labels = tuple(lab for m in mats for lab in m.series_labels) if all(m.series_labels for m in mats) else ()
    return CartanMatrix(tuple(map(tuple, rows)), labels)


def cartan_from_types(types) -> CartanMatrix:
    """``[('A', 2), ('B', 3)]`` -> block-diagonal Cartan matrix."""
    types = list(types)
    if not types:
        raise InputError("empty list of simple types")
    return direct_sum(*(cartan_matrix(s, n) for s, n in types))


def validate_cartan(matrix, series_labels=()) -> CartanMatrix:
    """Check a user matrix is a finite-type Cartan matrix and wrap it."""
    try:
        rows = [list(r) for r in matrix]
    except TypeError as exc:
        raise InputError("Cartan matrix must be a list of rows") from exc
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise InputError("Cartan matrix must be square and non-empty")
    for r in rows:
        for v in r:
            try:
                integral = not isinstance(v, bool) and float(v).is_integer()
            except (TypeError, ValueError):
                integral = False
            if not integral:
                raise InputError(f"Cartan matrix entries must be integers, got {v!r}")
    rows = [[int(v) for v in r] for r in rows]
    for i in range(n):
        if rows[i][i] != 2:
            raise InputError(f"diagonal entry ({i},{i}) is {rows[i][i]}, expected 2")
        for j in range(n):
            if i == j:
                continue
            if rows[i][j] > 0:
                raise InputError(f"off-diagonal entry ({i},{j}) is positive")
            if (rows[i][j] == 0) != (rows[j][i] == 0):
                raise InputError(f"asymmetric zero pattern at ({i},{j})")
    a = qarray(rows)
    for size in range(1, n + 1):
        for sub in itertools.combinations(range(n), size):
            det = determinant(a[np.ix_(sub, sub)])
            if det <= 0:
                raise InputError(f"not of finite type: principal minor {list(sub)} has determinant {det}")
    return CartanMatrix(tuple(map(tuple, rows)), tuple(series_labels))


def _positive_by_strings(cartan: CartanMatrix) -> set:
    r = cartan.rank
    simple = [Root.simple(i, r) for i in range(r)]
    found = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for root in layer:
            for i, a in enumerate(simple):
                # p = length of the a_i-string below root; root + a_i is a root
                # iff p - <root, a_i^vee> > 0.
                p = 0
                while root - a * (p + 1) in found:
                    p += 1
                pairing = sum(c * cartan[i, j] for j, c in enumerate(root.coeffs))
                if p - pairing > 0:
                    new = root + a
                    if new not in found:
                        found.add(new)
                        nxt.append(new)
        layer = nxt
    return found


def positive_roots_by_reflection(cartan: CartanMatrix) -> set:
    """Independent oracle: close the simple roots under simple reflections."""
    r = cartan.rank
    simple = [Root.simple(i, r) for i in range(r)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        nxt = []
        for root in frontier:
            for i, a in enumerate(simple):
                pairing = sum(c * cartan[i, j] for j, c in enumerate(root.coeffs))
                img = root - a * pairing
                if img not in roots:
                    roots.add(img)
                    nxt.append(img)
        frontier = nxt
    return {x for x in roots if x.is_positive}


def generate_positive_roots(cartan: CartanMatrix) -> RootSystemData:
    """Enumerate positive roots by root strings; report highest roots per block."""
    pos = sorted(_positive_by_strings(cartan), key=root_order_key)
    comps = tuple(cartan.components())
    highest = []
    for block in comps:
        mine = [x for x in pos if x.support <= set(block)]
        top = max(mine, key=lambda x: x.height)
        highest.append(top)
    return RootSystemData(cartan, tuple(pos), comps, tuple(highest))


def root_system(series_or_cartan, rank: int | None = None) -> RootSystemData:
    """Convenience: ``root_system('A', 2)`` or ``root_system(cartan)``."""
    if isinstance(series_or_cartan, CartanMatrix):
        return generate_positive_roots(series_or_cartan)
    return generate_positive_roots(cartan_matrix(series_or_cartan, rank))


def _check_subset(rank: int, subset) -> frozenset:
    subset = frozenset(int(i) for i in subset)
    bad = [i for i in subset if not 0 <= i < rank]
    if bad:
        raise InputError(f"simple-root indices out of range 0..{rank - 1}: {sorted(bad)}")
    return subset


def spanned_roots(rsd: RootSystemData, subset) -> set:
    """All roots (both signs) supported on the simple roots in ``subset``."""
    subset = _check_subset(rsd.rank, subset)
    return {x for x in rsd.roots if x.support <= subset}


def is_trivial_subset(cartan: CartanMatrix, subset) -> bool:
    """True iff ``subset`` is orthogonal to its complement in the Dynkin diagram."""
    subset = _check_subset(cartan.rank, subset)
    rest = [j for j in range(cartan.rank) if j not in subset]
    return all(cartan[i, j] == 0 for i in subset for j in rest)
