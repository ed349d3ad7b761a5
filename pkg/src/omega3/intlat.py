"""Exact integer lattice algebra.

Every sublattice of Z^d is stored by its canonical row Hermite normal form:
rows in echelon order, pivots positive, entries above each pivot reduced into
[0, pivot).  Two lattices are equal as sets exactly when their bases match, so
all "these modules coincide" checks are a single tuple comparison.

Normal forms are computed by FLINT (``python-flint``); everything built on top
(kernels, images, intersections, preimages, coordinates, quotients) lives here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

import flint

from .errors import UsageError

Vector = tuple[int, ...]
IntMatrix = list[list[int]]


# -- plain integer matrix helpers ---------------------------------------------

def identity(d: int) -> IntMatrix:
    return [[int(i == j) for j in range(d)] for i in range(d)]


def transpose(m: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def mat_mul(x: Sequence[Sequence[int]], y: Sequence[Sequence[int]]) -> IntMatrix:
    yt = list(zip(*y)) if y else []
    return [[sum(a * b for a, b in zip(row, col) if a) for col in yt] for row in x]


def mat_vec(m: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    nz = [(i, c) for i, c in enumerate(v) if c]
    return tuple(sum(row[i] * c for i, c in nz) for row in m)


def vec_mat(v: Sequence[int], m: Sequence[Sequence[int]]) -> Vector:
    """The row vector v times the matrix m."""
    if not m:
        return ()
    out = [0] * len(m[0])
    for c, row in zip(v, m):
        if c:
            for j, x in enumerate(row):
                if x:
                    out[j] += c * x
    return tuple(out)


def _fmpz(rows: Sequence[Sequence[int]], ncols: int):
    return flint.fmpz_mat(len(rows), ncols, [int(x) for row in rows for x in row])


def _rows(m) -> list[list[int]]:
    return [[int(x) for x in row] for row in m.tolist()]


# -- normal forms -------------------------------------------------------------

def hnf(m: Sequence[Sequence[int]], ncols: int | None = None) -> IntMatrix:
    """Canonical row HNF of m with zero rows dropped."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    if not m or ncols == 0:
        return []
    h = _rows(_fmpz(m, ncols).hnf())
    return [row for row in h if any(row)]


def hnf_with_transform(m: Sequence[Sequence[int]], ncols: int):
    """Return (H, U, K): U*m = H is the canonical HNF (nonzero rows only),
    and the rows of K form a saturated basis of {c : c*m = 0}."""
    r = len(m)
    if r == 0:
        return [], [], []
    aug = [list(row) + [int(i == j) for j in range(r)] for i, row in enumerate(m)]
    full = _rows(_fmpz(aug, ncols + r).hnf())
    top = [row for row in full if any(row[:ncols])]
    bottom = [row[ncols:] for row in full if not any(row[:ncols])]
    return [row[:ncols] for row in top], [row[ncols:] for row in top], bottom


def snf_diagonal(m: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    """Nonzero Smith invariants d1 | d2 | ... of m."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    if not m or ncols == 0:
        return []
    s = _fmpz(m, ncols).snf()
    k = min(len(m), ncols)
    return [abs(int(s[i, i])) for i in range(k) if int(s[i, i])]


def _pivots(basis: Sequence[Sequence[int]]) -> tuple[int, ...]:
    out = []
    for row in basis:
        for j, x in enumerate(row):
            if x:
                out.append(j)
                break
    return tuple(out)


class Lattice:
    """A sublattice of Z^dim held in canonical HNF."""

    __slots__ = ("dim", "basis", "pivots")

    def __init__(self, dim: int, rows: Iterable[Sequence[int]] = (), *, canonical: bool = False):
        rows = [list(r) for r in rows]
        for r in rows:
            if len(r) != dim:
                raise UsageError(f"vector of length {len(r)} in a lattice of dimension {dim}")
        basis = rows if canonical else hnf(rows, dim)
        self.dim = dim
        self.basis = tuple(tuple(int(x) for x in r) for r in basis)
        self.pivots = _pivots(self.basis)

    @classmethod
    def ambient(cls, dim: int) -> "Lattice":
        return cls(dim, identity(dim), canonical=True)

    @classmethod
    def zero(cls, dim: int) -> "Lattice":
        return cls(dim, (), canonical=True)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.dim == other.dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.dim, self.basis))

    def __repr__(self):
        return f"Lattice(dim={self.dim}, rank={self.rank})"

    def _check_dim(self, other_dim):
        if other_dim != self.dim:
            raise UsageError(f"dimension mismatch: {other_dim} vs {self.dim}")

    def coordinates(self, v: Sequence[int]) -> Vector | None:
        """Integer coordinates of v in the canonical basis, or None if v is not in the lattice."""
        self._check_dim(len(v))
        v = list(v)
        coords = []
        for row, p in zip(self.basis, self.pivots):
            # entries left of p are already zero by echelon order
            for j in range(p):
                if v[j]:
                    return None
            q, rem = divmod(v[p], row[p])
            if rem:
                return None
            coords.append(q)
            if q:
                for j in range(p, self.dim):
                    if row[j]:
                        v[j] -= q * row[j]
        if any(v):
            return None
        return tuple(coords)

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    __contains__ = contains

    def __le__(self, other: "Lattice") -> bool:
        return lattice_leq(self, other)

    def __add__(self, other: "Lattice") -> "Lattice":
        return lattice_sum(self, other)

    def image_under(self, m: Sequence[Sequence[int]]) -> "Lattice":
        """{m*v : v in self} for an integer matrix m acting on column vectors."""
        if m and len(m[0]) != self.dim:
            raise UsageError("matrix does not act on this lattice")
        rows = [mat_vec(m, v) for v in self.basis]
        return Lattice(len(m), rows)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.basis]


def lattice_sum(l1: Lattice, l2: Lattice) -> Lattice:
    l1._check_dim(l2.dim)
    return Lattice(l1.dim, list(l1.basis) + list(l2.basis))


def lattice_leq(l1: Lattice, l2: Lattice) -> bool:
    l1._check_dim(l2.dim)
    return all(l2.contains(v) for v in l1.basis)


def contains(l: Lattice, v: Sequence[int]) -> bool:
    return l.contains(v)


def kernel(m: Sequence[Sequence[int]], ncols: int | None = None) -> Lattice:
    """Saturated lattice of integer vectors v with m*v = 0."""
    if ncols is None:
        ncols = len(m[0]) if m else 0
    if not m or not any(any(row) for row in m):
        return Lattice.ambient(ncols)
    _, _, k = hnf_with_transform(transpose(m), len(m))
    return Lattice(ncols, k)


def image(m: Sequence[Sequence[int]], nrows: int | None = None) -> Lattice:
    """Column span of m, a sublattice of Z^rows."""
    if nrows is None:
        nrows = len(m)
    return Lattice(nrows, transpose(m))


def intersect(l1: Lattice, l2: Lattice) -> Lattice:
    l1._check_dim(l2.dim)
    if l1.rank == 0 or l2.rank == 0:
        return Lattice.zero(l1.dim)
    stacked = [list(r) for r in l1.basis] + [[-x for x in r] for r in l2.basis]
    _, _, k = hnf_with_transform(stacked, l1.dim)
    r1 = l1.rank
    return Lattice(l1.dim, [vec_mat(c[:r1], l1.basis) for c in k])


def preimage(m: Sequence[Sequence[int]], target: Lattice, ncols: int) -> Lattice:
    """{v in Z^ncols : m*v in target}."""
    if len(m) != target.dim:
        raise UsageError("matrix codomain does not match the target lattice")
    # unknowns (v, c) with m v - c*B = 0
    rows = transpose(m, ncols) if m else [[] for _ in range(ncols)]
    rows = [list(r) for r in rows] + [[-x for x in b] for b in target.basis]
    if target.dim == 0:
        return Lattice.ambient(ncols)
    _, _, k = hnf_with_transform(rows, target.dim)
    return Lattice(ncols, [c[:ncols] for c in k])


class Frame:
    """A chosen (not necessarily canonical) Z-basis of a lattice with coordinate solving."""

    def __init__(self, dim: int, rows: Sequence[Sequence[int]]):
        rows = [tuple(int(x) for x in r) for r in rows]
        h, u, k = hnf_with_transform(rows, dim)
        if k:
            raise UsageError("frame rows are linearly dependent")
        self.dim = dim
        self.rows = tuple(rows)
        self.lattice = Lattice(dim, h, canonical=True)
        self._u = u

    def __len__(self):
        return len(self.rows)

    def coordinates(self, v: Sequence[int]) -> Vector | None:
        c = self.lattice.coordinates(v)
        if c is None:
            return None
        return vec_mat(c, self._u)

    def combine(self, coords: Sequence[int]) -> Vector:
        return vec_mat(coords, self.rows)


@dataclass(frozen=True)
class QuotientInvariants:
    free_rank: int
    torsion: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for x, y in zip(self.torsion, self.torsion[1:]):
            if y % x:
                raise UsageError(f"invariant factors {self.torsion} do not form a divisibility chain")
        if any(t <= 1 for t in self.torsion):
            raise UsageError("invariant factors must exceed 1")

    @property
    def torsion_free(self) -> bool:
        return not self.torsion

    def __str__(self):
        parts = ["Z"] * self.free_rank if self.free_rank <= 3 else [f"Z^{self.free_rank}"]
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def quotient_invariants(big: Lattice, small: Lattice) -> QuotientInvariants:
    big._check_dim(small.dim)
    coords = []
    for v in small.basis:
        c = big.coordinates(v)
        if c is None:
            raise UsageError("the smaller lattice is not contained in the larger one")
        coords.append(list(c))
    diag = snf_diagonal(coords, big.rank) if coords and big.rank else []
    return QuotientInvariants(big.rank - len(diag), tuple(d for d in diag if d > 1))


def index(big: Lattice, small: Lattice) -> int | None:
    """[big : small], or None when the quotient is infinite."""
    q = quotient_invariants(big, small)
    if q.free_rank:
        return None
    out = 1
    for t in q.torsion:
        out *= t
    return out


def is_saturated(l: Lattice) -> bool:
    """True when Z^dim / l is torsion free."""
    return quotient_invariants(Lattice.ambient(l.dim), l).torsion_free


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g
