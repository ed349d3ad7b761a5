"""Right ZD-submodules of free modules, realized as integer lattices.

A :class:`GModule` is a lattice inside Z^(4n*k), the coefficient space of
ZD^k, that is closed under right multiplication by a and b.  Generators are
remembered when a module is built from them, since homomorphism lattices are
solved through the images of generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from . import intlat
from .errors import ClosureError, UsageError
from .groupring import (
    DihedralContext,
    RingElement,
    RingMatrix,
    act_flat,
    flatten,
    realize,
    right_mul_matrix,
)
from .intlat import IntMatrix, Lattice, Vector


class GModule:
    __slots__ = ("ctx", "free_rank", "lattice", "generators")

    def __init__(self, ctx: DihedralContext, free_rank: int, lattice: Lattice,
                 generators: Sequence[Sequence[int]] | None = None, *, check: bool = True):
        if lattice.dim != ctx.ring_dim * free_rank:
            raise UsageError(f"lattice of dimension {lattice.dim} does not live in ZD^{free_rank}")
        self.ctx = ctx
        self.free_rank = free_rank
        self.lattice = lattice
        self.generators = tuple(tuple(g) for g in generators) if generators is not None else None
        if check and not is_closed(ctx, lattice):
            raise ClosureError("lattice is not closed under the right action of a and b")

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def __eq__(self, other):
        return (isinstance(other, GModule) and other.ctx == self.ctx
                and other.free_rank == self.free_rank and other.lattice == self.lattice)

    def __hash__(self):
        return hash((self.ctx.n, self.free_rank, self.lattice))

    def __contains__(self, v):
        if v and isinstance(v[0], RingElement):
            v = flatten(v)
        return self.lattice.contains(v)

    def __le__(self, other: "GModule") -> bool:
        return self.lattice <= other.lattice

    def __repr__(self):
        return f"GModule(n={self.ctx.n}, ZD^{self.free_rank}, rank={self.rank})"

    def ring_generators(self) -> tuple[Vector, ...]:
        """ZD-generators: the recorded ones, else the Z-basis."""
        return self.generators if self.generators is not None else self.lattice.basis

    def act(self, g: int) -> Lattice:
        return Lattice(self.dim, [act_flat(self.ctx, v, g) for v in self.lattice.basis])


def as_flat(v) -> Vector:
    if isinstance(v, RingElement):
        return v.coeffs
    if v and isinstance(v[0], RingElement):
        return flatten(v)
    return tuple(v)


def is_closed(ctx: DihedralContext, lattice: Lattice) -> bool:
    a, b = ctx.index(1, 0), ctx.index(0, 1)
    for v in lattice.basis:
        if not lattice.contains(act_flat(ctx, v, a)) or not lattice.contains(act_flat(ctx, v, b)):
            return False
    return True


@lru_cache(maxsize=None)
def free_module(ctx: DihedralContext, k: int) -> GModule:
    gens = [tuple(int(j == i * ctx.ring_dim) for j in range(ctx.ring_dim * k)) for i in range(k)]
    return GModule(ctx, k, Lattice.ambient(ctx.ring_dim * k), gens, check=False)


def block_right_mul(ctx: DihedralContext, k: int, r: RingElement) -> IntMatrix:
    """Z-realization of right multiplication by r on ZD^k (block diagonal)."""
    d = ctx.ring_dim
    block = right_mul_matrix(r)
    out = [[0] * (d * k) for _ in range(d * k)]
    for blk in range(k):
        for i in range(d):
            row = out[blk * d + i]
            for j in range(d):
                if block[i][j]:
                    row[blk * d + j] = block[i][j]
    return out


@dataclass(frozen=True)
class GMapKernelResult:
    kernel: GModule
    image: GModule


def kernel_image(mat: RingMatrix) -> GMapKernelResult:
    """Kernel in ZD^cols and image in ZD^rows of a ring-matrix map."""
    ctx = mat.ctx
    z = realize(mat)
    d = ctx.ring_dim
    ker = intlat.kernel(z, d * mat.cols)
    img = intlat.image(z, d * mat.rows)
    columns = [flatten(mat.column(i)) for i in range(mat.cols)]
    return GMapKernelResult(GModule(ctx, mat.cols, ker), GModule(ctx, mat.rows, img, columns))


def generated_by(ctx: DihedralContext, free_rank: int, generators: Sequence) -> GModule:
    """Smallest G-closed lattice containing the generators.

    The Z-span is repeatedly enlarged by its translates under a and b until it
    stops growing, which happens after finitely many steps.
    """
    gens = [as_flat(g) for g in generators]
    dim = ctx.ring_dim * free_rank
    for g in gens:
        if len(g) != dim:
            raise UsageError(f"generator of length {len(g)} outside ZD^{free_rank}")
    a, b = ctx.index(1, 0), ctx.index(0, 1)
    lat = Lattice(dim, gens)
    while True:
        rows = list(lat.basis)
        rows += [act_flat(ctx, v, a) for v in lat.basis]
        rows += [act_flat(ctx, v, b) for v in lat.basis]
        grown = Lattice(dim, rows)
        if grown == lat:
            break
        lat = grown
    return GModule(ctx, free_rank, lat, gens, check=False)


def submodule_times(mod: GModule, r: RingElement, *, raw: bool = False):
    """The submodule mod*r, closed under the action.

    With ``raw=True`` return ``(closed, enlarged)`` where ``enlarged`` says
    whether closing the plain image {m*r} added anything.
    """
    mat = block_right_mul(mod.ctx, mod.free_rank, r)
    img = mod.lattice.image_under(mat)
    gens = [intlat.mat_vec(mat, g) for g in mod.ring_generators()]
    if is_closed(mod.ctx, img):
        out = GModule(mod.ctx, mod.free_rank, img, gens, check=False)
        enlarged = False
    else:
        closed = generated_by(mod.ctx, mod.free_rank, list(img.basis))
        out = GModule(mod.ctx, mod.free_rank, closed.lattice, gens, check=False)
        enlarged = True
    return (out, enlarged) if raw else out


def _require_ideal(mod: GModule, name: str):
    if mod.free_rank != 1:
        raise UsageError(f"{name} expects a submodule of ZD (free rank 1)")


def annihilator_left(ideal: GModule) -> Lattice:
    """{mu in ZD : mu*x = 0 for every x in the ideal}."""
    _require_ideal(ideal, "annihilator_left")
    ctx = ideal.ctx
    rows = []
    for x in ideal.lattice.basis:
        rows.extend(right_mul_matrix(ctx.from_coeffs(x)))
    return intlat.kernel(rows, ctx.ring_dim)


def multiplier_lattice(src: GModule, dst: GModule) -> Lattice:
    """{mu in ZD : mu*s in dst for every generator s of src}."""
    _require_ideal(src, "multiplier_lattice")
    _require_ideal(dst, "multiplier_lattice")
    ctx = src.ctx
    target = dst.lattice
    out = Lattice.ambient(ctx.ring_dim)
    for s in src.ring_generators():
        rm = right_mul_matrix(ctx.from_coeffs(s))
        out = intlat.intersect(out, intlat.preimage(rm, target, ctx.ring_dim))
    return out


@dataclass(frozen=True)
class HomData:
    """Hom_ZD(src, dst) described through generator images.

    ``lattice`` lives in dst-ambient^len(generators): each vector lists the
    images of the source generators.  ``section`` writes every canonical basis
    vector u of src as sum_i g_i * r_i (rows hold the r_i coefficients).
    """
    src: GModule
    dst: GModule
    generators: tuple[Vector, ...]
    lattice: Lattice
    section: tuple[tuple[RingElement, ...], ...]

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def as_matrix(self, images: Sequence[int]) -> IntMatrix:
        """Rows f(u_j) (dst ambient coordinates) for the canonical basis u_j of src."""
        ctx = self.src.ctx
        d = self.dst.dim
        gens = [images[i * d:(i + 1) * d] for i in range(len(self.generators))]
        out = []
        for coeffs in self.section:
            acc = [0] * d
            for g, r in zip(gens, coeffs):
                if r.is_zero():
                    continue
                img = intlat.mat_vec(block_right_mul(ctx, self.dst.free_rank, r), g)
                for j, x in enumerate(img):
                    acc[j] += x
            out.append(acc)
        return out

    def basis_matrices(self) -> list[IntMatrix]:
        return [self.as_matrix(v) for v in self.lattice.basis]


def _hom_data(src: GModule, dst: GModule) -> HomData:
    if src.ctx != dst.ctx:
        raise UsageError("modules over different groups")
    ctx = src.ctx
    d = ctx.ring_dim
    gens = tuple(src.ring_generators())
    m = len(gens)
    # relations among the generators: kernel of ZD^m -> ZD^k, E_i -> g_i
    gmat = RingMatrix.from_columns(ctx, [_unflat(ctx, g) for g in gens])
    z = realize(gmat)
    relations = intlat.kernel(z, d * m)
    # unknowns: coordinates c_i of each generator image in the dst basis
    s = dst.rank
    dst_basis = dst.lattice.basis
    eq_rows = []  # each row: one linear equation in the m*s unknowns
    for rho in relations.basis:
        parts = [ctx.from_coeffs(rho[i * d:(i + 1) * d]) for i in range(m)]
        total = [[0] * (m * s) for _ in range(dst.dim)]
        for i, r in enumerate(parts):
            if r.is_zero():
                continue
            mr = block_right_mul(ctx, dst.free_rank, r)
            for kk, v in enumerate(dst_basis):
                col = intlat.mat_vec(mr, v)
                for row_idx, x in enumerate(col):
                    if x:
                        total[row_idx][i * s + kk] += x
        eq_rows.extend(row for row in total if any(row))
    sol = intlat.kernel(eq_rows, m * s) if eq_rows else Lattice.ambient(m * s)
    images = []
    for c in sol.basis:
        vec = []
        for i in range(m):
            vec.extend(intlat.vec_mat(c[i * s:(i + 1) * s], dst_basis))
        images.append(vec)
    lattice = Lattice(dst.dim * m, images) if images else Lattice.zero(dst.dim * m)
    # section: express each canonical basis vector of src through the generators
    h, u, _ = intlat.hnf_with_transform(intlat.transpose(z), d * gmat.rows)
    span = Lattice(d * gmat.rows, h, canonical=True)
    section = []
    for v in src.lattice.basis:
        c = span.coordinates(v)
        if c is None:
            raise ClosureError("module basis vector not generated by the recorded generators")
        r = intlat.vec_mat(c, u)
        section.append(tuple(ctx.from_coeffs(r[i * d:(i + 1) * d]) for i in range(m)))
    return HomData(src, dst, gens, lattice, tuple(section))


def _unflat(ctx, v):
    d = ctx.ring_dim
    return tuple(ctx.from_coeffs(v[i:i + d]) for i in range(0, len(v), d))


def hom_data(src: GModule, dst: GModule) -> HomData:
    return _hom_data(src, dst)


def hom_lattice(src: GModule, dst: GModule) -> list[IntMatrix]:
    """Z-basis of Hom_ZD(src, dst); each map is the matrix of rows f(u_j)."""
    return hom_data(src, dst).basis_matrices()


def is_equivariant(ctx: DihedralContext, src: GModule, rows: Sequence[Sequence[int]],
                   dst: GModule | None = None) -> bool:
    """Check that the Z-linear map u_j -> rows[j] commutes with a and b."""
    basis = src.lattice.basis
    for g in (ctx.index(1, 0), ctx.index(0, 1)):
        for u, fu in zip(basis, rows):
            c = src.lattice.coordinates(act_flat(ctx, u, g))
            lhs = intlat.vec_mat(c, rows)
            if tuple(lhs) != act_flat(ctx, fu, g):
                return False
    if dst is not None and not all(dst.lattice.contains(r) for r in rows):
        return False
    return True
