"""Slow reference implementations used only by the tests.

None of these touch FLINT or the package's lattice code.
"""

from __future__ import annotations

import itertools
from math import gcd

import sympy


# -- the dihedral group as affine maps v -> c + s*v of Z/2n -------------------------

def affine(n, i, j):
    return (i % (2 * n), -1 if j else 1)


def affine_compose(n, f, g):
    """f o g (apply g first)."""
    (c1, s1), (c2, s2) = f, g
    return ((c1 + s1 * c2) % (2 * n), s1 * s2)


def affine_index(n, f):
    c, s = f
    return c + 2 * n * (s == -1)


def group_product_oracle(n, g1, g2):
    m = 2 * n
    f = affine(n, g1 % m, g1 // m)
    g = affine(n, g2 % m, g2 // m)
    return affine_index(n, affine_compose(n, f, g))


def ring_product_oracle(n, x, y):
    out = [0] * (4 * n)
    for g1, c1 in enumerate(x):
        if c1:
            for g2, c2 in enumerate(y):
                if c2:
                    out[group_product_oracle(n, g1, g2)] += c1 * c2
    return out


# -- integer normal forms by hand ---------------------------------------------------

def hnf_oracle(rows, ncols):
    """Row HNF by Euclidean row operations; pivots positive, entries above reduced into [0, p)."""
    a = [list(r) for r in rows]
    out = []
    col = 0
    while a and col < ncols:
        a = [r for r in a if any(r)]
        nz = [r for r in a if r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            for r in nz[1:]:
                q = r[col] // p[col]
                for k in range(ncols):
                    r[k] -= q * p[k]
            nz = [r for r in nz if r[col]]
        p = nz[0]
        if p[col] < 0:
            p[:] = [-x for x in p]
        rest = [r for r in a if r is not p]
        out.append(p)
        a = rest
        col += 1
    # reduce above pivots
    for i, row in enumerate(out):
        pc = next(k for k, x in enumerate(row) if x)
        for above in out[:i]:
            q = above[pc] // row[pc]
            if q:
                for k in range(ncols):
                    above[k] -= q * row[k]
    return [tuple(r) for r in out]


def determinantal_divisors(rows):
    m = sympy.Matrix(rows)
    r = m.rank()
    out = []
    for k in range(1, r + 1):
        g = 0
        for ri in itertools.combinations(range(m.rows), k):
            for ci in itertools.combinations(range(m.cols), k):
                g = gcd(g, int(m.extract(list(ri), list(ci)).det()))
        out.append(g)
    return out


def snf_oracle(rows):
    """Nonzero invariant factors d_k = D_k / D_(k-1)."""
    dets = determinantal_divisors(rows)
    prev = 1
    out = []
    for d in dets:
        out.append(d // prev)
        prev = d
    return out


def rational_kernel(rows, ncols):
    """Primitive integer vectors spanning the rational null space."""
    if not rows:
        rows = [[0] * ncols]
    basis = sympy.Matrix(rows).nullspace()
    out = []
    for v in basis:
        den = sympy.ilcm(1, *[sympy.fraction(x)[1] for x in v])
        w = [int(x * den) for x in v]
        g = 0
        for x in w:
            g = gcd(g, x)
        out.append([x // g for x in w])
    return out


def rational_rank(rows):
    return sympy.Matrix(rows).rank() if rows else 0


# -- Hom by solving A_g C = C B_g directly -------------------------------------------

def hom_rank_oracle(src_action, dst_action):
    """Rank of {C : A_g C = C B_g for all g}, C an s x t matrix.

    ``src_action[g]`` and ``dst_action[g]`` give the action of a generator g in
    coordinates (row convention: u_i g = sum_k A[i][k] u_k).
    """
    s = len(next(iter(src_action.values())))
    t = len(next(iter(dst_action.values())))
    eqs = []
    for g in src_action:
        A, B = src_action[g], dst_action[g]
        for i in range(s):
            for j in range(t):
                row = [0] * (s * t)
                # (A C)[i][j] - (C B)[i][j]
                for k in range(s):
                    row[k * t + j] += A[i][k]
                for k in range(t):
                    row[i * t + k] -= B[k][j]
                eqs.append(row)
    return s * t - rational_rank(eqs)
