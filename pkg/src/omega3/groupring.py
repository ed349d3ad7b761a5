"""Exact arithmetic in the integral group ring of the dihedral group of order 4n.

The group is presented as <a, b | a^(2n) = b^2 = 1, aba = b>.  Group elements
a^i b^j (0 <= i < 2n, j in {0, 1}) are indexed by ``i + 2n*j``, and every
coefficient vector, realized matrix and serialized value uses that order.

Ring elements act on coefficient vectors through :func:`left_mul_matrix` and
:func:`right_mul_matrix`.  A :class:`RingMatrix` with m rows and k columns is
the right-module map ZD^k -> ZD^m sending the basis vector E_i to
sum_j e_j * entry[j][i], so it acts on column vectors by left multiplication
and composes by ordinary matrix product.
"""

from __future__ import annotations

import re
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .errors import UsageError


class DihedralContext:
    """The group D_{4n} together with its multiplication table."""

    def __init__(self, n: int):
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise UsageError(f"n must be a positive integer, got {n!r}")
        self.n = n
        self.rot = 2 * n
        self.group_order = 4 * n
        self.ring_dim = 4 * n

    def __repr__(self):
        return f"DihedralContext(n={self.n})"

    def __eq__(self, other):
        return isinstance(other, DihedralContext) and other.n == self.n

    def __hash__(self):
        return hash(("D4n", self.n))

    # -- group elements -------------------------------------------------
    def index(self, i: int, j: int = 0) -> int:
        return i % self.rot + self.rot * (j % 2)

    def decompose(self, g: int) -> tuple[int, int]:
        self._check_index(g)
        return g % self.rot, g // self.rot

    def _check_index(self, g):
        if isinstance(g, bool) or not isinstance(g, int) or not 0 <= g < self.group_order:
            raise UsageError(f"group element index {g!r} outside [0, {self.group_order})")

    @cached_property
    def mul_table(self) -> tuple[tuple[int, ...], ...]:
        m = self.rot
        rows = []
        for g1 in range(self.group_order):
            i1, j1 = g1 % m, g1 // m
            sign = -1 if j1 else 1
            rows.append(tuple(
                (i1 + sign * (g2 % m)) % m + m * ((j1 + g2 // m) % 2)
                for g2 in range(self.group_order)
            ))
        return tuple(rows)

    @cached_property
    def inverse_table(self) -> tuple[int, ...]:
        table = self.mul_table
        return tuple(row.index(0) for row in table)

    # -- ring elements --------------------------------------------------
    def element(self, i: int = 0, j: int = 0, coeff: int = 1) -> "RingElement":
        coeffs = [0] * self.ring_dim
        coeffs[self.index(i, j)] = coeff
        return RingElement(self, coeffs)

    def scalar(self, c: int) -> "RingElement":
        return self.element(0, 0, c)

    def from_coeffs(self, coeffs: Iterable[int]) -> "RingElement":
        return RingElement(self, coeffs)

    def geometric_sum(self, step: int, count: int) -> "RingElement":
        """sum_{i < count} a^(step*i)."""
        coeffs = [0] * self.ring_dim
        for i in range(count):
            coeffs[self.index(step * i)] += 1
        return RingElement(self, coeffs)

    @cached_property
    def zero(self):
        return RingElement(self, [0] * self.ring_dim)

    @cached_property
    def one(self):
        return self.element(0, 0)

    @cached_property
    def a(self):
        return self.element(1, 0)

    @cached_property
    def b(self):
        return self.element(0, 1)

    @cached_property
    def sigma(self):
        """Sigma = 1 + a + ... + a^(2n-1)."""
        return self.geometric_sum(1, self.rot)

    @cached_property
    def group_sum(self):
        """N, the sum of all 4n group elements."""
        return RingElement(self, [1] * self.ring_dim)

    def parse(self, text: str) -> "RingElement":
        return parse_element(self, text)


@lru_cache(maxsize=None)
def dihedral(n: int) -> DihedralContext:
    return DihedralContext(n)


def group_mul(ctx: DihedralContext, g1: int, g2: int) -> int:
    ctx._check_index(g1)
    ctx._check_index(g2)
    return ctx.mul_table[g1][g2]


class RingElement:
    """An element of Z[D_{4n}] stored as its coefficient vector."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx: DihedralContext, coeffs: Iterable[int]):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != ctx.ring_dim:
            raise UsageError(f"expected {ctx.ring_dim} coefficients, got {len(coeffs)}")
        self.ctx = ctx
        self.coeffs = coeffs
        self._hash = None

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ctx != self.ctx:
                raise UsageError("ring elements from different contexts")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return self.ctx.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(self.ctx, (x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RingElement(self.ctx, (x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return RingElement(self.ctx, (-x for x in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return RingElement(self.ctx, (other * x for x in self.coeffs))
        if isinstance(other, RingElement):
            return ring_mul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return RingElement(self.ctx, (other * x for x in self.coeffs))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("negative powers are only defined for group elements")
        result, base = self.ctx.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            other = self.ctx.scalar(other)
        return (isinstance(other, RingElement) and other.ctx == self.ctx
                and other.coeffs == self.coeffs)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.n, self.coeffs))
        return self._hash

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def augmentation(self) -> int:
        return augmentation(self)

    def t_value(self) -> int:
        return t_map(self)

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"RingElement(n={self.ctx.n}, {format_element(self)!r})"


def _check_same(x: RingElement, y: RingElement):
    if x.ctx != y.ctx:
        raise UsageError("ring elements from different contexts")


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    _check_same(x, y)
    table = x.ctx.mul_table
    out = [0] * x.ctx.ring_dim
    ynz = [(g, c) for g, c in enumerate(y.coeffs) if c]
    for g1, c1 in enumerate(x.coeffs):
        if c1:
            row = table[g1]
            for g2, c2 in ynz:
                out[row[g2]] += c1 * c2
    return RingElement(x.ctx, out)


def augmentation(x: RingElement) -> int:
    """The ring map ZD -> Z sending every group element to 1."""
    return sum(x.coeffs)


def t_map(x: RingElement) -> int:
    """The ring map ZD -> Z with a -> 1 and b -> -1."""
    m = x.ctx.rot
    return sum(x.coeffs[:m]) - sum(x.coeffs[m:])


@lru_cache(maxsize=4096)
def left_mul_matrix(x: RingElement) -> tuple[tuple[int, ...], ...]:
    """Integer matrix of y -> x*y; column g holds the coefficients of x*g."""
    d = x.ctx.ring_dim
    table = x.ctx.mul_table
    out = [[0] * d for _ in range(d)]
    for g1, c in enumerate(x.coeffs):
        if c:
            row = table[g1]
            for g2 in range(d):
                out[row[g2]][g2] += c
    return tuple(map(tuple, out))


@lru_cache(maxsize=4096)
def right_mul_matrix(x: RingElement) -> tuple[tuple[int, ...], ...]:
    """Integer matrix of y -> y*x; column g holds the coefficients of g*x."""
    d = x.ctx.ring_dim
    table = x.ctx.mul_table
    out = [[0] * d for _ in range(d)]
    for g1, c in enumerate(x.coeffs):
        if c:
            for g2 in range(d):
                out[table[g2][g1]][g2] += c
    return tuple(map(tuple, out))


# -- free modules ZD^k --------------------------------------------------------

def flatten(vec: Sequence[RingElement]) -> tuple[int, ...]:
    """Concatenate the coefficient vectors of an element of ZD^k."""
    out = []
    for x in vec:
        out.extend(x.coeffs)
    return tuple(out)


def unflatten(ctx: DihedralContext, ints: Sequence[int]) -> tuple[RingElement, ...]:
    d = ctx.ring_dim
    if len(ints) % d:
        raise UsageError(f"vector length {len(ints)} is not a multiple of {d}")
    return tuple(RingElement(ctx, ints[i:i + d]) for i in range(0, len(ints), d))


def free_times(vec: Sequence[RingElement], r: RingElement) -> tuple[RingElement, ...]:
    """Right multiplication of an element of ZD^k by a ring element."""
    return tuple(x * r for x in vec)


def basis_vector(ctx: DihedralContext, k: int, i: int,
                 coeff: RingElement | int = 1) -> tuple[RingElement, ...]:
    """E_i * coeff in ZD^k (0-based i)."""
    if isinstance(coeff, int):
        coeff = ctx.scalar(coeff)
    return tuple(coeff if j == i else ctx.zero for j in range(k))


@lru_cache(maxsize=None)
def right_action_perm(ctx: DihedralContext, g: int) -> tuple[int, ...]:
    """perm[h] = index of h*g, so that (v*g)[perm[h]] = v[h]."""
    table = ctx.mul_table
    return tuple(table[h][g] for h in range(ctx.group_order))


def act_flat(ctx: DihedralContext, vec: Sequence[int], g: int) -> tuple[int, ...]:
    """Right action of the group element g on a flattened element of ZD^k."""
    d = ctx.ring_dim
    perm = right_action_perm(ctx, g)
    out = [0] * len(vec)
    for start in range(0, len(vec), d):
        for h in range(d):
            c = vec[start + h]
            if c:
                out[start + perm[h]] = c
    return tuple(out)


class RingMatrix:
    """An m x k matrix over ZD, read as the right-module map ZD^k -> ZD^m."""

    __slots__ = ("ctx", "entries", "rows", "cols")

    def __init__(self, ctx: DihedralContext, entries: Sequence[Sequence]):
        rows = []
        for row in entries:
            out = []
            for x in row:
                if isinstance(x, int):
                    x = ctx.scalar(x)
                elif x.ctx != ctx:
                    raise UsageError("matrix entry from a different context")
                out.append(x)
            rows.append(tuple(out))
        if rows and len({len(r) for r in rows}) != 1:
            raise UsageError("ragged ring matrix")
        self.ctx = ctx
        self.entries = tuple(rows)
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0

    @classmethod
    def identity(cls, ctx, k):
        return cls(ctx, [[1 if i == j else 0 for i in range(k)] for j in range(k)])

    @classmethod
    def from_columns(cls, ctx, columns: Sequence[Sequence[RingElement]]):
        m = len(columns[0])
        return cls(ctx, [[col[j] for col in columns] for j in range(m)])

    def __getitem__(self, key):
        j, i = key
        return self.entries[j][i]

    def column(self, i: int) -> tuple[RingElement, ...]:
        return tuple(row[i] for row in self.entries)

    def __eq__(self, other):
        return isinstance(other, RingMatrix) and other.ctx == self.ctx and other.entries == self.entries

    def __hash__(self):
        return hash((self.ctx.n, self.entries))

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.ctx != other.ctx:
            raise UsageError("ring matrices from different contexts")
        if self.cols != other.rows:
            raise UsageError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        zero = self.ctx.zero
        out = []
        for j in range(self.rows):
            row = []
            for i in range(other.cols):
                acc = zero
                for l in range(self.cols):
                    acc = acc + self.entries[j][l] * other.entries[l][i]
                row.append(acc)
            out.append(row)
        return RingMatrix(self.ctx, out)

    def apply(self, vec: Sequence[RingElement]) -> tuple[RingElement, ...]:
        if len(vec) != self.cols:
            raise UsageError(f"expected a vector of length {self.cols}")
        zero = self.ctx.zero
        out = []
        for row in self.entries:
            acc = zero
            for x, v in zip(row, vec):
                acc = acc + x * v
            out.append(acc)
        return tuple(out)

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def realize(self):
        return realize(self)

    def __str__(self):
        return "\n".join("[ " + " | ".join(format_element(x) for x in row) + " ]"
                         for row in self.entries)

    def __repr__(self):
        return f"RingMatrix(n={self.ctx.n}, {self.rows}x{self.cols})"


def realize(mat: RingMatrix) -> list[list[int]]:
    """(4n*m) x (4n*k) integer matrix whose (j, i) block is left_mul_matrix(entry j,i)."""
    d = mat.ctx.ring_dim
    out = [[0] * (d * mat.cols) for _ in range(d * mat.rows)]
    for j, row in enumerate(mat.entries):
        for i, x in enumerate(row):
            if x.is_zero():
                continue
            block = left_mul_matrix(x)
            for r in range(d):
                dst = out[j * d + r]
                src = block[r]
                for c in range(d):
                    if src[c]:
                        dst[i * d + c] = src[c]
    return out


# -- canonical text form ------------------------------------------------------

def _monomial(ctx: DihedralContext, g: int) -> str:
    i, j = g % ctx.rot, g // ctx.rot
    parts = []
    if i:
        parts.append("a" if i == 1 else f"a^{i}")
    if j:
        parts.append("b")
    return "*".join(parts)


def format_element(x: RingElement) -> str:
    """Canonical text: ``c*a^i*b^j`` terms in index order, e.g. ``1 - a + 2*a^3*b``."""
    out = []
    for g, c in enumerate(x.coeffs):
        if not c:
            continue
        mono = _monomial(x.ctx, g)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(("+ " if c > 0 else "- ") + body)
    return " ".join(out) if out else "0"


_TOKEN = re.compile(r"\s*(?:(\d+)|([ab])(?:\^(-?\d+))?|([-+*()]))")


def parse_element(ctx: DihedralContext, text: str) -> RingElement:
    """Parse sums of products of integers, ``a``, ``a^k``, ``b``; e.g. ``1 + b*a``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse ring element at {text[pos:]!r}")
        pos = m.end()
        num, gen, exp, op = m.groups()
        if num is not None:
            tokens.append(ctx.scalar(int(num)))
        elif gen is not None:
            e = int(exp) if exp is not None else 1
            tokens.append(ctx.element(e, 0) if gen == "a" else ctx.element(0, e))
        else:
            tokens.append(op)
    if not tokens:
        raise UsageError("empty ring element")

    def expr(k):
        sign = 1
        if tokens[k] in ("+", "-"):
            sign = -1 if tokens[k] == "-" else 1
            k += 1
        val, k = term(k)
        total = val * sign
        while k < len(tokens) and tokens[k] in ("+", "-"):
            sign = -1 if tokens[k] == "-" else 1
            val, k = term(k + 1)
            total = total + val * sign
        return total, k

    def term(k):
        val, k = factor(k)
        while k < len(tokens) and tokens[k] == "*":
            rhs, k = factor(k + 1)
            val = val * rhs
        return val, k

    def factor(k):
        if k >= len(tokens):
            raise UsageError(f"unexpected end of {text!r}")
        tok = tokens[k]
        if tok == "(":
            val, k = expr(k + 1)
            if k >= len(tokens) or tokens[k] != ")":
                raise UsageError(f"unbalanced parentheses in {text!r}")
            return val, k + 1
        if isinstance(tok, RingElement):
            return tok, k + 1
        raise UsageError(f"unexpected {tok!r} in {text!r}")

    val, k = expr(0)
    if k != len(tokens):
        raise UsageError(f"trailing input in {text!r}")
    return val
