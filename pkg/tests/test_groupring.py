import pytest
from hypothesis import given, settings, strategies as st

from omega3.errors import UsageError
from omega3.groupring import (
    RingMatrix,
    augmentation,
    dihedral,
    format_element,
    group_mul,
    left_mul_matrix,
    parse_element,
    realize,
    right_mul_matrix,
    ring_mul,
    t_map,
)
from omega3.intlat import mat_mul, mat_vec
from omega3.constructions import build_partial_l, build_resolution

from oracles import group_product_oracle, ring_product_oracle

ns = st.integers(min_value=1, max_value=4)


def coeffs(n):
    return st.lists(st.integers(-5, 5), min_size=4 * n, max_size=4 * n)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_group_table_matches_affine_model(n):
    ctx = dihedral(n)
    for g1 in range(4 * n):
        for g2 in range(4 * n):
            assert group_mul(ctx, g1, g2) == group_product_oracle(n, g1, g2)


def test_presentation_examples():
    ctx = dihedral(3)
    a, b = ctx.index(1, 0), ctx.index(0, 1)
    assert group_mul(ctx, a, b) == ctx.index(1, 1)
    assert group_mul(ctx, b, a) == ctx.index(5, 1)
    assert group_mul(ctx, b, b) == 0
    assert ctx.a * ctx.b * ctx.a == ctx.b
    assert ctx.a ** 6 == 1


def test_bad_indices_and_n():
    ctx = dihedral(2)
    with pytest.raises(UsageError):
        group_mul(ctx, 8, 0)
    with pytest.raises(UsageError):
        dihedral(0)


def test_ring_examples():
    ctx = dihedral(3)
    one, b = ctx.one, ctx.b
    assert ctx.sigma * ctx.a == ctx.sigma
    assert ((one + b) * (one - b)).is_zero()
    # alpha*beta for r=5, u=5: 25 = 1 + 4*6, so lambda = -4
    alpha = sum((ctx.a ** i for i in range(5)), ctx.zero)
    beta = sum((ctx.a ** (5 * i) for i in range(5)), ctx.zero)
    assert alpha * beta == one + 4 * ctx.sigma
    assert augmentation(ctx.sigma) == 6 and augmentation(one - ctx.a) == 0
    assert augmentation(ctx.group_sum) == 12
    assert t_map(one - b) == 2 and t_map(ctx.sigma) == 6 and t_map(ctx.group_sum) == 0


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_product_matches_oracle(data):
    n = data.draw(ns)
    ctx = dihedral(n)
    x, y = data.draw(coeffs(n)), data.draw(coeffs(n))
    got = ring_mul(ctx.from_coeffs(x), ctx.from_coeffs(y))
    assert list(got.coeffs) == ring_product_oracle(n, x, y)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_ring_axioms_and_homomorphisms(data):
    n = data.draw(ns)
    ctx = dihedral(n)
    x, y, z = (ctx.from_coeffs(data.draw(coeffs(n))) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert augmentation(x * y) == augmentation(x) * augmentation(y)
    assert t_map(x * y) == t_map(x) * t_map(y)
    assert mat_vec(left_mul_matrix(x), y.coeffs) == (x * y).coeffs
    assert mat_vec(right_mul_matrix(x), y.coeffs) == (y * x).coeffs
    assert [list(r) for r in left_mul_matrix(x * y)] == mat_mul(left_mul_matrix(x), left_mul_matrix(y))


def test_multiplication_matrices():
    ctx = dihedral(2)
    d = ctx.ring_dim
    assert [list(r) for r in left_mul_matrix(ctx.one)] == [[int(i == j) for j in range(d)] for i in range(d)]
    assert not any(any(r) for r in mat_mul(left_mul_matrix(ctx.one + ctx.b), left_mul_matrix(ctx.one - ctx.b)))
    assert not any(mat_vec(right_mul_matrix(ctx.a - ctx.one), ctx.sigma.coeffs))
    rb = mat_mul(right_mul_matrix(ctx.one + ctx.b), right_mul_matrix(ctx.one - ctx.b))
    assert not any(any(r) for r in rb)
    la = left_mul_matrix(ctx.a)
    assert all(sorted(r) == [0] * (d - 1) + [1] for r in la)


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_realize_is_functorial(data):
    n = data.draw(st.integers(1, 3))
    ctx = dihedral(n)
    m, k, j = (data.draw(st.integers(1, 3)) for _ in range(3))
    el = lambda: ctx.from_coeffs(data.draw(st.lists(st.integers(-2, 2), min_size=4 * n, max_size=4 * n)))
    A = RingMatrix(ctx, [[el() for _ in range(k)] for _ in range(m)])
    B = RingMatrix(ctx, [[el() for _ in range(j)] for _ in range(k)])
    assert realize(A @ B) == mat_mul(realize(A), realize(B))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_boundaries_compose_to_zero(n):
    ctx = dihedral(n)
    d1, d2 = build_resolution(ctx)
    assert not any(any(r) for r in mat_mul(realize(d1), realize(d2)))
    assert str(d2[(0, 2)]) == format_element(ctx.one + ctx.b * ctx.a)
    for l in [l for l in range(1, 2 * n + 1) if (2 * n) % l == 0]:
        e1, e2 = build_partial_l(ctx, l)
        assert (e1 @ e2).is_zero()


def test_canonical_text():
    ctx = dihedral(2)
    x = ctx.one - ctx.a + 2 * ctx.element(3, 1)
    assert format_element(x) == "1 - a + 2*a^3*b"
    assert format_element(ctx.zero) == "0"
    assert format_element(ctx.one + ctx.b * ctx.a) == "1 + a^3*b"
    for text in ["1 - a + 2*a^3*b", "-3*b", "a^-1", "(1+b)*(1-b)", "b*a"]:
        y = parse_element(ctx, text)
        assert parse_element(ctx, format_element(y)) == y
    assert parse_element(ctx, "a^-1") == ctx.a ** 3
    assert parse_element(ctx, "(1+b)*(1-b)").is_zero()
