import pytest
from hypothesis import given, settings, strategies as st

from bottchern.catalog import iwasawa
from bottchern.cohomology import bott_chern
from bottchern.exterior import Layout, parse_form
from bottchern.linalg import (
    ExactMatrix,
    NotContained,
    graded_solve,
    image,
    kernel,
    quotient,
    rank,
    solve,
    span,
)
from bottchern.scalars import ONE, ZERO, ParameterRing, as_scalar
from bottchern.structure import differential_matrix

from strategies import scalars


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(scalars(), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    ).map(ExactMatrix)


def test_trivial_kernels():
    assert kernel(ExactMatrix.zeros(4, 4)).dim == 4
    assert kernel(ExactMatrix.identity(5)).dim == 0


def test_ddbar_on_constants_is_zero():
    m = differential_matrix(iwasawa(), "ddbar", (0, 0)).matrix
    assert rank(m) == 0


def test_quotient_trivial():
    whole = span(ExactMatrix.identity(3).columns(), 3)
    zero = span([], 3)
    assert quotient(whole, zero).dim == 3
    assert quotient(whole, whole).dim == 0


def test_quotient_requires_containment():
    line = span([[ONE, ZERO, ZERO]], 3)
    other = span([[ZERO, ONE, ZERO]], 3)
    with pytest.raises(NotContained):
        quotient(line, other)
    with pytest.raises(NotContained):
        quotient(line, span([], 3)).reducer([ZERO, ONE, ZERO])


def test_bott_chern_11_iwasawa():
    assert bott_chern(iwasawa(), 1, 1).dim == 4


def test_solve_trivial():
    z = ExactMatrix.zeros(2, 3)
    assert solve(z, [ZERO, ZERO]) == [ZERO] * 3
    assert solve(z, [ONE, ZERO]) is None


def test_phi1_phibar1_not_ddbar_exact():
    spec = iwasawa()
    m = differential_matrix(spec, "ddbar", (0, 0)).matrix
    target = Layout(3, [(1, 1)]).to_vector(parse_form("phi[1]^phibar[1]", 3))
    assert solve(m, target) is None
    g = bott_chern(spec, 1, 1)
    assert g.contains(parse_form("phi[1]^phibar[1]", 3))
    assert not g.is_zero(parse_form("phi[1]^phibar[1]", 3))


def test_graded_solve_invertible():
    ring = ParameterRing(("t11",), 3)
    t = ring.gen("t11")
    m = ExactMatrix([[ring.const(2), ring.const(0)], [ring.const(1), ring.const(1)]])
    b = [t * t + ring.const(1), t.conjugate()]
    out = graded_solve(m, b, ring)
    assert out.ok and out.achieved == 3
    assert [sum((row[j] * out.solution[j] for j in range(2)), ring.const(0)) for row in m.entries] == b


def test_graded_solve_obstructed_at_one():
    ring = ParameterRing(("t11",), 2)
    t = ring.gen("t11")
    m = ExactMatrix([[ring.const(0)]])
    out = graded_solve(m, [t], ring)
    assert not out.ok
    assert out.failed_order == 1 and out.achieved == 0
    assert out.residue == {(1, 0): [ONE]}


def test_graded_solve_feeds_back_higher_parts():
    # (t) x = t^2 has x = t, found only by feeding t*x back into the residual
    ring = ParameterRing(("t11",), 2)
    t = ring.gen("t11")
    m = ExactMatrix([[ring.const(1) + t]])
    out = graded_solve(m, [t + t * t], ring)
    assert out.ok
    assert out.solution == [t]


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + kernel(m).dim == m.cols
    assert image(m).dim == rank(m)
    for v in kernel(m).vectors:
        assert not any(m.apply(v))


@settings(max_examples=100, deadline=None)
@given(matrices(4, 4), st.data())
def test_reducer_ignores_denominator(m, data):
    ker = kernel(m)
    sub = span(ker.vectors[: data.draw(st.integers(0, ker.dim))], m.cols)
    q = quotient(ker, sub)
    assert q.dim == ker.dim - sub.dim
    coeffs = [data.draw(scalars()) for _ in ker.vectors]
    v = [sum((c * vec[i] for c, vec in zip(coeffs, ker.vectors)), ZERO) for i in range(m.cols)]
    w = [ZERO] * m.cols
    for vec in sub.vectors:
        c = data.draw(scalars())
        w = [a + c * b for a, b in zip(w, vec)]
    assert q.reducer([a + b for a, b in zip(v, w)]) == q.reducer(v)
    assert q.is_zero(w)
    for k, rep in enumerate(q.representatives):
        assert q.reducer(rep) == [ONE if j == k else ZERO for j in range(q.dim)]


@settings(max_examples=100, deadline=None)
@given(matrices(4, 4), st.data())
def test_graded_solve_order_zero_is_solve(m, data):
    ring = ParameterRing(("t11",), 1)
    b = [data.draw(scalars()) for _ in range(m.rows)]
    lifted = ExactMatrix([[ring.const(x) for x in row] for row in m.entries])
    out = graded_solve(lifted, [ring.const(x) for x in b], ring, 0)
    direct = solve(m, b)
    assert out.ok == (direct is not None)
    if direct is not None:
        assert [x.constant_term() for x in out.solution] == direct
