from math import comb

import pytest
from hypothesis import given, settings

from bottchern.catalog import LABELS, iwasawa, sample_spec, torus
from bottchern.cohomology import (
    LComplex,
    aeppli,
    anti_dolbeault,
    bott_chern,
    de_rham,
    dimension_table,
    dolbeault,
    group,
    l_cohomology,
    natural_map,
)
from bottchern.exterior import BigradedForm, parse_form
from bottchern.linalg import ExactMatrix, image, kernel, span
from bottchern.structure import differential_matrix

from strategies import forms, sigma_specs

N = 3
BIDEGREES = [(p, q) for p in range(N + 1) for q in range(N + 1)]


def F(text):
    return parse_form(text, 3)


@pytest.fixture(scope="module")
def iw():
    return iwasawa()


def test_de_rham_examples(iw):
    assert de_rham(iw, 1).dim == 4
    assert de_rham(iw, 3).dim == 10
    t = torus(3)
    assert [de_rham(t, k).dim for k in range(7)] == [comb(6, k) for k in range(7)]


def test_dolbeault_examples(iw):
    assert dolbeault(iw, 1, 0).dim == 3
    g = dolbeault(iw, 0, 1)
    assert g.dim == 2
    for k in (1, 2):
        assert not g.is_zero(BigradedForm.phibar(3, k))
    assert dolbeault(sample_spec("iii.a"), 2, 0).dim == 1


def test_bott_chern_examples(iw):
    g = bott_chern(iw, 2, 0)
    assert g.dim == 3
    spanning = [F("phi[1]^phi[2]"), F("phi[2]^phi[3]"), F("phi[3]^phi[1]")]
    assert span([g.vector(f) for f in spanning], g.layout.dim).dim == 3
    assert all(g.contains(f) for f in spanning)
    assert bott_chern(iw, 2, 2).dim == 8
    t = torus(3)
    for p, q in BIDEGREES:
        assert bott_chern(t, p, q).dim == comb(3, p) * comb(3, q)


def test_aeppli_examples(iw):
    assert aeppli(iw, 1, 1).dim == 8
    assert aeppli(iw, 3, 1).dim == 3
    assert aeppli(sample_spec("iii.b"), 1, 1).dim == 6


def test_representatives_are_unit_vectors(iw):
    for kind in ("BC", "A", "dbar", "partial"):
        for p, q in BIDEGREES:
            g = group(iw, kind, p, q)
            for k, rep in enumerate(g.representatives):
                assert g.reducer(rep) == [1 if j == k else 0 for j in range(g.dim)]


def test_l_complex_examples(iw):
    assert l_cohomology(iw, 2, 2, 3).dim == 8
    # A^{1,1} sits at position p+q = 2 of L_{2,2}
    assert l_cohomology(iw, 2, 2, 2).dim == aeppli(iw, 1, 1).dim == 8
    assert [l_cohomology(iw, 2, 2, k).dim for k in range(8)] == [1, 6, 8, 8, 6, 1, 0, 0]
    g = l_cohomology(iw, 2, 2, 1)
    assert g.dim == 6
    coords = [g.reducer(BigradedForm.phi(3, 3)), g.reducer(BigradedForm.phibar(3, 3))]
    assert span(coords, g.dim).dim == 2


def test_l_complex_terms(iw):
    L = LComplex(iw, 2, 1)
    assert L.terms(0) == [(0, 0)]
    assert L.terms(1) == [(1, 0)]
    assert L.terms(2) == [(2, 1)]
    assert L.operator(1) == "ddbar"
    with pytest.raises(ValueError):
        LComplex(iw, 0, 0)


def test_l_identification_iwasawa(iw):
    for p in range(1, N + 1):
        for q in range(1, N + 1):
            assert l_cohomology(iw, p, q, p + q - 1).dim == bott_chern(iw, p, q).dim
    for p in range(N):
        for q in range(N):
            assert l_cohomology(iw, p + 1, q + 1, p + q).dim == aeppli(iw, p, q).dim


@settings(max_examples=15, deadline=None)
@given(sigma_specs())
def test_l_identification_sigma(spec):
    for p in range(1, N + 1):
        for q in range(1, N + 1):
            LComplex(spec, p, q).check()
            assert l_cohomology(spec, p, q, p + q - 1).dim == bott_chern(spec, p, q).dim


@settings(max_examples=20, deadline=None)
@given(sigma_specs())
def test_duality_and_conjugation(spec):
    bc = {pq: bott_chern(spec, *pq).dim for pq in BIDEGREES}
    a = {pq: aeppli(spec, *pq).dim for pq in BIDEGREES}
    for p, q in BIDEGREES:
        assert a[p, q] == bc[N - q, N - p]
        assert bc[p, q] == bc[q, p]
        assert a[p, q] == a[q, p]
        assert dolbeault(spec, p, q).dim == anti_dolbeault(spec, q, p).dim


@settings(max_examples=50, deadline=None)
@given(forms(bidegree=(1, 1)), forms(bidegree=(0, 0)))
def test_bott_chern_reducer_kills_ddbar(a, b):
    spec = iwasawa()
    g = bott_chern(spec, 1, 1)
    from bottchern.structure import ddbar, d
    if d(a, spec):
        return
    assert g.reducer(a + ddbar(b, spec)) == g.reducer(a)


@pytest.mark.parametrize("label", LABELS)
def test_semicontinuity(iw, label):
    central = dimension_table(iw, ("Dolbeault", "BC", "A"))
    moved = dimension_table(sample_spec(label), ("Dolbeault", "BC", "A"))
    for kind, row in central.items():
        for key, dim in row.items():
            assert moved[kind][key] <= dim, (kind, key)


def test_natural_map_examples(iw):
    t = torus(3)
    for p, q in BIDEGREES:
        m = natural_map(t, "BC->dbar", p, q)
        assert m.injective and m.surjective
    m = natural_map(iw, "BC->dbar", 1, 0)
    assert (m.source.dim, m.target.dim, m.rank) == (2, 3, 2)
    assert natural_map(iw, "dbar->A", 1, 1).rank == 6
    with pytest.raises(ValueError):
        natural_map(iw, "A->BC", 1, 1)


def _columns(spec, op, pq):
    return differential_matrix(spec, op, pq).matrix


def _oracle_rank(spec, which, p, q):
    """rank = dim(Z_src + B_tgt) - dim(B_tgt), straight from operator matrices."""
    size = comb(3, p) * comb(3, q)
    zero = ExactMatrix.zeros(0, size)

    def stack(*ms):
        rows = [r for m in ms for r in m.entries]
        return ExactMatrix(rows, size) if rows else zero

    def incoming(op, pq):
        a, b = pq
        if a < 0 or b < 0:
            return []
        return image(_columns(spec, op, pq)).vectors

    cycles = {
        "BC": kernel(stack(_columns(spec, "d", (p, q)))),
        "dbar": kernel(stack(_columns(spec, "dbar", (p, q)))),
        "partial": kernel(stack(_columns(spec, "partial", (p, q)))),
    }
    bounds = {
        "dbar": incoming("dbar", (p, q - 1)),
        "partial": incoming("partial", (p - 1, q)),
        "A": incoming("partial", (p - 1, q)) + incoming("dbar", (p, q - 1)),
    }
    src, tgt = which.split("->")
    b = span(bounds[tgt], size)
    return span(cycles[src].vectors + b.vectors, size).dim - b.dim


@pytest.mark.parametrize("which", ["BC->dbar", "BC->partial", "dbar->A", "partial->A"])
@pytest.mark.parametrize("spec_name", ["iwasawa", "ii.b", "iii.a"])
def test_natural_map_ranks_match_oracle(which, spec_name):
    spec = iwasawa() if spec_name == "iwasawa" else sample_spec(spec_name)
    for p, q in BIDEGREES:
        assert natural_map(spec, which, p, q).rank == _oracle_rank(spec, which, p, q)


def test_de_rham_maps_consistent(iw):
    # BC -> dR -> A composes to BC -> dbar -> A
    for p, q in BIDEGREES:
        a = natural_map(iw, "BC->dR", p, q).matrix
        b = natural_map(iw, "dR->A", p, q).matrix
        c = natural_map(iw, "BC->dbar", p, q).matrix
        e = natural_map(iw, "dbar->A", p, q).matrix
        assert (b @ a) == (e @ c)
