from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bottchern.exterior import (
    BigradedForm,
    FormParseError,
    FrameVector,
    Layout,
    basis,
    conjugate,
    format_form,
    interior,
    parse_form,
    wedge,
)
from bottchern.scalars import I, ParameterRing

from strategies import forms

phi = lambda k: BigradedForm.phi(3, k)
phibar = lambda k: BigradedForm.phibar(3, k)


def F(text, ring=None):
    return parse_form(text, 3, ring)


def test_wedge_examples():
    assert not wedge(phi(1), phi(1))
    assert wedge(phi(2), phi(1)) == -wedge(phi(1), phi(2))
    assert wedge(wedge(phi(1), phi(2)), phibar(1)) == F("phi[1]^phi[2]^phibar[1]")


def test_interior_examples():
    a = wedge(phi(2), phi(3))
    assert interior(FrameVector(2), a) == phi(3)
    assert interior(FrameVector(3), a) == -phi(2)
    assert not interior(FrameVector(1), phibar(1))


def test_conjugate_examples():
    assert conjugate(phi(3)) == phibar(3)
    assert conjugate(F("i*phi[1]^phibar[2]")) == F("i*phi[2]^phibar[1]")
    a = F("phi[1]^phi[2]^phibar[1]")
    assert conjugate(conjugate(a)) == a


def test_basis_examples():
    assert [format_form(BigradedForm(3, {m: 1})) for m in basis(3, 1, 0)] == ["phi[1]", "phi[2]", "phi[3]"]
    assert len(basis(3, 2, 2)) == 9
    assert len(basis(3, 3, 3)) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_basis_counts(n):
    for p in range(n + 1):
        for q in range(n + 1):
            assert len(basis(n, p, q)) == comb(n, p) * comb(n, q)


@pytest.mark.parametrize(
    "text",
    [
        "-phi[1]^phi[2] + (1/2+i)*phi[3]^phibar[1]",
        "phi[1]",
        "0",
        "-i*phibar[1]^phibar[2]",
        "phi[1]^phi[2]^phi[3]^phibar[1]^phibar[2]^phibar[3]",
    ],
)
def test_form_round_trip(text):
    a = F(text)
    assert format_form(a) == text
    assert F(format_form(a)) == a


def test_parse_reorders_with_sign():
    assert F("phibar[1]^phi[2]") == -F("phi[2]^phibar[1]")
    assert not F("phi[1]^phi[1]")


def test_parse_polynomial_coefficients():
    ring = ParameterRing(("t21",), 1)
    a = F("(t21 + t21bar)*phi[1]^phibar[1]", ring)
    assert F(format_form(a), ring) == a


@pytest.mark.parametrize("bad", ["phi[4]", "phi[1]^^phi[2]", "psi[1]", "phi[1] +", "2*"])
def test_parse_errors(bad):
    with pytest.raises(FormParseError):
        F(bad)


def test_layout_round_trip():
    lay = Layout(3, [(2, 1), (1, 2)])
    a = F("phi[1]^phi[2]^phibar[3] - 2*phi[3]^phibar[1]^phibar[2]")
    assert lay.dim == 18
    assert lay.to_form(lay.to_vector(a)) == a
    with pytest.raises(ValueError):
        lay.to_vector(phi(1))


@settings(max_examples=150)
@given(forms(), forms(), forms())
def test_wedge_laws(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    sign = (-1) ** (a.degree * b.degree) if a and b else 1
    assert wedge(a, b) == wedge(b, a) * sign
    assert conjugate(wedge(a, b)) == wedge(conjugate(a), conjugate(b))


@settings(max_examples=150)
@given(forms(), forms(), st.integers(1, 3), st.booleans())
def test_interior_antiderivation(a, b, k, hol):
    v = FrameVector(k, hol)
    lhs = interior(v, wedge(a, b))
    sign = (-1) ** a.degree if a else 1
    assert lhs == wedge(interior(v, a), b) + wedge(a, interior(v, b)) * sign
    assert not interior(v, interior(v, a))


@settings(max_examples=100)
@given(forms())
def test_format_parse_round_trip_random(a):
    assert F(format_form(a)) == a
