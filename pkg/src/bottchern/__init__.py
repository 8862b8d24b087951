"""Bott-Chern, Aeppli, Dolbeault and de Rham cohomology of invariant complex
structures, with first-order deformation obstructions."""

from .scalars import GaussianRational, ParameterRing, TruncatedPoly, parse_poly, parse_scalar
from .exterior import BigradedForm, FrameVector, basis, conjugate, format_form, interior, parse_form, wedge
from .structure import ManifoldSpec, NonIntegrable, NotClosed, d, dbar, ddbar, parse_spec, partial, validate
from .cohomology import (
    CohomologyGroup,
    LComplex,
    aeppli,
    anti_dolbeault,
    bott_chern,
    de_rham,
    dolbeault,
    l_cohomology,
    natural_map,
)
from .deformation import (
    KodairaSpencerClass,
    Source,
    extend_class,
    first_order_family,
    jump_scan,
    obstruction_first_order,
)
from .catalog import classify, expected_dims, iwasawa, sample_spec, sigma_family, torus

__version__ = "0.1.0"
