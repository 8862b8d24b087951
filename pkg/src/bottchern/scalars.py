"""Exact scalars: Gaussian rationals and truncated multivariate polynomials.

Everything downstream is built over one of two coefficient types:

* :class:`GaussianRational`, an element of Q(i) stored as a pair of
  :class:`fractions.Fraction`;
* :class:`TruncatedPoly`, a polynomial over Q(i) in the generators of a
  :class:`ParameterRing`, with every monomial of total degree above the
  ring's truncation order discarded.

Both types are immutable and support ``+ - *``, unary minus, ``conjugate()``
and truth testing (``bool(x)`` is ``False`` exactly for zero).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "GaussianRational",
    "ParameterRing",
    "TruncatedPoly",
    "ScalarParseError",
    "RingMismatch",
    "ZERO",
    "ONE",
    "I",
    "as_scalar",
    "conj",
    "parse_scalar",
    "format_scalar",
    "parse_poly",
    "format_poly",
    "arith",
    "conj_scalar",
    "poly_mul",
    "conj_poly",
]


class ScalarParseError(ValueError):
    """A scalar or polynomial literal could not be parsed."""


class RingMismatch(ValueError):
    """Two truncated polynomials live in different parameter rings."""


class GaussianRational:
    """An element ``re + im*i`` of Q(i)."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)
        self._hash = None

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        obj._hash = None
        return obj

    def __repr__(self) -> str:
        return f"GaussianRational({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, TruncatedPoly):
            return other == self
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.re, self.im)) if self.im else hash(self.re)
        return self._hash

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b and not d:
                return GaussianRational._raw(a * c, b)
            return GaussianRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other) * self.inverse()
        return NotImplemented

    def inverse(self) -> "GaussianRational":
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise ZeroDivisionError("division by the zero Gaussian rational")
        return GaussianRational._raw(self.re / norm, -self.im / norm)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def height(self) -> int:
        """Bit size of the largest numerator or denominator (pivot heuristic)."""
        return max(
            abs(self.re.numerator).bit_length(),
            self.re.denominator.bit_length(),
            abs(self.im.numerator).bit_length(),
            self.im.denominator.bit_length(),
        )

    def is_real(self) -> bool:
        return not self.im


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

Scalar = Union[GaussianRational, "TruncatedPoly"]


def as_scalar(x) -> GaussianRational | "TruncatedPoly":
    """Coerce ints, Fractions, complex numbers with integral parts and strings."""
    if isinstance(x, (GaussianRational, TruncatedPoly)):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, complex):
        return GaussianRational(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot use {x!r} as an exact scalar")


def conj(x):
    """Complex conjugate of a GaussianRational or TruncatedPoly."""
    return x.conjugate()


def arith(a: GaussianRational, b: GaussianRational, op: str) -> GaussianRational:
    """Field operation ``a op b`` for ``op`` in ``+ - * /`` (also ``×``/``÷``)."""
    a, b = as_scalar(a), as_scalar(b)
    if op == "+":
        return a + b
    if op in ("-", "−"):
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def conj_scalar(a: GaussianRational) -> GaussianRational:
    return as_scalar(a).conjugate()


# ---------------------------------------------------------------------------
# scalar literals

_RATIONAL = r"\d+(?:/\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_RATIONAL}$")
_IMAG_RE = re.compile(rf"^[+-]?(?:{_RATIONAL})?$")


def _rational(text: str, literal: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ScalarParseError(f"bad rational {text!r} in scalar literal {literal!r}") from exc
    return value


def parse_scalar(text: str) -> GaussianRational:
    """Parse ``a/b+c/d i`` style literals: ``-1``, ``1/2-3i``, ``i``, ``-2/3i``."""
    s = "".join(str(text).split())
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ScalarParseError("empty scalar literal")
    if not s.endswith("i"):
        if not _REAL_RE.match(s):
            raise ScalarParseError(f"bad scalar literal {text!r}")
        return GaussianRational(_rational(s, text))
    body = s[:-1]
    split = max(body.rfind("+"), body.rfind("-"))
    if split > 0:
        re_part, im_part = body[:split], body[split:]
        if not _REAL_RE.match(re_part):
            raise ScalarParseError(f"bad real part in scalar literal {text!r}")
        re_value = _rational(re_part, text)
    else:
        re_value, im_part = Fraction(0), body
    if not _IMAG_RE.match(im_part):
        raise ScalarParseError(f"bad imaginary part in scalar literal {text!r}")
    if im_part in ("", "+"):
        im_value = Fraction(1)
    elif im_part == "-":
        im_value = Fraction(-1)
    else:
        im_value = _rational(im_part, text)
    return GaussianRational(re_value, im_value)


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_scalar(c: GaussianRational) -> str:
    """Canonical literal; ``parse_scalar(format_scalar(c)) == c``."""
    re_part, im_part = c.re, c.im
    if not im_part:
        return _fmt_fraction(re_part)
    if im_part == 1:
        im_text = "i"
    elif im_part == -1:
        im_text = "-i"
    else:
        im_text = _fmt_fraction(im_part) + "i"
    if not re_part:
        return im_text
    sign = "" if im_text.startswith("-") else "+"
    return f"{_fmt_fraction(re_part)}{sign}{im_text}"


def _is_compound(c: GaussianRational) -> bool:
    return bool(c.re) and bool(c.im)


# ---------------------------------------------------------------------------
# truncated polynomial ring


@dataclass(frozen=True)
class ParameterRing:
    """Q(i)[t, tbar] modulo monomials of total degree > ``order``.

    ``names`` are the holomorphic parameters; each gets a conjugate partner
    named ``<name>bar``.  Generators are ordered ``names + conjugates``.
    """

    names: tuple[str, ...]
    order: int

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if self.order < 0:
            raise ValueError("truncation order must be non-negative")
        if len(set(self.names)) != len(self.names):
            raise ValueError("parameter names must be distinct")
        for name in self.names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or name.endswith("bar"):
                raise ValueError(f"invalid parameter name {name!r}")

    @property
    def generators(self) -> tuple[str, ...]:
        return self.names + tuple(name + "bar" for name in self.names)

    @property
    def ngens(self) -> int:
        return 2 * len(self.names)

    def conjugate_index(self, k: int) -> int:
        m = len(self.names)
        return k + m if k < m else k - m

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a generator of {self}") from None

    def gen(self, name: str) -> "TruncatedPoly":
        exps = [0] * self.ngens
        exps[self.index(name)] = 1
        return TruncatedPoly(self, {tuple(exps): ONE})

    def conj_gen(self, name: str) -> "TruncatedPoly":
        return self.gen(name).conjugate()

    def const(self, value) -> "TruncatedPoly":
        return TruncatedPoly(self, {self.zero_exponent: as_scalar(value)})

    @property
    def zero_exponent(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def monomials(self, degree: int) -> Iterator[tuple[int, ...]]:
        """Exponent vectors of the given total degree, in a fixed order."""
        for combo in itertools.combinations_with_replacement(range(self.ngens), degree):
            exps = [0] * self.ngens
            for k in combo:
                exps[k] += 1
            yield tuple(exps)

    def format_monomial(self, exps: tuple[int, ...]) -> str:
        parts = []
        for name, e in zip(self.generators, exps):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


class TruncatedPoly:
    """Element of a :class:`ParameterRing`; ``terms`` maps exponents to coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: ParameterRing, terms: Mapping[tuple[int, ...], object] | None = None):
        self.ring = ring
        clean: dict[tuple[int, ...], GaussianRational] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != ring.ngens:
                raise ValueError("exponent vector length does not match the ring")
            if sum(exps) > ring.order:
                continue
            c = as_scalar(c)
            if c:
                clean[exps] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        obj = object.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    def __repr__(self) -> str:
        return f"TruncatedPoly({format_poly(self)!r}, order={self.ring.order})"

    def __str__(self) -> str:
        return format_poly(self)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncatedPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (GaussianRational, int, Fraction)):
            other = as_scalar(other)
            if not other:
                return not self.terms
            return self.terms == {self.ring.zero_exponent: other}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if not self.terms:
                self._hash = hash(0)
            elif list(self.terms) == [self.ring.zero_exponent]:
                self._hash = hash(self.terms[self.ring.zero_exponent])
            else:
                self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def _coerce(self, other) -> "TruncatedPoly":
        if isinstance(other, TruncatedPoly):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (GaussianRational, int, Fraction)):
            c = as_scalar(other)
            return TruncatedPoly._raw(self.ring, {self.ring.zero_exponent: c} if c else {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for exps, c in other.terms.items():
            s = terms.get(exps)
            s = c if s is None else s + c
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return TruncatedPoly._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedPoly":
        return TruncatedPoly._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (GaussianRational, int, Fraction)):
            c = as_scalar(other)
            if not c:
                return TruncatedPoly._raw(self.ring, {})
            return TruncatedPoly._raw(self.ring, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = self.ring.order
        terms: dict[tuple[int, ...], GaussianRational] = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return TruncatedPoly._raw(self.ring, terms)

    __rmul__ = __mul__

    def conjugate(self) -> "TruncatedPoly":
        ring = self.ring
        m = len(ring.names)
        terms = {}
        for exps, c in self.terms.items():
            swapped = exps[m:] + exps[:m]
            terms[swapped] = c.conjugate()
        return TruncatedPoly._raw(ring, terms)

    def constant_term(self) -> GaussianRational:
        return self.terms.get(self.ring.zero_exponent, ZERO)

    def coefficient(self, exps: Iterable[int]) -> GaussianRational:
        return self.terms.get(tuple(exps), ZERO)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self) -> int:
        return min((sum(e) for e in self.terms), default=-1)

    def homogeneous_part(self, degree: int) -> "TruncatedPoly":
        return TruncatedPoly._raw(self.ring, {e: c for e, c in self.terms.items() if sum(e) == degree})

    def evaluate(self, values: Mapping[str, object]) -> GaussianRational:
        """Substitute values for the holomorphic parameters.

        Conjugate generators receive the conjugate value unless given
        explicitly.  Missing parameters default to zero.
        """
        vals = []
        for name in self.ring.names:
            vals.append(as_scalar(values.get(name, 0)))
        for name, base in zip(self.ring.generators[len(self.ring.names):], vals):
            v = values.get(name)
            vals.append(base.conjugate() if v is None else as_scalar(v))
        total = ZERO
        for exps, c in self.terms.items():
            term = c
            for v, e in zip(vals, exps):
                for _ in range(e):
                    term = term * v
            total = total + term
        return total


def poly_mul(f: TruncatedPoly, g: TruncatedPoly) -> TruncatedPoly:
    if isinstance(f, TruncatedPoly) and isinstance(g, TruncatedPoly) and f.ring != g.ring:
        raise RingMismatch(f"{f.ring} vs {g.ring}")
    return f * g


def conj_poly(f: TruncatedPoly) -> TruncatedPoly:
    return f.conjugate()


# ---------------------------------------------------------------------------
# polynomial literals


def _split_top_level(text: str) -> list[tuple[str, str]]:
    """Split on +/- outside parentheses, keeping the sign of each chunk."""
    chunks: list[tuple[str, str]] = []
    sign, cur, depth = "+", "", 0
    for ch in text:
        if ch in "+-" and depth == 0:
            if cur:
                chunks.append((sign, cur))
                cur, sign = "", ch
            else:
                sign = "-" if (sign == "-") != (ch == "-") else "+"
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ScalarParseError(f"unbalanced parentheses in {text!r}")
        cur += ch
    if depth != 0:
        raise ScalarParseError(f"unbalanced parentheses in {text!r}")
    if not cur:
        raise ScalarParseError(f"dangling sign in {text!r}")
    chunks.append((sign, cur))
    return chunks


_POWER = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


def parse_poly(text: str, ring: ParameterRing) -> TruncatedPoly:
    """Parse ``-1 + t21 + (1+i)*t22bar - 2*t11*t12^2``."""
    s = "".join(str(text).split())
    if not s:
        raise ScalarParseError("empty polynomial literal")
    total = TruncatedPoly(ring)
    for sign, chunk in _split_top_level(s):
        coef = ONE
        exps = [0] * ring.ngens
        for factor in _split_factors(chunk, text):
            if factor.startswith("("):
                coef = coef * parse_scalar(factor[1:-1])
                continue
            match = _POWER.match(factor)
            if match and match.group(1) in ring.generators:
                exps[ring.index(match.group(1))] += int(match.group(2) or 1)
                continue
            try:
                coef = coef * parse_scalar(factor)
            except ScalarParseError:
                raise ScalarParseError(f"unknown factor {factor!r} in polynomial {text!r}") from None
        if sign == "-":
            coef = -coef
        total = total + TruncatedPoly(ring, {tuple(exps): coef})
    return total


def _split_factors(chunk: str, literal: str) -> list[str]:
    factors, depth, start = [], 0, 0
    for pos, ch in enumerate(chunk):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            factors.append(chunk[start:pos])
            start = pos + 1
    factors.append(chunk[start:])
    if any(not f for f in factors):
        raise ScalarParseError(f"empty factor in {literal!r}")
    return factors


def _coef_prefix(c: GaussianRational, has_monomial: bool) -> str:
    """Text for a coefficient whose sign has already been emitted."""
    if has_monomial and c == ONE:
        return ""
    text = format_scalar(c)
    if _is_compound(c):
        text = f"({text})"
    return text + ("*" if has_monomial else "")


def _signed_terms(items: list[tuple[GaussianRational, str]]) -> str:
    """Join ``(coefficient, monomial-text)`` pairs with `` + `` / `` - ``."""
    if not items:
        return "0"
    out = []
    for k, (c, mono) in enumerate(items):
        negative = (not c.im and c.re < 0) or (not c.re and c.im < 0)
        body = _coef_prefix(-c if negative else c, bool(mono)) + mono
        if k == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


def _monomial_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), tuple(-e for e in exps))


def format_poly(f: TruncatedPoly) -> str:
    """Canonical literal; ``parse_poly(format_poly(f), f.ring) == f``."""
    ring = f.ring
    items = []
    for exps in sorted(f.terms, key=_monomial_key):
        mono = "" if not any(exps) else ring.format_monomial(exps)
        items.append((f.terms[exps], mono))
    return _signed_terms(items)
