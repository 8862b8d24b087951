"""Bigraded exterior algebra on a coframe phi[1..n], phibar[1..n].

A monomial is a pair of bitmasks ``(hol, anti)``: bit ``k-1`` of ``hol`` marks
``phi[k]`` and bit ``k-1`` of ``anti`` marks ``phibar[k]``.  The canonical
factor order is all holomorphic factors ascending, then all anti-holomorphic
factors ascending, so ``phi[1]^phi[2]^phibar[1]`` is stored as ``(0b11, 0b1)``
with coefficient 1.  Signs are always obtained by counting transpositions.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .scalars import (
    ONE,
    ZERO,
    GaussianRational,
    ParameterRing,
    ScalarParseError,
    TruncatedPoly,
    as_scalar,
    format_poly,
    format_scalar,
    parse_poly,
    parse_scalar,
    _is_compound,
    _split_top_level,
)

__all__ = [
    "Bidegree",
    "BasisIndex",
    "BigradedForm",
    "FrameVector",
    "FormParseError",
    "Layout",
    "basis",
    "wedge",
    "interior",
    "conjugate",
    "parse_form",
    "format_form",
    "permutation_sign",
]


class FormParseError(ValueError):
    """A form literal could not be parsed."""


class Bidegree(NamedTuple):
    p: int
    q: int


class BasisIndex(NamedTuple):
    hol: int
    anti: int

    @property
    def bidegree(self) -> Bidegree:
        return Bidegree(self.hol.bit_count(), self.anti.bit_count())


@dataclass(frozen=True)
class FrameVector:
    """theta[index] (holomorphic) or thetabar[index], dual to the coframe."""

    index: int
    holomorphic: bool = True

    def conjugate(self) -> "FrameVector":
        return FrameVector(self.index, not self.holomorphic)

    def __str__(self) -> str:
        return f"{'theta' if self.holomorphic else 'thetabar'}[{self.index}]"


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    if len(set(seq)) != len(seq):
        return 0
    inversions = 0
    for a, b in itertools.combinations(seq, 2):
        if a > b:
            inversions += 1
    return -1 if inversions % 2 else 1


def _bits(mask: int) -> list[int]:
    out, k = [], 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


@lru_cache(maxsize=None)
def _merge_sign(a: int, b: int) -> int:
    """Sign of sorting the factors of ``a`` followed by those of ``b`` (full masks)."""
    if a & b:
        return 0
    swaps = 0
    for j in _bits(b):
        swaps += (a >> (j + 1)).bit_count()
    return -1 if swaps & 1 else 1


def _full(idx: tuple[int, int], n: int) -> int:
    return idx[0] | (idx[1] << n)


@lru_cache(maxsize=None)
def basis(n: int, p: int, q: int) -> tuple[BasisIndex, ...]:
    """Monomials of bidegree (p, q), lexicographic in (holomorphic, anti) index tuples."""
    if not (0 <= p <= n and 0 <= q <= n):
        return ()
    out = []
    for hol in itertools.combinations(range(n), p):
        hmask = sum(1 << k for k in hol)
        for anti in itertools.combinations(range(n), q):
            out.append(BasisIndex(hmask, sum(1 << k for k in anti)))
    return tuple(out)


def _coerce(c):
    return c if isinstance(c, (GaussianRational, TruncatedPoly)) else as_scalar(c)


class BigradedForm:
    """An invariant form: a sparse map from monomials to exact coefficients.

    Coefficients are :class:`GaussianRational` or :class:`TruncatedPoly`.
    A form may carry several bidegrees (for instance ``d`` of a pure form);
    ``bidegree`` is only defined when it is pure.  A zero form remembers the
    bidegree it was declared with, if any.
    """

    __slots__ = ("n", "coeffs", "_declared")

    def __init__(self, n: int, coeffs: Mapping | None = None, bidegree: tuple[int, int] | None = None):
        self.n = n
        clean = {}
        for idx, c in (coeffs or {}).items():
            idx = BasisIndex(*idx)
            if idx.hol >> n or idx.anti >> n:
                raise ValueError(f"monomial {idx} out of range for n={n}")
            c = _coerce(c)
            if c:
                clean[idx] = c
        self.coeffs = clean
        self._declared = Bidegree(*bidegree) if bidegree is not None else None
        if self._declared is not None:
            for idx in clean:
                if idx.bidegree != self._declared:
                    raise ValueError(f"monomial {idx} does not have bidegree {self._declared}")

    @classmethod
    def _raw(cls, n, coeffs, bidegree=None):
        obj = object.__new__(cls)
        obj.n = n
        obj.coeffs = coeffs
        obj._declared = bidegree
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int, bidegree: tuple[int, int] | None = None) -> "BigradedForm":
        return cls(n, {}, bidegree)

    @classmethod
    def one(cls, n: int) -> "BigradedForm":
        return cls(n, {BasisIndex(0, 0): ONE})

    @classmethod
    def monomial(cls, n: int, hol: Iterable[int] = (), anti: Iterable[int] = (), coef=ONE) -> "BigradedForm":
        """``coef * phi[hol...] ^ phibar[anti...]`` in the order given (1-based indices)."""
        hol, anti = list(hol), list(anti)
        seq = [k - 1 for k in hol] + [n + k - 1 for k in anti]
        if any(not 1 <= k <= n for k in hol + anti):
            raise ValueError(f"coframe index out of range 1..{n}")
        sign = permutation_sign(seq)
        if not sign:
            return cls.zero(n, (len(hol), len(anti)))
        idx = BasisIndex(sum(1 << (k - 1) for k in hol), sum(1 << (k - 1) for k in anti))
        c = _coerce(coef)
        return cls(n, {idx: c if sign > 0 else -c})

    @classmethod
    def phi(cls, n: int, k: int) -> "BigradedForm":
        return cls.monomial(n, [k])

    @classmethod
    def phibar(cls, n: int, k: int) -> "BigradedForm":
        return cls.monomial(n, (), [k])

    # -- inspection -------------------------------------------------------

    def bidegrees(self) -> list[Bidegree]:
        return sorted({idx.bidegree for idx in self.coeffs})

    @property
    def bidegree(self) -> Bidegree:
        degs = self.bidegrees()
        if not degs:
            if self._declared is None:
                raise ValueError("zero form without a declared bidegree")
            return self._declared
        if len(degs) > 1:
            raise ValueError(f"form has mixed bidegrees {degs}")
        return degs[0]

    @property
    def degree(self) -> int:
        p, q = self.bidegree
        return p + q

    def component(self, p: int, q: int) -> "BigradedForm":
        return BigradedForm._raw(
            self.n, {i: c for i, c in self.coeffs.items() if i.bidegree == (p, q)}, Bidegree(p, q)
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def coefficient(self, hol: Iterable[int] = (), anti: Iterable[int] = ()):
        """Coefficient of the canonical monomial ``phi[hol] ^ phibar[anti]``."""
        idx = BasisIndex(sum(1 << (k - 1) for k in hol), sum(1 << (k - 1) for k in anti))
        return self.coeffs.get(idx, ZERO)

    def map_coefficients(self, f: Callable) -> "BigradedForm":
        return BigradedForm(self.n, {i: f(c) for i, c in self.coeffs.items()}, self._declared)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "BigradedForm") -> None:
        if not isinstance(other, BigradedForm):
            raise TypeError(f"expected a form, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"forms on different coframes (n={self.n} vs n={other.n})")

    def __add__(self, other: "BigradedForm") -> "BigradedForm":
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = out.get(idx)
            s = c if s is None else s + c
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
        declared = self._declared if self._declared == other._declared else None
        return BigradedForm._raw(self.n, out, declared)

    __radd__ = __add__

    def __neg__(self) -> "BigradedForm":
        return BigradedForm._raw(self.n, {i: -c for i, c in self.coeffs.items()}, self._declared)

    def __sub__(self, other: "BigradedForm") -> "BigradedForm":
        return self + (-other)

    def __mul__(self, scalar) -> "BigradedForm":
        if isinstance(scalar, BigradedForm):
            return NotImplemented
        c = _coerce(scalar)
        if not c:
            return BigradedForm._raw(self.n, {}, self._declared)
        out = {}
        for i, v in self.coeffs.items():
            w = v * c
            if w:
                out[i] = w
        return BigradedForm._raw(self.n, out, self._declared)

    __rmul__ = __mul__

    def __xor__(self, other: "BigradedForm") -> "BigradedForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, BigradedForm):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    __hash__ = None

    def __repr__(self) -> str:
        return f"BigradedForm(n={self.n}, {format_form(self)!r})"

    def __str__(self) -> str:
        return format_form(self)


def wedge(alpha: BigradedForm, beta: BigradedForm) -> BigradedForm:
    """Exterior product; generators anticommute under the total-degree grading."""
    alpha._check(beta)
    n = alpha.n
    out: dict[BasisIndex, object] = {}
    for ia, ca in alpha.coeffs.items():
        fa = _full(ia, n)
        for ib, cb in beta.coeffs.items():
            fb = _full(ib, n)
            sign = _merge_sign(fa, fb)
            if not sign:
                continue
            idx = BasisIndex(ia.hol | ib.hol, ia.anti | ib.anti)
            term = ca * cb
            if sign < 0:
                term = -term
            s = out.get(idx)
            s = term if s is None else s + term
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)
    declared = None
    if alpha._declared is not None and beta._declared is not None:
        declared = Bidegree(alpha._declared.p + beta._declared.p, alpha._declared.q + beta._declared.q)
    return BigradedForm._raw(n, out, declared)


def interior(v: FrameVector, alpha: BigradedForm) -> BigradedForm:
    """Contraction ``v ⌟ alpha``; an antiderivation of degree -1."""
    n = alpha.n
    if not 1 <= v.index <= n:
        raise ValueError(f"frame vector index {v.index} out of range 1..{n}")
    bit = v.index - 1 if v.holomorphic else n + v.index - 1
    out = {}
    for idx, c in alpha.coeffs.items():
        full = _full(idx, n)
        if not (full >> bit) & 1:
            continue
        before = (full & ((1 << bit) - 1)).bit_count()
        rest = full & ~(1 << bit)
        new = BasisIndex(rest & ((1 << n) - 1), rest >> n)
        out[new] = -c if before & 1 else c
    declared = None
    if alpha._declared is not None:
        p, q = alpha._declared
        declared = Bidegree(p - 1, q) if v.holomorphic else Bidegree(p, q - 1)
    return BigradedForm._raw(n, out, declared)


@lru_cache(maxsize=None)
def _conjugate_monomial(idx: BasisIndex, n: int) -> tuple[BasisIndex, int]:
    # conj(phi[h1]^..^phibar[a1]^..) = phibar[h1]^..^phi[a1]^..; sort into canonical order
    seq = [n + k for k in _bits(idx.hol)] + _bits(idx.anti)
    return BasisIndex(idx.anti, idx.hol), permutation_sign(seq)


def conjugate(alpha: BigradedForm) -> BigradedForm:
    """Complex conjugation: (p, q) -> (q, p), coefficients conjugated."""
    n = alpha.n
    out = {}
    for idx, c in alpha.coeffs.items():
        new, sign = _conjugate_monomial(idx, n)
        cc = c.conjugate()
        out[new] = cc if sign > 0 else -cc
    declared = None if alpha._declared is None else Bidegree(alpha._declared.q, alpha._declared.p)
    return BigradedForm._raw(n, out, declared)


BigradedForm.conjugate = conjugate


# ---------------------------------------------------------------------------
# coordinates


class Layout:
    """Coordinate convention for a direct sum of bidegree spaces.

    Vectors list the coefficients of ``basis(n, p, q)`` block by block, in the
    order the bidegrees are given.
    """

    def __init__(self, n: int, bidegrees: Iterable[tuple[int, int]]):
        self.n = n
        self.bidegrees = tuple(
            Bidegree(*b) for b in bidegrees if 0 <= b[0] <= n and 0 <= b[1] <= n
        )
        self.monomials: list[BasisIndex] = []
        self.offsets: dict[Bidegree, int] = {}
        for b in self.bidegrees:
            self.offsets[b] = len(self.monomials)
            self.monomials.extend(basis(n, *b))
        self.position = {m: k for k, m in enumerate(self.monomials)}

    @property
    def dim(self) -> int:
        return len(self.monomials)

    def block(self, bidegree: tuple[int, int]) -> range:
        b = Bidegree(*bidegree)
        if b not in self.offsets:
            return range(0)
        start = self.offsets[b]
        return range(start, start + comb(self.n, b.p) * comb(self.n, b.q))

    def to_vector(self, form: BigradedForm, strict: bool = True) -> list:
        vec = [ZERO] * self.dim
        for idx, c in form.coeffs.items():
            k = self.position.get(idx)
            if k is None:
                if strict:
                    raise ValueError(f"form has a component {idx.bidegree} outside {list(self.bidegrees)}")
                continue
            vec[k] = c
        return vec

    def to_form(self, vec: Sequence) -> BigradedForm:
        if len(vec) != self.dim:
            raise ValueError("vector length does not match the layout")
        coeffs = {self.monomials[k]: c for k, c in enumerate(vec) if c}
        declared = self.bidegrees[0] if len(self.bidegrees) == 1 else None
        return BigradedForm(self.n, coeffs, declared)

    def __repr__(self) -> str:
        return f"Layout(n={self.n}, {list(self.bidegrees)})"


# ---------------------------------------------------------------------------
# literals: ``-phi[1]^phi[2] + (1/2+i)*phi[3]^phibar[1]``

_GEN = re.compile(r"(phibar|phi)\[(\d+)\]")


def _format_monomial(idx: BasisIndex, n: int) -> str:
    parts = [f"phi[{k + 1}]" for k in _bits(idx.hol)] + [f"phibar[{k + 1}]" for k in _bits(idx.anti)]
    return "^".join(parts)


def _coef_text(c) -> tuple[bool, str]:
    """(negative, text without that sign) for a coefficient followed by ``*``."""
    if isinstance(c, TruncatedPoly):
        if not any(sum(e) for e in c.terms):
            c = c.constant_term()
        elif len(c.terms) == 1:
            (exps, k), = c.terms.items()
            negative = (not k.im and k.re < 0) or (not k.re and k.im < 0)
            k = -k if negative else k
            mono = c.ring.format_monomial(exps)
            if k == ONE:
                return negative, mono
            ktext = format_scalar(k)
            if _is_compound(k):
                ktext = f"({ktext})"
            return negative, f"{ktext}*{mono}"
        else:
            return False, f"({format_poly(c)})"
    negative = (not c.im and c.re < 0) or (not c.re and c.im < 0)
    k = -c if negative else c
    text = format_scalar(k)
    if _is_compound(k):
        text = f"({text})"
    return negative, text


def format_form(alpha: BigradedForm) -> str:
    """Canonical literal joined by `` + `` / `` - ``.

    Terms go by total degree, then holomorphic degree descending, then basis order.
    """
    if not alpha.coeffs:
        return "0"
    n = alpha.n

    def key(i):
        p, q = i.bidegree
        return (p + q, -p, basis(n, p, q).index(i))

    order = sorted(alpha.coeffs, key=key)
    out = []
    for k, idx in enumerate(order):
        c = alpha.coeffs[idx]
        negative, text = _coef_text(c)
        mono = _format_monomial(idx, n)
        if mono:
            body = mono if text == "1" else f"{text}*{mono}"
        else:
            body = text
        if k == 0:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


def parse_form(text: str, n: int, ring: ParameterRing | None = None) -> BigradedForm:
    """Parse a form literal; coefficients may be polynomials when ``ring`` is given."""
    s = "".join(str(text).split())
    if not s:
        raise FormParseError("empty form literal")
    if s == "0":
        return BigradedForm.zero(n)
    try:
        chunks = _split_top_level(s)
    except ScalarParseError as exc:
        raise FormParseError(str(exc)) from None
    total = BigradedForm.zero(n)
    for sign, chunk in chunks:
        coef = ONE if ring is None else ring.const(1)
        mono_hol: list[int] = []
        mono_anti: list[int] = []
        seq: list[int] = []
        for factor in _factors(chunk):
            if factor.startswith("phi"):
                pos = 0
                for m in _GEN.finditer(factor):
                    if m.start() != pos:
                        raise FormParseError(f"bad monomial {factor!r} in {text!r}")
                    k = int(m.group(2))
                    if not 1 <= k <= n:
                        raise FormParseError(f"coframe index {k} out of range 1..{n} in {text!r}")
                    seq.append(k - 1 if m.group(1) == "phi" else n + k - 1)
                    pos = m.end()
                    if pos < len(factor):
                        if factor[pos] != "^":
                            raise FormParseError(f"bad monomial {factor!r} in {text!r}")
                        pos += 1
                if pos != len(factor) or factor.endswith("^"):
                    raise FormParseError(f"bad monomial {factor!r} in {text!r}")
                continue
            try:
                if ring is None:
                    coef = coef * parse_scalar(factor)
                else:
                    body = factor[1:-1] if factor.startswith("(") and factor.endswith(")") else factor
                    coef = coef * parse_poly(body, ring)
            except ScalarParseError as exc:
                raise FormParseError(f"bad coefficient {factor!r} in {text!r}: {exc}") from None
        sign_perm = permutation_sign(seq)
        if sign_perm == 0:
            continue
        for g in seq:
            (mono_hol if g < n else mono_anti).append(g if g < n else g - n)
        idx = BasisIndex(sum(1 << k for k in mono_hol), sum(1 << k for k in mono_anti))
        if (sign == "-") != (sign_perm < 0):
            coef = -coef
        total = total + BigradedForm(n, {idx: coef})
    return total


def _factors(chunk: str) -> list[str]:
    """Split a term on top-level ``*``, also separating an unstarred ``2phi[1]``."""
    parts, depth, start = [], 0, 0
    for pos, ch in enumerate(chunk):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            parts.append(chunk[start:pos])
            start = pos + 1
    parts.append(chunk[start:])
    out = []
    for part in parts:
        if not part:
            raise FormParseError(f"empty factor in {chunk!r}")
        cut = part.find("phi")
        if cut > 0:
            out.extend([part[:cut], part[cut:]])
        else:
            out.append(part)
    return out
