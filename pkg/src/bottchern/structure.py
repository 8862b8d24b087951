"""Manifolds given by structure equations, and the induced ∂, ∂̄, d.

A :class:`ManifoldSpec` records ``d phi[k]`` for each holomorphic coframe
element.  The conjugate equations ``d phibar[k]`` are always derived.  The
operators extend the structure equations to all invariant forms by the
Leibniz rule ``D(a ^ b) = D(a) ^ b + (-1)^deg(a) a ^ D(b)``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Mapping

from .exterior import (
    BasisIndex,
    Bidegree,
    BigradedForm,
    Layout,
    _merge_sign,
    basis,
    conjugate,
    format_form,
    parse_form,
)
from .linalg import ExactMatrix
from .scalars import ZERO, GaussianRational, ParameterRing, TruncatedPoly

__all__ = [
    "ManifoldSpec",
    "SpecError",
    "NonIntegrable",
    "NotClosed",
    "SpecParseError",
    "DifferentialMatrix",
    "validate",
    "partial",
    "dbar",
    "d",
    "ddbar",
    "apply_operator",
    "differential_matrix",
    "operator_matrix",
    "parse_spec",
    "format_spec",
    "read_spec",
]

OPERATORS = ("partial", "dbar", "d", "ddbar")
_OP_ALIASES = {
    "partial": "partial", "∂": "partial", "del": "partial",
    "dbar": "dbar", "∂̄": "dbar", "delbar": "dbar",
    "d": "d",
    "ddbar": "ddbar", "∂∂̄": "ddbar", "partial_dbar": "ddbar",
}


class SpecError(ValueError):
    """Invalid manifold specification."""


class NonIntegrable(SpecError):
    def __init__(self, k: int, residue: BigradedForm):
        self.k, self.residue = k, residue
        super().__init__(f"dphi[{k}] has a nonzero (0,2) part: {format_form(residue)}")


class NotClosed(SpecError):
    def __init__(self, k: int, residue: BigradedForm, conjugate_side: bool = False):
        self.k, self.residue = k, residue
        name = f"phibar[{k}]" if conjugate_side else f"phi[{k}]"
        super().__init__(f"d(d {name}) = {format_form(residue)} is not zero")


class SpecParseError(SpecError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ManifoldSpec:
    """Complex dimension plus ``dphi[k]`` for k = 1..n.

    ``dphi`` forms must have total degree 2.  When ``ring`` is set the
    coefficients are truncated polynomials (a family over the parameter
    ring); otherwise they are Gaussian rationals.  Construct through
    :meth:`build`, which validates.
    """

    def __init__(self, n: int, dphi: Mapping[int, BigradedForm] | Iterable[BigradedForm], ring: ParameterRing | None = None, name: str | None = None):
        if n < 1:
            raise SpecError("complex dimension must be at least 1")
        self.n = n
        self.ring = ring
        self.name = name
        if not isinstance(dphi, Mapping):
            dphi = {k + 1: f for k, f in enumerate(dphi)}
        forms = []
        for k in range(1, n + 1):
            f = dphi.get(k, BigradedForm.zero(n, (2, 0)))
            if f.n != n:
                raise SpecError(f"dphi[{k}] lives on a coframe of dimension {f.n}, expected {n}")
            if ring is not None:
                f = f.map_coefficients(lambda c: c if isinstance(c, TruncatedPoly) else ring.const(c))
            for idx in f.coeffs:
                if sum(idx.bidegree) != 2:
                    raise SpecError(f"dphi[{k}] has a term of degree {sum(idx.bidegree)}, expected 2")
            forms.append(f)
        extra = set(dphi) - set(range(1, n + 1))
        if extra:
            raise SpecError(f"dphi index {min(extra)} out of range 1..{n}")
        self.dphi: tuple[BigradedForm, ...] = tuple(forms)
        self._gen_images: dict[str, list[dict]] | None = None
        self._cache: dict = {}
        self._validated = False

    @classmethod
    def build(cls, n, dphi, ring=None, name=None) -> "ManifoldSpec":
        return validate(cls(n, dphi, ring, name))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ManifoldSpec):
            return NotImplemented
        return self.n == other.n and self.ring == other.ring and self.dphi == other.dphi

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<ManifoldSpec{label} n={self.n}{' over ' + str(self.ring.names) if self.ring else ''}>"

    @property
    def is_family(self) -> bool:
        return self.ring is not None

    def zero(self):
        return self.ring.const(0) if self.ring is not None else ZERO

    def evaluate(self, values: Mapping[str, object], name: str | None = None) -> "ManifoldSpec":
        """Substitute parameter values, giving a spec over Q(i)."""
        if self.ring is None:
            return self
        forms = [f.map_coefficients(lambda c: c.evaluate(values)) for f in self.dphi]
        return ManifoldSpec.build(self.n, forms, None, name or self.name)

    def central(self) -> "ManifoldSpec":
        """Restriction to the origin of the parameter space."""
        if self.ring is None:
            return self
        forms = [f.map_coefficients(lambda c: c.constant_term()) for f in self.dphi]
        return ManifoldSpec.build(self.n, forms, None, self.name)

    def generator_images(self) -> dict[str, list[dict]]:
        """Per generator slot g (0..2n-1): the ∂ and ∂̄ images as {monomial: coef}."""
        if self._gen_images is None:
            n = self.n
            part: list[dict] = [None] * (2 * n)
            dbar_: list[dict] = [None] * (2 * n)
            for k, f in enumerate(self.dphi):
                part[k] = dict(f.component(2, 0).coeffs)
                dbar_[k] = dict(f.component(1, 1).coeffs)
                fbar = conjugate(f)
                part[n + k] = dict(fbar.component(1, 1).coeffs)
                dbar_[n + k] = dict(fbar.component(0, 2).coeffs)
            self._gen_images = {"partial": part, "dbar": dbar_}
        return self._gen_images


def _apply_derivation_monomial(spec: ManifoldSpec, op: str, idx: BasisIndex) -> dict:
    cache = spec._cache.setdefault(("mono", op), {})
    hit = cache.get(idx)
    if hit is not None:
        return hit
    n = spec.n
    images = spec.generator_images()[op]
    full = idx.hol | (idx.anti << n)
    out: dict[BasisIndex, object] = {}
    position = 0
    g = 0
    mask = full
    while mask:
        if mask & 1:
            img = images[g]
            if img:
                prefix = full & ((1 << g) - 1)
                suffix = full & ~((1 << (g + 1)) - 1)
                lead = -1 if position & 1 else 1
                for jdx, c in img.items():
                    jf = jdx.hol | (jdx.anti << n)
                    s1 = _merge_sign(prefix, jf)
                    if not s1:
                        continue
                    s2 = _merge_sign(prefix | jf, suffix)
                    if not s2:
                        continue
                    merged = prefix | jf | suffix
                    key = BasisIndex(merged & ((1 << n) - 1), merged >> n)
                    term = c if lead * s1 * s2 > 0 else -c
                    s = out.get(key)
                    s = term if s is None else s + term
                    if s:
                        out[key] = s
                    else:
                        out.pop(key, None)
            position += 1
        mask >>= 1
        g += 1
    cache[idx] = out
    return out


def _apply(spec: ManifoldSpec, op: str, alpha: BigradedForm) -> BigradedForm:
    if alpha.n != spec.n:
        raise ValueError(f"form on n={alpha.n} applied with a spec of n={spec.n}")
    out: dict[BasisIndex, object] = {}
    for idx, c in alpha.coeffs.items():
        for key, v in _apply_derivation_monomial(spec, op, idx).items():
            term = c * v
            s = out.get(key)
            s = term if s is None else s + term
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    declared = None
    if alpha._declared is not None:
        p, q = alpha._declared
        declared = Bidegree(p + 1, q) if op == "partial" else Bidegree(p, q + 1)
    return BigradedForm._raw(spec.n, out, declared)


def partial(alpha: BigradedForm, spec: ManifoldSpec) -> BigradedForm:
    """∂: the (p+1, q) part of d."""
    return _apply(spec, "partial", alpha)


def dbar(alpha: BigradedForm, spec: ManifoldSpec) -> BigradedForm:
    """∂̄: the (p, q+1) part of d."""
    return _apply(spec, "dbar", alpha)


def d(alpha: BigradedForm, spec: ManifoldSpec) -> BigradedForm:
    return partial(alpha, spec) + dbar(alpha, spec)


def ddbar(alpha: BigradedForm, spec: ManifoldSpec) -> BigradedForm:
    """∂∂̄ (apply ∂̄ first)."""
    return partial(dbar(alpha, spec), spec)


def apply_operator(op: str, alpha: BigradedForm, spec: ManifoldSpec) -> BigradedForm:
    op = _OP_ALIASES.get(op, op)
    return {"partial": partial, "dbar": dbar, "d": d, "ddbar": ddbar}[op](alpha, spec)


def validate(spec: ManifoldSpec) -> ManifoldSpec:
    """Check integrability and d∘d = 0 on every generator; returns ``spec``."""
    if spec._validated:
        return spec
    n = spec.n
    for k, f in enumerate(spec.dphi, start=1):
        residue = f.component(0, 2)
        if residue:
            raise NonIntegrable(k, residue)
    for k in range(1, n + 1):
        for conj_side, gen in ((False, BigradedForm.phi(n, k)), (True, BigradedForm.phibar(n, k))):
            residue = d(d(gen, spec), spec)
            if residue:
                raise NotClosed(k, residue, conj_side)
    spec._validated = True
    return spec


# ---------------------------------------------------------------------------
# matrices


class DifferentialMatrix:
    """An operator as an exact matrix between two coordinate layouts."""

    def __init__(self, op: str, source: Layout, target: Layout, matrix: ExactMatrix):
        self.op, self.source, self.target, self.matrix = op, source, target, matrix

    @property
    def source_bidegree(self):
        return self.source.bidegrees

    @property
    def target_bidegree(self):
        return self.target.bidegrees

    def __repr__(self) -> str:
        return (f"DifferentialMatrix({self.op}: {list(self.source.bidegrees)} -> "
                f"{list(self.target.bidegrees)}, {self.matrix.rows}x{self.matrix.cols})")


def operator_matrix(spec: ManifoldSpec, op: str, source: Layout, target: Layout) -> ExactMatrix:
    """Matrix of ``op`` from ``source`` to ``target``, projecting away other components."""
    op = _OP_ALIASES.get(op, op)
    zero = spec.zero()
    cols = []
    for mono in source.monomials:
        image = apply_operator(op, BigradedForm._raw(spec.n, {mono: spec.zero() + 1}), spec)
        col = [zero] * target.dim
        for idx, c in image.coeffs.items():
            k = target.position.get(idx)
            if k is not None:
                col[k] = c
        cols.append(col)
    return ExactMatrix([[col[i] for col in cols] for i in range(target.dim)], source.dim)


def _targets(op: str, p: int, q: int) -> list[tuple[int, int]]:
    return {
        "partial": [(p + 1, q)],
        "dbar": [(p, q + 1)],
        "ddbar": [(p + 1, q + 1)],
        "d": [(p + 1, q), (p, q + 1)],
    }[op]


def total_degree_layout(n: int, k: int) -> Layout:
    """All bidegrees of total degree k, holomorphic degree descending."""
    return Layout(n, [(p, k - p) for p in range(min(k, n), -1, -1) if 0 <= k - p <= n])


def differential_matrix(spec: ManifoldSpec, op: str, source) -> DifferentialMatrix:
    """Matrix of ``op`` on a bidegree ``(p, q)`` or, for ``d`` only, a total degree ``k``."""
    op = _OP_ALIASES.get(op, op)
    if op not in OPERATORS:
        raise ValueError(f"unknown operator {op!r}")
    key = ("matrix", op, source)
    hit = spec._cache.get(key)
    if hit is not None:
        return hit
    n = spec.n
    if isinstance(source, int):
        if op != "d":
            raise ValueError("total-degree matrices are only defined for d")
        src, tgt = total_degree_layout(n, source), total_degree_layout(n, source + 1)
    else:
        p, q = source
        src = Layout(n, [(p, q)])
        tgt = Layout(n, _targets(op, p, q))
    result = DifferentialMatrix(op, src, tgt, operator_matrix(spec, op, src, tgt))
    spec._cache[key] = result
    return result


# ---------------------------------------------------------------------------
# spec files
#
#   # Iwasawa manifold
#   dim = 3
#   dphi[3] = -phi[1]^phi[2]
#
# Families add ``params = [t11, t12, t21, t22]`` and ``order = N`` and may use
# polynomial coefficients; ``sigma = [s12, s11b, s12b, s21b, s22b]`` is
# shorthand for the dimension-3 equation
#   dphi[3] = s12 phi1^phi2 + s11b phi1^phibar1 + s12b phi1^phibar2
#             + s21b phi2^phibar1 + s22b phi2^phibar2.

_LINE = re.compile(r"^\s*([A-Za-z_]+)(?:\[(\d+)\])?\s*=\s*(.*?)\s*$")


def sigma_form(sigma, ring: ParameterRing | None = None) -> BigradedForm:
    """``dphi[3]`` of the dimension-3 sigma model."""
    from .scalars import as_scalar

    s12, s11, s12b, s21, s22 = (as_scalar(s) for s in sigma)
    f = BigradedForm
    return (f.monomial(3, [1, 2], coef=s12) + f.monomial(3, [1], [1], coef=s11)
            + f.monomial(3, [1], [2], coef=s12b) + f.monomial(3, [2], [1], coef=s21)
            + f.monomial(3, [2], [2], coef=s22))


def parse_spec(text: str, name: str | None = None) -> ManifoldSpec:
    """Parse and validate a spec file's contents."""
    from .scalars import ScalarParseError, parse_poly, parse_scalar

    n = None
    params = None
    order = None
    raw: dict[int, tuple[int, str]] = {}
    sigma_line = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        m = _LINE.match(body)
        if not m:
            raise SpecParseError(lineno, f"expected 'key = value', got {line.strip()!r}")
        key, index, value = m.group(1), m.group(2), m.group(3)
        if key == "dim":
            if not value.isdigit() or int(value) < 1:
                raise SpecParseError(lineno, f"dim must be a positive integer, got {value!r}")
            n = int(value)
        elif key == "params":
            inner = value.strip()
            if not (inner.startswith("[") and inner.endswith("]")):
                raise SpecParseError(lineno, "params must be a bracketed list")
            params = tuple(x.strip() for x in inner[1:-1].split(",") if x.strip())
        elif key == "order":
            if not value.isdigit():
                raise SpecParseError(lineno, f"order must be a non-negative integer, got {value!r}")
            order = int(value)
        elif key == "dphi" and index is not None:
            k = int(index)
            if k in raw:
                raise SpecParseError(lineno, f"dphi[{k}] given twice")
            raw[k] = (lineno, value)
        elif key == "sigma":
            sigma_line = (lineno, value)
        elif key == "name":
            name = value
        else:
            raise SpecParseError(lineno, f"unknown key {key!r}")
    if n is None:
        raise SpecParseError(1, "missing 'dim = n' header")
    ring = None
    if params is not None or order is not None:
        if params is None or order is None:
            raise SpecParseError(1, "families need both 'params' and 'order'")
        try:
            ring = ParameterRing(params, order)
        except ValueError as exc:
            raise SpecParseError(1, str(exc)) from None
    dphi: dict[int, BigradedForm] = {}
    for k, (lineno, value) in raw.items():
        if not 1 <= k <= n:
            raise SpecParseError(lineno, f"dphi index {k} out of range 1..{n}")
        try:
            dphi[k] = parse_form(value, n, ring)
        except ValueError as exc:
            raise SpecParseError(lineno, str(exc)) from None
    if sigma_line is not None:
        lineno, value = sigma_line
        if n != 3:
            raise SpecParseError(lineno, "sigma shorthand needs dim = 3")
        if 3 in dphi:
            raise SpecParseError(lineno, "sigma and dphi[3] both given")
        inner = value.strip()
        if not (inner.startswith("[") and inner.endswith("]")):
            raise SpecParseError(lineno, "sigma must be a bracketed list of 5 entries")
        items = _split_list(inner[1:-1])
        if len(items) != 5:
            raise SpecParseError(lineno, f"sigma needs 5 entries, got {len(items)}")
        try:
            vals = [parse_poly(x, ring) if ring else parse_scalar(x) for x in items]
        except ScalarParseError as exc:
            raise SpecParseError(lineno, str(exc)) from None
        dphi[3] = sigma_form(vals)
    try:
        spec = ManifoldSpec(n, dphi, ring, name)
    except SpecError as exc:
        raise SpecParseError(1, str(exc)) from None
    try:
        return validate(spec)
    except (NonIntegrable, NotClosed) as exc:
        if exc.k in raw:
            exc.line = raw[exc.k][0]
        elif exc.k == 3 and sigma_line is not None:
            exc.line = sigma_line[0]
        else:
            exc.line = 1
        exc.args = (f"line {exc.line}: {exc.args[0]}",)
        raise


def _split_list(text: str) -> list[str]:
    items, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        items.append(cur.strip())
    return items


def format_spec(spec: ManifoldSpec) -> str:
    """Canonical spec file text; ``format_spec(parse_spec(t))`` is a fixed point."""
    lines = []
    if spec.name:
        lines.append(f"name = {spec.name}")
    lines.append(f"dim = {spec.n}")
    if spec.ring is not None:
        lines.append(f"params = [{', '.join(spec.ring.names)}]")
        lines.append(f"order = {spec.ring.order}")
    for k, f in enumerate(spec.dphi, start=1):
        if f:
            lines.append(f"dphi[{k}] = {format_form(f)}")
    return "\n".join(lines) + "\n"


def read_spec(path) -> ManifoldSpec:
    from pathlib import Path

    p = Path(path)
    return parse_spec(p.read_text(encoding="utf-8"), name=p.stem)
