"""de Rham, Dolbeault, Bott-Chern, Aeppli and L-complex cohomology.

Everything is computed on invariant forms, where each group is a quotient of
finite-dimensional coordinate spaces.  Groups are cached on the spec.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .exterior import BigradedForm, Layout
from .linalg import ExactMatrix, QuotientReport, image, kernel, quotient, rank, span
from .structure import ManifoldSpec, operator_matrix, total_degree_layout

__all__ = [
    "KINDS",
    "CohomologyGroup",
    "LComplex",
    "NaturalMap",
    "ComplexError",
    "de_rham",
    "dolbeault",
    "anti_dolbeault",
    "bott_chern",
    "aeppli",
    "l_complex",
    "l_cohomology",
    "natural_map",
    "group",
    "dimension_table",
]

KINDS = ("deRham", "Dolbeault", "antiDolbeault", "BC", "A", "Lcomplex")


class ComplexError(ArithmeticError):
    """A built complex failed D∘D = 0."""


@dataclass(eq=False)
class CohomologyGroup:
    kind: str
    degree: tuple
    layout: Layout
    report: QuotientReport = field(repr=False)
    shape: tuple[int, int] | None = None

    @property
    def dim(self) -> int:
        return self.report.dim

    @property
    def representatives(self) -> list[BigradedForm]:
        return [self.layout.to_form(v) for v in self.report.representatives]

    def vector(self, form) -> list:
        if isinstance(form, BigradedForm):
            return self.layout.to_vector(form)
        return list(form)

    def reducer(self, form) -> list:
        """Coordinates of the class of a cocycle; raises NotContained otherwise."""
        return self.report.reducer(self.vector(form))

    def is_zero(self, form) -> bool:
        return not any(self.reducer(form))

    def contains(self, form) -> bool:
        return self.report.numerator.contains(self.vector(form))

    def label(self) -> str:
        if self.kind == "Lcomplex":
            return f"H^{self.degree[0]}(L_{self.shape[0]},{self.shape[1]})"
        if self.kind == "deRham":
            return f"H_dR^{self.degree[0]}"
        tag = {"Dolbeault": "dbar", "antiDolbeault": "partial"}.get(self.kind, self.kind)
        return f"H_{tag}^{self.degree[0]},{self.degree[1]}"

    def __repr__(self) -> str:
        return f"<CohomologyGroup {self.label()} dim={self.dim}>"


def _require_constant(spec: ManifoldSpec) -> None:
    if spec.ring is not None:
        raise TypeError("cohomology needs a spec over Q(i); evaluate the family at a point first")


def _in_range(spec: ManifoldSpec, p: int, q: int) -> bool:
    return 0 <= p <= spec.n and 0 <= q <= spec.n


def _quotient_group(kind, degree, layout, cycles_matrix: ExactMatrix, boundaries: list[ExactMatrix], shape=None) -> CohomologyGroup:
    numerator = kernel(cycles_matrix)
    cols = [c for m in boundaries for c in m.columns()]
    denominator = span(cols, layout.dim)
    return CohomologyGroup(kind, tuple(degree), layout, quotient(numerator, denominator), shape)


def _cached(spec: ManifoldSpec, key, build):
    store = spec._cache.setdefault("groups", {})
    hit = store.get(key)
    if hit is None:
        hit = store[key] = build()
    return hit


def de_rham(spec: ManifoldSpec, k: int) -> CohomologyGroup:
    _require_constant(spec)
    if not 0 <= k <= 2 * spec.n:
        raise ValueError(f"degree {k} out of range 0..{2 * spec.n}")

    def build():
        here = total_degree_layout(spec.n, k)
        out = operator_matrix(spec, "d", here, total_degree_layout(spec.n, k + 1))
        inc = operator_matrix(spec, "d", total_degree_layout(spec.n, k - 1), here)
        return _quotient_group("deRham", (k,), here, out, [inc])

    return _cached(spec, ("deRham", k), build)


def _bidegree_check(spec, p, q):
    if not _in_range(spec, p, q):
        raise ValueError(f"bidegree ({p},{q}) out of range for n={spec.n}")


def _layout(spec, *bidegrees) -> Layout:
    return Layout(spec.n, bidegrees)


def dolbeault(spec: ManifoldSpec, p: int, q: int) -> CohomologyGroup:
    """ker ∂̄ / im ∂̄ at (p, q)."""
    _require_constant(spec)
    _bidegree_check(spec, p, q)

    def build():
        here = _layout(spec, (p, q))
        out = operator_matrix(spec, "dbar", here, _layout(spec, (p, q + 1)))
        inc = operator_matrix(spec, "dbar", _layout(spec, (p, q - 1)), here)
        return _quotient_group("Dolbeault", (p, q), here, out, [inc])

    return _cached(spec, ("Dolbeault", p, q), build)


def anti_dolbeault(spec: ManifoldSpec, p: int, q: int) -> CohomologyGroup:
    """ker ∂ / im ∂ at (p, q)."""
    _require_constant(spec)
    _bidegree_check(spec, p, q)

    def build():
        here = _layout(spec, (p, q))
        out = operator_matrix(spec, "partial", here, _layout(spec, (p + 1, q)))
        inc = operator_matrix(spec, "partial", _layout(spec, (p - 1, q)), here)
        return _quotient_group("antiDolbeault", (p, q), here, out, [inc])

    return _cached(spec, ("antiDolbeault", p, q), build)


def bott_chern(spec: ManifoldSpec, p: int, q: int) -> CohomologyGroup:
    """d-closed (p, q)-forms modulo im ∂∂̄."""
    _require_constant(spec)
    _bidegree_check(spec, p, q)

    def build():
        here = _layout(spec, (p, q))
        out = operator_matrix(spec, "d", here, _layout(spec, (p + 1, q), (p, q + 1)))
        inc = operator_matrix(spec, "ddbar", _layout(spec, (p - 1, q - 1)), here)
        return _quotient_group("BC", (p, q), here, out, [inc])

    return _cached(spec, ("BC", p, q), build)


def aeppli(spec: ManifoldSpec, p: int, q: int) -> CohomologyGroup:
    """∂∂̄-closed (p, q)-forms modulo im ∂ + im ∂̄."""
    _require_constant(spec)
    _bidegree_check(spec, p, q)

    def build():
        here = _layout(spec, (p, q))
        out = operator_matrix(spec, "ddbar", here, _layout(spec, (p + 1, q + 1)))
        from_p = operator_matrix(spec, "partial", _layout(spec, (p - 1, q)), here)
        from_q = operator_matrix(spec, "dbar", _layout(spec, (p, q - 1)), here)
        return _quotient_group("A", (p, q), here, out, [from_p, from_q])

    return _cached(spec, ("A", p, q), build)


# ---------------------------------------------------------------------------
# L-complex


class LComplex:
    """Invariant global sections of L_{p,q}.

    Below the junction, position k holds (r, s) with r + s = k, r < p, s < q
    and the differential is d followed by projection.  The junction map from
    p+q-2 to p+q-1 is ∂∂̄.  From p+q-1 on, position k holds (r, s) with
    r + s = k + 1, r >= p, s >= q, and the differential is d.

    Works over a parameter ring too; ``D∘D = 0`` is checked on construction.
    """

    def __init__(self, spec: ManifoldSpec, p: int, q: int, check: bool = True):
        n = spec.n
        if not (0 <= p <= n + 1 and 0 <= q <= n + 1) or p + q < 1:
            raise ValueError(f"L-complex shape ({p},{q}) out of range for n={n}")
        self.spec, self.p, self.q = spec, p, q
        self.top = 2 * n
        self._layouts: dict[int, Layout] = {}
        self._diffs: dict[int, ExactMatrix] = {}
        if check:
            self.check()

    @property
    def shape(self) -> tuple[int, int]:
        return (self.p, self.q)

    @property
    def junction(self) -> int:
        """Source position of the ∂∂̄ map."""
        return self.p + self.q - 2

    def terms(self, k: int) -> list[tuple[int, int]]:
        n, p, q = self.spec.n, self.p, self.q
        if k < 0:
            return []
        if k <= self.junction:
            return [(r, k - r) for r in range(min(k, p - 1), -1, -1) if 0 <= k - r < q and k - r <= n]
        return [(r, k + 1 - r) for r in range(min(k + 1, n), p - 1, -1) if q <= k + 1 - r <= n]

    def layout(self, k: int) -> Layout:
        hit = self._layouts.get(k)
        if hit is None:
            hit = self._layouts[k] = Layout(self.spec.n, self.terms(k))
        return hit

    def operator(self, k: int) -> str:
        if k < self.junction:
            return "d"
        if k == self.junction:
            return "ddbar"
        return "d"

    def differential(self, k: int) -> ExactMatrix:
        """Matrix of L^k -> L^(k+1)."""
        hit = self._diffs.get(k)
        if hit is None:
            hit = operator_matrix(self.spec, self.operator(k), self.layout(k), self.layout(k + 1))
            self._diffs[k] = hit
        return hit

    def check(self) -> None:
        for k in range(-1, self.top + 1):
            a, b = self.differential(k), self.differential(k + 1)
            if a.cols and b.rows and not (b @ a).is_zero():
                raise ComplexError(f"L_{self.p},{self.q}: D∘D != 0 at position {k}")

    def cohomology(self, k: int) -> CohomologyGroup:
        _require_constant(self.spec)
        return _quotient_group(
            "Lcomplex", (k,), self.layout(k), self.differential(k), [self.differential(k - 1)], self.shape
        )

    def __repr__(self) -> str:
        return f"<LComplex ({self.p},{self.q}) on n={self.spec.n}>"


def l_complex(spec: ManifoldSpec, p: int, q: int) -> LComplex:
    return _cached(spec, ("LComplexObj", p, q), lambda: LComplex(spec, p, q))


def l_cohomology(spec: ManifoldSpec, p: int, q: int, k: int) -> CohomologyGroup:
    """H^k(L_{p,q}); at k = p+q-1 this is BC^{p,q}, and H^k(L_{p+1,q+1}) at k = p+q is A^{p,q}."""
    _require_constant(spec)
    if not 0 <= k <= 2 * spec.n + 1:
        raise ValueError(f"position {k} out of range 0..{2 * spec.n + 1}")
    return _cached(spec, ("Lcomplex", p, q, k), lambda: l_complex(spec, p, q).cohomology(k))


# ---------------------------------------------------------------------------
# comparison maps

MAPS = ("BC->dbar", "BC->partial", "dbar->A", "partial->A", "BC->dR", "dR->A")


@dataclass(eq=False)
class NaturalMap:
    which: str
    source: CohomologyGroup
    target: CohomologyGroup
    matrix: ExactMatrix

    @property
    def rank(self) -> int:
        return rank(self.matrix)

    @property
    def injective(self) -> bool:
        return self.rank == self.source.dim

    @property
    def surjective(self) -> bool:
        return self.rank == self.target.dim

    def __repr__(self) -> str:
        return f"<NaturalMap {self.which} {self.source.dim}->{self.target.dim} rank={self.rank}>"


_MAP_ALIASES = {
    "BC->∂̄": "BC->dbar", "BC->∂": "BC->partial", "∂̄->A": "dbar->A", "∂->A": "partial->A",
    "BC->Dolbeault": "BC->dbar", "BC->antiDolbeault": "BC->partial",
    "Dolbeault->A": "dbar->A", "antiDolbeault->A": "partial->A",
}


def natural_map(spec: ManifoldSpec, which: str, p: int, q: int) -> NaturalMap:
    """Map on classes induced by the identity on forms (or projection, for dR -> A)."""
    which = _MAP_ALIASES.get(which, which)
    if which not in MAPS:
        raise ValueError(f"unknown map {which!r}; expected one of {', '.join(MAPS)}")
    src_kind, tgt_kind = which.split("->")
    groups = {
        "BC": lambda: bott_chern(spec, p, q),
        "dbar": lambda: dolbeault(spec, p, q),
        "partial": lambda: anti_dolbeault(spec, p, q),
        "A": lambda: aeppli(spec, p, q),
        "dR": lambda: de_rham(spec, p + q),
    }
    source, target = groups[src_kind](), groups[tgt_kind]()
    cols = []
    for rep in source.representatives:
        if src_kind == "dR":
            rep = rep.component(p, q)
        cols.append(target.reducer(rep))
    matrix = ExactMatrix([[c[i] for c in cols] for i in range(target.dim)], source.dim)
    return NaturalMap(which, source, target, matrix)


def group(spec: ManifoldSpec, kind: str, *degree: int) -> CohomologyGroup:
    """Dispatch by kind name: ``group(spec, "BC", 2, 2)``, ``group(spec, "Lcomplex", p, q, k)``."""
    fn = {
        "deRham": de_rham, "dR": de_rham,
        "Dolbeault": dolbeault, "dbar": dolbeault,
        "antiDolbeault": anti_dolbeault, "partial": anti_dolbeault,
        "BC": bott_chern, "A": aeppli, "Lcomplex": l_cohomology,
    }.get(kind)
    if fn is None:
        raise ValueError(f"unknown cohomology kind {kind!r}")
    return fn(spec, *degree)


def dimension_table(spec: ManifoldSpec, kinds: Sequence[str] = ("deRham", "Dolbeault", "BC", "A")) -> dict:
    """{kind: {degree label: dim}} over every degree of the spec."""
    n = spec.n
    out: dict[str, dict[str, int]] = {}
    for kind in kinds:
        row: dict[str, int] = {}
        if kind in ("deRham", "dR"):
            for k in range(2 * n + 1):
                row[str(k)] = de_rham(spec, k).dim
        else:
            for p in range(n + 1):
                for q in range(n + 1):
                    row[f"{p},{q}"] = group(spec, kind, p, q).dim
        out[kind] = row
    return out
