"""First-order obstructions to extending cohomology classes along deformations.

A deformation direction is a constant Kodaira-Spencer class
``kappa = sum t[i][lam] theta_i (x) phibar^lam``.  To first order the
differential moves by ``s [∂, ι_κ] + sbar [∂̄, ι_κ̄]``, where ``s`` and
``sbar`` are independent parameters, so every obstruction splits into a
``u`` branch (coefficient of ``s``) and a ``v`` branch (coefficient of
``sbar``).  The class vanishes only when both branches do.

Groups are realized in the invariant L-complex model:

==========  =====================  ==================  =================
source      complex                source position     target position
==========  =====================  ==================  =================
BC(p,q)     L_{p,q}                p+q-1               p+q
A(p,q)      L_{p+1,q+1}            p+q                 p+q+1  (= BC^{p+1,q+1})
Bclass      L_{P,Q}                l-1                 l
==========  =====================  ==================  =================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .cohomology import CohomologyGroup, aeppli, bott_chern, l_cohomology, l_complex, natural_map
from .exterior import BigradedForm, FrameVector, format_form, interior, wedge
from .linalg import NotContained, graded_solve
from .scalars import ONE, ZERO, GaussianRational, ParameterRing, TruncatedPoly, as_scalar
from .structure import ManifoldSpec, NotClosed, dbar, partial, validate

__all__ = [
    "KodairaSpencerClass",
    "InvalidKodairaSpencer",
    "RepresentativeInvalid",
    "PreconditionNotMet",
    "Source",
    "ObstructionClass",
    "FamilySpec",
    "ExtensionResult",
    "JumpVerdict",
    "JumpReport",
    "CorollaryReport",
    "ParallelisableReport",
    "contract",
    "conj_contract",
    "first_order_family",
    "obstruction_first_order",
    "extend_class",
    "jump_scan",
    "jump_sources",
    "corollary_condition",
    "parallelisable_jump_check",
    "parse_direction",
]


class InvalidKodairaSpencer(ValueError):
    """The direction is not ∂̄-closed on the invariant model."""


class RepresentativeInvalid(ValueError):
    """A form is not a cocycle of the requested source group."""


class PreconditionNotMet(ValueError):
    pass


# ---------------------------------------------------------------------------
# Kodaira-Spencer classes


class KodairaSpencerClass:
    """The matrix ``t[i][lam]`` (1-based in names: ``t21`` is row 2, column 1)."""

    def __init__(self, n: int, t: Mapping[str, object] | Sequence[Sequence[object]] | None = None):
        self.n = n
        matrix = [[ZERO] * n for _ in range(n)]
        if isinstance(t, Mapping):
            for name, value in t.items():
                i, lam = _entry_index(name, n)
                matrix[i - 1][lam - 1] = as_scalar(value)
        elif t is not None:
            rows = [list(r) for r in t]
            if len(rows) != n or any(len(r) != n for r in rows):
                raise ValueError(f"Kodaira-Spencer matrix must be {n}x{n}")
            matrix = [[as_scalar(x) for x in r] for r in rows]
        self.t: tuple[tuple[GaussianRational, ...], ...] = tuple(tuple(r) for r in matrix)

    @classmethod
    def unit(cls, n: int, i: int, lam: int) -> "KodairaSpencerClass":
        return cls(n, {f"t{i}{lam}": 1})

    def entries(self) -> dict[str, GaussianRational]:
        """Nonzero entries keyed ``t<i><lam>``."""
        return {
            f"t{i + 1}{lam + 1}": c for i, row in enumerate(self.t) for lam, c in enumerate(row) if c
        }

    def __bool__(self) -> bool:
        return any(c for row in self.t for c in row)

    def __eq__(self, other) -> bool:
        return isinstance(other, KodairaSpencerClass) and self.t == other.t

    def __hash__(self) -> int:
        return hash(self.t)

    def __add__(self, other: "KodairaSpencerClass") -> "KodairaSpencerClass":
        return KodairaSpencerClass(self.n, [[a + b for a, b in zip(r, s)] for r, s in zip(self.t, other.t)])

    def __mul__(self, c) -> "KodairaSpencerClass":
        c = as_scalar(c)
        return KodairaSpencerClass(self.n, [[c * a for a in r] for r in self.t])

    __rmul__ = __mul__

    def __repr__(self) -> str:
        from .scalars import format_scalar

        body = ", ".join(f"{k}={format_scalar(v)}" for k, v in self.entries().items())
        return f"KodairaSpencerClass({body or '0'})"

    def check(self, spec: ManifoldSpec) -> "KodairaSpencerClass":
        """Raise unless ``[∂̄, ι_κ]`` vanishes on every generator."""
        n = spec.n
        for k in range(1, n + 1):
            for gen in (BigradedForm.phi(n, k), BigradedForm.phibar(n, k)):
                residue = dbar(contract(self, gen), spec) - contract(self, dbar(gen, spec))
                if residue:
                    raise InvalidKodairaSpencer(
                        f"{self!r} is not ∂̄-closed: [∂̄, ι_κ] on {format_form(gen)} gives {format_form(residue)}"
                    )
        return self

    def is_valid(self, spec: ManifoldSpec) -> bool:
        try:
            self.check(spec)
        except InvalidKodairaSpencer:
            return False
        return True


def _entry_index(name: str, n: int) -> tuple[int, int]:
    if not (name.startswith("t") and len(name) == 3 and name[1:].isdigit()):
        raise ValueError(f"direction entry {name!r} must look like t21")
    i, lam = int(name[1]), int(name[2])
    if not (1 <= i <= n and 1 <= lam <= n):
        raise ValueError(f"direction entry {name!r} out of range for n={n}")
    return i, lam


def parse_direction(text: str, n: int) -> KodairaSpencerClass:
    """``"t21=1, t22=i"`` -> KodairaSpencerClass."""
    from .scalars import parse_scalar

    values = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, sep, value = chunk.partition("=")
        if not sep:
            raise ValueError(f"direction entry {chunk!r} must be name=scalar")
        name = name.strip()
        _entry_index(name, n)
        if name in values:
            raise ValueError(f"direction entry {name!r} given twice")
        values[name] = parse_scalar(value.strip())
    return KodairaSpencerClass(n, values)


def contract(kappa: KodairaSpencerClass, alpha: BigradedForm) -> BigradedForm:
    """``sum t[i][lam] phibar^lam ^ (theta_i ⌟ alpha)``; (p, q) -> (p-1, q+1)."""
    n = alpha.n
    out = BigradedForm.zero(n)
    for i in range(1, n + 1):
        inner = interior(FrameVector(i, True), alpha)
        if not inner:
            continue
        for lam in range(1, n + 1):
            c = kappa.t[i - 1][lam - 1]
            if c:
                out = out + wedge(BigradedForm.phibar(n, lam), inner) * c
    return out


def conj_contract(kappa: KodairaSpencerClass, alpha: BigradedForm) -> BigradedForm:
    """``sum conj(t[i][lam]) phi^lam ^ (thetabar_i ⌟ alpha)``; (p, q) -> (p+1, q-1)."""
    n = alpha.n
    out = BigradedForm.zero(n)
    for i in range(1, n + 1):
        inner = interior(FrameVector(i, False), alpha)
        if not inner:
            continue
        for lam in range(1, n + 1):
            c = kappa.t[i - 1][lam - 1]
            if c:
                out = out + wedge(BigradedForm.phi(n, lam), inner) * c.conjugate()
    return out


# ---------------------------------------------------------------------------
# sources and obstruction classes


@dataclass(frozen=True)
class Source:
    """A source group: ``Source("BC", 2, 0)``, ``Source("A", 1, 1)``, ``Source("Bclass", 2, 2, 2)``."""

    kind: str
    p: int
    q: int
    level: int | None = None

    def __post_init__(self):
        if self.kind not in ("BC", "A", "Bclass"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if (self.kind == "Bclass") != (self.level is not None):
            raise ValueError("a level is required exactly for Bclass sources")

    @property
    def shape(self) -> tuple[int, int]:
        if self.kind == "A":
            return (self.p + 1, self.q + 1)
        return (self.p, self.q)

    @property
    def position(self) -> int:
        """Position of the source group in its L-complex."""
        if self.kind == "BC":
            return self.p + self.q - 1
        if self.kind == "A":
            return self.p + self.q
        return self.level - 1

    def group(self, spec: ManifoldSpec) -> CohomologyGroup:
        if self.kind == "BC":
            return bott_chern(spec, self.p, self.q)
        if self.kind == "A":
            return aeppli(spec, self.p, self.q)
        return l_cohomology(spec, self.p, self.q, self.position)

    def target(self, spec: ManifoldSpec) -> CohomologyGroup:
        p, q = self.shape
        return l_cohomology(spec, p, q, self.position + 1)

    def __str__(self) -> str:
        if self.kind == "Bclass":
            return f"Bclass({self.p},{self.q},{self.level})"
        return f"{self.kind}({self.p},{self.q})"


@dataclass(eq=False)
class ObstructionClass:
    """Obstruction branches with their classes in the target group.

    ``branches`` maps a label to a form in the target position: ``"u"`` and
    ``"v"`` for first-order obstructions, parameter monomials for
    obstructions found by :func:`extend_class`.
    """

    source: Source
    theta: BigradedForm
    branches: dict[str, BigradedForm]
    target: CohomologyGroup
    coordinates: dict[str, list]
    order: int = 1

    @property
    def u_branch(self) -> BigradedForm | None:
        return self.branches.get("u")

    @property
    def v_branch(self) -> BigradedForm | None:
        return self.branches.get("v")

    @property
    def form(self) -> BigradedForm:
        total = BigradedForm.zero(self.theta.n)
        for f in self.branches.values():
            total = total + f
        return total

    @property
    def vanishes(self) -> bool:
        return not any(any(c) for c in self.coordinates.values())

    def __repr__(self) -> str:
        state = "vanishing" if self.vanishes else "nonvanishing"
        return f"<ObstructionClass o{self.order}({format_form(self.theta)}) in {self.target.label()}: {state}>"


def _branch_coordinates(target: CohomologyGroup, form: BigradedForm) -> list:
    layout = target.layout
    try:
        return target.reducer(layout.to_vector(form))
    except NotContained:
        raise ArithmeticError(
            f"obstruction branch {format_form(form)} is not a cocycle in {target.label()}"
        ) from None


def obstruction_first_order(spec: ManifoldSpec, kappa: KodairaSpencerClass, source: Source, theta: BigradedForm) -> ObstructionClass:
    """First-order obstruction to extending the class of ``theta`` in direction ``kappa``.

    BC(p,q):     u = -∂(κ⌟θ),           v = -∂̄(κ̄⌟θ)
    A(p,q):      u = -∂(κ⌟∂θ),          v = +∂̄(κ̄⌟∂̄θ)
    Bclass:      u = -pr(κ⌟∂θ),         v = -pr(κ̄⌟∂̄θ)
    """
    validate(spec)
    kappa.check(spec)
    if source.kind == "Bclass" and source.position > sum(source.shape) - 3:
        raise ValueError(f"{source}: only positions below the ∂∂̄ junction are supported")
    group = source.group(spec)
    try:
        vec = group.layout.to_vector(theta)
    except ValueError as exc:
        raise RepresentativeInvalid(f"{format_form(theta)} is not in the {source} cochain space: {exc}") from None
    if not group.report.numerator.contains(vec):
        raise RepresentativeInvalid(f"{format_form(theta)} is not a cocycle for {source}")
    if source.kind == "BC":
        u = -partial(contract(kappa, theta), spec)
        v = -dbar(conj_contract(kappa, theta), spec)
    elif source.kind == "A":
        u = -partial(contract(kappa, partial(theta, spec)), spec)
        v = dbar(conj_contract(kappa, dbar(theta, spec)), spec)
    else:
        u = -contract(kappa, partial(theta, spec))
        v = -conj_contract(kappa, dbar(theta, spec))
    target = source.target(spec)
    keep = set(target.layout.bidegrees)
    u = _project(u, keep)
    v = _project(v, keep)
    coords = {"u": _branch_coordinates(target, u), "v": _branch_coordinates(target, v)}
    return ObstructionClass(source, theta, {"u": u, "v": v}, target, coords, order=1)


def _project(form: BigradedForm, bidegrees) -> BigradedForm:
    out = BigradedForm.zero(form.n)
    for b in form.bidegrees():
        if b in bidegrees:
            out = out + form.component(*b)
    return out


# ---------------------------------------------------------------------------
# families and extension


@dataclass(eq=False)
class FamilySpec:
    """Deformed structure equations over a truncated parameter ring."""

    base: ManifoldSpec
    spec: ManifoldSpec
    kappa: KodairaSpencerClass | None = None
    sigma: tuple | None = None

    def __post_init__(self):
        if self.spec.ring is None:
            raise TypeError("a family needs a spec over a parameter ring")
        validate(self.spec)
        if self.spec.central() != self.base:
            raise ValueError("the family does not restrict to its base spec at the origin")

    @property
    def ring(self) -> ParameterRing:
        return self.spec.ring

    def at(self, values: Mapping[str, object]) -> ManifoldSpec:
        return self.spec.evaluate(values)


def first_order_family(spec: ManifoldSpec, kappa: KodairaSpencerClass, order: int = 1, parameter: str = "s") -> FamilySpec:
    """``dphi^k + s [∂, ι_κ] phi^k + sbar [∂̄, ι_κ̄] phi^k`` over Q(i)[s, sbar] / deg > order."""
    validate(spec)
    kappa.check(spec)
    n = spec.n
    ring = ParameterRing((parameter,), order)
    s, sbar = ring.gen(parameter), ring.conj_gen(parameter)
    forms = []
    for k in range(1, n + 1):
        phi = BigradedForm.phi(n, k)
        first = partial(contract(kappa, phi), spec) - contract(kappa, partial(phi, spec))
        second = dbar(conj_contract(kappa, phi), spec) - conj_contract(kappa, dbar(phi, spec))
        f = spec.dphi[k - 1].map_coefficients(ring.const)
        f = f + first.map_coefficients(lambda c: s * c) + second.map_coefficients(lambda c: sbar * c)
        forms.append(f)
    try:
        family = ManifoldSpec.build(n, forms, ring, name=spec.name)
    except NotClosed as exc:
        raise ValueError(f"first-order family is not closed at order {order}: {exc}") from None
    return FamilySpec(spec, family, kappa)


@dataclass(eq=False)
class ExtensionResult:
    requested: int
    achieved: int
    source: Source
    theta: BigradedForm
    representative: BigradedForm | None = None
    obstruction: ObstructionClass | None = None

    @property
    def ok(self) -> bool:
        return self.achieved >= self.requested

    def __repr__(self) -> str:
        return f"<ExtensionResult {self.source} achieved {self.achieved}/{self.requested}>"


def extend_class(family: FamilySpec, source: Source, theta: BigradedForm, order: int | None = None) -> ExtensionResult:
    """Lift the cocycle ``theta`` of the central fiber to a family cocycle, order by order.

    The particular lift at each order is the one chosen by the exact solver;
    a failure past order 1 is an obstruction for those choices.
    """
    ring = family.ring
    order = ring.order if order is None else order
    central = family.base
    group = source.group(central)
    x0 = group.layout.to_vector(theta)
    if not group.report.numerator.contains(x0):
        raise RepresentativeInvalid(f"{format_form(theta)} is not a cocycle for {source}")
    p, q = source.shape
    complex_ = l_complex(family.spec, p, q)
    k = source.position
    m = complex_.differential(k)
    rhs = [-e for e in m.apply([ring.const(x) for x in x0])] if m.rows else []
    result = graded_solve(m, rhs, ring, order)
    if result.ok:
        layout = complex_.layout(k)
        lifted = [ring.const(x) + y for x, y in zip(x0, result.solution)]
        return ExtensionResult(order, order, source, theta, layout.to_form(lifted), None)
    target = source.target(central)
    branches, coords = {}, {}
    for mono, vec in sorted(result.residue.items(), reverse=True):
        label = ring.format_monomial(mono)
        branches[label] = target.layout.to_form(vec)
        coords[label] = target.reducer(vec)
    obstruction = ObstructionClass(source, theta, branches, target, coords, order=result.failed_order)
    return ExtensionResult(order, result.failed_order - 1, source, theta, None, obstruction)


# ---------------------------------------------------------------------------
# jump detection


def jump_sources(kind: str, p: int, q: int, n: int) -> list[Source]:
    """Source groups whose obstructions bear on ``h_kind^{p,q}``."""
    out: list[Source] = []
    if kind == "BC":
        if p + q >= 1:
            out.append(Source("BC", p, q))
        if p >= 1 and q >= 1:
            out.append(Source("A", p - 1, q - 1))
    elif kind == "A":
        if p + q >= 1:
            out.append(Source("A", p, q))
        if p + q >= 1 and p + 1 <= n + 1 and q + 1 <= n + 1:
            out.append(Source("Bclass", p + 1, q + 1, p + q))
    else:
        raise ValueError(f"jump scans cover BC and A, not {kind!r}")
    return out


@dataclass(eq=False)
class JumpVerdict:
    kind: str
    p: int
    q: int
    jumps: bool
    witness: ObstructionClass | None
    checked: int
    central_dim: int
    sample_dim: int | None

    @property
    def drop(self) -> int | None:
        return None if self.sample_dim is None else self.central_dim - self.sample_dim


@dataclass(eq=False)
class JumpReport:
    kappa: KodairaSpencerClass
    verdicts: list[JumpVerdict] = field(default_factory=list)

    def flagged(self, kind: str) -> list[tuple[int, int]]:
        return [(v.p, v.q) for v in self.verdicts if v.kind == kind and v.jumps]

    def dropped(self, kind: str) -> list[tuple[int, int]]:
        return [(v.p, v.q) for v in self.verdicts if v.kind == kind and v.drop]

    @property
    def corroborated(self) -> bool:
        """Every flag shows a strict drop at the sample point."""
        return all(v.drop is None or v.drop > 0 for v in self.verdicts if v.jumps)


def _group_dim(spec: ManifoldSpec, kind: str, p: int, q: int) -> int:
    return (bott_chern if kind == "BC" else aeppli)(spec, p, q).dim


def jump_scan(
    spec: ManifoldSpec,
    kappa: KodairaSpencerClass,
    kinds: Iterable[str] = ("BC", "A"),
    bidegrees: Iterable[tuple[int, int]] | None = None,
    sample: ManifoldSpec | None = None,
    sample_scale=Fraction(1, 10),
) -> JumpReport:
    """First-order jump evidence for each requested ``(p, q)``.

    ``sample`` is the deformed structure used for the dimension cross-check;
    when omitted the first-order family is evaluated at ``s = sample_scale``
    if that is a valid structure.
    """
    validate(spec)
    kappa.check(spec)
    n = spec.n
    if bidegrees is None:
        bidegrees = [(p, q) for p in range(n + 1) for q in range(n + 1)]
    bidegrees = list(bidegrees)
    if sample is None and kappa:
        try:
            sample = first_order_family(spec, kappa).at({"s": sample_scale})
        except (ValueError, NotClosed):
            sample = None
    report = JumpReport(kappa)
    for kind in kinds:
        for p, q in bidegrees:
            witness, checked = None, 0
            for source in jump_sources(kind, p, q, n):
                for theta in source.group(spec).representatives:
                    checked += 1
                    ob = obstruction_first_order(spec, kappa, source, theta)
                    if not ob.vanishes:
                        witness = ob
                        break
                if witness is not None:
                    break
            sample_dim = _group_dim(sample, kind, p, q) if sample is not None else None
            report.verdicts.append(
                JumpVerdict(kind, p, q, witness is not None, witness, checked, _group_dim(spec, kind, p, q), sample_dim)
            )
    return report


# ---------------------------------------------------------------------------
# sufficient conditions for extension


@dataclass(eq=False)
class CorollaryReport:
    kind: str
    p: int
    q: int
    ranks: dict[str, int]
    applicable: bool
    extended: list[ExtensionResult] = field(default_factory=list)

    @property
    def verified(self) -> bool | None:
        if not self.applicable:
            return None
        return all(r.ok for r in self.extended)


def corollary_condition(spec: ManifoldSpec, family: FamilySpec | None, p: int, q: int, kind: str = "BC", order: int = 1) -> CorollaryReport:
    """Check whether the comparison maps into Dolbeault groups vanish, and if so extend every class.

    For BC^{p,q} the maps are BC->∂̄ and BC->∂ at (p, q).  For A^{p,q} they
    are BC->∂̄ at (p+1, q) and BC->∂ at (p, q+1).
    """
    n = spec.n
    if kind == "BC":
        spots = {"BC->dbar": (p, q), "BC->partial": (p, q)}
    elif kind == "A":
        spots = {"BC->dbar": (p + 1, q), "BC->partial": (p, q + 1)}
    else:
        raise ValueError(f"corollary checks cover BC and A, not {kind!r}")
    ranks = {}
    for which, (a, b) in spots.items():
        ranks[which] = natural_map(spec, which, a, b).rank if a <= n and b <= n else 0
    applicable = not any(ranks.values())
    report = CorollaryReport(kind, p, q, ranks, applicable)
    if applicable and family is not None:
        source = Source(kind, p, q)
        for theta in source.group(spec).representatives:
            report.extended.append(extend_class(family, source, theta, order))
    return report


@dataclass(eq=False)
class ParallelisableReport:
    witness: ObstructionClass | None
    kappa: KodairaSpencerClass | None
    searched: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def parallelisable_jump_check(spec: ManifoldSpec, directions: Iterable[KodairaSpencerClass] | None = None) -> ParallelisableReport:
    """Search holomorphic 1-forms and directions for a nonvanishing obstruction on Bclass(2,2,2)."""
    validate(spec)
    n = spec.n
    if n < 3:
        raise PreconditionNotMet("needs complex dimension at least 3")
    if any(f.component(1, 1) for f in spec.dphi):
        raise PreconditionNotMet("not complex parallelisable: some ∂̄phi^k is nonzero")
    if not any(spec.dphi):
        raise PreconditionNotMet("all dphi^k vanish, so the structure is Kähler")
    if directions is None:
        directions = (KodairaSpencerClass.unit(n, i, lam) for i, lam in product(range(1, n + 1), repeat=2))
    source = Source("Bclass", 2, 2, 2)
    searched = 0
    for kappa in directions:
        if not kappa or not kappa.is_valid(spec):
            continue
        for k in range(1, n + 1):
            searched += 1
            ob = obstruction_first_order(spec, kappa, source, BigradedForm.phi(n, k))
            if not ob.vanishes:
                return ParallelisableReport(ob, kappa, searched)
    return ParallelisableReport(None, None, searched)
