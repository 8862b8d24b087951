"""Built-in structures: the Iwasawa manifold, complex tori, and the sigma model of
small deformations of the Iwasawa manifold together with their dimension tables.

In the sigma model ``dphi^1 = dphi^2 = 0`` and

    dphi^3 = s12 phi1^phi2 + s11b phi1^phibar1 + s12b phi1^phibar2
             + s21b phi2^phibar1 + s22b phi2^phibar2,

which is a valid complex structure for every choice of the five entries.  To
first order in the Kodaira-Spencer parameters,
``(s12, s11b, s12b, s21b, s22b) = (-1, t21, t22, -t11, -t12)``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, NamedTuple

from .exterior import BigradedForm
from .linalg import ExactMatrix, rank
from .scalars import ParameterRing, TruncatedPoly, as_scalar, conj
from .structure import ManifoldSpec, sigma_form

__all__ = [
    "iwasawa",
    "torus",
    "SigmaTuple",
    "sigma_family",
    "ClassLabel",
    "classify",
    "LABELS",
    "DIRECTIONS",
    "SAMPLE_POINTS",
    "SAMPLE_SCALE",
    "TABLE_COLUMNS",
    "TABLE_KINDS",
    "ground_truth",
    "expected_dims",
    "sample_spec",
]

T_NAMES = ("t11", "t12", "t21", "t22")
LABELS = ("i", "ii.a", "ii.b", "iii.a", "iii.b")

# One direction per subclass.  The sample structures sit at SAMPLE_SCALE times
# the direction: at scale 1 the first-order model leaves the small-deformation
# regime (for ii.b the underlying Lie algebra changes and b2 becomes 9).
DIRECTIONS: dict[str, dict[str, object]] = {
    "i": {"t31": 1},
    "ii.a": {"t21": 1},
    "ii.b": {"t21": 1, "t22": "i"},
    "iii.a": {"t11": 1, "t22": 1},
    "iii.b": {"t11": 1, "t22": 2},
}
SAMPLE_SCALE = Fraction(1, 10)
SAMPLE_POINTS: dict[str, dict[str, object]] = {
    label: {k: as_scalar(v) * SAMPLE_SCALE for k, v in d.items()} for label, d in DIRECTIONS.items()
}


def iwasawa() -> ManifoldSpec:
    f = BigradedForm.monomial(3, [1, 2], coef=-1)
    return ManifoldSpec.build(3, {3: f}, name="iwasawa")


def torus(n: int) -> ManifoldSpec:
    if n < 1:
        raise ValueError("torus dimension must be at least 1")
    return ManifoldSpec.build(n, {}, name=f"torus{n}")


class SigmaTuple(NamedTuple):
    s12: object
    s11b: object
    s12b: object
    s21b: object
    s22b: object

    @classmethod
    def first_order(cls, t: Mapping[str, object]) -> "SigmaTuple":
        """``(-1, t21, t22, -t11, -t12)``; entries may be scalars or ring elements."""
        def get(name):
            v = t.get(name, 0)
            return v if isinstance(v, TruncatedPoly) else as_scalar(v)

        return cls(as_scalar(-1), get("t21"), get("t22"), -get("t11"), -get("t12"))

    def spec(self, ring: ParameterRing | None = None, name: str | None = None) -> ManifoldSpec:
        return ManifoldSpec.build(3, {3: sigma_form(self)}, ring, name)


def _point_scalars(point: Mapping[str, object]) -> dict[str, object]:
    out = {}
    for name, value in point.items():
        if not (len(name) == 3 and name.startswith("t") and name[1] in "123" and name[2] in "123"):
            raise ValueError(f"unknown parameter {name!r}; expected t<i><lam> with i, lam in 1..3")
        out[name] = as_scalar(value)
    return out


def sigma_family(point: Mapping[str, object] | None = None, order: int = 1, name: str | None = None):
    """First-order sigma model.

    With a ``point`` (values for t11, t12, t21, t22; t3* entries are accepted
    and do not enter) this is the deformed structure at that point.  Without
    one it is the family over Q(i)[t11..t22, conjugates] truncated at
    ``order``, returned as a :class:`~bottchern.deformation.FamilySpec`.
    """
    if point is not None:
        values = _point_scalars(point)
        return SigmaTuple.first_order(values).spec(name=name)
    from .deformation import FamilySpec

    ring = ParameterRing(T_NAMES, order)
    sigma = SigmaTuple.first_order({n: ring.gen(n) for n in T_NAMES})
    form = _sigma_form_over(sigma, ring)
    family = ManifoldSpec.build(3, {3: form}, ring, name or "sigma")
    return FamilySpec(iwasawa(), family, sigma=tuple(sigma))


def _sigma_form_over(sigma: SigmaTuple, ring: ParameterRing) -> BigradedForm:
    f = BigradedForm.monomial
    terms = [([1, 2], []), ([1], [1]), ([1], [2]), ([2], [1]), ([2], [2])]
    out = BigradedForm.zero(3)
    for (hol, anti), c in zip(terms, sigma):
        mono = f(3, hol, anti)
        out = out + mono.map_coefficients(lambda one, c=c: c if isinstance(c, TruncatedPoly) else ring.const(c))
    return out


def sample_spec(label: str) -> ManifoldSpec:
    """The catalog's deformed structure for a subclass label."""
    if label not in SAMPLE_POINTS:
        raise ValueError(f"unknown class label {label!r}; expected one of {', '.join(LABELS)}")
    return sigma_family(SAMPLE_POINTS[label], name=f"sigma[{label}]")


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassLabel:
    label: str
    D: object
    rank_S: int

    @property
    def family(self) -> str:
        """Coarse class: i, ii or iii."""
        return self.label.split(".")[0]

    def __str__(self) -> str:
        return self.label


def _s_matrix(s11b, s22b, s12b, s21b) -> ExactMatrix:
    return ExactMatrix(
        [
            [conj(s11b), conj(s22b), conj(s12b), conj(s21b)],
            [s11b, s22b, s21b, s12b],
        ]
    )


def classify(values) -> ClassLabel:
    """Subclass of a first-order deformation direction or of a sigma tuple.

    ``values`` is a mapping of t entries, a 4-sequence ``(t11, t12, t21,
    t22)``, or a :class:`SigmaTuple`.
    """
    if isinstance(values, SigmaTuple):
        s11b, s12b, s21b, s22b = (as_scalar(x) for x in values[1:])
        D = s11b * s22b - s12b * s21b
        moving = any((s11b, s12b, s21b, s22b))
    else:
        if not isinstance(values, Mapping):
            values = dict(zip(T_NAMES, values))
        t = {k: as_scalar(values.get(k, 0)) for k in T_NAMES}
        D = t["t11"] * t["t22"] - t["t21"] * t["t12"]
        s11b, s12b, s21b, s22b = t["t21"], t["t22"], -t["t11"], -t["t12"]
        moving = any(t.values())
    S = _s_matrix(s11b, s22b, s12b, s21b)
    r = rank(S)
    if not moving:
        return ClassLabel("i", D, r)
    coarse = "ii" if not D else "iii"
    return ClassLabel(f"{coarse}.{'a' if r == 1 else 'b'}", D, r)


# ---------------------------------------------------------------------------
# ground truth

TABLE_KINDS = ("dR", "dbar", "BC", "A")


@lru_cache(maxsize=None)
def ground_truth() -> dict:
    text = resources.files("bottchern").joinpath("data/iwasawa_tables.json").read_text(encoding="utf-8")
    return json.loads(text)


TABLE_COLUMNS: tuple[tuple[int, int], ...] = tuple(
    tuple(int(x) for x in c.split(",")) for c in ground_truth()["columns"]
)


def expected_dims(label: str, table: str) -> dict:
    """Published dimensions for ``label`` keyed by bidegree ``(p, q)`` or degree ``k``."""
    data = ground_truth()
    if label == "central":
        label = "i"
    if label not in LABELS:
        raise ValueError(f"unknown class label {label!r}; expected one of {', '.join(LABELS)}")
    if table == "dR":
        return {int(k): v for k, v in zip(data["degrees"], data["tables"]["dR"]["all"])}
    if table == "dbar":
        row = data["tables"]["dbar"][label.split(".")[0]]
    elif table in ("BC", "A"):
        row = data["tables"][table][label]
    else:
        raise ValueError(f"unknown table {table!r}; expected one of {', '.join(TABLE_KINDS)}")
    return dict(zip(TABLE_COLUMNS, row))
