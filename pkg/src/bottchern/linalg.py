"""Exact linear algebra over Q(i), plus degree-by-degree solving over a truncated ring.

Vectors are plain lists of :class:`~bottchern.scalars.GaussianRational`.
Elimination is Gauss-Jordan with the pivot in each column chosen by smallest
coefficient height, which keeps intermediate fractions small on the
matrices that occur here (at most a few dozen rows).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .scalars import ONE, ZERO, GaussianRational, ParameterRing, TruncatedPoly

__all__ = [
    "ExactMatrix",
    "SubspaceBasis",
    "QuotientReport",
    "NotContained",
    "GradedSolution",
    "rref",
    "rank",
    "kernel",
    "image",
    "span",
    "quotient",
    "solve",
    "graded_solve",
]


class NotContained(ArithmeticError):
    """A denominator subspace is not contained in its numerator."""


class ExactMatrix:
    """Dense rows x cols matrix of exact scalars."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        if cols is None:
            cols = len(self.entries[0]) if self.entries else 0
        self.cols = cols
        for r in self.entries:
            if len(r) != cols:
                raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, rows: int, cols: int, zero=ZERO) -> "ExactMatrix":
        return cls([[zero] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, size: int) -> "ExactMatrix":
        return cls([[ONE if i == j else ZERO for j in range(size)] for i in range(size)], size)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "ExactMatrix":
        return cls([[col[i] for col in columns] for i in range(rows)], len(columns))

    def column(self, j: int) -> list:
        return [row[j] for row in self.entries]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for a matrix with {self.cols} columns")
        out = []
        for row in self.entries:
            acc = ZERO
            for a, x in zip(row, vec):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        cols = other.columns()
        return ExactMatrix.from_columns([self.apply(c) for c in cols], self.rows) if cols else ExactMatrix.zeros(self.rows, 0)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.columns(), self.rows)

    def is_zero(self) -> bool:
        return not any(x for row in self.entries for x in row)

    def map(self, f: Callable) -> "ExactMatrix":
        return ExactMatrix([[f(x) for x in row] for row in self.entries], self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols})"


def _height(x: GaussianRational) -> int:
    return x.height()


def _rref_rows(rows: list[list], ncols: int, track: list[list] | None = None) -> list[int]:
    """In-place Gauss-Jordan on ``rows``; returns pivot columns.

    When ``track`` is given, the same row operations are applied to it.
    """
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        best, best_h = -1, None
        for i in range(r, nrows):
            x = rows[i][c]
            if x:
                h = _height(x)
                if best_h is None or h < best_h:
                    best, best_h = i, h
                    if h <= 1:
                        break
        if best < 0:
            continue
        if best != r:
            rows[r], rows[best] = rows[best], rows[r]
            if track is not None:
                track[r], track[best] = track[best], track[r]
        inv = rows[r][c].inverse()
        if inv != ONE:
            rows[r] = [x * inv if x else x for x in rows[r]]
            if track is not None:
                track[r] = [x * inv if x else x for x in track[r]]
        prow = rows[r]
        trow = track[r] if track is not None else None
        for i in range(nrows):
            if i == r:
                continue
            f = rows[i][c]
            if not f:
                continue
            row = rows[i]
            for j in range(c, ncols):
                if prow[j]:
                    row[j] = row[j] - f * prow[j]
            if trow is not None:
                t = track[i]
                for j, y in enumerate(trow):
                    if y:
                        t[j] = t[j] - f * y
        pivots.append(c)
        r += 1
    return pivots


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    rows = [list(r) for r in m.entries]
    pivots = _rref_rows(rows, m.cols)
    return ExactMatrix(rows, m.cols), pivots


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


@dataclass
class SubspaceBasis:
    """Subspace of ``ambient``-dimensional coordinate space, basis in reduced echelon form."""

    ambient: int
    vectors: list[list]
    pivots: list[int] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def contains(self, vec: Sequence) -> bool:
        return not any(self.reduce(vec))

    def reduce(self, vec: Sequence) -> list:
        """Remainder of ``vec`` after clearing the pivot columns."""
        out = list(vec)
        for v, c in zip(self.vectors, self.pivots):
            f = out[c]
            if f:
                out = [a - f * b if b else a for a, b in zip(out, v)]
        return out

    def __repr__(self) -> str:
        return f"SubspaceBasis(dim={self.dim}, ambient={self.ambient})"


def span(vectors: Iterable[Sequence], ambient: int) -> SubspaceBasis:
    rows = [list(v) for v in vectors]
    for v in rows:
        if len(v) != ambient:
            raise ValueError("vector length does not match the ambient dimension")
    pivots = _rref_rows(rows, ambient)
    return SubspaceBasis(ambient, rows[: len(pivots)], pivots)


def kernel(m: ExactMatrix) -> SubspaceBasis:
    """Null space of ``m`` (column vectors ``x`` with ``m x = 0``)."""
    reduced, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    vectors = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for row, p in zip(reduced.entries, pivots):
            if row[f]:
                v[p] = -row[f]
        vectors.append(v)
    return span(vectors, m.cols)


def image(m: ExactMatrix) -> SubspaceBasis:
    """Column space of ``m``."""
    return span(m.columns(), m.rows)


@dataclass
class QuotientReport:
    """numerator / denominator with chosen lifts and a coordinate map."""

    numerator: SubspaceBasis
    denominator: SubspaceBasis
    representatives: list[list]
    _transform: list[list] = field(repr=False, default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    @property
    def ambient(self) -> int:
        return self.numerator.ambient

    def reducer(self, vec: Sequence) -> list:
        """Coordinates of ``vec`` in the quotient basis.

        Zero exactly for vectors of the denominator.  Raises
        :class:`NotContained` for a vector outside the numerator.
        """
        if len(vec) != self.ambient:
            raise ValueError("vector length does not match the ambient dimension")
        d = self.denominator.dim
        m = d + self.dim
        w = []
        for row in self._transform:
            acc = ZERO
            for a, x in zip(row, vec):
                if a and x:
                    acc = acc + a * x
            w.append(acc)
        if any(w[m:]):
            raise NotContained("vector is not in the numerator subspace")
        return w[d:m]

    def is_zero(self, vec: Sequence) -> bool:
        return not any(self.reducer(vec))


def quotient(numerator: SubspaceBasis, denominator: SubspaceBasis) -> QuotientReport:
    """numerator / denominator; containment is verified, never assumed."""
    if numerator.ambient != denominator.ambient:
        raise ValueError("subspaces in different ambient spaces")
    for v in denominator.vectors:
        if not numerator.contains(v):
            raise NotContained("denominator escapes the numerator")
    reps: list[list] = []
    acc = SubspaceBasis(denominator.ambient, [list(v) for v in denominator.vectors], list(denominator.pivots))
    for v in numerator.vectors:
        rem = acc.reduce(v)
        if any(rem):
            reps.append(list(v))
            acc = span(acc.vectors + [v], numerator.ambient)
    ambient = numerator.ambient
    cols = list(denominator.vectors) + reps
    # rows of B = [den | reps] as columns, eliminated together with the identity
    rows = [[col[i] for col in cols] for i in range(ambient)]
    track = [[ONE if i == j else ZERO for j in range(ambient)] for i in range(ambient)]
    pivots = _rref_rows(rows, len(cols), track)
    if pivots != list(range(len(cols))):
        raise ArithmeticError("quotient basis is not independent")
    return QuotientReport(numerator, denominator, reps, track)


def solve(m: ExactMatrix, b: Sequence) -> list | None:
    """Some exact ``x`` with ``m x = b``, or ``None`` when inconsistent."""
    if len(b) != m.rows:
        raise ValueError("right-hand side has the wrong length")
    rows = [list(r) + [b[i]] for i, r in enumerate(m.entries)]
    pivots = _rref_rows(rows, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [ZERO] * m.cols
    for row, p in zip(rows, pivots):
        x[p] = row[m.cols]
    return x


@dataclass
class GradedSolution:
    """Outcome of :func:`graded_solve`.

    ``solution`` is set when every degree up to the truncation order was
    absorbed.  Otherwise ``failed_order`` is the first degree whose residual
    escaped the image of the constant part, and ``residue`` maps each
    monomial of that degree to its residual vector (zero vectors included
    only for monomials that did fail).
    """

    order: int
    solution: list | None
    failed_order: int | None = None
    residue: dict[tuple[int, ...], list] = field(default_factory=dict)
    achieved: int = 0

    @property
    def ok(self) -> bool:
        return self.solution is not None


def _split_by_monomial(entries: Sequence, ring: ParameterRing) -> dict[tuple[int, ...], list]:
    """Vector of TruncatedPoly -> {monomial: coefficient vector}."""
    out: dict[tuple[int, ...], list] = {}
    size = len(entries)
    for k, e in enumerate(entries):
        if isinstance(e, TruncatedPoly):
            items = e.terms.items()
        else:
            items = [(ring.zero_exponent, e)] if e else []
        for exps, c in items:
            vec = out.get(exps)
            if vec is None:
                vec = out[exps] = [ZERO] * size
            vec[k] = c
    return out


def graded_solve(m: ExactMatrix, b: Sequence, ring: ParameterRing, order: int | None = None) -> GradedSolution:
    """Solve ``m(t) x(t) = b(t)`` degree by degree over a truncated ring.

    At each degree only the constant part ``m0`` absorbs the residual; the
    higher parts of ``m`` feed back through the residual.  Particular
    solutions are chosen by :func:`solve`, so a failure at order >= 2 is an
    obstruction for these particular lower-order choices.
    """
    order = ring.order if order is None else order
    if order > ring.order:
        raise ValueError("requested order exceeds the ring's truncation order")
    # m = sum over monomials of constant matrices
    pieces: dict[tuple[int, ...], ExactMatrix] = {}
    for i, row in enumerate(m.entries):
        for j, e in enumerate(row):
            if isinstance(e, TruncatedPoly):
                if e.ring != ring:
                    raise ValueError("matrix entry from a different ring")
                items = e.terms.items()
            else:
                items = [(ring.zero_exponent, e)] if e else []
            for exps, c in items:
                piece = pieces.get(exps)
                if piece is None:
                    piece = pieces[exps] = ExactMatrix.zeros(m.rows, m.cols)
                piece.entries[i][j] = c
    m0 = pieces.get(ring.zero_exponent, ExactMatrix.zeros(m.rows, m.cols))
    rhs = _split_by_monomial(b, ring)
    x: dict[tuple[int, ...], list] = {}
    achieved = -1
    for degree in range(order + 1):
        failures: dict[tuple[int, ...], list] = {}
        for mono in ring.monomials(degree):
            residual = list(rhs.get(mono, [ZERO] * m.rows))
            for mexps, piece in pieces.items():
                if not any(mexps):
                    continue
                rest = tuple(a - c for a, c in zip(mono, mexps))
                if min(rest) < 0:
                    continue
                xr = x.get(rest)
                if xr is None:
                    continue
                applied = piece.apply(xr)
                residual = [a - c for a, c in zip(residual, applied)]
            if not any(residual):
                continue
            sol = solve(m0, residual)
            if sol is None:
                failures[mono] = residual
            elif any(sol):
                x[mono] = sol
        if failures:
            return GradedSolution(order, None, degree, failures, achieved)
        achieved = degree
    solution = []
    for k in range(m.cols):
        terms = {mono: vec[k] for mono, vec in x.items() if vec[k]}
        solution.append(TruncatedPoly(ring, terms))
    return GradedSolution(order, solution, None, {}, achieved)
