"""Command-line interface.

    bottchern cohomology iwasawa --kind bc --all
    bottchern tables ii.b
    bottchern obstruct iwasawa --dir t21=1 --bc 2 0 --class "phi[2]^phi[3]"
    bottchern jump iwasawa --dir t21=1 --grid bc,a
    bottchern classify 0 0 1 0
    bottchern spec my.spec

Exit status: 0 on success, 1 for bad input, 2 when an internal invariant
fails or a table comparison does not match.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path

from . import catalog
from .cohomology import ComplexError, group
from .deformation import (
    InvalidKodairaSpencer,
    KodairaSpencerClass,
    RepresentativeInvalid,
    Source,
    jump_scan,
    obstruction_first_order,
    parse_direction,
)
from .exterior import format_form, parse_form
from .linalg import NotContained
from .report import emit, jsonable, make_report, render_human
from .scalars import format_scalar, parse_scalar
from .structure import ManifoldSpec, SpecError, format_spec, read_spec

__all__ = ["main", "resolve_spec", "CliError"]

KIND_NAMES = {
    "dr": "deRham", "derham": "deRham",
    "dbar": "Dolbeault", "dolbeault": "Dolbeault",
    "partial": "antiDolbeault", "antidolbeault": "antiDolbeault",
    "bc": "BC", "a": "A", "aeppli": "A",
}
SHORT = {"deRham": "dR", "Dolbeault": "dbar", "antiDolbeault": "partial", "BC": "BC", "A": "A"}


class CliError(ValueError):
    """Bad command-line input (exit status 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def resolve_spec(name: str) -> ManifoldSpec:
    """Builtin name (``iwasawa``, ``torus3``, ``sigma:ii.b``) or a spec file path."""
    if name == "iwasawa":
        return catalog.iwasawa()
    m = re.fullmatch(r"torus(\d+)", name)
    if m:
        return catalog.torus(int(m.group(1)))
    m = re.fullmatch(r"sigma[:\[]([a-z.]+)\]?", name)
    if m:
        return catalog.sample_spec(m.group(1))
    path = Path(name)
    if not path.exists():
        raise CliError(f"{name!r} is neither a builtin (iwasawa, torus<n>, sigma:<label>) nor a file")
    return read_spec(path)


def _spec_label(spec: ManifoldSpec, fallback: str) -> str:
    return spec.name or fallback


def _kinds(text: str) -> list[str]:
    out = []
    for chunk in text.split(","):
        key = chunk.strip().lower()
        if key not in KIND_NAMES:
            raise CliError(f"unknown cohomology kind {chunk!r}; use dr, dbar, partial, bc or a")
        out.append(KIND_NAMES[key])
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_cohomology(args) -> tuple[dict, int]:
    spec = resolve_spec(args.spec)
    n = spec.n
    groups = {}
    for kind in _kinds(args.kind):
        cells = {}
        if kind == "deRham":
            degrees = [args.degree] if args.degree is not None else range(2 * n + 1)
            for k in degrees:
                cells[str(k)] = group(spec, kind, k).dim
        else:
            if args.bidegree and not args.all:
                pairs = [tuple(args.bidegree)]
            else:
                pairs = [(p, q) for p in range(n + 1) for q in range(n + 1)]
            for p, q in pairs:
                cells[f"{p},{q}"] = group(spec, kind, p, q).dim
        groups[SHORT[kind]] = cells
    return {"spec": _spec_label(spec, args.spec), "groups": groups}, 0


def _table_rows(spec: ManifoldSpec, label: str) -> list[dict]:
    rows = []
    for table in catalog.TABLE_KINDS:
        expected = catalog.expected_dims(label, table)
        if table != "dR":
            expected = {(0, 0): 1, **expected, (3, 3): 1}
        kind = {"dR": "deRham", "dbar": "Dolbeault"}.get(table, table)
        for degree, want in expected.items():
            got = group(spec, kind, *(degree if isinstance(degree, tuple) else (degree,))).dim
            text = ",".join(map(str, degree)) if isinstance(degree, tuple) else str(degree)
            rows.append({
                "table": table, "degree": text, "computed": got, "expected": want,
                "status": "PASS" if got == want else "FAIL",
            })
    return rows


def cmd_tables(args) -> tuple[list | dict, int]:
    labels = ["central", *catalog.LABELS] if args.label == "all" else [args.label]
    out = []
    status = 0
    for label in labels:
        if label != "central" and label not in catalog.LABELS:
            raise CliError(f"unknown class label {label!r}; use central, all or one of {', '.join(catalog.LABELS)}")
        if label == "central":
            spec, point = catalog.iwasawa(), {}
        else:
            spec, point = catalog.sample_spec(label), catalog.SAMPLE_POINTS[label]
        rows = _table_rows(spec, label)
        ok = all(r["status"] == "PASS" for r in rows)
        status = status or (0 if ok else 2)
        out.append({
            "label": label,
            "point": {k: format_scalar(v) for k, v in point.items()},
            "rows": rows,
            "status": "PASS" if ok else "FAIL",
        })
    return (out[0] if len(out) == 1 else out), status


def _source(args) -> Source:
    chosen = [s for s in (args.bc and Source("BC", *args.bc), args.a and Source("A", *args.a),
                          args.bclass and Source("Bclass", *args.bclass)) if s]
    if len(chosen) != 1:
        raise CliError("give exactly one of --bc P Q, --a P Q, --bclass P Q L")
    return chosen[0]


def _obstruction_json(ob) -> dict:
    return {
        "source": str(ob.source),
        "class": format_form(ob.theta),
        "branches": {k: format_form(v) for k, v in ob.branches.items()},
        "coordinates": jsonable(ob.coordinates),
        "target": {"group": ob.target.label(), "dim": ob.target.dim},
        "verdict": "vanishing" if ob.vanishes else "nonvanishing",
    }


def _direction(args, n: int) -> KodairaSpencerClass:
    try:
        return parse_direction(args.dir or "", n)
    except ValueError as exc:
        raise CliError(f"--dir: {exc}") from None


def _select_class(selector: str, source: Source, spec: ManifoldSpec):
    m = re.fullmatch(r"@(\d+)", selector.strip())
    if m:
        reps = source.group(spec).representatives
        k = int(m.group(1))
        if not 1 <= k <= len(reps):
            raise CliError(f"class selector @{k} out of range: {source} has {len(reps)} basis classes")
        return reps[k - 1]
    try:
        return parse_form(selector, spec.n)
    except ValueError as exc:
        raise CliError(f"unknown class selector {selector!r}: {exc}") from None


def cmd_obstruct(args) -> tuple[dict, int]:
    spec = resolve_spec(args.spec)
    kappa = _direction(args, spec.n)
    source = _source(args)
    theta = _select_class(args.cls, source, spec)
    ob = obstruction_first_order(spec, kappa, source, theta)
    return {
        "spec": _spec_label(spec, args.spec),
        "direction": {k: format_scalar(v) for k, v in kappa.entries().items()},
        "obstruction": _obstruction_json(ob),
    }, 0


def cmd_jump(args) -> tuple[dict, int]:
    spec = resolve_spec(args.spec)
    kappa = _direction(args, spec.n)
    kinds = []
    for k in _kinds(args.grid):
        if k not in ("BC", "A"):
            raise CliError("jump grids are bc and a")
        kinds.append(k)
    report = jump_scan(spec, kappa, kinds)
    grids = {}
    for kind in kinds:
        rows = []
        for v in report.verdicts:
            if v.kind != kind:
                continue
            rows.append({
                "bidegree": f"{v.p},{v.q}",
                "jumps": v.jumps,
                "checked": v.checked,
                "central_dim": v.central_dim,
                "sample_dim": v.sample_dim,
                "witness": _obstruction_json(v.witness) if v.witness else None,
            })
        grids[kind] = rows
    flagged = {kind: [f"{p},{q}" for p, q in report.flagged(kind)] for kind in kinds}
    return {
        "spec": _spec_label(spec, args.spec),
        "direction": {k: format_scalar(v) for k, v in kappa.entries().items()},
        "grids": grids,
        "flagged": flagged,
        "corroborated": report.corroborated,
    }, (0 if report.corroborated else 2)


def cmd_classify(args) -> tuple[dict, int]:
    try:
        values = [parse_scalar(x) for x in args.t]
    except ValueError as exc:
        raise CliError(str(exc)) from None
    label = catalog.classify(values)
    return {
        "t": dict(zip(("t11", "t12", "t21", "t22"), map(format_scalar, values))),
        "label": label.label,
        "D": format_scalar(label.D),
        "rank_S": label.rank_S,
    }, 0


def cmd_spec(args) -> tuple[dict, int]:
    spec = resolve_spec(args.spec)
    return {"text": format_spec(spec)}, 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--no-timing", action="store_true", help="omit timing (stable output)")

    parser = _Parser(prog="bottchern", description="Bott-Chern, Aeppli, Dolbeault and de Rham cohomology of invariant complex structures")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cohomology", parents=[common], help="dimension grids")
    p.add_argument("spec", nargs="?", help="builtin name or spec file")
    p.add_argument("--builtin", dest="builtin")
    p.add_argument("--spec", dest="spec_file")
    p.add_argument("--kind", default="dr,dbar,bc,a", help="comma list of dr, dbar, partial, bc, a")
    p.add_argument("--all", action="store_true", help="every bidegree (default)")
    p.add_argument("--bidegree", nargs=2, type=int, metavar=("P", "Q"))
    p.add_argument("--degree", type=int, help="single de Rham degree")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("tables", parents=[common], help="compare with the published tables")
    p.add_argument("label", help="central, all, i, ii.a, ii.b, iii.a or iii.b")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("obstruct", parents=[common], help="first-order obstruction of one class")
    p.add_argument("spec")
    p.add_argument("--dir", required=True, help="direction, e.g. t21=1,t22=i")
    p.add_argument("--bc", nargs=2, type=int, metavar=("P", "Q"))
    p.add_argument("--a", nargs=2, type=int, metavar=("P", "Q"))
    p.add_argument("--bclass", nargs=3, type=int, metavar=("P", "Q", "L"))
    p.add_argument("--class", dest="cls", required=True, help="form literal or @k for the k-th basis class")
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("jump", parents=[common], help="jump scan along a direction")
    p.add_argument("spec")
    p.add_argument("--dir", required=True)
    p.add_argument("--grid", default="bc,a")
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("classify", parents=[common], help="subclass of (t11, t12, t21, t22)")
    p.add_argument("t", nargs=4, metavar="T")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("spec", parents=[common], help="validate a spec and print it canonically")
    p.add_argument("spec")
    p.set_defaults(func=cmd_spec)
    return parser


def _normalize(args) -> None:
    if args.command != "cohomology":
        return
    given = [x for x in (args.spec, args.builtin, args.spec_file) if x]
    if len(given) != 1:
        raise CliError("name exactly one spec: positional, --builtin or --spec")
    args.spec = given[0]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        _normalize(args)
        results, status = args.func(args)
    except (NotContained, ComplexError, ArithmeticError) as exc:
        print(f"bottchern: internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except (CliError, SpecError, RepresentativeInvalid, InvalidKodairaSpencer, ValueError, TypeError, OSError) as exc:
        print(f"bottchern: error: {exc}", file=sys.stderr)
        return 1
    seconds = None if args.no_timing else time.perf_counter() - start
    report = make_report(args.command, argv, results, seconds)
    text = emit(report) if args.format == "machine" else render_human(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
