"""Versioned JSON reports and their human-readable rendering."""

from __future__ import annotations

import json
from typing import Any

__all__ = ["FORMAT_VERSION", "ReportError", "make_report", "emit", "parse", "render_human"]

FORMAT_VERSION = 1


class ReportError(ValueError):
    pass


def make_report(command: str, invocation: list[str], results: dict, seconds: float | None = None) -> dict:
    report = {"version": FORMAT_VERSION, "command": command, "invocation": list(invocation), "results": results}
    if seconds is not None:
        report["timing"] = {"seconds": round(seconds, 3)}
    return report


def emit(report: dict) -> str:
    """Canonical machine-readable text; ``emit(parse(emit(r))) == emit(r)``."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse(text: str) -> dict:
    try:
        report = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"not a report: {exc}") from None
    if not isinstance(report, dict) or "version" not in report:
        raise ReportError("not a report: missing version")
    if report["version"] != FORMAT_VERSION:
        raise ReportError(f"unsupported report version {report['version']}")
    for key in ("command", "invocation", "results"):
        if key not in report:
            raise ReportError(f"report lacks {key!r}")
    return report


# ---------------------------------------------------------------------------
# human output


def _grid(title: str, cells: dict[str, int]) -> list[str]:
    if all("," in k for k in cells):
        pairs = [tuple(int(x) for x in k.split(",")) for k in cells]
        ps = sorted({p for p, _ in pairs})
        qs = sorted({q for _, q in pairs})
        lines = [title, "  p\\q " + " ".join(f"{q:>4}" for q in qs)]
        for p in ps:
            row = " ".join(f"{cells.get(f'{p},{q}', ''):>4}" for q in qs)
            lines.append(f"  {p:>3} " + row)
        return lines
    return [title, "  " + ", ".join(f"{k}: {v}" for k, v in cells.items())]


def _human_cohomology(res: dict) -> list[str]:
    lines = [f"spec: {res['spec']}"]
    for kind, cells in res["groups"].items():
        lines += _grid(f"{kind} dimensions", cells)
    return lines


def _human_tables(res: dict) -> list[str]:
    lines = [f"class {res['label']} at {_direction_text(res['point']) if res['point'] else 'origin'}"]
    lines.append(f"  {'table':<6}{'degree':<8}{'computed':>9}{'expected':>9}  status")
    for row in res["rows"]:
        lines.append(
            f"  {row['table']:<6}{row['degree']:<8}{row['computed']:>9}{row['expected']:>9}  {row['status']}"
        )
    lines.append(f"overall: {res['status']}")
    return lines


def _human_obstruction(ob: dict, indent: str = "  ") -> list[str]:
    lines = [f"{indent}source {ob['source']}, class {ob['class']}"]
    for label, form in ob["branches"].items():
        lines.append(f"{indent}  {label}: {form}")
    lines.append(f"{indent}  target {ob['target']['group']} (dim {ob['target']['dim']}): {ob['verdict']}")
    return lines


def _human_obstruct(res: dict) -> list[str]:
    lines = [f"spec: {res['spec']}", f"direction: {_direction_text(res['direction'])}"]
    return lines + _human_obstruction(res["obstruction"], "")


def _direction_text(d: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in d.items()) or "0"


def _human_jump(res: dict) -> list[str]:
    lines = [f"spec: {res['spec']}", f"direction: {_direction_text(res['direction'])}"]
    for kind, rows in res["grids"].items():
        flagged = res["flagged"][kind]
        lines.append(f"{kind}: jumps at {', '.join('(' + f + ')' for f in flagged) or 'none'}")
        for row in rows:
            if row["jumps"]:
                drop = row["sample_dim"]
                lines.append(f"  ({row['bidegree']}) dim {row['central_dim']} -> {drop if drop is not None else '?'}")
                lines += _human_obstruction(row["witness"], "    ")
    return lines


def _human_classify(res: dict) -> list[str]:
    return [f"class {res['label']}  (D = {res['D']}, rank S = {res['rank_S']})"]


def _human_spec(res: dict) -> list[str]:
    return [res["text"].rstrip("\n")]


_RENDER = {
    "cohomology": _human_cohomology,
    "tables": _human_tables,
    "obstruct": _human_obstruct,
    "jump": _human_jump,
    "classify": _human_classify,
    "spec": _human_spec,
}


def render_human(report: dict) -> str:
    res = report["results"]
    render = _RENDER.get(report["command"])
    if render is None:
        lines = [json.dumps(res, sort_keys=True)]
    elif isinstance(res, list):
        lines = [line for item in res for line in render(item) + [""]]
        lines = lines[:-1]
    else:
        lines = render(res)
    if "timing" in report:
        lines.append(f"({report['timing']['seconds']:.3f}s)")
    return "\n".join(lines) + "\n"


def jsonable(value: Any) -> Any:
    """Recursively stringify exact scalars and forms."""
    from .exterior import BigradedForm, format_form
    from .scalars import GaussianRational, TruncatedPoly, format_poly, format_scalar

    if isinstance(value, GaussianRational):
        return format_scalar(value)
    if isinstance(value, TruncatedPoly):
        return format_poly(value)
    if isinstance(value, BigradedForm):
        return format_form(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value
