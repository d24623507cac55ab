"""Plain-text solution files: one ``name value`` pair per line, ``#`` starts a comment.

An optional header ``# status <Status>`` and ``# objective <value>`` is written
by :func:`write_solution` and honoured when reading.
"""

from __future__ import annotations

import math
from pathlib import Path

from hubopt.compiler.instance import MILPInstance, parse_variable_name
from hubopt.errors import IoFailure, MalformedLine, UnknownVariable
from hubopt.solver.core import Solution, Status
from hubopt.solver.mps import fmt_number, read_tags


def write_solution(solution: Solution, path: str | Path, instance: MILPInstance | None = None) -> Path:
    path = Path(path)
    refs = [v.ref for v in instance.variables] if instance is not None else sorted(solution.values)
    lines = [f"# status {solution.status.value}"]
    if math.isfinite(solution.objective):
        lines.append(f"# objective {fmt_number(solution.objective)}")
    lines += [f"{r.name} {fmt_number(solution.values[r])}" for r in refs if r in solution.values]
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None
    return path


def read_solution(path: str | Path, instance: MILPInstance | None = None,
                  tags: str | Path | dict[str, str] | None = None) -> Solution:
    """Map names (directly or through a ``.tags`` sidecar) to variables of ``instance``."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    if tags is not None and not isinstance(tags, dict):
        tags = read_tags(tags)
    tags = tags or {}
    known = instance.by_name() if instance is not None else None

    status = Status.GAP_LIMIT
    objective = math.nan
    values = {}
    for k, raw in enumerate(text.splitlines(), 1):
        body, _, comment = raw.partition("#")
        head = comment.split()
        if len(head) == 2 and head[0].lower() == "status" and not body.strip():
            try:
                status = Status(head[1])
            except ValueError:
                raise MalformedLine(f"{path}:{k}: unknown status {head[1]!r}") from None
        elif len(head) == 2 and head[0].lower() == "objective" and not body.strip():
            objective = _number(head[1], path, k)
        tok = body.split()
        if not tok:
            continue
        if len(tok) != 2:
            raise MalformedLine(f"{path}:{k}: expected 'name value', got {body.strip()!r}")
        name = tags.get(tok[0], tok[0])
        if known is not None:
            ref = known.get(name)
            if ref is None:
                raise UnknownVariable(f"{path}:{k}: {tok[0]!r} is not a variable of the instance")
        else:
            try:
                ref = parse_variable_name(name)
            except ValueError:
                raise UnknownVariable(f"{path}:{k}: {tok[0]!r} is not a variable name") from None
        if ref in values:
            raise MalformedLine(f"{path}:{k}: duplicate value for {name}")
        values[ref] = _number(tok[1], path, k)
    if instance is not None and values:
        # solvers commonly omit zero-valued columns
        values = {v.ref: values.get(v.ref, 0.0) for v in instance.variables}
        objective = instance.evaluate(values)
    return Solution(status, values, objective)


def _number(tok: str, path, k: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MalformedLine(f"{path}:{k}: bad number {tok!r}") from None
    if not math.isfinite(v):
        raise MalformedLine(f"{path}:{k}: non-finite value {tok!r}")
    return v
