"""Fixed-format MPS writer and reader.

Rows are named ``R0000001``..., columns ``C0000001``..., the objective row is
``COST``. A sidecar ``.tags`` file maps the short names back to constraint tags
and variable names. Numbers are written at full precision, so a field may run
past its nominal twelve characters; every line carries a single entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from hubopt.compiler.instance import (
    BINARY, CONTINUOUS, INTEGER, MatrixForm, MILPInstance, parse_variable_name,
)
from hubopt.errors import IoFailure, MalformedLine
from hubopt.model.values import Sense

OBJ_ROW = "COST"
_SENSE_CODE = {Sense.LE: "L", Sense.GE: "G", Sense.EQ: "E"}
_CODE_SENSE = {v: k for k, v in _SENSE_CODE.items()}


def row_name(i: int) -> str:
    return f"R{i + 1:07d}"


def col_name(j: int) -> str:
    return f"C{j + 1:07d}"


def tags_path(mps_path: str | Path) -> Path:
    return Path(mps_path).with_suffix(".tags")


def fmt_number(v: float) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _line(code: str, a: str, b: str = "", num: str = "") -> str:
    # fields start at columns 2, 5, 15 and 25
    out = f" {code:<2} {a:<8}"
    if b:
        out += f"  {b:<8}"
    if num:
        out += f"  {num}"
    return out.rstrip()


def write_mps(instance: MILPInstance, path: str | Path, name: str = "HUBOPT", tags: bool = True) -> Path:
    path = Path(path)
    lines = [f"NAME          {name}", "ROWS", f" N  {OBJ_ROW}"]
    for i, con in enumerate(instance.constraints):
        lines.append(f" {_SENSE_CODE[con.sense]}  {row_name(i)}")

    by_col: list[list[tuple[int, float]]] = [[] for _ in instance.variables]
    for i, con in enumerate(instance.constraints):
        for ref, coef in con.terms:
            by_col[instance.index_of(ref)].append((i, coef))

    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for j, var in enumerate(instance.variables):
        if var.is_integer != in_int:
            tag = "'INTORG'" if var.is_integer else "'INTEND'"
            lines.append(f"    MARKER{marker:<4}'MARKER'                 {tag}")
            marker += 1
            in_int = var.is_integer
        c = col_name(j)
        cost = instance.objective.get(var.ref, 0.0)
        entries = sorted(by_col[j])
        if cost != 0.0 or not entries:
            lines.append(_line("", c, OBJ_ROW, fmt_number(cost)))
        for i, coef in entries:
            lines.append(_line("", c, row_name(i), fmt_number(coef)))
    if in_int:
        lines.append(f"    MARKER{marker:<4}'MARKER'                 'INTEND'")

    lines.append("RHS")
    if instance.objective_constant:
        lines.append(_line("", "RHS", OBJ_ROW, fmt_number(-instance.objective_constant)))
    for i, con in enumerate(instance.constraints):
        if con.rhs != 0.0:
            lines.append(_line("", "RHS", row_name(i), fmt_number(con.rhs)))
    lines.append("RANGES")
    lines.append("BOUNDS")
    for j, var in enumerate(instance.variables):
        c = col_name(j)
        lb, ub = var.lb, var.ub
        if var.domain == BINARY and lb == 0.0 and ub == 1.0:
            lines.append(_line("BV", "BND", c))
            continue
        if lb == ub:
            lines.append(_line("FX", "BND", c, fmt_number(lb)))
            continue
        if lb == -math.inf:
            lines.append(_line("MI", "BND", c))
        elif lb != 0.0 or var.is_integer:
            lines.append(_line("LO", "BND", c, fmt_number(lb)))
        if ub != math.inf:
            lines.append(_line("UP", "BND", c, fmt_number(ub)))
        elif var.is_integer:
            lines.append(_line("PL", "BND", c))
    lines.append("ENDATA")
    try:
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
        if tags:
            write_tags(instance, tags_path(path))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None
    return path


def write_tags(instance: MILPInstance, path: str | Path) -> None:
    lines = [f"{row_name(i)}\t{con.tag}" for i, con in enumerate(instance.constraints)]
    lines += [f"{col_name(j)}\t{var.ref.name}" for j, var in enumerate(instance.variables)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_tags(path: str | Path) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    for k, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        short, sep, long = line.partition("\t")
        if not sep:
            raise MalformedLine(f"{path}:{k}: expected 'short<TAB>name'")
        out[short] = long
    return out


@dataclass
class MPSModel:
    name: str = ""
    rows: list[str] = field(default_factory=list)
    senses: list[str] = field(default_factory=list)
    cols: list[str] = field(default_factory=list)
    coefs: dict[tuple[int, int], float] = field(default_factory=dict)
    cost: dict[int, float] = field(default_factory=dict)
    rhs: dict[int, float] = field(default_factory=dict)
    ranges: dict[int, float] = field(default_factory=dict)
    lb: dict[int, float] = field(default_factory=dict)
    ub: dict[int, float] = field(default_factory=dict)
    integer: set[int] = field(default_factory=set)
    binary: set[int] = field(default_factory=set)
    obj_constant: float = 0.0

    def matrix(self) -> sparse.csr_matrix:
        if not self.coefs:
            return sparse.csr_matrix((len(self.rows), len(self.cols)))
        (ri, ci), vals = zip(*self.coefs.keys()), list(self.coefs.values())
        return sparse.csr_matrix((vals, (ri, ci)), shape=(len(self.rows), len(self.cols)))

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        n = len(self.cols)
        lb = np.array([self.lb.get(j, 0.0) for j in range(n)], dtype=float)
        ub = np.array([self.ub.get(j, math.inf) for j in range(n)], dtype=float)
        return lb, ub

    def form(self) -> MatrixForm:
        m = len(self.rows)
        lo, hi = np.empty(m), np.empty(m)
        for i, s in enumerate(self.senses):
            b = self.rhs.get(i, 0.0)
            r = self.ranges.get(i)
            if s == Sense.LE:
                lo[i], hi[i] = (-math.inf if r is None else b - abs(r)), b
            elif s == Sense.GE:
                lo[i], hi[i] = b, (math.inf if r is None else b + abs(r))
            elif r is None:
                lo[i] = hi[i] = b
            else:
                lo[i], hi[i] = (b, b + r) if r > 0 else (b + r, b)
        lb, ub = self.bounds()
        c = np.array([self.cost.get(j, 0.0) for j in range(len(self.cols))], dtype=float)
        integer = np.array([j in self.integer for j in range(len(self.cols))], dtype=bool)
        return MatrixForm(self.matrix().tocsr(), lo, hi, c, self.obj_constant, lb, ub, integer)

    def to_instance(self, tags: dict[str, str] | None = None) -> MILPInstance:
        """Rebuild a MILPInstance; names come from ``tags`` when given (ranged rows unsupported)."""
        if self.ranges:
            raise IoFailure("ranged rows cannot be mapped onto single-sense constraints")
        tags = tags or {}
        inst = MILPInstance()
        refs = []
        lb, ub = self.bounds()
        for j, c in enumerate(self.cols):
            ref = parse_variable_name(tags.get(c, c))
            dom = BINARY if j in self.binary else INTEGER if j in self.integer else CONTINUOUS
            refs.append(inst.add_variable(ref, dom, lb[j], ub[j]))
        rows: list[list[tuple]] = [[] for _ in self.rows]
        for (i, j), v in sorted(self.coefs.items()):
            rows[i].append((refs[j], v))
        for i, r in enumerate(self.rows):
            inst.add_constraint(rows[i], self.senses[i], self.rhs.get(i, 0.0), tags.get(r, r))
        for j, v in sorted(self.cost.items()):
            inst.add_cost(refs[j], v)
        inst.objective_constant = self.obj_constant
        return inst


def read_mps(path: str | Path) -> MPSModel:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    model = MPSModel()
    row_idx: dict[str, int] = {}
    col_idx: dict[str, int] = {}
    obj_row = None
    section = None
    in_int = False

    def col(name: str) -> int:
        if name not in col_idx:
            col_idx[name] = len(model.cols)
            model.cols.append(name)
        return col_idx[name]

    def num(tok: str, k: int) -> float:
        try:
            return float(tok)
        except ValueError:
            raise MalformedLine(f"{path}:{k}: bad number {tok!r}") from None

    for k, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            section = head[0].upper()
            if section == "NAME":
                model.name = head[1] if len(head) > 1 else ""
            elif section == "ENDATA":
                break
            elif section not in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "OBJSENSE"):
                raise MalformedLine(f"{path}:{k}: unknown section {section!r}")
            continue
        tok = raw.split()
        if section == "ROWS":
            code, name = tok[0].upper(), tok[1]
            if code == "N":
                if obj_row is None:
                    obj_row = name
                continue
            if code not in _CODE_SENSE:
                raise MalformedLine(f"{path}:{k}: bad row type {code!r}")
            row_idx[name] = len(model.rows)
            model.rows.append(name)
            model.senses.append(_CODE_SENSE[code])
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1].strip("'").upper() == "MARKER":
                in_int = tok[2].strip("'").upper() == "INTORG"
                continue
            j = col(tok[0])
            if in_int:
                model.integer.add(j)
            for r, v in zip(tok[1::2], tok[2::2]):
                if r == obj_row:
                    model.cost[j] = num(v, k)
                elif r in row_idx:
                    model.coefs[(row_idx[r], j)] = num(v, k)
                else:
                    raise MalformedLine(f"{path}:{k}: unknown row {r!r}")
        elif section in ("RHS", "RANGES"):
            pairs = tok[1:] if len(tok) % 2 == 1 else tok
            for r, v in zip(pairs[0::2], pairs[1::2]):
                if r == obj_row and section == "RHS":
                    model.obj_constant = -num(v, k)
                elif r in row_idx:
                    (model.rhs if section == "RHS" else model.ranges)[row_idx[r]] = num(v, k)
                else:
                    raise MalformedLine(f"{path}:{k}: unknown row {r!r}")
        elif section == "BOUNDS":
            code = tok[0].upper()
            if len(tok) < 3:
                raise MalformedLine(f"{path}:{k}: short bound line")
            j = col(tok[2])
            v = num(tok[3], k) if len(tok) > 3 else None
            if code in ("UP", "UI"):
                model.ub[j] = v
                if code == "UI":
                    model.integer.add(j)
            elif code in ("LO", "LI"):
                model.lb[j] = v
                if code == "LI":
                    model.integer.add(j)
            elif code == "FX":
                model.lb[j] = model.ub[j] = v
            elif code == "FR":
                model.lb[j], model.ub[j] = -math.inf, math.inf
            elif code == "MI":
                model.lb[j] = -math.inf
            elif code == "PL":
                model.ub[j] = math.inf
            elif code == "BV":
                model.lb[j], model.ub[j] = 0.0, 1.0
                model.integer.add(j)
                model.binary.add(j)
            else:
                raise MalformedLine(f"{path}:{k}: bad bound type {code!r}")
        elif section == "OBJSENSE":
            if tok[0].upper() not in ("MIN", "MINIMIZE"):
                raise MalformedLine(f"{path}:{k}: only minimisation is supported")
        else:
            raise MalformedLine(f"{path}:{k}: data outside a section")
    if section != "ENDATA":
        raise MalformedLine(f"{path}: missing ENDATA")
    return model
