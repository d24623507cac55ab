"""The compiled program: variables, linear constraints and a minimised objective."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from hubopt.model.values import Sense

CONTINUOUS = "continuous"
INTEGER = "integer"
BINARY = "binary"
DOMAINS = (CONTINUOUS, INTEGER, BINARY)

VARIABLE_KINDS = (
    "unit_flow", "units_on", "units_available", "units_started", "units_shut_down",
    "units_invested", "units_invested_available", "units_mothballed",
    "node_state", "storages_invested_available", "node_slack",
)
PERIOD_KINDS = frozenset({"units_invested", "units_invested_available", "units_mothballed",
                          "storages_invested_available"})


@dataclass(frozen=True, order=True)
class VariableRef:
    """``entity`` holds one or two names; ``index`` is the hour, or the period for investment kinds."""

    kind: str
    entity: tuple[str, ...]
    index: int

    @property
    def name(self) -> str:
        stamp = f"t{self.index:02d}" if self.kind in PERIOD_KINDS else f"h{self.index:04d}"
        return ".".join((self.kind, *self.entity, stamp))

    def __str__(self) -> str:
        return self.name


def parse_variable_name(name: str) -> VariableRef:
    """Inverse of :attr:`VariableRef.name`."""
    parts = name.split(".")
    if len(parts) < 3 or parts[0] not in VARIABLE_KINDS:
        raise ValueError(f"not a variable name: {name!r}")
    stamp = parts[-1]
    if stamp[:1] not in ("h", "t") or not stamp[1:].isdigit():
        raise ValueError(f"bad time stamp in variable name {name!r}")
    return VariableRef(parts[0], tuple(parts[1:-1]), int(stamp[1:]))


@dataclass(frozen=True)
class Variable:
    ref: VariableRef
    domain: str = CONTINUOUS
    lb: float = 0.0
    ub: float = math.inf

    @property
    def is_integer(self) -> bool:
        return self.domain != CONTINUOUS


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[VariableRef, float], ...]
    sense: str
    rhs: float
    tag: str

    def __post_init__(self):
        if not self.terms:
            raise ValueError(f"constraint {self.tag} has no terms")
        if self.sense not in (Sense.LE, Sense.GE, Sense.EQ):
            raise ValueError(f"constraint {self.tag}: bad sense {self.sense!r}")
        if not all(math.isfinite(c) for _, c in self.terms) or not math.isfinite(self.rhs):
            raise ValueError(f"constraint {self.tag} has a non-finite coefficient")

    def activity(self, values: Mapping[VariableRef, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.terms)

    def violation(self, values: Mapping[VariableRef, float]) -> float:
        lhs = self.activity(values)
        if self.sense == Sense.LE:
            return max(0.0, lhs - self.rhs)
        if self.sense == Sense.GE:
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class MILPInstance:
    variables: list[Variable] = field(default_factory=list)
    constraints: list[LinearConstraint] = field(default_factory=list)
    objective: dict[VariableRef, float] = field(default_factory=dict)
    objective_constant: float = 0.0
    metadata: dict = field(default_factory=dict)
    _index: dict[VariableRef, int] = field(default_factory=dict, repr=False)

    def add_variable(self, ref: VariableRef, domain: str = CONTINUOUS, lb: float = 0.0,
                     ub: float = math.inf) -> VariableRef:
        if ref in self._index:
            raise ValueError(f"variable {ref.name} declared twice")
        if domain not in DOMAINS:
            raise ValueError(f"unknown domain {domain!r}")
        if domain == BINARY:
            ub = min(ub, 1.0)
        self._index[ref] = len(self.variables)
        self.variables.append(Variable(ref, domain, lb, ub))
        return ref

    def add_constraint(self, terms: Iterable[tuple[VariableRef, float]], sense: str, rhs: float,
                       tag: str) -> LinearConstraint | None:
        merged: dict[VariableRef, float] = {}
        for v, c in terms:
            if v not in self._index:
                raise KeyError(f"constraint {tag} references undeclared variable {v.name}")
            merged[v] = merged.get(v, 0.0) + float(c)
        items = tuple((v, c) for v, c in merged.items() if c != 0.0)
        if not items:
            return None
        con = LinearConstraint(items, sense, float(rhs), tag)
        self.constraints.append(con)
        return con

    def add_cost(self, ref: VariableRef, cost: float) -> None:
        if ref not in self._index:
            raise KeyError(f"objective references undeclared variable {ref.name}")
        if cost:
            self.objective[ref] = self.objective.get(ref, 0.0) + float(cost)

    # -- queries -------------------------------------------------------------
    def __contains__(self, ref: VariableRef) -> bool:
        return ref in self._index

    def index_of(self, ref: VariableRef) -> int:
        return self._index[ref]

    def variable(self, ref: VariableRef) -> Variable:
        return self.variables[self._index[ref]]

    def refs(self, kind: str | None = None) -> list[VariableRef]:
        return [v.ref for v in self.variables if kind is None or v.ref.kind == kind]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_integer(self) -> int:
        return sum(v.is_integer for v in self.variables)

    def by_name(self) -> dict[str, VariableRef]:
        return {v.ref.name: v.ref for v in self.variables}

    def evaluate(self, values: Mapping[VariableRef, float]) -> float:
        return self.objective_constant + sum(c * values.get(v, 0.0) for v, c in self.objective.items())

    def relaxed(self) -> "MILPInstance":
        """Copy with every integer or binary domain made continuous (bounds kept)."""
        out = MILPInstance(
            [replace(v, domain=CONTINUOUS) for v in self.variables],
            list(self.constraints), dict(self.objective), self.objective_constant,
            dict(self.metadata), dict(self._index),
        )
        return out

    def arrays(self) -> "MatrixForm":
        return MatrixForm.from_instance(self)


@dataclass
class MatrixForm:
    """Row-wise matrix view: ``row_lo <= A x <= row_hi``, ``lb <= x <= ub``, minimise ``c x + c0``."""

    A: sparse.csr_matrix
    row_lo: np.ndarray
    row_hi: np.ndarray
    c: np.ndarray
    c0: float
    lb: np.ndarray
    ub: np.ndarray
    integer: np.ndarray

    @classmethod
    def from_instance(cls, inst: MILPInstance) -> "MatrixForm":
        n, m = inst.n_vars, len(inst.constraints)
        rows, cols, vals = [], [], []
        lo = np.empty(m)
        hi = np.empty(m)
        idx = inst._index
        for i, con in enumerate(inst.constraints):
            for v, c in con.terms:
                rows.append(i)
                cols.append(idx[v])
                vals.append(c)
            lo[i] = -np.inf if con.sense == Sense.LE else con.rhs
            hi[i] = np.inf if con.sense == Sense.GE else con.rhs
        A = sparse.csr_matrix((vals, (rows, cols)), shape=(m, n))
        c = np.zeros(n)
        for v, coef in inst.objective.items():
            c[idx[v]] = coef
        lb = np.array([v.lb for v in inst.variables], dtype=float)
        ub = np.array([v.ub for v in inst.variables], dtype=float)
        integer = np.array([v.is_integer for v in inst.variables], dtype=bool)
        return cls(A, lo, hi, c, inst.objective_constant, lb, ub, integer)
