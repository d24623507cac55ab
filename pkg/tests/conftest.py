from __future__ import annotations

import pytest

from hubopt.compiler import MILP, compile_instance
from hubopt.data import load_gls
from hubopt.model import load_rows, make_blocks
from hubopt.scenarios import view_for

START = "2019-01-01T00:00:00"


def stamp(h: int) -> str:
    return f"2019-01-01T{h:02d}:00:00"


def model_rows(hours: int = 3, invest_resolution: str | None = None) -> list[tuple]:
    rows = [("model", "m", "model_start", "Base", "", START),
            ("model", "m", "model_end", "Base", "", stamp(hours))]
    if invest_resolution:
        rows.append(("temporal_block", "investment", "resolution", "Base", "", invest_resolution))
    return rows


def series_rows(cls: str, entity: str, param: str, values) -> list[tuple]:
    return [(cls, entity, param, "Base", stamp(h), str(v)) for h, v in enumerate(values)]


def build(rows, layers=("Base",), mode=MILP, horizon=None, candidate_scale=1.0, allow_mothball=False):
    graph = load_rows(rows)
    view = view_for(graph, list(layers))
    return compile_instance(graph, view, make_blocks(view, horizon), mode, candidate_scale, allow_mothball)


def electrolyzer_rows(prices=(50, 10, 30), capacity=1.0, h2_price=-2160, ratio=53.6) -> list[tuple]:
    """One prebuilt electrolyzer buying grid power at ``prices`` and selling hydrogen."""
    rows = model_rows(len(prices))
    rows += [
        ("node", "Grid", "nodal_balance_sense", "Base", "", "<="),
        ("node", "H2_out", "nodal_balance_sense", "Base", "", ">="),
        ("unit", "Elec", "", "", "", ""),
        ("unit__from_node", "Elec|Grid", "", "", "", ""),
        ("unit__to_node", "Elec|H2_out", "unit_capacity", "Base", "", str(capacity)),
        ("unit__to_node", "Elec|H2_out", "fuel_cost", "Base", "", str(h2_price)),
        ("unit__node__node", "Elec|Grid|H2_out", "fix_ratio_in_out_unit_flow", "Base", "", str(ratio)),
    ]
    rows += series_rows("unit__from_node", "Elec|Grid", "fuel_cost", prices)
    return rows


@pytest.fixture(scope="session")
def gls():
    return load_gls()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
