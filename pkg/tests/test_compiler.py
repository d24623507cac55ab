import itertools
import math
from datetime import datetime, timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubopt.compiler import (
    BINARY, CONTINUOUS, INTEGER, LP, MILP, VariableRef, compile_instance, compile_scenario, parse_variable_name,
)
from hubopt.errors import CompileError, MissingCapacity, UnknownMember, UnpinnedState
from hubopt.model import EntityGraph, Sense
from hubopt.model.temporal import Blocks, TemporalBlock
from hubopt.scenarios import EffectiveView, builtin_scenarios
from hubopt.solver import SolverConfig, Status, solve, solve_milp

from conftest import build, electrolyzer_rows, model_rows, series_rows


def ref(kind, *entity, i=0):
    return VariableRef(kind, tuple(entity), i)


def tagged(inst, prefix):
    return [c for c in inst.constraints if c.tag.startswith(prefix)]


def coefficients(con):
    return {r.name: a for r, a in con.terms}


# --- fixtures --------------------------------------------------------------------------------------------

def pv_rows(candidates="1000", hours=3, factor=None, invest_resolution=None, number=None):
    rows = model_rows(hours, invest_resolution)
    rows += [
        ("node", "El", "nodal_balance_sense", "Base", "", ">="),
        ("unit", "PV", "candidate_units", "Base", "", candidates),
        ("unit", "PV", "unit_investment_cost", "Base", "", "41259"),
        ("unit", "PV", "unit_investment_variable_type", "Base", "", "unit_investment_variable_type_continuous"),
        ("unit__to_node", "PV|El", "unit_capacity", "Base", "", "1"),
        ("unit__to_node", "PV|El", "fuel_cost", "Base", "", "-100"),
    ]
    if number is not None:
        rows.append(("unit", "PV", "number_of_units", "Base", "", str(number)))
    if factor is not None:
        rows += series_rows("unit", "PV", "unit_availability_factor", factor)
    return rows


def stack_rows(min_down="2h", hours=4, fixed=None):
    """One stack with integer online status; ``fixed`` pins units_on hour by hour."""
    rows = model_rows(hours)
    rows += [
        ("node", "El", "nodal_balance_sense", "Base", "", "<="),
        ("node", "H2", "nodal_balance_sense", "Base", "", ">="),
        ("unit", "Stack", "online_variable_type", "Base", "", "unit_online_variable_type_integer"),
        ("unit__from_node", "Stack|El", "unit_capacity", "Base", "", "1"),
        ("unit__to_node", "Stack|H2", "fuel_cost", "Base", "", "-1"),
        ("unit__node__node", "Stack|El|H2", "fix_ratio_in_out_unit_flow", "Base", "", "1"),
    ]
    if min_down:
        rows.append(("unit", "Stack", "min_down_time", "Base", "", min_down))
    if fixed is not None:
        rows += series_rows("unit", "Stack", "fix_units_on", fixed)
    return rows


def ratio_rows(price=-2160, hours=2):
    """Electrolyzer fed from a two-node electricity group, with water, heat and oxygen side flows."""
    rows = model_rows(hours)
    rows += [
        ("group__node", "G_El|El_a", "", "", "", ""),
        ("group__node", "G_El|El_b", "", "", "", ""),
        ("node", "El_a", "nodal_balance_sense", "Base", "", "<="),
        ("node", "El_b", "nodal_balance_sense", "Base", "", "<="),
        ("node", "H2O_in", "nodal_balance_sense", "Base", "", "<="),
        ("node", "H2", "nodal_balance_sense", "Base", "", ">="),
        ("node", "Heat_out", "nodal_balance_sense", "Base", "", ">="),
        ("node", "O_out", "nodal_balance_sense", "Base", "", ">="),
        ("unit", "E", "", "", "", ""),
        ("unit__from_node", "E|El_a", "fuel_cost", "Base", "", "30"),
        ("unit__from_node", "E|El_b", "fuel_cost", "Base", "", "20"),
        ("unit__from_node", "E|H2O_in", "fuel_cost", "Base", "", "10"),
        ("unit__from_node", "E|G_El", "", "", "", ""),
        ("unit__to_node", "E|H2", "unit_capacity", "Base", "", "1"),
        ("unit__to_node", "E|H2", "fuel_cost", "Base", "", str(price)),
        ("unit__to_node", "E|Heat_out", "", "", "", ""),
        ("unit__to_node", "E|O_out", "", "", "", ""),
        ("unit__node__node", "E|G_El|H2", "fix_ratio_in_out_unit_flow", "Base", "", "53.6"),
        ("unit__node__node", "E|H2O_in|H2", "fix_ratio_in_out_unit_flow", "Base", "", "9.9999"),
        ("unit__node__node", "E|H2|Heat_out", "fix_ratio_out_out_unit_flow", "Base", "", "9.763"),
        ("unit__node__node", "E|H2|O_out", "fix_ratio_out_out_unit_flow", "Base", "", "4.965"),
    ]
    return rows


def storage_rows(loss="0", pin="5", cyclic=None, hours=4):
    rows = model_rows(hours)
    rows += [
        ("node", "S", "has_state", "Base", "", "true"),
        ("node", "S", "frac_state_loss", "Base", "", loss),
        ("node", "S", "node_state_cap", "Base", "", "10"),
        ("node", "Src", "nodal_balance_sense", "Base", "", "<="),
        ("node", "Snk", "nodal_balance_sense", "Base", "", ">="),
        ("unit", "Chg", "", "", "", ""),
        ("unit", "Dis", "", "", "", ""),
        ("unit__from_node", "Chg|Src", "", "", "", ""),
        ("unit__to_node", "Chg|S", "unit_capacity", "Base", "", "2"),
        ("unit__from_node", "Dis|S", "", "", "", ""),
        ("unit__to_node", "Dis|Snk", "unit_capacity", "Base", "", "2"),
        ("unit__node__node", "Chg|Src|S", "fix_ratio_in_out_unit_flow", "Base", "", "1"),
        ("unit__node__node", "Dis|S|Snk", "fix_ratio_in_out_unit_flow", "Base", "", "1"),
    ]
    rows += series_rows("unit__from_node", "Chg|Src", "fuel_cost", [1, 5, 1, 5][:hours])
    rows += series_rows("unit__to_node", "Dis|Snk", "fuel_cost", [-2, -2, -2, -4][:hours])
    if pin is not None:
        rows.append(("node", "S", "fix_node_state", "Base", "2018-12-31T23:00:00", pin))
    if cyclic is not None:
        rows.append(("node", "S", "cyclic_condition", "Base", "", cyclic))
    return rows


# --- variables -------------------------------------------------------------------------------------------

def test_h2_syn_variables_over_three_hours(gls):
    inst = compile_scenario(gls, "S0", "3h")
    avail = inst.variable(ref("units_invested_available", "H2_syn"))
    assert avail.domain == INTEGER
    assert len([r for r in inst.refs("units_invested_available") if r.entity == ("H2_syn",)]) == 1
    ons = [inst.variable(r) for r in inst.refs("units_on") if r.entity == ("H2_syn",)]
    assert len(ons) == 3 and all(v.domain == INTEGER for v in ons)
    for r in inst.refs("unit_flow"):
        if "H2_syn" in r.entity:
            assert len([q for q in inst.refs("unit_flow") if q.entity == r.entity]) == 3


def test_unit_without_candidates_gets_no_investment_variables():
    inst = build(_no_candidate_rows())
    assert not inst.refs("units_invested")
    sol = solve(inst)
    assert all(sol.values[r] == 0 for r in inst.refs("units_available"))


def _no_candidate_rows():
    return [r for r in pv_rows(number=0) if r[2] not in ("candidate_units", "unit_investment_variable_type")]


def test_bess_storage_investment_is_continuous(gls):
    inst = compile_scenario(gls, "S0", "3h")
    assert inst.variable(ref("storages_invested_available", "BESS")).domain == CONTINUOUS


def test_candidates_without_capacity_is_a_compile_error():
    rows = [r for r in pv_rows() if r[2] != "unit_capacity"]
    with pytest.raises(CompileError) as exc:
        build(rows)
    assert any(isinstance(e, MissingCapacity) for e in exc.value.errors)


def test_variable_names_round_trip():
    r = VariableRef("unit_flow", ("H2_syn", "H2"), 17)
    assert r.name == "unit_flow.H2_syn.H2.h0017"
    assert parse_variable_name(r.name) == r
    t = VariableRef("units_invested_available", ("PV",), 0)
    assert parse_variable_name(t.name) == t


# --- investment rows -------------------------------------------------------------------------------------

def test_pv_single_period_investment_rows():
    inst = build(pv_rows())
    (cap,) = tagged(inst, "Eq1:PV")
    assert coefficients(cap) == {"units_invested_available.PV.t00": 1.0}
    assert cap.sense == Sense.LE and cap.rhs == 1000
    (bal,) = tagged(inst, "Eq2:PV")
    assert coefficients(bal) == {"units_invested_available.PV.t00": 1.0, "units_invested.PV.t00": -1.0,
                                 "units_mothballed.PV.t00": 1.0}
    assert bal.sense == Sense.EQ and bal.rhs == 0


def test_zero_candidates_force_zero_availability():
    inst = build(pv_rows(candidates="0", number=0))
    sol = solve(inst)
    assert sol.values[ref("units_invested_available", "PV")] == 0
    assert sol.objective == 0


def test_two_period_recursion():
    inst = build(pv_rows(hours=4, invest_resolution="2h"), allow_mothball=True)
    assert [c.tag for c in tagged(inst, "Eq2:PV")] == ["Eq2:PV:t=0", "Eq2:PV:t=1"]
    values = {v.ref: 0.0 for v in inst.variables}
    values[ref("units_invested", "PV", i=0)] = 3
    values[ref("units_invested_available", "PV", i=0)] = 3
    values[ref("units_mothballed", "PV", i=1)] = 1
    values[ref("units_invested_available", "PV", i=1)] = 2
    assert all(c.violation(values) == 0 for c in tagged(inst, "Eq2:PV"))
    values[ref("units_invested_available", "PV", i=1)] = 3
    assert tagged(inst, "Eq2:PV:t=1")[0].violation(values) == 1


def test_mothballing_is_off_by_default():
    inst = build(pv_rows())
    assert inst.variable(ref("units_mothballed", "PV")).ub == 0


# --- availability and online rows ---------------------------------------------------------------------

def test_fix_units_on_pins_the_online_level():
    rows = model_rows(3) + [
        ("node", "El", "nodal_balance_sense", "Base", "", ">="),
        ("unit", "El_wind", "number_of_units", "Base", "", "1"),
        ("unit__to_node", "El_wind|El", "unit_capacity", "Base", "", "54"),
    ] + series_rows("unit", "El_wind", "fix_units_on", [0.62, 0.1, 0.0])
    inst = build(rows)
    sol = solve(inst)
    assert sol.values[ref("units_on", "El_wind", i=0)] == pytest.approx(0.62, abs=1e-12)
    assert sol.values[ref("units_on", "El_wind", i=2)] == 0
    assert [c.rhs for c in tagged(inst, "fix_on")] == [0.62, 0.1, 0.0]


def test_zero_availability_factor_blocks_flow():
    inst = build(pv_rows(candidates="10", factor=[1, 0, 1], number=0))
    sol = solve(inst)
    assert sol.values[ref("units_available", "PV", i=1)] == 0
    assert sol.values[ref("unit_flow", "PV", "El", i=1)] == 0
    assert sol.values[ref("unit_flow", "PV", "El", i=0)] == pytest.approx(10)


def test_availability_scales_invested_units():
    inst = build(pv_rows(factor=[0.5, 0.5, 0.5], number=0))
    con = tagged(inst, "Eq3:PV:h=0")[0]
    assert coefficients(con) == {"units_available.PV.h0000": 1.0, "units_invested_available.PV.t00": -0.5}
    assert con.rhs == 0
    values = {ref("units_invested_available", "PV"): 100.0, ref("units_available", "PV"): 50.0}
    assert con.violation(values) == 0
    values[ref("units_available", "PV")] = 51.0
    assert con.violation(values) == pytest.approx(1.0)
    eq4 = tagged(inst, "Eq4:PV:h=0")[0]
    assert coefficients(eq4) == {"units_on.PV.h0000": 1.0, "units_available.PV.h0000": -1.0}


# --- flow bounds -----------------------------------------------------------------------------------------

def test_flow_bound_scales_with_units_on(gls):
    inst = compile_scenario(gls, "S0", "3h")
    con = tagged(inst, "Eq5:H2_syn|H2:h=0")[0]
    on = ref("units_on", "H2_syn")
    flow = ref("unit_flow", "H2_syn", "H2")
    assert coefficients(con) == {flow.name: 1.0, on.name: -0.0081}
    assert con.violation({on: 110, flow: 0.891}) <= 1e-12
    assert con.violation({on: 110, flow: 0.892}) > 0


def test_minimum_operating_point(gls):
    inst = compile_scenario(gls, "S0", "3h")
    con = tagged(inst, "min_op:H2_syn|H2:h=0")[0]
    on = ref("units_on", "H2_syn")
    flow = ref("unit_flow", "H2_syn", "H2")
    assert con.sense == Sense.GE
    assert con.violation({on: 1, flow: 0.00162}) <= 1e-15
    assert con.violation({on: 1, flow: 0.0016}) > 0
    # units_on = 0 collapses both bounds to flow = 0
    eq5 = tagged(inst, "Eq5:H2_syn|H2:h=0")[0]
    assert eq5.violation({on: 0, flow: 1e-3}) > 0 and con.violation({on: 0, flow: 0}) == 0


# --- ratios ----------------------------------------------------------------------------------------------

def test_electrolyzer_ratios_with_group_input():
    inst = build(ratio_rows())
    sol = solve(inst)
    v = sol.values
    h2 = v[ref("unit_flow", "E", "H2")]
    assert h2 == pytest.approx(1.0)
    el = v[ref("unit_flow", "El_a", "E")] + v[ref("unit_flow", "El_b", "E")]
    assert el == pytest.approx(53.6 * h2)
    assert v[ref("unit_flow", "El_a", "E")] == 0  # the cheaper member supplies everything
    assert v[ref("unit_flow", "H2O_in", "E")] == pytest.approx(9.9999 * h2)
    assert v[ref("unit_flow", "E", "Heat_out")] == pytest.approx(9.763 * h2)
    assert v[ref("unit_flow", "E", "O_out")] == pytest.approx(4.965 * h2)


def test_zero_h2_output_zeroes_coupled_flows():
    sol = solve(build(ratio_rows(price=0)))
    assert all(x == pytest.approx(0, abs=1e-12) for r, x in sol.values.items() if r.kind == "unit_flow")


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1))
def test_ratio_rows_are_homogeneous(lam):
    inst = build(ratio_rows())
    sol = solve(inst)
    scaled = {r: (x * lam if r.kind == "unit_flow" else x) for r, x in sol.values.items()}
    for con in tagged(inst, "ratio_"):
        assert con.violation(scaled) <= 1e-9


# --- nodal balance ---------------------------------------------------------------------------------------

def test_balance_senses(gls):
    inst = compile_scenario(gls, "S0", "3h")
    h2 = tagged(inst, "balance:H2:h=0")[0]
    assert h2.sense == Sense.EQ
    assert coefficients(h2)["unit_flow.H2_syn.H2.h0000"] == 1.0
    assert all(a == -1.0 for n, a in coefficients(h2).items() if n.startswith("unit_flow.H2."))
    assert tagged(inst, "balance:H2_out:h=0")[0].sense == Sense.GE
    meoh = compile_scenario(gls, "S6", "3h")
    assert tagged(meoh, "balance:CO2_in:h=0")[0].sense == Sense.LE


def test_isolated_node_gets_no_balance_row():
    rows = electrolyzer_rows() + [("node", "Lonely", "nodal_balance_sense", "Base", "", "==")]
    assert not tagged(build(rows), "balance:Lonely")


# --- storage ---------------------------------------------------------------------------------------------

def test_bess_state_rows(gls):
    inst = compile_scenario(gls, "S0", "3h")
    s0, s1 = tagged(inst, "state:BESS:h=0")[0], tagged(inst, "state:BESS:h=1")[0]
    assert s0.rhs == 0 and "node_state.BESS.h0000" in coefficients(s0)
    assert coefficients(s1)["node_state.BESS.h0000"] == pytest.approx(-(1 - 4e-5))
    cap = tagged(inst, "state_cap:BESS:h=0")[0]
    assert coefficients(cap) == {"node_state.BESS.h0000": 1.0, "storages_invested_available.BESS.t00": -1.0}
    assert cap.rhs == 0


def test_h2_storage_tanks(gls):
    inst = compile_scenario(gls, "S0", "3h")
    assert inst.variable(ref("storages_invested_available", "H2_storage")).domain == INTEGER
    cap = tagged(inst, "state_cap:H2_storage:h=0")[0]
    assert coefficients(cap)["storages_invested_available.H2_storage.t00"] == -0.5
    s1 = tagged(inst, "state:H2_storage:h=1")[0]
    assert coefficients(s1)["node_state.H2_storage.h0000"] == pytest.approx(-0.99)


def test_state_constant_without_loss_or_flows():
    rows = [r for r in storage_rows() if r[0] == "model" or (r[0] == "node" and r[1] == "S")]
    sol = solve(build(rows))
    states = [x for r, x in sorted(sol.values.items()) if r.kind == "node_state"]
    assert states == pytest.approx([5.0] * 4)


def test_storage_dynamics_with_loss():
    inst = build(storage_rows(loss="0.1", pin="5"))
    sol = solve(inst)
    v = sol.values
    prev = 5.0
    for h in range(4):
        flow_in, flow_out = v[ref("unit_flow", "Chg", "S", i=h)], v[ref("unit_flow", "S", "Dis", i=h)]
        state = v[ref("node_state", "S", i=h)]
        assert state == pytest.approx(0.9 * prev + flow_in - flow_out, abs=1e-9)
        prev = state


def test_cyclic_storage_returns_to_start():
    inst = build(storage_rows(pin="3", cyclic="true"))
    sol = solve(inst)
    assert sol.values[ref("node_state", "S", i=3)] == pytest.approx(3.0, abs=1e-9)
    assert tagged(inst, "cyclic:S")


def test_cyclic_without_pin_links_last_to_first():
    inst = build(storage_rows(pin=None, cyclic="true"))
    s0 = tagged(inst, "state:S:h=0")[0]
    assert "node_state.S.h0003" in coefficients(s0)


def test_unpinned_storage_is_rejected():
    with pytest.raises(CompileError) as exc:
        build(storage_rows(pin=None))
    assert any(isinstance(e, UnpinnedState) for e in exc.value.errors)


# --- unit commitment -------------------------------------------------------------------------------------

def down_time_ok(pattern, d):
    """Every shutdown must be followed by at least ``d`` off hours before the next start."""
    for h in range(1, len(pattern)):
        if pattern[h - 1] == 1 and pattern[h] == 0:
            if any(pattern[k] == 1 for k in range(h, min(h + d, len(pattern)))):
                return False
    return True


def feasible(rows):
    return solve_milp(build(rows)).status == Status.OPTIMAL


def test_two_hour_down_time_examples():
    assert feasible(stack_rows(fixed=[1, 0, 0, 1]))
    assert not feasible(stack_rows(fixed=[1, 0, 1, 1]))
    assert not feasible(stack_rows(fixed=[1, 0, 1, 0]))


def test_down_time_pattern_enumeration():
    for pattern in itertools.product((0, 1), repeat=4):
        assert feasible(stack_rows(fixed=list(pattern))) == down_time_ok(pattern, 2), pattern


def test_zero_down_time_allows_any_pattern():
    for pattern in itertools.product((0, 1), repeat=4):
        assert feasible(stack_rows(min_down="0h", fixed=list(pattern))), pattern


def test_uc_link_rows():
    inst = build(stack_rows())
    link = tagged(inst, "uc_link:Stack:h=1")[0]
    assert coefficients(link) == {"units_on.Stack.h0001": 1.0, "units_on.Stack.h0000": -1.0,
                                  "units_started.Stack.h0001": -1.0, "units_shut_down.Stack.h0001": 1.0}
    md = tagged(inst, "min_down:Stack:h=2")[0]
    assert set(coefficients(md)) == {"units_on.Stack.h0002", "units_available.Stack.h0002",
                                     "units_shut_down.Stack.h0001", "units_shut_down.Stack.h0002"}


def test_lp_mode_drops_commitment(gls):
    milp = compile_scenario(gls, "S3", "24h", MILP)
    lp = compile_scenario(gls, "S3", "24h", LP)
    uc_rows = len(tagged(milp, "uc_link")) + len(tagged(milp, "min_down"))
    assert uc_rows > 0
    assert len(milp.constraints) - len(lp.constraints) == uc_rows
    assert lp.n_integer == 0 and not lp.refs("units_started")


# --- user constraints ------------------------------------------------------------------------------------

def family_rows(rhs="8736", hours=4):
    rows = model_rows(hours) + [
        ("node", "El", "nodal_balance_sense", "Base", "", "<="),
        ("node", "P", "nodal_balance_sense", "Base", "", ">="),
        ("user_constraint", "Family", "constraint_sense", "Base", "", "<="),
        ("user_constraint", "Family", "right_hand_side", "Base", "", rhs),
    ]
    for size in ("A", "B"):
        rows += [
            ("unit", size, "number_of_units", "Base", "", "1"),
            ("unit__from_node", f"{size}|El", "", "", "", ""),
            ("unit__to_node", f"{size}|P", "unit_capacity", "Base", "", "1"),
            ("unit__to_node", f"{size}|P", "fuel_cost", "Base", "", "-5"),
            ("unit__node__node", f"{size}|El|P", "fix_ratio_in_out_unit_flow", "Base", "", "1"),
            ("unit__user_constraint", f"{size}|Family", "units_on_coefficient", "Base", "", "1"),
        ]
    return rows


def test_family_cap_is_prorated():
    inst = build(family_rows())
    (con,) = tagged(inst, "user:Family")
    assert con.sense == Sense.LE and con.rhs == pytest.approx(4.0)
    assert len(con.terms) == 8
    on = {ref("units_on", s, i=h): float(s == ("A" if h < 2 else "B")) for s in "AB" for h in range(4)}
    assert con.activity(on) == pytest.approx(con.rhs)
    assert con.violation(on) == 0


def test_family_cap_binds_in_the_solution():
    sol = solve(build(family_rows()))
    total = sum(x for r, x in sol.values.items() if r.kind == "units_on")
    assert total == pytest.approx(4.0)


def test_zero_rhs_forces_members_off():
    sol = solve(build(family_rows(rhs="0")))
    assert all(x == pytest.approx(0, abs=1e-12) for r, x in sol.values.items() if r.kind == "units_on")


def test_member_without_online_variable_is_unknown():
    rows = family_rows() + [("unit", "Ghost", "", "", "", ""),
                            ("unit__user_constraint", "Ghost|Family", "units_on_coefficient", "Base", "", "1")]
    with pytest.raises(CompileError) as exc:
        build(rows)
    assert any(isinstance(e, UnknownMember) for e in exc.value.errors)


def test_meoh_family_constraint_in_bundled_data(gls):
    inst = compile_scenario(gls, "S6", "24h")
    (con,) = [c for c in inst.constraints if c.tag.startswith("user:")]
    assert con.rhs == pytest.approx(8736 * 24 / 8736)
    assert {r.entity[0] for r, _ in con.terms} >= {"MeOH_syn_10"}


# --- objective -------------------------------------------------------------------------------------------

def test_h2_sale_coefficient(gls):
    inst = compile_scenario(gls, "S0", "3h")
    assert inst.objective[ref("unit_flow", "H2_discharge", "H2_out", i=1)] == -2160


def test_pv_investment_is_prorated(gls):
    inst = compile_scenario(gls, "S3", "168h")
    assert inst.objective[ref("units_invested", "PV")] == pytest.approx(41259 * 168 / 8736)
    assert build(pv_rows(hours=3)).objective[ref("units_invested", "PV")] == pytest.approx(41259 * 3 / 8736)


def test_all_zero_solution_costs_only_existing_fom():
    inst = build(electrolyzer_rows())
    zero = {v.ref: 0.0 for v in inst.variables}
    assert inst.evaluate(zero) == 0.0


# --- compile -------------------------------------------------------------------------------------------

def test_empty_graph_compiles_to_empty_instance():
    block = TemporalBlock("operation", datetime(2019, 1, 1), datetime(2019, 1, 1, 3), timedelta(hours=1))
    inst = compile_instance(EntityGraph(), EffectiveView(), Blocks(block, None))
    assert inst.n_vars == 0 and not inst.constraints


def test_s6_compiles_on_base_block(gls):
    layers = [x for x in builtin_scenarios()["S6"].layers if x != "Year"]
    inst = compile_scenario(gls, layers, None)
    assert inst.metadata["hours"] == 3


def test_compile_is_deterministic(gls):
    a = compile_scenario(gls, "S6", "24h")
    b = compile_scenario(gls, "S6", "24h")
    assert [v.ref for v in a.variables] == [v.ref for v in b.variables]
    assert [(c.tag, c.terms, c.rhs) for c in a.constraints] == [(c.tag, c.terms, c.rhs) for c in b.constraints]


def test_every_constraint_is_tagged(gls):
    inst = compile_scenario(gls, "S9", "24h")
    assert all(c.tag for c in inst.constraints)
    assert all(math.isfinite(a) for c in inst.constraints for _, a in c.terms)


def test_candidate_scale_rounding():
    inst = build(pv_rows(), candidate_scale=0.1)
    assert tagged(inst, "Eq1:PV")[0].rhs == pytest.approx(100)


def test_size_family_investment_is_a_single_integer_unit(gls):
    inst = compile_scenario(gls, "S6", "3h")
    assert inst.variable(ref("units_invested_available", "MeOH_syn_10")).domain == INTEGER
    assert tagged(inst, "Eq1:MeOH_syn_10")[0].rhs == 1


def test_binary_domain_gets_unit_upper_bound():
    rows = [r if r[2] != "unit_investment_variable_type" else r[:5] + ("unit_investment_variable_type_binary",)
            for r in pv_rows()]
    assert build(rows).variable(ref("units_invested_available", "PV")).domain == BINARY
    assert build(rows).variable(ref("units_invested_available", "PV")).ub == 1


# --- properties on small hubs ----------------------------------------------------------------------------

@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(0, 80), min_size=3, max_size=3), st.integers(-4000, -500), st.integers(1, 1000))
def test_premium_never_increases_objective(prices, sale, extra):
    base = solve(build(electrolyzer_rows(prices=prices, h2_price=sale)))
    premium = solve(build(electrolyzer_rows(prices=prices, h2_price=sale - extra)))
    assert premium.objective <= base.objective + 1e-9


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=4, max_size=4))
def test_eq_chain_holds_after_solve(pattern):
    inst = build(stack_rows(min_down=None, fixed=pattern))
    sol = solve(inst, SolverConfig())
    v = sol.values
    for h in range(4):
        assert v[ref("units_available", "Stack", i=h)] >= v[ref("units_on", "Stack", i=h)] - 1e-9
        assert v[ref("unit_flow", "El", "Stack", i=h)] <= v[ref("units_on", "Stack", i=h)] * 1.0 + 1e-9
