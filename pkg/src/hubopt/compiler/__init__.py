from hubopt.compiler.emit import (
    LP, MILP, CompileContext, build_objective, build_variables, compile_instance,
    emit_availability_constraints, emit_flow_constraints, emit_investment_constraints,
    emit_nodal_balance, emit_ratio_constraints, emit_storage_constraints, emit_uc_constraints,
    emit_user_constraints, flow_ref,
)
from hubopt.compiler.instance import (
    BINARY, CONTINUOUS, INTEGER, LinearConstraint, MatrixForm, MILPInstance, Variable, VariableRef,
    parse_variable_name,
)

compile = compile_instance  # noqa: A001

__all__ = [
    "BINARY", "CONTINUOUS", "INTEGER", "LP", "MILP", "CompileContext", "LinearConstraint", "MILPInstance",
    "MatrixForm", "Variable", "VariableRef", "build_objective", "build_variables", "compile", "compile_instance",
    "compile_scenario", "emit_availability_constraints", "emit_flow_constraints", "emit_investment_constraints",
    "emit_nodal_balance", "emit_ratio_constraints", "emit_storage_constraints", "emit_uc_constraints",
    "emit_user_constraints", "flow_ref", "parse_variable_name",
]


def compile_scenario(graph, stack, horizon=None, mode=MILP, candidate_scale=1.0, capex_factor=0.5,
                     allow_mothball=False):
    """Compose ``stack`` (a ScenarioStack, a built-in name or layer list) and compile it."""
    from hubopt.model.temporal import make_blocks
    from hubopt.scenarios import ScenarioStack, get_stack, view_for

    if isinstance(stack, str):
        stack = get_stack(stack)
    elif not isinstance(stack, ScenarioStack):
        stack = ScenarioStack("+".join(stack), tuple(stack))
    view = view_for(graph, stack, capex_factor)
    blocks = make_blocks(view, horizon)
    return compile_instance(graph, view, blocks, mode, candidate_scale, allow_mothball, scenario=stack.name)
