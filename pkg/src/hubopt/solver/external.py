from __future__ import annotations

import os
import shlex
import subprocess
import sys
import tempfile
from pathlib import Path

from hubopt.compiler.instance import MILPInstance
from hubopt.errors import SubprocessFailure
from hubopt.solver.audit import check
from hubopt.solver.core import Solution, SolverConfig
from hubopt.solver.mps import tags_path, write_mps
from hubopt.solver.solfile import read_solution

ENV_VAR = "HUBOPT_SOLVER_CMD"
# the bundled bridge: HiGHS via highspy, reading MPS and writing a plain solution file
DEFAULT_COMMAND = f"{shlex.quote(sys.executable)} -m hubopt.solver.highs_cli {{mps}} {{sol}}"


def resolve_command(cli_value: str | None = None) -> str:
    """Environment variable first, then the CLI flag, then the bundled HiGHS bridge."""
    return os.environ.get(ENV_VAR) or cli_value or DEFAULT_COMMAND


def external_solve(instance: MILPInstance, command_template: str, config: SolverConfig | None = None,
                   workdir: str | Path | None = None, timeout: float | None = None) -> Solution:
    """Write MPS, run ``command_template`` with ``{mps}``/``{sol}`` filled in, read and audit the result."""
    config = config or SolverConfig()
    if "{mps}" not in command_template or "{sol}" not in command_template:
        raise ValueError("command template needs both {mps} and {sol} placeholders")
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        mps = Path(tmp) / "model.mps"
        sol = Path(tmp) / "model.sol"
        write_mps(instance, mps)
        cmd = command_template.format(mps=shlex.quote(str(mps)), sol=shlex.quote(str(sol)))
        try:
            proc = subprocess.run(shlex.split(cmd), capture_output=True, text=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise SubprocessFailure(f"solver command failed to run: {exc}") from None
        if proc.returncode != 0:
            raise SubprocessFailure(f"solver exited with {proc.returncode}: {proc.stderr.strip()[-500:]}")
        if not sol.exists():
            raise SubprocessFailure("solver produced no solution file")
        solution = read_solution(sol, instance, tags_path(mps))
    if solution.status.has_values:
        check(instance, solution.values, config.feasibility_tol, config.integrality_tol)
    solution.engine = "external"
    return solution
