"""Run an external SAT/QBF solver on DIMACS/QDIMACS text via stdin."""
from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass


class SolverCrashed(RuntimeError):
    pass


class SolverTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverResult:
    satisfiable: bool
    model: dict | None = None  # var -> bool, only for variables the solver reported

    def value(self, lit: int, default: bool = False) -> bool:
        if self.model is None:
            raise RuntimeError("solver reported no model")
        val = self.model.get(abs(lit), default)
        return val if lit > 0 else not val


def parse_output(stdout: str, returncode: int) -> SolverResult:
    status = None
    assigned: dict[int, bool] = {}
    for raw in stdout.splitlines():
        parts = raw.split()
        if not parts:
            continue
        head = parts[0]
        if head == "s":
            rest = " ".join(parts[1:]).upper()
            if rest in ("SATISFIABLE", "CNF 1"):
                status = True
            elif rest in ("UNSATISFIABLE", "CNF 0"):
                status = False
            elif rest.startswith("CNF "):
                # QDIMACS summary line: s cnf <result> <vars> <clauses>
                code = parts[2] if len(parts) > 2 else ""
                if code in ("1", "0"):
                    status = code == "1"
        elif head in ("v", "V"):
            for tok in parts[1:]:
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverCrashed(f"bad model token {tok!r}") from None
                if lit:
                    assigned[abs(lit)] = lit > 0
        elif head in ("SAT", "SATISFIABLE") and len(parts) == 1:
            status = True
        elif head in ("UNSAT", "UNSATISFIABLE") and len(parts) == 1:
            status = False
    if status is None:
        if returncode == 10:
            status = True
        elif returncode == 20:
            status = False
        else:
            tail = stdout.strip().splitlines()[-3:]
            raise SolverCrashed(f"no verdict (exit code {returncode}): {tail}")
    return SolverResult(status, assigned if (status and assigned) else None)


def external_solve(command: str | list, text: str, timeout: float | None = None) -> SolverResult:
    """Pipe ``text`` to ``command`` and parse its verdict and (partial) model."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    try:
        proc = subprocess.run(argv, input=text, capture_output=True, text=True, timeout=timeout)
    except FileNotFoundError as exc:
        raise SolverCrashed(f"solver not found: {argv[0]!r}") from exc
    except PermissionError as exc:
        raise SolverCrashed(f"solver not executable: {argv[0]!r}") from exc
    except subprocess.TimeoutExpired as exc:
        raise SolverTimeout(f"solver exceeded {timeout} s") from exc
    return parse_output(proc.stdout, proc.returncode)
