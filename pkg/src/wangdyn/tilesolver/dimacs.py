"""DIMACS CNF export and model import for cross-checking external solvers."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Union

from ..wangcore import Patch
from .encode import Cnf, SolveRequest, decode_assignment


class DimacsParseError(ValueError):
    pass


def export_dimacs(cnf: Cnf, path: Union[str, Path]) -> None:
    """Write "p cnf V C" plus clauses in canonical order, byte-stable."""
    starts = cnf.starts
    lits = cnf.lits
    with open(path, "w") as fh:
        fh.write(f"p cnf {cnf.num_vars} {cnf.num_clauses}\n")
        buf = io.StringIO()
        for i in range(cnf.num_clauses):
            row = lits[starts[i]:starts[i + 1]]
            buf.write(" ".join(str(int(v)) for v in row))
            buf.write(" 0\n")
            if buf.tell() > 1 << 20:
                fh.write(buf.getvalue())
                buf = io.StringIO()
        fh.write(buf.getvalue())


def read_dimacs(path: Union[str, Path]) -> Cnf:
    """Read a DIMACS CNF file back into canonical form."""
    import numpy as np

    num_vars = None
    lits: list[int] = []
    starts = [0]
    current: list[int] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise DimacsParseError(f"bad header {line!r}")
                num_vars = int(parts[2])
                continue
            for tok in line.split():
                v = int(tok)
                if v == 0:
                    lits.extend(current)
                    starts.append(len(lits))
                    current = []
                else:
                    current.append(v)
    if num_vars is None:
        raise DimacsParseError("missing 'p cnf' header")
    if current:
        raise DimacsParseError("trailing clause without terminating 0")
    cnf = Cnf(num_vars, np.array(lits, dtype=np.int32),
              np.array(starts, dtype=np.int64))
    cnf.validate()
    return cnf


def read_model_literals(path: Union[str, Path]) -> list[int]:
    """Signed literals from a solver model file.

    Accepts plain whitespace-separated literals, optional 'v' line prefixes
    and an optional SAT/SATISFIABLE banner; a final 0 terminates.
    """
    lits: list[int] = []
    with open(path) as fh:
        for line in fh:
            for tok in line.split():
                if tok in ("v", "s", "SAT", "SATISFIABLE"):
                    continue
                if tok in ("UNSAT", "UNSATISFIABLE"):
                    raise DimacsParseError("model file reports UNSAT")
                try:
                    v = int(tok)
                except ValueError as exc:
                    raise DimacsParseError(f"bad token {tok!r}") from exc
                if v == 0:
                    return lits
                lits.append(v)
    return lits


def import_model(path: Union[str, Path], request: SolveRequest) -> Patch:
    """Decode an external solver model into a patch for the request."""
    lits = read_model_literals(path)
    true_vars = [v for v in lits if v > 0]
    return decode_assignment(request, true_vars)
