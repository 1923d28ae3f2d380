"""Valid-patch production: CNF encoding, CDCL engine, DIMACS interop."""

from .bruteforce import brute_count, brute_solve, enumerate_patches
from .cdcl import CdclSolver, SolveResult, SolveTimeoutError, solve_patch
from .dimacs import (
    DimacsParseError,
    export_dimacs,
    import_model,
    read_dimacs,
    read_model_literals,
)
from .encode import (
    Cnf,
    InconsistentModelError,
    SolveRequest,
    decode_assignment,
    encode_cnf,
)

__all__ = [
    "Cnf",
    "CdclSolver",
    "DimacsParseError",
    "InconsistentModelError",
    "SolveRequest",
    "SolveResult",
    "SolveTimeoutError",
    "brute_count",
    "brute_solve",
    "decode_assignment",
    "encode_cnf",
    "enumerate_patches",
    "export_dimacs",
    "import_model",
    "read_dimacs",
    "read_model_literals",
    "solve_patch",
]
