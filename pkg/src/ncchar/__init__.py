"""Characteristic-dependent network coding toolkit.

Builds families of multiple-unicast networks whose (k, n) fractional
linear solvability over GF(p) depends only on whether the characteristic
p divides a construction parameter q, together with closed-form codes,
an exact verifier, and an exhaustive solvability search.
"""

from .constructions import (
    GadgetApplication,
    gadget_transform,
    gadget_transform_traced,
    gen_fano,
    gen_n1,
    gen_n2,
    gen_nonfano,
    union_copies,
)
from .gf import (
    FieldMatrix,
    PrimeModulus,
    SingularMatrixError,
    as_modulus,
    block_compose,
    block_identity_check,
    inverse,
    mat_add,
    mat_mul,
    rank,
    solve_right,
)
from .lincode import (
    CharacteristicError,
    CodeError,
    CodeFormatError,
    CodeInput,
    FractionalCode,
    SymbolicCode,
    SymInput,
    SymMatrix,
    TerminalReport,
    VerificationReport,
    eval_transfer,
    instantiate,
    load_code,
    rate,
    save_code,
    verify,
)
from .network import (
    CodedNetwork,
    CycleError,
    NetEdge,
    NetNode,
    NetworkFormatError,
    UnicastCheck,
    ValidationReport,
    Violation,
    is_multiple_unicast,
    load,
    save,
    topological_order,
    validate,
)
from .solutions import lift_gadget, lift_union, solve_n1, solve_n2
from .solver import (
    INCONCLUSIVE,
    SOLVABLE,
    UNSOLVABLE,
    SearchConfig,
    SearchOutcome,
    decodable,
    search_fractional,
    search_scalar,
)

__version__ = "0.1.0"

__all__ = [
    "CharacteristicError",
    "CodeError",
    "CodeFormatError",
    "CodeInput",
    "CodedNetwork",
    "CycleError",
    "FieldMatrix",
    "FractionalCode",
    "GadgetApplication",
    "INCONCLUSIVE",
    "NetEdge",
    "NetNode",
    "NetworkFormatError",
    "PrimeModulus",
    "SOLVABLE",
    "SearchConfig",
    "SearchOutcome",
    "SingularMatrixError",
    "SymInput",
    "SymMatrix",
    "SymbolicCode",
    "TerminalReport",
    "UNSOLVABLE",
    "UnicastCheck",
    "ValidationReport",
    "VerificationReport",
    "Violation",
    "as_modulus",
    "block_compose",
    "block_identity_check",
    "decodable",
    "eval_transfer",
    "gadget_transform",
    "gadget_transform_traced",
    "gen_fano",
    "gen_n1",
    "gen_n2",
    "gen_nonfano",
    "instantiate",
    "inverse",
    "is_multiple_unicast",
    "lift_gadget",
    "lift_union",
    "load",
    "load_code",
    "mat_add",
    "mat_mul",
    "rank",
    "rate",
    "save",
    "save_code",
    "search_fractional",
    "search_scalar",
    "solve_n1",
    "solve_n2",
    "solve_right",
    "topological_order",
    "union_copies",
    "validate",
    "verify",
]
