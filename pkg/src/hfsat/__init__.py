"""Decision toolkit for two-sorted restricted-quantifier formulas over hereditarily finite sets."""

from .errors import (
    ContractError, EvaluationError, HFSatError, InvalidInterpretationError, ParseError,
    ResourceError, SortError, ValidationError,
)
from .hf import (
    EMPTY, KURATOWSKI, HFSet, PairingSpec, delta_pairing, hf, kur_pair, pairs_of, parse_hf, rank,
    universe,
)
from .parser import parse, print_formula
from .syntax import MAP, SET, Var, map_var, set_var, validate
from .semantics import Interpretation, dump_model, evaluate, extended_evaluate, load_model, read_model
from .normalize import NormalizedConjunction, check_normalized, normalized_conjunctions, skeleton
from .reduction import (
    RenamingMap, reduce_conjunction, tau, transfer_model_backward, transfer_model_forward,
)
from .solver import NoModelWithinBound, Sat, SearchBound, decide_bounded, oracle_enumerate
from .constructs import CONSTRUCTS, ConstructCall, expand, oracle_check, sweep
from .encoders import (
    DominoSystem, PeanoCandidate, check_peano, encode_domino, encode_propositional,
    parse_domino, parse_propositional,
)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "EvaluationError",
    "HFSatError",
    "InvalidInterpretationError",
    "ParseError",
    "ResourceError",
    "SortError",
    "ValidationError",
    "EMPTY",
    "KURATOWSKI",
    "HFSet",
    "PairingSpec",
    "delta_pairing",
    "hf",
    "kur_pair",
    "pairs_of",
    "parse_hf",
    "rank",
    "universe",
    "parse",
    "print_formula",
    "MAP",
    "SET",
    "Var",
    "map_var",
    "set_var",
    "validate",
    "Interpretation",
    "dump_model",
    "evaluate",
    "extended_evaluate",
    "load_model",
    "read_model",
    "NormalizedConjunction",
    "check_normalized",
    "normalized_conjunctions",
    "skeleton",
    "RenamingMap",
    "reduce_conjunction",
    "tau",
    "transfer_model_backward",
    "transfer_model_forward",
    "NoModelWithinBound",
    "Sat",
    "SearchBound",
    "decide_bounded",
    "oracle_enumerate",
    "CONSTRUCTS",
    "ConstructCall",
    "expand",
    "oracle_check",
    "sweep",
    "DominoSystem",
    "PeanoCandidate",
    "check_peano",
    "encode_domino",
    "encode_propositional",
    "parse_domino",
    "parse_propositional",
]
