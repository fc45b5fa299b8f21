"""Numerical laboratory for de Branges-Rovnyak spaces H(b)."""

from .errors import HbError, PreconditionError, RangeResidualError, SymbolError, TruncationError
from .inner_case import commutant_projection_check, inner_case_check
from .model_space import ModelSpace
from .oracle import RangeOracle
from .outer import ModulusProfile
from .reducibility import (
    CandidatePair,
    ReducibilityCertificate,
    ReducibilityConfig,
    SolutionSet,
    SubspacePair,
    build_bilinear_system,
    classify_recurrence_dichotomy,
    construct_reducing_subspaces,
    decide_reducibility,
    irreducibility_of_X,
    solve_candidates,
    verify_moment_recurrences,
    verify_subspace_pair,
)
from .reports import AnalysisReport, RunConfig, run_analyze, run_moments, run_reduce, run_scan, run_verify
from .space import (
    GramMatrix,
    gram_closed_form,
    gram_model_space,
    gram_via_moments,
    gram_via_pseudoinverse,
    verify_defect_identities,
)
from .symbols import (
    SymbolSpec,
    evaluate_boundary,
    moments_of_modulus_squared,
    parity_classify,
    parse_symbol,
    taylor_coefficients,
)

__all__ = [
    "AnalysisReport",
    "CandidatePair",
    "GramMatrix",
    "HbError",
    "ModelSpace",
    "ModulusProfile",
    "PreconditionError",
    "RangeOracle",
    "RangeResidualError",
    "ReducibilityCertificate",
    "ReducibilityConfig",
    "RunConfig",
    "SolutionSet",
    "SubspacePair",
    "SymbolError",
    "SymbolSpec",
    "TruncationError",
    "build_bilinear_system",
    "classify_recurrence_dichotomy",
    "commutant_projection_check",
    "construct_reducing_subspaces",
    "decide_reducibility",
    "evaluate_boundary",
    "gram_closed_form",
    "gram_model_space",
    "gram_via_moments",
    "gram_via_pseudoinverse",
    "inner_case_check",
    "irreducibility_of_X",
    "moments_of_modulus_squared",
    "parity_classify",
    "parse_symbol",
    "run_analyze",
    "run_moments",
    "run_reduce",
    "run_scan",
    "run_verify",
    "solve_candidates",
    "taylor_coefficients",
    "verify_defect_identities",
    "verify_moment_recurrences",
    "verify_subspace_pair",
]

__version__ = "0.1.0"
