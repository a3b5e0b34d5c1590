"""CSS codes pairing a binary BCH code with sparse x-checks drawn from its codewords, plus decoders and simulators."""

__version__ = "0.1.0"

from .bch import BchCode, DecodeFailure, berlekamp_decode, binary_check_matrix, syndromes
from .bp import BpConfig, TannerGraph, bp_decode, bp_decode_batch, check_syndrome
from .channel import (
    NoiseParams,
    SimReport,
    analytic_perr_z,
    calibrate_Mx,
    run_trials_joint,
    run_trials_x,
    run_trials_z,
    sample_flips,
    solve_pz_for_target,
    uncorrected_block_error,
)
from .css import (
    CssCode,
    build_css_code,
    build_pool,
    generate_candidate_check,
    rates,
    select_checks,
    verify_commutativity,
)
from .galois import Field, make_field
from .gf2 import rank_gf2
from .table import TableRow, table_row

__all__ = [
    "BchCode",
    "BpConfig",
    "CssCode",
    "DecodeFailure",
    "Field",
    "NoiseParams",
    "SimReport",
    "TableRow",
    "TannerGraph",
    "__version__",
    "analytic_perr_z",
    "berlekamp_decode",
    "binary_check_matrix",
    "bp_decode",
    "bp_decode_batch",
    "build_css_code",
    "build_pool",
    "calibrate_Mx",
    "check_syndrome",
    "generate_candidate_check",
    "make_field",
    "rank_gf2",
    "rates",
    "run_trials_joint",
    "run_trials_x",
    "run_trials_z",
    "sample_flips",
    "select_checks",
    "solve_pz_for_target",
    "syndromes",
    "table_row",
    "uncorrected_block_error",
    "verify_commutativity",
]
