"""Near-uniform generation of SAT witnesses with xor-based hash functions."""

from .entropy import BitSource, EntropyExhausted, FileBitSource, SeededBitSource
from .enumeration import (
    DeadlineExceeded,
    ExternalSolverBackend,
    InternalBackend,
    SolveBudget,
    SolverError,
    SolveTimeout,
    WitnessSet,
    bounded_sat,
    model_count,
    nth_witness,
)
from .formula import (
    AugmentedFormula,
    CnfFormula,
    DimacsError,
    Witness,
    XorConstraint,
    emit_extended_dimacs,
    parse_dimacs,
    parse_extended_dimacs,
    xor_to_cnf,
)
from .hashing import (
    AlgebraicHash,
    ConvHash,
    XorDistributionParams,
    apply_algebraic_hash,
    apply_conv_hash,
    conv_hash_to_xors,
    sample_algebraic_hash,
    sample_conv_hash,
    sample_xor_constraint,
)
from .samplers import (
    LeapfrogCache,
    SampleOutcome,
    SearchFailed,
    UniWitConfig,
    XorSampleConfig,
    bgp,
    estimate_s,
    leapfrog_update,
    pivot,
    uniwit,
    xorsample,
    xorsample_prime,
)

__version__ = "0.1.0"
