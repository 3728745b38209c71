"""Simulator, verifiers and set measures for almost-catalytic space-bounded machines."""

from .codes import CodeSpec, DecodeOutcome, decode, encode, parse_code
from .engines import (
    BlockEngineConfig,
    ExtraSymbolEngineConfig,
    FullDecodeEngineConfig,
    SparseEngineConfig,
    build_block,
    build_extra_symbol,
    build_full_decode,
    build_parity_pair,
    build_prefix_zero,
    build_sparse,
    build_tally,
    wrap_involution,
)
from .errors import (
    AlreadyHalted,
    BudgetExceeded,
    CatalyticLabError,
    ConfigInvalid,
    HypothesisViolated,
    LengthMismatch,
    NotDecodable,
    TooLarge,
    UndefinedTransition,
    WorkSpaceExceeded,
)
from .machine import (
    AlmostCatalyticMachine,
    Configuration,
    MachineTable,
    RunResult,
    Sample,
    TableMachine,
    check_configuration_disjointness,
    run,
    step,
    verify_restoration,
)
from .measures import (
    BitVectorSet,
    PartitionResult,
    ProjectionStats,
    SpectrumTable,
    Subcube,
    ball_union,
    gotsman_linial_check,
    partition_complexity,
    projection_complexity,
    spectral_l1,
    wht_spectrum,
    xor_shift,
)
from .setlang import CatalyticSet, parse_set
from .zpp import DovetailResult, RuntimeStats, dovetail, expected_runtime

__version__ = "0.1.0"
