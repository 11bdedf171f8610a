"""Laboratory for Turing machines with multiplicity semantics: parse machine
descriptions, execute them under four semantics, compile multiplicity
machines to deterministic track machines, emit and model-check the
first-order theories of their computations, and verify the modal kernel."""

from .classical import ClassicalConfig, ComputationTree, Trace, dtm_run, ndtm_run_all
from .epartm import (
    EntanglementWitness,
    Superposition,
    entangled,
    epartm_acceptance,
    epartm_run,
    epartm_step,
)
from .errors import BudgetError, PrecondError
from .machine import (
    DslError,
    Instruction,
    Machine,
    ValidationReport,
    make_machine,
    parse_machine,
    serialize_machine,
    validate,
)
from .partm import (
    AcceptanceFraction,
    ParConfig,
    ParTrace,
    partm_acceptance,
    partm_results,
    partm_run,
    partm_step,
)
from .trackdtm import TrackDTM, TrackRun, compile_partm_to_dtm, simulate_and_compare

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
