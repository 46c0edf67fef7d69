"""Anytime dependency parsing by constraint propagation."""

from .constraints import (
    ConstraintDef,
    bundled_grammar,
    load_grammar,
    parse_grammar,
    serialize_grammar,
)
from .errors import CDGError, GrammarError
from .lattice import Horizon, StreamEvent, extend_network, emit_expired, simulate_stream
from .model import (
    AMBIGUOUS,
    INCONSISTENT,
    UNIQUE,
    ConstraintNetwork,
    Grammar,
    ModificationValue,
    TimeInterval,
    WordNode,
    extract_solution,
    nodes_from_tokens,
)
from .propagation import license_domains, oracle_enumerate, propagate
from .scheduler import (
    Budget,
    QualityTrace,
    ScoreModels,
    ambiguity_measure,
    continue_run,
    mean_reliability,
    quality,
    run_contract,
    run_interruptible,
)

__version__ = "0.1.0"
