"""Token-driven fuzzy cognitive maps for engineering design risk assessment."""

from .analysis import (
    DecisionRow,
    DecisionTable,
    FmeaEntry,
    SteadyStateStatus,
    build_report,
    classic_fcm_iterate,
    classify_nodes,
    compute_drpn,
    detect_steady_state,
    fmea_hazards,
    impact_matrix,
    independent_activation,
    most_impacted,
)
from .engine import (
    SimulationConfig,
    SimulationTrace,
    Token,
    TokenEngine,
    activate_update,
    simulate,
    threshold,
)
from .errors import *  # noqa: F401,F403
from .linguistic import (
    PLT,
    ExpertTally,
    LinguisticScale,
    RiskIndexWeights,
    compute_rpn,
    plt_defuzzify,
    plt_weighted_product,
    tally_to_plt,
    term_to_unit,
    unit_to_term,
)
from .model import CausalArc, RiskModel, RiskNode, Violation, adjacency, validate_model
from .modelfile import ModelDocument, load_model_file, parse_model_file, serialize_model
from .reporting import emit_trace_csv, parse_trace_csv, render_report

__version__ = "0.1.0"
