"""Loss-tolerant graph codes: decoding, fusion, and architecture analysis."""

from .pauli import (
    BASIS_A,
    BASIS_FUSION,
    BASIS_X,
    BASIS_Y,
    BASIS_Z,
    Basis,
    MeasurementPattern,
    PauliOperator,
    PauliSpan,
    commutes_qubitwise,
)
from .graphs import (
    Graph,
    canonical_form,
    canonical_key,
    graph_state_generators,
    lc_orbit,
    local_complement,
    orbit_key,
)
from .codes import (
    GraphCode,
    InvalidCodeError,
    branched_chain_code,
    cube_code,
    decorated_pentagon_code,
    pentagon_code,
    shor_22_code,
    star_code,
    tree_code,
    tree_progenitor,
)
from .opsets import (
    EXHAUSTIVE_LIMIT,
    OperatorSet,
    ResourceLimitError,
    enumerate_nontrivial,
    spc_satisfied,
    stabilizer_group,
)
from .polynomials import (
    LossPolynomial,
    break_even,
    equivalent_univariate,
)
from .losstree import (
    DecisionTree,
    MCResult,
    build_arbitrary_tree,
    build_pauli_tree,
    decode,
    load_or_build,
    monte_carlo_decode,
    optimal_success,
    success_polynomial,
    total_polynomial,
)
from .errordecode import (
    ErrorAnalysis,
    ErrorModel,
    error_threshold,
    fault_probability,
    logical_flip_rates,
    physical_fault,
)
from .fusion import (
    AdaptiveFusionAnalysis,
    FusionModel,
    LogicalFusionResult,
    adaptive_fusion,
    best_boosted,
    boosted_baseline,
    transversal_fusion,
)
from .modular import (
    LayerStack,
    StackResult,
    TransmissionVector,
    build_cascade_code,
    cascade_transmission,
    concat_transmission,
    fixed_point_threshold,
    logical_transmission,
    optimize_stack,
    stack_flip_rates,
)
from .apps import (
    FbqcSpec,
    RepeaterSpec,
    end_to_end,
    fbqc_loss_threshold,
    rgs_link_probability,
)
from .search import (
    Objective,
    ScoredCandidate,
    SearchResult,
    enumerate_candidates,
    evaluate_objective,
    optimize,
    unrooted_representatives,
)

__version__ = "0.1.0"
