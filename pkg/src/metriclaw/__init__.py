"""metriclaw: continuous-logic evaluation and seeded Monte Carlo experiments
on random finite metric spaces of diameter at most 1."""

from .analysis import (
    BadEventSpec,
    ExperimentReport,
    check_ratio_inequality,
    estimate_lambda_A,
    experiment_cor_2_3,
    experiment_fact_cs,
    experiment_theorem_2_2,
    experiment_zero_one,
    per_subset_bound,
    union_bound,
    wilson_interval,
)
from .efgame import extension_responder, extract_strategy, player_II_wins, solve_game
from .errors import (
    FormulaParseError,
    GameBudgetError,
    InvalidSpaceError,
    MetricLawError,
    RejectionBudgetError,
    ResourceLimitError,
    UnboundVariableError,
)
from .indexing import pair_index
from .kernels import backend_name
from .logic import (
    AxiomTask,
    build_conf,
    build_extension_axiom,
    build_phi_geq_half,
    eval_formula,
    eval_on_dvec,
    format_formula,
    parse_formula,
)
from .models import (
    AxiomFamily,
    GridSpec,
    build_circulant,
    build_random_class_C,
    build_random_grid,
    enumerate_grid_tasks,
    estimate_sigma_AS,
    verify_axioms,
)
from .sampling import (
    DeltaSchedule,
    SamplerConfig,
    generator,
    hit_and_run_chain,
    sample_cube,
    sample_D_n,
    sample_M_n_hitandrun,
    sample_M_n_rejection,
    sample_S_like,
)
from .spaces import (
    DistanceVector,
    FiniteMetricSpace,
    OnePointExtension,
    conf,
    in_class_C,
    in_D_n,
    is_metric,
    load_space,
    save_space,
)

__version__ = "0.1.0"
