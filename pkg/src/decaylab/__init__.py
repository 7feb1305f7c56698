"""decaylab: numerical laboratory for decay rates of linear parabolic
problems on expanding or shrinking intervals.

The physical model is u_t = a (x^alpha u_x)_x on 0 < x < l(t) with
Dirichlet walls and a power-law boundary l(t) = L0 (1 + k t)^gamma.  The
package provides

* a finite-volume solver on the transformed fixed domain (`solver`),
* closed-form sup-norm and L2 decay envelopes with admissibility
  bookkeeping (`bounds`, `geometry`),
* two weighted eigenproblems whose modes generate exact separable
  solutions, solved both by a matrix pencil and by shooting
  (`spectral`, `shooting`),
* decay-tier classification and the predicted regime map (`stability`),
* a config-driven experiment harness and CLI (`config`, `runner`, `cli`).
"""

from .bounds import (
    BoundReport,
    BoundSpec,
    check_bound,
    evaluate_bound,
    l2_bound,
    master_bound_degenerate,
    master_bound_nondegenerate,
    regime_bound,
    regime_threshold,
)
from .config import (
    AnalysisConfig,
    ConfigError,
    ExperimentConfig,
    NumericsConfig,
    OutputConfig,
    ProblemConfig,
    canonical_text,
    config_hash,
    load_config,
    parse_config,
)
from .geometry import (
    BoundaryLaw,
    CoefficientSchedule,
    WeightFunction,
    admissible_epsilon,
    alpha_weight,
    beta_critical,
    beta_subcritical,
    boundary_length,
    critical_epsilon_cap,
    critical_law,
    gamma_critical,
    transformed_coefficients,
)
from .runner import (
    RunReport,
    SuiteResult,
    resolve_datum,
    run_eigen,
    run_solve,
    run_sweep,
    run_verify,
)
from .shooting import degenerate_eigenvalues, oracle_eigenvalues, selfsimilar_eigenvalues
from .solver import (
    Grid,
    ProblemSpec,
    SolverError,
    Trajectory,
    heat_kernel_solution,
    make_grid,
    regularize,
    solve_moving,
    step,
    time_points,
)
from .spectral import (
    EigenPair,
    EigenProblem,
    hardy_sides,
    make_eigen_grid,
    rayleigh_quotient,
    separable_solution,
    solve_eigen,
    weighted_gram,
)
from .stability import (
    DecayFit,
    DecayFloor,
    RegimePrediction,
    SweepCell,
    classify_decay,
    comparison_floor,
    predict_regime,
    regime_sweep,
)

__version__ = "1.0.0"

__all__ = [
    "AnalysisConfig", "BoundReport", "BoundSpec", "BoundaryLaw",
    "CoefficientSchedule", "ConfigError", "DecayFit", "DecayFloor",
    "EigenPair", "EigenProblem", "ExperimentConfig", "Grid",
    "NumericsConfig", "OutputConfig", "ProblemConfig", "ProblemSpec",
    "RegimePrediction", "RunReport", "SolverError", "SuiteResult",
    "SweepCell", "Trajectory", "WeightFunction", "admissible_epsilon",
    "alpha_weight", "beta_critical", "beta_subcritical", "boundary_length",
    "canonical_text", "check_bound", "classify_decay", "comparison_floor",
    "config_hash", "critical_epsilon_cap", "critical_law",
    "degenerate_eigenvalues", "evaluate_bound", "gamma_critical",
    "hardy_sides", "heat_kernel_solution", "l2_bound", "load_config",
    "make_eigen_grid", "make_grid", "master_bound_degenerate",
    "master_bound_nondegenerate", "oracle_eigenvalues", "parse_config",
    "predict_regime", "rayleigh_quotient", "regime_bound", "regime_sweep",
    "regime_threshold", "regularize", "resolve_datum", "run_eigen",
    "run_solve", "run_sweep", "run_verify", "selfsimilar_eigenvalues",
    "separable_solution", "solve_eigen", "solve_moving", "step",
    "time_points", "transformed_coefficients", "weighted_gram",
]
