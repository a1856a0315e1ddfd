"""levisqueeze: conditional Gaussian dynamics of a monitored mechanical mode
under two-tone stiffness switching."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    NonConverged,
    NotHurwitz,
    Overdamped,
    SingularMatrix,
    SpectralRadiusGEOne,
    SqueezeError,
)
from .linalg import (
    Mat2,
    SymMat2,
    congruence,
    eigenvalues,
    gram,
    is_hurwitz,
    mat2_exp,
    solve_care,
    solve_discrete_lyapunov,
    solve_lyapunov,
    solve_riccati_dual,
    spectral_radius,
)
from .noise import (
    DynamicsCoefficients,
    NoiseBreakdown,
    PhysicalParams,
    build_matrices,
    coefficients,
    gas_damping,
    general_dyne_backaction,
    ground_state_variance,
    load_params,
    mean_occupation,
    noise_breakdown,
    photon_recoil_rate,
)
from .propagate import (
    GaussianState,
    PropagationResult,
    TrajectoryEnsemble,
    child_seed,
    conditional_mean_step,
    lyapunov_asymptote,
    lyapunov_propagate,
    lyapunov_propagate_info,
    riccati_asymptote,
    riccati_propagate,
    riccati_propagate_info,
    rk4_covariance,
    simulate_trajectories,
    write_trajectory_csv,
)
from .protocol import (
    DIVERGENT,
    CycleMap,
    ProtocolSchedule,
    SqueezeRates,
    build_schedule,
    classify_squeezing,
    cycle_map,
    protocol_asymptote,
    squeeze_rates,
    squeezing_ratio,
    unitary_cycle,
)
from .experiments import (
    Dataset,
    SweepSpec,
    dataset_filename,
    fig2_threshold,
    fig3_curves,
    fig4_experiment,
    plateau_squeezing,
    scenario_table,
    single_cycle_squeezing,
    write_dataset_csv,
    write_dataset_json,
)

__all__ = [
    "__version__",
    # errors
    "SqueezeError",
    "ConfigError",
    "NonConverged",
    "NotHurwitz",
    "Overdamped",
    "SingularMatrix",
    "SpectralRadiusGEOne",
    # linear algebra kernel
    "Mat2",
    "SymMat2",
    "congruence",
    "eigenvalues",
    "gram",
    "is_hurwitz",
    "mat2_exp",
    "solve_care",
    "solve_discrete_lyapunov",
    "solve_lyapunov",
    "solve_riccati_dual",
    "spectral_radius",
    # physical model
    "PhysicalParams",
    "DynamicsCoefficients",
    "NoiseBreakdown",
    "build_matrices",
    "coefficients",
    "gas_damping",
    "general_dyne_backaction",
    "ground_state_variance",
    "load_params",
    "mean_occupation",
    "noise_breakdown",
    "photon_recoil_rate",
    # propagation
    "GaussianState",
    "PropagationResult",
    "TrajectoryEnsemble",
    "child_seed",
    "conditional_mean_step",
    "lyapunov_asymptote",
    "lyapunov_propagate",
    "lyapunov_propagate_info",
    "riccati_asymptote",
    "riccati_propagate",
    "riccati_propagate_info",
    "rk4_covariance",
    "simulate_trajectories",
    "write_trajectory_csv",
    # two-frequency protocol
    "DIVERGENT",
    "CycleMap",
    "ProtocolSchedule",
    "SqueezeRates",
    "build_schedule",
    "classify_squeezing",
    "cycle_map",
    "protocol_asymptote",
    "squeeze_rates",
    "squeezing_ratio",
    "unitary_cycle",
    # datasets
    "Dataset",
    "SweepSpec",
    "dataset_filename",
    "fig2_threshold",
    "fig3_curves",
    "fig4_experiment",
    "plateau_squeezing",
    "scenario_table",
    "single_cycle_squeezing",
    "write_dataset_csv",
    "write_dataset_json",
]
