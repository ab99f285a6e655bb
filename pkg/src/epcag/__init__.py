"""Bounded solutions of quasilinear systems with piecewise constant
arguments driven by discrete-map orbits.

The pipeline: certify a decay envelope for the linear part, build a
node/argument schedule, wrap the nonlinearity in a declared-constant
contract, generate a driver orbit of the discrete map, assemble and
check the system, solve for the unique bounded solution, and certify
that map-level homoclinic/heteroclinic/hyperbolic structure carries
over to the solutions.
"""

from .analysis import (
    ConnectionCertificate,
    DecayCertificate,
    TransferEntry,
    TransferReport,
    certify_connection,
    difference_profile,
    fit_decay_rate,
    unstable_gap_bound,
    verify_hyperbolic_transfer,
)
from .driver import (
    LOWER_BRANCH,
    UPPER_BRANCH,
    DriverOrbit,
    ScalarMap,
    build_orbit,
    logistic_inverse,
    logistic_map,
    logistic_step,
    pair_orbits,
    sequence_gap_profile,
)
from .errors import (
    AssumptionFailureError,
    BadFractionError,
    BadStepError,
    BranchEscapeError,
    ContractViolatedError,
    DegenerateTailError,
    DimensionMismatchError,
    EnvelopeRequiredError,
    EpcagError,
    GridMismatchError,
    HorizonTooShortError,
    InnerDivergenceError,
    IoError,
    NoConvergenceError,
    NonFiniteError,
    NotHurwitzError,
    OrbitCoverageError,
    OutOfDomainError,
    OutOfRangeError,
    OverflowRiskError,
    PadTooSmallError,
    ParseError,
    PremiseFailureError,
    RangeMismatchError,
    ValidationError,
)
from .cli import main
from .io import (
    RunSpec,
    certificate_dict,
    export_frozen_csv,
    export_orbit_csv,
    export_trajectory_csv,
    parse_config,
    run,
    serialize_config,
)
from .linear import (
    DecayEnvelope,
    EnvelopeValidation,
    estimate_decay_envelope,
    mat_exp,
    sample_norm_curve,
    spectral_abscissa,
    validate_envelope,
)
from .nonlinearity import (
    NonlinearityContract,
    custom_contract,
    eval_many,
    example_contract,
    zero_contract,
)
from .reference import (
    REFERENCE_N,
    REFERENCE_OMEGA,
    REFERENCE_RATE,
    ReferenceScenario,
    heteroclinic_scenario,
    homoclinic_scenario,
    reference_contract,
    reference_envelope,
    reference_matrix,
    reference_schedule,
    transfer_catalog,
)
from .schedule import Located, Schedule, locate, make_schedule
from .solver import (
    SampledTrajectory,
    contraction_margin,
    default_pad,
    residual_defect,
    solution_bound,
    solve_bounded,
    step_interval,
)
from .system import (
    AssumptionReport,
    EpcagSystem,
    ProofConstants,
    assemble_system,
    check_assumptions,
    map_supremum,
    proof_constants,
)

__version__ = "0.1.0"
