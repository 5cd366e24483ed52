"""Spectral classification and numerical bifurcation analysis of the
constant-scalar-curvature equation along the canonical variation of a
Riemannian submersion.

The exact layer (`spectra`, `variation`) enumerates degeneracy instants,
Morse indices, and bifurcation certificates in rational arithmetic; the
numerical layer (`galerkin`, `continuation`) discretizes two-factor
products, follows the bifurcating branches, and checks that they stay
constant along the fibers.  `cli` exposes the whole pipeline on config
files.
"""

from .errors import (
    ConfigurationError,
    CscbifError,
    DegeneratePointError,
    EmptyBranchError,
    HypothesisViolatedError,
    IncompleteSpectrumError,
    InconclusiveError,
    InvalidArgumentError,
    NoConvergenceError,
    NondiscreteDegeneracyError,
    NoNontrivialSolutionError,
    NotApplicableError,
    PositivityViolationError,
    PreconditionError,
    ReductionFailedError,
    UndefinedFractionError,
    UnsupportedGeometryError,
    ZeroScalarCurvatureError,
)
from .spectra import (
    EigenvalueEntry,
    ManifoldDescriptor,
    contains,
    count_strictly_below,
    explicit_manifold,
    explicit_spectrum,
    first_nonzero,
    product_spectrum,
    sphere_manifold,
    sphere_spectrum,
)
from .variation import (
    ALL_PAIRS,
    BifurcationCertificate,
    ClassificationReport,
    DegeneracyInstant,
    ExplicitJoint,
    JointPair,
    SubmersionFamily,
    b_sequence,
    certify_bifurcation,
    check_nondiscreteness,
    classify_window,
    degeneracy_roots,
    enumerate_degeneracy,
    enumerate_horizontal_degeneracy,
    morse_index,
    scalar_curvature,
    stability_epsilon,
    total_spectrum_at_one,
)
from .galerkin import (
    GalerkinModel,
    State,
    build_model,
    constant_state,
    energy,
    fiber_energy_fraction,
    linearization_at_one,
    residual,
)
from .continuation import (
    Branch,
    BranchPoint,
    FiberConstancyReport,
    ReductionResult,
    continue_branch,
    detect_branch_points,
    lyapunov_schmidt_reduce,
    newton_solve,
    switch_branch,
    verify_fiber_constancy,
)

__version__ = "0.1.0"
