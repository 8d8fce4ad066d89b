"""Services module for rlift - bialgebra data, formal groups, lifts and braidings."""

from rlift.services.braiding import (
    BraidingDifference,
    BraidingOperator,
    braiding_difference,
    braiding_from_lift,
    check_braiding_axioms,
    quasi_derivation_defect,
    wx_agreement,
    wx_second_order,
)
from rlift.services.cbh import (
    PreconditionError,
    TruncatedOperator,
    exp_operator,
    hamiltonian,
    star,
)
from rlift.services.cohochschild import (
    CocycleConditionError,
    GradedCochain,
    cohochschild_d,
    cohomology_check,
    d2,
    solve_sigma,
)
from rlift.services.formalgroup import (
    AlgebraContext,
    ConventionMismatchError,
    TruncatedElement,
    build_context,
)
from rlift.services.liebialg import (
    LieBialgebraError,
    NotALieBialgebraError,
    StructuralInputError,
    ValidationFailedError,
    cybe_residual,
    validate_bialgebra,
    validation_gate,
)
from rlift.services.liftengine import (
    InternalInvariantError,
    LiftState,
    check_lift_axioms,
    construct_lift,
    defects,
    extend,
    initial_lift,
    qt_defect,
)
from rlift.services.pipeline import JobResult, PipelineError, run_job

__all__ = [
    # Lie bialgebras
    "validate_bialgebra",
    "validation_gate",
    "cybe_residual",
    "LieBialgebraError",
    "StructuralInputError",
    "NotALieBialgebraError",
    "ValidationFailedError",
    # Formal group
    "AlgebraContext",
    "TruncatedElement",
    "build_context",
    "ConventionMismatchError",
    # CBH product and operators
    "star",
    "hamiltonian",
    "exp_operator",
    "TruncatedOperator",
    "PreconditionError",
    # Co-Hochschild complex
    "GradedCochain",
    "cohochschild_d",
    "d2",
    "solve_sigma",
    "cohomology_check",
    "CocycleConditionError",
    # Lift
    "LiftState",
    "initial_lift",
    "defects",
    "extend",
    "construct_lift",
    "check_lift_axioms",
    "qt_defect",
    "InternalInvariantError",
    # Braiding
    "BraidingOperator",
    "BraidingDifference",
    "braiding_from_lift",
    "check_braiding_axioms",
    "wx_second_order",
    "wx_agreement",
    "braiding_difference",
    "quasi_derivation_defect",
    # Pipeline
    "run_job",
    "JobResult",
    "PipelineError",
]
