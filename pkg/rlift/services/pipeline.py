"""End-to-end job: validate, construct the lift, build the braiding, verify, serialize."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

from rlift.core.config import EXIT_AXIOM_FAILURE, EXIT_INPUT_ERROR, EXIT_INTERNAL_ERROR, EXIT_OK
from rlift.core.documents import (
    InputFormatError,
    element_records,
    generator_key,
    load_bialgebra,
    serialize_bialgebra,
)
from rlift.core.models import AxiomReport, EmitKind, JobConfig, JobConfigError, LieBialgebra, ValidationMode
from rlift.core.settings import get_settings
from rlift.services.braiding import (
    BraidingOperator,
    braiding_difference,
    braiding_from_lift,
    check_braiding_axioms,
    wx_agreement,
)
from rlift.services.cbh import PreconditionError
from rlift.services.cohochschild import CochainDegreeError, CocycleConditionError
from rlift.services.formalgroup import ContextError, ConventionMismatchError, build_context
from rlift.services.liebialg import LieBialgebraError, ValidationFailedError, validation_gate
from rlift.services.liftengine import (
    InternalInvariantError,
    LiftDegreeError,
    LiftState,
    check_lift_axioms,
    construct_lift,
    qt_defect,
    qt_identity_residual,
    seeded_perturbation,
)
from rlift.utils.paths import PathValidationError, validate_input_path

logger = logging.getLogger(__name__)

INPUT_ERRORS = (
    InputFormatError,
    PathValidationError,
    LieBialgebraError,
    JobConfigError,
    LiftDegreeError,
)
INTERNAL_ERRORS = (
    InternalInvariantError,
    CocycleConditionError,
    ConventionMismatchError,
    CochainDegreeError,
    PreconditionError,
    ContextError,
)


class PipelineError(Exception):
    """A stage failed; carries the exit code and the failing checks."""

    def __init__(self, stage: str, exit_code: int, message: str, failed: list[str] | None = None):
        self.stage = stage
        self.exit_code = exit_code
        self.failed = failed or []
        super().__init__(message)

    def to_dict(self) -> dict[str, Any]:
        """Structured error report."""
        return {
            "status": "error",
            "stage": self.stage,
            "exit_code": self.exit_code,
            "failed": self.failed,
            "message": str(self),
        }


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Translate library errors raised inside a stage into a PipelineError."""
    try:
        yield
    except ValidationFailedError as e:
        raise PipelineError(name, EXIT_INPUT_ERROR, str(e), e.report.failures()) from e
    except CocycleConditionError as e:
        raise PipelineError(name, EXIT_INTERNAL_ERROR, str(e), sorted(e.residuals)) from e
    except INPUT_ERRORS as e:
        raise PipelineError(name, EXIT_INPUT_ERROR, str(e)) from e
    except INTERNAL_ERRORS as e:
        raise PipelineError(name, EXIT_INTERNAL_ERROR, str(e)) from e


@dataclass
class JobResult:
    """Outcome of one run: exit code, reports and the artifact document."""

    config: JobConfig
    reports: list[AxiomReport] = field(default_factory=list)
    document: dict[str, Any] = field(default_factory=dict)
    seed_check_passed: bool | None = None

    @property
    def passed(self) -> bool:
        """True when every report and the seed check passed."""
        return all(report.passed for report in self.reports) and self.seed_check_passed is not False

    @property
    def exit_code(self) -> int:
        """Process exit code."""
        return EXIT_OK if self.passed else EXIT_AXIOM_FAILURE

    def failures(self) -> list[str]:
        """Failing checks as ``subject.axiom`` names."""
        names = [f"{report.subject}.{axiom}" for report in self.reports for axiom in report.failures()]
        if self.seed_check_passed is False:
            names.append("seed_check")
        return names


def _qt_report(rho_state: LiftState) -> AxiomReport:
    report = AxiomReport(subject="qt")
    report.add("psi", qt_defect(rho_state.rho))
    report.add("identity", qt_identity_residual(rho_state.rho))
    return report


def _braiding_document(braiding: BraidingOperator) -> dict[str, Any]:
    return {
        generator_key(i + 1, leg): element_records(image)
        for (i, leg), image in sorted(braiding.images().items(), key=lambda kv: (kv[0][1], kv[0][0]))
    }


def _seed_check(
    L: LieBialgebra, state: LiftState, seed: int, braiding: BraidingOperator | None
) -> dict[str, Any]:
    perturbed = construct_lift(
        L,
        state.context.cap,
        context=state.context,
        validate=False,
        perturbation=seeded_perturbation(seed),
        keep_audit=False,
    )
    rho_equal = perturbed.rho == state.rho
    result: dict[str, Any] = {"seed": seed, "rho_equal": rho_equal}
    if braiding is not None:
        difference = braiding_difference(braiding_from_lift(perturbed.rho), braiding)
        result["braiding_equal"] = difference.is_zero
    result["passed"] = rho_equal and result.get("braiding_equal", True)
    logger.info(f"Seed check with seed {seed}: passed={result['passed']}")
    return result


def run_job(config: JobConfig) -> JobResult:
    """Execute the pipeline for one input document.

    Raises:
        PipelineError: If a stage fails before the reports are complete
    """
    result = JobResult(config=config)
    settings = get_settings()

    with stage("input"):
        path = validate_input_path(config.input_path)
        L = load_bialgebra(path)

    with stage("validate"):
        if config.validation is ValidationMode.STRICT:
            gate = validation_gate(L)
            if not gate.passed:
                raise ValidationFailedError(gate)

    with stage("context"):
        context = build_context(L, N=config.degree, cross_check_degree=settings.cross_check_degree)

    with stage("lift"):
        state = construct_lift(L, config.degree, context=context, validate=False)

    with stage("lift_axioms"):
        result.reports.append(check_lift_axioms(state.rho))
        result.reports.append(_qt_report(state))

    braiding: BraidingOperator | None = None
    if config.wants(EmitKind.BRAIDING) or config.wants(EmitKind.REPORT):
        with stage("braiding"):
            braiding = braiding_from_lift(state.rho)
            result.reports.append(check_braiding_axioms(braiding))
            result.reports.append(wx_agreement(braiding))

    seed_report: dict[str, Any] | None = None
    if config.seed_check is not None:
        with stage("seed_check"):
            seed_report = _seed_check(L, state, config.seed_check, braiding)
            result.seed_check_passed = bool(seed_report["passed"])

    document: dict[str, Any] = {
        "status": "ok" if result.passed else "failed",
        "degree": config.degree,
        "input": serialize_bialgebra(L),
    }
    if config.wants(EmitKind.LIFT):
        document["lift"] = element_records(state.rho)
    if config.wants(EmitKind.BRAIDING) and braiding is not None:
        document["braiding"] = _braiding_document(braiding)
    if config.wants(EmitKind.REPORT):
        document["report"] = {report.subject: report.to_dict() for report in result.reports}
        if seed_report is not None:
            document["report"]["seed_check"] = seed_report
        document["report"]["failed"] = result.failures()
    if config.wants(EmitKind.AUDIT):
        document["audit"] = [step.to_dict() for step in state.audit]
    result.document = document
    logger.info(f"Job finished with exit code {result.exit_code}")
    return result
