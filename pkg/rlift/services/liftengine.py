"""Successive approximation of the lift rho of an r-matrix.

The state at degree n knows rho modulo m^n. One step computes the defects alpha and
beta of the cabling identities in degree n, checks the cocycle conditions they must
satisfy, solves for the degree-n correction sigma and adds it.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any

from rlift.core.config import DEFAULT_LEGS, MIN_DEGREE
from rlift.core.models import AxiomReport, LieBialgebra
from rlift.core.settings import get_settings
from rlift.services.cbh import exp_operator, hamiltonian, star, star_all
from rlift.services.cohochschild import (
    CocycleConditionError,
    GradedCochain,
    cocycle_condition_residuals,
    solve_sigma,
)
from rlift.services.formalgroup import (
    AlgebraContext,
    TruncatedElement,
    build_context,
    random_element,
)
from rlift.services.liebialg import require_valid

logger = logging.getLogger(__name__)

Perturbation = Callable[[AlgebraContext, int], TruncatedElement]


class InternalInvariantError(Exception):
    """Raised when a step breaks an invariant that holds for every valid input."""

    pass


class LiftDegreeError(ValueError):
    """Raised when the requested truncation degree is too small."""

    pass


@dataclass(frozen=True)
class LiftStep:
    """Audit record of one extension step."""

    degree: int
    alpha: TruncatedElement
    beta: TruncatedElement
    sigma: TruncatedElement
    qt_residual_terms: int = 0

    def to_dict(self, records: bool = True) -> dict[str, Any]:
        """Serialize with term counts and, optionally, the records."""
        data: dict[str, Any] = {
            "degree": self.degree,
            "alpha_terms": len(self.alpha),
            "beta_terms": len(self.beta),
            "sigma_terms": len(self.sigma),
            "qt_residual_terms": self.qt_residual_terms,
        }
        if records:
            data["alpha"] = self.alpha.records()
            data["beta"] = self.beta.records()
            data["sigma"] = self.sigma.records()
        return data


@dataclass(frozen=True)
class LiftState:
    """rho modulo m^degree, stored at the context cap with zeros above."""

    context: AlgebraContext
    degree: int
    rho: TruncatedElement
    audit: tuple[LiftStep, ...] = field(default=())

    @property
    def cap(self) -> int:
        """Truncation degree of the context."""
        return self.context.cap

    @property
    def complete(self) -> bool:
        """True once rho is known modulo m^{cap+1}."""
        return self.degree > self.context.cap


def r_element(context: AlgebraContext) -> TruncatedElement:
    """r as the two-leg element sum r[i][j] x_i (x) x_j."""
    return context.from_tensor(context.bialgebra.r)


def initial_lift(
    L: LieBialgebra,
    N: int = MIN_DEGREE,
    *,
    context: AlgebraContext | None = None,
    validate: bool = True,
) -> LiftState:
    """rho_3 = r, the state at degree 3.

    Args:
        L: The Lie bialgebra
        N: Truncation degree of the context built when ``context`` is not given
        context: An existing context for L
        validate: Run the input gate first

    Raises:
        ValidationFailedError: If ``validate`` and the gate fails
    """
    if validate:
        require_valid(L)
    if context is None:
        context = build_context(
            L, DEFAULT_LEGS, N, cross_check_degree=get_settings().cross_check_degree
        )
    return LiftState(context=context, degree=3, rho=r_element(context))


def _section(state: LiftState, perturbation: TruncatedElement | None) -> TruncatedElement:
    rho = state.rho.truncate(state.degree)
    if perturbation is not None:
        rho = rho + perturbation.truncate(state.degree).graded_component(state.degree)
    return rho


def _cabling_defects(rho: TruncatedElement) -> tuple[TruncatedElement, TruncatedElement]:
    context = rho.context
    rho13 = context.insert(rho, (1, 3), 3)
    rho23 = context.insert(rho, (2, 3), 3)
    rho12 = context.insert(rho, (1, 2), 3)
    alpha = context.coproduct_on_leg(rho, 1) - star(rho13, rho23)
    beta = context.coproduct_on_leg(rho, 2) - star(rho13, rho12)
    return alpha, beta


def defects(
    state: LiftState, perturbation: TruncatedElement | None = None
) -> tuple[TruncatedElement, TruncatedElement]:
    """alpha = (Delta (x) id) rho~ - rho~13 * rho~23 and beta = (id (x) Delta) rho~ - rho~13 * rho~12.

    rho~ is rho_n with degree n filled by ``perturbation`` (zero by default); both
    defects are computed modulo m^{n+1}.

    Raises:
        InternalInvariantError: If a defect is not homogeneous of degree n or has a
            nonzero leg counit
    """
    n = state.degree
    rho = _section(state, perturbation)
    alpha, beta = _cabling_defects(rho)
    context = state.context
    for name, defect in (("alpha", alpha), ("beta", beta)):
        if defect.filtration_degree() < n:
            raise InternalInvariantError(
                f"{name} has terms below degree {n} (filtration {defect.filtration_degree()})"
            )
        for leg in (1, 2, 3):
            if not context.counit_on_leg(defect, leg).is_zero():
                raise InternalInvariantError(f"{name} has a nonzero counit on leg {leg}")
    return alpha, beta


def qt_identity_residual(rho: TruncatedElement) -> TruncatedElement:
    """rho^{1,2} * rho^{12,3} - rho^{21,3} * rho^{1,2} on three legs."""
    context = rho.context
    rho12 = context.insert(rho, (1, 2), 3)
    split = context.coproduct_on_leg(rho, 1)
    split_op = context.insert(split, (2, 1, 3), 3)
    return star(rho12, split) - star(split_op, rho12)


def extend(
    state: LiftState,
    perturbation: TruncatedElement | None = None,
    *,
    verify: bool = True,
    keep_audit: bool = True,
) -> LiftState:
    """One step n -> n + 1: rho_{n+1} = rho~_n + sigma.

    Raises:
        CocycleConditionError: If the defects violate the cocycle conditions
        InternalInvariantError: If a postcondition fails
    """
    n = state.degree
    if state.complete:
        raise InternalInvariantError(f"State at degree {n} is already complete")
    alpha, beta = defects(state, perturbation)
    residuals = cocycle_condition_residuals(alpha, beta)
    counts = {name: len(residual) for name, residual in residuals.items()}
    logger.info(f"Degree {n}: |alpha|={len(alpha)} |beta|={len(beta)} cocycle residuals {counts}")
    failed = {name: residual for name, residual in residuals.items() if not residual.is_zero()}
    if failed:
        raise CocycleConditionError(
            f"Degree {n} defects violate {', '.join(sorted(failed))}", failed
        )

    sigma = solve_sigma(GradedCochain(alpha, n), GradedCochain(beta, n), n).element
    section = _section(state, perturbation)
    rho_next = (section + sigma).with_cap(state.cap)

    qt_terms = 0
    if keep_audit or verify:
        qt_terms = len(qt_identity_residual(section))

    if verify:
        if qt_terms:
            raise InternalInvariantError(
                f"QT identity fails modulo m^{n + 1}: {qt_terms} residual terms"
            )
        low = rho_next.truncate(n)
        left, right = _cabling_defects(low)
        if not (left.is_zero() and right.is_zero()):
            raise InternalInvariantError(
                f"Cabling identities fail after step {n}: {len(left)} + {len(right)} residual terms"
            )
        if rho_next.truncate(n - 1) != state.rho.truncate(n - 1):
            raise InternalInvariantError(f"Step {n} changed coefficients below degree {n}")

    audit = state.audit
    if keep_audit:
        audit = audit + (LiftStep(n, alpha, beta, sigma, qt_terms),)
    logger.info(f"Extended lift to degree {n + 1}: sigma has {len(sigma)} terms")
    return replace(state, degree=n + 1, rho=rho_next, audit=audit)


def random_perturbation(context: AlgebraContext, n: int, rng: random.Random) -> TruncatedElement:
    """Random degree-n two-leg element with vanishing leg counits."""
    return random_element(
        context, 2, rng, min_degree=n, max_degree=n, density=0.5, vanishing_counits=True
    )


def seeded_perturbation(seed: int) -> Perturbation:
    """Perturbation callback drawing from ``random.Random(seed)``."""
    rng = random.Random(seed)

    def perturb(context: AlgebraContext, n: int) -> TruncatedElement:
        return random_perturbation(context, n, rng)

    return perturb


def construct_lift(
    L: LieBialgebra,
    N: int,
    *,
    context: AlgebraContext | None = None,
    validate: bool = True,
    perturbation: Perturbation | None = None,
    verify: bool | None = None,
    keep_audit: bool | None = None,
) -> LiftState:
    """Iterate ``extend`` from rho_3 = r until rho is known modulo m^{N+1}.

    Args:
        L: The Lie bialgebra
        N: Truncation degree (at least 3)
        context: An existing context of cap N
        validate: Run the input gate first
        perturbation: Callback giving a degree-n section change for each step
        verify: Check the per-step postconditions (settings default)
        keep_audit: Keep the per-step audit trail (settings default)

    Returns:
        The complete state; ``state.rho`` is the lift

    Raises:
        LiftDegreeError: If N < 3 or the context cap differs from N
    """
    if N < MIN_DEGREE:
        raise LiftDegreeError(f"Truncation degree must be at least {MIN_DEGREE}, got {N}")
    if context is not None and context.cap != N:
        raise LiftDegreeError(f"Context cap {context.cap} does not match N={N}")
    settings = get_settings()
    verify = settings.verify_steps if verify is None else verify
    keep_audit = settings.keep_audit if keep_audit is None else keep_audit

    state = initial_lift(L, N, context=context, validate=validate)
    while not state.complete:
        tau = perturbation(state.context, state.degree) if perturbation is not None else None
        state = extend(state, tau, verify=verify, keep_audit=keep_audit)
    logger.info(f"Constructed lift mod m^{N + 1}: {len(state.rho)} terms")
    return state


def check_lift_axioms(rho: TruncatedElement) -> AxiomReport:
    """Exact residuals of the lift axioms at the cap of rho.

    * ``alpha``: both leg counits
    * ``beta``: Delta^op(x) - exp(V_rho)(Delta(x)) on every generator
    * ``gamma.left`` / ``gamma.right``: the two cabling identities
    * ``delta``: degree-2 part minus r
    """
    context = rho.context
    report = AxiomReport(subject="lift")
    report.add("alpha", context.counit_on_leg(rho, 1))
    report.add("alpha", context.counit_on_leg(rho, 2))

    braiding = exp_operator(hamiltonian(rho))
    for x in context.generators(1):
        x = x.truncate(rho.cap)
        report.add(
            "beta",
            context.opposite_coproduct_on_leg(x, 1) - braiding.apply(context.coproduct_on_leg(x, 1)),
        )

    left, right = _cabling_defects(rho)
    report.add("gamma.left", left)
    report.add("gamma.right", right)
    report.add("delta", rho.graded_component(2) - r_element(context))
    logger.info(f"Lift axioms: failures={report.failures()}")
    return report


def qt_defect(rho: TruncatedElement) -> TruncatedElement:
    """psi = rho12 * rho13 * rho23 - rho23 * rho13 * rho12.

    Raises:
        PreconditionError: If rho is not in m^2
    """
    context = rho.context
    rho12 = context.insert(rho, (1, 2), 3)
    rho13 = context.insert(rho, (1, 3), 3)
    rho23 = context.insert(rho, (2, 3), 3)
    return star_all([rho12, rho13, rho23]) - star_all([rho23, rho13, rho12])
