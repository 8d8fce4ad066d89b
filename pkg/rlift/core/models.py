"""Core data models for rlift."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any

from rlift.core.config import DEFAULT_DEGREE, EMIT_KINDS, MAX_DEGREE, MIN_DEGREE

if TYPE_CHECKING:
    from rlift.services.formalgroup import TruncatedElement

Tensor2 = tuple[tuple[Fraction, ...], ...]
Tensor3 = tuple[tuple[tuple[Fraction, ...], ...], ...]
SparseTensor = dict[tuple[int, ...], Fraction]


class ValidationMode(Enum):
    """How the input gate is applied before construction."""

    STRICT = "strict"  # Jacobi, co-Jacobi, cocycle, CYBE and invariance must hold
    SKIP = "skip"  # construct without checking hypotheses


class EmitKind(Enum):
    """Artifacts a job can write."""

    LIFT = "lift"
    BRAIDING = "braiding"
    REPORT = "report"
    AUDIT = "audit"


class OutputFormat(Enum):
    """Serialization format of the artifact document."""

    JSON = "json"
    YAML = "yaml"


class JobConfigError(ValueError):
    """Raised when a job configuration is invalid."""

    pass


def zero_tensor2(dim: int) -> Tensor2:
    """Zero d x d tensor."""
    return tuple(tuple(Fraction(0) for _ in range(dim)) for _ in range(dim))


def zero_tensor3(dim: int) -> Tensor3:
    """Zero d x d x d tensor."""
    return tuple(zero_tensor2(dim) for _ in range(dim))


@dataclass
class LieBialgebra:
    """A finite-dimensional Lie algebra with an r-matrix.

    ``bracket[i][j][k]`` is the coefficient of e_k in [e_i, e_j] and ``r[i][j]`` the
    coefficient of e_i (x) e_j in r. The cobracket is derived from r on first use and
    cached in ``cobracket`` (``cobracket[k][i][j]`` is the coefficient of e_i (x) e_j
    in delta(e_k)).
    """

    dim: int
    bracket: Tensor3
    r: Tensor2
    basis_names: tuple[str, ...] = ()
    cobracket: Tensor3 | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        """Fill default basis names."""
        if not self.basis_names:
            self.basis_names = tuple(f"e{i + 1}" for i in range(self.dim))

    @property
    def is_abelian(self) -> bool:
        """True when every structure constant vanishes."""
        return all(c == 0 for plane in self.bracket for row in plane for c in row)

    @classmethod
    def from_sparse(
        cls,
        dim: int,
        bracket: dict[tuple[int, int, int], Fraction | int],
        r: dict[tuple[int, int], Fraction | int],
        basis_names: tuple[str, ...] = (),
    ) -> LieBialgebra:
        """Build from 0-based sparse entries, completing [e_j, e_i] = -[e_i, e_j]."""
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j, k), value in bracket.items():
            c[i][j][k] = Fraction(value)
            c[j][i][k] = -Fraction(value)
        rm = [[Fraction(0)] * dim for _ in range(dim)]
        for (i, j), value in r.items():
            rm[i][j] = Fraction(value)
        return cls(
            dim=dim,
            bracket=tuple(tuple(tuple(row) for row in plane) for plane in c),
            r=tuple(tuple(row) for row in rm),
            basis_names=basis_names,
        )


@dataclass
class DualLieAlgebra:
    """The Lie algebra g* on the dual basis.

    ``bracket_star[i][j][k]`` is the coefficient of xi_k in [xi_i, xi_j].
    """

    dim: int
    bracket_star: Tensor3


@dataclass
class ValidationReport:
    """Exact residual tensors of the input gate, keyed by check name."""

    residuals: dict[str, SparseTensor] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True when every residual tensor is identically zero."""
        return not any(self.residuals.values())

    def failures(self) -> list[str]:
        """Names of the checks with a nonzero residual."""
        return [name for name, residual in self.residuals.items() if residual]

    def to_dict(self) -> dict[str, Any]:
        """Serialize to per-check entry counts and pass flags."""
        return {
            name: {"nonzero_entries": len(residual), "passed": not residual}
            for name, residual in self.residuals.items()
        }


@dataclass
class AxiomReport:
    """Per-axiom exact residual elements.

    An axiom passes iff every residual element recorded for it is identically zero.
    """

    subject: str
    residuals: dict[str, list[TruncatedElement]] = field(default_factory=dict)

    def add(self, axiom: str, residual: TruncatedElement) -> None:
        """Record one residual element under ``axiom``."""
        self.residuals.setdefault(axiom, []).append(residual)

    def axiom_passed(self, axiom: str) -> bool:
        """Pass flag of one axiom."""
        return all(element.is_zero() for element in self.residuals.get(axiom, []))

    def term_count(self, axiom: str) -> int:
        """Number of nonzero terms left in the residuals of one axiom."""
        return sum(len(element) for element in self.residuals.get(axiom, []))

    @property
    def passed(self) -> bool:
        """True when every axiom passed."""
        return all(self.axiom_passed(axiom) for axiom in self.residuals)

    def failures(self) -> list[str]:
        """Names of failing axioms."""
        return [axiom for axiom in self.residuals if not self.axiom_passed(axiom)]

    def to_dict(self) -> dict[str, Any]:
        """Serialize to per-axiom term counts and pass flags."""
        return {
            "subject": self.subject,
            "passed": self.passed,
            "axioms": {
                axiom: {"residual_terms": self.term_count(axiom), "passed": self.axiom_passed(axiom)}
                for axiom in sorted(self.residuals)
            },
        }


@dataclass
class JobConfig:
    """Configuration of one pipeline run."""

    input_path: Path
    degree: int = DEFAULT_DEGREE
    emit: frozenset[EmitKind] = frozenset({EmitKind.LIFT, EmitKind.REPORT})
    validation: ValidationMode = ValidationMode.STRICT
    out: Path | None = None
    output_format: OutputFormat = OutputFormat.JSON
    seed_check: int | None = None

    def __post_init__(self) -> None:
        """Validate the truncation degree and the emit set."""
        if not MIN_DEGREE <= self.degree <= MAX_DEGREE:
            raise JobConfigError(
                f"Truncation degree must be between {MIN_DEGREE} and {MAX_DEGREE}, got {self.degree}"
            )
        if not self.emit:
            raise JobConfigError("Nothing to emit: the emit set is empty")

    @classmethod
    def from_options(
        cls,
        input_path: str | Path,
        degree: int = DEFAULT_DEGREE,
        emit: str = "lift,report",
        skip_validation: bool = False,
        out: str | Path | None = None,
        output_format: str = "json",
        seed_check: int | None = None,
    ) -> JobConfig:
        """Build a config from command line strings.

        Raises:
            JobConfigError: On unknown emit kinds or output formats
        """
        kinds = [part.strip() for part in emit.split(",") if part.strip()]
        unknown = [kind for kind in kinds if kind not in EMIT_KINDS]
        if unknown:
            raise JobConfigError(
                f"Unknown emit kind(s): {', '.join(unknown)} (choose from {', '.join(EMIT_KINDS)})"
            )
        try:
            fmt = OutputFormat(output_format)
        except ValueError:
            raise JobConfigError(f"Unknown output format: {output_format}")
        return cls(
            input_path=Path(input_path),
            degree=degree,
            emit=frozenset(EmitKind(kind) for kind in kinds),
            validation=ValidationMode.SKIP if skip_validation else ValidationMode.STRICT,
            out=Path(out) if out is not None else None,
            output_format=fmt,
            seed_check=seed_check,
        )

    def wants(self, kind: EmitKind) -> bool:
        """Whether an artifact kind was requested."""
        return kind in self.emit
