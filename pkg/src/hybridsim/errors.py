"""Runtime error classification and rendering shared across the package.

Evaluation failures travel as `HybridError` exceptions inside a module and
are folded into outcome values at the semantics boundary; they never escape
the public evaluator interfaces.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field


class ErrorKind(enum.Enum):
    DIVISION_BY_ZERO = "DivisionByZero"
    DOMAIN_ERROR = "DomainError"
    UNINITIALIZED_VARIABLE = "UninitializedVariable"
    NON_LINEAR_ODE = "NonLinearODE"
    NEGATIVE_DURATION = "NegativeDuration"
    ARITY_ERROR = "ArityError"
    SOLVER_FAILURE = "SolverFailure"


@dataclass(frozen=True)
class ErrorInfo:
    """What failed, where in the source, and the environment at that point."""

    kind: ErrorKind
    message: str
    src: str
    line: int = 0
    col: int = 0
    env: dict = field(default_factory=dict, compare=False)

    def render(self) -> str:
        return f"Error: {self.message} at {self.line}:{self.col}"


class HybridError(Exception):
    """Carrier for an ErrorInfo raised by evaluators and the linearizer."""

    def __init__(self, info: ErrorInfo):
        super().__init__(info.render())
        self.info = info


def division_by_zero(src: str, line: int, col: int, env: dict) -> HybridError:
    msg = f"the divisor of the division '{src}' is zero"
    return HybridError(ErrorInfo(ErrorKind.DIVISION_BY_ZERO, msg, src, line, col, dict(env)))


def domain_error(src: str, line: int, col: int, env: dict) -> HybridError:
    msg = f"the expression '{src}' is undefined"
    return HybridError(ErrorInfo(ErrorKind.DOMAIN_ERROR, msg, src, line, col, dict(env)))


def uninitialized(name: str, src: str, line: int, col: int, env: dict) -> HybridError:
    msg = f"the variable '{name}' is not initialised"
    return HybridError(ErrorInfo(ErrorKind.UNINITIALIZED_VARIABLE, msg, src, line, col, dict(env)))


def non_linear_ode(src: str, line: int, col: int, env: dict) -> HybridError:
    msg = f"the ODEs contain non-linear expressions after de-sugaring: '{src}'"
    return HybridError(ErrorInfo(ErrorKind.NON_LINEAR_ODE, msg, src, line, col, dict(env)))


def negative_duration(src: str, line: int, col: int, env: dict) -> HybridError:
    msg = f"the duration '{src}' is negative"
    return HybridError(ErrorInfo(ErrorKind.NEGATIVE_DURATION, msg, src, line, col, dict(env)))


def arity_error(fn: str, want: str, got: int, src: str, line: int, col: int) -> HybridError:
    msg = f"the function '{fn}' expects {want} argument(s), got {got}"
    return HybridError(ErrorInfo(ErrorKind.ARITY_ERROR, msg, src, line, col, {}))


def solver_failure(src: str, line: int, col: int, env: dict) -> HybridError:
    msg = f"the solver failed on '{src}'"
    return HybridError(ErrorInfo(ErrorKind.SOLVER_FAILURE, msg, src, line, col, dict(env)))
