class DimensionError(ValueError):
    """Operand shapes do not fit together."""


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(PreconditionError):
    """The input sits on the measure-zero set where a construction breaks down."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class ConfigError(ValueError):
    """Invalid experiment configuration; ``fields`` names the offenders."""

    def __init__(self, problems):
        self.problems = dict(problems)
        self.fields = sorted(self.problems)
        detail = "; ".join(f"{k}: {v}" for k, v in sorted(self.problems.items()))
        super().__init__(f"invalid experiment config: {detail}")
