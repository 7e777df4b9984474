"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Invalid tunnel geometry (degenerate or out of range)."""


class DomainError(ValueError):
    """Evaluation requested outside the solution domain."""


class ConfigError(ValueError):
    """Malformed or out-of-range run configuration."""


class LinearSolveError(RuntimeError):
    """Dense solve failed or the matrix is too ill-conditioned to trust.

    The 2-norm condition estimate (may be ``inf``) is attached as ``cond``.
    """

    def __init__(self, message, cond=float("nan")):
        super().__init__(message)
        self.cond = cond


class ConvergenceError(RuntimeError):
    """Iteration failed to reach the stop threshold within the rep cap.

    ``history`` holds max|increment| per rep for post-mortem inspection.
    """

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)
