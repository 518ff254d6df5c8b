"""Exception types shared across the library."""


class SingularSystemError(RuntimeError):
    """A least-squares system is rank deficient and has no unique solution."""


class DegenerateCoverageError(RuntimeError):
    """No fuzzy rule fires for a sample, so normalized firing strengths are undefined."""


class TrainingDivergedError(RuntimeError):
    """A training loop's error exploded past the divergence guard."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")
