"""Exception hierarchy shared by all assouadlab modules."""


class AssouadLabError(Exception):
    """Base class for all library errors."""


class InvalidInputError(AssouadLabError):
    """An argument violates a documented precondition."""


class SpecError(AssouadLabError):
    """A model/experiment spec file failed to parse or validate."""


class ScaleError(AssouadLabError):
    """A requested scale is not resolvable at the grid resolution."""


class InvalidScheduleError(AssouadLabError):
    """A run schedule is malformed (overlaps, wrong ordering)."""


class InfeasibleScheduleError(AssouadLabError):
    """A carpet splice schedule cannot be realised; carries the stage index."""

    def __init__(self, stage: int, message: str):
        super().__init__(f"schedule stage {stage}: {message}")
        self.stage = stage


class InsufficientPrefixError(AssouadLabError):
    """A word prefix is too short; carries the length that would suffice."""

    def __init__(self, needed: int, message: str = ""):
        super().__init__(message or f"word prefix too short, need length >= {needed}")
        self.needed = needed


class NotApplicableError(AssouadLabError):
    """A formula's hypotheses are not met (e.g. subcritical percolation)."""


class RetriesExhaustedError(AssouadLabError):
    """Conditioned sampling gave up after the retry budget."""

    def __init__(self, retries: int, survival_probability: float):
        super().__init__(
            f"no surviving realisation in {retries} attempts "
            f"(theoretical non-extinction probability {survival_probability:.3g})"
        )
        self.retries = retries
        self.survival_probability = survival_probability
