"""Single numerical tolerance policy shared by the whole toolkit."""

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Central thresholds; every module reads its defaults from here.

    unitarity   -- max-entry norm of U†U - I accepted as unitary
    hermiticity -- max-entry norm of H - H† accepted as Hermitian
    rank        -- eigenvalues at or below this count as zero
    equality    -- default tolerance for value comparisons and verdicts
    """

    unitarity: float = 1e-10
    hermiticity: float = 1e-10
    rank: float = 1e-10
    equality: float = 1e-9

    def __post_init__(self) -> None:
        for name, value in dataclasses.asdict(self).items():
            if not value > 0:
                raise ValueError(f"tolerance {name!r} must be positive, got {value}")

    def replace(self, **overrides: float) -> "Tolerances":
        return dataclasses.replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()
