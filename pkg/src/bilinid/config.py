"""Default tolerances, collected in one place."""
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = 1e-8
    fail_tol: float = 1e-6
    pass_tol: float = 1e-3
    orbit_radius: float = 0.1
    recovery_tol: float = 1e-6

    def to_dict(self):
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()

# exhaustive support enumeration up to this many candidates, sampled beyond
SUPPORT_BUDGET = 10_000
