"""Model parameters and the a-priori feasibility box.

The certified configuration is c = 4.506, x_max = 56, eps = 1e-15, for which
the tightened feasibility constants are available.  Any other density in
[3, 5] falls back to the generic a-priori intervals for the clause-type
proportions (gamma1, gamma2, gamma3) and the nonzero spread psi, shifted
outward by the accuracy transfers 3*R3 / 9*R3 / 6*R3 / R3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import ledger
from .distribution import check_x_max
from .errors import ConfigurationError
from .ledger import FeasibleBox

#: Documented comparison slack, always applied in the pessimistic direction.
DELTA_NUM = 1e-9

#: Generic a-priori intervals valid for every density in [3, 5].
GENERIC_GAMMA_PSI = {
    "gamma1": (0.21, 0.65),
    "gamma2": (0.21, 0.65),
    "gamma3": (0.017, 0.32),
    "psi": (0.47, 0.68),
}

#: Tightened feasibility constants for the certified density 4.506.
CERTIFICATION_BOX = FeasibleBox(
    beta1_min=0.33018, beta1_max=0.52891,
    beta2_min=0.33018, beta2_max=0.52891,
    beta3_min=0.077639, beta3_max=0.21782,
    phi_min=0.525245, phi_max=0.619063,
)

CERTIFICATION_C = 4.506
CERTIFICATION_X_MAX = 56
CERTIFICATION_EPS = 1e-15


@dataclass(frozen=True)
class ModelParams:
    """Clause density, truncation degree, accuracy radius, and derived bounds."""

    c: float
    x_max: int = CERTIFICATION_X_MAX
    epsilon: float = CERTIFICATION_EPS
    c_min: float | None = None
    c_max: float | None = None
    a_priori: FeasibleBox = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        c_min = self.c if self.c_min is None else self.c_min
        c_max = self.c if self.c_max is None else self.c_max
        object.__setattr__(self, "c_min", c_min)
        object.__setattr__(self, "c_max", c_max)
        if not (3.0 <= c_min <= self.c <= c_max <= 5.0):
            raise ConfigurationError(
                f"density range must satisfy 3 <= c_min <= c <= c_max <= 5, "
                f"got c_min={c_min}, c={self.c}, c_max={c_max}"
            )
        if self.epsilon < 0 or self.epsilon > 1e-6:
            raise ConfigurationError(f"epsilon out of range (0, 1e-6]: {self.epsilon}")
        check_x_max(self.x_max, 3.0 * c_min, 3.0 * c_max)
        if self.a_priori is None:
            object.__setattr__(self, "a_priori", self._default_box())

    def _default_box(self) -> FeasibleBox:
        if self.c_min == self.c_max == CERTIFICATION_C:
            return CERTIFICATION_BOX
        r3 = ledger.r3(self.epsilon, self.x_max, self.lam_min, self.lam_max)
        return ledger.widen_intervals(GENERIC_GAMMA_PSI, r3)

    @property
    def lam(self) -> float:
        return 3.0 * self.c

    @property
    def lam_min(self) -> float:
        return 3.0 * self.c_min

    @property
    def lam_max(self) -> float:
        return 3.0 * self.c_max

    @property
    def is_certification(self) -> bool:
        return (
            self.c_min == self.c_max == CERTIFICATION_C
            and self.x_max == CERTIFICATION_X_MAX
            and self.epsilon == CERTIFICATION_EPS
        )

    @classmethod
    def certification(cls) -> "ModelParams":
        return cls(c=CERTIFICATION_C, x_max=CERTIFICATION_X_MAX, epsilon=CERTIFICATION_EPS)

    def lambda_phi_min(self) -> float:
        return self.lam * self.a_priori.phi_min

    def as_dict(self) -> dict:
        return {
            "c": self.c,
            "lambda": self.lam,
            "x_max": self.x_max,
            "epsilon": self.epsilon,
            "c_min": self.c_min,
            "c_max": self.c_max,
            "a_priori": self.a_priori.as_dict(),
        }


def clause_count(n: int, c: float) -> int:
    """Number of clauses m = round(c*n), half up."""
    return int(math.floor(c * n + 0.5))
