from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, UnboundError

# below this (gamma sigma0)^2 leaves the normal double range
MIN_GAMMA_SIGMA0 = 1e-150


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the oscillator.

    Mass profile m(x) = m0/(1+gamma x)^2 and potential m(x) omega0^2 x^2 / 2.
    gamma = 0 is the ordinary harmonic oscillator; every module branches on it
    and never touches `s` or `W_gamma` in that case.
    """

    m0: float = 1.0
    omega0: float = 1.0
    hbar: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("m0", "omega0", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}", name)
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise DomainError(f"gamma must be finite and >= 0, got {self.gamma!r}", "gamma")
        if 0.0 < self.gamma_sigma0 < MIN_GAMMA_SIGMA0:
            raise DomainError(f"gamma*sigma0 below {MIN_GAMMA_SIGMA0:g} underflows; use gamma = 0", "gamma")

    @classmethod
    def from_gamma_sigma0(cls, gamma_sigma0: float, m0=1.0, omega0=1.0, hbar=1.0):
        sigma0 = math.sqrt(hbar / (m0 * omega0))
        return cls(m0=m0, omega0=omega0, hbar=hbar, gamma=gamma_sigma0 / sigma0)

    @property
    def sigma0(self) -> float:
        return math.sqrt(self.hbar / (self.m0 * self.omega0))

    @property
    def gamma_sigma0(self) -> float:
        return self.gamma * self.sigma0

    @property
    def g(self) -> float:
        """(gamma sigma0)^2, the combination most formulas depend on."""
        return self.gamma_sigma0 ** 2

    @property
    def is_undeformed(self) -> bool:
        return self.gamma == 0.0

    @property
    def s(self) -> float:
        if self.is_undeformed:
            raise DomainError("s = 1/(gamma sigma0)^2 is undefined for gamma = 0", "gamma")
        return 1.0 / self.g

    @property
    def W_gamma(self) -> float:
        if self.is_undeformed:
            return math.inf
        return self.m0 * self.omega0 ** 2 / (2.0 * self.gamma ** 2)

    @property
    def wall(self) -> float:
        """Left edge of the physical domain (-inf when undeformed)."""
        return -math.inf if self.is_undeformed else -1.0 / self.gamma

    def require_bound_ground(self):
        # ground-state normalization needs Gamma(2s-1) finite
        if not self.is_undeformed and self.s <= 0.5:
            raise UnboundError(
                f"gamma*sigma0 = {self.gamma_sigma0:g} >= sqrt(2): no bound states", "gamma")

    def to_dict(self) -> dict:
        return {"m0": self.m0, "omega0": self.omega0, "hbar": self.hbar, "gamma": self.gamma}
