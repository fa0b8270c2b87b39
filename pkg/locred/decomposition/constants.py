import math
from typing import Optional

from pydantic import BaseModel, model_validator

from locred.base.exceptions import ConfigError
from locred.decomposition.partition_of_unity import PartitionOfUnity
from locred.decomposition.subdomains import DomainDecomposition
from locred.fem.fields import CoefficientField

# Friedrichs constant plugged in for the unit square
DEFAULT_C_F = 1.0 / (math.sqrt(2.0) * math.pi)


class TheoryConstants(BaseModel):
    """Constants of the a priori estimate ||u - u_{n+1}||_a <= c ||u - u_n||_a."""
    model_config = {"frozen": True}

    c_f: Optional[float] = None
    contrast: Optional[float] = None
    J: Optional[int] = None
    max_grad_sq: Optional[float] = None
    max_val_sq: Optional[float] = None
    cpu_sq_bound: float
    N_D: int
    c: float
    one_minus_c: float

    @model_validator(mode="after")
    def _check_rate(self):
        if not 0 <= self.c < 1:
            raise ValueError(f"contraction factor must lie in [0, 1), got {self.c}")
        if abs(self.one_minus_c - (1 - self.c)) > 4 * 2.0 ** -52:
            raise ValueError("one_minus_c inconsistent with c")
        return self


def cpu_upper_bound(J: int, c_f: float, contrast: float, max_grad_sq: float, max_val_sq: float) -> float:
    """2 J (c_f kappa_max/kappa_min max|grad rho|^2 + max|rho|^2)"""
    if J < 1 or c_f <= 0 or contrast <= 0 or max_grad_sq < 0 or max_val_sq <= 0:
        raise ConfigError("cpu_upper_bound needs J >= 1, positive c_f, contrast, max_val_sq and max_grad_sq >= 0")
    return 2 * J * (c_f * contrast * max_grad_sq + max_val_sq)


def rate_bound(cpu_sq: float, N_D: int, **known) -> TheoryConstants:
    """c = sqrt(1 - 1 / (N_D c_pu^2)); 1 - c evaluated without cancellation."""
    if N_D < 1:
        raise ConfigError(f"N_D must be at least 1, got {N_D}")
    x = 1.0 / (N_D * cpu_sq) if cpu_sq > 0 else math.inf
    if x > 1:
        raise ConfigError(f"c_pu^2 * N_D = {cpu_sq * N_D} < 1 gives no real contraction factor")
    root = math.sqrt(1.0 - x)
    return TheoryConstants(cpu_sq_bound=cpu_sq, N_D=N_D, c=root, one_minus_c=x / (1.0 + root), **known)


def theory_constants(dd: DomainDecomposition, pu: PartitionOfUnity, kappa: CoefficientField,
                     c_f: float = DEFAULT_C_F) -> TheoryConstants:
    contrast = kappa.contrast
    cpu_sq = cpu_upper_bound(dd.J, c_f, contrast, pu.max_grad_sq, pu.max_val_sq)
    return rate_bound(cpu_sq, dd.N_D, c_f=c_f, contrast=contrast, J=dd.J,
                      max_grad_sq=pu.max_grad_sq, max_val_sq=pu.max_val_sq)
