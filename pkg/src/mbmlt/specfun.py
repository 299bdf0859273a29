"""Special constants, Hermite functions, and the Hurst parameter function.

The Hurst function h maps [0, T] into (1/2, 1) and controls the pathwise
regularity of the process at each time.  Admissibility is checked on a dense
grid: the range condition (called A1 below) and, for truncated unregularized
local times, the bound sup h < (1+2N)/(2N+d) (called A2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gamma as _gamma

from .errors import AdmissibilityError

__all__ = [
    "normalizing_constant",
    "gamma_factor",
    "hermite_function",
    "HurstFunctional",
    "TruncationParams",
    "check_A2",
    "minimal_truncation",
]

#: grid size used for range/continuity validation of a Hurst function
VALIDATION_GRID = 10_001


def normalizing_constant(x: float) -> float:
    """C(x) = sqrt(2 pi / (Gamma(2x+1) sin(pi x))), defined for x in (0, 1)."""
    if not 0.0 < x < 1.0:
        raise ValueError(f"normalizing constant requires x in (0,1), got {x}")
    return math.sqrt(2.0 * math.pi / (_gamma(2.0 * x + 1.0) * math.sin(math.pi * x)))


def gamma_factor(H: float) -> float:
    """Convolution-kernel constant gamma(H) for the fractional operator.

    gamma(H) = sqrt(Gamma(2H+1) sin(pi H)) / (2 Gamma(H-1/2) cos(pi (H-1/2)/2)),
    defined for H in (1/2, 1); it vanishes as H -> 1/2+ (Gamma pole in the
    denominator).
    """
    if not 0.5 < H < 1.0:
        raise ValueError(f"gamma_factor requires H in (1/2,1), got {H}")
    num = math.sqrt(_gamma(2.0 * H + 1.0) * math.sin(math.pi * H))
    den = 2.0 * _gamma(H - 0.5) * math.cos(math.pi * (H - 0.5) / 2.0)
    return num / den


def hermite_function(k: int, x):
    """L2-orthonormal Hermite function h_k(x), by the stable recurrence.

    h_0(x) = pi^{-1/4} exp(-x^2/2),
    h_{k+1}(x) = sqrt(2/(k+1)) x h_k(x) - sqrt(k/(k+1)) h_{k-1}(x).

    Accepts scalars or arrays; returns 0 where the Gaussian factor underflows.
    """
    if k < 0:
        raise ValueError("Hermite index must be nonnegative")
    x = np.asarray(x, dtype=float)
    with np.errstate(under="ignore"):
        h_prev = np.zeros_like(x)
        h_cur = np.pi ** (-0.25) * np.exp(-0.5 * x * x)
        for j in range(k):
            h_next = math.sqrt(2.0 / (j + 1)) * x * h_cur - math.sqrt(j / (j + 1)) * h_prev
            h_prev, h_cur = h_cur, h_next
    if h_cur.ndim == 0:
        return float(h_cur)
    return h_cur


@dataclass(frozen=True)
class HurstFunctional:
    """The parameter function h: [0, T] -> (1/2, 1).

    Instances are validated on construction: the range condition is checked
    on a dense grid together with all later user-requested points, and a
    two-resolution continuity check guards against wildly discontinuous
    callables.
    """

    T: float
    eval: Callable[[float], float]
    description: str = ""
    _sup: float = field(init=False, repr=False, default=float("nan"))

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError(f"time horizon must be positive, got {self.T}")
        grid = np.linspace(0.0, self.T, VALIDATION_GRID)
        vals = self(grid)
        bad = (vals <= 0.5) | (vals >= 1.0)
        if np.any(bad):
            t_bad = grid[bad][0]
            raise AdmissibilityError(
                f"A1 violated: h({t_bad:g}) = {vals[bad][0]:g} outside (1/2, 1)"
            )
        # continuity proxy: max jump must shrink when the grid is refined
        coarse = np.max(np.abs(np.diff(vals[::2])))
        fine = np.max(np.abs(np.diff(vals)))
        if coarse > 1e-12 and fine > 0.75 * coarse:
            raise AdmissibilityError(
                "A1 violated: h does not look continuous (grid refinement "
                f"does not shrink jumps: {coarse:g} -> {fine:g})"
            )
        object.__setattr__(self, "_sup", float(np.max(vals)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12) or np.any(t > self.T + 1e-12):
            raise ValueError(f"t outside [0, {self.T}]")
        out = np.vectorize(self.eval, otypes=[float])(t)
        if np.any((out <= 0.5) | (out >= 1.0)):
            raise AdmissibilityError("A1 violated at a requested point")
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def sup(self) -> float:
        """Supremum of h over the validation grid."""
        return self._sup

    @property
    def is_constant(self) -> bool:
        probe = self(np.linspace(0.0, self.T, 257))
        return float(np.ptp(probe)) < 1e-14

    # -- standard parametrizations -------------------------------------------

    @classmethod
    def constant(cls, H: float, T: float = 1.0) -> "HurstFunctional":
        return cls(T=T, eval=lambda t, H=H: H, description=f"const {H:g}")

    @classmethod
    def linear(cls, a: float, b: float, T: float = 1.0) -> "HurstFunctional":
        return cls(T=T, eval=lambda t, a=a, b=b: a + b * t,
                   description=f"linear {a:g}+{b:g}t")

    @classmethod
    def sinusoidal(cls, a: float, b: float, omega: float, T: float = 1.0) -> "HurstFunctional":
        return cls(T=T, eval=lambda t, a=a, b=b, w=omega: a + b * math.sin(w * t),
                   description=f"sin {a:g}+{b:g}sin({omega:g}t)")

    @classmethod
    def from_config(cls, spec: dict, T: float = 1.0) -> "HurstFunctional":
        """Parse {"const": H} | {"linear": {"a","b"}} | {"sin": {"a","b","omega"}}."""
        if not isinstance(spec, dict) or len(spec) != 1:
            raise ValueError(f"bad hurst spec: {spec!r}")
        kind, params = next(iter(spec.items()))
        if kind == "const":
            return cls.constant(float(params), T=T)
        if kind == "linear":
            return cls.linear(float(params["a"]), float(params["b"]), T=T)
        if kind == "sin":
            return cls.sinusoidal(float(params["a"]), float(params["b"]),
                                  float(params["omega"]), T=T)
        raise ValueError(f"unknown hurst spec kind {kind!r}")


@dataclass(frozen=True)
class TruncationParams:
    """Truncation order N and dimension d for the truncated local time."""

    N: int
    d: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("truncation order must be nonnegative")
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def bound(self) -> float:
        """The admissible supremum (1+2N)/(2N+d) for the Hurst function."""
        return (1.0 + 2.0 * self.N) / (2.0 * self.N + self.d)


def check_A2(h: HurstFunctional, N: int, d: int) -> tuple[bool, dict]:
    """Check sup h < (1+2N)/(2N+d); return (ok, diagnostic).

    The diagnostic reports the supremum, the bound, and the minimal N that
    makes the condition hold for this dimension.
    """
    params = TruncationParams(N=N, d=d)
    ok = h.sup < params.bound
    return ok, {
        "sup_h": h.sup,
        "bound": params.bound,
        "N": N,
        "d": d,
        "minimal_N": minimal_truncation(h, d),
    }


def minimal_truncation(h: HurstFunctional, d: int, n_max: int = 10_000) -> int:
    """Smallest N with sup h < (1+2N)/(2N+d).

    The bound increases to 1 as N grows, and sup h < 1, so a solution always
    exists for d >= 1.
    """
    for N in range(n_max + 1):
        if h.sup < TruncationParams(N=N, d=d).bound:
            return N
    raise AdmissibilityError(f"no truncation order up to {n_max} admits sup h = {h.sup}")
