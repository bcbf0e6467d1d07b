"""Quantum-integer arithmetic at a root of unity.

All downstream computation (dimensions, cells, residuals) is driven by the
q-numbers ``[n] = sin(n*pi/kappa) / sin(pi/kappa)`` for an altitude ``kappa``,
evaluated either in binary64 or, for higher working precision, in mpmath.
The classical limit q = 1 is modelled as ``altitude = INFINITY`` and gives
``[n] = n`` exactly, so classical checks run through the same code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

INFINITY = math.inf

#: Precisions up to this many digits use the float backend; above it, mpmath.
_FLOAT_DIGITS = 16


class WeightOutsideAlcove(ValueError):
    """Weight (k, l) violates k + l <= kappa - 3."""


@dataclass(frozen=True)
class RootOfUnityContext:
    """Altitude kappa (q = exp(i*pi/kappa)), working precision and tolerance.

    Parameters
    ----------
    altitude : int or INFINITY
        kappa = level + 3 for a finite root of unity, or INFINITY for the
        classical limit q = 1.
    precision : int
        Working precision in decimal digits.  The default 15 selects the
        binary64 backend; larger values switch q-number evaluation to mpmath.
    tolerance : float
        Verification tolerance used by equality/residual checks downstream.
    """

    altitude: float
    precision: int = 15
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.altitude is not INFINITY:
            if self.altitude != int(self.altitude) or self.altitude < 4:
                raise ValueError(f"altitude must be an integer >= 4 or INFINITY, got {self.altitude!r}")
            object.__setattr__(self, "altitude", int(self.altitude))
        if self.precision < 15:
            raise ValueError("precision must be at least 15 digits")

    @property
    def classical(self) -> bool:
        return self.altitude is INFINITY

    @property
    def level(self):
        return INFINITY if self.classical else self.altitude - 3

    @property
    def uses_mpmath(self) -> bool:
        return self.precision > _FLOAT_DIGITS


def qint(n, ctx: RootOfUnityContext):
    """q-integer [n] = sin(n*pi/kappa)/sin(pi/kappa); equals n classically.

    Total for n >= 0.  [1] = 1 and [kappa] = 0 exactly up to the backend's
    rounding; [n] = [kappa - n] by reflection at the alcove wall.
    """
    if n < 0:
        raise ValueError("qint requires n >= 0")
    if ctx.classical:
        return mpmath.mpf(n) if ctx.uses_mpmath else float(n)
    if ctx.uses_mpmath:
        with mpmath.workdps(ctx.precision):
            pi_over_k = mpmath.pi / ctx.altitude
            return mpmath.sin(n * pi_over_k) / mpmath.sin(pi_over_k)
    return math.sin(n * math.pi / ctx.altitude) / math.sin(math.pi / ctx.altitude)


def qdim_weight(k: int, l: int, ctx: RootOfUnityContext):
    """Quantum dimension [k+1][l+1][k+l+2]/[2] of the weight (k, l)."""
    if k < 0 or l < 0:
        raise ValueError("weight components must be non-negative")
    if not ctx.classical and k + l > ctx.altitude - 3:
        raise WeightOutsideAlcove(f"weight ({k},{l}) outside alcove at altitude {ctx.altitude}")
    return qint(k + 1, ctx) * qint(l + 1, ctx) * qint(k + l + 2, ctx) / qint(2, ctx)


def with_precision(ctx: RootOfUnityContext, digits: int) -> RootOfUnityContext:
    """Same altitude and tolerance, new working precision (>= 15 digits)."""
    return RootOfUnityContext(ctx.altitude, precision=digits, tolerance=ctx.tolerance)
