"""Model manifolds with a prescribed Ricci lower bound.

Only constant-curvature models are provided: flat space and hyperbolic
space of sectional curvature kappa < 0. They realize the curvature
hypothesis Ric >= -K g with equality (K = (n-1)|kappa|), which makes them
the tightest available test geometry. For radial functions the
Laplace-Beltrami operator reduces to u'' + drift(r) u' with
drift = (n-1) f'(r)/f(r) for the warp f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["ManifoldModel", "make_model", "drift", "warp"]


@dataclass(frozen=True)
class ManifoldModel:
    """Dimension n and constant sectional curvature kappa <= 0."""

    n: int
    kappa: float

    @property
    def K(self) -> float:
        """Ricci lower-bound constant: Ric = -(n-1)|kappa| g exactly."""
        return (self.n - 1) * abs(self.kappa)

    @property
    def kind(self) -> int:
        """0 flat, 1 hyperbolic; matches the integrator's geometry switch."""
        return 0 if self.kappa == 0.0 else 1

    @property
    def sqrt_abs_kappa(self) -> float:
        return math.sqrt(abs(self.kappa))


def make_model(n: int, kappa: float = 0.0) -> ManifoldModel:
    """Build a model; kappa > 0 (closed geometry) is rejected."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    kappa = float(kappa)
    if kappa > 0.0 or not math.isfinite(kappa):
        raise ValueError(f"curvature must be <= 0, got {kappa!r}")
    return ManifoldModel(n=n, kappa=kappa)


def warp(m: ManifoldModel, r: float) -> float:
    """Warp function: r when flat, sinh(sqrt|kappa| r)/sqrt|kappa| otherwise."""
    if m.kappa == 0.0:
        return r
    sq = m.sqrt_abs_kappa
    return math.sinh(sq * r) / sq


def drift(m: ManifoldModel, r: float) -> float:
    """Radial first-order coefficient (n-1) f'(r)/f(r); requires r > 0.

    The hyperbolic coth goes through expm1 so small arguments do not
    cancel: coth(x) = 1 + 2/(e^{2x} - 1).
    """
    if r <= 0.0:
        raise ValueError(f"drift needs r > 0, got {r!r}")
    nm1 = m.n - 1
    if m.kappa == 0.0:
        return nm1 / r
    sq = m.sqrt_abs_kappa
    return nm1 * sq * (1.0 + 2.0 / math.expm1(2.0 * sq * r))
