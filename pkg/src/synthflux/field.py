"""Space-time periodic effective field seen by the driven three-level atom.

The dressing scheme produces an effective field with components

    B1(t, x) = alpha * cos(k x) * cos(omega_t t)
    B2(t, x) = alpha * sin(k x) * sin(omega_t t)
    B3(t, x) = gamma + nu * cos(omega_t t)

where omega_t is the drive frequency (written ``omega_tilde`` in code).  The
field is periodic in time with period T = 2 pi / omega_tilde and in space
with wavelength lam = 2 pi / k, and every topological quantity in this
package is an integral over one unit cell [0, T) x [0, lam).

hbar = 1 throughout the package.

The field only vanishes when |gamma / nu| is exactly 0 or 1 (for alpha > 0),
which is where the topological phase transitions sit.  ``min_gap`` probes
for such closures on a discrete cell grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldParams",
    "BVector",
    "b_components",
    "db_dt",
    "db_dx",
    "b_magnitude",
    "sample_B",
    "sample_B_derivatives",
    "min_gap",
]


@dataclass(frozen=True)
class FieldParams:
    """Parameters of the effective field, with the defaults used throughout.

    ``gamma / nu`` is the control ratio that selects the topological phase;
    the defaults sit in the middle of the nontrivial phase.
    """

    alpha: float = 1.0
    nu: float = 1.0
    gamma: float = 0.5
    omega_tilde: float = 1.0
    k: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "nu", "gamma", "omega_tilde", "k"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if self.omega_tilde <= 0:
            raise ValueError("omega_tilde must be > 0")
        if self.k <= 0:
            raise ValueError("k must be > 0")

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega_tilde

    @property
    def wavelength(self) -> float:
        return 2.0 * np.pi / self.k

    @property
    def cell_area(self) -> float:
        """Area T * lam of one space-time unit cell."""
        return self.period * self.wavelength

    @property
    def degeneracy_threshold(self) -> float:
        """|B| at or below this value counts as a band touching.

        Scaled by alpha so the test is meaningful for rescaled fields; it is
        also triggered by alpha = 0 (then any |B| = 0 point is caught by the
        comparison being <=).
        """
        return 1e-12 * self.alpha

    def is_gapped(self, n_grid: int = 256) -> bool:
        """Whether the field stays clear of zero on an ``n_grid`` x ``n_grid``
        sampling of the unit cell."""
        return min_gap(self, n_grid) > self.degeneracy_threshold


@dataclass(frozen=True)
class BVector:
    """One field sample, components in the fixed frame basis (B1, B2, B3)."""

    b1: float
    b2: float
    b3: float

    def __post_init__(self) -> None:
        for name in ("b1", "b2", "b3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def magnitude(self) -> float:
        return math.hypot(self.b1, self.b2, self.b3)

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3], dtype=float)


def b_components(params: FieldParams, t, x) -> np.ndarray:
    """Field components on arbitrary (broadcastable) t, x arrays.

    Returns an array of shape (3,) + broadcast(t, x).shape with the component
    index leading, which is the layout every grid routine in the package
    consumes.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    ct = np.cos(params.omega_tilde * t)
    st = np.sin(params.omega_tilde * t)
    cx = np.cos(params.k * x)
    sx = np.sin(params.k * x)
    b1 = params.alpha * cx * ct
    b2 = params.alpha * sx * st
    b3 = params.gamma + params.nu * ct
    return np.stack(np.broadcast_arrays(b1, b2, b3))


def db_dt(params: FieldParams, t, x) -> np.ndarray:
    """Analytic time derivative of the field, same layout as b_components."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    w = params.omega_tilde
    ct = np.cos(w * t)
    st = np.sin(w * t)
    cx = np.cos(params.k * x)
    sx = np.sin(params.k * x)
    d1 = -params.alpha * w * cx * st
    d2 = params.alpha * w * sx * ct
    d3 = -params.nu * w * st
    return np.stack(np.broadcast_arrays(d1, d2, d3))


def db_dx(params: FieldParams, t, x) -> np.ndarray:
    """Analytic space derivative of the field, same layout as b_components."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    kk = params.k
    ct = np.cos(params.omega_tilde * t)
    st = np.sin(params.omega_tilde * t)
    cx = np.cos(kk * x)
    sx = np.sin(kk * x)
    d1 = -params.alpha * kk * sx * ct
    d2 = params.alpha * kk * cx * st
    d3 = np.zeros(())
    return np.stack(np.broadcast_arrays(d1, d2, d3))


def b_magnitude(params: FieldParams, t, x) -> np.ndarray:
    """|B| on arbitrary (broadcastable) t, x arrays."""
    b = b_components(params, t, x)
    return np.sqrt(np.einsum("c...,c...->...", b, b))


def sample_B(params: FieldParams, t: float, x: float) -> BVector:
    """Single field sample at one space-time point."""
    b = b_components(params, float(t), float(x))
    return BVector(float(b[0]), float(b[1]), float(b[2]))


def sample_B_derivatives(params: FieldParams, t: float, x: float) -> tuple[BVector, BVector]:
    """Analytic (dB/dt, dB/dx) at one space-time point.

    These close under the same trig identities as the field itself, so they
    are exact rather than finite-differenced.
    """
    bt = db_dt(params, float(t), float(x))
    bx = db_dx(params, float(t), float(x))
    return (
        BVector(float(bt[0]), float(bt[1]), float(bt[2])),
        BVector(float(bx[0]), float(bx[1]), float(bx[2])),
    )


def min_gap(params: FieldParams, n_grid: int = 256) -> float:
    """Minimum |B| over an endpoint-exclusive n_grid x n_grid cell grid.

    The grid nodes are i * T / n and j * lam / n, which for n divisible by 4
    land exactly on the field zeros at gamma / nu in {0, +1, -1}, so closures
    on the phase boundaries are detected rather than straddled.
    """
    if n_grid < 16:
        raise ValueError("n_grid must be >= 16")
    t = np.arange(n_grid) * (params.period / n_grid)
    x = np.arange(n_grid) * (params.wavelength / n_grid)
    mag = b_magnitude(params, t[:, None], x[None, :])
    return float(mag.min())
