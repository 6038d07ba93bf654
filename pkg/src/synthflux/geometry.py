"""Band geometry of the dressed atom: synthetic field, metric, forces.

With hbar = 1 and the field B(t, x) of :mod:`synthflux.field`, the top
dressed band of the spin-1 atom carries

  * a synthetic electric field
        E(t, x) = B . (dB/dx x dB/dt) / |B|^3
    equal to the Berry curvature of the band over the (t, x) plane,

  * a quantum metric component
        g11(t, x) = sum_{l != top} |<top| dM/dx |l>|^2 / (e_l - e_top)^2,

  * an effective potential V_eff = g11 / (2 mass) + e_top,

and the semiclassical equation of motion for the atom position reads

    mass * d2x/dt2 = E - d(e_top)/dx - (1 / (2 mass)) d(g11)/dx.

``force_components`` evaluates the three right-hand-side terms.  The flux
of E through one space-time unit cell is 2 pi times an integer; the lattice
route to that integer lives in :mod:`synthflux.topology` and builds on
``plaquette_curvature`` below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePointError, ZeroOverlapError
from .field import FieldParams, b_components, db_dt, db_dx
from .spin import HermitianField, eigensystem_at

__all__ = [
    "ForceSample",
    "ForceGrid",
    "electric_field",
    "four_point_phase",
    "plaquette_curvature",
    "quantum_metric_g11",
    "metric_g11_top",
    "effective_potential",
    "force_components",
    "force_grid",
]

# Link overlaps of neighbouring band states on a sane grid are close to 1;
# anything at this scale means the grid straddles a near-degeneracy.
_MIN_OVERLAP = 1e-6


@dataclass(frozen=True)
class ForceSample:
    """Right-hand side of the equation of motion at one point.

    ``total = e_field + grad_eps + grad_metric`` where grad_eps is the force
    -d(e_top)/dx from the band energy and grad_metric is the force
    -(1 / (2 mass)) d(g11)/dx from the metric part of V_eff.
    """

    t: float
    x: float
    e_field: float
    grad_eps: float
    grad_metric: float
    total: float


@dataclass(frozen=True)
class ForceGrid:
    """Array-valued counterpart of ForceSample, same field meanings."""

    t: np.ndarray
    x: np.ndarray
    e_field: np.ndarray
    grad_eps: np.ndarray
    grad_metric: np.ndarray
    total: np.ndarray


def _checked_field(params: FieldParams, t, x) -> tuple[np.ndarray, np.ndarray]:
    """Field components and magnitudes, rejecting degenerate samples."""
    b = b_components(params, t, x)
    mag = np.sqrt(np.einsum("c...,c...->...", b, b))
    if np.any(mag <= params.degeneracy_threshold):
        raise DegeneratePointError(
            f"gap closure: min |B| = {float(np.min(mag)):.3e} reaches the "
            "degeneracy threshold"
        )
    return b, mag


def electric_field(params: FieldParams, t, x) -> np.ndarray:
    """Synthetic electric field E = B . (dB/dx x dB/dt) / |B|^3.

    Broadcasts over t and x.  The sign convention pairs with the plaquette
    orientation used in ``plaquette_curvature`` and makes the unit-cell flux
    of the default parameters equal +4 (times 2 pi).

    Raises:
        DegeneratePointError: if any requested sample has |B| at the
            degeneracy threshold.
    """
    b, mag = _checked_field(params, t, x)
    bt = db_dt(params, t, x)
    bx = db_dx(params, t, x)
    triple = np.einsum("c...,c...->...", b, np.cross(bx, bt, axis=0))
    return triple / mag**3


def four_point_phase(states: Sequence[np.ndarray], min_overlap: float = _MIN_OVERLAP) -> float:
    """Gauge-invariant phase of a closed four-point overlap loop.

    Args:
        states: four normalized vectors (s0, s1, s2, s3) around the loop.
        min_overlap: link moduli at or below this raise, the loop phase is
            meaningless when a link nearly vanishes.

    Returns:
        -arg(<s0|s1> <s1|s2> <s2|s3> <s3|s0>), in (-pi, pi].

    Raises:
        ZeroOverlapError: on a vanishing link (grid too coarse).
    """
    if len(states) != 4:
        raise ValueError("need exactly four states")
    prod = 1.0 + 0.0j
    for a, bb in zip(states, (*states[1:], states[0])):
        link = complex(np.vdot(a, bb))
        if abs(link) <= min_overlap:
            raise ZeroOverlapError(f"link overlap modulus {abs(link):.3e}")
        prod *= link
    return float(-np.angle(prod))


def plaquette_curvature(
    field: HermitianField, m: float, corners: Sequence[tuple[float, float]]
) -> float:
    """Discrete Berry flux of band m through one four-cornered (t, x) loop.

    Args:
        field: spin representation plus field parameters.
        m: band label.
        corners: four (t, x) points in loop order.  For a grid cell use
            (t, x), (t + dt, x), (t + dt, x + dx), (t, x + dx): with that
            orientation the phase of a small plaquette tends to
            E(center) * dt * dx for the top spin-1 band.

    Gauge invariant by construction: any per-corner phase redefinition
    cancels between the two links touching that corner.
    """
    if len(corners) != 4:
        raise ValueError("need exactly four corners")
    col = field.band_index_to_column(m)
    states = [eigensystem_at(field, tc, xc)[col].state for tc, xc in corners]
    return four_point_phase(states)


def quantum_metric_g11(field: HermitianField, t: float, x: float, m: float | None = None) -> float:
    """Spatial quantum metric of band m by the perturbative sum over bands.

    Args:
        field: spin representation plus field parameters.
        t, x: evaluation point.
        m: band label; defaults to the top band m = J.

    Returns:
        g11 = sum_{l != m} |<m| dM/dx |l>|^2 / (e_l - e_m)^2.
    """
    if m is None:
        m = field.rep.j
    col = field.band_index_to_column(m)
    bands = eigensystem_at(field, t, x)
    bx = db_dx(field.params, float(t), float(x))
    dm_dx = bx[0] * field.rep.j1 + bx[1] * field.rep.j2 + bx[2] * field.rep.j3
    target = bands[col]
    g = 0.0
    for other in bands:
        if other is target:
            continue
        amp = np.vdot(target.state, dm_dx @ other.state)
        g += abs(amp) ** 2 / (other.energy - target.energy) ** 2
    return float(g)


def metric_g11_top(params: FieldParams, t, x) -> np.ndarray:
    """g11 of the top spin-1 band in closed form, broadcasting over t, x.

    For the top band the perturbative sum collapses to half the squared
    angular speed of the field direction,

        g11 = (|B|^2 |dB/dx|^2 - (B . dB/dx)^2) / (2 |B|^4),

    which equals ``quantum_metric_g11`` on the spin-1 top band to rounding
    error and is cheap enough for trajectory integration.
    """
    b, mag = _checked_field(params, t, x)
    bx = db_dx(params, t, x)
    bx_sq = np.einsum("c...,c...->...", bx, bx)
    b_dot_bx = np.einsum("c...,c...->...", b, bx)
    mag_sq = mag * mag
    return (mag_sq * bx_sq - b_dot_bx**2) / (2.0 * mag_sq * mag_sq)


def effective_potential(params: FieldParams, t, x, mass: float) -> np.ndarray:
    """V_eff = g11 / (2 mass) + e_top for the top spin-1 band.

    Broadcasts over t and x.  The band energy is e_top = |B|.
    """
    if mass <= 0:
        raise ValueError("mass must be > 0")
    _, mag = _checked_field(params, t, x)
    return metric_g11_top(params, t, x) / (2.0 * mass) + mag


def _grad_eps_force(params: FieldParams, t, x) -> np.ndarray:
    """Band-energy force -d(e_top)/dx = -(B . dB/dx) / |B|."""
    b, mag = _checked_field(params, t, x)
    bx = db_dx(params, t, x)
    return -np.einsum("c...,c...->...", b, bx) / mag


def _grad_metric_force(params: FieldParams, t, x, mass: float) -> np.ndarray:
    """Metric force -(1 / (2 mass)) d(g11)/dx by Richardson-extrapolated
    central differences.

    The base step is h = wavelength * 1e-5; one Richardson level combines
    steps h and h / 2 to cancel the leading O(h^2) error.
    """
    h = params.wavelength * 1e-5
    x = np.asarray(x, dtype=float)
    d_h = (metric_g11_top(params, t, x + h) - metric_g11_top(params, t, x - h)) / (2.0 * h)
    d_h2 = (metric_g11_top(params, t, x + h / 2) - metric_g11_top(params, t, x - h / 2)) / h
    dg_dx = (4.0 * d_h2 - d_h) / 3.0
    return -dg_dx / (2.0 * mass)


def force_grid(params: FieldParams, t, x, mass: float) -> ForceGrid:
    """All equation-of-motion force terms on broadcastable t, x arrays."""
    if mass <= 0:
        raise ValueError("mass must be > 0")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    e = electric_field(params, t, x)
    ge = _grad_eps_force(params, t, x)
    gm = _grad_metric_force(params, t, x, mass)
    return ForceGrid(t=t, x=x, e_field=e, grad_eps=ge, grad_metric=gm, total=e + ge + gm)


def force_components(params: FieldParams, t: float, x: float, mass: float) -> ForceSample:
    """Equation-of-motion force terms at one point (see module docstring)."""
    fg = force_grid(params, float(t), float(x), mass)
    return ForceSample(
        t=float(t),
        x=float(x),
        e_field=float(fg.e_field),
        grad_eps=float(fg.grad_eps),
        grad_metric=float(fg.grad_metric),
        total=float(fg.total),
    )
