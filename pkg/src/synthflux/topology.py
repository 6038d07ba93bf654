"""Topological invariants of the dressed bands over one space-time cell.

Three independent routes to the same integer are implemented:

  * ``winding_number``: degree W of the map (t, x) -> B / |B| into the
    sphere, as the Riemann sum of B . (dB/dt x dB/dx) / (4 pi |B|^3).
  * ``chern_from_flux``: first Chern number c1 of the top spin-1 band as
    the Riemann sum of the synthetic field E over the cell divided by 2 pi.
  * ``chern_lattice``: gauge-invariant lattice plaquette sum over discrete
    eigenstates (the standard field-strength construction on a torus), which
    yields an exact integer at any resolution fine enough that every
    plaquette phase stays in the principal branch.

For the level-m band of any spin representation the lattice result equals
-2 m W, which ``sector_chern`` encodes; for the spin-1 top band and default
parameters W = -2 and c1 = +4.  ``monopole_sphere_chern`` checks the
plaquette machinery against the unit-charge monopole, whose upper band has
Chern number -1.

All cell grids are endpoint exclusive (nodes i * T / n, j * lam / n), so
Riemann sums of the periodic integrands converge spectrally, and grid sums
rely on numpy's pairwise summation for reproducibility.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DegeneratePointError, NonQuantizedWarning, RefineGridError, ZeroOverlapError
from .field import FieldParams, b_components, db_dt, db_dx, min_gap
from .geometry import electric_field
from .spin import HermitianField, SpinRep, band_eigensystem_grid, spin_generators

__all__ = [
    "GridSpec",
    "FluxResult",
    "PhaseDiagramRow",
    "winding_number",
    "chern_from_flux",
    "chern_lattice",
    "lattice_chern_for_map",
    "sector_chern",
    "phase_diagram",
    "monopole_sphere_chern",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform endpoint-exclusive sampling of the unit cell."""

    n_t: int = 256
    n_x: int = 256

    def __post_init__(self) -> None:
        if self.n_t < 8 or self.n_x < 8:
            raise ValueError("grid must be at least 8 x 8")

    def nodes(self, params: FieldParams) -> tuple[np.ndarray, np.ndarray]:
        t = np.arange(self.n_t) * (params.period / self.n_t)
        x = np.arange(self.n_x) * (params.wavelength / self.n_x)
        return t, x

    def cell_weight(self, params: FieldParams) -> float:
        """Quadrature weight dt * dx of one node."""
        return params.cell_area / (self.n_t * self.n_x)


@dataclass(frozen=True)
class FluxResult:
    """A flux integral together with its nearest integer."""

    raw: float
    rounded: int
    residual: float

    @classmethod
    def from_raw(cls, raw: float) -> "FluxResult":
        rounded = int(round(raw))
        return cls(raw=float(raw), rounded=rounded, residual=abs(raw - rounded))


@dataclass(frozen=True)
class PhaseDiagramRow:
    """One point of a gamma / nu scan.

    Flagged rows carry NaN in place of the flux so a scan never aborts on a
    phase boundary; ``note`` says why the row was flagged.
    """

    gamma_over_nu: float
    c1_raw: float
    c1_rounded: int | None
    residual: float
    min_gap: float
    flagged: bool
    note: str = ""


def _cell_mesh(params: FieldParams, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    t, x = grid.nodes(params)
    return t[:, None], x[None, :]


def winding_number(
    params: FieldParams,
    grid: GridSpec | None = None,
    quantization_tol: float = 1e-3,
) -> FluxResult:
    """Degree of the unit-field map over one cell.

    Integrates B . (dB/dt x dB/dx) / (4 pi |B|^3) on the endpoint-exclusive
    grid, which for a periodic integrand coincides with the composite
    trapezoid rule; the error then decays faster than any power of the grid
    spacing, at a rate set by how close the gap comes to zero.

    Raises:
        DegeneratePointError: if some node reaches the degeneracy threshold.
    Warns:
        NonQuantizedWarning: if the result is farther than quantization_tol
            from the nearest integer.
    """
    if grid is None:
        grid = GridSpec()
    tt, xx = _cell_mesh(params, grid)
    b = b_components(params, tt, xx)
    mag = np.sqrt(np.einsum("cij,cij->ij", b, b))
    if np.any(mag <= params.degeneracy_threshold):
        raise DegeneratePointError(
            f"gap closure: min |B| = {float(mag.min()):.3e} on the winding grid"
        )
    bt = db_dt(params, tt, xx)
    bx = db_dx(params, tt, xx)
    integrand = np.einsum("cij,cij->ij", b, np.cross(bt, bx, axis=0)) / mag**3
    raw = integrand.sum() * grid.cell_weight(params) / (4.0 * np.pi)
    result = FluxResult.from_raw(raw)
    if result.residual > quantization_tol:
        warnings.warn(
            f"winding number {result.raw:.6f} is {result.residual:.2e} from an integer "
            f"at {grid.n_t} x {grid.n_x}",
            NonQuantizedWarning,
            stacklevel=2,
        )
    return result


def chern_from_flux(
    params: FieldParams,
    grid: GridSpec | None = None,
    quantization_tol: float = 1e-3,
) -> FluxResult:
    """Chern number of the top spin-1 band as the cell flux of E over 2 pi.

    Same quadrature, degeneracy handling and warning policy as
    ``winding_number``; satisfies c1 = -2 W identically.
    """
    if grid is None:
        grid = GridSpec()
    tt, xx = _cell_mesh(params, grid)
    e = electric_field(params, tt, xx)
    raw = e.sum() * grid.cell_weight(params) / (2.0 * np.pi)
    result = FluxResult.from_raw(raw)
    if result.residual > quantization_tol:
        warnings.warn(
            f"flux Chern number {result.raw:.6f} is {result.residual:.2e} from an integer "
            f"at {grid.n_t} x {grid.n_x}",
            NonQuantizedWarning,
            stacklevel=2,
        )
    return result


def _plaquette_phases(states: np.ndarray, wrap_rows: bool) -> np.ndarray:
    """Plaquette phases from a (n0, n1, dim) grid of band states.

    The loop orientation on plaquette (i, j) is
    (i, j) -> (i+1, j) -> (i+1, j+1) -> (i, j+1) -> (i, j), matching the
    corner order of ``geometry.plaquette_curvature`` with axis 0 as time.
    Columns always wrap (the cell is periodic in x); when ``wrap_rows`` is
    false the last row of plaquettes (connecting back to row 0) is dropped,
    which is what an open coordinate like the polar angle needs.
    """
    s00 = states
    s10 = np.roll(states, -1, axis=0)
    s11 = np.roll(s10, -1, axis=1)
    s01 = np.roll(states, -1, axis=1)
    links = (
        np.einsum("ijd,ijd->ij", s00.conj(), s10),
        np.einsum("ijd,ijd->ij", s10.conj(), s11),
        np.einsum("ijd,ijd->ij", s11.conj(), s01),
        np.einsum("ijd,ijd->ij", s01.conj(), s00),
    )
    if not wrap_rows:
        links = tuple(link[:-1, :] for link in links)
    min_link = min(float(np.min(np.abs(link))) for link in links)
    if min_link <= 1e-6:
        raise ZeroOverlapError(
            f"link overlap modulus {min_link:.3e}; neighbouring states are "
            "nearly orthogonal, refine the grid"
        )
    prod = links[0] * links[1] * links[2] * links[3]
    return -np.angle(prod)


def lattice_chern_for_map(
    b_map: Callable[[np.ndarray, np.ndarray], np.ndarray],
    rep: SpinRep,
    m: float,
    u_nodes: np.ndarray,
    v_nodes: np.ndarray,
    wrap_rows: bool = True,
    degeneracy_threshold: float | None = None,
) -> int:
    """Lattice Chern number of band m for an arbitrary field map.

    Args:
        b_map: callable mapping broadcastable (u, v) meshes to field
            components of shape (3, len(u), len(v)).
        rep: spin representation the field couples to.
        m: band label (J, J-1, ..., -J).
        u_nodes, v_nodes: 1-d parameter grids; v always wraps, u wraps only
            when ``wrap_rows``.
        degeneracy_threshold: |B| at or below this is rejected; defaults to
            1e-12 times the grid maximum of |B|.

    Returns:
        The exact integer (plaquette phase sum) / (2 pi).

    Raises:
        DegeneratePointError: if |B| reaches the threshold at some node.
        RefineGridError: if some plaquette phase reaches pi / 2, where the
            principal-branch identification of the flux becomes unsafe.
    """
    u = np.asarray(u_nodes, dtype=float)
    v = np.asarray(v_nodes, dtype=float)
    b = np.asarray(b_map(u[:, None], v[None, :]), dtype=float)
    if b.shape != (3, u.size, v.size):
        raise ValueError(f"b_map returned shape {b.shape}, expected (3, {u.size}, {v.size})")
    mag = np.sqrt(np.einsum("cij,cij->ij", b, b))
    if degeneracy_threshold is None:
        degeneracy_threshold = 1e-12 * float(mag.max())
    if np.any(mag <= degeneracy_threshold):
        raise DegeneratePointError(
            f"gap closure: min |B| = {float(mag.min()):.3e} on the lattice grid"
        )
    field = HermitianField(rep)
    col = field.band_index_to_column(m)
    _, vecs = band_eigensystem_grid(rep, b)
    states = vecs[..., :, col]
    phases = _plaquette_phases(states, wrap_rows=wrap_rows)
    max_phase = float(np.max(np.abs(phases)))
    if max_phase >= np.pi / 2.0:
        raise RefineGridError(
            f"max plaquette phase {max_phase:.3f} rad leaves the principal branch, "
            "refine the grid"
        )
    total = phases.sum() / (2.0 * np.pi)
    nearest = int(round(total))
    if abs(total - nearest) > 1e-3:
        raise RefineGridError(
            f"plaquette sum {total:.6f} is not an integer; the grid misses flux"
        )
    return nearest


def chern_lattice(field: HermitianField, m: float, grid: GridSpec | None = None) -> int:
    """Lattice Chern number of band m of the space-time cell.

    Wraps ``lattice_chern_for_map`` on the endpoint-exclusive cell grid with
    both directions periodic.  Exactly integer by construction; agrees with
    ``chern_from_flux`` for the spin-1 top band and with ``sector_chern``
    for every representation.
    """
    if grid is None:
        grid = GridSpec()
    params = field.params
    t, x = grid.nodes(params)
    return lattice_chern_for_map(
        lambda tt, xx: b_components(params, tt, xx),
        field.rep,
        m,
        t,
        x,
        wrap_rows=True,
        degeneracy_threshold=params.degeneracy_threshold,
    )


def sector_chern(m: float, winding: int) -> int:
    """Chern number -2 m W of the level-m band given the field winding W.

    m must be integer or half-integer; the product is always an integer.
    """
    two_m = round(2.0 * m)
    if abs(2.0 * m - two_m) > 1e-9:
        raise ValueError(f"band label {m} is not integer or half-integer")
    return -two_m * int(winding)


def phase_diagram(
    params_base: FieldParams,
    ratios: Sequence[float],
    grid: GridSpec | None = None,
    boundary_margin: float = 0.05,
    gap_grid: int = 256,
) -> list[PhaseDiagramRow]:
    """Flux Chern number as a function of gamma / nu at fixed other parameters.

    Rows within ``boundary_margin`` of the gap closures gamma / nu in
    {-1, 0, 1} are flagged instead of evaluated, and rows whose grid hits an
    actual closure are flagged as well, so one scan never raises.  Expected
    plateaus: +4 for ratios in (0, 1), -4 in (-1, 0), 0 outside [-1, 1].
    """
    if params_base.nu <= 0:
        raise ValueError("phase_diagram needs nu > 0 to form gamma / nu")
    if grid is None:
        grid = GridSpec()
    rows: list[PhaseDiagramRow] = []
    for ratio in ratios:
        r = float(ratio)
        params = replace(params_base, gamma=r * params_base.nu)
        gap = min_gap(params, gap_grid)
        distance = min(abs(r), abs(r - 1.0), abs(r + 1.0))
        if distance < boundary_margin:
            rows.append(
                PhaseDiagramRow(r, float("nan"), None, float("nan"), gap, True,
                                "near phase boundary")
            )
            continue
        try:
            flux = chern_from_flux(params, grid)
        except DegeneratePointError:
            rows.append(
                PhaseDiagramRow(r, float("nan"), None, float("nan"), gap, True,
                                "gap closure")
            )
            continue
        rows.append(
            PhaseDiagramRow(r, flux.raw, flux.rounded, flux.residual, gap, False)
        )
    return rows


def monopole_sphere_chern(n_theta: int = 64, n_phi: int = 64, m: float = 0.5) -> int:
    """Chern number of a band of the unit monopole, as a machinery check.

    The field is the unit sphere map B = (sin th cos ph, sin th sin ph,
    cos th) coupled to spin 1/2; the upper band (m = +1/2) must give -1 and
    the lower (m = -1/2) +1.  The polar angle grid includes both poles and
    does not wrap, the azimuthal grid wraps.
    """
    if n_theta < 16 or n_phi < 16:
        raise ValueError("monopole grids must be at least 16 x 16")
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.arange(n_phi) * (2.0 * np.pi / n_phi)

    def sphere_map(th: np.ndarray, ph: np.ndarray) -> np.ndarray:
        b1 = np.sin(th) * np.cos(ph)
        b2 = np.sin(th) * np.sin(ph)
        b3 = np.cos(th) * np.ones_like(ph)
        return np.stack(np.broadcast_arrays(b1, b2, b3))

    return lattice_chern_for_map(sphere_map, spin_generators(1), m, theta, phi, wrap_rows=False)
