"""Quantized average work of a synthetic electric field on a dressed atom.

A three-level atom in a space-time periodic coupling field experiences a
synthetic electric field whose flux through one unit cell is 2 pi times a
Chern number.  This package computes that integer three independent ways
(winding number of the field map, Riemann flux of the synthetic field,
gauge-invariant lattice plaquette sum), evaluates the band geometry behind
it (quantum metric, effective potential, semiclassical forces), and
simulates the trajectory-sampling protocol that reconstructs the integer
from measured accelerations.  hbar = 1 throughout.
"""

from .errors import (
    BlowUpError,
    DegeneratePointError,
    NonQuantizedWarning,
    PolePatchError,
    RefineGridError,
    SynthfluxError,
    ZeroOverlapError,
)
from .field import BVector, FieldParams, min_gap, sample_B, sample_B_derivatives
from .geometry import (
    ForceGrid,
    ForceSample,
    effective_potential,
    electric_field,
    force_components,
    force_grid,
    metric_g11_top,
    plaquette_curvature,
    quantum_metric_g11,
)
from .spin import (
    BandState,
    HermitianField,
    SpinRep,
    dressed_state_spin1,
    eigensystem_at,
    hamiltonian_at,
    spin_generators,
)
from .topology import (
    FluxResult,
    GridSpec,
    PhaseDiagramRow,
    chern_from_flux,
    chern_lattice,
    lattice_chern_for_map,
    monopole_sphere_chern,
    phase_diagram,
    sector_chern,
    winding_number,
)
from .dynamics import (
    ReconstructionReport,
    Trajectory,
    acceleration_profile,
    flux_from_acceleration_samples,
    fold_cell,
    grid_release_ensemble,
    integrate_ensemble,
    integrate_trajectory,
    reconstruct_flux,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SynthfluxError",
    "DegeneratePointError",
    "PolePatchError",
    "RefineGridError",
    "ZeroOverlapError",
    "BlowUpError",
    "NonQuantizedWarning",
    "FieldParams",
    "BVector",
    "sample_B",
    "sample_B_derivatives",
    "min_gap",
    "SpinRep",
    "HermitianField",
    "BandState",
    "spin_generators",
    "hamiltonian_at",
    "eigensystem_at",
    "dressed_state_spin1",
    "ForceSample",
    "ForceGrid",
    "electric_field",
    "plaquette_curvature",
    "quantum_metric_g11",
    "metric_g11_top",
    "effective_potential",
    "force_components",
    "force_grid",
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
    "Trajectory",
    "ReconstructionReport",
    "integrate_trajectory",
    "integrate_ensemble",
    "grid_release_ensemble",
    "fold_cell",
    "acceleration_profile",
    "flux_from_acceleration_samples",
    "reconstruct_flux",
]
