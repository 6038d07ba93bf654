"""Spin representations and the dressed-band eigenproblem.

The coupling operator at a space-time point is M(t, x) = sum_mu B_mu J_mu
with J_mu the spin-J generators.  Bands are labelled by the level index
m = J, J-1, ..., -J (top band first), matching the eigenvalues m |B| of M.

Generators are built by the standard ladder construction in the basis
ordered by descending magnetic quantum number, so for spin 1

    J3 = diag(1, 0, -1),   (J1 - i J2) = sqrt(2) (|0><1| + |2><0|)

with 0-based kets.  All generator matrices are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegeneratePointError, PolePatchError
from .field import BVector, FieldParams, b_components, sample_B

__all__ = [
    "SpinRep",
    "HermitianField",
    "BandState",
    "spin_generators",
    "hamiltonian_at",
    "hamiltonian_grid",
    "eigensystem_at",
    "band_eigensystem_grid",
    "dressed_state_spin1",
]


@dataclass(frozen=True)
class SpinRep:
    """Generators (J1, J2, J3) of the spin-(two_j / 2) representation."""

    two_j: int
    j1: np.ndarray
    j2: np.ndarray
    j3: np.ndarray

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def j(self) -> float:
        return self.two_j / 2.0

    def band_indices(self) -> np.ndarray:
        """Level labels m = J, ..., -J in the order bands are returned."""
        return self.j - np.arange(self.dim)


def spin_generators(two_j: int) -> SpinRep:
    """Spin generators for total spin two_j / 2 via the ladder construction.

    Satisfy [J1, J2] = i J3 (cyclically) and sum_i Ji^2 = j (j + 1) 1.
    """
    if not isinstance(two_j, (int, np.integer)):
        raise ValueError("two_j must be an integer")
    if two_j < 1:
        raise ValueError("two_j must be >= 1")
    j = two_j / 2.0
    dim = two_j + 1
    m = j - np.arange(dim)
    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)) sits one step above the diagonal
    # in the descending-m basis.
    jp = np.zeros((dim, dim), dtype=complex)
    rows = np.arange(dim - 1)
    jp[rows, rows + 1] = np.sqrt(j * (j + 1.0) - m[1:] * (m[1:] + 1.0))
    jm = jp.conj().T
    j1 = (jp + jm) / 2.0
    j2 = (jp - jm) / 2.0j
    j3 = np.diag(m).astype(complex)
    for g in (j1, j2, j3):
        g.setflags(write=False)
    return SpinRep(int(two_j), j1, j2, j3)


@dataclass(frozen=True)
class HermitianField:
    """A field configuration coupled to a fixed spin representation."""

    rep: SpinRep
    params: FieldParams = dc_field(default_factory=FieldParams)

    @classmethod
    def spin1(cls, params: FieldParams | None = None) -> "HermitianField":
        """The three-level (spin-1) case the atom realizes."""
        return cls(spin_generators(2), params if params is not None else FieldParams())

    def band_index_to_column(self, m: float) -> int:
        """Column of the eigenvector matrix holding band m."""
        col = int(round(self.rep.j - m))
        if abs((self.rep.j - m) - col) > 1e-9 or not 0 <= col < self.rep.dim:
            raise ValueError(f"band index {m} not in representation two_j={self.rep.two_j}")
        return col


@dataclass(frozen=True)
class BandState:
    """One instantaneous dressed band: label m, energy m |B|, eigenvector."""

    band_index: float
    energy: float
    state: np.ndarray


def hamiltonian_grid(rep: SpinRep, b: np.ndarray) -> np.ndarray:
    """M = sum_mu B_mu J_mu for batched components b of shape (3, ...).

    Returns shape (...) + (dim, dim), ready for a batched eigensolver.
    """
    b = np.asarray(b, dtype=float)
    return (
        b[0][..., None, None] * rep.j1
        + b[1][..., None, None] * rep.j2
        + b[2][..., None, None] * rep.j3
    )


def hamiltonian_at(field: HermitianField, t: float, x: float) -> np.ndarray:
    """Coupling operator M(t, x) as a dense Hermitian matrix."""
    b = b_components(field.params, float(t), float(x))
    return hamiltonian_grid(field.rep, b)


def band_eigensystem_grid(rep: SpinRep, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of M on a batch of field samples.

    Args:
        rep: spin representation.
        b: field components, shape (3, ...).

    Returns:
        (energies, states) with energies of shape (...) + (dim,) sorted in
        descending order (top band first) and states of shape
        (...) + (dim, dim) whose column [..., :, i] is the band with label
        m = j - i.  No phase convention is imposed; batched consumers must be
        gauge invariant.
    """
    h = hamiltonian_grid(rep, b)
    energies, states = np.linalg.eigh(h)
    return energies[..., ::-1], states[..., ::-1]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-modulus component is real positive."""
    i = int(np.argmax(np.abs(vec)))
    phase = vec[i] / abs(vec[i])
    return vec * phase.conjugate()


def eigensystem_at(field: HermitianField, t: float, x: float) -> list[BandState]:
    """All dressed bands at one point, top band first.

    The eigenvector phases follow the largest-component-real-positive
    convention, which makes single-point results reproducible; any phase
    convention drops out of the gauge-invariant quantities downstream.

    Raises:
        DegeneratePointError: if |B(t, x)| is at or below the degeneracy
            threshold, where the band labels lose meaning.
    """
    bvec = sample_B(field.params, t, x)
    if bvec.magnitude <= field.params.degeneracy_threshold:
        raise DegeneratePointError(
            f"|B| = {bvec.magnitude:.3e} at (t={t!r}, x={x!r}) is degenerate"
        )
    energies, states = band_eigensystem_grid(field.rep, bvec.as_array())
    labels = field.rep.band_indices()
    return [
        BandState(float(labels[i]), float(energies[i]), _fix_phase(states[:, i]))
        for i in range(field.rep.dim)
    ]


def dressed_state_spin1(b: BVector, pole_tol: float = 1e-9) -> BandState:
    """Top dressed band of the spin-1 problem in closed form.

    Uses the stereographic coordinate z = (B1 + i B2) / (|B| + B3) of the
    field direction, in terms of which the normalized top band is

        (1, sqrt(2) z, z^2) / (1 + |z|^2)

    with energy |B|.  The chart degenerates where |B| + B3 -> 0 (field along
    -e3); consumers needing that patch should fall back to the eigensolver.

    Raises:
        DegeneratePointError: if |B| = 0.
        PolePatchError: if |B| + B3 <= pole_tol * |B|.
    """
    mag = b.magnitude
    if mag == 0.0:
        raise DegeneratePointError("|B| = 0, dressed bands undefined")
    denom = mag + b.b3
    if denom <= pole_tol * mag:
        raise PolePatchError(
            f"|B| + B3 = {denom:.3e} too close to the chart pole (|B| = {mag:.3e})"
        )
    z = (b.b1 + 1j * b.b2) / denom
    vec = np.array([1.0, np.sqrt(2.0) * z, z * z], dtype=complex)
    vec /= 1.0 + abs(z) ** 2
    return BandState(1.0, mag, vec)
