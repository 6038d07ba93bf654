"""Semiclassical trajectories and the work-reconstruction protocol.

The atom position obeys

    mass * d2x/dt2 = E(t, x) - d(e_top)/dx - (1 / (2 mass)) d(g11)/dx

(:mod:`synthflux.geometry` evaluates the right-hand side).  Trajectories
are integrated with a fixed-step classic 4th-order scheme so convergence
is a measurable property rather than a solver-dependent one.

The measurement protocol releases atoms at rest from a grid of space-time
points inside one unit cell, integrates each over one drive period, forms
accelerations by central second differences, subtracts the two known force
terms, folds the sample points back into the unit cell, bin-averages the
estimated synthetic field E on a coarse grid, and integrates it over the
cell.  The result divided by 2 pi estimates the Chern number, which is the
quantized average work per cycle in units of 2 pi (hbar = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError
from .field import FieldParams
from .geometry import electric_field, force_grid

__all__ = [
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


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One integrated trajectory, sampled every step.

    Carries the parameters it was integrated under so downstream analysis
    cannot silently mix ensembles.
    """

    params: FieldParams
    mass: float
    dt: float
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        for name in ("t", "x", "v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if self.mass <= 0:
            raise ValueError("mass must be > 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if not (self.t.ndim == 1 and self.t.shape == self.x.shape == self.v.shape):
            raise ValueError("t, x, v must be equal-length 1-d arrays")
        if self.t.size < 2:
            raise ValueError("a trajectory needs at least two samples")
        steps = np.diff(self.t)
        if not np.all(steps > 0):
            raise ValueError("t must be strictly increasing")
        if not np.allclose(steps, self.dt, rtol=1e-9, atol=0.0):
            raise ValueError("t spacing does not match dt")
        # One step moving more than a tenth of a wavelength would alias the
        # field; that is a stepsize bug, not data.
        if np.max(np.abs(np.diff(self.x))) >= self.params.wavelength / 10.0:
            raise ValueError("per-step displacement reached wavelength / 10")

    @property
    def n_samples(self) -> int:
        return int(self.t.size)


@dataclass(frozen=True)
class ReconstructionReport:
    """Outcome of the binned flux reconstruction."""

    n_trajectories: int
    n_samples: int
    estimated_flux: float
    rounded: int | None
    residual: float
    coverage: float


def _default_v_max(params: FieldParams) -> float:
    """Velocity bound: 100 wavelengths per period is far beyond the
    transport the cell's forces can produce and flags runaway steps."""
    return 100.0 * params.wavelength / params.period


def integrate_ensemble(
    params: FieldParams,
    mass: float,
    t0,
    x0,
    v0,
    duration: float,
    dt: float,
    v_max: float | None = None,
) -> list[Trajectory]:
    """Integrate a batch of trajectories sharing duration and stepsize.

    The equations for the whole batch advance in lockstep on arrays, which
    is what makes thousand-atom ensembles cheap; results are identical to
    integrating each trajectory alone.

    Args:
        params, mass: physics configuration.
        t0, x0, v0: release times, positions, velocities (broadcastable 1-d).
        duration: integration span per trajectory; snapped to a whole number
            of steps.
        dt: stepsize, at most period / 200.
        v_max: blow-up bound, default 100 wavelengths per period.

    Raises:
        BlowUpError: if any trajectory exceeds v_max.
        DegeneratePointError: if a force evaluation hits a band touching.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if dt > params.period / 200.0 * (1.0 + 1e-12):
        raise ValueError("dt must be at most period / 200")
    if duration <= 0:
        raise ValueError("duration must be > 0")
    if mass <= 0:
        raise ValueError("mass must be > 0")
    if v_max is None:
        v_max = _default_v_max(params)
    t0, x0, v0 = np.broadcast_arrays(
        np.atleast_1d(np.asarray(t0, dtype=float)),
        np.atleast_1d(np.asarray(x0, dtype=float)),
        np.atleast_1d(np.asarray(v0, dtype=float)),
    )
    n_steps = max(1, int(round(duration / dt)))
    n = t0.size
    xs = np.empty((n_steps + 1, n))
    vs = np.empty((n_steps + 1, n))
    xs[0] = x0
    vs[0] = v0

    def acc(t_arr: np.ndarray, x_arr: np.ndarray) -> np.ndarray:
        return force_grid(params, t_arr, x_arr, mass).total / mass

    x = x0.copy()
    v = v0.copy()
    half = dt / 2.0
    for step in range(n_steps):
        t = t0 + step * dt
        k1x = v
        k1v = acc(t, x)
        k2x = v + half * k1v
        k2v = acc(t + half, x + half * k1x)
        k3x = v + half * k2v
        k3v = acc(t + half, x + half * k2x)
        k4x = v + dt * k3v
        k4v = acc(t + dt, x + dt * k3x)
        x = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        speed = float(np.max(np.abs(v)))
        if speed > v_max:
            raise BlowUpError(
                f"|v| = {speed:.3e} exceeded v_max = {v_max:.3e} at step {step + 1}"
            )
        xs[step + 1] = x
        vs[step + 1] = v

    times = dt * np.arange(n_steps + 1)
    return [
        Trajectory(params, mass, dt, t0[i] + times, xs[:, i], vs[:, i])
        for i in range(n)
    ]


def integrate_trajectory(
    params: FieldParams,
    mass: float,
    t0: float,
    x0: float,
    v0: float,
    t_end: float,
    dt: float,
    v_max: float | None = None,
) -> Trajectory:
    """Integrate a single trajectory from t0 to t_end (see integrate_ensemble)."""
    if t_end <= t0:
        raise ValueError("t_end must be greater than t0")
    return integrate_ensemble(
        params, mass, [t0], [x0], [v0], t_end - t0, dt, v_max=v_max
    )[0]


def grid_release_ensemble(
    params: FieldParams,
    mass: float,
    n_t_init: int = 32,
    n_x_init: int = 32,
    dt: float | None = None,
    periods: float = 1.0,
    v_max: float | None = None,
) -> list[Trajectory]:
    """Release atoms at rest from an endpoint-exclusive cell grid.

    This is the ensemble the measurement protocol uses: n_t_init release
    times by n_x_init release positions, each integrated for ``periods``
    drive periods with stepsize ``dt`` (default period / 2000).
    """
    if n_t_init < 1 or n_x_init < 1:
        raise ValueError("release grid must be at least 1 x 1")
    if dt is None:
        dt = params.period / 2000.0
    t_rel = np.arange(n_t_init) * (params.period / n_t_init)
    x_rel = np.arange(n_x_init) * (params.wavelength / n_x_init)
    tt, xx = np.meshgrid(t_rel, x_rel, indexing="ij")
    zeros = np.zeros(tt.size)
    return integrate_ensemble(
        params, mass, tt.ravel(), xx.ravel(), zeros, periods * params.period, dt,
        v_max=v_max,
    )


def fold_cell(params: FieldParams, t, x) -> tuple[np.ndarray, np.ndarray]:
    """Fold space-time points into the unit cell [0, T) x [0, lam).

    Guards the half-open bound against the rounding case where the modulo
    of a slightly negative value lands exactly on the period.
    """
    t_f = np.mod(np.asarray(t, dtype=float), params.period)
    x_f = np.mod(np.asarray(x, dtype=float), params.wavelength)
    t_f = np.where(t_f >= params.period, t_f - params.period, t_f)
    x_f = np.where(x_f >= params.wavelength, x_f - params.wavelength, x_f)
    return t_f, x_f


def acceleration_profile(trajectories: list[Trajectory]) -> np.ndarray:
    """Measured accelerations with their folded cell coordinates.

    Central second differences a_i = (x_{i+1} - 2 x_i + x_{i-1}) / dt^2 at
    the interior samples of every trajectory, O(dt^2) accurate just like a
    time-of-flight readout repeated at staggered hold times.

    Returns:
        Array of shape (n_points, 3) with columns (t_folded, x_folded, a).
        Trajectories shorter than three samples contribute nothing, so the
        result can be empty.
    """
    blocks = [np.empty((0, 3))]
    for traj in trajectories:
        if traj.n_samples < 3:
            continue
        a = (traj.x[2:] - 2.0 * traj.x[1:-1] + traj.x[:-2]) / traj.dt**2
        t_f, x_f = fold_cell(traj.params, traj.t[1:-1], traj.x[1:-1])
        blocks.append(np.column_stack([t_f, x_f, a]))
    return np.concatenate(blocks, axis=0)


def _consistent_ensemble(
    trajectories: list[Trajectory],
    params: FieldParams | None,
    mass: float | None,
) -> tuple[FieldParams, float]:
    if params is None:
        params = trajectories[0].params
    if mass is None:
        mass = trajectories[0].mass
    for traj in trajectories:
        if traj.params != params or traj.mass != mass:
            raise ValueError("trajectories do not match the requested parameters or mass")
    return params, mass


def reconstruct_flux(
    trajectories: list[Trajectory],
    params: FieldParams | None = None,
    mass: float | None = None,
    bins: tuple[int, int] = (32, 32),
    coverage_threshold: float = 0.9,
    subtract_known_forces: bool = True,
) -> ReconstructionReport:
    """Estimate the cell flux of E (in units of 2 pi) from trajectories.

    Per sample the synthetic field is estimated as

        E_est = mass * a - grad_eps_force - grad_metric_force

    (the two known conservative force terms are evaluated analytically at
    the folded sample point and removed).  Samples are bin-averaged on a
    ``bins`` grid of the unit cell; empty bins are filled with the analytic
    field at the bin center and counted against ``coverage``.  With
    ``subtract_known_forces`` false the conservative terms are left in,
    which is the negative control: over one period they nearly average out,
    so the estimate degrades but should not be destroyed.

    Args:
        trajectories: the measured ensemble.
        params, mass: physics configuration; default to the values carried
            by the trajectories, and must match them when given.
        bins: cell binning (n_t, n_x).
        coverage_threshold: below this occupied-bin fraction no integer
            claim is made.
        subtract_known_forces: disable only for the negative control.

    Returns:
        ReconstructionReport; ``rounded`` is None when coverage falls below
        ``coverage_threshold``.
    """
    if not trajectories:
        raise ValueError("need at least one trajectory")
    params, mass = _consistent_ensemble(trajectories, params, mass)
    samples = acceleration_profile(trajectories)
    return flux_from_acceleration_samples(
        samples, params, mass, bins=bins,
        coverage_threshold=coverage_threshold,
        subtract_known_forces=subtract_known_forces,
        n_trajectories=len(trajectories),
    )


def flux_from_acceleration_samples(
    samples: np.ndarray,
    params: FieldParams,
    mass: float,
    bins: tuple[int, int] = (32, 32),
    coverage_threshold: float = 0.9,
    subtract_known_forces: bool = True,
    n_trajectories: int = 0,
) -> ReconstructionReport:
    """Binned flux estimate from (t_folded, x_folded, a) rows.

    The estimator behind ``reconstruct_flux``, split out so synthetic
    acceleration samples (for example exact ones from the analytic force
    field) can be fed through the identical binning and integration path.
    """
    n_bt, n_bx = bins
    if n_bt < 2 or n_bx < 2:
        raise ValueError("bins must be at least 2 x 2")
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3:
        raise ValueError("samples must have shape (n, 3)")
    t_s, x_s, a_s = samples[:, 0], samples[:, 1], samples[:, 2]
    e_est = mass * a_s
    if subtract_known_forces and samples.shape[0]:
        fg = force_grid(params, t_s, x_s, mass)
        e_est = e_est - fg.grad_eps - fg.grad_metric

    it = np.clip((t_s / params.period * n_bt).astype(int), 0, n_bt - 1)
    ix = np.clip((x_s / params.wavelength * n_bx).astype(int), 0, n_bx - 1)
    flat = it * n_bx + ix
    n_bins = n_bt * n_bx
    counts = np.bincount(flat, minlength=n_bins)
    sums = np.bincount(flat, weights=e_est, minlength=n_bins)
    occupied = counts > 0
    means = np.zeros(n_bins)
    means[occupied] = sums[occupied] / counts[occupied]
    if not occupied.all():
        centers_t = (np.arange(n_bt) + 0.5) * (params.period / n_bt)
        centers_x = (np.arange(n_bx) + 0.5) * (params.wavelength / n_bx)
        grid_e = electric_field(params, centers_t[:, None], centers_x[None, :]).ravel()
        means[~occupied] = grid_e[~occupied]
    coverage = float(occupied.mean())
    flux = params.cell_area * float(means.mean()) / (2.0 * np.pi)
    nearest = int(round(flux))
    return ReconstructionReport(
        n_trajectories=n_trajectories,
        n_samples=int(samples.shape[0]),
        estimated_flux=flux,
        rounded=nearest if coverage >= coverage_threshold else None,
        residual=abs(flux - nearest),
        coverage=coverage,
    )
