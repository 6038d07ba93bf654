"""Command line interface.

Subcommands (each prints a one-line JSON summary to stdout):

  * phase-diagram: flux Chern number over a gamma / nu scan, CSV output.
  * profile: force terms on a unit-cell grid, CSV output.
  * chern: winding number plus flux and lattice Chern numbers, JSON only.
  * trajectories: integrate a release ensemble and export it, CSV output.
  * reconstruct: run the measurement protocol on generated or imported
    trajectories, JSON only.
  * monopole-check: unit-monopole validation of the lattice machinery.

Exit codes: 0 success, 2 validation or usage error, 3 degenerate point or
gap closure (any physics-level failure).

Output files are deterministic: identical argv produces byte-identical
files.  Floats are serialized with 17 significant digits so they round-trip
exactly; every file starts with '#' comment lines echoing the full
parameter set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, grid_release_ensemble, reconstruct_flux
from .errors import SynthfluxError
from .field import FieldParams
from .geometry import force_components
from .spin import HermitianField, spin_generators
from .topology import GridSpec, chern_from_flux, chern_lattice, monopole_sphere_chern, phase_diagram, winding_number

__all__ = ["RunConfig", "build_parser", "run", "main"]

_TRAJECTORY_HEADER = "traj_id,t,x,v"


def _fmt(value: float) -> str:
    """17 significant digits, enough to round-trip any float64."""
    return format(float(value), ".17g")


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, resolved from argv.

    Fields not applicable to the chosen subcommand keep their defaults.
    ``output_format`` records the fixed choice per subcommand: CSV for grid
    and trajectory data, JSON for scalar summaries.
    """

    subcommand: str
    params: FieldParams
    mass: float
    grid: int = 256
    band: float = 1.0
    two_j: int = 2
    gamma_min: float = -2.0
    gamma_max: float = 2.0
    gamma_steps: int = 81
    n_t_init: int = 32
    n_x_init: int = 32
    dt_frac: float = 0.0005
    bins: tuple[int, int] = (32, 32)
    in_path: str | None = None
    generate: bool = False
    out: str | None = None
    output_format: str = "json"


def _bins_type(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated integers, e.g. 32,32")
    try:
        nt, nx = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if nt < 2 or nx < 2:
        raise argparse.ArgumentTypeError("bins must be at least 2,2")
    return nt, nx


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="synthflux",
        description="Topologically quantized average work of a synthetic electric field",
    )
    common = argparse.ArgumentParser(add_help=False)
    defaults = FieldParams()
    common.add_argument("--alpha", type=float, default=defaults.alpha, help="coupling amplitude")
    common.add_argument("--nu", type=float, default=defaults.nu, help="drive modulation amplitude")
    common.add_argument("--gamma", type=float, default=defaults.gamma, help="static detuning")
    common.add_argument("--omega-tilde", type=float, default=defaults.omega_tilde, help="drive frequency")
    common.add_argument("--k", type=float, default=defaults.k, help="spatial wavenumber")
    common.add_argument("--mass", type=float, default=1.0, help="atomic mass")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_pd = sub.add_parser("phase-diagram", parents=[common],
                          help="flux Chern number over a gamma/nu scan")
    p_pd.add_argument("--gamma-min", type=float, default=-2.0)
    p_pd.add_argument("--gamma-max", type=float, default=2.0)
    p_pd.add_argument("--gamma-steps", type=int, default=81)
    p_pd.add_argument("--grid", type=int, default=256, help="cell grid size N (N x N)")
    p_pd.add_argument("--out", required=True, help="CSV output path")

    p_prof = sub.add_parser("profile", parents=[common],
                            help="force terms on a unit-cell grid")
    p_prof.add_argument("--grid", type=int, default=128)
    p_prof.add_argument("--out", required=True, help="CSV output path")

    p_chern = sub.add_parser("chern", parents=[common],
                             help="winding, flux and lattice Chern numbers")
    p_chern.add_argument("--grid", type=int, default=256)
    p_chern.add_argument("--band", type=float, default=None,
                         help="band label m for the lattice route (default: top band)")
    p_chern.add_argument("--two-j", type=int, default=2,
                         help="doubled spin of the lattice-route representation")

    p_traj = sub.add_parser("trajectories", parents=[common],
                            help="integrate and export a release ensemble")
    p_traj.add_argument("--nt-init", type=int, default=4, help="release times per period")
    p_traj.add_argument("--nx-init", type=int, default=4, help="release positions per wavelength")
    p_traj.add_argument("--dt-frac", type=float, default=0.0005, help="stepsize as a fraction of the period")
    p_traj.add_argument("--out", required=True, help="CSV output path")

    p_rec = sub.add_parser("reconstruct", parents=[common],
                           help="reconstruct the cell flux from trajectories")
    p_rec.add_argument("--bins", type=_bins_type, default=(32, 32), metavar="NT,NX")
    source = p_rec.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="in_path", help="trajectory CSV written by the trajectories subcommand")
    source.add_argument("--generate", action="store_true", help="integrate a fresh release ensemble")
    p_rec.add_argument("--nt-init", type=int, default=32)
    p_rec.add_argument("--nx-init", type=int, default=32)
    p_rec.add_argument("--dt-frac", type=float, default=0.0005)

    p_mono = sub.add_parser("monopole-check", parents=[common],
                            help="unit-monopole check of the lattice machinery")
    p_mono.add_argument("--grid", type=int, default=64)

    return parser


def _config_from_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> RunConfig:
    try:
        params = FieldParams(
            alpha=args.alpha, nu=args.nu, gamma=args.gamma,
            omega_tilde=args.omega_tilde, k=args.k,
        )
    except ValueError as exc:
        parser.error(f"--alpha/--nu/--gamma/--omega-tilde/--k: {exc}")
    if args.mass <= 0:
        parser.error("--mass must be > 0")

    kwargs: dict = {}
    if hasattr(args, "grid"):
        if args.grid < 8:
            parser.error("--grid must be at least 8")
        kwargs["grid"] = args.grid
    if hasattr(args, "two_j"):
        if args.two_j < 1:
            parser.error("--two-j must be at least 1")
        kwargs["two_j"] = args.two_j
        kwargs["band"] = args.two_j / 2.0 if args.band is None else args.band
    if hasattr(args, "gamma_steps"):
        if args.gamma_steps < 1:
            parser.error("--gamma-steps must be at least 1")
        kwargs.update(gamma_min=args.gamma_min, gamma_max=args.gamma_max,
                      gamma_steps=args.gamma_steps)
    if hasattr(args, "nt_init"):
        if args.nt_init < 1 or args.nx_init < 1:
            parser.error("--nt-init/--nx-init must be at least 1")
        if not 0.0 < args.dt_frac <= 0.005:
            parser.error("--dt-frac must be in (0, 0.005]")
        kwargs.update(n_t_init=args.nt_init, n_x_init=args.nx_init, dt_frac=args.dt_frac)
    if hasattr(args, "bins"):
        kwargs["bins"] = args.bins
    if hasattr(args, "in_path"):
        kwargs.update(in_path=args.in_path, generate=args.generate)
    if getattr(args, "out", None) is not None:
        kwargs["out"] = args.out

    fmt = "csv" if args.subcommand in ("phase-diagram", "profile", "trajectories") else "json"
    return RunConfig(subcommand=args.subcommand, params=params, mass=args.mass,
                     output_format=fmt, **kwargs)


def _param_comments(cfg: RunConfig, extra: list[str]) -> list[str]:
    p = cfg.params
    return [
        f"synthflux {cfg.subcommand}",
        f"alpha={_fmt(p.alpha)} nu={_fmt(p.nu)} gamma={_fmt(p.gamma)} "
        f"omega_tilde={_fmt(p.omega_tilde)} k={_fmt(p.k)}",
        f"mass={_fmt(cfg.mass)} hbar=1",
        *extra,
    ]


def _write_csv(path: str, comments: list[str], header: str, rows) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for line in comments:
            handle.write(f"# {line}\n")
        handle.write(header + "\n")
        for row in rows:
            handle.write(",".join(row) + "\n")


def _run_phase_diagram(cfg: RunConfig) -> dict:
    ratios = np.linspace(cfg.gamma_min, cfg.gamma_max, cfg.gamma_steps)
    rows = phase_diagram(cfg.params, ratios, GridSpec(cfg.grid, cfg.grid))
    csv_rows = [
        (
            _fmt(row.gamma_over_nu),
            _fmt(row.c1_raw),
            "" if row.c1_rounded is None else str(row.c1_rounded),
            _fmt(row.residual),
            _fmt(row.min_gap),
        )
        for row in rows
    ]
    extra = [f"grid={cfg.grid} gamma_min={_fmt(cfg.gamma_min)} "
             f"gamma_max={_fmt(cfg.gamma_max)} gamma_steps={cfg.gamma_steps}"]
    _write_csv(cfg.out, _param_comments(cfg, extra),
               "gamma_over_nu,c1_raw,c1_rounded,residual,min_gap", csv_rows)
    unflagged = [row.residual for row in rows if not row.flagged]
    return {
        "subcommand": cfg.subcommand,
        "rows": len(rows),
        "flagged": sum(row.flagged for row in rows),
        "max_residual": max(unflagged) if unflagged else None,
        "out": cfg.out,
    }


def _run_profile(cfg: RunConfig) -> dict:
    grid = GridSpec(cfg.grid, cfg.grid)
    t_nodes, x_nodes = grid.nodes(cfg.params)
    csv_rows = []
    e_values = np.empty((cfg.grid, cfg.grid))
    # Row-by-row scalar evaluation so the file reproduces per-point library
    # calls bit for bit.
    for i, t in enumerate(t_nodes):
        for j, x in enumerate(x_nodes):
            s = force_components(cfg.params, t, x, cfg.mass)
            e_values[i, j] = s.e_field
            csv_rows.append((_fmt(s.t), _fmt(s.x), _fmt(s.e_field),
                             _fmt(s.grad_eps), _fmt(s.grad_metric), _fmt(s.total)))
    _write_csv(cfg.out, _param_comments(cfg, [f"grid={cfg.grid}"]),
               "t,x,e_field,grad_eps,grad_metric,total", csv_rows)
    flux = float(e_values.sum()) * grid.cell_weight(cfg.params) / (2.0 * np.pi)
    return {
        "subcommand": cfg.subcommand,
        "rows": len(csv_rows),
        "cell_flux": flux,
        "residual": abs(flux - round(flux)),
        "out": cfg.out,
    }


def _run_chern(cfg: RunConfig) -> dict:
    grid = GridSpec(cfg.grid, cfg.grid)
    winding = winding_number(cfg.params, grid)
    flux = chern_from_flux(cfg.params, grid)
    field = HermitianField(spin_generators(cfg.two_j), cfg.params)
    lattice = chern_lattice(field, cfg.band, grid)
    return {
        "subcommand": cfg.subcommand,
        "rounded": flux.rounded,
        "residual": flux.residual,
        "winding": winding.rounded,
        "c1_flux": flux.rounded,
        "c1_lattice": lattice,
        "residuals": {"winding": winding.residual, "c1_flux": flux.residual},
    }


def _trajectory_rows(trajectories: list[Trajectory]):
    for traj_id, traj in enumerate(trajectories):
        for i in range(traj.n_samples):
            yield (str(traj_id), _fmt(traj.t[i]), _fmt(traj.x[i]), _fmt(traj.v[i]))


def _run_trajectories(cfg: RunConfig) -> dict:
    ensemble = grid_release_ensemble(
        cfg.params, cfg.mass, cfg.n_t_init, cfg.n_x_init,
        dt=cfg.dt_frac * cfg.params.period,
    )
    extra = [
        f"nt_init={cfg.n_t_init} nx_init={cfg.n_x_init} dt_frac={_fmt(cfg.dt_frac)}",
        f"dt={_fmt(cfg.dt_frac * cfg.params.period)}",
    ]
    _write_csv(cfg.out, _param_comments(cfg, extra), _TRAJECTORY_HEADER,
               _trajectory_rows(ensemble))
    return {
        "subcommand": cfg.subcommand,
        "n_trajectories": len(ensemble),
        "n_samples": sum(traj.n_samples for traj in ensemble),
        "out": cfg.out,
    }


def _read_trajectories(path: str, params: FieldParams, mass: float) -> list[Trajectory]:
    """Parse a CSV written by the trajectories subcommand.

    The field parameters are taken from the current flags; the file header
    comments record the values it was generated with.
    """
    dt_comment = None
    with open(path, "r", encoding="utf-8") as handle:
        header = None
        for line in handle:
            if line.startswith("#"):
                # Inferring dt from t[1] - t[0] loses a few ulps when the
                # release instant is nonzero, so the writer records it.
                stripped = line[1:].strip()
                if stripped.startswith("dt="):
                    dt_comment = float(stripped[3:])
                continue
            header = line.strip()
            break
        if header != _TRAJECTORY_HEADER:
            raise ValueError(f"unexpected trajectory header {header!r} in {path}")
        data = np.loadtxt(handle, delimiter=",", ndmin=2)
    if data.shape[1] != 4:
        raise ValueError(f"expected 4 columns in {path}, found {data.shape[1]}")
    ids = data[:, 0].astype(int)
    order = np.argsort(ids, kind="stable")
    data = data[order]
    boundaries = np.flatnonzero(np.diff(data[:, 0])) + 1
    trajectories = []
    for block in np.split(data, boundaries):
        if block.shape[0] < 2:
            raise ValueError("every trajectory needs at least two samples")
        t, x, v = block[:, 1], block[:, 2], block[:, 3]
        dt = dt_comment if dt_comment is not None else float(t[1] - t[0])
        trajectories.append(Trajectory(params, mass, dt, t, x, v))
    return trajectories


def _run_reconstruct(cfg: RunConfig) -> dict:
    if cfg.generate:
        ensemble = grid_release_ensemble(
            cfg.params, cfg.mass, cfg.n_t_init, cfg.n_x_init,
            dt=cfg.dt_frac * cfg.params.period,
        )
    else:
        ensemble = _read_trajectories(cfg.in_path, cfg.params, cfg.mass)
    report = reconstruct_flux(ensemble, cfg.params, cfg.mass, bins=cfg.bins)
    return {
        "subcommand": cfg.subcommand,
        "estimated_flux": report.estimated_flux,
        "rounded": report.rounded,
        "residual": report.residual,
        "coverage": report.coverage,
        "n_trajectories": report.n_trajectories,
    }


def _run_monopole_check(cfg: RunConfig) -> dict:
    upper = monopole_sphere_chern(cfg.grid, cfg.grid, 0.5)
    lower = monopole_sphere_chern(cfg.grid, cfg.grid, -0.5)
    return {
        "subcommand": cfg.subcommand,
        "chern_upper": upper,
        "chern_lower": lower,
        "residual": 0.0,
        "grid": cfg.grid,
    }


_HANDLERS = {
    "phase-diagram": _run_phase_diagram,
    "profile": _run_profile,
    "chern": _run_chern,
    "trajectories": _run_trajectories,
    "reconstruct": _run_reconstruct,
    "monopole-check": _run_monopole_check,
}


def run(argv: list[str] | None = None) -> int:
    """Parse argv, execute one subcommand, print its JSON summary.

    Returns the process exit code instead of raising, so it can be embedded.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        summary = _HANDLERS[cfg.subcommand](cfg)
    except SynthfluxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary))
    return 0


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
