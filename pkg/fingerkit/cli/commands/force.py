"""`force`: grasp-force surfaces and their ordering report."""
import numpy as np

from fingerkit.cli.context import CommandContext, CommandResult, pass_fail
from fingerkit.core.errors import ConfigurationError
from fingerkit.services import export, force

NAME = "force"


def register(subparsers):
    parser = subparsers.add_parser(NAME, help="grasp force over (P_press, r) at given crank angles")
    parser.add_argument("--theta1", nargs="*", type=float, help="crank angles in deg")
    parser.add_argument("--grid", nargs=2, type=int, metavar=("NP", "NR"), help="nodes along P_press and r")
    parser.set_defaults(handler=run)


def _nesting_ok(ctx: CommandContext, surface: force.ForceSurface, grid) -> bool:
    """Values at shared nodes must not change when the grid is refined."""
    settings = ctx.config.force
    fine_grid = (2 * grid[0] - 1, 2 * grid[1] - 1)
    fine = force.force_surface(ctx.config.finger, ctx.config.springs, surface.theta1_deg,
                               settings.p_range_w, settings.r_range_mm, fine_grid, settings.omega1_deg_s)
    shared = fine.values[::2, ::2]
    return bool(np.array_equal(shared.data, surface.values.data)
                and np.array_equal(np.ma.getmaskarray(shared), surface.singular))


def run(args, ctx: CommandContext) -> CommandResult:
    settings = ctx.config.force
    theta_list = args.theta1 if args.theta1 is not None else settings.theta1_deg
    grid = tuple(args.grid) if args.grid else settings.grid
    if min(grid) < 1:
        raise ConfigurationError(f"grid needs at least one node per axis, got {grid}")

    surfaces = force.surfaces(ctx.config.finger, ctx.config.springs, theta_list,
                              settings.p_range_w, settings.r_range_mm, grid, settings.omega1_deg_s)
    result = CommandResult()
    for surface in surfaces:
        stem = f"force_theta{surface.theta1_deg:g}"
        result.output_paths.append(export.write_force_csv(ctx.out_dir / f"{stem}.csv", surface))
        if ctx.emit_svg:
            result.output_paths.append(
                export.plot_force_surface(ctx.out_dir / f"{stem}.svg", surface, ctx.deterministic_svg))
        result.summary.append(f"theta1={surface.theta1_deg:g} deg singular={int(surface.singular.sum())} "
                              f"nesting {pass_fail(_nesting_ok(ctx, surface, grid))}")

    ordered = sorted(surfaces, key=lambda s: s.theta1_deg)
    for lower, upper in zip(ordered, ordered[1:]):
        result.summary.append(
            f"dominance {upper.theta1_deg:g} > {lower.theta1_deg:g} {pass_fail(force.dominates(upper, lower))} "
            f"shape_correlation={force.shape_correlation(upper, lower):.4f}")
    return result
