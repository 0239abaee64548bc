"""`hoeckens-path`: point-D path and its near-linear band."""
from fingerkit.cli.context import CommandContext, CommandResult
from fingerkit.core.logging_config import logger
from fingerkit.services import export, hoeckens

NAME = "hoeckens-path"


def register(subparsers):
    parser = subparsers.add_parser(NAME, help="trace point D and report the linear band")
    parser.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), dest="theta_range",
                        help="crank range in deg (default from config)")
    parser.add_argument("--step", type=float, help="crank step in deg")
    parser.add_argument("--budget", type=float, help="deviation budget in units of l")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext) -> CommandResult:
    settings = ctx.config.hoeckens_path
    params = ctx.config.finger.hoeckens
    theta_range = tuple(args.theta_range) if args.theta_range else settings.range_deg
    step = args.step if args.step is not None else settings.step_deg
    budget = args.budget if args.budget is not None else settings.deviation_budget
    logger.info(f"Hoeckens path over {theta_range} deg, step {step} deg")

    trace = hoeckens.trace(params, theta_range, step)
    band = hoeckens.linear_band(params, theta_range, step, budget)
    result = CommandResult()
    result.output_paths.append(export.write_hoeckens_path_csv(ctx.out_dir / "hoeckens_path.csv", trace))
    if ctx.emit_svg:
        result.output_paths.append(
            export.plot_hoeckens_path(ctx.out_dir / "hoeckens_path.svg", trace, band, ctx.deterministic_svg))

    result.summary.append(
        f"band=[{band.theta_lo.degrees:.2f}, {band.theta_hi.degrees:.2f}] deg "
        f"max_deviation={band.max_deviation:.4f} l lateral={band.lateral_deviation:.4f} l "
        f"samples={band.samples}")
    result.summary.append(
        f"rod_sweep={hoeckens.rod_sweep(params, (band.theta_lo.degrees, band.theta_hi.degrees), step):.2f} deg")
    return result
