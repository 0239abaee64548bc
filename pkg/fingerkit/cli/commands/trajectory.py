"""`trajectory`: two-stage fingertip motion, velocity event and workspace area."""
from fingerkit.cli.context import CommandContext, CommandResult, pass_fail
from fingerkit.services import export, mechanism

NAME = "trajectory"

# Rise over which the pushed path must follow the original one (mm)
COINCIDENCE_RISE_MM = 16.0


def register(subparsers):
    parser = subparsers.add_parser(NAME, help="simulate the fingertip over one press")
    parser.add_argument("--omega1", type=float, help="crank rate in deg/s")
    parser.add_argument("--dt", type=float, help="sample interval in s")
    parser.add_argument("--no-push", action="store_true", help="disable the Q2 trigger (original path only)")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext) -> CommandResult:
    finger = ctx.config.finger
    settings = ctx.config.trajectory
    omega1 = args.omega1 if args.omega1 is not None else settings.omega1_deg_s
    dt = args.dt if args.dt is not None else settings.dt_s
    pushed = settings.pushed and not args.no_push

    original = mechanism.simulate(finger, omega1, dt, pushed=False)
    actual = mechanism.simulate(finger, omega1, dt, pushed=True) if pushed else original

    result = CommandResult()
    result.output_paths.append(export.write_trajectory_csv(ctx.out_dir / "trajectory.csv", actual))
    if pushed:
        result.output_paths.append(export.write_trajectory_csv(ctx.out_dir / "trajectory_original.csv", original))
    if ctx.emit_svg:
        result.output_paths.append(
            export.plot_trajectory(ctx.out_dir / "trajectory.svg", actual, original, ctx.deterministic_svg))

    area = mechanism.workspace_area(finger, pushed=pushed)
    result.summary.append(f"area={area:.2f} mm2 original_area={mechanism.workspace_area(finger, pushed=False):.2f} mm2")
    end, start = actual.samples[-1], actual.samples[0]
    result.summary.append(f"end x={end.I.x:.2f} mm y={end.I.y:.2f} mm "
                          f"lift={end.I.y - original.samples[-1].I.y:.2f} mm")
    if pushed:
        rise = mechanism.path_coincidence(finger, omega1, dt)
        result.summary.append(f"coincidence rise={rise:.2f} mm (>= {COINCIDENCE_RISE_MM:g} mm) "
                              f"{pass_fail(rise >= COINCIDENCE_RISE_MM)}")
        jump = mechanism.velocity_jump(actual)
        result.summary.append(f"t={jump.t_s:.3f}s vx={jump.vx_after:.3f}mm/s")
    result.summary.append(f"samples={len(actual)} duration={end.t - start.t:.3f} s")
    return result
