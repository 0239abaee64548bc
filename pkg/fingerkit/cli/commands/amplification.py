"""`amplification`: rod BD sweep against the push-link sweep."""
from fingerkit.cli.context import CommandContext, CommandResult
from fingerkit.services import mechanism

NAME = "amplification"


def register(subparsers):
    parser = subparsers.add_parser(NAME, help="rocker amplification over the nominal stroke")
    parser.set_defaults(handler=run)


def run(args, ctx: CommandContext) -> CommandResult:
    amp = mechanism.rocker_amplification(ctx.config.finger)
    line = (f"input_sweep={amp.input_sweep.degrees:.2f} deg output_sweep={amp.output_sweep.degrees:.2f} deg "
            f"ratio={amp.ratio:.3f}")
    return CommandResult(summary=[line])
