"""`scan`: four-bar (L_AG, L_DG) design scan."""
from fingerkit.cli.context import CommandContext, CommandResult
from fingerkit.core.errors import InsufficientData
from fingerkit.core.logging_config import logger
from fingerkit.schemas import ScanSpec
from fingerkit.services import export
from fingerkit.services.cache import cached_scan
from fingerkit.services.optimize import optimum_report, result_summary, sensitivity

NAME = "scan"


def register(subparsers):
    parser = subparsers.add_parser(NAME, help="scan the four-bar design space")
    parser.add_argument("--resolution", type=float, help="grid resolution in mm")
    parser.set_defaults(handler=run)


def _cell_line(label: str, cell) -> str:
    line = f"{label} L_AG={cell.l_ag:g} L_DG={cell.l_dg:g} delta_theta_max={cell.delta_theta_max_deg:.3f} deg"
    if cell.min_transmission_deg is not None:
        line += f" min_transmission={cell.min_transmission_deg:.2f} deg"
    return line


def run(args, ctx: CommandContext) -> CommandResult:
    spec = ctx.config.scan
    if args.resolution is not None:
        spec = ScanSpec.model_validate({**spec.model_dump(), "resolution": args.resolution})

    scan_result, hit = cached_scan(spec, ctx.cache_dir, ctx.use_cache)
    report = optimum_report(scan_result, spec)

    result = CommandResult(cache_hit=hit)
    result.output_paths.append(export.write_scan_csv(ctx.out_dir / "scan.csv", scan_result))
    if ctx.emit_svg:
        result.output_paths.append(
            export.plot_scan_heatmap(ctx.out_dir / "scan.svg", scan_result, report, ctx.deterministic_svg))

    counts = result_summary(scan_result)
    result.summary.append(f"cells={scan_result.n_cells} " + " ".join(f"{k}={v}" for k, v in counts.items()))
    result.summary.append(_cell_line("argmax", report.argmax))
    result.summary.append(_cell_line(f"closest_to_{report.target_deg:g}", report.closest))
    if report.reference is not None:
        if report.reference.feasible:
            result.summary.append(_cell_line("reference", report.reference))
        else:
            result.summary.append(f"reference L_AG={report.reference.l_ag:g} L_DG={report.reference.l_dg:g} "
                                  f"infeasible ({report.reference.reason})")
    try:
        stats = sensitivity(scan_result)
        result.summary.append(f"sensitivity r={stats.r:.4f} slope_AG={stats.slope_ag:.4f} deg/mm "
                              f"slope_DG_below_60={stats.slope_dg_below_60:.4f} deg/mm")
    except InsufficientData as e:
        logger.warning(f"Sensitivity skipped: {e.detail}")
        result.summary.append(f"sensitivity unavailable: {e.detail}")
    result.summary.append(f"cache_hit={'true' if hit else 'false'}")
    return result
