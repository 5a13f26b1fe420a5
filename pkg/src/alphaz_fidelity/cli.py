"""Command-line interface for the alpha-z-fidelity toolkit."""

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, NoReturn, Optional, Sequence

import click

from .channels import ChannelClass, channel_class_extrema, channel_to_json, pure_state_extrema
from .config import Settings
from .errors import (
    ConfigError,
    PreconditionError,
    RangeError,
    SupportError,
    UnsupportedRegionError,
    ValidationError,
)
from .fidelity import ParamPoint, alpha_z_fidelity, renyi_from_fidelity, supports_included
from .geometry import (
    SubspacePair,
    commuting_subspace_formula,
    compression_bounds,
    intersection_dim,
    printed_subspace_bounds,
    subspace_bounds,
    subspace_fidelity_trace,
)
from .logging_config import get_logger, setup_logging
from .orbits import orbit_max, orbit_min
from .sources import parse_projector_source, parse_state_source
from .states import DensityMatrix, matrix_to_json, subspace_state
from .suite import REGISTRY, SuiteConfig, SuiteRunner, suite_passed

logger = get_logger(__name__)

SWEEP_HEADER = ("alpha", "z", "region", "T", "F", "S", "orbit_max", "orbit_min")
EXTREMAL_TARGETS = ("orbit-max", "orbit-min", "channel-all", "mixed-unitary", "pure-state")

# Failures of the mathematics exit 1, failures of the input exit 2.
EXIT_FAILURE = 1
EXIT_USAGE = 2
_DOMAIN_ERRORS = (UnsupportedRegionError, RangeError, SupportError, PreconditionError)


def _exit_code(error: Exception) -> int:
    if isinstance(error, _DOMAIN_ERRORS):
        return EXIT_FAILURE
    if isinstance(error, (ValidationError, ConfigError, ValueError)):
        return EXIT_USAGE
    return EXIT_FAILURE


def _fail(error: Exception, debug: bool = False) -> NoReturn:
    """Print the error to stderr and exit with its mapped status."""
    code = _exit_code(error)
    logger.error(f"{type(error).__name__}: {error}", exc_info=debug)
    click.echo(f"Error: {error}", err=True)
    if isinstance(error, UnsupportedRegionError) and error.stated_region:
        click.echo(f"Covered region: {error.stated_region}", err=True)
    sys.exit(code)


def _number(value: Optional[float]) -> Any:
    """JSON-safe float: infinities become the strings "inf" / "-inf"."""
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


def _divergence(fidelity: float, included: bool, p: ParamPoint) -> float:
    """S_{alpha,z} from an evaluated F; +inf whenever supp(rho) is not inside supp(sigma), for any alpha."""
    if not included:
        return math.inf
    return renyi_from_fidelity(fidelity, p.alpha)


def _emit(ctx: click.Context, record: Any) -> None:
    """Write a record as JSON (``--json``) or as ``key: value`` lines, to ``--out`` or stdout."""
    if ctx.obj["json"] or not isinstance(record, dict):
        text = json.dumps(record, indent=2)
    else:
        lines = []
        for key, value in record.items():
            shown = json.dumps(value) if isinstance(value, (dict, list)) else value
            lines.append(f"{key}: {shown}")
        text = "\n".join(lines)
    _write(ctx, text + "\n")


def _write(ctx: click.Context, text: str) -> None:
    out = ctx.obj["out"]
    if out is None:
        click.echo(text, nl=False)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise ValidationError(f"cannot write output file {out}: {e}")
    logger.info(f"Output written to {out}")


def _states(ctx: click.Context, rho_src: str, sigma_src: str) -> Sequence[DensityMatrix]:
    seed = ctx.obj["settings"].seed
    return parse_state_source(rho_src, seed, stream=0), parse_state_source(sigma_src, seed, stream=1)


def _float_list(raw: str, name: str) -> List[float]:
    try:
        values = [float(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"--{name} must be a comma-separated list of numbers, got '{raw}'")
    if not values:
        raise ValidationError(f"--{name} must not be empty")
    return values


@click.group()
@click.option("--seed", type=int, default=None, help="Global seed for generator specs and sampling (env: AZFID_SEED, default 42)")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON records instead of key: value lines")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write output to this file instead of stdout")
@click.option("--tolerance", type=float, default=None, help="Pass/fail tolerance for verification margins (default: 1e-9)")
@click.option(
    "--log-level",
    default=None,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    help="Set the logging level (default: INFO, env: AZFID_LOG_LEVEL)",
)
@click.option("--debug", is_flag=True, help="Enable debug logging and the symmetric-form cross-check")
@click.version_option(package_name="alphaz-fidelity")
@click.pass_context
def main(
    ctx: click.Context,
    seed: Optional[int],
    as_json: bool,
    out: Optional[str],
    tolerance: Optional[float],
    log_level: Optional[str],
    debug: bool,
) -> None:
    """Compute and verify the two-parameter alpha-z-fidelity of quantum states.

    States are read from JSON matrix files ({"dim": d, "entries": [[[re, im], ...]]})
    or generated from specs such as ginibre:d=4,rank=4,seed=7, maxmixed:d=4,
    diag:p=0.7/0.3 and haar-pure:d=3,seed=1.

    Examples:

        # F, T and S for a pair of generated states
        azfid compute ginibre:d=4,seed=1 ginibre:d=4,seed=2 --alpha 0.5 --z 0.5

        # Closed-form orbit maximum with its achieving unitary
        azfid --json extremal diag:p=0.7/0.3 diag:p=0.6/0.4 --alpha 2 --z 1.5 --target orbit-max

        # Run the property suite
        azfid verify --out report.json
    """
    try:
        settings = Settings.from_env(
            seed=seed,
            tolerance=tolerance,
            log_level=log_level,
            debug=True if debug else None,
        )
    except ValueError as e:
        click.echo(f"Configuration Error: {e}", err=True)
        sys.exit(EXIT_USAGE)

    setup_logging(level=settings.log_level, debug=settings.debug)
    settings.activate()
    logger.debug(f"Settings: seed={settings.seed}, tolerance={settings.tolerance}, debug={settings.debug}")

    ctx.ensure_object(dict)
    ctx.obj.update(settings=settings, json=as_json, out=out)


@main.command()
@click.argument("rho_src")
@click.argument("sigma_src")
@click.option("--alpha", type=float, required=True, help="Order alpha > 0")
@click.option("--z", type=float, required=True, help="Parameter z > 0")
@click.pass_context
def compute(ctx: click.Context, rho_src: str, sigma_src: str, alpha: float, z: float) -> None:
    """Evaluate T, F and S at (alpha, z) for RHO_SRC against SIGMA_SRC.

    Without supp(rho) inside supp(sigma), S is reported as "inf" and
    support_violation is set; for alpha > 1, T and F are then evaluated on the
    support of sigma.
    """
    debug = ctx.obj["settings"].debug
    try:
        p = ParamPoint.of(alpha, z)
        rho, sigma = _states(ctx, rho_src, sigma_src)
        value = alpha_z_fidelity(rho, sigma, p, strict=False)
        included = supports_included(rho, sigma)
        s = None if p.alpha == 1 else _divergence(value.fidelity, included, p)
        _emit(
            ctx,
            {
                "alpha": p.alpha,
                "z": p.z,
                "region": p.region.value,
                "T": value.trace_quantity,
                "F": value.fidelity,
                "S": _number(s),
                "support_violation": not included,
                "commuting": value.commuting,
            },
        )
    except Exception as e:
        _fail(e, debug)


def _extremal_record(target: str, rho: DensityMatrix, sigma: Optional[DensityMatrix], p: ParamPoint) -> Dict[str, Any]:
    record: Dict[str, Any] = {"target": target, "alpha": p.alpha, "z": p.z, "region": p.region.value}
    if target == "pure-state":
        ext = pure_state_extrema(rho, p)
        record.update(
            value=ext.value,
            kind=ext.kind,
            achiever={"type": "state", "description": f"eigenvector of rho for lambda_{ext.kind}", "matrix": matrix_to_json(ext.state.matrix)},
        )
        return record
    if sigma is None:
        raise ValidationError(f"target {target} needs a sigma source")
    if target in ("orbit-max", "orbit-min"):
        ext = orbit_max(rho, sigma, p) if target == "orbit-max" else orbit_min(rho, sigma, p)
        record.update(
            value=ext.value,
            kind=ext.kind.value,
            achiever={
                "type": "unitary",
                "description": f"{ext.pairing.value} pairing of eigenbases ({ext.branch})",
                "matrix": matrix_to_json(ext.achieving_unitary.matrix),
            },
        )
        return record
    channel_class = ChannelClass.ALL if target == "channel-all" else ChannelClass.MIXED_UNITARY
    ext = channel_class_extrema(rho, sigma, channel_class, p)
    record.update(
        value=ext.value,
        kind=ext.kind,
        proven=ext.proven,
        achiever={"type": "channel", "description": ext.description, "channel": channel_to_json(ext.channel)},
    )
    return record


@main.command()
@click.argument("rho_src")
@click.argument("sigma_src", required=False)
@click.option("--alpha", type=float, required=True, help="Order alpha > 0")
@click.option("--z", type=float, required=True, help="Parameter z > 0")
@click.option("--target", type=click.Choice(EXTREMAL_TARGETS), required=True, help="Which closed-form extremum to evaluate")
@click.pass_context
def extremal(ctx: click.Context, rho_src: str, sigma_src: Optional[str], alpha: float, z: float, target: str) -> None:
    """Closed-form extremum of F(rho, .) with the unitary, channel or state that attains it.

    orbit-max / orbit-min range over U sigma U*, channel-all and mixed-unitary over
    Phi(sigma), and pure-state over pure states (SIGMA_SRC is not used).
    """
    debug = ctx.obj["settings"].debug
    try:
        p = ParamPoint.of(alpha, z)
        seed = ctx.obj["settings"].seed
        rho = parse_state_source(rho_src, seed, stream=0)
        sigma = parse_state_source(sigma_src, seed, stream=1) if sigma_src else None
        _emit(ctx, _extremal_record(target, rho, sigma, p))
    except Exception as e:
        _fail(e, debug)


def _cell(value: Optional[float]) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def _sweep_row(rho: DensityMatrix, sigma: DensityMatrix, p: ParamPoint) -> List[str]:
    value = alpha_z_fidelity(rho, sigma, p, strict=False)
    s = _divergence(value.fidelity, supports_included(rho, sigma), p)
    extrema: List[Optional[float]] = []
    for extremum in (orbit_max, orbit_min):
        try:
            extrema.append(extremum(rho, sigma, p).value)
        except (UnsupportedRegionError, PreconditionError) as e:
            logger.debug(f"{extremum.__name__} left empty at {p}: {e}")
            extrema.append(None)
    return [
        _cell(p.alpha),
        _cell(p.z),
        p.region.value,
        _cell(value.trace_quantity),
        _cell(value.fidelity),
        _cell(s),
        _cell(extrema[0]),
        _cell(extrema[1]),
    ]


@main.command()
@click.argument("rho_src")
@click.argument("sigma_src")
@click.option("--alphas", required=True, help="Comma-separated alpha grid, e.g. 0.3,0.5,2")
@click.option("--zs", required=True, help="Comma-separated z grid, e.g. 0.5,1,1.5")
@click.option("--workers", type=click.IntRange(min=1), default=1, help="Rows computed concurrently (default: 1)")
@click.pass_context
def sweep(ctx: click.Context, rho_src: str, sigma_src: str, alphas: str, zs: str, workers: int) -> None:
    """Evaluate a grid of (alpha, z) and write CSV rows, alpha outer and z inner.

    Columns: alpha,z,region,T,F,S,orbit_max,orbit_min. Extrema without a closed
    form at a grid point are left empty; rows at alpha = 1 are rejected.
    """
    debug = ctx.obj["settings"].debug
    try:
        alpha_grid, z_grid = _float_list(alphas, "alphas"), _float_list(zs, "zs")
        rejected = [f"alpha={a:g} z={z:g}" for a in alpha_grid for z in z_grid if a == 1]
        if rejected:
            click.echo(f"Rejected rows at alpha = 1: {', '.join(rejected)}", err=True)
        points = [ParamPoint.of(a, z) for a in alpha_grid if a != 1 for z in z_grid]
        rho, sigma = _states(ctx, rho_src, sigma_src)
        logger.info(f"Sweeping {len(points)} grid points with {workers} worker(s)")

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(lambda p: _sweep_row(rho, sigma, p), points))
        else:
            rows = [_sweep_row(rho, sigma, p) for p in points]

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        writer.writerows(rows)
        _write(ctx, buffer.getvalue())
    except Exception as e:
        _fail(e, debug)


@main.command()
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@click.option("--check", "checks", multiple=True, help="Run only this check id (repeatable)")
@click.option("--trials", type=int, default=None, help="Haar samples per orbit search")
@click.option("--workers", type=int, default=None, help="Checks run concurrently")
@click.option("--acceptance", is_flag=True, help="Use the sample counts of the acceptance criteria (slow)")
@click.option("--list", "list_checks", is_flag=True, help="List registered check ids and exit")
@click.pass_context
def verify(
    ctx: click.Context,
    config_path: Optional[str],
    checks: Sequence[str],
    trials: Optional[int],
    workers: Optional[int],
    acceptance: bool,
    list_checks: bool,
) -> None:
    """Run the property suite and print its JSON report.

    CONFIG_PATH is an optional JSON object with SuiteConfig fields; seed, tolerance,
    trials, workers and checks given on the command line or through AZFID_* win
    over it. Exit status is 0 when every asserted check passes, 1 when any fails,
    2 on a bad configuration.
    """
    settings: Settings = ctx.obj["settings"]
    try:
        if list_checks:
            for spec in REGISTRY.values():
                suffix = " (informational)" if spec.informational else ""
                click.echo(f"{spec.check_id}\t{spec.anchor}{suffix}")
            return

        profile = "acceptance" if acceptance else None
        overrides: Dict[str, Any] = {
            "checks": list(checks) or None,
            "trials": trials,
            "workers": workers,
        }
        if config_path is not None:
            # Only seed and tolerance set explicitly or through AZFID_* override the file.
            configured = settings.model_fields_set
            overrides["seed"] = settings.seed if "seed" in configured else None
            overrides["tolerance"] = settings.tolerance if "tolerance" in configured else None
            config = SuiteConfig.from_file(config_path, profile=profile, **overrides)
        else:
            config = SuiteConfig.build(
                profile=profile,
                seed=settings.seed,
                tolerance=settings.tolerance,
                **{k: v for k, v in overrides.items() if v is not None},
            )
        reports = SuiteRunner(config).run()
        # Keep the JSON report parseable regardless of --json.
        _write(ctx, json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
        summary = SuiteRunner.summary(reports)
        click.echo(
            f"{summary['passed']} passed, {summary['failed']} failed, {summary['informational']} informational",
            err=True,
        )
    except Exception as e:
        _fail(e, settings.debug)
    sys.exit(0 if suite_passed(reports) else EXIT_FAILURE)


@main.command()
@click.argument("first_src")
@click.argument("second_src")
@click.option("--alpha", type=float, required=True, help="Order alpha > 0")
@click.option("--z", type=float, required=True, help="Parameter z > 0")
@click.option("--rho", "rho_src", default=None, help="State whose compression bounds against SECOND_SRC / n are reported")
@click.pass_context
def subspace(ctx: click.Context, first_src: str, second_src: str, alpha: float, z: float, rho_src: Optional[str]) -> None:
    """Fidelity of the subspace states P/m and Q/n with the dimension-count bounds.

    Projectors come from JSON files or specs such as coordinate:d=4,axes=0/1 and
    haar-subspace:d=4,m=2,seed=5.
    """
    debug = ctx.obj["settings"].debug
    try:
        p = ParamPoint.of(alpha, z)
        seed = ctx.obj["settings"].seed
        pair = SubspacePair.of(
            parse_projector_source(first_src, seed, stream=0),
            parse_projector_source(second_src, seed, stream=1),
        )
        fidelity = subspace_fidelity_trace(pair, p)
        k = intersection_dim(pair)
        commutes = pair.commutes()
        bounds = subspace_bounds(pair.m, pair.n, pair.dim, p.alpha)
        printed = printed_subspace_bounds(pair.m, pair.n, pair.dim, p.alpha, p.z)
        record: Dict[str, Any] = {
            "alpha": p.alpha,
            "z": p.z,
            "d": pair.dim,
            "m": pair.m,
            "n": pair.n,
            "intersection_dim": k,
            "commuting": commutes,
            "T": fidelity.trace_quantity,
            "support_warning": fidelity.support_warning,
            "commuting_formula": commuting_subspace_formula(pair.m, pair.n, k, p.alpha) if commutes else None,
            "bounds": {"lower": bounds.lower, "upper": bounds.upper},
            "printed_bounds": {"lower": printed.lower, "upper": printed.upper},
        }
        if rho_src is not None:
            rho = parse_state_source(rho_src, seed, stream=2)
            if rho.dim != pair.dim:
                raise ValidationError(f"rho has dimension {rho.dim}, projectors have {pair.dim}")
            compression = compression_bounds(rho, pair.n, p)
            t = alpha_z_fidelity(rho, subspace_state(pair.second), p, strict=False).trace_quantity
            record["compression"] = {"T": t, "lower": compression.lower, "upper": compression.upper}
        _emit(ctx, record)
    except Exception as e:
        _fail(e, debug)


if __name__ == "__main__":
    main()
