"""Command-line front end.

Every subcommand resolves its flags (and an optional ``--config`` file)
into a :class:`~ptspectra.config.RunConfig` and hands it to :func:`run`.
Trajectories go out as CSV or JSON, every other result as JSON, each file
headed by the resolved configuration.

Exit status: 0 on success, 1 for invalid input, 2 for numerical failure.
"""

from __future__ import annotations

import time
import traceback as tb
from dataclasses import replace
from typing import Any, Callable, List, Mapping, Optional, Sequence, Tuple

import click

from ptspectra import __version__
from ptspectra.closed_forms import (
    OscillatorPair,
    TwoLevelDetuned,
    TwoLevelGainCoupling,
    threshold_detuned,
    threshold_gain_coupling,
    threshold_oscillators,
)
from ptspectra.config import RunConfig, load_config_file, parse_grid, parse_size, parse_sizes
from ptspectra.configure import configure
from ptspectra.errors import InvalidInputError, NumericalError, PTSpectraError
from ptspectra.families import (
    DetunedFamily,
    GainCouplingFamily,
    H2Family,
    H3Family,
    SpectralFamily,
)
from ptspectra.hamiltonians import ModelH2
from ptspectra.logger import get_default_logger
from ptspectra.models import CallRecord, Label, Trajectory, format_label, parse_label, summarize
from ptspectra.rspe import h2_perturbation, rspe_matrix, series_lambda_pm, two_level_perturbation
from ptspectra.scan import (
    ScanConfig,
    certify_levels,
    locate_threshold,
    scan,
    truncation_convergence,
)
from ptspectra.sinks import JSONReportSink, TrajectoryCSVSink
from ptspectra.terminal import format_complex, show_table


PROG = "ptspectra"


# ---------------------------------------------------------------------------
# Logged group with exit-status mapping
# ---------------------------------------------------------------------------

class LoggedGroup(click.Group):
    """Click group that records each command invocation in the run log and
    turns ptspectra errors into a one-line diagnostic plus exit status."""

    def invoke(self, ctx: click.Context) -> Any:
        start = time.perf_counter()
        try:
            result = super().invoke(ctx)
        except PTSpectraError as exc:
            self._record(ctx, start, exc)
            click.echo(diagnostic(exc), err=True)
            ctx.exit(2 if isinstance(exc, NumericalError) else 1)
        self._record(ctx, start, None)
        return result

    @staticmethod
    def _record(ctx: click.Context, start: float, exc: Optional[BaseException]) -> None:
        record = CallRecord(
            timestamp=CallRecord.now(),
            level="ERROR" if exc is not None else "INFO",
            function_name=f"cli.{ctx.invoked_subcommand or ctx.info_name}",
            module="click",
            kwargs={k: summarize(v) for k, v in (ctx.params or {}).items()},
            duration_ms=(time.perf_counter() - start) * 1000,
        )
        if exc is not None:
            record.exception = str(exc)
            record.exception_type = type(exc).__name__
            record.traceback = tb.format_exc()
        get_default_logger().emit(record)


def diagnostic(exc: PTSpectraError) -> str:
    if isinstance(exc, NumericalError):
        text = f"{PROG}: error[numerical]: {exc.args[0] if exc.args else exc}"
        ctx = exc.context()
        return f"{text} {ctx}" if ctx else text
    return f"{PROG}: error[config]: {exc}"


# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------

def _load_config(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> None:
    if not value:
        return
    values = load_config_file(value)
    # keys may be parameter names or long flags ("eps" for --eps)
    known = {}
    for p in ctx.command.params:
        if not p.expose_value:
            continue
        known[p.name] = p.name
        for opt in getattr(p, "opts", []):
            if opt.startswith("--"):
                known[opt[2:].replace("-", "_")] = p.name
    unknown = sorted(set(values) - set(known))
    if unknown:
        raise InvalidInputError(f"{value}: unknown key(s) for {ctx.info_name}: {', '.join(unknown)}")
    resolved = {known[k]: v for k, v in values.items()}
    ctx.default_map = {**(ctx.default_map or {}), **resolved}


def common_options(func: Callable) -> Callable:
    """``--config``, ``--threads``, ``--output`` and ``--show``."""
    func = click.option(
        "--show", is_flag=True, default=False,
        help="Print a summary table on stderr.",
    )(func)
    func = click.option(
        "--output", "-o", default="-", show_default=True,
        help="Output file ('-' for stdout).",
    )(func)
    func = click.option(
        "--threads", type=click.IntRange(min=0), default=0, envvar="PT_SPECTRA_THREADS",
        show_default=True, help="Worker threads for grid points (0 = one per CPU).",
    )(func)
    func = click.option(
        "--config", "config_file", type=click.Path(dir_okay=False), is_eager=True,
        expose_value=False, callback=_load_config,
        help="Flat key=value file with defaults for these flags.",
    )(func)
    return func


def scan_options(default_eps: Optional[str] = None, default_trunc: Optional[str] = None) -> Callable:
    """Continuation knobs shared by every model-driven command."""

    def decorator(func: Callable) -> Callable:
        func = click.option("--no-refine", is_flag=True, default=False,
                            help="Skip grid refinement around reality flips.")(func)
        func = click.option("--jump-ratio", type=float, default=0.25, show_default=True,
                            help="Clear-cut ratio for jumping straight to a coupling (0 = always step).")(func)
        func = click.option("--path-step", type=float, default=0.02, show_default=True,
                            help="Coupling step when walking from 0 to a single coupling.")(func)
        func = click.option("--match-tol", type=float, default=1.0, show_default=True)(func)
        func = click.option("--reality-tol", type=float, default=1e-8, show_default=True,
                            help="Relative |Im| tolerance.")(func)
        func = click.option("--quad-order", type=int, default=None,
                            help="Starting quadrature order for H3 (size-based by default).")(func)
        func = click.option("--ref-trunc", default=None,
                            help="Reference truncation (default: doubled).")(func)
        func = click.option("--trunc", default=default_trunc,
                            help="Truncation: N, or AxB for H2.")(func)
        if default_eps is not None:
            func = click.option("--eps", "eps_grid", default=default_eps, show_default=True,
                                help="Coupling grid: start:stop:step or a comma list.")(func)
        return func

    return decorator


def h2_options(required: bool = True) -> Callable:
    def decorator(func: Callable) -> Callable:
        func = click.option("--s", "s", type=int, default=1, show_default=True)(func)
        func = click.option("--r", "r", type=int, default=1, show_default=True)(func)
        func = click.option("--omega2", type=float, required=required)(func)
        func = click.option("--omega1", type=float, required=required)(func)
        return func

    return decorator


def _scan_config(opts: Mapping[str, Any], **overrides: Any) -> ScanConfig:
    trunc = opts.get("trunc")
    ref = opts.get("ref_trunc")
    fields = dict(
        truncation=parse_size(trunc) if trunc else None,
        reference_truncation=parse_size(ref) if ref else None,
        quad_order=opts.get("quad_order"),
        reality_tol=opts.get("reality_tol", 1e-8),
        match_tol=opts.get("match_tol", 1.0),
        path_step=opts.get("path_step", 0.02),
        jump_ratio=opts.get("jump_ratio", 0.25),
        refine=not opts.get("no_refine", False),
    )
    if opts.get("eps_grid") is not None:
        fields["eps_grid"] = parse_grid(opts["eps_grid"])
    if opts.get("levels") is not None:
        fields["track_count"] = opts["levels"]
    fields.update(overrides)
    return ScanConfig(**fields)


_SCAN_KEYS = ("trunc", "ref_trunc", "quad_order", "reality_tol", "match_tol", "path_step",
              "jump_ratio", "no_refine", "eps_grid", "levels")
_IO_KEYS = ("output", "threads", "show", "fmt")


def _params(opts: Mapping[str, Any]) -> dict:
    return {k: v for k, v in opts.items() if k not in _SCAN_KEYS + _IO_KEYS and v is not None}


def _make_config(command: str, variant: Optional[str], opts: Mapping[str, Any], **scan_overrides: Any) -> RunConfig:
    return RunConfig(
        command=command,
        variant=variant,
        params=_params(opts),
        scan=_scan_config(opts, **scan_overrides),
        output=opts.get("output", "-"),
        format=opts.get("fmt") or "json",
        threads=opts.get("threads", 0),
    )


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def _need(params: Mapping[str, Any], name: str) -> Any:
    if params.get(name) is None:
        raise InvalidInputError(f"--{name.replace('_', '-')} is required for this model")
    return params[name]


def build_family(variant: str, params: Mapping[str, Any], quad_order: Optional[int] = None) -> SpectralFamily:
    if variant == "h3":
        return H3Family(quad_order)
    if variant == "h2":
        m = ModelH2(float(_need(params, "omega1")), float(_need(params, "omega2")),
                    int(params.get("r", 1)), int(params.get("s", 1)))
        return H2Family(m)
    if variant == "gain":
        return GainCouplingFamily(float(_need(params, "e1")), float(_need(params, "e2")))
    if variant == "detuned":
        return DetunedFamily(float(_need(params, "e")), float(_need(params, "b")))
    raise InvalidInputError(f"unknown model {variant!r}")


def parse_pair(text: str) -> Tuple[Label, Label]:
    """``"0/1"`` or ``"0,0/1,0"``."""
    try:
        a, b = str(text).split("/")
        return parse_label(a), parse_label(b)
    except ValueError:
        raise InvalidInputError(f"pair must look like A/B (e.g. 0/1 or 0,0/1,0), got {text!r}") from None


def parse_labels(text: str) -> List[Label]:
    """``"0"``, ``"0/1/2"`` or ``"0,0/1,0"``."""
    try:
        return [parse_label(part) for part in str(text).split("/")]
    except ValueError:
        raise InvalidInputError(f"labels must look like A/B/... (e.g. 0/1 or 0,0/1,0), got {text!r}") from None


def _closed_form_threshold(variant: str, params: Mapping[str, Any]) -> Optional[float]:
    if variant == "gain":
        return threshold_gain_coupling(TwoLevelGainCoupling(params["e1"], params["e2"], 0.0))
    if variant == "detuned":
        return threshold_detuned(TwoLevelDetuned(params["e"], params["b"], 0.0))
    return None


def emit_trajectories(
    trajs: Sequence[Trajectory],
    format: str,
    path: str,
    header: Optional[Mapping[str, Any]] = None,
) -> None:
    """Write trajectories as long-format CSV or as a JSON document."""
    if format == "csv":
        TrajectoryCSVSink(path, header).write(list(trajs))
    elif format == "json":
        JSONReportSink(path, header).write({"trajectories": [t.as_dict() for t in trajs]})
    else:
        raise InvalidInputError(f"unknown output format {format!r}")


def _model_variant(cfg: RunConfig) -> str:
    if cfg.command == "scan-h3":
        return "h3"
    if cfg.command == "scan-h2":
        return "h2"
    return cfg.variant or ""


def run(cfg: RunConfig, show: bool = False) -> int:
    """Execute one resolved configuration and write its output. Returns 0;
    failures surface as :class:`PTSpectraError`."""
    cfg.validate()
    header = cfg.resolved_header()
    scan_cfg = replace(cfg.scan, workers=cfg.threads)
    p = cfg.params
    variant = _model_variant(cfg)

    if cfg.command in ("scan-h3", "scan-h2", "matrix2x2"):
        family = build_family(variant, p, scan_cfg.quad_order)
        if cfg.command == "matrix2x2":
            header["threshold"] = repr(_closed_form_threshold(variant, p))
        trajs = scan(family, scan_cfg)
        emit_trajectories(trajs, cfg.format, cfg.output, header)
        if show:
            show_table(
                f"{family.name}: last grid point",
                ["label", "eps", "value", "real", "residual"],
                [
                    (format_label(t.label), t.points[-1].eps, format_complex(t.points[-1].value),
                     t.points[-1].real_flag, f"{t.points[-1].residual:.2e}")
                    for t in trajs
                ],
            )
        return 0

    payload: dict
    if cfg.command == "rspe":
        payload = _run_rspe(cfg.variant, p, scan_cfg.truncation)
    elif cfg.command == "converge":
        family = build_family(variant, p, scan_cfg.quad_order)
        sizes = parse_sizes(p["sizes"])
        payload = truncation_convergence(family, p["eps"], sizes, p["k"], scan_cfg).as_dict()
    elif cfg.command == "threshold":
        family = build_family(variant, p, scan_cfg.quad_order)
        report = locate_threshold(
            family, parse_pair(p["pair"]), (p["real_end"], p["complex_end"]), p["tol"], scan_cfg
        )
        payload = report.as_dict()
        closed = _closed_form_threshold(variant, p)
        if closed is not None:
            payload["closed_form_threshold"] = closed
    else:
        family = build_family(variant, p, scan_cfg.quad_order)
        labels = parse_labels(p["label"])
        certs = certify_levels(family, labels, p["eps"], scan_cfg)
        payload = certs[0].as_dict() if len(certs) == 1 else {"certificates": [c.as_dict() for c in certs]}

    JSONReportSink(cfg.output, header).write(payload)
    if show:
        rows = [(k, v) for k, v in sorted(payload.items()) if not isinstance(v, (dict, list))]
        show_table(f"{cfg.command} {cfg.variant or ''}".strip(), ["field", "value"], rows)
    return 0


def _run_rspe(variant: Optional[str], p: Mapping[str, Any], truncation: Any) -> dict:
    if variant == "two-level":
        h0, w = two_level_perturbation(p["e1"], p["e2"])
        series = rspe_matrix(h0, w, p["level"], p["order"])
        return {
            "series": series.as_dict(),
            "threshold": threshold_gain_coupling(TwoLevelGainCoupling(p["e1"], p["e2"], 0.0)),
        }
    if variant == "lambda-pm":
        plus, minus = series_lambda_pm(p["omega1"], p["omega2"], p["order"])
        return {
            "lambda_plus": plus.as_dict(),
            "lambda_minus": minus.as_dict(),
            "threshold": threshold_oscillators(OscillatorPair(p["omega1"], p["omega2"], 0.0)),
        }
    m = ModelH2(p["omega1"], p["omega2"], p["r"], p["s"])
    size = truncation or (16, 16)
    n1, n2 = size if isinstance(size, tuple) else (size, size)
    if not (0 <= p["n1"] < n1 and 0 <= p["n2"] < n2):
        raise InvalidInputError(f"level ({p['n1']},{p['n2']}) outside the {n1}x{n2} basis")
    h0, w = h2_perturbation(m, n1, n2)
    series = rspe_matrix(h0, w, p["n1"] * n2 + p["n2"], p["order"], name=f"{p['n1']},{p['n2']}")
    return {"series": series.as_dict(), "truncation": [n1, n2]}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@click.group(cls=LoggedGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None, help="Run-log level (default: PT_SPECTRA_LEVEL or WARNING).")
@click.option("--log-sink", multiple=True,
              help="Run-log sink spec, e.g. jsonl:run.jsonl or terminal:color (repeatable).")
@click.version_option(version=__version__, prog_name=PROG)
def cli(log_level: Optional[str], log_sink: Tuple[str, ...]) -> None:
    """Spectra of PT-symmetric Hamiltonians from truncated matrices."""
    configure(level=log_level, sinks=list(log_sink) or None, force=True)


def _format_option(func: Callable) -> Callable:
    return click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                        show_default=True)(func)


@cli.command("scan-h3")
@scan_options(default_eps="0:0.5:0.05", default_trunc="128")
@click.option("--levels", type=int, default=5, show_default=True, help="Lowest levels to track.")
@_format_option
@common_options
def scan_h3_cmd(show: bool, **opts: Any) -> None:
    """Follow the lowest H3 levels across a coupling grid."""
    run(_make_config("scan-h3", None, opts), show=show)


@cli.command("scan-h2")
@h2_options()
@scan_options(default_eps="0:0.5:0.05", default_trunc="32x32")
@click.option("--levels", type=int, default=5, show_default=True)
@_format_option
@common_options
def scan_h2_cmd(show: bool, **opts: Any) -> None:
    """Follow the lowest H2 levels across a coupling grid."""
    run(_make_config("scan-h2", None, opts), show=show)


@cli.group("matrix2x2")
def matrix2x2() -> None:
    """Two-level PT-symmetric models against their closed forms."""


@matrix2x2.command("gain")
@click.option("--e1", type=float, required=True)
@click.option("--e2", type=float, required=True)
@click.option("--eps", "eps_grid", default="0:2:0.01", show_default=True)
@scan_options()
@_format_option
@common_options
def matrix_gain_cmd(show: bool, **opts: Any) -> None:
    """[[e1, i eps], [i eps, e2]]"""
    run(_make_config("matrix2x2", "gain", opts, track_count=2), show=show)


@matrix2x2.command("detuned")
@click.option("--e", "e", type=float, required=True)
@click.option("--b", "b", type=float, required=True)
@click.option("--eps", "eps_grid", default="0:2:0.01", show_default=True)
@scan_options()
@_format_option
@common_options
def matrix_detuned_cmd(show: bool, **opts: Any) -> None:
    """[[e + i eps, b], [b, e - i eps]]"""
    run(_make_config("matrix2x2", "detuned", opts, track_count=2), show=show)


@cli.group("rspe")
def rspe_group() -> None:
    """Rayleigh-Schrodinger series and their convergence radii."""


@rspe_group.command("two-level")
@click.option("--e1", type=float, required=True)
@click.option("--e2", type=float, required=True)
@click.option("--level", type=int, default=0, show_default=True)
@click.option("--order", type=int, default=40, show_default=True)
@common_options
def rspe_two_level_cmd(show: bool, **opts: Any) -> None:
    """Series of a gain-coupling eigenvalue from the matrix recursion."""
    run(_make_config("rspe", "two-level", opts), show=show)


@rspe_group.command("lambda-pm")
@click.option("--omega1", type=float, required=True)
@click.option("--omega2", type=float, required=True)
@click.option("--order", type=int, default=40, show_default=True)
@common_options
def rspe_lambda_pm_cmd(show: bool, **opts: Any) -> None:
    """Closed-form series of the classical eigenvalues lambda+-."""
    run(_make_config("rspe", "lambda-pm", opts), show=show)


@rspe_group.command("h2")
@h2_options()
@click.option("--trunc", default="16x16", show_default=True)
@click.option("--n1", type=int, default=0, show_default=True)
@click.option("--n2", type=int, default=0, show_default=True)
@click.option("--order", type=int, default=8, show_default=True)
@common_options
def rspe_h2_cmd(show: bool, **opts: Any) -> None:
    """Series of one truncated H2 level from the matrix recursion."""
    run(_make_config("rspe", "h2", opts), show=show)


@cli.group("converge")
def converge_group() -> None:
    """Lowest eigenvalues at increasing truncations."""


@converge_group.command("h3")
@click.option("--eps", type=float, required=True)
@click.option("--sizes", default="64,128,256", show_default=True)
@click.option("-k", "k", type=int, default=3, show_default=True)
@scan_options()
@common_options
def converge_h3_cmd(show: bool, **opts: Any) -> None:
    run(_make_config("converge", "h3", opts), show=show)


@converge_group.command("h2")
@h2_options()
@click.option("--eps", type=float, required=True)
@click.option("--sizes", default="16x16,24x24,32x32", show_default=True)
@click.option("-k", "k", type=int, default=1, show_default=True)
@scan_options()
@common_options
def converge_h2_cmd(show: bool, **opts: Any) -> None:
    run(_make_config("converge", "h2", opts), show=show)


def _threshold_command(variant: str, model_options: List[Callable], default_pair: str) -> click.Command:
    def command(show: bool, **opts: Any) -> None:
        run(_make_config("threshold", variant, opts), show=show)

    command.__doc__ = f"Bisect the reality-breaking coupling of a {variant} level pair."
    for option in reversed(model_options):
        command = option(command)
    command = click.option("--pair", default=default_pair, show_default=True,
                           help="Level labels A/B, e.g. 0/1 or 0,0/1,0.")(command)
    command = click.option("--real-end", type=float, required=True,
                           help="Bracket end where the pair is real.")(command)
    command = click.option("--complex-end", type=float, required=True,
                           help="Bracket end where the pair is complex.")(command)
    command = click.option("--tol", type=float, default=1e-8, show_default=True)(command)
    command = scan_options()(command)
    command = common_options(command)
    return threshold_group.command(variant)(command)


@cli.group("threshold")
def threshold_group() -> None:
    """Locate where a pair of levels leaves the real axis."""


_threshold_command("gain", [click.option("--e1", type=float, required=True),
                            click.option("--e2", type=float, required=True)], "0/1")
_threshold_command("detuned", [click.option("--e", "e", type=float, required=True),
                               click.option("--b", "b", type=float, required=True)], "0/1")
_threshold_command("h3", [], "3/4")
_threshold_command("h2", [h2_options()], "0,0/1,0")


@cli.command("certify")
@click.option("--model", "model", type=click.Choice(["h3", "h2", "gain", "detuned"]), required=True)
@click.option("--label", default="0", show_default=True, help="One label, or several joined by '/'.")
@click.option("--eps", type=float, required=True)
@click.option("--e1", type=float, default=None)
@click.option("--e2", type=float, default=None)
@click.option("--e", "e", type=float, default=None)
@click.option("--b", "b", type=float, default=None)
@h2_options(required=False)
@scan_options()
@common_options
def certify_cmd(show: bool, model: str, **opts: Any) -> None:
    """Certify levels real (or not) at one coupling."""
    run(_make_config("certify", model, opts), show=show)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; usage errors exit 1 like other invalid input."""
    try:
        rc = cli.main(args=list(argv) if argv is not None else None, prog_name=PROG, standalone_mode=False)
    except click.ClickException as exc:
        click.echo(f"{PROG}: error[config]: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        click.echo(f"{PROG}: error[config]: aborted", err=True)
        return 1
    return rc if isinstance(rc, int) else 0
