"""The ``isocube`` command line.

Exit codes: 0 on success, 1 when a suite or a decomposition check fails,
2 for usage and input errors, 3 when a request exceeds a dimension cap.
"""

import contextlib
import enum
import json
import logging
import pathlib
from typing import Iterator, List, Optional

import typer

from . import harness
from ._version import __version__
from .cubeset import GeneratorSpec, dump_set, generate, load_set, read_json, write_text
from .decomposition import decompose as run_decompose
from .decomposition import verify_decomposition
from .exceptions import InputError, IsoCubeError
from .isoperimetry import edge_boundary, influence_profile, iso_excess
from .options import mix_options
from .sections import mutual_information, section_table
from .types import JSON, Options

app = typer.Typer(
    help="Edge-isoperimetry checks and subcube decompositions on the n-cube.",
    no_args_is_help=True,
    add_completion=False,
)


class Mode(str, enum.Enum):
    exhaustive = "exhaustive"
    random = "random"


class Format(str, enum.Enum):
    json = "json"
    csv = "csv"


class Kind(str, enum.Enum):
    cube_union = "cube-union"
    noisy_cube = "noisy-cube"
    density_random = "density-random"
    harper_segment = "harper-segment"


def _nest(key: str, value: JSON) -> Options:
    head, _, rest = key.partition(".")
    return {head: _nest(rest, value) if rest else value}


def _options(ctx: typer.Context, **overrides: JSON) -> Options:
    """The config file layer from the callback, overlaid with the given flags."""
    flags = [_nest(key, value) for key, value in overrides.items() if value is not None]
    return mix_options(ctx.obj or {}, *flags)


@contextlib.contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except IsoCubeError as e:
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(e.exit_code)


def _parse_coordinates(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InputError(
            f"--i-coords expects a comma list of integers, got {text!r}", "cli"
        )


def _emit_json(document: JSON, out: str) -> None:
    write_text(out, json.dumps(document, indent=2, allow_nan=False) + "\n", "cli")


def _version(value: bool) -> None:
    if value:
        typer.echo(__version__)
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[pathlib.Path] = typer.Option(
        None, "--config", help="JSON file of options, e.g. {\"ISOCUBE\": {...}}."
    ),
    log_level: str = typer.Option("WARNING", "--log-level", help="Root logger level."),
    workers: Optional[int] = typer.Option(
        None, "--workers", min=1, help="Threads used to evaluate suite trials."
    ),
    version: bool = typer.Option(
        False, "--version", callback=_version, is_eager=True, help="Print the version."
    ),
) -> None:
    level = logging.getLevelName(log_level.upper())
    if not isinstance(level, int):
        raise typer.BadParameter(
            f"unknown level {log_level!r}", param_hint="--log-level"
        )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    with _exit_codes():
        layer = read_json(config, "cli") if config is not None else {}
        if not isinstance(layer, dict):
            raise InputError(f"{config} must hold a JSON object", "cli")
        override = _nest("ISOCUBE.SUITE.WORKERS", workers) if workers else {}
        ctx.obj = mix_options(layer, override)


@app.command()
def analyze(
    input: str = typer.Option(..., "--input", help="Set file; '-' reads stdin."),
    i_coords: Optional[str] = typer.Option(
        None,
        "--i-coords",
        help="Comma list I for the section table and mutual information.",
    ),
    out: str = typer.Option("-", "--out", help="Output path; '-' writes stdout."),
) -> None:
    """Report the boundary, excess and influences of a set."""
    with _exit_codes():
        a = load_set(input)
        document = {
            "n": a.n,
            "size": a.size,
            "boundary": edge_boundary(a),
            "iso": iso_excess(a).to_json() if a.size else None,
            "influence": influence_profile(a).to_json(),
        }
        if i_coords is not None:
            coords = _parse_coordinates(i_coords)
            document["sections"] = section_table(a, coords).to_json()
            proper = 0 < len(set(coords)) < a.n
            document["mutual_information"] = (
                mutual_information(a, coords) if proper else None
            )
        _emit_json(document, out)


@app.command()
def decompose(
    ctx: typer.Context,
    input: str = typer.Option(..., "--input", help="Set file; '-' reads stdin."),
    eps: float = typer.Option(0.1, "--eps", help="Relative error budget ε."),
    kappa0: Optional[float] = typer.Option(None, "--kappa0"),
    exh_dim: Optional[int] = typer.Option(None, "--exh-dim"),
    drop_frac: Optional[float] = typer.Option(None, "--drop-frac"),
    out: str = typer.Option("-", "--out"),
) -> None:
    """Approximate a set by disjoint subcubes and check the result independently."""
    with _exit_codes():
        options = _options(
            ctx,
            **{
                "ISOCUBE.DECOMPOSE.KAPPA0": kappa0,
                "ISOCUBE.DECOMPOSE.EXH_DIM": exh_dim,
                "ISOCUBE.DECOMPOSE.DROP_FRAC": drop_frac,
            },
        )
        a = load_set(input)
        result = run_decompose(a, eps, options)
        verdict = verify_decomposition(a, result, eps)
        document = result.to_json()
        document["verified"] = verdict.passed
        document["verify_reason"] = verdict.reason
        _emit_json(document, out)
    if not verdict:
        typer.echo(
            f"error: decomposition failed verification ({verdict.reason})", err=True
        )
        raise typer.Exit(1)


@app.command()
def verify(
    ctx: typer.Context,
    suite: str = typer.Option(
        ..., "--suite", help=f"One of {', '.join(harness.SUITES)}."
    ),
    n: List[int] = typer.Option(..., "--n", help="Dimension; repeat for several."),
    mode: Mode = typer.Option(Mode.random, "--mode"),
    samples: int = typer.Option(100, "--samples"),
    seed: int = typer.Option(0, "--seed", min=0, max=(1 << 64) - 1),
    eps: float = typer.Option(0.1, "--eps", help="ε for the decomp suite."),
    format: Format = typer.Option(Format.json, "--format"),
    out: str = typer.Option("-", "--out"),
) -> None:
    """Run a verification suite and write its report."""
    with _exit_codes():
        options = _options(ctx)
        params = harness.SuiteParams(tuple(n), mode.value, samples, eps)
        report = harness.run_suite(suite, params, seed, options)
        harness.emit_report(report, format.value, out, options)
    if report.failures:
        typer.echo(
            f"{report.failures} failures in {report.trials} trials of {suite}", err=True
        )
        raise typer.Exit(1)


@app.command()
def gen(
    ctx: typer.Context,
    kind: Kind = typer.Option(Kind.cube_union, "--kind"),
    n: int = typer.Option(..., "--n"),
    cubes: Optional[int] = typer.Option(None, "--cubes", help="Planted cube count."),
    noise: float = typer.Option(0.0, "--noise", help="Per-vertex flip probability."),
    density: Optional[float] = typer.Option(None, "--density"),
    count: Optional[int] = typer.Option(None, "--count", help="Harper segment length."),
    seed: int = typer.Option(0, "--seed", min=0, max=(1 << 64) - 1),
    out: str = typer.Option("-", "--out"),
) -> None:
    """Generate a reproducible random set and write it as a set file."""
    with _exit_codes():
        spec = GeneratorSpec(
            kind=kind.value,
            n=n,
            cubes=cubes,
            noise=noise,
            density=density,
            count=count,
            seed=seed,
        )
        a, _ = generate(spec, _options(ctx))
        dump_set(a, out)
