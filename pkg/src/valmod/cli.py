"""Command-line entry points: profile, valmod, motifset, synth, serve, report.

Every command validates its arguments up front (exit code 2), writes a config
echo with the result-determining settings next to its outputs, and keeps all
output bytes independent of runtime-only knobs like worker counts.
"""

from __future__ import annotations

import os
import sys

import click

from . import io as vio
from .errors import ParameterError, ParseError, ValmodError
from .series import SeriesRecord, ingest_series, write_series


def _load_series(path: str, fmt: str, column, delimiter: str, header,
                 interpolate: bool) -> SeriesRecord:
    name = os.path.splitext(os.path.basename(path))[0]
    return ingest_series(path, fmt, column=column, delimiter=delimiter,
                         header=header, interpolate=interpolate, name=name,
                         source=path)


def _input_options(fn):
    fn = click.option("--input", "input_path", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="Series file to analyze.")(fn)
    fn = click.option("--format", "fmt", default="plain",
                      type=click.Choice(["plain", "delimited"]),
                      show_default=True)(fn)
    fn = click.option("--column", default=None,
                      help="Column name or 0-based index (delimited format).")(fn)
    fn = click.option("--delimiter", default=",", show_default=True)(fn)
    fn = click.option("--header/--no-header", "header", default=None,
                      help="Delimited input has a header row (default: detect).")(fn)
    fn = click.option("--interpolate", is_flag=True,
                      help="Fill non-finite samples by linear interpolation.")(fn)
    return fn


@click.group(context_settings={"auto_envvar_prefix": "VALMOD"})
def main():
    """Exact variable-length motif discovery for data series."""


@main.command()
@_input_options
@click.option("--length", "-l", required=True, type=int, help="Window length.")
@click.option("--exclusion", type=int, default=None,
              help="Exclusion radius (default: ceil(length/2)).")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Output directory.")
def profile(input_path, fmt, column, delimiter, header, interpolate, length,
            exclusion, workers, out):
    """Fixed-length matrix/index profile, exported as delimited text."""
    from .distance import matrix_profile

    series = _load_series(input_path, fmt, column, delimiter, header, interpolate)
    mp = matrix_profile(series, length, exclusion=exclusion, workers=workers)
    os.makedirs(out, exist_ok=True)
    vio.write_matrix_profile(mp, os.path.join(out, "matrix_profile.csv"))
    vio.write_config_echo({
        "command": "profile", "input": os.path.abspath(input_path),
        "format": fmt, "column": column, "delimiter": delimiter,
        "length": length, "exclusion": mp.exclusion,
    }, out)
    click.echo(f"wrote {out}/matrix_profile.csv ({mp.mp.shape[0]} offsets)")


@main.command()
@_input_options
@click.option("--lmin", required=True, type=int, help="Smallest window length.")
@click.option("--lmax", required=True, type=int, help="Largest window length.")
@click.option("--k", type=int, default=1, show_default=True,
              help="Motif pairs reported per length.")
@click.option("--p", type=int, default=50, show_default=True,
              help="Entries kept per partial profile (k <= p).")
@click.option("--exclusion", type=int, default=None,
              help="Fixed exclusion radius (default: ceil(l/2) per length).")
@click.option("--trace", is_flag=True, help="Also export the pruning trace.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def valmod(input_path, fmt, column, delimiter, header, interpolate, lmin, lmax,
           k, p, exclusion, trace, workers, out):
    """Variable-length discovery over [lmin, lmax]: per-length top-k plus the
    normalized profile triple and its checkpoint log."""
    from .engine import valmod_run

    series = _load_series(input_path, fmt, column, delimiter, header, interpolate)
    result = valmod_run(series, lmin, lmax, k=k, p=p, exclusion=exclusion,
                        workers=workers)
    os.makedirs(out, exist_ok=True)
    vio.write_topk(result.results, os.path.join(out, "topk.csv"))
    vio.write_valmap(result.valmap, os.path.join(out, "valmap.csv"))
    vio.write_checkpoints(result.valmap.checkpoints,
                          os.path.join(out, "checkpoints.csv"))
    if trace:
        vio.write_trace(result.trace, os.path.join(out, "trace.csv"))
    vio.write_config_echo({
        "command": "valmod", "input": os.path.abspath(input_path),
        "format": fmt, "column": column, "delimiter": delimiter,
        "lmin": lmin, "lmax": lmax, "k": k, "p": p, "exclusion": exclusion,
        "trace": bool(trace),
    }, out)
    certified = sum(r.stats.certified_without_recompute for r in result.results[1:])
    click.echo(f"wrote {out}: {len(result.results)} lengths, "
               f"{len(result.valmap.checkpoints)} checkpoints, "
               f"{certified}/{max(1, len(result.results) - 1)} lengths pruned clean")


@main.command()
@_input_options
@click.option("--length", "-l", required=True, type=int)
@click.option("--left", required=True, type=int, help="Left seed offset.")
@click.option("--right", required=True, type=int, help="Right seed offset.")
@click.option("--radius-factor", type=float, default=2.0, show_default=True)
@click.option("--exclusion", type=int, default=None)
@click.option("--out", required=True, type=click.Path(file_okay=False))
def motifset(input_path, fmt, column, delimiter, header, interpolate, length,
             left, right, radius_factor, exclusion, out):
    """Expand a motif pair into its motif set (JSON payload)."""
    from .distance import MotifPair, pair_distance
    from .motifset import expand

    series = _load_series(input_path, fmt, column, delimiter, header, interpolate)
    if min(left, right) < 0 or max(left, right) + length > series.length:
        raise ParameterError(f"seed windows at {left}/{right} with length {length} "
                             f"exceed the series ({series.length} points)")
    d = pair_distance(series, left, right, length)
    pair = MotifPair.make(left, right, length, d)
    mset = expand(series, pair, radius_factor=radius_factor, exclusion=exclusion)
    os.makedirs(out, exist_ok=True)
    vio.write_json(vio.motifset_payload(mset), os.path.join(out, "motifset.json"))
    vio.write_config_echo({
        "command": "motifset", "input": os.path.abspath(input_path),
        "format": fmt, "column": column, "delimiter": delimiter,
        "length": length, "left": pair.left, "right": pair.right,
        "radius_factor": radius_factor, "exclusion": mset.exclusion,
    }, out)
    click.echo(f"wrote {out}/motifset.json ({len(mset.members)} members, "
               f"radius {mset.radius:.6g})")


@main.command()
@click.option("--n", required=True, type=int, help="Series length in points.")
@click.option("--plant-length", required=True, type=int)
@click.option("--plant-count", type=int, default=2, show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Stddev of per-copy additive noise.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Series file to write (plain lines).")
def synth(n, plant_length, plant_count, noise, seed, out):
    """Random-walk series with planted motif copies; deterministic per seed."""
    from .synth import planted_walk

    series, offsets = planted_walk(n, plant_length, plant_count=plant_count,
                                   noise=noise, seed=seed)
    parent = os.path.dirname(os.path.abspath(out))
    os.makedirs(parent, exist_ok=True)
    write_series(series, out)
    vio.write_json({
        "command": "synth", "n": n, "plant_length": plant_length,
        "plant_count": plant_count, "noise": noise, "seed": seed,
        "plant_offsets": offsets,
    }, out + ".config.json")
    click.echo(f"wrote {out} (plants at {offsets})")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--data-dir", default="valmod_data", show_default=True,
              help="Directory for uploaded datasets (persists across restarts).")
@click.option("--workers", type=int, default=1, show_default=True,
              help="Engine worker threads per job.")
def serve(host, port, data_dir, workers):
    """Run the analysis HTTP service (datasets, jobs, snapshots, motif sets)."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=data_dir, engine_workers=workers)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}") from exc


@main.command()
@click.option("--run-dir", required=True, type=click.Path(exists=True, file_okay=False),
              help="Directory produced by profile/valmod.")
@_input_options
def report(run_dir, input_path, fmt, column, delimiter, header, interpolate):
    """Render figures for a run directory next to its delimited outputs."""
    from .report import render_run_dir

    series = _load_series(input_path, fmt, column, delimiter, header, interpolate)
    written = render_run_dir(run_dir, series)
    for path in written:
        click.echo(f"wrote {path}")


def entrypoint(argv=None) -> int:
    """Uniform exit codes: 0 success, 2 validation failure, 1 runtime failure."""
    try:
        main.main(args=argv, standalone_mode=False)
        return 0
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except (ParameterError, ParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except ValmodError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


def run() -> None:
    sys.exit(entrypoint())


if __name__ == "__main__":
    run()
