"""Command-line front door for the metric library.

Results go to stdout (human-readable line, or single-line JSON with
--json); diagnostics and warnings go to stderr. Exit code is 0 exactly when
a result was produced. Experiment subcommands emit CSV (comma separators,
header row, LF line endings) and can render a matplotlib figure next to the
CSV with --plot.
"""

from __future__ import annotations

import csv
import json
import sys
import time
import warnings
from dataclasses import asdict, dataclass

import click

from . import __version__
from .embeddings import read_array
from .errors import GenMetricsError
from .experiments import bench as run_bench
from .experiments import sample_efficiency as run_sample_efficiency
from .frechet import ExtrapolationConfig, fid, fid_infinity
from .mmd import KernelConfig, mmd_unbiased
from .mog import default_mog_kernel, table2_experiment
from .normality import normality_report


@dataclass(frozen=True)
class MetricReport:
    """Everything needed to reproduce one metric value."""

    metric: str
    value: float
    params: dict
    n_ref: int
    n_gen: int
    wall_time_ms: float
    version: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"))


def parse_report(line: str) -> MetricReport:
    """Read back a single-line JSON report emitted by this tool."""
    doc = json.loads(line)
    return MetricReport(**doc)


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _forward_warnings(caught) -> None:
    for w in caught:
        click.echo(f"warning: {w.message}", err=True)


def _write_csv(rows: list[dict], out: str) -> None:
    fh = sys.stdout if out == "-" else open(out, "w", newline="")
    try:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


@click.group()
@click.version_option(version=__version__, prog_name="genmetrics")
def main():
    """Distribution-distance metrics between embedding files."""


@main.command()
@click.argument("metric", type=click.Choice(["fid", "fid-inf", "mmd", "cmmd"]))
@click.argument("ref_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("gen_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sigma", type=float, default=10.0, show_default=True, help="RBF kernel bandwidth.")
@click.option("--scale", type=float, default=1000.0, show_default=True, help="MMD output scale.")
@click.option(
    "--l2-normalize/--no-l2-normalize",
    default=None,
    help="Unit-normalize rows before the kernel (default: on for cmmd, off for mmd).",
)
@click.option("--block-size", type=int, default=1024, show_default=True)
@click.option(
    "--divisor",
    type=click.Choice(["unbiased", "biased"]),
    default="unbiased",
    show_default=True,
    help="Covariance divisor for the Frechet paths.",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Subset seed for fid-inf.")
@click.option("--num-points", type=int, default=15, show_default=True, help="fid-inf schedule length.")
@click.option("--min-size", type=int, default=5000, show_default=True, help="fid-inf smallest subset.")
@click.option("--json", "as_json", is_flag=True, help="Emit a single-line JSON report.")
def compute(metric, ref_path, gen_path, sigma, scale, l2_normalize, block_size, divisor, seed, num_points, min_size, as_json):
    """Compute METRIC between two embedding files."""
    try:
        ref = read_array(ref_path)
        gen = read_array(gen_path)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            t0 = time.perf_counter()
            if metric == "fid":
                value = fid(ref, gen, divisor=divisor).distance_squared
                params = {"divisor": divisor}
            elif metric == "fid-inf":
                cfg = ExtrapolationConfig(num_points=num_points, min_size=min_size, seed=seed)
                value = fid_infinity(ref, gen, cfg, divisor=divisor)
                params = {
                    "divisor": divisor,
                    "num_points": num_points,
                    "min_size": cfg.effective_min_size(gen.n),
                    "seed": seed,
                }
            else:
                l2 = (metric == "cmmd") if l2_normalize is None else l2_normalize
                kcfg = KernelConfig(
                    bandwidth_sigma=sigma,
                    output_scale=scale,
                    l2_normalize=l2,
                    block_size=block_size,
                )
                if metric == "cmmd" and ref.n != gen.n:
                    warnings.warn(
                        f"cmmd is intended for equal-sized sets; got m={ref.n}, n={gen.n}",
                        RuntimeWarning,
                    )
                value = mmd_unbiased(ref, gen, kcfg).value
                params = {
                    "sigma": sigma,
                    "scale": scale,
                    "l2_normalize": l2,
                    "block_size": block_size,
                }
            wall_ms = (time.perf_counter() - t0) * 1000.0
        _forward_warnings(caught)
    except (GenMetricsError, OSError, ValueError) as exc:
        _fail(str(exc))

    report = MetricReport(
        metric=metric,
        value=value,
        params=params,
        n_ref=ref.n,
        n_gen=gen.n,
        wall_time_ms=wall_ms,
        version=__version__,
    )
    if as_json:
        click.echo(report.to_json())
    else:
        click.echo(f"{metric} = {value:.10g}  (n_ref={ref.n}, n_gen={gen.n}, {wall_ms:.1f} ms)")


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, default=0.01, show_default=True, help="Significance level.")
@click.option("--json", "as_json", is_flag=True)
def normality(path, alpha, as_json):
    """Run the three multivariate normality tests on an embedding file."""
    try:
        x = read_array(path)
        report = normality_report(x, alpha=alpha)
    except (GenMetricsError, OSError, ValueError) as exc:
        _fail(str(exc))

    if as_json:
        doc = {
            "n": report.n,
            "d": report.d,
            "alpha": report.alpha,
            "mardia_skewness": {
                "statistic": report.skewness.statistic,
                "df": report.skewness.df,
                "p_value": report.skewness.p_value,
            },
            "mardia_kurtosis": {
                "statistic": report.kurtosis.statistic,
                "p_value": report.kurtosis.p_value,
            },
            "henze_zirkler": {
                "statistic": report.henze_zirkler.statistic,
                "p_value": report.henze_zirkler.p_value,
            },
            "decisions": report.decisions,
            "version": __version__,
        }
        click.echo(json.dumps(doc, separators=(",", ":")))
    else:
        click.echo(f"n={report.n} d={report.d} alpha={report.alpha}")
        click.echo(
            f"mardia_skewness: A={report.skewness.statistic:.6g} df={report.skewness.df} "
            f"p={report.skewness.p_value:.3g} -> {report.decisions['mardia_skewness']}"
        )
        click.echo(
            f"mardia_kurtosis: B={report.kurtosis.statistic:.6g} "
            f"p={report.kurtosis.p_value:.3g} -> {report.decisions['mardia_kurtosis']}"
        )
        click.echo(
            f"henze_zirkler: T={report.henze_zirkler.statistic:.6g} "
            f"p={report.henze_zirkler.p_value:.3g} -> {report.decisions['henze_zirkler']}"
        )


@main.command()
@click.option("--sigma", type=float, default=1.0, show_default=True, help="Reference std deviation.")
@click.option(
    "--lambdas",
    default="0,0.2,0.4,0.6,0.8,1.0,1.2,1.4",
    show_default=True,
    help="Comma-separated displacement values.",
)
@click.option("--n", type=int, default=50000, show_default=True, help="Sample size per distribution.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--mmd-sigma", type=float, default=1.0, show_default=True, help="Kernel bandwidth for the MMD column.")
@click.option("--out", default="-", show_default=True, help="CSV output path ('-' for stdout).")
@click.option("--plot", type=click.Path(dir_okay=False), default=None, help="Render a figure to this file.")
def mog(sigma, lambdas, n, seed, mmd_sigma, out, plot):
    """Run the covariance-matched mixture experiment; emit a CSV table."""
    try:
        lams = [float(t) for t in lambdas.split(",") if t.strip() != ""]
        kernel = KernelConfig(
            bandwidth_sigma=mmd_sigma,
            output_scale=default_mog_kernel().output_scale,
            l2_normalize=False,
            block_size=default_mog_kernel().block_size,
        )
        rows = table2_experiment(sigma, lams, n, kernel=kernel, seed=seed)
        _write_csv(rows, out)
        if plot:
            from .plots import render_mog_figure

            render_mog_figure(rows, plot)
            click.echo(f"figure written to {plot}", err=True)
    except (GenMetricsError, OSError, ValueError) as exc:
        _fail(str(exc))


@main.command("sample-efficiency")
@click.argument("ref_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("gen_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sizes", default="1000,2000,5000,10000", show_default=True, help="Comma-separated subset sizes.")
@click.option("--seeds", default="0,1,2", show_default=True, help="Comma-separated subset seeds.")
@click.option("--out", default="-", show_default=True, help="CSV output path ('-' for stdout).")
@click.option("--plot", type=click.Path(dir_okay=False), default=None, help="Render a figure to this file.")
def sample_efficiency(ref_path, gen_path, sizes, seeds, out, plot):
    """Metric stability under subsampling of the generated set; emit CSV."""
    try:
        ref = read_array(ref_path)
        gen = read_array(gen_path)
        size_list = [int(t) for t in sizes.split(",") if t.strip() != ""]
        seed_list = [int(t) for t in seeds.split(",") if t.strip() != ""]
        rows = run_sample_efficiency(ref, gen, size_list, seed_list)
        _write_csv(rows, out)
        if plot:
            from .plots import render_sample_efficiency_figure

            render_sample_efficiency_figure(rows, plot)
            click.echo(f"figure written to {plot}", err=True)
    except (GenMetricsError, OSError, ValueError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--n", type=int, default=5000, show_default=True)
@click.option("--d", type=int, default=2048, show_default=True)
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True)
@click.option("--plot", type=click.Path(dir_okay=False), default=None, help="Render a figure to this file.")
def bench(n, d, reps, seed, as_json, plot):
    """Time the Frechet and MMD paths on synthetic data."""
    try:
        report = run_bench(n=n, d=d, reps=reps, seed=seed)
        if as_json:
            click.echo(json.dumps({**report, "version": __version__}, separators=(",", ":")))
        else:
            fr, mm = report["frechet"], report["mmd"]
            click.echo(
                f"frechet: median {fr['median_ms']:.1f} ms (min {fr['min_ms']:.1f}, max {fr['max_ms']:.1f}), "
                f"value {fr['value']:.6g}"
            )
            click.echo(
                f"mmd:     median {mm['median_ms']:.1f} ms (min {mm['min_ms']:.1f}, max {mm['max_ms']:.1f}), "
                f"value {mm['value']:.6g}"
            )
        if plot:
            from .plots import render_bench_figure

            render_bench_figure(report, plot)
            click.echo(f"figure written to {plot}", err=True)
    except (GenMetricsError, OSError, ValueError) as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
