"""The `extract` command line tool."""

from __future__ import annotations

import sys

import click

from .models import SPECS
from .pipeline import ExtractionJob, extract
from .verify import verify as verify_manifest


@click.group(invoke_without_command=True)
@click.option("--model", type=click.Choice(sorted(SPECS)), default=None)
@click.option("--images", "image_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--out", "output", type=click.Path(dir_okay=False), default=None)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--device", default="cpu", show_default=True)
@click.option("--weights", type=click.Path(exists=True, dir_okay=False), default=None, help="Local state-dict file.")
@click.option("--init-seed", type=int, default=None, help="Seeded random init (offline pipeline testing).")
@click.pass_context
def main(ctx, model, image_dir, output, batch_size, device, weights, init_seed):
    """Extract image embeddings into NPY v1.0 plus a manifest JSON."""
    if ctx.invoked_subcommand is not None:
        return
    if model is None or image_dir is None or output is None:
        click.echo("error: --model, --images and --out are required", err=True)
        sys.exit(2)
    try:
        job = ExtractionJob(
            image_dir=image_dir,
            model=model,
            batch_size=batch_size,
            output=output,
            device=device,
            weights=weights,
            init_seed=init_seed,
        )
        entry = extract(job)
    except (ValueError, FileNotFoundError, RuntimeError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {entry['count']}x{entry['dim']} embeddings to {output} (checksum {entry['checksum']})")


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
def verify(manifest):
    """Validate a manifest: shapes, dims, checksums, finiteness."""
    ok, problems = verify_manifest(manifest)
    if ok:
        click.echo("pass")
        return
    for problem in problems:
        click.echo(f"fail: {problem}", err=True)
    sys.exit(1)


if __name__ == "__main__":
    main()
