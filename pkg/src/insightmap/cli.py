"""Command-line driver: mine catalogs, describe them, launch the service."""

from __future__ import annotations

import sys
import time

import click

from . import catalog as cat
from . import tabular
from .errors import InsightMapError


@click.group()
def main():
    """Automated insight mining and exploration."""


@main.command()
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True,
              type=click.Path(dir_okay=False, writable=True))
@click.option("--max-depth", default=2, show_default=True)
@click.option("--min-rows", default=5, show_default=True)
@click.option("--projection", default="tsne", show_default=True,
              type=click.Choice(["tsne", "mds"]))
@click.option("--embedding", default="attribute", show_default=True,
              type=click.Choice(["attribute", "instance"]))
@click.option("--perplexity", default=30.0, show_default=True,
              help="t-SNE perplexity, capped at (M-1)/3.")
@click.option("--seed", default=42, show_default=True)
@click.option("--dimensions", default="", help="Comma-separated fields "
              "forced to dimension role.")
@click.option("--measures", default="", help="Comma-separated fields "
              "forced to measure role.")
def mine(input_path, output_path, max_depth, min_rows, projection,
         embedding, perplexity, seed, dimensions, measures):
    """Mine a CSV file into a catalog JSON."""
    started = time.monotonic()
    overrides = {}
    for name in filter(None, dimensions.split(",")):
        overrides[name.strip()] = tabular.DIMENSION
    for name in filter(None, measures.split(",")):
        overrides[name.strip()] = tabular.MEASURE
    try:
        with open(input_path, "rb") as fh:
            dataset = tabular.ingest_csv(fh, typing_overrides=overrides)
        config = cat.MiningConfig(max_depth=max_depth, min_rows=min_rows,
                                  projection=projection,
                                  embedding=embedding,
                                  perplexity=perplexity, seed=seed)
        catalog = cat.build_catalog(dataset, config)
        with open(output_path, "wb") as fh:
            fh.write(cat.serialize(catalog))
    except InsightMapError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    elapsed = time.monotonic() - started
    click.echo(f"insights={len(catalog.insights)} "
               f"subspaces={len(catalog.subspaces)} "
               f"elapsed={elapsed:.2f}s")


@main.command()
@click.option("--catalog", "catalog_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--top", "top_k", default=10, show_default=True)
def describe(catalog_path, top_k):
    """Print the top-K insight descriptions, best score first."""
    try:
        with open(catalog_path, "rb") as fh:
            catalog = cat.deserialize(fh.read())
    except InsightMapError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for insight in catalog.insights[:max(top_k, 0)]:
        click.echo(cat.describe_insight(insight))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
@click.option("--data-dir", envvar="INSIGHTMAP_DATA_DIR", default="./data",
              show_default=True)
def serve(host, port, data_dir):
    """Run the HTTP API server."""
    from .service import run_server

    try:
        run_server(host=host, port=port, data_dir=data_dir)
    except KeyboardInterrupt:
        sys.exit(0)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
