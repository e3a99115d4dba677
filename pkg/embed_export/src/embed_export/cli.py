import sys

import click

from .export import ModelLoadError, TokenizationError, export


@click.command(name="embed-export")
@click.option("--dataset", required=True, type=click.Path(exists=True),
              help="Pair TSV with pair_id/text_a/text_b columns.")
@click.option("--model", "model_name", required=True,
              help="Model name or local checkpoint directory.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Output SEMB container path.")
@click.option("--batch-size", type=int, default=32, show_default=True)
def main(dataset, model_name, out_path, batch_size):
    """Export mean-pooled sentence embeddings into a SEMB container."""
    try:
        manifest = export(dataset, model_name, out_path, batch_size)
    except (ModelLoadError, TokenizationError) as err:
        click.echo(f"{type(err).__name__}: {err}", err=True)
        sys.exit(1)
    click.echo(
        f"exported {manifest.n_sentences} embeddings (dim {manifest.dim}) to {out_path}"
    )


if __name__ == "__main__":
    main()
