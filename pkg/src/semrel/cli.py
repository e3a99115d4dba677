"""Command-line front end: one subcommand per pipeline stage, files as the
interchange medium."""

import functools
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import click
import numpy as np

from . import bigram as bigram_mod
from . import contrastive, corpus, features, ngd, regressor, vecmath
from .errors import SemrelError
from .evaluation import evaluate
from .lexical import dice as dice_fn
from .lexical import jaccard as jaccard_fn


def handle_errors(fn):
    """Map toolkit errors to exit code 1 with the error name on stderr."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SemrelError as err:
            click.echo(f"{type(err).__name__}: {err}", err=True)
            sys.exit(1)

    return wrapper


def echo_config(ctx, **params):
    """Echo the effective configuration so every run is reproducible."""
    if ctx.obj.get("quiet"):
        return
    name = ctx.command_path
    rendered = " ".join(f"{k}={v}" for k, v in sorted(params.items()))
    click.echo(f"# {name}: {rendered}", err=True)


@click.group(name="semrel")
@click.option("--seed", type=int, default=None, help="Fallback seed for seeded subcommands.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="TOML file with per-subcommand option defaults.")
@click.option("--quiet", is_flag=True, help="Suppress the effective-config echo.")
@click.pass_context
def cli(ctx, seed, config_path, quiet):
    """Semantic textual relatedness toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["quiet"] = quiet
    if config_path:
        with open(config_path, "rb") as fh:
            ctx.default_map = tomllib.load(fh)


def _seed_or_default(ctx, seed, fallback=0):
    if seed is not None:
        return seed
    if ctx.obj.get("seed") is not None:
        return ctx.obj["seed"]
    return fallback


def _load_pairs(path, format):
    return corpus.load_dataset(path, format)


_format_opt = click.option("--format", "format", type=click.Choice(["tsv", "semrel_csv"]),
                           default="tsv", show_default=True)


# --- data -----------------------------------------------------------------

@cli.group()
def data():
    """Dataset validation and diagnostics."""


@data.command("validate")
@click.argument("dataset", type=click.Path(exists=True))
@_format_opt
@click.pass_context
@handle_errors
def data_validate(ctx, dataset, format):
    echo_config(ctx, dataset=dataset, format=format)
    pairs = _load_pairs(dataset, format)
    click.echo(f"ok: {len(pairs)} pairs")


@data.command("stats")
@click.argument("dataset", type=click.Path(exists=True))
@_format_opt
@click.pass_context
@handle_errors
def data_stats(ctx, dataset, format):
    echo_config(ctx, dataset=dataset, format=format)
    diag = corpus.length_bias_report(_load_pairs(dataset, format))
    click.echo(f"n_pairs\t{diag.n_pairs}")
    click.echo(f"rho_len_a\t{diag.rho_len_a:.6f}")
    click.echo(f"rho_len_b\t{diag.rho_len_b:.6f}")
    for lang in sorted(diag.per_lang_counts):
        click.echo(f"lang:{lang}\t{diag.per_lang_counts[lang]}")


# --- score ----------------------------------------------------------------

@cli.group()
def score():
    """Score sentence pairs with one of the relatedness metrics."""


def _emit_scores(rows):
    click.echo("pair_id\tscore")
    for pair_id, value in rows:
        click.echo(f"{pair_id}\t{float(value)!r}")


@score.command("lexical")
@click.argument("dataset", type=click.Path(exists=True))
@click.option("--metric", type=click.Choice(["jaccard", "dice"]), default="jaccard",
              show_default=True)
@_format_opt
@click.pass_context
@handle_errors
def score_lexical(ctx, dataset, metric, format):
    echo_config(ctx, dataset=dataset, metric=metric, format=format)
    fn = jaccard_fn if metric == "jaccard" else dice_fn
    rows = []
    for p in _load_pairs(dataset, format):
        ta = corpus.tokenize(p.text_a, p.lang)
        tb = corpus.tokenize(p.text_b, p.lang)
        rows.append((p.pair_id, fn(ta, tb).value))
    _emit_scores(rows)


@score.command("ngd")
@click.argument("dataset", type=click.Path(exists=True))
@click.option("--index", "index_prefix", required=True,
              help="Prefix of an index written by `ngd-index build`.")
@_format_opt
@click.pass_context
@handle_errors
def score_ngd(ctx, dataset, index_prefix, format):
    echo_config(ctx, dataset=dataset, index=index_prefix, format=format)
    idx = ngd.load_index(index_prefix)
    rows = []
    for p in _load_pairs(dataset, format):
        ta = corpus.tokenize(p.text_a, p.lang)
        tb = corpus.tokenize(p.text_b, p.lang)
        # NGD is a distance; report 1 - value so larger means more related
        rows.append((p.pair_id, 1.0 - ngd.ngd_sentences(ta, tb, idx).value))
    _emit_scores(rows)


@score.command("bigram")
@click.argument("dataset", type=click.Path(exists=True))
@click.option("--table", "table_path", required=True, type=click.Path(exists=True))
@click.option("--alpha", type=float, default=0.5, show_default=True)
@_format_opt
@click.pass_context
@handle_errors
def score_bigram(ctx, dataset, table_path, alpha, format):
    echo_config(ctx, dataset=dataset, table=table_path, alpha=alpha, format=format)
    table = bigram_mod.read_table(table_path)
    rows = []
    for p in _load_pairs(dataset, format):
        ta = corpus.tokenize(p.text_a, p.lang)
        tb = corpus.tokenize(p.text_b, p.lang)
        rows.append((p.pair_id, bigram_mod.score_pair_unsupervised(ta, tb, table, alpha)))
    _emit_scores(rows)


# --- features -------------------------------------------------------------

@cli.group("features")
def features_group():
    """Composite feature extraction and the inter-metric covariance."""


@features_group.command("build")
@click.argument("dataset", type=click.Path(exists=True))
@click.option("--embeddings", "emb_path", required=True, type=click.Path(exists=True),
              help="SEMB container with ids <pair_id>.a / <pair_id>.b.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--ridge", type=float, default=None,
              help="Covariance ridge; default 1e-3*trace/dim.")
@_format_opt
@click.pass_context
@handle_errors
def features_build(ctx, dataset, emb_path, out_path, ridge, format):
    echo_config(ctx, dataset=dataset, embeddings=emb_path, out=out_path,
                ridge=ridge, format=format)
    pairs = _load_pairs(dataset, format)
    embs = {e.id: e for e in vecmath.read_semb(emb_path)}
    cov = vecmath.fit_covariance(list(embs.values()), ridge)
    rows = []
    golds = {}
    have_gold = all(p.gold_score is not None for p in pairs)
    for p in sorted(pairs, key=lambda p: p.pair_id):
        ta = corpus.tokenize(p.text_a, p.lang)
        tb = corpus.tokenize(p.text_b, p.lang)
        row = features.build_features(
            embs[p.pair_id + ".a"], embs[p.pair_id + ".b"], ta, tb, cov, p.pair_id
        )
        rows.append(row)
        if have_gold:
            golds[p.pair_id] = p.gold_score
    features.write_features_tsv(rows, out_path, golds if have_gold else None)
    click.echo(f"wrote {len(rows)} feature rows to {out_path}")


@features_group.command("cov")
@click.option("--features", "feat_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
@handle_errors
def features_cov(ctx, feat_path, out_path):
    echo_config(ctx, features=feat_path, out=out_path)
    rows, _ = features.read_features_tsv(feat_path)
    mc = features.metric_covariance(rows)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\t".join([""] + mc.labels) + "\n")
        for label, row in zip(mc.labels, mc.matrix):
            fh.write("\t".join([label] + [repr(float(v)) for v in row]) + "\n")
    click.echo(f"wrote 42x42 covariance to {out_path}")


# --- train / predict / eval ----------------------------------------------

@cli.command("train")
@click.option("--features", "feat_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--epochs", type=int, default=200, show_default=True)
@click.option("--lr", type=float, default=1e-3, show_default=True)
@click.option("--weight-decay", type=float, default=0.01, show_default=True)
@click.option("--dropout", type=float, default=0.1, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
@handle_errors
def train_cmd(ctx, feat_path, out_path, epochs, lr, weight_decay, dropout, batch_size, seed):
    seed = _seed_or_default(ctx, seed)
    echo_config(ctx, features=feat_path, out=out_path, epochs=epochs, lr=lr,
                weight_decay=weight_decay, dropout=dropout, batch_size=batch_size,
                seed=seed)
    rows, golds = features.read_features_tsv(feat_path)
    if golds is None:
        raise SemrelError("training requires a gold_score column")
    mean, std = features.normalization_stats(rows)
    data = [(features.normalize(r, mean, std), golds[r.pair_id]) for r in rows]
    cfg = regressor.TrainConfig(
        learning_rate=lr, weight_decay=weight_decay, epochs=epochs,
        batch_size=batch_size, dropout=dropout, seed=seed,
    )
    model, report = regressor.train(regressor.init(seed), data, cfg)
    meta = {
        "config": {
            "learning_rate": lr, "weight_decay": weight_decay, "epochs": epochs,
            "batch_size": batch_size, "dropout": dropout, "seed": seed,
        },
        "norm_mean": mean.tolist(),
        "norm_std": std.tolist(),
        "rng_seed": seed,
    }
    regressor.save_checkpoint(model, out_path, meta)
    last = report.epochs[-1] if report.epochs else None
    if last:
        click.echo(
            f"trained {epochs} epochs; final train MSE {last.train_mse:.6f}, "
            f"val Spearman {last.val_spearman:.4f}"
        )
    click.echo(f"wrote checkpoint to {out_path}")


@cli.command("predict")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--features", "feat_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
@handle_errors
def predict_cmd(ctx, model_path, feat_path, out_path):
    echo_config(ctx, model=model_path, features=feat_path, out=out_path)
    model, meta = regressor.load_checkpoint(model_path)
    mean = np.array(meta["norm_mean"])
    std = np.array(meta["norm_std"])
    rows, _ = features.read_features_tsv(feat_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("pair_id\tscore\n")
        for r in rows:
            pred = regressor.forward(model, features.normalize(r, mean, std))
            fh.write(f"{r.pair_id}\t{pred!r}\n")
    click.echo(f"wrote {len(rows)} predictions to {out_path}")


def read_predictions_tsv(path) -> dict:
    preds = {}
    with open(path, encoding="utf-8") as fh:
        fh.readline()  # header
        for line in fh:
            if line.strip():
                pair_id, value = line.rstrip("\n").split("\t")
                preds[pair_id] = float(value)
    return preds


@cli.command("eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--pairs", "pairs_path", required=True, type=click.Path(exists=True))
@click.option("--baselines", "baselines_path", type=click.Path(exists=True), default=None,
              help="JSON map lang -> published baseline rho.")
@click.option("--json", "as_json", is_flag=True, help="Emit the JSON report.")
@click.option("--out", "out_path", type=click.Path(), default=None)
@_format_opt
@click.pass_context
@handle_errors
def eval_cmd(ctx, pred_path, pairs_path, baselines_path, as_json, out_path, format):
    echo_config(ctx, pred=pred_path, pairs=pairs_path, baselines=baselines_path,
                json=as_json, out=out_path, format=format)
    golds = _load_pairs(pairs_path, format)
    preds = read_predictions_tsv(pred_path)
    baselines = None
    if baselines_path:
        with open(baselines_path, encoding="utf-8") as fh:
            baselines = json.load(fh)
    report = evaluate(preds, golds, baselines)
    text = report.render_json() if as_json else report.render_text()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


# --- ngd-index ------------------------------------------------------------

@cli.group("ngd-index")
def ngd_index():
    """Build and persist a local NGD corpus index."""


def _read_corpus_files(corpus_dir):
    paths = sorted(Path(corpus_dir).glob("*.txt"))
    if not paths:
        raise SemrelError(f"no .txt files in {corpus_dir}")
    return [p.read_text(encoding="utf-8") for p in paths]


@ngd_index.command("build")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_prefix", required=True)
@click.option("--stopwords", "stopwords_path", type=click.Path(exists=True), default=None,
              help="One stopword per line.")
@click.pass_context
@handle_errors
def ngd_index_build(ctx, corpus_dir, out_prefix, stopwords_path):
    echo_config(ctx, corpus_dir=corpus_dir, out=out_prefix, stopwords=stopwords_path)
    stop = set()
    if stopwords_path:
        with open(stopwords_path, encoding="utf-8") as fh:
            stop = {line.strip() for line in fh if line.strip()}
    docs = [list(corpus.tokenize(text).tokens) for text in _read_corpus_files(corpus_dir)]
    idx = ngd.build_index(docs, stop)
    ngd.save_index(idx, out_prefix)
    click.echo(f"indexed {idx.n_docs} docs, {len(idx.doc_freq)} terms")


# --- bigram ---------------------------------------------------------------

@cli.group("bigram")
def bigram_group():
    """Unsupervised co-occurrence pipeline."""


@bigram_group.command("build")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
@handle_errors
def bigram_build(ctx, corpus_dir, out_path):
    echo_config(ctx, corpus_dir=corpus_dir, out=out_path)
    records = bigram_mod.build_bigram_corpus(_read_corpus_files(corpus_dir))
    bigram_mod.write_records_tsv(records, out_path)
    click.echo(f"wrote {len(records)} bigram records to {out_path}")


@bigram_group.command("embed")
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--dim", type=int, default=64, show_default=True)
@click.option("--epochs", type=int, default=5, show_default=True)
@click.option("--lr", type=float, default=0.05, show_default=True)
@click.option("--weights", default="1.0,0.5,0.25", show_default=True,
              help="Scope weights ws,wp,wd.")
@click.option("--seed", type=int, default=None)
@click.pass_context
@handle_errors
def bigram_embed(ctx, records_path, out_path, dim, epochs, lr, weights, seed):
    seed = _seed_or_default(ctx, seed)
    echo_config(ctx, records=records_path, out=out_path, dim=dim, epochs=epochs,
                lr=lr, weights=weights, seed=seed)
    ws, wp, wd = (float(w) for w in weights.split(","))
    records = bigram_mod.read_records_tsv(records_path)
    table = bigram_mod.train_embeddings(records, (ws, wp, wd), dim, epochs, lr, seed)
    bigram_mod.write_table(table, out_path)
    click.echo(
        f"trained {len(table.vectors)} word vectors "
        f"({table.n_positive_draws} positive / {table.n_negative_draws} negative draws)"
    )


@bigram_group.command("cluster")
@click.option("--table", "table_path", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, required=True)
@click.pass_context
@handle_errors
def bigram_cluster(ctx, table_path, k):
    echo_config(ctx, table=table_path, k=k)
    table = bigram_mod.read_table(table_path)
    assignment = bigram_mod.cluster_words(table, k)
    for term in sorted(assignment):
        click.echo(f"{term}\t{assignment[term]}")


# --- loss / corrupt -------------------------------------------------------

def _parse_vector(text):
    return vecmath.SentenceEmbedding("cli", np.array([float(v) for v in text.split(",")]))


@cli.group("loss")
def loss_group():
    """Contrastive loss utilities."""


@loss_group.command("simcse")
@click.option("--h", required=True, help="Anchor vector, comma-separated floats.")
@click.option("--h-plus", required=True, help="Positive vector.")
@click.option("--h-minus", required=True, help="Negative vector.")
@click.option("--tau", type=float, default=contrastive.DEFAULT_TAU, show_default=True)
@click.pass_context
@handle_errors
def loss_simcse(ctx, h, h_plus, h_minus, tau):
    echo_config(ctx, h=h, h_plus=h_plus, h_minus=h_minus, tau=tau)
    batch = contrastive.TripletBatch(
        _parse_vector(h), _parse_vector(h_plus), _parse_vector(h_minus), tau
    )
    click.echo(repr(contrastive.simcse_loss(batch)))


@cli.command("corrupt")
@click.argument("text")
@click.option("--mode", type=click.Choice(["delete", "mask"]), default="delete",
              show_default=True)
@click.option("--ratio", type=float, default=contrastive.DEFAULT_CORRUPTION_RATIO,
              show_default=True)
@click.option("--mask-token", default="[MASK]", show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
@handle_errors
def corrupt_cmd(ctx, text, mode, ratio, mask_token, seed):
    seed = _seed_or_default(ctx, seed)
    echo_config(ctx, mode=mode, ratio=ratio, mask_token=mask_token, seed=seed)
    cfg = contrastive.CorruptionConfig(mode, ratio, mask_token, seed)
    out = contrastive.corrupt(corpus.tokenize(text), cfg)
    click.echo(" ".join(out.tokens))


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
