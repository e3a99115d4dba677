import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from semrel.cli import cli

DATA = Path(__file__).parent / "data"
PAIRS = str(DATA / "pairs_20.tsv")
EMBS = str(DATA / "embs_20.semb")


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args, **kwargs):
    result = runner.invoke(cli, list(args), obj={}, **kwargs)
    if result.exception and not isinstance(result.exception, SystemExit):
        raise result.exception
    return result


ALL_SUBCOMMANDS = [
    ["data", "validate"], ["data", "stats"],
    ["score", "lexical"], ["score", "ngd"], ["score", "bigram"],
    ["features", "build"], ["features", "cov"],
    ["train"], ["predict"], ["eval"],
    ["ngd-index", "build"],
    ["bigram", "build"], ["bigram", "embed"], ["bigram", "cluster"],
    ["loss", "simcse"], ["corrupt"],
]


@pytest.mark.parametrize("cmd", ALL_SUBCOMMANDS, ids=lambda c: " ".join(c))
def test_help_exits_zero(runner, cmd):
    assert run(runner, *cmd, "--help").exit_code == 0


def test_data_stats(runner):
    result = run(runner, "--quiet", "data", "stats", PAIRS)
    assert result.exit_code == 0
    assert "n_pairs\t20" in result.output
    assert "rho_len_a" in result.output
    assert "lang:eng\t10" in result.output


def test_data_validate_failure_exit_code(runner, tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("pair_id\tlang\ttext_a\ttext_b\tscore\np\teng\ta\tb\t2.0\n")
    result = run(runner, "--quiet", "data", "validate", str(bad))
    assert result.exit_code == 1
    assert "MalformedScore" in result.output


def test_score_lexical(runner):
    result = run(runner, "--quiet", "score", "lexical", PAIRS, "--metric", "jaccard")
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "pair_id\tscore"
    assert len(lines) == 21


def test_effective_config_echoed_unless_quiet(runner):
    loud = run(runner, "corrupt", "a b c d", "--seed", "3")
    assert "# semrel corrupt:" in loud.stderr
    quiet = run(runner, "--quiet", "corrupt", "a b c d", "--seed", "3")
    assert "#" not in quiet.output + quiet.stderr


def test_corrupt_seed_reproducible(runner):
    a = run(runner, "--quiet", "corrupt", "a b c d e f", "--seed", "5").output
    b = run(runner, "--quiet", "corrupt", "a b c d e f", "--seed", "5").output
    assert a == b


def test_global_seed_fallback(runner):
    a = run(runner, "--quiet", "--seed", "5", "corrupt", "a b c d e f").output
    b = run(runner, "--quiet", "corrupt", "a b c d e f", "--seed", "5").output
    assert a == b


def test_loss_simcse(runner):
    result = run(runner, "--quiet", "loss", "simcse", "--h", "1,0",
                 "--h-plus", "1,0", "--h-minus", "0,1", "--tau", "1.0")
    assert result.exit_code == 0
    assert float(result.output.strip()) == pytest.approx(0.31326168751822286)


def test_config_file_sets_defaults(runner, tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('[corrupt]\nseed = 5\n')
    with_cfg = run(runner, "--quiet", "--config", str(cfg), "corrupt", "a b c d e f")
    explicit = run(runner, "--quiet", "corrupt", "a b c d e f", "--seed", "5")
    assert with_cfg.output == explicit.output


def test_ngd_pipeline(runner, tmp_path):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    (corpus_dir / "d1.txt").write_text("cat dog tree")
    (corpus_dir / "d2.txt").write_text("cat fish")
    (corpus_dir / "d3.txt").write_text("dog fish tree")
    (corpus_dir / "d4.txt").write_text("bird")
    prefix = str(tmp_path / "idx")
    result = run(runner, "--quiet", "ngd-index", "build", str(corpus_dir), "--out", prefix)
    assert result.exit_code == 0

    pairs = tmp_path / "pairs.tsv"
    pairs.write_text(
        "pair_id\tlang\ttext_a\ttext_b\tscore\n"
        "p1\teng\tcat dog\tfish tree\t0.5\n"
    )
    result = run(runner, "--quiet", "score", "ngd", str(pairs), "--index", prefix)
    assert result.exit_code == 0
    score = float(result.output.strip().splitlines()[1].split("\t")[1])
    assert 0.0 <= score <= 1.0


def test_bigram_pipeline(runner, tmp_path):
    corpus_dir = tmp_path / "corpus"
    corpus_dir.mkdir()
    (corpus_dir / "d1.txt").write_text("the cat sat. the dog sat.\n\nthe fish swam.")
    (corpus_dir / "d2.txt").write_text("the cat ran. the dog ran.")
    records = str(tmp_path / "records.tsv")
    table = str(tmp_path / "table.semb")

    assert run(runner, "--quiet", "bigram", "build", str(corpus_dir),
               "--out", records).exit_code == 0
    assert run(runner, "--quiet", "bigram", "embed", "--records", records,
               "--out", table, "--dim", "8", "--epochs", "3", "--seed", "1").exit_code == 0
    result = run(runner, "--quiet", "bigram", "cluster", "--table", table, "--k", "2")
    assert result.exit_code == 0
    assignments = dict(line.split("\t") for line in result.output.strip().splitlines())
    assert set(assignments.values()) <= {"1", "2"}

    pairs = tmp_path / "pairs.tsv"
    pairs.write_text(
        "pair_id\tlang\ttext_a\ttext_b\tscore\np1\teng\tthe cat\tthe dog\t0.5\n"
    )
    result = run(runner, "--quiet", "score", "bigram", str(pairs), "--table", table)
    assert result.exit_code == 0


def test_full_pipeline_reproduces_golden_report(runner, tmp_path):
    """features -> train -> predict -> eval on the committed fixture must
    reproduce the golden report byte for byte, in under 30 seconds."""
    t0 = time.monotonic()
    feat = str(tmp_path / "features.tsv")
    model = str(tmp_path / "model.smlp")
    preds = str(tmp_path / "preds.tsv")
    report = tmp_path / "report.txt"

    assert run(runner, "--quiet", "features", "build", PAIRS,
               "--embeddings", EMBS, "--out", feat).exit_code == 0
    assert run(runner, "--quiet", "train", "--features", feat, "--out", model,
               "--epochs", "300", "--seed", "7").exit_code == 0
    assert run(runner, "--quiet", "predict", "--model", model,
               "--features", feat, "--out", preds).exit_code == 0
    assert run(runner, "--quiet", "eval", "--pred", preds, "--pairs", PAIRS,
               "--out", str(report)).exit_code == 0

    golden = (DATA / "golden_report.txt").read_bytes()
    assert report.read_bytes() == golden
    assert time.monotonic() - t0 < 30.0


def test_eval_json_output(runner, tmp_path):
    preds = tmp_path / "preds.tsv"
    from semrel.corpus import load_dataset
    pairs = load_dataset(PAIRS, "tsv")
    with open(preds, "w") as fh:
        fh.write("pair_id\tscore\n")
        for p in pairs:
            fh.write(f"{p.pair_id}\t{p.gold_score}\n")
    result = run(runner, "--quiet", "eval", "--pred", str(preds),
                 "--pairs", PAIRS, "--json")
    assert result.exit_code == 0
    import json
    assert json.loads(result.output)["overall"] == pytest.approx(1.0)
