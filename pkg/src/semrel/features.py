"""Composite 42-element feature vectors and the inter-metric covariance."""

from dataclasses import dataclass

import numpy as np

from . import vecmath
from .corpus import TokenizedSentence
from .errors import NonFinite, TooFewSamples
from .lexical import dice, jaccard
from .vecmath import CovarianceModel, SentenceEmbedding

_VECTOR_METRICS = ["Cosine", "Euclidean", "Manhattan", "Mahalanobis"]
MAX_POWER = 10
OVERFLOW_LIMIT = 1e100

COLUMN_NAMES = [
    f"{metric}: {k}" for k in range(1, MAX_POWER + 1) for metric in _VECTOR_METRICS
] + ["Jaccard", "Dice"]

# Accepts the looser "Cosine Distance: 2"-style spellings seen in the wild.
COLUMN_ALIASES = {
    f"{metric} Distance: {k}": f"{metric}: {k}"
    for k in range(1, MAX_POWER + 1)
    for metric in _VECTOR_METRICS
}

N_FEATURES = len(COLUMN_NAMES)
assert N_FEATURES == 42


@dataclass(frozen=True)
class FeatureVector:
    pair_id: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} features, got {v.shape}")
        object.__setattr__(self, "values", v)

    def __getitem__(self, column: str) -> float:
        column = COLUMN_ALIASES.get(column, column)
        return float(self.values[COLUMN_NAMES.index(column)])


@dataclass(frozen=True)
class MetricCovariance:
    labels: list
    matrix: np.ndarray


def build_features(
    a: SentenceEmbedding,
    b: SentenceEmbedding,
    ta: TokenizedSentence,
    tb: TokenizedSentence,
    cov: CovarianceModel,
    pair_id: str = "",
    per_power_cov: dict | None = None,
) -> FeatureVector:
    """Compute the 4 vector metrics at powers 1..10 plus Jaccard and Dice.

    Column order is (power ascending; Cosine, Euclidean, Manhattan,
    Mahalanobis), then Jaccard, then Dice. Raw values are returned;
    z-normalization is a separate dataset-level step. per_power_cov
    optionally maps power -> CovarianceModel for the Mahalanobis column;
    by default the power-1 model is reused for every power.
    """
    values = []
    for k in range(1, MAX_POWER + 1):
        ak = vecmath.pow_elementwise(a, k)
        bk = vecmath.pow_elementwise(b, k)
        if np.abs(ak.values).max(initial=0.0) > OVERFLOW_LIMIT or np.abs(
            bk.values
        ).max(initial=0.0) > OVERFLOW_LIMIT:
            raise NonFinite(f"Cosine: {k}")
        cov_k = per_power_cov.get(k, cov) if per_power_cov else cov
        values.append(vecmath.cosine(ak, bk))
        values.append(vecmath.euclidean(ak, bk))
        values.append(vecmath.manhattan(ak, bk))
        values.append(vecmath.mahalanobis(ak, bk, cov_k))
    values.append(jaccard(ta, tb).value)
    values.append(dice(ta, tb).value)
    arr = np.array(values)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(COLUMN_NAMES[int(np.argmax(~np.isfinite(arr)))])
    return FeatureVector(pair_id, arr)


def metric_covariance(rows) -> MetricCovariance:
    """42x42 sample covariance of the feature columns across pairs."""
    if len(rows) < 2:
        raise TooFewSamples("need at least 2 feature rows")
    data = np.stack([r.values for r in rows])
    matrix = np.cov(data, rowvar=False, ddof=1)
    matrix = 0.5 * (matrix + matrix.T)
    return MetricCovariance(list(COLUMN_NAMES), matrix)


def normalization_stats(rows):
    """Per-column mean and std over a training split; std floors at 1e-12."""
    data = np.stack([r.values for r in rows])
    mean = data.mean(axis=0)
    std = data.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def normalize(row: FeatureVector, mean, std) -> FeatureVector:
    return FeatureVector(row.pair_id, (row.values - np.asarray(mean)) / np.asarray(std))


# --- TSV persistence ------------------------------------------------------

def write_features_tsv(rows, path, gold_scores: dict | None = None) -> None:
    """Header: pair_id [gold_score] then the 42 canonical column names."""
    with_gold = gold_scores is not None
    with open(path, "w", encoding="utf-8") as fh:
        header = ["pair_id"] + (["gold_score"] if with_gold else []) + COLUMN_NAMES
        fh.write("\t".join(header) + "\n")
        for r in rows:
            cells = [r.pair_id]
            if with_gold:
                cells.append(repr(float(gold_scores[r.pair_id])))
            cells.extend(repr(float(v)) for v in r.values)
            fh.write("\t".join(cells) + "\n")


def read_features_tsv(path):
    """Returns (rows, gold_scores-or-None)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        with_gold = len(header) > 1 and header[1] == "gold_score"
        offset = 2 if with_gold else 1
        names = [COLUMN_ALIASES.get(h, h) for h in header[offset:]]
        if names != COLUMN_NAMES:
            raise ValueError("feature TSV columns do not match the canonical order")
        rows = []
        golds = {} if with_gold else None
        for line in fh:
            cells = line.rstrip("\n").split("\t")
            if not cells or cells == [""]:
                continue
            pair_id = cells[0]
            if with_gold:
                golds[pair_id] = float(cells[1])
            rows.append(FeatureVector(pair_id, np.array([float(c) for c in cells[offset:]])))
    return rows, golds
