"""Rank-correlation metrics and per-language leaderboard-style reports."""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import ConstantInput, LengthMismatch, MissingPrediction, TooFew, UnknownPair


def _as_float_array(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1:
        raise LengthMismatch("inputs must be 1-dimensional")
    if len(x) != len(y):
        raise LengthMismatch(f"length {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise TooFew("need at least 2 observations")
    return x, y


def pearson(x, y) -> float:
    """Pearson correlation coefficient of two equal-length sequences."""
    x, y = _as_float_array(x, y)
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt(np.dot(xc, xc))
    sy = np.sqrt(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        raise ConstantInput("correlation undefined for constant input")
    return float(np.dot(xc, yc) / (sx * sy))


def spearman(x, y) -> float:
    """Spearman rank correlation with average-rank tie handling.

    Pearson correlation of the rank-transformed inputs; ties within an
    input receive the average of the ranks they occupy.
    """
    x, y = _as_float_array(x, y)
    return pearson(rankdata(x, method="average"), rankdata(y, method="average"))


@dataclass
class EvalRow:
    lang: str
    system_score: float
    baseline_score: float | None
    n_pairs: int


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)
    overall: float = float("nan")
    n_pairs: int = 0

    def render_text(self) -> str:
        """Aligned plain-text table: Language / Score / Baseline Score / N."""
        header = ("Language", "Score", "Baseline Score", "N")
        body = []
        for r in self.rows:
            base = "-" if r.baseline_score is None else f"{r.baseline_score:.2f}"
            body.append((r.lang, f"{r.system_score:.4f}", base, str(r.n_pairs)))
        body.append(("overall", f"{self.overall:.4f}", "-", str(self.n_pairs)))
        widths = [max(len(row[i]) for row in [header] + body) for i in range(4)]
        lines = []
        for row in [header] + body:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        payload = {
            "rows": [
                {
                    "lang": r.lang,
                    "system_score": r.system_score,
                    "baseline_score": r.baseline_score,
                    "n_pairs": r.n_pairs,
                }
                for r in self.rows
            ],
            "overall": self.overall,
            "n_pairs": self.n_pairs,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def evaluate(predictions: dict, golds, baselines: dict | None = None) -> EvalReport:
    """Score predictions against gold pairs, grouped by language.

    predictions maps pair_id -> score; golds is a list of SentencePair with
    gold scores; baselines optionally maps lang -> published baseline rho.
    """
    gold_ids = {p.pair_id for p in golds}
    for pid in predictions:
        if pid not in gold_ids:
            raise UnknownPair(pid)
    by_lang: dict[str, list] = {}
    for p in golds:
        if p.pair_id not in predictions:
            raise MissingPrediction(p.pair_id)
        by_lang.setdefault(p.lang, []).append(p)

    report = EvalReport()
    all_pred, all_gold = [], []
    for lang in sorted(by_lang):
        pairs = by_lang[lang]
        pred = [predictions[p.pair_id] for p in pairs]
        gold = [p.gold_score for p in pairs]
        rho = spearman(pred, gold)
        base = baselines.get(lang) if baselines else None
        report.rows.append(EvalRow(lang, rho, base, len(pairs)))
        all_pred.extend(pred)
        all_gold.extend(gold)
    report.overall = spearman(all_pred, all_gold)
    report.n_pairs = len(all_pred)
    return report
