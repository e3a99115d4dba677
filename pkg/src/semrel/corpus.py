"""Sentence-pair dataset parsing, tokenization and dataset-level diagnostics."""

import csv
import io
import unicodedata
from dataclasses import dataclass, field

from .errors import (
    DuplicatePairId,
    EmptyText,
    MalformedScore,
    MissingColumn,
    MissingGoldScore,
    TooFewPairs,
)
from .evaluation import spearman

TSV_COLUMNS = ["pair_id", "lang", "text_a", "text_b", "score"]
SEMREL_CSV_COLUMNS = ["PairID", "Text", "Score"]


@dataclass(frozen=True)
class SentencePair:
    pair_id: str
    lang: str
    text_a: str
    text_b: str
    gold_score: float | None = None


@dataclass(frozen=True)
class TokenizedSentence:
    tokens: tuple
    token_set: frozenset = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "token_set", frozenset(self.tokens))


@dataclass(frozen=True)
class DatasetDiagnostics:
    n_pairs: int
    rho_len_a: float
    rho_len_b: float
    per_lang_counts: dict


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str, lang: str = "und") -> TokenizedSentence:
    """Whitespace tokenization with case folding and edge punctuation stripping.

    Uniform across languages: no segmenters, no stemming. Tokens that are
    pure punctuation are dropped.
    """
    tokens = []
    for raw in text.split():
        tok = raw.casefold()
        start, end = 0, len(tok)
        while start < end and _is_punct(tok[start]):
            start += 1
        while end > start and _is_punct(tok[end - 1]):
            end -= 1
        tok = tok[start:end]
        if tok:
            tokens.append(tok)
    return TokenizedSentence(tokens)


def _parse_score(value: str, row: int) -> float | None:
    value = value.strip()
    if value == "":
        return None
    try:
        score = float(value)
    except ValueError:
        raise MalformedScore(row, value) from None
    if not (0.0 <= score <= 1.0):
        raise MalformedScore(row, value)
    return score


def _check_pair(pair_id, text_a, text_b, row, seen_ids):
    if pair_id in seen_ids:
        raise DuplicatePairId(pair_id)
    seen_ids.add(pair_id)
    if not text_a.strip() or not text_b.strip():
        raise EmptyText(row)


def _lang_from_pair_id(pair_id: str) -> str:
    # SemRel-style ids look like "ENG-train-0001"; fall back to "und".
    head = pair_id.split("-", 1)[0]
    return head.casefold() if head else "und"


def load_dataset(path, format: str = "tsv") -> list:
    """Load a sentence-pair dataset in `tsv` or `semrel_csv` format."""
    with open(path, encoding="utf-8", newline="") as fh:
        return _read_dataset(fh, format)


def _read_dataset(fh, format: str) -> list:
    pairs = []
    seen = set()
    if format == "tsv":
        header = fh.readline().rstrip("\n").split("\t")
        required = TSV_COLUMNS[:4]
        for col in required:
            if col not in header:
                raise MissingColumn(col)
        idx = {name: header.index(name) for name in header}
        has_score = "score" in idx
        for row_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            cells = line.split("\t")
            if len(cells) < len(header):
                raise MissingColumn(f"row {row_no}: expected {len(header)} columns")
            pair_id = cells[idx["pair_id"]]
            text_a = cells[idx["text_a"]]
            text_b = cells[idx["text_b"]]
            _check_pair(pair_id, text_a, text_b, row_no, seen)
            score = _parse_score(cells[idx["score"]], row_no) if has_score else None
            pairs.append(SentencePair(pair_id, cells[idx["lang"]], text_a, text_b, score))
    elif format == "semrel_csv":
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MissingColumn("empty file")
        for col in SEMREL_CSV_COLUMNS[:2]:
            if col not in reader.fieldnames:
                raise MissingColumn(col)
        has_score = "Score" in reader.fieldnames
        for row_no, rec in enumerate(reader, start=2):
            pair_id = rec["PairID"]
            text = rec["Text"]
            if "\n" not in text:
                raise EmptyText(row_no)
            text_a, text_b = text.split("\n", 1)
            _check_pair(pair_id, text_a, text_b, row_no, seen)
            score = _parse_score(rec["Score"] or "", row_no) if has_score else None
            pairs.append(
                SentencePair(pair_id, _lang_from_pair_id(pair_id), text_a, text_b, score)
            )
    else:
        raise ValueError(f"unknown format {format!r}")
    return pairs


def write_dataset(pairs, path, format: str = "tsv") -> None:
    """Serialize pairs; inverse of load_dataset for round-trip safe texts."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps_dataset(pairs, format))


def dumps_dataset(pairs, format: str = "tsv") -> str:
    if format == "tsv":
        lines = ["\t".join(TSV_COLUMNS)]
        for p in pairs:
            for text in (p.text_a, p.text_b):
                if "\t" in text or "\n" in text:
                    raise ValueError("TSV format forbids tabs/newlines in text")
            score = "" if p.gold_score is None else repr(p.gold_score)
            lines.append("\t".join([p.pair_id, p.lang, p.text_a, p.text_b, score]))
        return "\n".join(lines) + "\n"
    if format == "semrel_csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(SEMREL_CSV_COLUMNS)
        for p in pairs:
            score = "" if p.gold_score is None else repr(p.gold_score)
            writer.writerow([p.pair_id, p.text_a + "\n" + p.text_b, score])
        return buf.getvalue()
    raise ValueError(f"unknown format {format!r}")


def length_bias_report(pairs) -> DatasetDiagnostics:
    """Spearman correlation between token lengths and gold scores.

    A well-distributed dataset shows near-zero correlation on both sides.
    """
    if len(pairs) < 3:
        raise TooFewPairs("need at least 3 pairs")
    scores = []
    len_a, len_b = [], []
    per_lang: dict[str, int] = {}
    for p in pairs:
        if p.gold_score is None:
            raise MissingGoldScore(p.pair_id)
        scores.append(p.gold_score)
        len_a.append(len(tokenize(p.text_a, p.lang).tokens))
        len_b.append(len(tokenize(p.text_b, p.lang).tokens))
        per_lang[p.lang] = per_lang.get(p.lang, 0) + 1
    return DatasetDiagnostics(
        n_pairs=len(pairs),
        rho_len_a=spearman(len_a, scores),
        rho_len_b=spearman(len_b, scores),
        per_lang_counts=per_lang,
    )
