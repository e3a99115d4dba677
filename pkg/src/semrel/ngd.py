"""Normalized Google Distance over a local corpus index.

Live search-engine hit counts are replaced by document-frequency counts
from any user-supplied corpus; the distance formula is count-source
agnostic.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field
from itertools import combinations

from .corpus import TokenizedSentence
from .errors import (
    DegenerateCorpus,
    EmptyCorpus,
    NeverCooccur,
    NoComparablePairs,
    UnknownTerm,
)


@dataclass(frozen=True)
class CorpusIndex:
    n_docs: int
    doc_freq: dict
    pair_freq: dict  # keyed by lexicographically sorted (t1, t2), t1 < t2
    stopwords: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class NgdScore:
    value: float
    word_pairs_used: list


def _pair_key(x: str, y: str):
    return (x, y) if x <= y else (y, x)


def build_index(docs, stopwords=()) -> CorpusIndex:
    """Document-level presence counts for terms and unordered term pairs.

    docs is a list of token lists; stopwords are dropped before counting.
    """
    if not docs:
        raise EmptyCorpus("no documents")
    stop = frozenset(stopwords)
    doc_freq: dict = {}
    pair_freq: dict = {}
    for doc in docs:
        terms = sorted(set(doc) - stop)
        for t in terms:
            doc_freq[t] = doc_freq.get(t, 0) + 1
        for key in combinations(terms, 2):
            pair_freq[key] = pair_freq.get(key, 0) + 1
    return CorpusIndex(len(docs), doc_freq, pair_freq, stop)


def ngd_word(x: str, y: str, idx: CorpusIndex) -> float:
    """(max(log f(x), log f(y)) - log f(x,y)) / (log N - min(log f(x), log f(y))).

    A term trivially co-occurs with itself, so f(x,x) = f(x).
    """
    fx = idx.doc_freq.get(x, 0)
    fy = idx.doc_freq.get(y, 0)
    if fx == 0:
        raise UnknownTerm(x)
    if fy == 0:
        raise UnknownTerm(y)
    fxy = fx if x == y else idx.pair_freq.get(_pair_key(x, y), 0)
    if fxy == 0:
        raise NeverCooccur(f"{x!r} and {y!r} never co-occur")
    lx, ly, lxy = math.log(fx), math.log(fy), math.log(fxy)
    denom = math.log(idx.n_docs) - min(lx, ly)
    if denom <= 0.0:
        raise DegenerateCorpus(f"N={idx.n_docs} <= f for {x!r}/{y!r}")
    return (max(lx, ly) - lxy) / denom


def ngd_sentences(
    a: TokenizedSentence, b: TokenizedSentence, idx: CorpusIndex, pos_tagger=None
) -> NgdScore:
    """Average clamped NGD over cross-sentence content-word pairs.

    Stopwords and out-of-index terms are dropped; pairs that never
    co-occur contribute the clamp ceiling 1.0. With a POS tagger only
    same-tag pairs are compared; without one, all cross pairs are.
    """
    tags = {}
    if pos_tagger is not None:
        for sent in (a, b):
            for tok, tag in zip(sent.tokens, pos_tagger(list(sent.tokens))):
                tags.setdefault(tok, tag)

    def content(sent):
        return sorted(
            t for t in sent.token_set if t not in idx.stopwords and t in idx.doc_freq
        )

    left, right = content(a), content(b)
    candidates = []
    seen = set()
    for x in left:
        for y in right:
            if pos_tagger is not None and tags.get(x) != tags.get(y):
                continue
            key = _pair_key(x, y)
            if key not in seen:
                seen.add(key)
                candidates.append(key)
    if not candidates:
        raise NoComparablePairs("no comparable content-word pairs")

    used = []
    total = 0.0
    for x, y in candidates:
        try:
            value = min(max(ngd_word(x, y, idx), 0.0), 1.0)
        except NeverCooccur:
            value = 1.0
        used.append((x, y, value))
        total += value
    return NgdScore(total / len(candidates), used)


# --- persistence ----------------------------------------------------------

def save_index(idx: CorpusIndex, prefix) -> None:
    """Sorted TSV of counts plus a JSON header (N, stopword hash)."""
    prefix = str(prefix)
    with open(prefix + ".tsv", "w", encoding="utf-8") as fh:
        for term in sorted(idx.doc_freq):
            fh.write(f"{term}\t{idx.doc_freq[term]}\n")
        for (t1, t2) in sorted(idx.pair_freq):
            fh.write(f"{t1}\t{t2}\t{idx.pair_freq[(t1, t2)]}\n")
    stop = sorted(idx.stopwords)
    digest = hashlib.sha256("\n".join(stop).encode("utf-8")).hexdigest()
    header = {"n_docs": idx.n_docs, "stopword_hash": digest, "stopwords": stop}
    with open(prefix + ".json", "w", encoding="utf-8") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_index(prefix) -> CorpusIndex:
    prefix = str(prefix)
    with open(prefix + ".json", encoding="utf-8") as fh:
        header = json.load(fh)
    doc_freq: dict = {}
    pair_freq: dict = {}
    with open(prefix + ".tsv", encoding="utf-8") as fh:
        for line in fh:
            cells = line.rstrip("\n").split("\t")
            if len(cells) == 2:
                doc_freq[cells[0]] = int(cells[1])
            elif len(cells) == 3:
                pair_freq[(cells[0], cells[1])] = int(cells[2])
    return CorpusIndex(
        int(header["n_docs"]), doc_freq, pair_freq, frozenset(header["stopwords"])
    )
