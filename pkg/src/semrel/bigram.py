"""Unsupervised pipeline: scoped co-occurrence records, negative-sampled
word embeddings, hierarchical clustering, and a blended pair scorer."""

import re
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from . import vecmath
from .corpus import TokenizedSentence, tokenize
from .errors import DivergedLoss, EmptyCorpus, EmptyRecords, KTooLarge, ZeroVector
from .lexical import jaccard
from .vecmath import SentenceEmbedding

SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")

DEFAULT_SCOPE_WEIGHTS = (1.0, 0.5, 0.25)  # sentence, paragraph, document


@dataclass(frozen=True)
class BigramRecord:
    w1: str
    w2: str
    sent_count: int
    para_count: int
    doc_count: int


@dataclass
class WordEmbeddingTable:
    dim: int
    vectors: dict
    seed: int
    n_positive_draws: int = 0
    n_negative_draws: int = 0


def parse_document(text: str, lang: str = "und"):
    """Blank-line paragraphs, sentence split on .!?, whitespace tokens."""
    paragraphs = []
    for block in re.split(r"\n\s*\n", text):
        if not block.strip():
            continue
        sentences = []
        for chunk in SENTENCE_SPLIT_RE.split(block):
            toks = tokenize(chunk, lang).tokens
            if toks:
                sentences.append(list(toks))
        if sentences:
            paragraphs.append(sentences)
    return paragraphs


def build_bigram_corpus(docs) -> list:
    """Count, per word pair, the documents where it co-occurs within one
    sentence, within one paragraph, and anywhere in the document.

    The three counts are nested (a same-sentence co-occurrence is also a
    same-paragraph and same-document one), so sent <= para <= doc holds
    for every record. Pairs are counted once per document per scope.

    docs items are either raw strings or pre-parsed paragraph/sentence/token
    nestings as produced by parse_document.
    """
    if not docs:
        raise EmptyCorpus("no documents")
    sent_c: dict = {}
    para_c: dict = {}
    doc_c: dict = {}
    any_tokens = False
    for doc in docs:
        paragraphs = parse_document(doc) if isinstance(doc, str) else doc
        sent_pairs, para_pairs, doc_pairs = set(), set(), set()
        doc_terms: set = set()
        for sentences in paragraphs:
            para_terms: set = set()
            for toks in sentences:
                any_tokens = any_tokens or bool(toks)
                terms = set(toks)
                sent_pairs.update(_pairs(terms))
                para_terms |= terms
            para_pairs.update(_pairs(para_terms))
            doc_terms |= para_terms
        doc_pairs.update(_pairs(doc_terms))
        for key in sent_pairs:
            sent_c[key] = sent_c.get(key, 0) + 1
        for key in para_pairs:
            para_c[key] = para_c.get(key, 0) + 1
        for key in doc_pairs:
            doc_c[key] = doc_c.get(key, 0) + 1
    if not any_tokens:
        raise EmptyCorpus("documents contain no tokens")
    return [
        BigramRecord(w1, w2, sent_c.get(key, 0), para_c.get(key, 0), doc_c[key])
        for key in sorted(doc_c)
        for w1, w2 in [key]
    ]


def _pairs(terms):
    ordered = sorted(terms)
    return {
        (ordered[i], ordered[j])
        for i in range(len(ordered))
        for j in range(i + 1, len(ordered))
    }


def train_embeddings(
    records,
    weights=DEFAULT_SCOPE_WEIGHTS,
    dim: int = 64,
    epochs: int = 5,
    lr: float = 0.05,
    seed: int = 0,
) -> WordEmbeddingTable:
    """Logistic co-occurrence embeddings with a strict 1:1 negative
    sampling scheme.

    Positive pairs are drawn with probability proportional to
    ws*sent + wp*para + wd*doc; each positive draw is matched by exactly
    one uniformly sampled unobserved pair pushed toward label 0.
    """
    if not records:
        raise EmptyRecords("no bigram records")
    ws, wp, wd = weights
    if ws < 0 or wp < 0 or wd < 0 or ws + wp + wd == 0:
        raise ValueError("scope weights must be nonnegative and not all zero")
    vocab = sorted({r.w1 for r in records} | {r.w2 for r in records})
    index = {t: i for i, t in enumerate(vocab)}
    observed = {(index[r.w1], index[r.w2]) for r in records}
    probs = np.array([ws * r.sent_count + wp * r.para_count + wd * r.doc_count for r in records])
    if probs.sum() == 0:
        raise ValueError("all records have zero weight under the given scope weights")
    probs = probs / probs.sum()

    rng = np.random.default_rng(seed)
    vecs = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(len(vocab), dim))
    n_pos = n_neg = 0
    steps = epochs * len(records)
    for _ in range(steps):
        r = records[int(rng.choice(len(records), p=probs))]
        _logistic_step(vecs, index[r.w1], index[r.w2], 1.0, lr)
        n_pos += 1
        # one negative per positive: an unobserved, non-identical pair;
        # tiny vocabularies where every pair is observed fall back to the
        # last distinct draw so the 1:1 ratio is kept by construction
        i = j = 0
        for _attempt in range(100):
            i, j = (int(v) for v in rng.integers(0, len(vocab), size=2))
            if i == j:
                continue
            key = (vocab[i], vocab[j]) if vocab[i] <= vocab[j] else (vocab[j], vocab[i])
            if (index[key[0]], index[key[1]]) not in observed:
                break
        if i == j:
            j = (i + 1) % len(vocab)
        _logistic_step(vecs, i, j, 0.0, lr)
        n_neg += 1
        if not np.all(np.isfinite(vecs)):
            raise DivergedLoss("embedding values became non-finite")
    return WordEmbeddingTable(
        dim,
        {t: vecs[i].copy() for t, i in index.items()},
        seed,
        n_positive_draws=n_pos,
        n_negative_draws=n_neg,
    )


def _logistic_step(vecs, i, j, label, lr):
    dot = float(vecs[i] @ vecs[j])
    # stable sigmoid
    p = 1.0 / (1.0 + np.exp(-dot)) if dot >= 0 else np.exp(dot) / (1.0 + np.exp(dot))
    g = p - label
    gi = g * vecs[j]
    gj = g * vecs[i]
    vecs[i] -= lr * gi
    vecs[j] -= lr * gj


def cluster_words(table: WordEmbeddingTable, k: int) -> dict:
    """Average-linkage agglomerative clustering under cosine distance,
    cut at k clusters. Cluster ids are renumbered 1..k in order of first
    appearance over the lexicographically sorted vocabulary."""
    vocab = sorted(table.vectors)
    if k < 1 or k > len(vocab):
        raise KTooLarge(f"k={k} outside [1, {len(vocab)}]")
    if len(vocab) == 1:
        return {vocab[0]: 1}
    data = np.stack([table.vectors[t] for t in vocab])
    raw = fcluster(linkage(data, method="average", metric="cosine"), t=k, criterion="maxclust")
    relabel: dict = {}
    out = {}
    for term, cid in zip(vocab, raw):
        if cid not in relabel:
            relabel[cid] = len(relabel) + 1
        out[term] = relabel[cid]
    return out


def score_pair_unsupervised(
    a: TokenizedSentence,
    b: TokenizedSentence,
    table: WordEmbeddingTable,
    alpha: float = 0.5,
) -> float:
    """alpha * shifted-cosine of mean word vectors + (1-alpha) * Jaccard.

    Falls back to Jaccard alone when either sentence has no word covered
    by the table.
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError("alpha must be in [0, 1]")
    j = jaccard(a, b).value

    def mean_vec(sent):
        known = [table.vectors[t] for t in sorted(sent.token_set) if t in table.vectors]
        return np.mean(known, axis=0) if known else None

    va, vb = mean_vec(a), mean_vec(b)
    if va is None or vb is None:
        return j
    try:
        cos = vecmath.cosine(
            SentenceEmbedding("a", va), SentenceEmbedding("b", vb)
        )
    except ZeroVector:
        return j
    cos01 = 0.5 * (1.0 + cos)
    return alpha * cos01 + (1.0 - alpha) * j


# --- persistence ----------------------------------------------------------

def write_records_tsv(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("w1\tw2\tsent_count\tpara_count\tdoc_count\n")
        for r in records:
            fh.write(f"{r.w1}\t{r.w2}\t{r.sent_count}\t{r.para_count}\t{r.doc_count}\n")


def read_records_tsv(path) -> list:
    records = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()  # header
        for line in fh:
            if not line.strip():
                continue
            w1, w2, s, p, d = line.rstrip("\n").split("\t")
            records.append(BigramRecord(w1, w2, int(s), int(p), int(d)))
    return records


def write_table(table: WordEmbeddingTable, path) -> None:
    vecmath.write_semb(
        [SentenceEmbedding(t, table.vectors[t]) for t in sorted(table.vectors)], path
    )


def read_table(path, seed: int = 0) -> WordEmbeddingTable:
    embs = vecmath.read_semb(path)
    if not embs:
        raise EmptyRecords("empty embedding table")
    return WordEmbeddingTable(embs[0].dim, {e.id: e.values for e in embs}, seed)
