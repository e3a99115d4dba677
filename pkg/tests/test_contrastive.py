import math

import numpy as np
import pytest

from semrel import contrastive
from semrel.contrastive import (
    CorruptionConfig,
    TripletBatch,
    corrupt,
    reconstruction_loss,
    simcse_loss,
    simcse_loss_inbatch,
)
from semrel.corpus import TokenizedSentence
from semrel.errors import (
    EmptyInput,
    LengthMismatch,
    NonPositiveTau,
    NotADistribution,
    VocabMiss,
)
from semrel.vecmath import SentenceEmbedding


def emb(*values, id="e"):
    return SentenceEmbedding(id, np.array(values, dtype=float))


class TestSimcse:
    def test_symmetric_point_is_ln2(self):
        # h+ and h- equally similar to h
        batch = TripletBatch(emb(1, 0), emb(0, 1), emb(0, 1), tau=0.7)
        assert simcse_loss(batch) == pytest.approx(math.log(2), abs=1e-12)

    def test_hand_case_sims_one_zero(self):
        batch = TripletBatch(emb(1, 0), emb(1, 0), emb(0, 1), tau=1.0)
        assert simcse_loss(batch) == pytest.approx(math.log(1 + math.e**-1), abs=1e-12)

    def test_small_tau_limit(self):
        batch = TripletBatch(emb(1, 0), emb(1, 0), emb(0, 1), tau=0.01)
        assert simcse_loss(batch) < 1e-4

    def test_monotone_in_positive_similarity(self):
        h = emb(1, 0)
        h_minus = emb(0, 1)
        losses = []
        for theta in np.linspace(0.01, np.pi / 2 - 0.01, 100):
            h_plus = emb(math.cos(theta), math.sin(theta))
            losses.append(simcse_loss(TripletBatch(h, h_plus, h_minus, tau=0.3)))
        # sim(h, h+) decreases as theta grows, so loss must strictly increase
        assert all(b > a for a, b in zip(losses, losses[1:]))
        assert all(v > 0 for v in losses)

    def test_tau_must_be_positive(self):
        with pytest.raises(NonPositiveTau):
            simcse_loss(TripletBatch(emb(1, 0), emb(1, 0), emb(0, 1), tau=0.0))

    def test_inbatch_variant_reduces_sensibly(self):
        anchors = [emb(1, 0, id="a1"), emb(0, 1, id="a2")]
        positives = [emb(1, 0.1, id="p1"), emb(0.1, 1, id="p2")]
        loss = simcse_loss_inbatch(anchors, positives, tau=0.1)
        assert loss > 0
        shuffled = simcse_loss_inbatch(anchors, list(reversed(positives)), tau=0.1)
        assert loss < shuffled  # matched positives beat mismatched ones


class TestCorrupt:
    def test_delete_count(self):
        toks = TokenizedSentence(("a", "b", "c", "d"))
        out = corrupt(toks, CorruptionConfig("delete", 0.5, seed=0))
        assert len(out.tokens) == 2

    def test_deterministic(self):
        toks = TokenizedSentence(tuple("abcdefgh"))
        cfg = CorruptionConfig("delete", 0.4, seed=9)
        assert corrupt(toks, cfg).tokens == corrupt(toks, cfg).tokens

    def test_single_token_survives(self):
        out = corrupt(TokenizedSentence(("only",)), CorruptionConfig("delete", 0.9, seed=1))
        assert out.tokens == ("only",)

    def test_delete_is_subsequence(self):
        toks = tuple("abcdefghij")
        for seed in range(10):
            out = corrupt(TokenizedSentence(toks), CorruptionConfig("delete", 0.6, seed=seed))
            assert out.tokens
            it = iter(toks)
            assert all(t in it for t in out.tokens)

    def test_mask_mode(self):
        toks = TokenizedSentence(("a", "b", "c", "d"))
        out = corrupt(toks, CorruptionConfig("mask", 0.5, mask_token="[M]", seed=2))
        assert len(out.tokens) == 4
        assert out.tokens.count("[M]") == 2

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            corrupt(TokenizedSentence(()), CorruptionConfig("delete", 0.5))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CorruptionConfig("delete", 0.0)
        with pytest.raises(ValueError):
            CorruptionConfig("scramble", 0.5)


class TestReconstructionLoss:
    def test_one_hot_correct(self):
        sent = TokenizedSentence(("a", "b"))
        dists = [{"a": 1.0, "b": 0.0}, {"a": 0.0, "b": 1.0}]
        assert reconstruction_loss(sent, dists) == 0.0

    def test_uniform_is_log_vocab(self):
        vocab = ["a", "b", "c", "d", "e"]
        sent = TokenizedSentence(("a", "c"))
        dists = [{t: 1 / 5 for t in vocab}] * 2
        assert reconstruction_loss(sent, dists) == pytest.approx(math.log(5), abs=1e-12)

    def test_hand_case(self):
        sent = TokenizedSentence(("x", "y"))
        dists = [
            {"x": 0.7, "y": 0.2, "z": 0.1},
            {"x": 0.25, "y": 0.5, "z": 0.25},
        ]
        expected = (-math.log(0.7) - math.log(0.5)) / 2
        assert reconstruction_loss(sent, dists) == pytest.approx(expected, abs=1e-12)

    def test_errors(self):
        sent = TokenizedSentence(("a", "b"))
        with pytest.raises(LengthMismatch):
            reconstruction_loss(sent, [{"a": 1.0}])
        with pytest.raises(NotADistribution):
            reconstruction_loss(sent, [{"a": 0.6}, {"b": 1.0}])
        with pytest.raises(VocabMiss):
            reconstruction_loss(sent, [{"z": 1.0}, {"b": 1.0}])
