"""Token-overlap baselines: Jaccard and Dice coefficients over token sets."""

from dataclasses import dataclass

from .corpus import TokenizedSentence


@dataclass(frozen=True)
class OverlapScore:
    value: float
    metric: str


def jaccard(a: TokenizedSentence, b: TokenizedSentence) -> OverlapScore:
    """|A ∩ B| / |A ∪ B| over token sets; two empty texts count as fully related."""
    union = a.token_set | b.token_set
    if not union:
        return OverlapScore(1.0, "jaccard")
    inter = a.token_set & b.token_set
    return OverlapScore(len(inter) / len(union), "jaccard")


def dice(a: TokenizedSentence, b: TokenizedSentence) -> OverlapScore:
    """2|A ∩ B| / (|A| + |B|) over token sets; two empty texts count as fully related."""
    total = len(a.token_set) + len(b.token_set)
    if total == 0:
        return OverlapScore(1.0, "dice")
    inter = a.token_set & b.token_set
    return OverlapScore(2 * len(inter) / total, "dice")
