"""Exception hierarchy shared across the toolkit.

Every module raises subclasses of SemrelError so the CLI can map failures
to exit code 1 with the error name on stderr.
"""


class SemrelError(Exception):
    """Base class for all toolkit errors."""


# corpus
class MissingColumn(SemrelError):
    pass


class MalformedScore(SemrelError):
    def __init__(self, row, value):
        super().__init__(f"row {row}: malformed score {value!r}")
        self.row = row
        self.value = value


class DuplicatePairId(SemrelError):
    def __init__(self, pair_id):
        super().__init__(f"duplicate pair id {pair_id!r}")
        self.pair_id = pair_id


class EmptyText(SemrelError):
    def __init__(self, row):
        super().__init__(f"row {row}: empty text")
        self.row = row


class MissingGoldScore(SemrelError):
    pass


class TooFewPairs(SemrelError):
    pass


# vecmath
class DimMismatch(SemrelError):
    pass


class ZeroVector(SemrelError):
    pass


class PowerOutOfRange(SemrelError):
    pass


class TooFewSamples(SemrelError):
    pass


class SingularAfterRidge(SemrelError):
    pass


# features
class NonFinite(SemrelError):
    def __init__(self, column):
        super().__init__(f"non-finite value in column {column!r}")
        self.column = column


# regressor
class NonFiniteInput(SemrelError):
    pass


class EmptyData(SemrelError):
    pass


class DivergedLoss(SemrelError):
    pass


# contrastive
class NonPositiveTau(SemrelError):
    pass


class EmptyInput(SemrelError):
    pass


class VocabMiss(SemrelError):
    def __init__(self, token):
        super().__init__(f"token {token!r} not covered by the distribution")
        self.token = token


class LengthMismatch(SemrelError):
    pass


class NotADistribution(SemrelError):
    pass


# ngd
class EmptyCorpus(SemrelError):
    pass


class UnknownTerm(SemrelError):
    def __init__(self, term):
        super().__init__(f"term {term!r} not in index")
        self.term = term


class NeverCooccur(SemrelError):
    pass


class DegenerateCorpus(SemrelError):
    pass


class NoComparablePairs(SemrelError):
    pass


# bigram
class EmptyRecords(SemrelError):
    pass


class KTooLarge(SemrelError):
    pass


# eval
class ConstantInput(SemrelError):
    pass


class TooFew(SemrelError):
    pass


class MissingPrediction(SemrelError):
    def __init__(self, pair_id):
        super().__init__(f"no prediction for pair {pair_id!r}")
        self.pair_id = pair_id


class UnknownPair(SemrelError):
    def __init__(self, pair_id):
        super().__init__(f"prediction for unknown pair {pair_id!r}")
        self.pair_id = pair_id
