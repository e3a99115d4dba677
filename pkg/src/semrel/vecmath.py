"""Vector metric primitives, power transforms and Mahalanobis covariance.

All math is 64-bit; the SEMB file container stores 32-bit floats.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatch,
    PowerOutOfRange,
    SingularAfterRidge,
    TooFewSamples,
    ZeroVector,
)

SEMB_MAGIC = b"SEMB"
SEMB_VERSION = 1


@dataclass(frozen=True)
class SentenceEmbedding:
    id: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise DimMismatch("embedding must be a 1-d vector")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"non-finite values in embedding {self.id!r}")
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CovarianceModel:
    dim: int
    matrix: np.ndarray
    inverse: np.ndarray
    ridge: float

    @classmethod
    def identity(cls, dim: int) -> "CovarianceModel":
        eye = np.eye(dim)
        return cls(dim, eye, eye.copy(), 0.0)


def _check_dims(a: SentenceEmbedding, b: SentenceEmbedding):
    if a.dim != b.dim:
        raise DimMismatch(f"dim {a.dim} vs {b.dim}")


def pow_elementwise(v: SentenceEmbedding, k: int) -> SentenceEmbedding:
    """Raise every coordinate to the integer power k (1 <= k <= 10)."""
    if not (1 <= k <= 10):
        raise PowerOutOfRange(f"k={k} outside [1, 10]")
    return SentenceEmbedding(v.id, v.values**k)


def cosine(a: SentenceEmbedding, b: SentenceEmbedding) -> float:
    _check_dims(a, b)
    na = np.linalg.norm(a.values)
    nb = np.linalg.norm(b.values)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(np.clip(np.dot(a.values, b.values) / (na * nb), -1.0, 1.0))


def euclidean(a: SentenceEmbedding, b: SentenceEmbedding) -> float:
    _check_dims(a, b)
    return float(np.linalg.norm(a.values - b.values))


def manhattan(a: SentenceEmbedding, b: SentenceEmbedding) -> float:
    _check_dims(a, b)
    return float(np.abs(a.values - b.values).sum())


def default_ridge(matrix: np.ndarray) -> float:
    return 1e-3 * float(np.trace(matrix)) / matrix.shape[0]


def fit_covariance(embs, ridge: float | None = None) -> CovarianceModel:
    """Sample covariance over all vectors plus ridge·I, with verified inverse.

    ridge=None picks 1e-3·trace/dim, which keeps d > n cases invertible.
    """
    if len(embs) < 2:
        raise TooFewSamples("need at least 2 embeddings")
    dim = embs[0].dim
    for e in embs:
        if e.dim != dim:
            raise DimMismatch(f"dim {e.dim} vs {dim}")
    data = np.stack([e.values for e in embs])
    matrix = np.cov(data, rowvar=False, ddof=1)
    matrix = np.atleast_2d(matrix)
    if ridge is None:
        ridge = default_ridge(matrix)
    matrix = matrix + ridge * np.eye(dim)
    matrix = 0.5 * (matrix + matrix.T)  # exact symmetry against rounding
    try:
        inverse = np.linalg.inv(matrix)
    except np.linalg.LinAlgError:
        raise SingularAfterRidge("covariance singular after ridge") from None
    if np.abs(inverse @ matrix - np.eye(dim)).max() > 1e-6:
        raise SingularAfterRidge("inverse check failed; increase ridge")
    return CovarianceModel(dim, matrix, inverse, float(ridge))


def mahalanobis(a: SentenceEmbedding, b: SentenceEmbedding, cov: CovarianceModel) -> float:
    _check_dims(a, b)
    if a.dim != cov.dim:
        raise DimMismatch(f"embedding dim {a.dim} vs covariance dim {cov.dim}")
    d = a.values - b.values
    q = float(d @ cov.inverse @ d)
    return float(np.sqrt(max(q, 0.0)))


# --- SEMB container -------------------------------------------------------

def write_semb(embs, path) -> None:
    """Binary container: SEMB magic, version u32, dim u32, count u64, then
    (id_len u16, id utf-8, dim little-endian f32) records."""
    embs = list(embs)
    dim = embs[0].dim if embs else 0
    with open(path, "wb") as fh:
        fh.write(SEMB_MAGIC)
        fh.write(struct.pack("<IIQ", SEMB_VERSION, dim, len(embs)))
        for e in embs:
            if e.dim != dim:
                raise DimMismatch(f"dim {e.dim} vs container dim {dim}")
            raw = e.id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(e.values.astype("<f4").tobytes())


def read_semb(path) -> list:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SEMB_MAGIC:
            raise ValueError(f"bad magic {magic!r}; not a SEMB file")
        version, dim, count = struct.unpack("<IIQ", fh.read(16))
        if version != SEMB_VERSION:
            raise ValueError(f"unsupported SEMB version {version}")
        embs = []
        for _ in range(count):
            (id_len,) = struct.unpack("<H", fh.read(2))
            eid = fh.read(id_len).decode("utf-8")
            vec = np.frombuffer(fh.read(4 * dim), dtype="<f4").astype(np.float64)
            if len(vec) != dim:
                raise ValueError("truncated SEMB file")
            embs.append(SentenceEmbedding(eid, vec))
    return embs


def write_jsonl(embs, path) -> None:
    """Debug-friendly text twin of the SEMB container."""
    with open(path, "w", encoding="utf-8") as fh:
        for e in embs:
            fh.write(json.dumps({"id": e.id, "v": e.values.tolist()}) + "\n")


def read_jsonl(path) -> list:
    embs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                embs.append(SentenceEmbedding(rec["id"], np.array(rec["v"])))
    return embs
