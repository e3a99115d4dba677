"""Mean-pooled sentence embedding export.

Embeds both sides of every dataset pair with a transformer encoder and
writes them into a SEMB container with ids "<pair_id>.a" / "<pair_id>.b".
Pooling is the attention-mask-weighted mean over final-layer token
vectors; no CLS, no normalization.
"""

import json
from dataclasses import asdict, dataclass

import torch


class ModelLoadError(Exception):
    pass


class TokenizationError(Exception):
    def __init__(self, row, cause):
        super().__init__(f"row {row}: {cause}")
        self.row = row


@dataclass(frozen=True)
class ExportManifest:
    model_name: str
    dim: int
    n_sentences: int
    pooling: str = "mean"
    normalization: str = "none"


def read_pairs_tsv(path):
    """Minimal reader for the toolkit's native pair TSV."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        idx = {name: i for i, name in enumerate(header)}
        for col in ("pair_id", "text_a", "text_b"):
            if col not in idx:
                raise ValueError(f"missing column {col!r}")
        for line in fh:
            if not line.strip():
                continue
            cells = line.rstrip("\n").split("\t")
            rows.append((cells[idx["pair_id"]], cells[idx["text_a"]], cells[idx["text_b"]]))
    return rows


def mean_pool(last_hidden_state, attention_mask):
    """Average token vectors, excluding padding positions."""
    mask = attention_mask.unsqueeze(-1).to(last_hidden_state.dtype)
    summed = (last_hidden_state * mask).sum(dim=1)
    counts = mask.sum(dim=1).clamp(min=1.0)
    return summed / counts


def export(dataset, model_name, out, batch_size=32):
    """Embed every sentence side of the dataset into a SEMB container.

    Returns the ExportManifest, which is also written as JSON beside the
    container at `<out>.manifest.json`.
    """
    from transformers import AutoModel, AutoTokenizer

    from .semb import write_semb

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name)
        model = AutoModel.from_pretrained(model_name)
    except Exception as err:
        raise ModelLoadError(f"cannot load {model_name!r}: {err}") from err
    model.eval()

    rows = read_pairs_tsv(dataset)
    sentences = []
    for row_no, (pair_id, text_a, text_b) in enumerate(rows, start=2):
        sentences.append((row_no, f"{pair_id}.a", text_a))
        sentences.append((row_no, f"{pair_id}.b", text_b))

    records = []
    dim = None
    with torch.no_grad():
        for start in range(0, len(sentences), batch_size):
            batch = sentences[start : start + batch_size]
            try:
                encoded = tokenizer(
                    [text for _, _, text in batch],
                    padding=True,
                    truncation=True,
                    return_tensors="pt",
                )
            except Exception as err:
                raise TokenizationError(batch[0][0], err) from err
            output = model(**encoded)
            pooled = mean_pool(output.last_hidden_state, encoded["attention_mask"])
            dim = pooled.shape[1]
            for (_, rec_id, _), vec in zip(batch, pooled):
                records.append((rec_id, vec.numpy()))

    write_semb(records, int(dim or 0), out)
    manifest = ExportManifest(
        model_name=str(model_name), dim=int(dim or 0), n_sentences=len(records)
    )
    with open(str(out) + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
