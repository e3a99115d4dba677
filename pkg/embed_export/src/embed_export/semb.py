"""Writer for the SEMB binary container.

Kept independent of the consuming toolkit; only the wire format is
shared: magic `SEMB`, version u32, dim u32, count u64, then repeated
(id_len u16, id utf-8, dim little-endian f32) records.
"""

import struct

SEMB_MAGIC = b"SEMB"
SEMB_VERSION = 1


def write_semb(records, dim, path):
    """records is an iterable of (id, float32 array of length dim)."""
    records = list(records)
    with open(path, "wb") as fh:
        fh.write(SEMB_MAGIC)
        fh.write(struct.pack("<IIQ", SEMB_VERSION, dim, len(records)))
        for rec_id, values in records:
            if len(values) != dim:
                raise ValueError(f"record {rec_id!r} has dim {len(values)}, expected {dim}")
            raw = rec_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(values.astype("<f4").tobytes())
