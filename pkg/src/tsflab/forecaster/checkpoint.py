"""Single-file binary checkpoints with a JSON sidecar.

Layout: magic ``TSFL``, format version (u32), header length (u32), UTF-8 JSON
header, then every parameter as little-endian float64 in header order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .model import ForecastModel, ModelConfig, trainer_mask

MAGIC = b"TSFL"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Malformed or incompatible checkpoint file."""


def save_checkpoint(model: ForecastModel, path, extra: dict | None = None) -> Path:
    path = Path(path)
    names, arrays = [], []
    for name, p in model.named_parameters():
        names.append({"name": name, "shape": list(p.shape), "trainable": bool(p.requires_grad)})
        arrays.append(np.ascontiguousarray(p.data, dtype="<f8"))
    header = {
        "format_version": FORMAT_VERSION,
        "config": model.cfg.to_dict(),
        "params": names,
        "vocab": None if model.vocab is None else sorted(model.vocab, key=model.vocab.get),
        "extra": extra or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        for a in arrays:
            fh.write(a.tobytes())
    sidecar = {"config": model.cfg.to_dict(), "format_version": FORMAT_VERSION, "extra": extra or {}}
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def load_checkpoint(path) -> ForecastModel:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    version, hlen = struct.unpack("<II", raw[4:12])
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    header = json.loads(raw[12 : 12 + hlen].decode("utf-8"))
    cfg = ModelConfig(**header["config"])
    vocab = None if header["vocab"] is None else {tok: i for i, tok in enumerate(header["vocab"])}
    model = ForecastModel(cfg, vocab=vocab)
    trainer_mask(model)
    offset = 12 + hlen
    state, flags = {}, {}
    for entry in header["params"]:
        n = int(np.prod(entry["shape"])) if entry["shape"] else 1
        end = offset + 8 * n
        if end > len(raw):
            raise CheckpointError("truncated checkpoint payload")
        state[entry["name"]] = np.frombuffer(raw[offset:end], dtype="<f8").reshape(entry["shape"]).astype(np.float64)
        flags[entry["name"]] = entry["trainable"]
        offset = end
    if offset != len(raw):
        raise CheckpointError("trailing bytes after checkpoint payload")
    model.load_state_dict(state)
    for name, p in model.named_parameters():
        p.requires_grad = flags.get(name, p.requires_grad)
    return model
