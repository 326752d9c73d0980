"""Versioned binary checkpoints.

Layout: 8-byte magic, uint32 header length, UTF-8 header JSON
{format_version, kind, config, param_count}, little-endian float32
parameter payload in state-dict order, SHA-256 digest of header plus
payload. Loading rebuilds the network from its recorded kind and
config, so a checkpoint is self-describing.
"""
from __future__ import annotations

import hashlib
import json
import struct

import numpy as np
import torch
from torch import nn

from .networks import NETWORK_KINDS

__all__ = ["save_checkpoint", "load_checkpoint"]

MAGIC = b"FLOWCKPT"
FORMAT_VERSION = 1


def _flatten_params(network: nn.Module) -> np.ndarray:
    parts = [
        p.detach().cpu().numpy().astype("<f4").ravel()
        for p in network.state_dict().values()
    ]
    if not parts:
        return np.zeros(0, dtype="<f4")
    return np.concatenate(parts)


def save_checkpoint(network: nn.Module, path) -> None:
    """Write the network's architecture and parameters to ``path``."""
    kind = getattr(network, "kind", None)
    if kind not in NETWORK_KINDS:
        raise ValueError(f"cannot checkpoint unknown network kind {kind!r}")
    payload = _flatten_params(network).tobytes()
    header = json.dumps(
        {
            "format_version": FORMAT_VERSION,
            "kind": kind,
            "config": network.config(),
            "param_count": len(payload) // 4,
        },
        sort_keys=True,
    ).encode()
    digest = hashlib.sha256(header + payload).digest()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(payload)
        fh.write(digest)


def load_checkpoint(path) -> nn.Module:
    """Rebuild a network from a checkpoint, verifying its digest."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < len(MAGIC) + 4 + 32 or raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    (header_len,) = struct.unpack_from("<I", raw, len(MAGIC))
    body_start = len(MAGIC) + 4
    payload_start = body_start + header_len
    digest = raw[-32:]
    if hashlib.sha256(raw[body_start:-32]).digest() != digest:
        raise ValueError(f"{path}: checksum mismatch")
    try:
        header = json.loads(raw[body_start:payload_start])
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: bad header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {header.get('format_version')!r}")
    kind = header.get("kind")
    if kind not in NETWORK_KINDS:
        raise ValueError(f"{path}: unknown network kind {kind!r}")

    config = dict(header["config"])
    if kind == "patch_discriminator":
        config["channels"] = tuple(config["channels"])
        config["strides"] = tuple(config["strides"])
    network = NETWORK_KINDS[kind](**config)

    flat = np.frombuffer(raw[payload_start:-32], dtype="<f4")
    if flat.size != header["param_count"]:
        raise ValueError(
            f"{path}: payload holds {flat.size} values, header says {header['param_count']}"
        )
    state = network.state_dict()
    offset = 0
    for key, tensor in state.items():
        n = tensor.numel()
        if offset + n > flat.size:
            raise ValueError(f"{path}: payload too short at {key}")
        chunk = torch.from_numpy(flat[offset : offset + n].copy().astype(np.float32))
        state[key] = chunk.view(tensor.shape).to(tensor.dtype)
        offset += n
    if offset != flat.size:
        raise ValueError(f"{path}: {flat.size - offset} unused payload values")
    network.load_state_dict(state)
    return network
