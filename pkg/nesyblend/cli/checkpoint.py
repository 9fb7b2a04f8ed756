"""
Module comprising the checkpoint file format.

A checkpoint is ``MAGIC``, one version byte, an 8-byte little-endian header
length, a UTF-8 JSON header with sorted keys and then one length-prefixed
raw section per array. The header holds every scalar and the manifest
(dtype, shape, kind) of the sections, so arrays round-trip bit-exactly.

@date: Oct 2026
"""

__all__ = [
    "FORMAT_VERSION",
    "MAGIC",
    "save_checkpoint",
    "load_checkpoint",
    "encode_checkpoint",
    "decode_checkpoint",
]

import json
import logging
import pathlib
import struct

import numpy as np
import torch

from ..common.errors import CheckpointError

logger = logging.getLogger(__name__)

MAGIC = b"NESYCKPT"
FORMAT_VERSION = 1
_LENGTH = struct.Struct("<Q")


def _encode(obj, sections):
    if isinstance(obj, torch.Tensor):
        sections.append(("tensor", obj.detach().cpu().contiguous().numpy()))
        return {"__section__": len(sections) - 1}
    if isinstance(obj, np.ndarray):
        sections.append(("ndarray", np.ascontiguousarray(obj)))
        return {"__section__": len(sections) - 1}
    if isinstance(obj, dict):
        if all(isinstance(k, str) for k in obj):
            # sorted, so that section order follows the header order
            return {k: _encode(obj[k], sections) for k in sorted(obj)}
        return {"__items__": [[_encode(k, sections), _encode(v, sections)] for k, v in obj.items()]}
    if isinstance(obj, tuple):
        return {"__tuple__": [_encode(v, sections) for v in obj]}
    if isinstance(obj, list):
        return [_encode(v, sections) for v in obj]
    if isinstance(obj, (np.bool_, )):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise CheckpointError(f"cannot store a value of type {type(obj).__name__}")


def _decode(obj, arrays):
    if isinstance(obj, dict):
        if "__section__" in obj:
            kind, array = arrays[obj["__section__"]]
            return torch.from_numpy(array.copy()) if kind == "tensor" else array.copy()
        if "__items__" in obj:
            return {_decode(k, arrays): _decode(v, arrays) for k, v in obj["__items__"]}
        if "__tuple__" in obj:
            return tuple(_decode(v, arrays) for v in obj["__tuple__"])
        return {k: _decode(v, arrays) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v, arrays) for v in obj]
    return obj


def encode_checkpoint(state):
    """Serialize a nested state of dicts, lists, scalars, arrays and tensors."""
    sections = []
    tree = _encode(state, sections)
    manifest = [{"kind": kind, "dtype": a.dtype.str, "shape": list(a.shape)} for kind, a in sections]
    header = json.dumps({"version": FORMAT_VERSION, "sections": manifest, "state": tree}, sort_keys=True)
    header = header.encode("utf-8")

    parts = [MAGIC, bytes([FORMAT_VERSION]), _LENGTH.pack(len(header)), header]
    for _, array in sections:
        payload = array.tobytes()
        parts += [_LENGTH.pack(len(payload)), payload]
    return b"".join(parts)


def decode_checkpoint(data):
    """Inverse of ``encode_checkpoint``; rejects foreign, truncated or other-version data."""
    if not data.startswith(MAGIC):
        raise CheckpointError("not a checkpoint file (bad magic)")
    pos = len(MAGIC)
    if len(data) < pos + 1 + _LENGTH.size:
        raise CheckpointError("truncated checkpoint header")
    version = data[pos]
    if version != FORMAT_VERSION:
        raise CheckpointError(f"checkpoint format version {version} is not supported (expected {FORMAT_VERSION})")
    pos += 1

    def read_block():
        nonlocal pos
        if len(data) < pos + _LENGTH.size:
            raise CheckpointError("truncated checkpoint")
        (length, ) = _LENGTH.unpack_from(data, pos)
        pos += _LENGTH.size
        if len(data) < pos + length:
            raise CheckpointError("truncated checkpoint")
        block = data[pos:pos + length]
        pos += length
        return block

    try:
        header = json.loads(read_block().decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as e:
        raise CheckpointError(f"corrupt checkpoint header: {e}") from e
    if header.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"checkpoint header version {header.get('version')} does not match the format")

    arrays = []
    for entry in header["sections"]:
        block = read_block()
        dtype = np.dtype(entry["dtype"])
        expected = int(np.prod(entry["shape"], dtype=np.int64)) * dtype.itemsize
        if len(block) != expected:
            raise CheckpointError(f"section of {len(block)} bytes, expected {expected}")
        arrays.append((entry["kind"], np.frombuffer(block, dtype=dtype).reshape(entry["shape"])))
    if pos != len(data):
        raise CheckpointError("trailing bytes after the last checkpoint section")
    return _decode(header["state"], arrays)


def save_checkpoint(path, state):
    """Write ``state`` to ``path``; returns the path."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = encode_checkpoint(state)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
    tmp.replace(path)
    logger.info("checkpoint written to %s (%d bytes)", path, len(data))
    return path


def load_checkpoint(path):
    path = pathlib.Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "rb") as f:
        return decode_checkpoint(f.read())
