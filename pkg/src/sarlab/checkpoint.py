"""Versioned binary checkpoint container.

Layout: magic string "SARCKPT", uint32 format version, then one record per
named tensor: uint32 name length, utf-8 name bytes, uint32 rank, uint64 dims,
little-endian float64 payload. Round trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SARCKPT"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


def save_arrays(path, arrays: dict[str, np.ndarray]):
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        for name, arr in arrays.items():
            data = np.ascontiguousarray(arr, dtype="<f8")
            nb = name.encode("utf-8")
            f.write(struct.pack("<I", len(nb)))
            f.write(nb)
            f.write(struct.pack("<I", data.ndim))
            for d in data.shape:
                f.write(struct.pack("<Q", d))
            f.write(data.tobytes())
    tmp.replace(path)


def _read_exact(f, n: int, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise CheckpointError(f"truncated checkpoint while reading {what}")
    return buf


def load_arrays(path) -> dict[str, np.ndarray]:
    path = Path(path)
    arrays: dict[str, np.ndarray] = {}
    with open(path, "rb") as f:
        magic = f.read(len(MAGIC))
        if magic != MAGIC:
            raise CheckpointError(f"bad magic string in {path}: not a checkpoint file")
        version = struct.unpack("<I", _read_exact(f, 4, "version"))[0]
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version} (expected {VERSION})")
        while True:
            head = f.read(4)
            if len(head) == 0:
                break
            if len(head) != 4:
                raise CheckpointError("truncated checkpoint while reading record header")
            name_len = struct.unpack("<I", head)[0]
            name = _read_exact(f, name_len, "tensor name").decode("utf-8")
            rank = struct.unpack("<I", _read_exact(f, 4, "rank"))[0]
            dims = tuple(
                struct.unpack("<Q", _read_exact(f, 8, "dims"))[0] for _ in range(rank)
            )
            count = int(np.prod(dims)) if rank else 1
            payload = _read_exact(f, count * 8, f"payload of {name}")
            arrays[name] = np.frombuffer(payload, dtype="<f8").reshape(dims).copy()
    return arrays


# helpers for stashing non-float state in the float64-only container ---------

def encode_bigint(value: int, width: int = 8) -> np.ndarray:
    """Nonnegative int -> base-2**32 digits, little-endian, as float64."""
    digits = []
    v = int(value)
    if v < 0:
        raise ValueError("encode_bigint expects a nonnegative integer")
    for _ in range(width):
        digits.append(float(v & 0xFFFFFFFF))
        v >>= 32
    if v:
        raise ValueError(f"integer does not fit in {width} base-2**32 digits")
    return np.array(digits)


def decode_bigint(arr: np.ndarray) -> int:
    v = 0
    for d in reversed(np.asarray(arr).ravel()):
        v = (v << 32) | int(d)
    return v


def encode_text(s: str) -> np.ndarray:
    return np.frombuffer(s.encode("utf-8"), dtype=np.uint8).astype(np.float64)


def decode_text(arr: np.ndarray) -> str:
    return np.asarray(arr).astype(np.uint8).tobytes().decode("utf-8")


def encode_rng(gen: np.random.Generator) -> np.ndarray:
    """Serialize a PCG64 generator state (state, inc, has_uint32, uinteger)."""
    st = gen.bit_generator.state
    if st["bit_generator"] != "PCG64":
        raise ValueError("only PCG64 generators are supported")
    return np.concatenate([
        encode_bigint(st["state"]["state"], 4),
        encode_bigint(st["state"]["inc"], 4),
        np.array([float(st["has_uint32"]), float(st["uinteger"])]),
    ])


def decode_rng(arr: np.ndarray) -> np.random.Generator:
    arr = np.asarray(arr).ravel()
    gen = np.random.Generator(np.random.PCG64())
    gen.bit_generator.state = {
        "bit_generator": "PCG64",
        "state": {
            "state": decode_bigint(arr[0:4]),
            "inc": decode_bigint(arr[4:8]),
        },
        "has_uint32": int(arr[8]),
        "uinteger": int(arr[9]),
    }
    return gen
