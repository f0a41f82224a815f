"""UIEB embedding-block file format.

Layout, all little-endian: magic b"UIEB", version u32, n u32, d u32,
then n*d IEEE-754 float32 values row-major. Trivially parseable from
any language and memory-mappable at a fixed 16-byte offset.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import EmbeddingFileCorrupt

MAGIC = b"UIEB"
VERSION = 1
HEADER = struct.Struct("<4sIII")


def write_embeddings(path: str | Path, block: np.ndarray) -> None:
    """Write an (n, d) block; values are stored as float32 bit-exactly."""
    arr = np.ascontiguousarray(block, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError(f"embedding block must be 2-d, got shape {arr.shape}")
    n, d = arr.shape
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, n, d))
        fh.write(arr.astype("<f4", copy=False).tobytes())


def read_embeddings(path: str | Path, mmap: bool = False) -> np.ndarray:
    """Read a block back as float32 (n, d). Raises EmbeddingFileCorrupt
    on bad magic, unsupported version, or truncation."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            header = fh.read(HEADER.size)
    except OSError as exc:
        raise EmbeddingFileCorrupt(f"cannot read {path}: {exc}") from exc
    if len(header) < HEADER.size:
        raise EmbeddingFileCorrupt(f"{path}: truncated header")
    magic, version, n, d = HEADER.unpack(header)
    if magic != MAGIC:
        raise EmbeddingFileCorrupt(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise EmbeddingFileCorrupt(f"{path}: unsupported version {version}")
    expected = HEADER.size + 4 * n * d
    actual = path.stat().st_size
    if actual != expected:
        raise EmbeddingFileCorrupt(f"{path}: expected {expected} bytes, found {actual}")
    if mmap:
        return np.memmap(path, dtype="<f4", mode="r", offset=HEADER.size, shape=(n, d))
    with open(path, "rb") as fh:
        fh.seek(HEADER.size)
        data = np.frombuffer(fh.read(), dtype="<f4")
    return data.reshape(n, d)
