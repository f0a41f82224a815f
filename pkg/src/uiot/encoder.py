"""Adapters for external image/text encoders.

The encoder itself is out of process: either a subprocess that reads
one input per stdin line and answers with d comma-separated floats, or
an HTTP endpoint that accepts a POST body and returns a JSON array of
d numbers. Both adapters enforce the dataset's embedding dimension.
"""
from __future__ import annotations

import subprocess
import tempfile
from pathlib import Path
from typing import Sequence

import httpx
import numpy as np

from .errors import EncoderShapeMismatch, EncoderUnavailable
from .preprocess import load_image, pad_to_square
from .uieb import write_embeddings


def _parse_floats(line: str, expected_dim: int | None, source: str) -> np.ndarray:
    try:
        values = np.array([float(tok) for tok in line.strip().split(",")], dtype=np.float32)
    except ValueError as exc:
        raise EncoderUnavailable(f"{source}: unparseable encoder output {line!r}") from exc
    if expected_dim is not None and values.size != expected_dim:
        raise EncoderShapeMismatch(
            f"{source}: encoder returned {values.size} floats, expected {expected_dim}"
        )
    return values


class SubprocessEncoder:
    """One long-lived worker process, one input line per item."""

    def __init__(self, command: Sequence[str], expected_dim: int | None = None):
        self.command = list(command)
        self.expected_dim = expected_dim
        self._proc: subprocess.Popen | None = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                    bufsize=1,
                )
            except OSError as exc:
                raise EncoderUnavailable(f"cannot start encoder {self.command}: {exc}") from exc
        return self._proc

    def _roundtrip(self, line: str) -> np.ndarray:
        proc = self._ensure()
        try:
            proc.stdin.write(line + "\n")
            proc.stdin.flush()
            reply = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise EncoderUnavailable(f"encoder process died: {exc}") from exc
        if not reply:
            raise EncoderUnavailable("encoder process closed its output stream")
        return _parse_floats(reply, self.expected_dim, " ".join(self.command))

    def encode_image(self, image_path: str | Path) -> np.ndarray:
        return self._roundtrip(str(image_path))

    def encode_text(self, text: str) -> np.ndarray:
        return self._roundtrip(text)

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)
        self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


class HttpEncoder:
    """POSTs raw bytes (images) or UTF-8 text and expects a JSON array."""

    def __init__(
        self,
        endpoint: str,
        expected_dim: int | None = None,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self.expected_dim = expected_dim
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def _post(self, content: bytes, content_type: str) -> np.ndarray:
        try:
            response = self._client.post(
                self.endpoint, content=content, headers={"content-type": content_type}
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise EncoderUnavailable(f"encoder endpoint {self.endpoint}: {exc}") from exc
        values = np.asarray(payload, dtype=np.float32)
        if values.ndim != 1:
            raise EncoderUnavailable(f"encoder endpoint returned non-flat payload {payload!r}")
        if self.expected_dim is not None and values.size != self.expected_dim:
            raise EncoderShapeMismatch(
                f"{self.endpoint}: encoder returned {values.size} floats, expected {self.expected_dim}"
            )
        return values

    def encode_image(self, image_path: str | Path) -> np.ndarray:
        return self._post(Path(image_path).read_bytes(), "application/octet-stream")

    def encode_text(self, text: str) -> np.ndarray:
        return self._post(text.encode(), "text/plain")

    def close(self) -> None:
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def encode_images(
    image_paths: Sequence[str | Path],
    encoder,
    pad_square: bool = False,
    out_path: str | Path | None = None,
) -> np.ndarray:
    """Encode images in input order into an (n, d) float32 block.

    With pad_square, each image is letterboxed to a square temp file
    before encoding. Writes a UIEB block when out_path is given.
    """
    rows = []
    for path in image_paths:
        if pad_square:
            squared = pad_to_square(load_image(path))
            with tempfile.NamedTemporaryFile(suffix=".png", delete=False) as tmp:
                squared.save(tmp.name)
                tmp_path = Path(tmp.name)
            try:
                rows.append(encoder.encode_image(tmp_path))
            finally:
                tmp_path.unlink(missing_ok=True)
        else:
            rows.append(encoder.encode_image(path))
    if not rows:
        block = np.zeros((0, encoder.expected_dim or 0), dtype=np.float32)
    else:
        block = np.vstack(rows).astype(np.float32)
    if out_path is not None:
        write_embeddings(out_path, block)
    return block
