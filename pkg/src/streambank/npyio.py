"""Reading and writing ".npy" files, format version 1.0 subset, plus
batched streaming of feature matrices.

Accepted payloads are little-endian float32/float64, C-order, 1-D or 2-D.
Feature files hold one vector per row, shape (n_vectors, m); in memory a
batch is the (m, n_b) transpose with columns as vectors. The header is the
ASCII dict literal

    {'descr': '<f4', 'fortran_order': False, 'shape': (n, m), }

space-padded and newline-terminated so the data starts on a 64-byte
boundary.
"""
from __future__ import annotations

import ast
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError

MAGIC = b"\x93NUMPY"
_VERSION = b"\x01\x00"
_ALIGN = 64

DESCR_DTYPES = {"<f4": np.dtype("<f4"), "<f8": np.dtype("<f8")}
DTYPE_DESCRS = {np.dtype(np.float32): "<f4", np.dtype(np.float64): "<f8"}


@dataclass(frozen=True)
class ArrayHeader:
    """Parsed header of a 2-D feature file: rows are vectors on disk."""

    descr: str
    fortran_order: bool
    shape: tuple[int, int]
    data_offset: int

    @property
    def n_vectors(self) -> int:
        return self.shape[0]

    @property
    def m(self) -> int:
        return self.shape[1]

    @property
    def dtype(self) -> np.dtype:
        return DESCR_DTYPES[self.descr]


def _shape_literal(shape: tuple[int, ...]) -> str:
    if len(shape) == 1:
        return f"({shape[0]},)"
    return "(" + ", ".join(str(s) for s in shape) + ")"


def _build_header(descr: str, shape: tuple[int, ...]) -> bytes:
    src = "{'descr': '%s', 'fortran_order': False, 'shape': %s, }" % (
        descr,
        _shape_literal(shape),
    )
    body = src.encode("ascii")
    base = len(MAGIC) + len(_VERSION) + 2
    pad = -(base + len(body) + 1) % _ALIGN
    body += b" " * pad + b"\n"
    return MAGIC + _VERSION + struct.pack("<H", len(body)) + body


def write_array(path, arr: np.ndarray, dtype=None) -> None:
    """Write a 1-D or 2-D array with its exact shape (C-order)."""
    arr = np.asarray(arr)
    if arr.ndim not in (1, 2):
        raise DataError(f"only 1-D/2-D arrays are written, got {arr.ndim}-D")
    out = arr.astype(np.dtype(dtype) if dtype is not None else arr.dtype, copy=False)
    out = np.ascontiguousarray(out.astype(out.dtype.newbyteorder("<"), copy=False))
    if out.dtype not in DTYPE_DESCRS:
        raise DataError(f"unsupported dtype {out.dtype}; expected float32 or float64")
    header = _build_header(DTYPE_DESCRS[out.dtype], out.shape)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(out.tobytes(order="C"))


def write_matrix(path, x: np.ndarray, dtype=None) -> None:
    """Write an in-memory (m, n) matrix as an (n, m) row-per-vector file."""
    x = np.asarray(x)
    if x.ndim != 2:
        raise DataError(f"matrix must be 2-D, got {x.ndim}-D")
    write_array(path, np.ascontiguousarray(x.T), dtype=dtype)


def _parse_header(fh, path) -> tuple[str, bool, tuple[int, ...], int]:
    start = fh.read(len(MAGIC) + len(_VERSION) + 2)
    if len(start) < len(MAGIC) + 4 or start[: len(MAGIC)] != MAGIC:
        raise DataError(f"{path}: bad magic, not an .npy file")
    major, minor = start[len(MAGIC)], start[len(MAGIC) + 1]
    if (major, minor) != (1, 0):
        raise DataError(f"{path}: unsupported .npy version {major}.{minor}")
    (hlen,) = struct.unpack("<H", start[len(MAGIC) + 2 :])
    body = fh.read(hlen)
    if len(body) != hlen:
        raise DataError(f"{path}: truncated header")
    try:
        meta = ast.literal_eval(body.decode("ascii"))
    except (ValueError, SyntaxError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: corrupt header dict") from exc
    if not isinstance(meta, dict) or set(meta) != {"descr", "fortran_order", "shape"}:
        raise DataError(f"{path}: corrupt header dict")
    descr, fortran, shape = meta["descr"], meta["fortran_order"], tuple(meta["shape"])
    if descr not in DESCR_DTYPES:
        raise DataError(f"{path}: unsupported descr {descr!r}; expected '<f4' or '<f8'")
    if fortran:
        raise DataError(f"{path}: fortran_order must be False")
    offset = len(MAGIC) + len(_VERSION) + 2 + hlen
    return descr, bool(fortran), shape, offset


def read_header(path) -> ArrayHeader:
    """Parse and validate the header of a 2-D feature file."""
    with open(path, "rb") as fh:
        descr, fortran, shape, offset = _parse_header(fh, path)
    if len(shape) != 2:
        raise DataError(f"{path}: feature files must be 2-D, got shape {shape}")
    return ArrayHeader(descr=descr, fortran_order=fortran, shape=shape, data_offset=offset)


def load_array(path) -> np.ndarray:
    """Read a whole 1-D or 2-D array (used for bank components)."""
    with open(path, "rb") as fh:
        descr, _, shape, _ = _parse_header(fh, path)
        if len(shape) not in (1, 2):
            raise DataError(f"{path}: only 1-D/2-D arrays are supported, got {shape}")
        dtype = DESCR_DTYPES[descr]
        count = int(np.prod(shape)) if shape else 0
        raw = fh.read(count * dtype.itemsize)
        if len(raw) != count * dtype.itemsize:
            raise DataError(f"{path}: truncated data, expected {count} values")
        return np.frombuffer(raw, dtype=dtype).reshape(shape).copy()


class BatchStream:
    """Sequential batches of column vectors from one or more feature files.

    Sources must agree on m and dtype. Batches come out as (m, <=n_b)
    arrays in file order, spanning file boundaries, with only the last
    batch possibly short. At most one batch of raw rows is resident at a
    time; peak_rows_read records the largest single read for the memory
    contract.
    """

    def __init__(self, sources, batch_capacity: int):
        if batch_capacity < 1:
            raise ConfigError(f"batch capacity must be >= 1, got {batch_capacity}")
        sources = [Path(s) for s in (sources if isinstance(sources, (list, tuple)) else [sources])]
        if not sources:
            raise ConfigError("no input files")
        self.headers = [read_header(s) for s in sources]
        first = self.headers[0]
        for src, hdr in zip(sources, self.headers):
            if hdr.m != first.m:
                raise DataError(
                    f"{src}: m={hdr.m} differs from {sources[0]} (m={first.m})"
                )
            if hdr.descr != first.descr:
                raise DataError(
                    f"{src}: dtype {hdr.descr} differs from {sources[0]} ({first.descr})"
                )
        self.sources = sources
        self.batch_capacity = batch_capacity
        self.m = first.m
        self.dtype = first.dtype
        self.total_vectors = sum(h.n_vectors for h in self.headers)
        self.peak_rows_read = 0
        self._index = 0  # next source
        self._fh = None
        self._rows_left = 0
        self._row_pos = 0

    def _read_rows(self, want: int) -> np.ndarray:
        src = self.sources[self._index]
        hdr = self.headers[self._index]
        take = min(want, self._rows_left)
        raw = self._fh.read(take * self.m * self.dtype.itemsize)
        if len(raw) != take * self.m * self.dtype.itemsize:
            raise DataError(f"{src}: truncated data at row {self._row_pos}")
        rows = np.frombuffer(raw, dtype=self.dtype).reshape(take, self.m)
        if not np.isfinite(rows).all():
            bad = int(np.argwhere(~np.isfinite(rows).all(axis=1))[0][0])
            raise DataError(f"{src}: non-finite value at row {self._row_pos + bad}")
        self.peak_rows_read = max(self.peak_rows_read, take)
        self._rows_left -= take
        self._row_pos += take
        return rows

    def next_batch(self):
        """The next (m, <=n_b) batch, or None at end of stream."""
        pieces = []
        got = 0
        while got < self.batch_capacity:
            if self._rows_left == 0:
                if self._fh is not None:
                    self._fh.close()
                    self._fh = None
                    self._index += 1
                if self._index >= len(self.sources):
                    break
                hdr = self.headers[self._index]
                self._fh = open(self.sources[self._index], "rb")
                self._fh.seek(hdr.data_offset)
                self._rows_left = hdr.n_vectors
                self._row_pos = 0
                continue
            rows = self._read_rows(self.batch_capacity - got)
            pieces.append(rows)
            got += rows.shape[0]
        if not got:
            return None
        block = pieces[0] if len(pieces) == 1 else np.concatenate(pieces, axis=0)
        return np.ascontiguousarray(block.T)

    def __iter__(self):
        while True:
            batch = self.next_batch()
            if batch is None:
                return
            yield batch
