"""Streaming truncated-SVD maintenance over batches of column vectors.

Each ingested batch X_b is archived as its own truncated SVD
(U_b, S_b, V_b); the running pair (u_cur, s_cur) tracking all visited
batches is refreshed by decomposing the concatenation
[u_cur * s_cur | X_b], which preserves the truncated Gram sum
X_1 X_1^T + ... + X_b X_b^T. The raw batch is never retained. After the
stream ends, finalize() freezes the running pair as the common basis and
derives one rotation per batch,

    r_b = u_final^T @ u_b @ diag(s_b),

which carries that batch's right singular coordinates into the final
space; no singular values are ever inverted, so the reduced coordinates
are the un-normalized projections u_final^T x.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .linalg import DTYPES, matmul_nt, matmul_tn, truncated_svd


@dataclass(frozen=True)
class ReducerConfig:
    k: int
    batch_capacity: int
    precision: str = "double"

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.batch_capacity < 1:
            raise ConfigError(f"batch capacity must be >= 1, got {self.batch_capacity}")
        if self.precision not in DTYPES:
            raise ConfigError(f"precision must be 'single' or 'double', got {self.precision!r}")

    @property
    def dtype(self):
        return DTYPES[self.precision]


@dataclass(frozen=True)
class BatchDecomposition:
    """Archived truncated SVD of one batch; batch_index is 1-based."""

    u: np.ndarray  # (m, k')
    s: np.ndarray  # (k',)
    v: np.ndarray  # (n_b, k')
    batch_index: int
    batch_size: int


@dataclass(frozen=True)
class FinalBasis:
    u: np.ndarray  # (m, k_eff), orthonormal columns
    s: np.ndarray  # (k_eff,), non-increasing
    m: int
    k_effective: int


@dataclass(frozen=True)
class RotationMatrix:
    r: np.ndarray  # (k_eff, k'_b)
    batch_index: int


class IncrementalReducer:
    """Single-writer state machine: ingest_batch() strictly sequentially,
    then finalize(). The archive and the running pair are all that is
    retained: k'(m + n_b + 1) values per batch plus one (m k' + k') pair.
    """

    def __init__(self, config: ReducerConfig):
        self.config = config
        self.m: int | None = None
        self.u_cur: np.ndarray | None = None
        self.s_cur: np.ndarray | None = None
        self.archive: list[BatchDecomposition] = []
        self.total_vectors = 0

    def ingest_batch(self, x_b) -> None:
        """Archive the batch's decomposition and refresh the running pair.

        The previous running pair is discarded; x_b itself is not kept.
        """
        x_b = np.asarray(x_b)
        if x_b.ndim != 2 or x_b.shape[1] < 1:
            raise ShapeError(f"batch must be a non-empty 2-D matrix, got shape {x_b.shape}")
        if x_b.shape[1] > self.config.batch_capacity:
            raise ConfigError(
                f"batch of {x_b.shape[1]} vectors exceeds capacity {self.config.batch_capacity}"
            )
        if self.m is None:
            self.m = int(x_b.shape[0])
        elif x_b.shape[0] != self.m:
            raise ShapeError(f"batch has {x_b.shape[0]} rows, expected {self.m}")
        x_b = x_b.astype(self.config.dtype, copy=False)

        dec = truncated_svd(x_b, self.config.k)
        self.archive.append(
            BatchDecomposition(
                u=dec.u,
                s=dec.s,
                v=dec.v,
                batch_index=len(self.archive) + 1,
                batch_size=int(x_b.shape[1]),
            )
        )
        if self.u_cur is None:
            self.u_cur, self.s_cur = dec.u, dec.s
        elif dec.s.shape[0]:  # an all-zero batch leaves the Gram sum unchanged
            combined = np.concatenate([self.u_cur * self.s_cur, x_b], axis=1)
            upd = truncated_svd(combined, self.config.k)
            self.u_cur, self.s_cur = upd.u, upd.s
        self.total_vectors += int(x_b.shape[1])

    def finalize(self) -> tuple[FinalBasis, list[RotationMatrix]]:
        """Freeze the basis and compute one rotation per archived batch."""
        if not self.archive:
            raise ConfigError("finalize: no batches ingested")
        basis = FinalBasis(
            u=self.u_cur,
            s=self.s_cur,
            m=self.m,
            k_effective=int(self.u_cur.shape[1]),
        )
        rotations = [
            RotationMatrix(r=matmul_tn(basis.u, dec.u) * dec.s, batch_index=dec.batch_index)
            for dec in self.archive
        ]
        return basis, rotations


def reduce_batch(rot: RotationMatrix, dec: BatchDecomposition) -> np.ndarray:
    """Coordinates of one batch in the final basis: r_b @ v_b^T, a
    (k_eff, n_b) matrix approximating u_final^T x_b."""
    if rot.batch_index != dec.batch_index:
        raise ConfigError(
            f"rotation is for batch {rot.batch_index}, decomposition for {dec.batch_index}"
        )
    return matmul_nt(rot.r, dec.v)


def project_query(basis: FinalBasis, y) -> np.ndarray:
    """Project query columns into the final space: u_final^T y."""
    y = np.asarray(y)
    if y.ndim != 2 or y.shape[0] != basis.m:
        raise ShapeError(f"queries must have {basis.m} rows, got shape {y.shape}")
    return matmul_tn(basis.u, y)
