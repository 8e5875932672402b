"""Dense linear-algebra core: truncated SVD with a deterministic sign
convention, Frobenius norm, and shape-checked products.

Matrices are numpy arrays of shape (m, n) whose columns are the feature
vectors. Precision is "single" (float32) or "double" (float64). All SVD
arithmetic runs in double internally; results are cast back to the input
precision, because rescaling chains in single precision are unstable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, NumericalError, ShapeError

DTYPES = {"single": np.float32, "double": np.float64}

#: Orthonormality / reconstruction tolerances per precision.
TOLERANCES = {"single": 1e-5, "double": 1e-10}


def precision_of(x: np.ndarray) -> str:
    if x.dtype == np.float32:
        return "single"
    if x.dtype == np.float64:
        return "double"
    raise DataError(f"unsupported dtype {x.dtype}; expected float32 or float64")


def ensure_matrix(x, name: str = "matrix", allow_empty: bool = True) -> np.ndarray:
    """Validate and standardize a matrix argument.

    Accepts anything array-like; integer inputs are promoted to float64.
    Rejects non-2-D shapes and non-finite values.
    """
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {x.shape}")
    if x.dtype not in (np.float32, np.float64):
        x = x.astype(np.float64)
    if not allow_empty and x.size == 0:
        raise ShapeError(f"{name} must be non-empty, got shape {x.shape}")
    if x.size and not np.isfinite(x).all():
        raise DataError(f"{name} contains non-finite values")
    return x


@dataclass(frozen=True)
class TruncatedSVD:
    """Leading singular triplets of a matrix: x ~ u @ diag(s) @ v.T.

    u is (m, k'), s is (k',) non-increasing and >= 0, v is (n, k').
    k' = min(k_requested, m, n) shrunk further by numerical-rank truncation.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    k_requested: int

    @property
    def k_effective(self) -> int:
        return int(self.s.shape[0])

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T


def truncated_svd(x, k: int) -> TruncatedSVD:
    """Compute the k leading singular triplets of x.

    Deterministic: each column of u is flipped so its entry of largest
    absolute value (ties: lowest row index) is positive, and the paired v
    column is flipped with it. Singular values at or below
    max(m, n) * s[0] * eps(input dtype) are dropped, so a zero matrix has
    k' = 0.
    """
    x = ensure_matrix(x, "x", allow_empty=False)
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    x64 = np.ascontiguousarray(x, dtype=np.float64)
    try:
        u, s, vt = np.linalg.svd(x64, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"SVD did not converge on {x.shape[0]}x{x.shape[1]} matrix"
        ) from exc
    kp = min(k, x.shape[0], x.shape[1])
    u, s, vt = u[:, :kp], s[:kp], vt[:kp]
    if kp:
        cutoff = max(x.shape) * s[0] * np.finfo(x.dtype).eps
        kp = int(np.count_nonzero(s > cutoff))  # s is sorted, keep the prefix
        u, s, vt = u[:, :kp], s[:kp], vt[:kp]
    v = vt.T.copy()
    u = u.copy()
    if kp:
        lead = np.argmax(np.abs(u), axis=0)
        flip = u[lead, np.arange(kp)] < 0
        u[:, flip] *= -1.0
        v[:, flip] *= -1.0
    dtype = x.dtype
    return TruncatedSVD(
        u=u.astype(dtype, copy=False),
        s=s.astype(dtype, copy=False),
        v=v.astype(dtype, copy=False),
        k_requested=k,
    )


def frobenius_norm(x) -> float:
    x = ensure_matrix(x, "x")
    return float(np.linalg.norm(x)) if x.size else 0.0


def matmul(a, b) -> np.ndarray:
    """a @ b with an explicit inner-dimension check."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    return a @ b


def matmul_tn(a, b) -> np.ndarray:
    """a.T @ b (projection form)."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[0] != b.shape[0]:
        raise ShapeError(f"matmul_tn: leading dimensions differ, {a.shape} x {b.shape}")
    return a.T @ b


def matmul_nt(a, b) -> np.ndarray:
    """a @ b.T (Gram / rotation form)."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"matmul_nt: trailing dimensions differ, {a.shape} x {b.shape}")
    return a @ b.T
