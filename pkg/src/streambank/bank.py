"""The trained artifact: final basis plus coreset coordinates, with
nearest-entry scoring and directory persistence.

Layout on disk: basis.npy (m x k_eff), svals.npy (k_eff), bank.npy
(k_eff x M), meta.json. Queries are scored as the Euclidean distance from
u_final^T y to the nearest bank column (exact brute force, ties to the
smallest column index).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import ConfigError, DataError, ShapeError
from .linalg import DTYPES, ensure_matrix
from .npyio import load_array, write_array
from .reducer import FinalBasis, project_query

FORMAT_VERSION = 1
META_KEYS = {
    "format_version",
    "k",
    "k_effective",
    "m",
    "precision",
    "n_b",
    "rate",
    "buffer_policy",
    "vectors_seen",
}


@dataclass(frozen=True)
class MemoryBank:
    basis: FinalBasis
    coords: np.ndarray  # (k_eff, M), bank entries as columns
    meta: dict

    @property
    def size(self) -> int:
        return int(self.coords.shape[1])


@dataclass(frozen=True)
class ScoreReport:
    per_vector_scores: np.ndarray  # (q,), >= 0
    nearest_index: np.ndarray  # (q,), bank column achieving the minimum
    image_score: float | None  # max over the scored vectors; None when q = 0


def make_meta(k, k_effective, m, precision, n_b, rate, buffer_policy, vectors_seen) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "k": int(k),
        "k_effective": int(k_effective),
        "m": int(m),
        "precision": str(precision),
        "n_b": int(n_b),
        "rate": float(rate),
        "buffer_policy": str(buffer_policy),
        "vectors_seen": int(vectors_seen),
    }


def score(bank: MemoryBank, queries) -> ScoreReport:
    """Score query columns (m, q) against the bank."""
    queries = ensure_matrix(queries, "queries")
    if queries.shape[0] != bank.basis.m:
        raise ShapeError(
            f"queries must have {bank.basis.m} rows, got shape {queries.shape}"
        )
    if bank.coords.shape[1] == 0:
        raise ConfigError("empty memory bank")
    if queries.shape[1] == 0:
        return ScoreReport(
            per_vector_scores=np.empty(0),
            nearest_index=np.empty(0, dtype=np.int64),
            image_score=None,
        )
    projected = project_query(bank.basis, queries)
    q_rows = np.ascontiguousarray(projected.T, dtype=np.float64)
    bank_rows = np.ascontiguousarray(bank.coords.T, dtype=np.float64)
    dists, idxs = _kernels.nearest_neighbors(q_rows, bank_rows)
    return ScoreReport(
        per_vector_scores=dists,
        nearest_index=idxs,
        image_score=float(dists.max()),
    )


def aggregate_image(scores) -> float:
    """Image-level anomaly score: the maximum over its patch scores."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ConfigError("cannot aggregate an empty score list")
    return float(scores.max())


def save(bank: MemoryBank, directory) -> None:
    """Persist the bank; byte-deterministic for identical inputs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    dtype = DTYPES[bank.meta["precision"]]
    write_array(directory / "basis.npy", bank.basis.u, dtype=dtype)
    write_array(directory / "svals.npy", bank.basis.s, dtype=dtype)
    write_array(directory / "bank.npy", bank.coords, dtype=dtype)
    text = json.dumps(bank.meta, sort_keys=True, indent=2) + "\n"
    (directory / "meta.json").write_text(text, encoding="utf-8")


def load(directory) -> MemoryBank:
    """Load a bank directory, validating cross-file consistency."""
    directory = Path(directory)
    meta_path = directory / "meta.json"
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DataError(f"{meta_path}: missing") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{meta_path}: corrupt JSON") from exc
    if not isinstance(meta, dict) or set(meta) != META_KEYS:
        raise DataError(f"{meta_path}: unexpected keys")
    if meta["format_version"] != FORMAT_VERSION:
        raise DataError(
            f"{meta_path}: format_version {meta['format_version']} unsupported"
        )
    if meta["precision"] not in DTYPES:
        raise DataError(f"{meta_path}: bad precision {meta['precision']!r}")
    u = load_array(directory / "basis.npy")
    s = load_array(directory / "svals.npy")
    coords = load_array(directory / "bank.npy")
    if u.ndim != 2 or u.shape != (meta["m"], meta["k_effective"]):
        raise DataError(
            f"basis.npy shape {u.shape} inconsistent with meta "
            f"({meta['m']}, {meta['k_effective']})"
        )
    if s.ndim != 1 or s.shape[0] != meta["k_effective"]:
        raise DataError(f"svals.npy shape {s.shape} inconsistent with meta")
    if coords.ndim != 2 or coords.shape[0] != meta["k_effective"]:
        raise DataError(
            f"bank.npy has {coords.shape[0]} rows, meta says k_effective={meta['k_effective']}"
        )
    basis = FinalBasis(u=u, s=s, m=int(meta["m"]), k_effective=int(meta["k_effective"]))
    return MemoryBank(basis=basis, coords=coords, meta=meta)
