"""Deterministic greedy k-center sampling of column vectors into a memory
bank, with exact instrumentation of pairwise-distance evaluations.

The initial anchor is the column mean (a virtual point, never a member);
ties in the farthest-point argmax break to the smallest index. Each
selection round scans all N columns, so greedy_comparisons is exactly
N * M and anchor_comparisons exactly N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import ConfigError, ShapeError
from .linalg import ensure_matrix


def as_rate(value) -> Fraction:
    """Coerce a sampling rate to an exact rational in (0, 1].

    Floats are converted through their shortest decimal repr, so 0.01 means
    exactly 1/100; this keeps floor(r * N) targets and counter laws exact.
    """
    if isinstance(value, float):
        value = str(value)
    try:
        rate = Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid sampling rate {value!r}") from exc
    if not 0 < rate <= 1:
        raise ConfigError(f"sampling rate must be in (0, 1], got {rate}")
    return rate


@dataclass(frozen=True)
class CoresetConfig:
    """Bank-size target: an absolute count or a rate resolved as
    floor(rate * N), clamped below at 1."""

    count: int | None = None
    rate: Fraction | None = None

    def __post_init__(self):
        if (self.count is None) == (self.rate is None):
            raise ConfigError("specify exactly one of count or rate")
        if self.count is not None and self.count < 1:
            raise ConfigError(f"target count must be >= 1, got {self.count}")
        if self.rate is not None:
            object.__setattr__(self, "rate", as_rate(self.rate))

    def resolve(self, n: int) -> int:
        if n < 1:
            raise ConfigError("empty input: no vectors to sample from")
        if self.count is not None:
            if self.count > n:
                raise ConfigError(f"target {self.count} exceeds population {n}")
            return self.count
        return max(1, math.floor(self.rate * n))


@dataclass
class ComparisonCounter:
    """Counts of pairwise distance evaluations, split by phase."""

    anchor_comparisons: int = 0
    greedy_comparisons: int = 0

    def add(self, other: "ComparisonCounter") -> None:
        self.anchor_comparisons += other.anchor_comparisons
        self.greedy_comparisons += other.greedy_comparisons


@dataclass(frozen=True)
class CoresetResult:
    indices: np.ndarray  # selection order, unique, each in [0, N)
    counter: ComparisonCounter


def distance(a, b) -> float:
    """Euclidean distance between two vectors."""
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"distance: length mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def greedy_sample(vectors, config: CoresetConfig) -> CoresetResult:
    """Select config-many columns of vectors by farthest-point traversal.

    vectors is (k, N) with columns as points. Deterministic; returns the
    selected column indices in selection order plus the exact comparison
    counts (anchor pass N, greedy pass N per selected sample).
    """
    vectors = ensure_matrix(vectors, "vectors")
    n = vectors.shape[1]
    target = config.resolve(n)
    pts = np.ascontiguousarray(vectors.T, dtype=np.float64)
    indices, anchor_evals, greedy_evals = _kernels.greedy_select(pts, target)
    counter = ComparisonCounter(int(anchor_evals), int(greedy_evals))
    return CoresetResult(indices=indices, counter=counter)
