"""Streaming coreset maintenance: after each batch (or buffered group),
resample the union of the surviving samples and the buffered vectors down
to floor(rate * visited), rotating stored samples into the newest basis
first. Stored vectors never exceed the target bank size plus the trigger
threshold plus one batch, which is the whole point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coreset import ComparisonCounter, CoresetConfig, as_rate, greedy_sample
from .errors import ConfigError, ShapeError
from .linalg import ensure_matrix


@dataclass(frozen=True)
class BufferPolicy:
    """When to trigger a resample.

    kind "no": after every batch. kind "all": never (one resample at
    flush; incremental sampling disabled). kind "factor": once
    buffered >= factor * floor(rate * visited).
    """

    kind: str
    factor: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("no", "all", "factor"):
            raise ConfigError(f"buffer policy must be no|all|factor, got {self.kind!r}")
        if self.kind == "factor":
            if self.factor is None:
                raise ConfigError("factor policy needs a factor >= 1")
            factor = Fraction(str(self.factor) if isinstance(self.factor, float) else self.factor)
            if factor < 1:
                raise ConfigError(f"buffer factor must be >= 1, got {factor}")
            object.__setattr__(self, "factor", factor)

    @classmethod
    def parse(cls, text: str) -> "BufferPolicy":
        text = str(text).strip().lower()
        if text in ("no", "all"):
            return cls(kind=text)
        if text.startswith("factor:"):
            text = text.split(":", 1)[1]
        try:
            factor = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"invalid buffer policy {text!r}") from exc
        return cls(kind="factor", factor=factor)

    def label(self) -> str:
        return self.kind if self.kind != "factor" else f"factor:{self.factor}"


@dataclass(frozen=True)
class IncrementalSamplerConfig:
    rate: Fraction
    batch_size: int
    policy: BufferPolicy = BufferPolicy("no")

    def __post_init__(self):
        object.__setattr__(self, "rate", as_rate(self.rate))
        if self.batch_size < 1:
            raise ConfigError(f"batch size must be >= 1, got {self.batch_size}")


@dataclass(frozen=True)
class SampleSet:
    """Final drain of the sampler: bank coordinates, the global stream
    positions they came from, and the cumulative instrumentation."""

    coords: np.ndarray  # (k, M)
    indices: np.ndarray  # (M,) positions in the observed stream
    counter: ComparisonCounter
    peak_stored: int


class IncrementalSampler:
    """Single-writer state machine; observe_batch() strictly sequentially,
    then flush(). Stored samples stay in the basis they were last rotated
    to; the composed pending rotation is applied lazily at each resample.
    """

    def __init__(self, config: IncrementalSamplerConfig):
        self.config = config
        self.dim: int | None = None
        self.samples = np.empty((0, 0))
        self.sample_ids = np.empty(0, dtype=np.int64)
        self.basis_version = 0
        self._buffer: list[np.ndarray] = []
        self._buffered = 0
        self.visited = 0
        self._pending: np.ndarray | None = None  # None means identity
        self.counter = ComparisonCounter()
        self.peak_stored = 0

    def _stored(self) -> int:
        return self.samples.shape[1] + self._buffered

    def observe_batch(self, batch_coords, transition=None) -> None:
        """Fold one batch of reduced coordinates (k, n_b) into the state.

        batch_coords must already be in the newest basis; transition maps
        the previous basis version into the newest one (identity if None).
        """
        batch_coords = ensure_matrix(batch_coords, "batch coordinates")
        if batch_coords.shape[1] < 1:
            raise ShapeError("empty batch")
        if batch_coords.shape[1] > self.config.batch_size:
            raise ConfigError(
                f"batch of {batch_coords.shape[1]} vectors exceeds the configured "
                f"batch size {self.config.batch_size}"
            )
        if self.dim is None:
            self.dim = int(batch_coords.shape[0])
            self.samples = np.empty((self.dim, 0))
        elif batch_coords.shape[0] != self.dim:
            raise ShapeError(
                f"batch has {batch_coords.shape[0]} rows, expected {self.dim}"
            )
        if transition is not None:
            transition = np.asarray(transition, dtype=np.float64)
            if transition.shape != (self.dim, self.dim):
                raise ShapeError(
                    f"transition must be {self.dim}x{self.dim}, got {transition.shape}"
                )
            self._pending = transition if self._pending is None else transition @ self._pending
        self.basis_version += 1
        self._buffer.append(np.asarray(batch_coords, dtype=np.float64))
        self._buffered += int(batch_coords.shape[1])
        self.visited += int(batch_coords.shape[1])
        self.peak_stored = max(self.peak_stored, self._stored())
        if self._should_fire():
            self._resample()

    def _should_fire(self) -> bool:
        policy = self.config.policy
        if policy.kind == "no":
            return True
        if policy.kind == "all":
            return False
        return self._buffered >= policy.factor * math.floor(self.config.rate * self.visited)

    def _resample(self) -> None:
        if self._pending is not None:
            self.samples = self._pending @ self.samples
            self._pending = None
        start = self.visited - self._buffered
        buffer_ids = np.arange(start, self.visited, dtype=np.int64)
        pool = np.concatenate([self.samples] + self._buffer, axis=1)
        pool_ids = np.concatenate([self.sample_ids, buffer_ids])
        target = CoresetConfig(rate=self.config.rate).resolve(self.visited)
        result = greedy_sample(pool, CoresetConfig(count=target))
        self.counter.add(result.counter)
        self.samples = np.ascontiguousarray(pool[:, result.indices])
        self.sample_ids = pool_ids[result.indices]
        self._buffer = []
        self._buffered = 0

    def flush(self) -> SampleSet:
        """Drain the stream: one final resample if anything is buffered."""
        if self._buffered:
            self._resample()
        return SampleSet(
            coords=self.samples,
            indices=self.sample_ids,
            counter=self.counter,
            peak_stored=self.peak_stored,
        )
