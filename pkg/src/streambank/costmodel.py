"""Closed-form predictors for comparison counts.

All arithmetic is exact (fractions.Fraction); a prediction that does not
come out integral under the stated preconditions is a ConfigError, never a
silent rounding. The closed forms:

    batchless:            N * (N * r)
    per-batch sum:        sum_{b=1}^{N/B} [B + r(b-1)B] * [r b B]
    split of the sum:     half  = r N (N + B) / 2
                          extra = r^2 N (N + B)(2N + B) / (6B) - r^2 N (N + B) / 2

half + extra equals the per-batch sum identically over the rationals. For
B = r N and r -> 0 the sum approaches (1/2 + 1/3) = 5/6 of the batchless
count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coreset import as_rate
from .errors import ConfigError


@dataclass(frozen=True)
class CostQuery:
    n_total: int
    batch: int
    rate: Fraction

    def __post_init__(self):
        if self.batch < 1 or self.n_total < self.batch:
            raise ConfigError(
                f"need N >= B >= 1, got N={self.n_total}, B={self.batch}"
            )
        object.__setattr__(self, "rate", as_rate(self.rate))


def _as_count(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ConfigError(f"{what} is not integral ({value}); pick r, B with r*B integral")
    return int(value)


def _require_divisible(q: CostQuery) -> int:
    if q.n_total % q.batch:
        raise ConfigError(f"N={q.n_total} is not divisible by B={q.batch}")
    return q.n_total // q.batch


def predict_batchless(q: CostQuery) -> int:
    """Comparisons to sample N*r vectors from N in one pass."""
    return _as_count(q.n_total * (q.n_total * q.rate), "N * (N * r)")


def predict_incremental_sum(q: CostQuery) -> int:
    """Per-batch resampling total: sum over b of [B + r(b-1)B] * [r b B]."""
    nb = _require_divisible(q)
    b_, r = q.batch, q.rate
    total = Fraction(0)
    for b in range(1, nb + 1):
        total += (b_ + r * (b - 1) * b_) * (r * b * b_)
    return _as_count(total, "incremental sum")


def predict_incremental_closed(q: CostQuery) -> tuple[int, int]:
    """The sum split into its (half_term, extra_term) closed forms."""
    _require_divisible(q)
    n, b, r = q.n_total, q.batch, q.rate
    half = r * n * (n + b) / 2
    extra = r * r * n * (n + b) * (2 * n + b) / (6 * b) - r * r * n * (n + b) / 2
    return _as_count(half, "half term"), _as_count(extra, "extra term")


def predict_policy(q: CostQuery, policy: str = "no", factor=None) -> int:
    """Greedy-comparison count under a buffering policy, by simulating the
    trigger arithmetic (sizes only, no data). Handles any N, B including a
    short final batch, so it matches the instrumented sampler exactly.

    policy: "no" (resample every batch), "all" (one final resample),
    "factor" (resample once buffered >= factor * floor(rate * visited)).
    """
    if policy not in ("no", "all", "factor"):
        raise ConfigError(f"unknown policy {policy!r}")
    if policy == "factor":
        if factor is None:
            raise ConfigError("factor policy needs a factor")
        factor = Fraction(str(factor) if isinstance(factor, float) else factor)
        if factor < 1:
            raise ConfigError(f"buffer factor must be >= 1, got {factor}")
    total = 0
    visited = 0
    samples = 0
    buffered = 0
    remaining = q.n_total
    while remaining:
        size = min(q.batch, remaining)
        remaining -= size
        visited += size
        buffered += size
        if policy == "no":
            fire = True
        elif policy == "all":
            fire = False
        else:
            fire = buffered >= factor * math.floor(q.rate * visited)
        if fire:
            target = max(1, math.floor(q.rate * visited))
            total += (samples + buffered) * target
            samples, buffered = target, 0
    if buffered:
        target = max(1, math.floor(q.rate * visited))
        total += (samples + buffered) * target
    return total
