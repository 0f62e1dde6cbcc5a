"""Ensemble statistics for (entanglement, final entropy) scatter data."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

DEFAULT_BIN_WIDTH = 0.05
DEFAULT_MIN_COUNT = 200
# mean final entropy per qubit of separable Haar states, as rounded in the study
SEPARABLE_PER_QUBIT = 0.72


@dataclass(frozen=True)
class Moments:
    """Mergeable first and second moments of paired samples.

    ``m2_q``, ``m2_s`` and ``c_qs`` are sums of squared/cross deviations from the
    mean. Shards combine with the pairwise update of Chan, Golub and LeVeque.
    """

    count: int = 0
    mean_q: float = 0.0
    mean_s: float = 0.0
    m2_q: float = 0.0
    m2_s: float = 0.0
    c_qs: float = 0.0

    @classmethod
    def from_arrays(cls, q, s) -> "Moments":
        q = np.asarray(q, dtype=float)
        s = np.asarray(s, dtype=float)
        if q.shape != s.shape:
            raise ValueError("q and s must have equal length")
        if q.size == 0:
            return cls()
        mq, ms = float(q.mean()), float(s.mean())
        dq, ds = q - mq, s - ms
        return cls(int(q.size), mq, ms, float(dq @ dq), float(ds @ ds), float(dq @ ds))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        dq = other.mean_q - self.mean_q
        ds = other.mean_s - self.mean_s
        w = self.count * other.count / n
        return Moments(
            n,
            self.mean_q + dq * other.count / n,
            self.mean_s + ds * other.count / n,
            self.m2_q + other.m2_q + dq * dq * w,
            self.m2_s + other.m2_s + ds * ds * w,
            self.c_qs + other.c_qs + dq * ds * w,
        )

    @property
    def var_q(self) -> float:
        return self.m2_q / self.count if self.count else math.nan

    @property
    def var_s(self) -> float:
        return self.m2_s / self.count if self.count else math.nan

    @property
    def pearson(self) -> float | None:
        if self.count < 2 or self.m2_q <= 0.0 or self.m2_s <= 0.0:
            return None
        r = self.c_qs / math.sqrt(self.m2_q * self.m2_s)
        return max(-1.0, min(1.0, r))

    @property
    def ols_slope(self) -> float | None:
        if self.count < 2 or self.m2_q <= 0.0:
            return None
        return self.c_qs / self.m2_q


@dataclass(frozen=True)
class Line:
    intercept: float
    slope: float
    q_max: float
    kind: str = "anchored"

    @property
    def angle_degrees(self) -> float:
        return math.degrees(math.atan(self.slope))

    @property
    def s_at_qmax(self) -> float:
        return self.intercept + self.slope * self.q_max

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "intercept_at_q0": self.intercept,
            "slope": self.slope,
            "angle_degrees": self.angle_degrees,
            "q_max": self.q_max,
            "s_at_qmax": self.s_at_qmax,
        }


@dataclass(frozen=True)
class RunSummary:
    count: int
    mean_q: float
    mean_s: float
    var_q: float
    var_s: float
    pearson: float | None
    line: Line | None
    binned_curve: list = field(default_factory=list)
    entanglement_fraction: float | None = None
    separable_mean_s: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["line"] = None if self.line is None else self.line.to_dict()
        d["binned_curve"] = [
            {"bin_center": c, "mean_s": m, "count": k} for c, m, k in self.binned_curve
        ]
        return d


def pearson(q, s) -> float | None:
    """Product-moment correlation, or ``None`` when either coordinate is constant."""
    q = np.asarray(q, dtype=float)
    if q.size < 2:
        raise ValueError("pearson needs at least 2 samples")
    return Moments.from_arrays(q, s).pearson


def binned_means(q, s, bin_width: float = DEFAULT_BIN_WIDTH, min_count: int = DEFAULT_MIN_COUNT) -> list:
    """Mean ``s`` over consecutive ``q`` bins ``[k*w, (k+1)*w)``.

    Returns ``(center, mean_s, count)`` tuples in ascending ``q`` for bins holding at
    least ``min_count`` samples.
    """
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    if q.size == 0:
        return []
    k = np.floor(q / bin_width).astype(np.int64)
    k -= k.min()
    offset = int(np.floor(q.min() / bin_width))
    counts = np.bincount(k)
    sums = np.bincount(k, weights=s)
    out = []
    for b in np.flatnonzero(counts >= max(min_count, 1)):
        out.append(((offset + b + 0.5) * bin_width, float(sums[b] / counts[b]), int(counts[b])))
    return out


def entanglement_fraction(mean_s: float, mean_s_q0: float) -> float:
    """Share of the mean final entropy attributable to initial entanglement."""
    if not mean_s > 0:
        raise ValueError("mean_s must be positive")
    return (mean_s - mean_s_q0) / mean_s


def max_angle_bound(n: int, separable_per_qubit: float = SEPARABLE_PER_QUBIT) -> float:
    """Steepest anchored line possible: from ``(0, c*n)`` to ``(n/2, n)``, in degrees."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.degrees(math.atan((n - separable_per_qubit * n) / (n / 2)))


def summarize(
    q,
    s,
    separable_mean_s: float | None = None,
    q_max: float | None = None,
    bin_width: float = DEFAULT_BIN_WIDTH,
    min_count: int = DEFAULT_MIN_COUNT,
    moments: Moments | None = None,
) -> RunSummary:
    """Aggregate one scatter run.

    With ``separable_mean_s`` the line passes through ``(0, separable_mean_s)`` and
    the ensemble mean point; without it an ordinary least-squares fit is used. The
    line is ``None`` when it is undefined (zero mean ``q``, or constant ``q``).
    ``moments`` may carry pre-merged shard statistics for the same samples.
    """
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    if q.size < 2:
        raise ValueError("summarize needs at least 2 samples")
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(s))):
        raise ValueError("samples must be finite")
    mom = moments if moments is not None else Moments.from_arrays(q, s)
    if q_max is None:
        q_max = float(q.max())
    line = None
    fraction = None
    if separable_mean_s is not None:
        if mom.mean_q > 0:
            slope = (mom.mean_s - separable_mean_s) / mom.mean_q
            line = Line(separable_mean_s, slope, q_max, "anchored")
        if mom.mean_s > 0:
            fraction = entanglement_fraction(mom.mean_s, separable_mean_s)
    else:
        slope = mom.ols_slope
        if slope is not None:
            line = Line(mom.mean_s - slope * mom.mean_q, slope, q_max, "least-squares")
    return RunSummary(
        count=mom.count,
        mean_q=mom.mean_q,
        mean_s=mom.mean_s,
        var_q=mom.var_q,
        var_s=mom.var_s,
        pearson=mom.pearson,
        line=line,
        binned_curve=binned_means(q, s, bin_width, min_count),
        entanglement_fraction=fraction,
        separable_mean_s=separable_mean_s,
    )
