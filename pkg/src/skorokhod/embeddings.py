"""Embeddings of finite sequences into cadlag paths on [0,1].

A sequence (y_0, ..., y_{n-1}) pinned at the grid k/n extends to a path in
four canonical ways: hold the last value (step embedding), interpolate
linearly, hop between the two endpoint values (multi-step), or follow any
rcll path inside the segment between them.  On the final cell
[(n-1)/n, 1] every embedding holds y_{n-1}, because index n is never
read; that keeps all variants within 1/n of the step embedding in their
respective graph distances.

The subordinated embedding runs a chain on a unit-rate counting clock:
Z_t = Y(N(n t)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .cadlag import CONST, LINEAR, CadlagFunction

__all__ = [
    "SequenceData",
    "ChooserPolicy",
    "multi_step_policy",
    "segment_path_policy",
    "excursion_policy",
    "embed",
    "counterexample_sequence",
    "counterexample_limit",
    "PoissonPath",
    "embed_markov",
    "clock_discrepancy",
]


@dataclass(frozen=True)
class SequenceData:
    """First n entries of a (conceptually infinite) sequence in R^d."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if vals.shape[0] == 1 and vals.shape[1] == self.n and self.n > 1:
            vals = vals.reshape(self.n, 1) if np.asarray(self.values).ndim == 1 else vals
        object.__setattr__(self, "values", vals)
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.values.shape[0] < self.n:
            raise ValueError(f"need at least n={self.n} sequence entries")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sequence values must be finite")

    @property
    def dim(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class ChooserPolicy:
    """Interior behaviour for the multi-step and segment-path embeddings.

    ``switches``: for each cell, switch times as fractions of the cell
    paired with which endpoint value (0 = left, 1 = right) to take next.
    ``knots``: (fraction, convex weight) pairs tracing an rcll path inside
    the endpoint segment; repeated fractions encode jumps.  The first knot
    must sit at fraction 0 with weight 0 so the pinning survives.
    """

    switches: Tuple[Tuple[float, int], ...] = ((0.5, 1),)
    knots: Tuple[Tuple[float, float], ...] = ((0.0, 0.0), (0.5, 1.0), (1.0, 1.0))

    def __post_init__(self):
        fr = [s[0] for s in self.switches]
        if any(not 0.0 < x < 1.0 for x in fr) or any(b - a <= 0 for a, b in zip(fr, fr[1:])):
            raise ValueError("switch fractions must be strictly increasing inside (0,1)")
        if any(s[1] not in (0, 1) for s in self.switches):
            raise ValueError("switch targets must be endpoint indices 0 or 1")
        kf = [k[0] for k in self.knots]
        kw = [k[1] for k in self.knots]
        if self.knots[0] != (0.0, 0.0) or kf[-1] != 1.0:
            raise ValueError("knots must start at (0, 0) and end at fraction 1")
        if any(b - a < 0 for a, b in zip(kf, kf[1:])):
            raise ValueError("knot fractions must be nondecreasing")
        if any(not 0.0 <= w <= 1.0 for w in kw):
            raise ValueError("knot weights must be convex coefficients in [0,1]")


def multi_step_policy(switches=((0.5, 1),)) -> ChooserPolicy:
    """Default multi-step chooser: one midpoint switch to the right value."""
    return ChooserPolicy(switches=tuple(switches))


def segment_path_policy(knots=((0.0, 0.0), (0.5, 1.0), (1.0, 1.0))) -> ChooserPolicy:
    """Default segment-path chooser: linear rise then hold."""
    return ChooserPolicy(knots=tuple(knots))


def excursion_policy() -> ChooserPolicy:
    """A wandering segment path: rise, fall back, rise again."""
    return ChooserPolicy(knots=((0.0, 0.0), (0.25, 1.0), (0.5, 0.0), (1.0, 1.0)))


def embed(
    seq: SequenceData,
    topology: str,
    policy: Optional[ChooserPolicy] = None,
    *,
    literal_slope: bool = False,
) -> CadlagFunction:
    """Path through y_k at k/n extended per the topology's convention.

    ``literal_slope`` reproduces, for the linear-interpolation embedding,
    the reading in which the rise has slope (y_{k+1} - y_k) per unit time,
    which reaches only a 1/n fraction of the gap before jumping at the
    grid point.  The default interpolates all the way.
    """
    topology = topology.upper()
    n = seq.n
    y = seq.values[:n]
    policy = policy or ChooserPolicy()
    if topology == "J1":
        if n == 1:
            return CadlagFunction.constant(y[0])
        return CadlagFunction.step(np.arange(1, n) / n, y)

    bp, kinds, starts, ends = [0.0], [], [], []

    def add(hi, kind, s, e):
        bp.append(hi)
        kinds.append(kind)
        starts.append(s)
        ends.append(e)

    for k in range(n - 1):
        lo, hi = k / n, (k + 1) / n
        if topology == "M1":
            if literal_slope:
                add(hi, LINEAR, y[k], y[k] + (hi - lo) * (y[k + 1] - y[k]))
            else:
                add(hi, LINEAR, y[k], y[k + 1])
        elif topology == "J2":
            cur = 0
            for frac, target in policy.switches:
                add(lo + frac / n, CONST, y[k + cur], y[k + cur])
                cur = target
            add(hi, CONST, y[k + cur], y[k + cur])
        elif topology == "M2":
            kf = [kn[0] for kn in policy.knots]
            kw = [kn[1] for kn in policy.knots]
            for a, b, wa, wb in zip(kf[:-1], kf[1:], kw[:-1], kw[1:]):
                if a == b:
                    continue  # jump, realised by the next piece's start
                va = y[k] + wa * (y[k + 1] - y[k])
                vb = y[k] + wb * (y[k + 1] - y[k])
                t_end = hi if b == 1.0 else lo + b / n
                add(t_end, LINEAR if not np.array_equal(va, vb) else CONST, va, vb)
        else:
            raise ValueError(f"unknown topology {topology!r}")
    add(1.0, CONST, y[n - 1], y[n - 1])
    return CadlagFunction(bp, kinds, np.asarray(starts), np.asarray(ends))


def counterexample_sequence(family: int, n: int) -> SequenceData:
    """The three standard families around a half-time unit jump.

    Family 1 climbs through the midpoint value (converges only in the
    M topologies), family 2 flickers 1,0 before settling (multi-step
    behaviour), family 3 visits 1/2, 1, 0 before settling (segment
    behaviour only).
    """
    if n < 4:
        raise ValueError("families are defined for n >= 4")
    if family not in (1, 2, 3):
        raise ValueError("family must be 1, 2 or 3")
    k_star = (n + 1) // 2  # first index with k/n >= 1/2
    y = np.zeros(n)
    patterns = {1: [0.5], 2: [1.0, 0.0], 3: [0.5, 1.0, 0.0]}
    pat = patterns[family]
    for k in range(k_star, n):
        off = k - k_star
        y[k] = pat[off] if off < len(pat) else 1.0
    return SequenceData(n, y.reshape(-1, 1))


def counterexample_limit() -> CadlagFunction:
    """The unit step at one half all three families aim at."""
    return CadlagFunction.indicator(0.5)


# ---------------------------------------------------------------------------
# subordination clock


class PoissonPath:
    """Jump times of a unit-rate counting process on [0, horizon]."""

    __slots__ = ("jump_times", "horizon")

    def __init__(self, jump_times, horizon):
        jt = np.asarray(jump_times, dtype=float).reshape(-1)
        if jt.size and (np.any(np.diff(jt) <= 0.0) or jt[0] < 0.0):
            raise ValueError("jump times must be strictly increasing and nonnegative")
        if jt.size and jt[-1] > horizon:
            raise ValueError("jump beyond the horizon")
        self.jump_times = jt
        self.horizon = float(horizon)

    @classmethod
    def sample(cls, horizon, seed):
        rng = np.random.default_rng(seed)
        block = max(16, int(horizon) + 6 * int(np.sqrt(horizon) + 1))
        times = np.cumsum(rng.exponential(1.0, size=block))
        while times[-1] <= horizon:  # astronomically rare with the margin above
            times = np.concatenate([times, times[-1] + np.cumsum(rng.exponential(1.0, size=block))])
        return cls(times[times <= horizon], horizon)

    def count_at(self, s) -> int:
        """N_s: number of jumps at or before s."""
        return int(np.searchsorted(self.jump_times, s, side="right"))

    def count_before(self, s) -> int:
        """N_{s-}: number of jumps strictly before s."""
        return int(np.searchsorted(self.jump_times, s, side="left"))


def embed_markov(chain_path, clock: PoissonPath, n: int) -> CadlagFunction:
    """Step path Z_t = Y(N(n t)) for t < 1, with Z(1) its left limit."""
    path = np.asarray(chain_path, dtype=float)
    if path.ndim == 1:
        path = path.reshape(-1, 1)
    if clock.horizon < n:
        raise ValueError("clock horizon shorter than n")
    n_before = clock.count_before(n)  # N(n-)
    if path.shape[0] <= n_before:
        raise ValueError("chain path too short for the clock's jump count")
    at_zero = clock.count_at(0.0)
    interior = clock.jump_times[(clock.jump_times > 0.0) & (clock.jump_times < n)] / n
    values = path[at_zero : n_before + 1]
    if interior.size == 0:
        return CadlagFunction.constant(values[0])
    return CadlagFunction.step(interior, values)


def clock_discrepancy(clock: PoissonPath, n: int) -> float:
    """Exact sup over s in [0,1) of |s - N(ns)/n|.

    The count is constant between jumps, so the supremum is attained at a
    jump time or as a left limit there.
    """
    if clock.horizon < n:
        raise ValueError("clock horizon shorter than n")
    ts = clock.jump_times[clock.jump_times < n] / n
    cuts = np.unique(np.concatenate(([0.0], ts[ts < 1.0], [1.0])))
    counts = np.searchsorted(ts, cuts[:-1], side="right") / n
    left = np.abs(cuts[:-1] - counts)
    right = np.abs(cuts[1:] - counts)
    return float(max(left.max(), right.max()))
