"""Scalar path functionals that characterise convergence: first passage
and overshoot over a level, alternation counts across a band, and
interval extrema.  All are exact for piecewise functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cadlag import CadlagFunction, CONST

__all__ = [
    "Window",
    "Band",
    "clamp_extend",
    "first_passage",
    "overshoot",
    "oscillation_count",
    "interval_extrema",
]


@dataclass(frozen=True)
class Window:
    t1: float
    t2: float

    def __post_init__(self):
        if not 0.0 <= self.t1 <= self.t2 <= 1.0:
            raise ValueError("window must satisfy 0 <= t1 <= t2 <= 1")


@dataclass(frozen=True)
class Band:
    a: float
    b: Optional[float] = None

    def __post_init__(self):
        if self.b is not None and not self.a < self.b:
            raise ValueError("band needs a < b")


def _require_scalar(f: CadlagFunction):
    if f.dim != 1:
        raise ValueError("functional requires a scalar function; project() first")


def clamp_extend(f: CadlagFunction, w: Window) -> CadlagFunction:
    """Freeze f outside the window: f(t1+) before it, f(t2-) after it.

    The result is kept right continuous, so when f jumps exactly at t2 the
    value at t2 is the left limit f(t2-) rather than f(t2); the
    characterisations only use windows whose endpoints are continuity
    points, where the distinction vanishes.
    """
    _require_scalar(f)
    if w.t1 == w.t2:
        return CadlagFunction.constant(f.evaluate(w.t1))
    bp, kinds, starts, ends = [0.0], [], [], []
    head = f.evaluate(w.t1)
    if w.t1 > 0.0:
        bp.append(w.t1)
        kinds.append(CONST)
        starts.append(head)
        ends.append(head)
    for i in range(f.n_pieces):
        p_lo, p_hi = f.breakpoints[i], f.breakpoints[i + 1]
        if p_hi <= w.t1 or p_lo >= w.t2:
            continue
        a, b = max(p_lo, w.t1), min(p_hi, w.t2)
        va = f._value_in_piece(np.array([i]), np.array([a]))[0]
        vb = f.ends[i] if b == p_hi else f._value_in_piece(np.array([i]), np.array([b]))[0]
        bp.append(b)
        kinds.append(f.kinds[i])
        starts.append(va)
        ends.append(vb)
    tail = f.left_limit(w.t2)
    if w.t2 < 1.0:
        bp.append(1.0)
        kinds.append(CONST)
        starts.append(tail)
        ends.append(tail)
    return CadlagFunction(bp, kinds, np.asarray(starts), np.asarray(ends))


def first_passage(f: CadlagFunction, a: float) -> float:
    """inf of {t : f(t) >= a} with the empty infimum taken to be 1."""
    _require_scalar(f)
    for i in range(f.n_pieces):
        lo, hi = f.breakpoints[i], f.breakpoints[i + 1]
        s, e = float(f.starts[i][0]), float(f.ends[i][0])
        if s >= a:
            return float(lo)
        if e > s and a < e:
            # increasing piece crosses the level strictly inside
            return float(lo + (a - s) / (e - s) * (hi - lo))
    if float(f.terminal_value[0]) >= a:
        return 1.0
    return 1.0


def overshoot(f: CadlagFunction, w: Window, a: float) -> float:
    """Excess over the level at the first passage of the clamped function,
    or -1 when the level is not reached before time 1."""
    g = clamp_extend(f, w)
    tau = first_passage(g, a)
    if tau < 1.0:
        return float(g.evaluate(tau)[0]) - a
    return -1.0


def _predicate_interval(s, e, lo, hi, threshold, want_low):
    """Closed subinterval of the half-open piece [lo, hi) where the linear
    value satisfies (<= threshold) or (>= threshold).  None when empty."""
    ok_s = s <= threshold if want_low else s >= threshold
    ok_e = e <= threshold if want_low else e >= threshold
    if ok_s and ok_e:
        return lo, hi, False  # right end open
    if not ok_s and not ok_e:
        return None
    t_cross = lo + (threshold - s) / (e - s) * (hi - lo)
    if ok_s:
        return lo, t_cross, True  # value hits the threshold exactly at t_cross
    # predicate holds from the crossing onwards, up to the open end
    if t_cross >= hi:
        return None
    return t_cross, hi, False


def oscillation_count(f: CadlagFunction, w: Window, band: Band) -> int:
    """Largest k admitting times t0 < ... < tk in the window with values
    alternating <= a, >= b, <= a, ...  Greedy earliest-crossing scan; the
    window edges contribute f(t1+) and f(t2-) only."""
    if band.b is None:
        raise ValueError("oscillation count needs a full band [a, b]")
    g = clamp_extend(f, w)
    a, b = band.a, band.b
    count = -1
    want_low = True
    pos = 0.0
    pos_strict = False

    pieces = [
        (g.breakpoints[i], g.breakpoints[i + 1], float(g.starts[i][0]), float(g.ends[i][0]))
        for i in range(g.n_pieces)
    ]
    pieces.append((1.0, 1.0, float(g.terminal_value[0]), float(g.terminal_value[0])))

    i = 0
    while i < len(pieces):
        lo, hi, s, e = pieces[i]
        thresh = a if want_low else b
        if lo == hi:  # the single point t = 1
            hit = (s <= thresh) if want_low else (s >= thresh)
            admissible = pos < 1.0 or (pos == 1.0 and not pos_strict)
            if hit and admissible:
                count += 1
                want_low = not want_low
                pos, pos_strict = 1.0, True
                continue
            i += 1
            continue
        span = _predicate_interval(s, e, lo, hi, thresh, want_low)
        if span is not None:
            s_lo, s_hi, closed_right = span
            if s_lo > pos or (s_lo == pos and not pos_strict):
                # take the left end of the span exactly
                pos, pos_strict = s_lo, True
                count += 1
                want_low = not want_low
                continue
            if pos < s_hi or (pos == s_hi and closed_right and not pos_strict):
                # the span still has points (arbitrarily close) after pos
                pos_strict = True
                count += 1
                want_low = not want_low
                continue
        i += 1
    return max(count, 0)


def interval_extrema(f: CadlagFunction, w: Window):
    """(inf, sup) of f over the closed window, including one-sided limits."""
    _require_scalar(f)
    cands = [float(f.evaluate(w.t1)[0]), float(f.evaluate(w.t2)[0])]
    for i in range(f.n_pieces):
        p_lo, p_hi = f.breakpoints[i], f.breakpoints[i + 1]
        if p_lo > w.t2 or p_hi <= w.t1:
            continue
        a, b = max(p_lo, w.t1), min(p_hi, w.t2)
        if a > b:
            continue
        cands.append(float(f._value_in_piece(np.array([i]), np.array([a]))[0, 0]))
        vb = f.ends[i] if b == p_hi else f._value_in_piece(np.array([i]), np.array([b]))[0]
        cands.append(float(np.asarray(vb).reshape(-1)[0]))
    return min(cands), max(cands)
