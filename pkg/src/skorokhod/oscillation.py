"""Three-point oscillation gauges and their windowed suprema.

The J gauge of (x, x1, x2) is the smaller of the two distances from x to
its neighbours; the M gauge is zero when x lies on the segment between
them and equals the J gauge otherwise.  Windowed suprema over the triple
families T1 (ordered triples inside a delta window) and T2 (endpoints
pinned to the far halves of the window) characterise convergence in the
four classical topologies.

For piecewise-constant functions the suprema are computed exactly: the
gauge only depends on which piece each time lands in, so the supremum is
a maximum over piece-index triples, and feasibility of a triple is a
closed-form interval condition.  Piecewise-linear pieces are subdivided
and the report carries a certified error bound of 3 * slope * step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cadlag import CadlagFunction

__all__ = [
    "TripleSet",
    "OscillationReport",
    "j_gauge",
    "m_gauge",
    "oscillation",
    "oscillation_profile",
    "boundary_oscillation",
    "grid_oracle",
]

_SEGMENT_TOL = 1e-12
TOPOLOGIES = ("J1", "J2", "M1", "M2")


def j_gauge(x, x1, x2) -> float:
    """min(|x - x1|, |x - x2|); symmetric in the neighbours."""
    x = np.asarray(x, dtype=float)
    return float(min(np.linalg.norm(x - np.asarray(x1, dtype=float)), np.linalg.norm(x - np.asarray(x2, dtype=float))))


def m_gauge(x, x1, x2) -> float:
    """0 if x lies on the segment [x1, x2], else the J gauge.

    Note the off-segment value is the J gauge, not the Euclidean distance
    to the segment; in dimension one the two coincide.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    x1 = np.asarray(x1, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if _on_segment(x, x1, x2):
        return 0.0
    return j_gauge(x, x1, x2)


def _on_segment(x, x1, x2):
    if x.size == 1:
        return (x1[0] - x[0]) * (x2[0] - x[0]) <= 0.0
    w = x2 - x1
    u = x - x1
    ww = float(w @ w)
    t = 0.0 if ww == 0.0 else min(1.0, max(0.0, float(u @ w) / ww))
    return float(np.linalg.norm(u - t * w)) <= _SEGMENT_TOL


@dataclass(frozen=True)
class TripleSet:
    """Constraint family for (t, t1, t2) triples at window width delta.

    ``ordered`` applies to the T2 family only: it additionally requires
    t1 <= t <= t2, which is what makes the J2/M2 suprema comparable with
    the T1-based ones near the interval boundary.  The raw formula
    (ordered=False) lets the windows overtake t when t is within delta of
    0 or 1.
    """

    family: str
    delta: float
    ordered: bool = True

    def __post_init__(self):
        if self.family not in ("T1", "T2"):
            raise ValueError("family must be 'T1' or 'T2'")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError("delta must be in (0, 1]")

    def contains(self, t, t1, t2) -> bool:
        d = self.delta
        if not (0.0 <= t <= 1.0 and 0.0 <= t1 <= 1.0 and 0.0 <= t2 <= 1.0):
            return False
        if self.family == "T1":
            return max(t - d, 0.0) <= t1 < t < t2 <= min(t + d, 1.0)
        lo1 = max(t - d, 0.0)
        hi2 = min(t + d, 1.0)
        ok = lo1 <= t1 <= lo1 + d / 2 and hi2 - d / 2 <= t2 <= hi2
        if self.ordered:
            ok = ok and t1 <= t <= t2
        return ok


@dataclass
class OscillationReport:
    topology: str
    delta: float
    value: float
    witness: tuple
    exact: bool
    error_bound: float = 0.0

    def to_dict(self):
        return {
            "topology": self.topology,
            "delta": self.delta,
            "value": self.value,
            "witness": list(self.witness),
            "exact": self.exact,
            "error_bound": self.error_bound,
        }


# ---------------------------------------------------------------------------
# subpiece tables


def _subpiece_table(f: CadlagFunction, error_target: float, max_subpieces: int):
    lo_all, hi_all, val_all = [], [], []
    widths = np.diff(f.breakpoints)
    slopes = f.piece_slopes()
    counts = np.ones(f.n_pieces, dtype=int)
    for i, kind in enumerate(f.kinds):
        if kind == "linear":
            counts[i] = max(1, int(np.ceil(3.0 * slopes[i] * widths[i] / error_target)))
    total = int(counts.sum())
    if total > max_subpieces:
        scale = max_subpieces / total
        counts = np.maximum(1, (counts * scale).astype(int))
    err = 0.0
    for i in range(f.n_pieces):
        n = counts[i]
        edges = np.linspace(f.breakpoints[i], f.breakpoints[i + 1], n + 1)
        frac = (edges[:-1] - f.breakpoints[i]) / widths[i]
        vals = f.starts[i] + frac[:, None] * (f.ends[i] - f.starts[i])
        lo_all.append(edges[:-1])
        hi_all.append(edges[1:])
        val_all.append(vals)
        if f.kinds[i] == "linear":
            err = max(err, 3.0 * slopes[i] * widths[i] / n)
    return (
        np.concatenate(lo_all),
        np.concatenate(hi_all),
        np.concatenate(val_all),
        float(err),
    )


# ---------------------------------------------------------------------------
# exact supremum over piece-index triples


def _t_window_bounds(lo, hi, delta, family, ordered):
    """Per-index t-interval bounds contributed by the t1 role (A) and the
    t2 role (C).  Returns (A_lo, A_hi, C_lo, C_hi); the t-range of a triple
    (i, j, k) is [max(lo_j, A_lo_i, C_lo_k), min(hi_j, A_hi_i, C_hi_k))."""
    if family == "T1":
        return lo, hi + delta, lo - delta, hi
    half = 0.5 * delta
    a_lo = np.where(lo <= half, 0.0, lo + half)
    if ordered:
        a_lo = np.maximum(a_lo, lo)
    a_hi = hi + delta
    c_lo = lo - delta
    c_hi = np.where(hi > 1.0 - half, np.inf, hi - half)
    if ordered:
        c_hi = np.minimum(c_hi, np.where(hi >= 1.0, np.inf, hi))
    return a_lo, a_hi, c_lo, c_hi


def _sup_reports(f, delta, error_target, max_subpieces, ordered, chunk=64):
    lo, hi, vals, err = _subpiece_table(f, error_target, max_subpieces)
    m, d = vals.shape
    diff = vals[:, None, :] - vals[None, :, :]
    D = np.sqrt(np.sum(diff * diff, axis=2))  # D[p, q] = |v_p - v_q|

    bounds = {}
    bounds["T1"] = _t_window_bounds(lo, hi, delta, "T1", ordered)
    bounds["T2"] = _t_window_bounds(lo, hi, delta, "T2", ordered)
    is_last = hi >= 1.0

    if d > 1:
        w = vals[None, :, :] - vals[:, None, :]  # w[i, k] = v_k - v_i
        ww = np.sum(w * w, axis=2)
        safe_ww = np.where(ww > 0.0, ww, 1.0)

    best = {name: (-1.0, None) for name in TOPOLOGIES}
    for j0 in range(0, m, chunk):
        jj = slice(j0, min(j0 + chunk, m))
        J = np.minimum(D[jj][:, :, None], D[jj][:, None, :])  # (c, i, k)
        if d == 1:
            P = vals[None, :, 0] - vals[jj, 0][:, None]  # v_i - v_j
            on_seg = P[:, :, None] * P[:, None, :] <= 0.0
        else:
            u = vals[jj][:, None, :] - vals[None, :, :]  # u[c, i] = v_j - v_i
            uw = np.einsum("cid,ikd->cik", u, w)
            t_proj = np.clip(uw / safe_ww[None, :, :], 0.0, 1.0)
            # residual form: the expanded quadratic cancels catastrophically
            res = u[:, :, None, :] - t_proj[..., None] * w[None, :, :, :]
            dist2 = np.sum(res * res, axis=3)
            on_seg = dist2 <= _SEGMENT_TOL * _SEGMENT_TOL
        M = np.where(on_seg, 0.0, J)

        for fam, (topo_j, topo_m) in (("T1", ("J1", "M1")), ("T2", ("J2", "M2"))):
            a_lo, a_hi, c_lo, c_hi = bounds[fam]
            L = np.maximum(lo[jj][:, None, None], np.maximum(a_lo[None, :, None], c_lo[None, None, :]))
            U = np.minimum(hi[jj][:, None, None], np.minimum(a_hi[None, :, None], c_hi[None, None, :]))
            feas = L < U
            if fam == "T2":
                closure = (
                    is_last[jj][:, None, None]
                    & (L <= 1.0)
                    & (a_hi[None, :, None] > 1.0)
                    & (c_hi[None, None, :] > 1.0)
                )
                feas = feas | closure
            for topo, G in ((topo_j, J), (topo_m, M)):
                masked = np.where(feas, G, -1.0)
                idx = int(np.argmax(masked))
                val = float(masked.reshape(-1)[idx])
                if val > best[topo][0]:
                    c, i, k = np.unravel_index(idx, masked.shape)
                    best[topo] = (val, (j0 + int(c), int(i), int(k)))

    reports = {}
    exact = err == 0.0
    for topo in TOPOLOGIES:
        val, combo = best[topo]
        val = max(val, 0.0)
        fam = "T1" if topo in ("J1", "M1") else "T2"
        if combo is None:
            witness = (0.0, 0.0, 0.0)
        else:
            witness = _witness(fam, delta, lo, hi, is_last, combo, ordered)
        reports[topo] = OscillationReport(topo, delta, val, witness, exact, err)
    return reports


def _witness(family, delta, lo, hi, is_last, combo, ordered):
    j, i, k = combo
    a_lo, a_hi, c_lo, c_hi = _t_window_bounds(lo, hi, delta, family, ordered)
    L = max(lo[j], a_lo[i], c_lo[k])
    U = min(hi[j], a_hi[i], c_hi[k])
    if L < U:
        t = 0.5 * (L + U)
    else:
        t = 1.0  # T2 closure case: t pinned at the right endpoint
    if family == "T1":
        t1_lo, t1_hi = max(lo[i], t - delta), min(hi[i], t)
        t1 = 0.5 * (t1_lo + t1_hi)
        lo2 = max(lo[k], t)
        hi2 = min(hi[k], t + delta)
        t2 = lo2 if lo2 > t else 0.5 * (t + hi2)
    else:
        lo1 = max(t - delta, 0.0)
        w_lo, w_hi = max(lo[i], lo1), min(hi[i], lo1 + delta / 2)
        if ordered:
            w_hi = min(w_hi, t)
        t1 = w_lo if w_lo == w_hi else 0.5 * (w_lo + w_hi)
        hi2 = min(t + delta, 1.0)
        w2_lo, w2_hi = max(lo[k], hi2 - delta / 2), min(hi[k], hi2)
        if ordered:
            w2_lo = max(w2_lo, t)
        t2 = w2_lo if w2_lo == w2_hi else 0.5 * (w2_lo + w2_hi)
    return (float(t), float(t1), float(t2))


def oscillation(
    topology: str,
    delta: float,
    f: CadlagFunction,
    *,
    ordered: bool = True,
    error_target: float = 0.01,
    max_subpieces: int = 400,
) -> OscillationReport:
    """Windowed supremum of the J or M gauge for one topology.

    Exact for piecewise-constant functions; for functions with linear
    pieces the value carries ``error_bound`` such that the true supremum
    lies within that bound of the reported one.
    """
    topology = topology.upper()
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must be in (0, 1]")
    return _sup_reports(f, delta, error_target, max_subpieces, ordered)[topology]


def oscillation_profile(
    delta: float,
    f: CadlagFunction,
    *,
    ordered: bool = True,
    error_target: float = 0.01,
    max_subpieces: int = 400,
) -> dict:
    """All four oscillation reports at once (shares the feasibility work)."""
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must be in (0, 1]")
    return _sup_reports(f, delta, error_target, max_subpieces, ordered)


def boundary_oscillation(delta: float, f: CadlagFunction) -> float:
    """sup_{0<t<delta} |f(0)-f(t)|  +  sup_{1-delta<t<1} |f(1)-f(t)|.

    Exact for piecewise functions: on every piece the norm gap is convex
    in t, so one-sided limits at the clipped piece ends dominate.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must be in (0, 1/2)")

    def window_sup(ref, w_lo, w_hi):
        best = 0.0
        for i in range(f.n_pieces):
            p_lo, p_hi = f.breakpoints[i], f.breakpoints[i + 1]
            if p_hi <= w_lo or p_lo >= w_hi:
                continue
            a = max(p_lo, w_lo)
            b = min(p_hi, w_hi)
            va = f.evaluate(a)
            vb = f.left_limit(b) if b > 0 else va
            best = max(best, float(np.linalg.norm(ref - va)), float(np.linalg.norm(ref - vb)))
        return best

    left = window_sup(f.evaluate(0.0), 0.0, delta)
    right = window_sup(f.evaluate(1.0), 1.0 - delta, 1.0)
    return left + right


# ---------------------------------------------------------------------------
# brute-force grid oracle (lower bound on the supremum)


def grid_oracle(
    topology: str,
    delta: float,
    f: CadlagFunction,
    resolution: int,
    *,
    ordered: bool = True,
) -> float:
    """Max of the gauge over grid triples inside the triple set.

    Uses the uniform grid linspace(0, 1, resolution + 1); always a lower
    bound on the true supremum, converging as the resolution grows.
    """
    topology = topology.upper()
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    grid = np.linspace(0.0, 1.0, resolution + 1)
    vals = np.atleast_2d(f.evaluate(grid))
    use_m = topology in ("M1", "M2")
    t1_family = "T1" if topology in ("J1", "M1") else "T2"

    best = 0.0
    for it, t in enumerate(grid):
        if t1_family == "T1":
            m1 = (grid >= max(t - delta, 0.0)) & (grid < t)
            m2 = (grid > t) & (grid <= min(t + delta, 1.0))
        else:
            lo1 = max(t - delta, 0.0)
            hi2 = min(t + delta, 1.0)
            m1 = (grid >= lo1) & (grid <= lo1 + delta / 2)
            m2 = (grid >= hi2 - delta / 2) & (grid <= hi2)
            if ordered:
                m1 &= grid <= t
                m2 &= grid >= t
        if not (m1.any() and m2.any()):
            continue
        x = vals[it]
        d1 = np.linalg.norm(vals[m1] - x, axis=1)
        d2 = np.linalg.norm(vals[m2] - x, axis=1)
        if not use_m:
            cand = min(float(d1.max()), float(d2.max()))
        else:
            v1 = vals[m1]
            v2 = vals[m2]
            J = np.minimum(d1[:, None], d2[None, :])
            if vals.shape[1] == 1:
                p1 = v1[:, 0] - x[0]
                p2 = v2[:, 0] - x[0]
                on_seg = p1[:, None] * p2[None, :] <= 0.0
            else:
                w = v2[None, :, :] - v1[:, None, :]
                u = x[None, None, :] - v1[:, None, :]
                ww = np.sum(w * w, axis=2)
                t_proj = np.clip(np.sum(u * w, axis=2) / np.where(ww > 0, ww, 1.0), 0.0, 1.0)
                res = u - t_proj[..., None] * w
                on_seg = np.sum(res * res, axis=2) <= _SEGMENT_TOL * _SEGMENT_TOL
            M = np.where(on_seg, 0.0, J)
            cand = float(M.max())
        best = max(best, cand)
    return best
