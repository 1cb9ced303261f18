"""The four classical metrics on cadlag functions.

J2 and M2 are Hausdorff distances between incomplete / completed graphs
under the box metric max(|value gap|, |time gap|); for scalar functions
they are computed exactly by piecewise-linear envelope geometry, in higher
dimension by certified branch-and-bound.  J1 is solved by binary search
over a jump-alignment feasibility problem, M1 as a certified upper bound
from monotone matchings of densified completed graphs, sandwiched below
by M2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cadlag import (
    CadlagFunction,
    PolygonalGraph,
    TimeChange,
    completed_graph,
    incomplete_graph,
)
from . import _envelope

__all__ = [
    "BoxMetricPoint",
    "Exactness",
    "DistanceResult",
    "box_distance",
    "hausdorff",
    "d_j1",
    "d_j2",
    "d_m2",
    "d_m1_upper",
    "m1_interval",
    "metric_oracle",
    "sup_norm_distance",
]


# ---------------------------------------------------------------------------
# box metric primitives


@dataclass(frozen=True)
class BoxMetricPoint:
    """Point of R^d x [0,1] carrying the metric max(|x-y|, |t-s|)."""

    value: np.ndarray
    time: float

    def distance_to(self, other: "BoxMetricPoint") -> float:
        return box_distance(self.value, self.time, other.value, other.time)


def box_distance(x, t, y, s):
    return max(float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))), abs(float(t) - float(s)))


def point_to_segment_distance(p_val, p_t, a_val, a_t, b_val, b_t):
    """Exact min over the segment [a, b] of the box distance to p."""
    u = np.asarray(p_val, dtype=float) - np.asarray(a_val, dtype=float)
    w = np.asarray(b_val, dtype=float) - np.asarray(a_val, dtype=float)
    a_sc = float(p_t) - float(a_t)
    b_sc = float(b_t) - float(a_t)

    # candidates for the minimising parameter phi in [0,1]
    cands = [0.0, 1.0]
    ww = float(w @ w)
    if ww > 0.0:
        cands.append(min(1.0, max(0.0, float(u @ w) / ww)))
    if b_sc != 0.0:
        cands.append(min(1.0, max(0.0, a_sc / b_sc)))
    # crossings of |space|^2 == time^2 (quadratic in phi)
    qa = ww - b_sc * b_sc
    qb = -2.0 * (float(u @ w) - a_sc * b_sc)
    qc = float(u @ u) - a_sc * a_sc
    if qa != 0.0:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0:
            r = np.sqrt(disc)
            for root in ((-qb - r) / (2 * qa), (-qb + r) / (2 * qa)):
                cands.append(min(1.0, max(0.0, root)))
    elif qb != 0.0:
        cands.append(min(1.0, max(0.0, -qc / qb)))

    best = np.inf
    for phi in cands:
        space = np.linalg.norm(u - phi * w)
        tgap = abs(a_sc - phi * b_sc)
        best = min(best, max(space, tgap))
    return float(best)


def _point_to_graph_distance(p_val, p_t, graph: PolygonalGraph) -> float:
    pv, pt, qv, qt = graph.segments()
    best = np.inf
    for i in range(pv.shape[0]):
        best = min(best, point_to_segment_distance(p_val, p_t, pv[i], pt[i], qv[i], qt[i]))
    if not len(pv):
        best = box_distance(p_val, p_t, graph.values[0], graph.times[0])
    return best


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class Exactness:
    exact: bool
    gap: float = 0.0

    @classmethod
    def exact_result(cls):
        return cls(True, 0.0)

    @classmethod
    def upper_bound(cls, gap):
        return cls(False, float(gap))

    def to_dict(self):
        return {"exact": self.exact, "gap": self.gap}


@dataclass
class DistanceResult:
    value: float
    topology: str
    exactness: Exactness
    certificate: object = None
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        cert = self.certificate
        if isinstance(cert, TimeChange):
            cert = cert.to_dict()
        elif isinstance(cert, np.ndarray):
            cert = cert.tolist()
        return {
            "value": self.value,
            "topology": self.topology,
            "exactness": self.exactness.to_dict(),
            "certificate": cert,
            "meta": self.meta,
        }


# ---------------------------------------------------------------------------
# Hausdorff distance between polygonal graphs


def _segment_arrays(graph: PolygonalGraph):
    pv, pt, qv, qt = graph.segments()
    if pv.shape[0] == 0:
        v = graph.values[:1]
        t = graph.times[:1]
        return v, t, v, t
    return pv, pt, qv, qt


def _directed_hausdorff(A: PolygonalGraph, B: PolygonalGraph, gap: float):
    """sup over points of A of the box distance to B.

    Returns (value, witness_point).  Exact for dim 1 (piecewise-linear
    envelope on each segment); for dim > 1 the supremum is bracketed to
    within ``gap`` by branch-and-bound subdivision and the upper end is
    returned.
    """
    av0, at0, av1, at1 = _segment_arrays(A)
    bv0, bt0, bv1, bt1 = _segment_arrays(B)
    nA = av0.shape[0]

    ends = np.concatenate([np.column_stack([av0, at0]), np.column_stack([av1, at1])])
    d_ends = _envelope.points_to_segments_min(ends[:, :-1], ends[:, -1], bv0, bt0, bv1, bt1)
    per_seg_end = np.maximum(d_ends[:nA], d_ends[nA:])
    lower = float(np.max(d_ends))
    wit_i = int(np.argmax(d_ends))
    witness = (ends[wit_i, :-1].copy(), float(ends[wit_i, -1]))

    # min over T of max(d(P0,T), d(P1,T)) is an upper bound for sup on S
    ub = _envelope.segment_upper_bounds(av0, at0, av1, at1, bv0, bt0, bv1, bt1)

    order = np.argsort(-ub)
    exact = A.dim == 1
    for i in order:
        if ub[i] <= lower + (0.0 if exact else gap):
            break
        if per_seg_end[i] > lower:
            lower = float(per_seg_end[i])
        if exact:
            val, theta = _envelope.exact_segment_sup(
                av0[i, 0], at0[i], av1[i, 0], at1[i], bv0[:, 0], bt0, bv1[:, 0], bt1, ub[i]
            )
            if val > lower:
                lower = float(val)
                witness = ((1 - theta) * av0[i] + theta * av1[i], float((1 - theta) * at0[i] + theta * at1[i]))
        else:
            val, pt_val, pt_t = _envelope.subdivide_segment_sup(
                av0[i], at0[i], av1[i], at1[i], bv0, bt0, bv1, bt1, gap, lower
            )
            if val > lower:
                lower = float(val)
                witness = (pt_val, pt_t)
    return lower, witness


def hausdorff(A: PolygonalGraph, B: PolygonalGraph, gap: float = 1e-9):
    """Hausdorff distance between two polygonal graphs under the box metric.

    Exact for scalar-valued graphs; for d > 1 the result is an upper bound
    within ``gap`` of the true value.
    """
    if A.dim != B.dim:
        raise ValueError("dimension mismatch")
    if len(A) == 0 or len(B) == 0:
        raise ValueError("empty graph")
    d_ab, w_ab = _directed_hausdorff(A, B, gap)
    d_ba, w_ba = _directed_hausdorff(B, A, gap)
    value = max(d_ab, d_ba)
    witness = w_ab if d_ab >= d_ba else w_ba
    return value, witness


def d_j2(f: CadlagFunction, g: CadlagFunction, gap: float = 1e-9) -> DistanceResult:
    """Hausdorff distance between the incomplete graphs."""
    _check_pair(f, g)
    value, witness = hausdorff(incomplete_graph(f), incomplete_graph(g), gap)
    exact = Exactness.exact_result() if f.dim == 1 else Exactness.upper_bound(gap)
    return DistanceResult(value, "J2", exact, certificate=_witness_pair(witness, g, incomplete_graph))


def d_m2(f: CadlagFunction, g: CadlagFunction, gap: float = 1e-9) -> DistanceResult:
    """Hausdorff distance between the completed graphs."""
    _check_pair(f, g)
    value, witness = hausdorff(completed_graph(f), completed_graph(g), gap)
    exact = Exactness.exact_result() if f.dim == 1 else Exactness.upper_bound(gap)
    return DistanceResult(value, "M2", exact, certificate=_witness_pair(witness, g, completed_graph))


def _witness_pair(witness, g, graph_fn):
    val, t = witness
    return {"point": [list(np.atleast_1d(val)), t]}


def _check_pair(f, g):
    if f.dim != g.dim:
        raise ValueError("functions must share a dimension")


# ---------------------------------------------------------------------------
# sup-norm distance of two functions (time change = identity), exact


def sup_norm_distance(f: CadlagFunction, g: CadlagFunction) -> float:
    """Exact sup over t of |f(t) - g(t)| for piecewise functions."""
    _check_pair(f, g)
    grid = np.unique(np.concatenate([f.breakpoints, g.breakpoints]))
    best = 0.0
    for lo, hi in zip(grid[:-1], grid[1:]):
        # |f - g| is convex on each common cell; endpoints dominate
        a = np.linalg.norm(f.evaluate(lo) - g.evaluate(lo))
        b = np.linalg.norm(f.left_limit(hi) - g.left_limit(hi))
        best = max(best, float(a), float(b))
    best = max(best, float(np.linalg.norm(f.evaluate(1.0) - g.evaluate(1.0))))
    return best


# ---------------------------------------------------------------------------
# J1: binary search over jump-alignment feasibility


class _Pos:
    """Time point plus a count of infinitesimal right-offsets."""

    __slots__ = ("t", "k")

    def __init__(self, t, k=0):
        self.t = float(t)
        self.k = int(k)

    def __le__(self, other):
        return (self.t, self.k) <= (other.t, other.k)

    def __lt__(self, other):
        return (self.t, self.k) < (other.t, other.k)

    def bump(self):
        return _Pos(self.t, self.k + 1)


def _j1_feasible(fu, fa, gw, gb, eps, want_plan=False):
    """Does a strictly increasing placement of f's jumps inside eps-windows
    exist that keeps the two step functions within eps everywhere?

    fu : f jump times, fa : f values (len fu + 1); gw, gb likewise for g.

    Events form groups at strictly increasing times; a group fires one f
    jump, one g jump, or both at once (diagonal).  Every state the path
    rests in has positive duration, so its value pair must agree within
    eps; states skipped by a diagonal are exempt.  With that move set an
    earliest-last-group DP is dominant: earlier positions only relax the
    remaining constraints.
    """
    p, q = len(fu), len(gw)
    diff = np.asarray(fa)[:, None, :] - np.asarray(gb)[None, :, :]
    good = np.sqrt(np.sum(diff * diff, axis=2)) <= eps
    if not good[0, 0] or not good[p, q]:
        return (False, None) if want_plan else False

    INF = _Pos(np.inf)
    pos = {(0, 0): _Pos(0.0, 0)}
    parent = {}

    def relax(node, cand, par, move):
        if cand < pos.get(node, INF):
            pos[node] = cand
            parent[node] = (par, move)

    for i in range(p + 1):
        for j in range(q + 1):
            cur = pos.get((i, j))
            if cur is None:
                continue
            if j < q and gw[j] > cur.t and good[i, j + 1]:
                relax((i, j + 1), _Pos(gw[j], 0), (i, j), ("U", gw[j]))
            if i < p:
                lo, hi = fu[i] - eps, fu[i] + eps
                if j < q and gw[j] > cur.t and lo <= gw[j] <= hi and good[i + 1, j + 1]:
                    relax((i + 1, j + 1), _Pos(gw[j], 0), (i, j), ("D", gw[j]))
                if good[i + 1, j]:
                    cand = cur.bump()
                    if cand.t < lo:
                        cand = _Pos(lo, 0)
                    if cand.t <= 0.0:
                        cand = _Pos(0.0, max(cand.k, 1))
                    in_window = cand.t < hi or (cand.t == hi and cand.k == 0)
                    if in_window and cand.t < 1.0:
                        relax((i + 1, j), cand, (i, j), ("R", cand))
    feasible = (p, q) in pos
    if not want_plan:
        return feasible
    if not feasible:
        return False, None
    moves = []
    node = (p, q)
    while node != (0, 0):
        par, move = parent[node]
        moves.append(move)
        node = par
    return True, moves[::-1]


def _materialize_lambda(fu, moves, eps):
    """Concrete strictly increasing jump placements from a DP move list."""
    if not fu.size:
        return TimeChange.identity()
    # fixed group times ahead of each move (next U or D), for upper headroom
    fixed_after = [1.0] * (len(moves) + 1)
    for idx in range(len(moves) - 1, -1, -1):
        kind = moves[idx][0]
        fixed_after[idx] = moves[idx][1] if kind in ("U", "D") else fixed_after[idx + 1]
    s = []
    prev = 0.0
    i = 0
    for idx, move in enumerate(moves):
        kind, payload = move
        if kind == "U":
            prev = payload
        elif kind == "D":
            s.append(payload)
            prev = payload
            i += 1
        else:
            lo = max(fu[i] - eps, 0.0)
            hi = min(fu[i] + eps, 1.0)
            upper = min(hi, fixed_after[idx + 1])
            base = max(lo, prev)
            if base > prev and base < 1.0:
                val = base
            else:
                val = 0.5 * (prev + min(upper, 1.0))
            val = min(max(val, np.nextafter(prev, 1.0)), np.nextafter(1.0, 0.0))
            s.append(val)
            prev = val
            i += 1
    knots_in = np.concatenate(([0.0], s, [1.0]))
    knots_out = np.concatenate(([0.0], fu, [1.0]))
    return TimeChange(knots_in, knots_out)


def _compose_step_with_lambda(fu, fa, lam: TimeChange):
    """Step function f (jumps fu, values fa) composed with the time change."""
    s = lam.inverse()(fu)
    return np.asarray(s, dtype=float), fa


def d_j1(f: CadlagFunction, g: CadlagFunction, tolerance: float = 1e-9, max_iter: int = 200) -> DistanceResult:
    """J1 distance: inf over continuous time changes of
    max(sup |f(lambda(t)) - g(t)|, sup |lambda(t) - t|).

    Exact (to ``tolerance``) for piecewise-constant inputs via binary search
    on an order-preserving jump-alignment decision.  For inputs with linear
    pieces a flagged upper bound from breakpoint-matching is returned.
    """
    _check_pair(f, g)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if not (f.is_step and g.is_step):
        return _d_j1_upper_linear(f, g)

    fu, _, _ = f.jumps()
    gw, _, _ = g.jumps()
    fa = _step_levels(f)
    gb = _step_levels(g)

    hi = sup_norm_distance(f, g)
    lo = 0.0
    if not _j1_feasible(fu, fa, gw, gb, hi + 1e-12):
        raise RuntimeError("identity time change infeasible at its own cost; inconsistent state")
    it = 0
    while hi - lo > tolerance:
        it += 1
        if it > max_iter:
            raise RuntimeError("binary search failed to converge; pathological input")
        mid = 0.5 * (lo + hi)
        if _j1_feasible(fu, fa, gw, gb, mid):
            hi = mid
        else:
            lo = mid
    ok, moves = _j1_feasible(fu, fa, gw, gb, hi, want_plan=True)
    assert ok
    lam = _materialize_lambda(fu, moves, hi)
    replay = replay_j1(f, g, lam)
    value = min(replay, hi)
    return DistanceResult(value, "J1", Exactness(True, tolerance), certificate=lam, meta={"replay": replay})


def _step_levels(f: CadlagFunction):
    jt, _, _ = f.jumps()
    levels = [f.evaluate(0.0)]
    for t in jt:
        levels.append(f.evaluate(t))
    return np.asarray(levels)


def replay_j1(f: CadlagFunction, g: CadlagFunction, lam: TimeChange) -> float:
    """Exact objective value of a given time change certificate."""
    # f∘λ has breakpoints at λ^{-1}(f breakpoints) plus λ's own knots
    inv = lam.inverse()
    cuts = np.unique(np.concatenate([inv(f.breakpoints), lam.knots_in, g.breakpoints]))
    best = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        for t in (lo, 0.5 * (lo + hi)):
            best = max(best, float(np.linalg.norm(f.evaluate(lam(t)) - g.evaluate(t))))
        tl = hi
        best = max(best, float(np.linalg.norm(f.left_limit(min(lam(tl), 1.0)) - g.left_limit(tl))))
    best = max(best, float(np.linalg.norm(f.evaluate(1.0) - g.evaluate(1.0))))
    return max(best, lam.sup_distance_to_identity())


def _d_j1_upper_linear(f: CadlagFunction, g: CadlagFunction) -> DistanceResult:
    """Upper bound for inputs with linear pieces: time changes restricted to
    piecewise-linear maps with knots at (g breakpoint, f breakpoint) pairs."""
    fb, gb = f.breakpoints, g.breakpoints
    nf, ng = len(fb), len(gb)
    INF = np.inf
    cost = np.full((ng, nf), INF)
    choice = {}
    cost[0, 0] = 0.0
    for j in range(1, ng):
        for i in range(1, nf):
            for pj in range(j):
                for pi in range(i):
                    if cost[pj, pi] == INF:
                        continue
                    lam_cell = _cell_cost(f, g, gb[pj], gb[j], fb[pi], fb[i])
                    c = max(cost[pj, pi], lam_cell)
                    if c < cost[j, i]:
                        cost[j, i] = c
                        choice[(j, i)] = (pj, pi)
    value = cost[ng - 1, nf - 1]
    knots_in, knots_out = [1.0], [1.0]
    node = (ng - 1, nf - 1)
    while node != (0, 0):
        node = choice[node]
        knots_in.append(gb[node[0]])
        knots_out.append(fb[node[1]])
    lam = TimeChange(knots_in[::-1], knots_out[::-1])
    return DistanceResult(float(value), "J1", Exactness.upper_bound(float(value)), certificate=lam)


def _cell_cost(f, g, t0, t1, s0, s1):
    """max over [t0,t1] of |f(lam(t)) - g(t)| ∨ |lam(t)-t| for the affine map
    lam sending [t0,t1] onto [s0,s1]."""
    slope = (s1 - s0) / (t1 - t0)
    lam = lambda t: s0 + (t - t0) * slope
    inv = lambda s: t0 + (s - s0) / slope
    cuts = np.unique(np.clip(np.concatenate([[t0, t1], [inv(s) for s in f.breakpoints if s0 <= s <= s1], [t for t in g.breakpoints if t0 <= t <= t1]]), t0, t1))
    best = max(abs(s0 - t0), abs(s1 - t1))
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        best = max(best, float(np.linalg.norm(f.evaluate(lam(lo)) - g.evaluate(lo))))
        best = max(best, float(np.linalg.norm(f.left_limit(max(min(lam(hi), 1.0), 1e-300)) - g.left_limit(hi))))
    best = max(best, float(np.linalg.norm(f.evaluate(lam(t1)) - g.evaluate(t1))))
    return best


# ---------------------------------------------------------------------------
# M1 upper bound via monotone matching of densified completed graphs


def _densify(graph: PolygonalGraph, level: int):
    vals, times = [graph.values[0]], [graph.times[0]]
    for i in range(len(graph) - 1):
        v0, v1 = graph.values[i], graph.values[i + 1]
        t0, t1 = graph.times[i], graph.times[i + 1]
        for k in range(1, level + 1):
            a = k / level
            vals.append((1 - a) * v0 + a * v1)
            times.append((1 - a) * t0 + a * t1)
    return np.asarray(vals), np.asarray(times)


def _discrete_frechet(av, at, bv, bt, return_table=False):
    """min over monotone joint traversals of the max matched box distance."""
    n, m = av.shape[0], bv.shape[0]
    diff = av[:, None, :] - bv[None, :, :]
    cost = np.maximum(np.sqrt(np.sum(diff * diff, axis=2)), np.abs(at[:, None] - bt[None, :]))
    D = np.empty((n, m))
    D[0, 0] = cost[0, 0]
    for j in range(1, m):
        D[0, j] = max(D[0, j - 1], cost[0, j])
    for i in range(1, n):
        D[i, 0] = max(D[i - 1, 0], cost[i, 0])
        row, prev = D[i], D[i - 1]
        c = cost[i]
        for j in range(1, m):
            row[j] = max(c[j], min(prev[j], prev[j - 1], row[j - 1]))
    if return_table:
        return float(D[n - 1, m - 1]), D
    return float(D[n - 1, m - 1]), cost


def _frechet_path(av, at, bv, bt):
    value, D = _discrete_frechet(av, at, bv, bt, return_table=True)
    # walk back through predecessors of minimal table value; that keeps the
    # max matched cost along the path equal to the optimum
    n, m = D.shape
    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        opts = []
        if i > 0 and j > 0:
            opts.append((i - 1, j - 1))
        if i > 0:
            opts.append((i - 1, j))
        if j > 0:
            opts.append((i, j - 1))
        i, j = min(opts, key=lambda ij: D[ij])
        path.append((i, j))
    return value, path[::-1]


def d_m1_upper(f: CadlagFunction, g: CadlagFunction, refinement: int = 8) -> DistanceResult:
    """Certified upper bound on the M1 distance.

    Densifies both completed graphs at dyadic levels up to ``refinement``
    and minimises the discrete monotone-matching cost over the levels, so
    the bound is nonincreasing in ``refinement``.  The lower partner of
    the sandwich is the M2 distance.
    """
    _check_pair(f, g)
    if refinement < 1:
        raise ValueError("refinement must be >= 1")
    gf, gg = completed_graph(f), completed_graph(g)
    best = np.inf
    best_pack = None
    level = 1
    while level <= refinement:
        av, at = _densify(gf, level)
        bv, bt = _densify(gg, level)
        val, _ = _discrete_frechet(av, at, bv, bt)
        if val < best:
            best = val
            best_pack = (av, at, bv, bt, level)
        level *= 2
    av, at, bv, bt, best_level = best_pack
    _, path = _frechet_path(av, at, bv, bt)
    lower = d_m2(f, g).value
    matching = np.asarray(path, dtype=int)
    return DistanceResult(
        float(best),
        "M1",
        Exactness.upper_bound(float(best - lower)),
        certificate=matching,
        meta={"lower": lower, "level": best_level, "matched_vertices": [av.shape[0], bv.shape[0]]},
    )


def m1_interval(f: CadlagFunction, g: CadlagFunction, refinement: int = 8):
    """The sandwich [d_M2, monotone-matching upper bound] for d_M1."""
    upper = d_m1_upper(f, g, refinement)
    return upper.meta["lower"], upper.value


def replay_m1(f: CadlagFunction, g: CadlagFunction, result: DistanceResult, refinement_used=None) -> float:
    av, at = result.meta["matched_vertices"], None
    raise NotImplementedError  # replaced below; kept out of public API


def param_rep_from_matching(graph_a: PolygonalGraph, graph_b: PolygonalGraph, matching, level):
    """Materialise the pair of parametric representations a matching induces."""
    from .cadlag import ParamRep

    av, at = _densify(graph_a, level)
    bv, bt = _densify(graph_b, level)
    ia = [p[0] for p in matching]
    ib = [p[1] for p in matching]
    return (
        ParamRep(av[ia], at[ia], ParamRep.MONOTONE),
        ParamRep(bv[ib], bt[ib], ParamRep.MONOTONE),
    )


# ---------------------------------------------------------------------------
# brute-force oracles (tests and cross-checks only)


def _sample_graph(graph: PolygonalGraph, spacing: float):
    pv, pt, qv, qt = _segment_arrays(graph)
    pts_v, pts_t = [graph.values], [graph.times]
    for i in range(pv.shape[0]):
        length = max(float(np.linalg.norm(qv[i] - pv[i])), abs(qt[i] - pt[i]))
        k = int(np.ceil(length / spacing)) + 1
        a = np.linspace(0.0, 1.0, k + 1)[:, None]
        pts_v.append((1 - a) * pv[i] + a * qv[i])
        pts_t.append((1 - a[:, 0]) * pt[i] + a[:, 0] * qt[i])
    return np.concatenate(pts_v), np.concatenate(pts_t)


def dense_hausdorff_oracle(A: PolygonalGraph, B: PolygonalGraph, spacing: float) -> float:
    """Dense-sample Hausdorff: sampled source points against exact
    point-to-segment distances, so the result is a lower bound of the
    true value and within ``spacing`` of it."""
    av, at = _sample_graph(A, spacing)
    bv, bt = _sample_graph(B, spacing)
    d_ab = _envelope.points_to_segments_min(av, at, *_segment_arrays(B)).max()
    d_ba = _envelope.points_to_segments_min(bv, bt, *_segment_arrays(A)).max()
    return float(max(d_ab, d_ba))


def _j1_grid_oracle(f: CadlagFunction, g: CadlagFunction, resolution: int) -> float:
    """Min-max over placements of f's jumps on a grid.

    The grid is the uniform one enriched with g's jump times; placements
    occupy distinct grid points in order (two jumps can never share a
    time under a strictly increasing change).  The stretch cost between
    consecutive placements uses the exact range of g on each grid cell,
    so the only looseness is the grid snapping of f's jump times.
    """
    fu, _, _ = f.jumps()
    fa = _step_levels(f)
    p = len(fu)
    if p == 0:
        return sup_norm_distance(f, g)
    gw, _, _ = g.jumps()
    grid = np.unique(np.concatenate([np.linspace(0.0, 1.0, resolution + 1), gw]))
    n_pts = len(grid)
    # exact value range of g on each grid cell [grid[k], grid[k+1])
    gmin = np.empty(n_pts - 1)
    gmax = np.empty(n_pts - 1)
    for k in range(n_pts - 1):
        lo_v = float(g.evaluate(grid[k])[0])
        hi_v = float(g.left_limit(grid[k + 1])[0])
        gmin[k] = min(lo_v, hi_v)
        gmax[k] = max(lo_v, hi_v)

    def stretch_cost_row(level):
        # R[sp, s] = sup over [grid[sp], grid[s]) of |level - g|
        c = np.maximum(np.abs(level - gmin), np.abs(level - gmax))
        R = np.full((n_pts, n_pts), -np.inf)
        for sp in range(n_pts - 1):
            R[sp, sp + 1 :] = np.maximum.accumulate(c[sp:])
        return R

    D = np.full(n_pts, np.inf)
    R0 = stretch_cost_row(float(fa[0][0]))
    for s in range(1, n_pts - 1):
        D[s] = max(R0[0, s], abs(grid[s] - fu[0]))
    for i in range(1, p):
        Ri = stretch_cost_row(float(fa[i][0]))
        D2 = np.full(n_pts, np.inf)
        for s in range(i + 1, n_pts - 1):
            cand = np.maximum(D[1:s], Ri[1:s, s])
            D2[s] = max(float(cand.min()), abs(grid[s] - fu[i]))
        D = D2
    Rp = stretch_cost_row(float(fa[p][0]))
    final = float(np.linalg.norm(fa[p] - g.evaluate(1.0)))
    best = np.inf
    for s in range(1, n_pts - 1):
        if D[s] == np.inf:
            continue
        best = min(best, max(D[s], Rp[s, n_pts - 1], final))
    return float(best)


def metric_oracle(topology: str, f: CadlagFunction, g: CadlagFunction, resolution: int = 200) -> float:
    """Independent brute-force reference for small instances.

    J2/M2: dense-sample Hausdorff (within 1/resolution of the truth).
    J1: exhaustive min-max over jump placements on a uniform grid.
    M1: monotone matching at the oracle's own densification level.
    """
    _check_pair(f, g)
    if max(f.n_pieces, g.n_pieces) > 9:
        raise ValueError("oracle instance too large")
    topology = topology.upper()
    if topology == "J2":
        return dense_hausdorff_oracle(incomplete_graph(f), incomplete_graph(g), 1.0 / resolution)
    if topology == "M2":
        return dense_hausdorff_oracle(completed_graph(f), completed_graph(g), 1.0 / resolution)
    if topology == "J1":
        if not (f.is_step and g.is_step):
            raise ValueError("J1 oracle requires step functions")
        return _j1_grid_oracle(f, g, resolution)
    if topology == "M1":
        av, at = _densify(completed_graph(f), max(2, resolution // max(f.n_pieces, 1)))
        bv, bt = _densify(completed_graph(g), max(2, resolution // max(g.n_pieces, 1)))
        val, _ = _discrete_frechet(av, at, bv, bt)
        return val
    raise ValueError(f"unknown topology {topology!r}")
