"""Internal geometry for box-metric distances between polygonal graphs.

Scalar graphs live in the plane with the max(|value gap|, |time gap|)
metric, which is polyhedral, so the distance from a moving point on a
segment to another segment is convex piecewise linear in the motion
parameter.  That makes the directed Hausdorff supremum on each segment
computable exactly: build the lower envelope of per-segment distance
profiles and take its maximum.  Everything here is closed-form double
arithmetic; no iteration.
"""

from __future__ import annotations

import numpy as np

_TINY = 1e-300


# ---------------------------------------------------------------------------
# vectorised point -> segment distances (any dimension)


def points_to_segments_all(pv, pt, bv0, bt0, bv1, bt1):
    """Box distance from each point to each segment, (N, M) matrix."""
    pv = np.atleast_2d(np.asarray(pv, dtype=float))
    pt = np.asarray(pt, dtype=float).reshape(-1)
    u = pv[:, None, :] - bv0[None, :, :]
    w = (bv1 - bv0)[None, :, :]
    a = pt[:, None] - bt0[None, :]
    b = (bt1 - bt0)[None, :]
    ww = np.sum(w * w, axis=-1)
    uw = np.sum(u * w, axis=-1)
    uu = np.sum(u * u, axis=-1)

    def value_at(phi):
        space = np.sqrt(np.maximum(uu - 2 * phi * uw + phi * phi * ww, 0.0))
        tgap = np.abs(a - phi * b)
        return np.maximum(space, tgap)

    best = np.minimum(value_at(np.zeros_like(uw)), value_at(np.ones_like(uw)))
    with np.errstate(divide="ignore", invalid="ignore"):
        phi_e = np.where(ww > 0.0, uw / np.where(ww > 0.0, ww, 1.0), 0.0)
        best = np.minimum(best, value_at(np.clip(phi_e, 0.0, 1.0)))
        bb = b * np.ones_like(a)
        phi_t = np.where(bb != 0.0, a / np.where(bb != 0.0, bb, 1.0), 0.0)
        best = np.minimum(best, value_at(np.clip(phi_t, 0.0, 1.0)))
        qa = ww - b * b
        qb = -2.0 * (uw - a * b)
        qc = uu - a * a
        disc = qb * qb - 4.0 * qa * qc
        ok = (disc >= 0.0) & (qa != 0.0)
        sq = np.sqrt(np.where(ok, disc, 0.0))
        den = np.where(qa != 0.0, 2.0 * qa, 1.0)
        for sgn in (-1.0, 1.0):
            phi = np.where(ok, (-qb + sgn * sq) / den, 0.0)
            best = np.minimum(best, value_at(np.clip(phi, 0.0, 1.0)))
        lin = (qa == 0.0) & (qb != 0.0)
        phi = np.where(lin, -qc / np.where(qb != 0.0, qb, 1.0), 0.0)
        best = np.minimum(best, value_at(np.clip(phi, 0.0, 1.0)))
    return best


def points_to_segments_min(pv, pt, bv0, bt0, bv1, bt1):
    """Box distance from each point to the union of segments, (N,) vector."""
    return points_to_segments_all(pv, pt, bv0, bt0, bv1, bt1).min(axis=1)


def segment_upper_bounds(av0, at0, av1, at1, bv0, bt0, bv1, bt1):
    """For each A-segment: min over B-segments T of max over the A-segment
    of d(., T).  Convexity puts that max at the A endpoints."""
    d0 = points_to_segments_all(av0, at0, bv0, bt0, bv1, bt1)
    d1 = points_to_segments_all(av1, at1, bv0, bt0, bv1, bt1)
    return np.max(np.stack([d0, d1]), axis=0).min(axis=1)


# ---------------------------------------------------------------------------
# piecewise-linear toolkit (functions of theta on [0,1])


def _upper_envelope_lines(lines, x0, x1):
    """Upper envelope of affine functions on [x0, x1] -> (xs, ys).

    Few lines (at most four here), so pairwise crossing enumeration is
    both simple and exact: between consecutive candidate abscissae a
    single line is maximal.
    """
    ms = np.asarray([l[0] for l in lines])
    cs = np.asarray([l[1] for l in lines])
    xs = [x0, x1]
    k = len(lines)
    for i in range(k):
        for j in range(i + 1, k):
            dm = ms[i] - ms[j]
            if dm != 0.0:
                xc = (cs[j] - cs[i]) / dm
                if x0 < xc < x1:
                    xs.append(xc)
    xs = np.unique(np.asarray(xs))
    ys = (ms[None, :] * xs[:, None] + cs[None, :]).max(axis=1)
    return xs, ys


def _pl_concat(parts):
    xs = [parts[0][0]]
    ys = [parts[0][1]]
    for x, y in parts[1:]:
        xs.append(x[1:])
        ys.append(y[1:])
    return np.concatenate(xs), np.concatenate(ys)


def _pl_eval(xs, ys, x):
    return np.interp(x, xs, ys)


def _pl_min(f, g):
    """Pointwise minimum of two piecewise-linear functions on one domain."""
    fx, fy = f
    gx, gy = g
    xs = np.union1d(fx, gx)
    fv = _pl_eval(fx, fy, xs)
    gv = _pl_eval(gx, gy, xs)
    out_x = [xs[0]]
    out_y = [min(fv[0], gv[0])]
    for i in range(len(xs) - 1):
        d0 = fv[i] - gv[i]
        d1 = fv[i + 1] - gv[i + 1]
        if (d0 > 0.0 > d1) or (d0 < 0.0 < d1):
            t = d0 / (d0 - d1)
            xc = xs[i] + t * (xs[i + 1] - xs[i])
            if xs[i] < xc < xs[i + 1]:
                yc = fv[i] + t * (fv[i + 1] - fv[i])
                out_x.append(xc)
                out_y.append(yc)
        out_x.append(xs[i + 1])
        out_y.append(min(fv[i + 1], gv[i + 1]))
    return np.asarray(out_x), np.asarray(out_y)


# ---------------------------------------------------------------------------
# exact scalar segment -> graph distance profile


def _segment_distance_profile(a0, ta0, a1, ta1, b0, tb0, b1, tb1):
    """Piecewise-linear profile theta -> box distance from the point
    (1-theta)*(a0,ta0) + theta*(a1,ta1) to the segment (b0,tb0)-(b1,tb1)."""
    Ax, Bx, Cx = a0 - b0, a1 - a0, b1 - b0
    At, Bt, Ct = ta0 - tb0, ta1 - ta0, tb1 - tb0

    candidates = [(0.0, 0.0), (1.0, 0.0)]
    for num0, num1, den in (
        (Ax, Bx, Cx),          # space gap zero
        (At, Bt, Ct),          # time gap zero
        (Ax - At, Bx - Bt, Cx - Ct),   # space == time
        (Ax + At, Bx + Bt, Cx + Ct),   # space == -time
    ):
        if den != 0.0:
            candidates.append((num0 / den, num1 / den))

    profile = None
    for p, q in candidates:
        part = _candidate_profile(p, q, Ax, Bx, Cx, At, Bt, Ct)
        profile = part if profile is None else _pl_min(profile, part)
    return profile


def _candidate_profile(p, q, Ax, Bx, Cx, At, Bt, Ct):
    """max(|space|, |time|) along phi(theta) = clip(p + q*theta, 0, 1)."""
    cuts = [0.0, 1.0]
    if q != 0.0:
        for target in (0.0, 1.0):
            x = (target - p) / q
            if 0.0 < x < 1.0 and np.isfinite(x):
                cuts.append(x)
    cuts = sorted(set(cuts))
    parts = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        phi_mid = p + q * 0.5 * (lo + hi)
        if phi_mid < 0.0:
            pp, qq = 0.0, 0.0
        elif phi_mid > 1.0:
            pp, qq = 1.0, 0.0
        else:
            pp, qq = p, q
        lines = []
        for sgn in (1.0, -1.0):
            lines.append((sgn * (Bx - Cx * qq), sgn * (Ax - Cx * pp)))
            lines.append((sgn * (Bt - Ct * qq), sgn * (At - Ct * pp)))
        parts.append(_upper_envelope_lines(lines, lo, hi))
    return _pl_concat(parts)


def exact_segment_sup(a0, ta0, a1, ta1, bv0, bt0, bv1, bt1, ub):
    """Exact sup over theta of min over B-segments of the box distance.

    Scalar values only.  ``ub`` is a known upper bound used to prune
    segments that can never be the nearest one.
    """
    s_tlo, s_thi = min(ta0, ta1), max(ta0, ta1)
    s_vlo, s_vhi = min(a0, a1), max(a0, a1)
    envelope = None
    order = []
    for j in range(len(bt0)):
        t_tlo, t_thi = min(bt0[j], bt1[j]), max(bt0[j], bt1[j])
        t_vlo, t_vhi = min(bv0[j], bv1[j]), max(bv0[j], bv1[j])
        tgap = max(0.0, max(s_tlo, t_tlo) - min(s_thi, t_thi))
        vgap = max(0.0, max(s_vlo, t_vlo) - min(s_vhi, t_vhi))
        lb = max(tgap, vgap)
        if lb <= ub:
            order.append((lb, j))
    order.sort()
    for _, j in order:
        part = _segment_distance_profile(a0, ta0, a1, ta1, bv0[j], bt0[j], bv1[j], bt1[j])
        envelope = part if envelope is None else _pl_min(envelope, part)
    xs, ys = envelope
    i = int(np.argmax(ys))
    return float(ys[i]), float(xs[i])


# ---------------------------------------------------------------------------
# certified branch-and-bound for d > 1


def subdivide_segment_sup(av0, at0, av1, at1, bv0, bt0, bv1, bt1, gap, lower):
    """Upper bound within ``gap`` on sup over the A-segment of the distance
    to the B-graph, by bisection on the segment parameter."""
    best = lower
    best_pt = (av0.copy(), float(at0))

    def endpoint_dist(theta):
        v = (1 - theta) * av0 + theta * av1
        t = (1 - theta) * at0 + theta * at1
        d = points_to_segments_min(v[None, :], np.array([t]), bv0, bt0, bv1, bt1)[0]
        return float(d), v, t

    seg_speed = max(float(np.linalg.norm(av1 - av0)), abs(at1 - at0))

    def cell_ub(d_lo, d_hi, width):
        # d(., B) is 1-Lipschitz in the box metric along the segment
        return max(d_lo, d_hi) + 0.5 * width * seg_speed

    d0, v0, t0 = endpoint_dist(0.0)
    d1, v1, t1 = endpoint_dist(1.0)
    for d, v, t in ((d0, v0, t0), (d1, v1, t1)):
        if d > best:
            best, best_pt = d, (v, t)
    stack = [(0.0, 1.0, d0, d1)]
    while stack:
        lo, hi, dlo, dhi = stack.pop()
        ub = cell_ub(dlo, dhi, hi - lo)
        if ub <= best + gap:
            continue
        mid = 0.5 * (lo + hi)
        dm, vm, tm = endpoint_dist(mid)
        if dm > best:
            best, best_pt = dm, (vm, tm)
        stack.append((lo, mid, dlo, dm))
        stack.append((mid, hi, dm, dhi))
    return best + gap, best_pt[0], best_pt[1]
