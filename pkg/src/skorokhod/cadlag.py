"""Piecewise cadlag functions on [0,1] and their polygonal graphs.

A function is stored as a partition 0 = t_0 < t_1 < ... < t_m = 1 with one
piece per cell.  Every piece is either constant or linear and carries the
value at its left endpoint (attained, right-continuous) and the left limit
at its right endpoint.  The value at time 1 always equals the left limit
there, so the function is left continuous at 1 by construction.
"""

from __future__ import annotations

import json
import warnings

import numpy as np

__all__ = [
    "CadlagFunction",
    "GraphPoint",
    "PolygonalGraph",
    "TimeChange",
    "ParamRep",
    "LeftLimitAtZeroWarning",
    "evaluate",
    "left_limit",
    "incomplete_graph",
    "completed_graph",
    "project",
    "restrict",
]

CONST = "const"
LINEAR = "linear"


class LeftLimitAtZeroWarning(UserWarning):
    """Raised when a left limit is requested at t=0, where none exists."""


def _as_value(x, dim):
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.size == 1 and dim > 1:
        raise ValueError(f"scalar value given for dimension {dim}")
    if v.size != dim:
        raise ValueError(f"value has dimension {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    return v


class CadlagFunction:
    """Right continuous function with left limits, finitely many pieces.

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing, starting at 0.0 and ending at 1.0.
    kinds : sequence of str
        One of ``"const"`` / ``"linear"`` per cell.
    starts, ends : array_like, shape (m, d)
        Value at the left end of each cell and left limit at its right end.
        Constant cells must have identical start and end.

    The constructor canonicalises: linear cells with equal endpoints become
    constant, and adjacent cells that continue each other (no jump, same
    kind, same slope) are merged.  Equality of two functions can therefore
    be decided by comparing the stored arrays.
    """

    __slots__ = ("dim", "breakpoints", "kinds", "starts", "ends")

    def __init__(self, breakpoints, kinds, starts, ends):
        bp = np.asarray(breakpoints, dtype=float).reshape(-1)
        starts = np.atleast_2d(np.asarray(starts, dtype=float))
        ends = np.atleast_2d(np.asarray(ends, dtype=float))
        kinds = list(kinds)
        m = len(kinds)
        if bp.size != m + 1:
            raise ValueError("need len(breakpoints) == len(kinds) + 1")
        if starts.shape[0] != m or ends.shape != starts.shape:
            raise ValueError("starts/ends must have one row per piece")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must start at 0.0 and end at 1.0")
        if not np.all(np.diff(bp) > 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(starts)) and np.all(np.isfinite(ends))):
            raise ValueError("breakpoints and values must be finite")
        for k, kind in enumerate(kinds):
            if kind not in (CONST, LINEAR):
                raise ValueError(f"unknown piece kind {kind!r}")
            if kind == CONST and not np.array_equal(starts[k], ends[k]):
                raise ValueError("constant piece with start != end")

        bp, kinds, starts, ends = _canonicalize(bp, kinds, starts, ends)
        self.dim = starts.shape[1]
        self.breakpoints = bp
        self.kinds = tuple(kinds)
        self.starts = starts
        self.ends = ends
        for a in (self.breakpoints, self.starts, self.ends):
            a.flags.writeable = False

    # -- factories ---------------------------------------------------------

    @classmethod
    def constant(cls, value):
        v = np.asarray(value, dtype=float).reshape(-1)
        return cls([0.0, 1.0], [CONST], v[None, :], v[None, :])

    @classmethod
    def step(cls, jump_times, values):
        """Step function: ``values[i]`` on ``[jump_times[i-1], jump_times[i])``.

        ``jump_times`` are the interior jump locations, strictly inside (0,1);
        ``values`` has one more entry than ``jump_times``.
        """
        jt = np.asarray(jump_times, dtype=float).reshape(-1)
        vals = np.atleast_2d(np.asarray(values, dtype=float))
        if vals.ndim == 2 and vals.shape[0] == 1 and len(jt) + 1 > 1 and vals.shape[1] == len(jt) + 1:
            # 1-d values passed as a flat list
            vals = vals.reshape(-1, 1)
        if vals.shape[0] != len(jt) + 1:
            raise ValueError("need len(values) == len(jump_times) + 1")
        if len(jt) and (jt[0] <= 0.0 or jt[-1] >= 1.0 or np.any(np.diff(jt) <= 0)):
            raise ValueError("jump times must be strictly increasing inside (0,1)")
        bp = np.concatenate(([0.0], jt, [1.0]))
        return cls(bp, [CONST] * vals.shape[0], vals, vals)

    @classmethod
    def indicator(cls, a):
        """The function equal to 1 on [a, 1] and 0 before."""
        if not 0.0 < a < 1.0:
            raise ValueError("indicator threshold must be inside (0,1)")
        return cls.step([a], [[0.0], [1.0]])

    @classmethod
    def linear(cls, v0, v1):
        v0 = np.asarray(v0, dtype=float).reshape(-1)
        v1 = np.asarray(v1, dtype=float).reshape(-1)
        return cls([0.0, 1.0], [LINEAR], v0[None, :], v1[None, :])

    @classmethod
    def from_pieces(cls, breakpoints, kinds, starts, ends):
        return cls(breakpoints, kinds, starts, ends)

    # -- basic queries ------------------------------------------------------

    @property
    def n_pieces(self):
        return len(self.kinds)

    @property
    def terminal_value(self):
        """Value at time 1; equals the left limit there by construction."""
        return self.ends[-1]

    @property
    def is_step(self):
        return all(k == CONST for k in self.kinds)

    def piece_index(self, t):
        """Index of the cell whose half-open interval contains t (t < 1)."""
        return int(np.searchsorted(self.breakpoints, t, side="right")) - 1

    def evaluate(self, t):
        """f(t), right continuous on [0,1) and terminal value at 1."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise ValueError("time outside [0,1]")
        idx = np.searchsorted(self.breakpoints, t_arr, side="right") - 1
        idx = np.minimum(idx, self.n_pieces - 1)
        out = self._value_in_piece(idx, t_arr)
        at_one = t_arr == 1.0
        if np.any(at_one):
            out[at_one] = self.ends[-1]
        return out[0] if scalar else out

    __call__ = evaluate

    def left_limit(self, t):
        """f(t-); at t=0 returns f(0) and warns (no left limit exists there)."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise ValueError("time outside [0,1]")
        if np.any(t_arr == 0.0):
            warnings.warn(
                "left limit at t=0 does not exist; returning f(0)",
                LeftLimitAtZeroWarning,
                stacklevel=2,
            )
        idx = np.searchsorted(self.breakpoints, t_arr, side="left") - 1
        idx = np.clip(idx, 0, self.n_pieces - 1)
        at_bp = self.breakpoints[idx + 1] == t_arr
        out = np.where(at_bp[:, None], self.ends[idx], self._value_in_piece(idx, t_arr))
        at_zero = t_arr == 0.0
        if np.any(at_zero):
            out[at_zero] = self.starts[0]
        return out[0] if scalar else out

    def _value_in_piece(self, idx, t_arr):
        lo = self.breakpoints[idx]
        hi = self.breakpoints[idx + 1]
        frac = np.zeros_like(t_arr)
        lin = np.array([self.kinds[i] == LINEAR for i in np.atleast_1d(idx)])
        if np.any(lin):
            frac[lin] = (t_arr[lin] - lo[lin]) / (hi[lin] - lo[lin])
        return self.starts[idx] + frac[:, None] * (self.ends[idx] - self.starts[idx])

    def jumps(self):
        """Interior jump data: (times, left limits, values after the jump)."""
        left = self.ends[:-1]
        right = self.starts[1:]
        mask = np.any(left != right, axis=1)
        return self.breakpoints[1:-1][mask], left[mask], right[mask]

    def piece_slopes(self):
        """Euclidean slope magnitude of each piece (0 for constant pieces)."""
        width = np.diff(self.breakpoints)
        return np.linalg.norm(self.ends - self.starts, axis=1) / width

    # -- equality / serialization ------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, CadlagFunction):
            return NotImplemented
        return (
            self.kinds == other.kinds
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.starts, other.starts)
            and np.array_equal(self.ends, other.ends)
        )

    def __hash__(self):
        return hash((self.kinds, self.breakpoints.tobytes(), self.starts.tobytes(), self.ends.tobytes()))

    def __repr__(self):
        return f"CadlagFunction(dim={self.dim}, pieces={self.n_pieces})"

    def to_dict(self):
        return {
            "dimension": self.dim,
            "breakpoints": self.breakpoints.tolist(),
            "kinds": list(self.kinds),
            "starts": self.starts.tolist(),
            "ends": self.ends.tolist(),
            "terminal": self.terminal_value.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        f = cls(d["breakpoints"], d["kinds"], d["starts"], d["ends"])
        if d["dimension"] != f.dim:
            raise ValueError("dimension field does not match values")
        if not np.array_equal(np.asarray(d["terminal"], dtype=float), f.terminal_value):
            raise ValueError("terminal value must equal the left limit at 1")
        return f

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.loads(fh.read())


def _canonicalize(bp, kinds, starts, ends):
    # linear pieces with equal endpoints are constants
    kinds = [CONST if kinds[i] == LINEAR and np.array_equal(starts[i], ends[i]) else kinds[i] for i in range(len(kinds))]
    out_bp = [bp[0]]
    out_kinds, out_s, out_e = [], [], []
    for i in range(len(kinds)):
        if out_kinds:
            no_jump = np.array_equal(out_e[-1], starts[i])
            if no_jump and kinds[i] == CONST and out_kinds[-1] == CONST and np.array_equal(out_s[-1], starts[i]):
                out_bp[-1] = bp[i + 1]
                out_e[-1] = ends[i]
                continue
            if no_jump and kinds[i] == LINEAR and out_kinds[-1] == LINEAR:
                # same direction and rate: (e_prev - s_prev) / w_prev == (e - s) / w
                w_prev = out_bp[-1] - out_bp[-2]
                w = bp[i + 1] - bp[i]
                if np.array_equal((out_e[-1] - out_s[-1]) * w, (ends[i] - starts[i]) * w_prev):
                    out_bp[-1] = bp[i + 1]
                    out_e[-1] = ends[i]
                    continue
        out_bp.append(bp[i + 1])
        out_kinds.append(kinds[i])
        out_s.append(starts[i].copy())
        out_e.append(ends[i].copy())
    return (
        np.asarray(out_bp, dtype=float),
        out_kinds,
        np.asarray(out_s, dtype=float),
        np.asarray(out_e, dtype=float),
    )


# -- module-level operation aliases ----------------------------------------


def evaluate(f: CadlagFunction, t):
    return f.evaluate(t)


def left_limit(f: CadlagFunction, t):
    return f.left_limit(t)


# -- graphs -----------------------------------------------------------------


class GraphPoint:
    """A point (value, time) of a function graph."""

    __slots__ = ("value", "time")

    def __init__(self, value, time):
        self.value = np.asarray(value, dtype=float).reshape(-1)
        if not (0.0 <= time <= 1.0 and np.all(np.isfinite(self.value))):
            raise ValueError("graph point needs finite value and time in [0,1]")
        self.time = float(time)

    def __repr__(self):
        return f"GraphPoint({self.value.tolist()}, {self.time})"

    def __eq__(self, other):
        return isinstance(other, GraphPoint) and self.time == other.time and np.array_equal(self.value, other.value)


INCOMPLETE = "incomplete"
COMPLETED = "completed"


class PolygonalGraph:
    """Ordered polyline in value x time space.

    ``connect[i]`` says whether the segment between vertices i and i+1 is
    part of the set.  Completed graphs are fully connected; incomplete
    graphs omit the vertical fill between the two sides of a jump.
    """

    __slots__ = ("values", "times", "kind", "connect")

    def __init__(self, values, times, kind, connect=None):
        self.values = np.atleast_2d(np.asarray(values, dtype=float))
        self.times = np.asarray(times, dtype=float).reshape(-1)
        if self.values.shape[0] != self.times.size:
            raise ValueError("values and times must have the same length")
        if self.values.shape[0] == 0:
            raise ValueError("graph must have at least one vertex")
        if kind not in (INCOMPLETE, COMPLETED):
            raise ValueError(f"unknown graph kind {kind!r}")
        self.kind = kind
        if connect is None:
            connect = np.ones(max(self.times.size - 1, 0), dtype=bool)
        self.connect = np.asarray(connect, dtype=bool)
        if self.connect.size != max(self.times.size - 1, 0):
            raise ValueError("connect must have one entry per vertex pair")

    @property
    def dim(self):
        return self.values.shape[1]

    def __len__(self):
        return self.times.size

    def vertices(self):
        return [GraphPoint(self.values[i], self.times[i]) for i in range(len(self))]

    def segments(self):
        """(P_values, P_times, Q_values, Q_times) arrays of kept segments."""
        keep = self.connect
        i = np.nonzero(keep)[0]
        return self.values[i], self.times[i], self.values[i + 1], self.times[i + 1]

    def is_time_ordered(self):
        dt = np.diff(self.times)
        return bool(np.all(dt >= 0.0))

    def check_completed_order(self, f: CadlagFunction, tol=0.0):
        """Vertices nondecreasing in time and, at equal times, in |f(t-)-z|."""
        if not self.is_time_ordered():
            return False
        for i in range(len(self) - 1):
            if self.times[i] == self.times[i + 1]:
                fm = f.left_limit(self.times[i]) if self.times[i] > 0 else f.evaluate(0.0)
                d0 = np.linalg.norm(fm - self.values[i])
                d1 = np.linalg.norm(fm - self.values[i + 1])
                if d0 > d1 + tol:
                    return False
        return True


def _graph(f: CadlagFunction, kind):
    vals = [f.starts[0]]
    times = [0.0]
    connect = []
    for i in range(f.n_pieces):
        if i > 0:
            # jump (or continuity) at breakpoint i
            if not np.array_equal(f.ends[i - 1], f.starts[i]):
                vals.append(f.starts[i])
                times.append(f.breakpoints[i])
                connect.append(kind == COMPLETED)
        vals.append(f.ends[i])
        times.append(f.breakpoints[i + 1])
        connect.append(True)
    return PolygonalGraph(np.asarray(vals), np.asarray(times), kind, np.asarray(connect, dtype=bool))


def incomplete_graph(f: CadlagFunction) -> PolygonalGraph:
    """Graph containing (f(t-), t) and (f(t), t) but not the jump fills."""
    return _graph(f, INCOMPLETE)


def completed_graph(f: CadlagFunction) -> PolygonalGraph:
    """Graph with every jump filled by the segment between its two sides."""
    return _graph(f, COMPLETED)


# -- projection and restriction ---------------------------------------------


def project(f: CadlagFunction, direction) -> CadlagFunction:
    """Scalar function t -> <direction, f(t)>, piecewise structure preserved."""
    eta = np.asarray(direction, dtype=float).reshape(-1)
    if eta.size != f.dim:
        raise ValueError("direction dimension mismatch")
    # row-wise dots so scalar evaluation commutes bit-exactly with projection
    s = np.asarray([[np.dot(r, eta)] for r in f.starts])
    e = np.asarray([[np.dot(r, eta)] for r in f.ends])
    return CadlagFunction(f.breakpoints, f.kinds, s, e)


def restrict(f: CadlagFunction, T: float) -> CadlagFunction:
    """Restriction of f to [0, T], rescaled affinely back onto [0, 1].

    The terminal value of the result is the left limit f(T-), so a jump
    exactly at T is not part of the restriction.
    """
    if not 0.0 < T <= 1.0:
        raise ValueError("restriction horizon must be in (0, 1]")
    if T == 1.0:
        return f
    bp, kinds, starts, ends = [0.0], [], [], []
    for i in range(f.n_pieces):
        lo, hi = f.breakpoints[i], f.breakpoints[i + 1]
        if lo >= T:
            break
        hi_c = min(hi, T)
        end = f.ends[i]
        if hi_c < hi:
            # left limit at the cut is the within-piece value
            end = f._value_in_piece(np.array([i]), np.array([hi_c]))[0]
        bp.append(hi_c / T)
        kinds.append(f.kinds[i])
        starts.append(f.starts[i])
        ends.append(end)
    bp[-1] = 1.0
    return CadlagFunction(bp, kinds, np.asarray(starts), np.asarray(ends))


# -- time changes and parametric representations -----------------------------


class TimeChange:
    """Strictly increasing piecewise-linear bijection of [0,1]."""

    __slots__ = ("knots_in", "knots_out")

    def __init__(self, knots_in, knots_out):
        s = np.asarray(knots_in, dtype=float).reshape(-1)
        lam = np.asarray(knots_out, dtype=float).reshape(-1)
        if s.size != lam.size or s.size < 2:
            raise ValueError("need matching knot arrays with at least two knots")
        if s[0] != 0.0 or s[-1] != 1.0 or lam[0] != 0.0 or lam[-1] != 1.0:
            raise ValueError("time change must map 0 to 0 and 1 to 1")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(lam) <= 0):
            raise ValueError("time change must be strictly increasing")
        self.knots_in = s
        self.knots_out = lam

    @classmethod
    def identity(cls):
        return cls([0.0, 1.0], [0.0, 1.0])

    def __call__(self, t):
        return np.interp(t, self.knots_in, self.knots_out)

    def inverse(self):
        return TimeChange(self.knots_out, self.knots_in)

    def sup_distance_to_identity(self):
        """sup |lambda(t) - t|; attained at a knot for piecewise-linear maps."""
        return float(np.max(np.abs(self.knots_out - self.knots_in)))

    def to_dict(self):
        return {"knots_in": self.knots_in.tolist(), "knots_out": self.knots_out.tolist()}


class ParamRep:
    """Parametric representation (u, r) of a completed graph.

    ``flavor`` is ``"monotone"`` when the pair traverses the graph in graph
    order (value and time jointly monotone along the polyline) and
    ``"weak"`` when only r is required to be nondecreasing.
    """

    MONOTONE = "monotone"
    WEAK = "weak"

    __slots__ = ("u", "r", "flavor")

    def __init__(self, u, r, flavor=MONOTONE):
        self.u = np.atleast_2d(np.asarray(u, dtype=float))
        self.r = np.asarray(r, dtype=float).reshape(-1)
        if self.u.shape[0] != self.r.size:
            raise ValueError("u and r must have the same number of samples")
        if flavor not in (self.MONOTONE, self.WEAK):
            raise ValueError("flavor must be 'monotone' or 'weak'")
        if np.any(np.diff(self.r) < 0):
            raise ValueError("r must be nondecreasing")
        self.flavor = flavor

    def traces(self, graph: PolygonalGraph, tol=1e-9) -> bool:
        """Every sample lies on the graph and every vertex is visited in order."""
        from .metrics import _point_to_graph_distance  # local import, avoids cycle

        pts = np.column_stack([self.u, self.r])
        for p in pts:
            if _point_to_graph_distance(p[:-1], p[-1], graph) > tol:
                return False
        j = 0
        for i in range(len(graph)):
            target_v, target_t = graph.values[i], graph.times[i]
            while j < pts.shape[0]:
                if (
                    abs(pts[j, -1] - target_t) <= tol
                    and np.linalg.norm(pts[j, :-1] - target_v) <= tol
                ):
                    break
                j += 1
            if j == pts.shape[0]:
                return False
        return True
