"""Chain simulation and the tightness / embedding-switch diagnostics.

Estimators are Monte Carlo with a documented randomness contract: one
root seed; replica r draws its chain from SeedSequence(root, spawn_key=(r, 0))
and its clock from spawn_key=(r, 1)..  Replicas are therefore independent
and order-insensitive, and identical inputs give bitwise identical output.

The per-step supremum over continuous t <= h is realised exactly as a
maximum over the integer step counts <= floor(h*n), since the embedded
chain only moves at grid times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .cadlag import CadlagFunction
from .embeddings import PoissonPath, SequenceData, clock_discrepancy, embed, embed_markov

__all__ = [
    "MarkovKernel",
    "ConditionEstimate",
    "ScenarioResult",
    "builtin_kernels",
    "make_kernel",
    "simulate_chain",
    "simulate_paths",
    "estimate_local_continuity",
    "estimate_global_bound",
    "estimate_extra_steps",
    "fixed_discontinuity_frequency",
    "convergence_probe",
    "confidence_half_width",
    "walk_max_exceedance_oracle",
    "walk_exceedance_oracle",
    "extra_steps_oracle",
    "poisson_pmf",
    "Z99",
]

Z99 = 2.5758293035489004  # two-sided 99% normal quantile


def confidence_half_width(p_hat: float, n: int) -> float:
    """99% half-width: normal approximation floored by the Wilson interval."""
    if n <= 0:
        return 1.0
    wald = Z99 * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n)
    denom = 1.0 + Z99 * Z99 / n
    wilson = Z99 * math.sqrt(p_hat * (1.0 - p_hat) / n + Z99 * Z99 / (4 * n * n)) / denom
    return max(wald, wilson)


def _rng(seed, replica, stream):
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(replica, stream)))


@dataclass(frozen=True)
class MarkovKernel:
    """Time-homogeneous transition sampler.

    ``sample_path(start, steps, rng)`` returns the whole path of shape
    (steps + 1, d); kernels override it when the path has a closed
    vectorised form (random walks, deterministic drifts).
    """

    name: str
    dim: int
    step: Callable
    path_sampler: Optional[Callable] = None
    critical_states: tuple = ()

    def sample_path(self, start, steps, rng):
        start = np.asarray(start, dtype=float).reshape(-1)
        if start.size != self.dim:
            raise ValueError("start state has wrong dimension")
        if steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.path_sampler is not None:
            return self.path_sampler(start, steps, rng)
        out = np.empty((steps + 1, self.dim))
        out[0] = start
        state = start
        for k in range(steps):
            state = np.asarray(self.step(state, rng), dtype=float).reshape(-1)
            out[k + 1] = state
        return out


def _srw_kernel(n, lazy=False):
    scale = 1.0 / math.sqrt(n)

    def step(x, rng):
        s = rng.integers(0, 2) * 2 - 1
        if lazy and rng.integers(0, 2) == 0:
            return x
        return x + scale * s

    def path(start, steps, rng):
        moves = (rng.integers(0, 2, size=steps) * 2 - 1).astype(float)
        if lazy:
            moves *= rng.integers(0, 2, size=steps)
        out = np.empty((steps + 1, 1))
        out[0, 0] = start[0]
        out[1:, 0] = start[0] + scale * np.cumsum(moves)
        return out

    name = "lazy-srw" if lazy else "srw"
    return MarkovKernel(name, 1, step, path)


def _drift_kernel(n, rate=1.0):
    inc = rate / n

    def step(x, rng):
        return x + inc

    def path(start, steps, rng):
        out = np.empty((steps + 1, 1))
        out[:, 0] = start[0] + inc * np.arange(steps + 1)
        return out

    return MarkovKernel("drift", 1, step, path)


def _identity_kernel():
    def step(x, rng):
        return x

    def path(start, steps, rng):
        return np.tile(start, (steps + 1, 1))

    return MarkovKernel("identity", 1, step, path)


def _fixed_jump_transition(x, dt):
    # deterministic motion: frozen on [0,1), unit drift elsewhere, and a
    # +1 kick when crossing zero from below
    if 0.0 <= x < 1.0:
        return x
    if x < 0.0 and x + dt >= 0.0:
        return x + dt + 1.0
    return x + dt


def _fixed_jump_kernel(n):
    dt = 1.0 / n

    def step(x, rng):
        return np.array([_fixed_jump_transition(float(x[0]), dt)])

    def path(start, steps, rng):
        out = np.empty((steps + 1, 1))
        x = float(start[0])
        out[0, 0] = x
        for k in range(steps):
            x = _fixed_jump_transition(x, dt)
            out[k + 1, 0] = x
        return out

    return MarkovKernel("fixed-jump", 1, step, path, critical_states=(-0.5 / n,))


def _unit_jump_kernel(n):
    def step(x, rng):
        return x + 1.0

    def path(start, steps, rng):
        out = np.empty((steps + 1, 1))
        out[:, 0] = start[0] + np.arange(steps + 1)
        return out

    return MarkovKernel("unit-jump", 1, step, path)


_CATALOG = {
    "identity": "frozen chain, never moves",
    "drift": "deterministic +rate/n per step",
    "srw": "simple random walk with steps +-1/sqrt(n)",
    "lazy-srw": "random walk that stays put half the time",
    "fixed-jump": "deterministic flow with a +1 kick at the origin crossing",
    "unit-jump": "deterministic +1 per step (never tight)",
}


def builtin_kernels():
    """Names and one-line descriptions of the bundled kernels."""
    return dict(_CATALOG)


def make_kernel(name: str, n: int, **params) -> MarkovKernel:
    if name == "identity":
        return _identity_kernel()
    if name == "drift":
        return _drift_kernel(n, params.get("rate", 1.0))
    if name == "srw":
        return _srw_kernel(n)
    if name == "lazy-srw":
        return _srw_kernel(n, lazy=True)
    if name == "fixed-jump":
        return _fixed_jump_kernel(n)
    if name == "unit-jump":
        return _unit_jump_kernel(n)
    raise ValueError(f"unknown kernel {name!r}; see builtin_kernels()")


def simulate_chain(kernel: MarkovKernel, start, steps: int, seed) -> np.ndarray:
    """One reproducible path of shape (steps + 1, d)."""
    return kernel.sample_path(np.asarray(start, dtype=float).reshape(-1), steps, _rng(seed, 0, 0))


def simulate_paths(kernel: MarkovKernel, start, steps: int, replicas: int, seed) -> np.ndarray:
    """(replicas, steps + 1, d) array; replica r uses its own derived stream."""
    start = np.asarray(start, dtype=float).reshape(-1)
    out = np.empty((replicas, steps + 1, kernel.dim))
    for r in range(replicas):
        out[r] = kernel.sample_path(start, steps, _rng(seed, r, 0))
    return out


# ---------------------------------------------------------------------------
# condition estimators


@dataclass
class ConditionEstimate:
    condition: str
    params: dict
    grid: list
    probabilities: np.ndarray  # per grid row, per step count
    half_widths: np.ndarray
    sup_estimate: float
    replicas: int
    seed: object

    def to_dict(self):
        return {
            "condition": self.condition,
            "params": self.params,
            "grid": self.grid,
            "probabilities": np.asarray(self.probabilities).tolist(),
            "half_widths": np.asarray(self.half_widths).tolist(),
            "sup_estimate": self.sup_estimate,
            "replicas": self.replicas,
            "seed": self.seed,
        }


def default_x_grid(kernel: MarkovKernel, radius: float, count: int = 9):
    """Uniform states in [-R, R] plus the kernel's declared critical states."""
    pts = list(np.linspace(-radius, radius, count))
    pts.extend(c for c in kernel.critical_states if abs(c) < radius)
    return sorted(set(float(p) for p in pts))


def estimate_local_continuity(
    kernel: MarkovKernel,
    n: int,
    epsilon: float,
    radius: float,
    h: float,
    x_grid=None,
    replicas: int = 2000,
    seed=0,
) -> ConditionEstimate:
    """sup over grid states x and t <= h of P(|Y_floor(tn) - x| > eps | Y_0 = x).

    The time supremum is exact (maximum over step counts <= floor(h n));
    the spatial supremum is over the supplied grid plus critical states.
    """
    if min(epsilon, radius, h) <= 0:
        raise ValueError("epsilon, radius and h must be positive")
    if x_grid is None:
        x_grid = default_x_grid(kernel, radius)
    x_grid = [float(x) for x in x_grid]
    if not x_grid:
        raise ValueError("empty state grid")
    steps = int(np.floor(h * n))
    probs = np.zeros((len(x_grid), steps + 1))
    for xi, x in enumerate(x_grid):
        paths = simulate_paths(kernel, [x], steps, replicas, (seed, xi))
        exceed = np.linalg.norm(paths - np.array([x]), axis=2) > epsilon
        probs[xi] = exceed.mean(axis=0)
    hw = np.vectorize(lambda p: confidence_half_width(p, replicas))(probs)
    return ConditionEstimate(
        "iii-local-continuity",
        {"n": n, "epsilon": epsilon, "radius": radius, "h": h, "kernel": kernel.name},
        x_grid,
        probs,
        hw,
        float(probs.max()),
        replicas,
        seed,
    )


def estimate_global_bound(
    kernel: MarkovKernel,
    n: int,
    m: int,
    R_grid: Sequence[float],
    replicas: int = 2000,
    seed=0,
    start=None,
) -> ConditionEstimate:
    """P(max_{k <= n*m} |Y_k| > R) for each radius R; nonincreasing in R."""
    if m < 1:
        raise ValueError("m must be at least 1")
    start = np.zeros(kernel.dim) if start is None else np.asarray(start, dtype=float)
    steps = n * m
    paths = simulate_paths(kernel, start, steps, replicas, seed)
    running = np.linalg.norm(paths, axis=2).max(axis=1)
    R_grid = [float(R) for R in R_grid]
    probs = np.array([[np.mean(running > R)] for R in R_grid])
    hw = np.vectorize(lambda p: confidence_half_width(p, replicas))(probs)
    return ConditionEstimate(
        "ii-global-bound",
        {"n": n, "m": m, "kernel": kernel.name},
        R_grid,
        probs,
        hw,
        float(probs.max()),
        replicas,
        seed,
    )


def estimate_extra_steps(
    kernel: MarkovKernel,
    n: int,
    epsilon: float,
    replicas: int = 2000,
    seed=0,
    start=None,
) -> float:
    """P(sup over the clock/grid index mismatch of the chain's wander > eps).

    The subordinated embedding uses N(n-) chain steps while the grid
    embedding uses n-1; the steps past min(n-1, N(n-)) are the ones a time
    change cannot absorb.
    """
    start = np.zeros(kernel.dim) if start is None else np.asarray(start, dtype=float)
    hits = 0
    for r in range(replicas):
        clock = PoissonPath.sample(n, np.random.SeedSequence(entropy=seed, spawn_key=(r, 1)))
        n_before = clock.count_before(n)
        base = min(n - 1, n_before)
        extra = abs(n - 1 - n_before)
        if extra <= 1:
            continue  # sup over k < extra of a single zero term
        path = kernel.sample_path(start, base + extra - 1, _rng(seed, r, 0))
        wander = np.linalg.norm(path[base : base + extra] - path[base], axis=1)
        if wander.max() > epsilon:
            hits += 1
    return hits / replicas


def fixed_discontinuity_frequency(
    kernel: MarkovKernel, n: int, epsilon: float, replicas: int = 2000, seed=0, start=None
) -> float:
    """max over grid times of the empirical jump frequency of the step
    embedding: max_k P(|Y_k - Y_{k-1}| > eps)."""
    start = np.zeros(kernel.dim) if start is None else np.asarray(start, dtype=float)
    paths = simulate_paths(kernel, start, n, replicas, seed)
    jumps = np.linalg.norm(np.diff(paths, axis=1), axis=2) > epsilon
    return float(jumps.mean(axis=0).max())


# ---------------------------------------------------------------------------
# convergence probe


@dataclass
class ScenarioResult:
    topology: str
    reference: str
    n_list: list
    exceedance: list
    quantiles: dict
    epsilon: float
    replicas: int
    seed: object
    thresholds: Optional[list] = None

    @property
    def passes(self):
        if self.thresholds is None:
            return None
        return [e <= t for e, t in zip(self.exceedance, self.thresholds)]

    def rows(self):
        out = []
        for i, n in enumerate(self.n_list):
            row = {
                "n": n,
                "exceedance": self.exceedance[i],
                "epsilon": self.epsilon,
                "topology": self.topology,
                "reference": self.reference,
            }
            for q, vals in self.quantiles.items():
                row[f"q{q}"] = vals[i]
            if self.thresholds is not None:
                row["pass"] = self.passes[i]
            out.append(row)
        return out


def _distance(topology, f, g):
    from . import metrics

    topology = topology.upper()
    if topology == "J1":
        return metrics.d_j1(f, g).value
    if topology == "J2":
        return metrics.d_j2(f, g).value
    if topology == "M2":
        return metrics.d_m2(f, g).value
    if topology == "M1":
        return metrics.d_m1_upper(f, g).value
    raise ValueError(f"unknown topology {topology!r}")


def convergence_probe(
    kernel_factory,
    reference,
    topology: str,
    n_list: Sequence[int],
    epsilon: float,
    replicas: int = 200,
    seed=0,
    start=None,
    quantile_levels=(0.5, 0.9),
    thresholds=None,
) -> ScenarioResult:
    """Empirical exceedance of d(embedded chain, reference) over n.

    ``kernel_factory`` maps n to a kernel (the builtin kernels scale with
    n).  ``reference`` is a fixed path, or one of the coupled recipes
    "markov" (step embedding vs subordinated chain), "m1" / "j2" / "m2"
    (step embedding vs the other embedding of the same path).
    """
    recipes = ("markov", "m1", "j2", "m2")
    ref_name = reference if isinstance(reference, str) else "fixed-path"
    if isinstance(reference, str) and reference not in recipes:
        raise ValueError(f"reference recipe must be one of {recipes}")
    exceed = []
    quants = {q: [] for q in quantile_levels}
    for n in n_list:
        kernel = kernel_factory(n)
        start_x = np.zeros(kernel.dim) if start is None else np.asarray(start, dtype=float)
        dists = np.empty(replicas)
        for r in range(replicas):
            if isinstance(reference, str) and reference == "markov":
                clock = PoissonPath.sample(n, np.random.SeedSequence(entropy=seed, spawn_key=(r, 1)))
                steps = max(n - 1, clock.count_before(n))
                path = kernel.sample_path(start_x, steps, _rng(seed, r, 0))
                f = embed(SequenceData(n, path[:n]), "J1")
                g = embed_markov(path, clock, n)
            else:
                path = kernel.sample_path(start_x, n - 1, _rng(seed, r, 0))
                seq = SequenceData(n, path)
                f = embed(seq, "J1")
                if isinstance(reference, str):
                    g = embed(seq, reference.upper())
                else:
                    g = reference
            try:
                dists[r] = _distance(topology, f, g)
            except Exception as exc:  # pragma: no cover - context for rare failures
                raise RuntimeError(f"distance failed for n={n}, replica={r}") from exc
        exceed.append(float(np.mean(dists > epsilon)))
        for q in quantile_levels:
            quants[q].append(float(np.quantile(dists, q)))
    return ScenarioResult(
        topology.upper(),
        ref_name,
        list(n_list),
        exceed,
        quants,
        epsilon,
        replicas,
        seed,
        list(thresholds) if thresholds is not None else None,
    )


# ---------------------------------------------------------------------------
# exact oracles for the built-in kernels


def poisson_pmf(lam: float, kmax: int) -> np.ndarray:
    ks = np.arange(kmax + 1)
    return np.exp(ks * math.log(lam) - lam - np.array([math.lgamma(k + 1.0) for k in ks]))


def walk_exceedance_oracle(n: int, k: int, epsilon: float) -> float:
    """P(|S_k| / sqrt(n) > eps) for the +-1 walk, exact via the binomial."""
    thresh = epsilon * math.sqrt(n)
    # S_k = 2X - k with X ~ Binomial(k, 1/2)
    total = 0.0
    for x in range(k + 1):
        if abs(2 * x - k) > thresh:
            total += math.comb(k, x)
    return total / 2.0**k


def walk_max_exceedance_oracle(steps: int, thresh_steps: int) -> float:
    """P(max_{k <= steps} |S_k| >= thresh_steps), exact survival recursion."""
    if steps <= 0:
        return 0.0
    a = thresh_steps
    if a <= 0:
        return 1.0
    probs = np.zeros(2 * a - 1)
    probs[a - 1] = 1.0
    for _ in range(steps):
        new = np.zeros_like(probs)
        new[1:] += 0.5 * probs[:-1]
        new[:-1] += 0.5 * probs[1:]
        probs = new
    return float(1.0 - probs.sum())


def extra_steps_oracle(n: int, epsilon: float, tail_sigmas: int = 20) -> float:
    """Exact value of the extra-steps probability for the +-1/sqrt(n) walk:
    Poisson mixture over the clock count of the reflected walk maximum."""
    thresh = int(np.floor(epsilon * math.sqrt(n))) + 1
    kmax = n + tail_sigmas * int(math.sqrt(n)) + tail_sigmas
    pmf = poisson_pmf(n, kmax)
    total = 0.0
    for N, p in enumerate(pmf):
        K = abs(n - 1 - N)
        total += p * walk_max_exceedance_oracle(K - 1, thresh)
    return float(total)
