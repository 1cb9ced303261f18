import numpy as np
import pytest

from skorokhod.cadlag import CadlagFunction


def random_step_function(rng, dim=1, max_jumps=20, value_scale=1.0):
    """Random piecewise-constant function with distinct values across jumps."""
    k = int(rng.integers(0, max_jumps + 1))
    times = np.sort(rng.uniform(0.02, 0.98, size=k))
    # keep jump times separated so canonicalisation does not collapse pieces
    keep = np.concatenate(([True], np.diff(times) > 1e-6)) if k else np.array([], dtype=bool)
    times = times[keep] if k else times
    values = rng.uniform(-value_scale, value_scale, size=(len(times) + 1, dim))
    return CadlagFunction.step(times, values)


def random_piecewise_linear(rng, dim=1, max_pieces=6, value_scale=1.0):
    m = int(rng.integers(1, max_pieces + 1))
    bp = np.concatenate(([0.0], np.sort(rng.uniform(0.05, 0.95, size=m - 1)), [1.0]))
    kinds = [("linear" if rng.random() < 0.6 else "const") for _ in range(m)]
    starts = np.empty((m, dim))
    ends = np.empty((m, dim))
    for i in range(m):
        starts[i] = rng.uniform(-value_scale, value_scale, size=dim)
        ends[i] = starts[i] if kinds[i] == "const" else rng.uniform(-value_scale, value_scale, size=dim)
    return CadlagFunction(bp, kinds, starts, ends)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
