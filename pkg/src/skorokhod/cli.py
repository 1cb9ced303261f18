"""Command line scenario runner.

Subcommands: metric, embed, clock, tightness, probe, counterexamples,
inequality-sweep.  All output is deterministic for a fixed seed: floats
are rendered with repr (shortest round-trip), rows are emitted in a fixed
order, and no timestamps are written.  Exit codes: 0 all assertions
passed, 2 assertion failure, 1 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .cadlag import CadlagFunction
from .embeddings import (
    PoissonPath,
    SequenceData,
    clock_discrepancy,
    counterexample_limit,
    counterexample_sequence,
    embed,
)
from .functionals import Band, Window, overshoot, oscillation_count
from .markov import (
    ConditionEstimate,
    convergence_probe,
    estimate_extra_steps,
    estimate_global_bound,
    estimate_local_continuity,
    make_kernel,
)
from .metrics import d_j1, d_j2, d_m1_upper, d_m2
from .oscillation import oscillation_profile

SCHEMA = 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    return str(x)


def _write_csv(path, header, rows, meta=""):
    lines = [f"# schema={SCHEMA}" + (f" {meta}" if meta else "")]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_json(path, payload):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _float_list(text):
    return [float(x) for x in text.split(",") if x]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_metric(args):
    f = CadlagFunction.load(args.f)
    g = CadlagFunction.load(args.g)
    topo = args.topology.lower()
    if topo == "j1":
        res = d_j1(f, g, tolerance=args.tolerance)
    elif topo == "j2":
        res = d_j2(f, g)
    elif topo == "m2":
        res = d_m2(f, g)
    elif topo == "m1":
        res = d_m1_upper(f, g, refinement=args.refinement)
    else:
        raise _UsageError(f"unknown topology {args.topology}")
    _write_json(args.out, res.to_dict())
    return 0


def _cmd_embed(args):
    seq = counterexample_sequence(args.family, args.n)
    x = embed(seq, args.topology.upper())
    if args.out is None:
        sys.stdout.write(x.dumps() + "\n")
    else:
        x.save(args.out)
    return 0


def _cmd_clock(args):
    vals = []
    for r in range(args.replicas):
        clock = PoissonPath.sample(args.n, np.random.SeedSequence(entropy=args.seed, spawn_key=(r, 1)))
        vals.append(clock_discrepancy(clock, args.n))
    vals = np.asarray(vals)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
    header = ["n", "replicas", "seed", "mean", "se", "min", "max", "q50", "q90", "q99"]
    row = [
        args.n,
        args.replicas,
        args.seed,
        mean,
        se,
        float(vals.min()),
        float(vals.max()),
        float(np.quantile(vals, 0.5)),
        float(np.quantile(vals, 0.9)),
        float(np.quantile(vals, 0.99)),
    ]
    _write_csv(args.out, header, [row], meta="op=clock_discrepancy")
    return 0


def _cmd_tightness(args):
    payload = []
    for n in args.n:
        kernel = make_kernel(args.kernel, n)
        for h in args.h:
            est = estimate_local_continuity(
                kernel, n, args.eps, args.R, h, replicas=args.replicas, seed=args.seed
            )
            payload.append(est.to_dict())
        gb = estimate_global_bound(
            kernel, n, args.m, args.R_grid, replicas=args.replicas, seed=args.seed
        )
        payload.append(gb.to_dict())
        extra = estimate_extra_steps(kernel, n, args.eps, replicas=args.replicas, seed=args.seed)
        payload.append(
            ConditionEstimate(
                "extra-steps",
                {"n": n, "epsilon": args.eps, "kernel": args.kernel},
                [0.0],
                np.array([[extra]]),
                np.array([[0.0]]),
                extra,
                args.replicas,
                args.seed,
            ).to_dict()
        )
    _write_json(args.out, payload)
    return 0


def _cmd_probe(args):
    if args.reference in ("markov", "m1", "j2", "m2"):
        reference = args.reference
    else:
        reference = CadlagFunction.load(args.reference)
    result = convergence_probe(
        lambda n: make_kernel(args.kernel, n),
        reference,
        args.topology,
        args.n,
        args.eps,
        replicas=args.replicas,
        seed=args.seed,
    )
    rows = result.rows()
    header = list(rows[0].keys())
    _write_csv(args.out, header, [[r[k] for k in header] for r in rows], meta="op=convergence_probe")
    return 0


_LEVELS = [round(0.1 * k, 1) for k in range(1, 10) if k != 5]
_BANDS = [(0.25, 0.75), (0.1, 0.4), (0.6, 0.9), (0.2, 0.8)]
_DELTAS = [0.02, 0.05, 0.1, 0.2]


def _cmd_counterexamples(args):
    if not (4 <= args.n_min <= args.n_max <= 2**16):
        raise _UsageError("n range must sit inside [4, 65536]")
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    limit = counterexample_limit()
    n_values = []
    n = args.n_min
    while n <= args.n_max:
        n_values.append(n)
        n *= 2

    dist_rows, func_rows, osc_rows = [], [], []
    failures = []
    for family in (1, 2, 3):
        for n in n_values:
            x = embed(counterexample_sequence(family, n), "J1")
            dj1 = d_j1(x, limit).value
            dj2 = d_j2(x, limit).value
            dm2 = d_m2(x, limit).value
            m1 = d_m1_upper(x, limit, refinement=max(8, n))
            for topo, val in (("J1", dj1), ("J2", dj2), ("M2", dm2), ("M1", m1.value)):
                dist_rows.append([family, n, topo, val])
            dist_rows.append([family, n, "M1-lower", m1.meta["lower"]])
            frow = [family, n]
            for a in _LEVELS:
                frow.append(overshoot(x, Window(0.0, 1.0), a))
            for a, b in _BANDS:
                frow.append(oscillation_count(x, Window(0.0, 1.0), Band(a, b)))
            func_rows.append(frow)
            for delta in _DELTAS:
                prof = oscillation_profile(delta, x)
                for topo in ("J1", "J2", "M1", "M2"):
                    osc_rows.append([family, n, topo, delta, prof[topo].value])

            # convergence pattern assertions (thresholds derived; family 3's
            # dip sits three cells past 1/2, hence 3/n)
            checks = {
                1: (m1.value <= 2.0 / n + 1e-12 and min(dj1, dj2) >= 0.2),
                2: (dj2 <= 2.0 / n + 1e-12 and dj1 >= 0.2),
                3: (dm2 <= 3.0 / n + 1e-12 and dj2 >= 0.2),
            }[family]
            if not checks:
                failures.append((family, n))

    _write_csv(
        outdir / "counterexample_distances.csv",
        ["family", "n", "topology", "distance"],
        dist_rows,
        meta="op=run_counterexamples limit=step(1/2)",
    )
    _write_csv(
        outdir / "counterexample_functionals.csv",
        ["family", "n"]
        + [f"gamma(a={a})" for a in _LEVELS]
        + [f"nu[{a},{b}]" for a, b in _BANDS],
        func_rows,
        meta="op=run_counterexamples window=[0,1]",
    )
    _write_csv(
        outdir / "counterexample_oscillation.csv",
        ["family", "n", "topology", "delta", "oscillation"],
        osc_rows,
        meta="op=run_counterexamples",
    )
    if failures:
        sys.stderr.write(f"convergence pattern failures: {failures}\n")
        return 2
    return 0


def _cmd_sweep(args):
    rng = np.random.default_rng(args.seed)
    deltas = args.deltas
    rows = []
    violations = []
    for it in range(args.functions):
        dim = args.dims[it % len(args.dims)]
        k = int(rng.integers(0, args.max_jumps + 1))
        times = np.sort(rng.uniform(0.02, 0.98, size=k))
        keep = np.concatenate(([True], np.diff(times) > 1e-6)) if k else np.array([], dtype=bool)
        times = times[keep] if k else times
        values = rng.uniform(-1.0, 1.0, size=(len(times) + 1, dim))
        f = CadlagFunction.step(times, values)
        for delta in deltas:
            prof = oscillation_profile(delta, f)
            v = {t: prof[t].value for t in ("J1", "J2", "M1", "M2")}
            checks = {
                "M2<=J2": v["M2"] <= v["J2"] + 1e-12,
                "M2<=M1": v["M2"] <= v["M1"] + 1e-12,
                "J2<=J1": v["J2"] <= v["J1"] + 1e-12,
                "M1<=J1": v["M1"] <= v["J1"] + 1e-12,
                "J1<=M1+J2": v["J1"] <= v["M1"] + v["J2"] + 1e-12,
            }
            ok = all(checks.values())
            rows.append([it, dim, delta, v["J1"], v["J2"], v["M1"], v["M2"], ok])
            if not ok:
                bad = ";".join(name for name, good in checks.items() if not good)
                violations.append([it, dim, delta, bad, f.dumps()])
    # adversarial middle-value functions: half-jump within delta/2 of a jump
    for it in range(args.functions // 4):
        delta = deltas[it % len(deltas)]
        u = float(rng.uniform(0.01, 0.95))
        gap = min(float(rng.uniform(1e-4, delta / 2)), 0.98 - u)
        mid = float(rng.uniform(0.1, 0.9))
        f = CadlagFunction.step([u, u + gap], [[0.0], [mid], [1.0]])
        prof = oscillation_profile(delta, f)
        v = {t: prof[t].value for t in ("J1", "J2", "M1", "M2")}
        ok = v["J1"] <= v["M1"] + v["J2"] + 1e-12
        rows.append([args.functions + it, 1, delta, v["J1"], v["J2"], v["M1"], v["M2"], ok])
        if not ok:
            violations.append([args.functions + it, 1, delta, "J1<=M1+J2", f.dumps()])

    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        outdir / "inequality_sweep.csv",
        ["case", "dim", "delta", "J1", "J2", "M1", "M2", "ok"],
        rows,
        meta=f"op=run_inequality_sweep seed={args.seed}",
    )
    _write_csv(
        outdir / "inequality_violations.csv",
        ["case", "dim", "delta", "violated", "function"],
        violations,
        meta="op=run_inequality_sweep",
    )
    return 2 if violations else 0


def _cmd_tightness_suite(args):
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    ok = True
    for name in ("srw", "fixed-jump", "drift"):
        for n in args.n:
            kernel = make_kernel(name, n)
            sups = []
            for h in args.h:
                est = estimate_local_continuity(
                    kernel, n, args.eps, args.R, h, replicas=args.replicas, seed=args.seed
                )
                sups.append(est.sup_estimate)
                rows.append([name, n, "iii-local-continuity", h, est.sup_estimate])
            gb = estimate_global_bound(kernel, n, 2, [4.0], replicas=args.replicas, seed=args.seed)
            rows.append([name, n, "ii-global-bound", 4.0, gb.sup_estimate])
            extra = estimate_extra_steps(kernel, n, args.eps, replicas=args.replicas, seed=args.seed)
            rows.append([name, n, "extra-steps", 0.0, extra])
            if name == "fixed-jump" and max(sups) < 0.5:
                ok = False  # the counterexample kernel must trip the detector
            if name == "drift" and max(sups) > 0.0 and args.eps > 1.0 / min(args.n):
                ok = False
    _write_csv(
        outdir / "tightness_suite.csv",
        ["kernel", "n", "condition", "parameter", "estimate"],
        rows,
        meta=f"op=run_tightness_suite seed={args.seed}",
    )
    return 0 if ok else 2


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="skorokhod", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = sub.add_parser("metric", help="distance between two serialized functions")
    sp.add_argument("--topology", required=True, choices=["j1", "j2", "m1", "m2"])
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.add_argument("--refinement", type=int, default=8)
    common(sp)
    sp.set_defaults(func=_cmd_metric)

    sp = sub.add_parser("embed", help="serialize a counterexample-family embedding")
    sp.add_argument("--family", type=int, required=True, choices=[1, 2, 3])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--topology", default="J1")
    common(sp)
    sp.set_defaults(func=_cmd_embed)

    sp = sub.add_parser("clock", help="clock discrepancy statistics")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--replicas", type=int, default=1000)
    common(sp)
    sp.set_defaults(func=_cmd_clock)

    sp = sub.add_parser("tightness", help="condition estimates for one kernel")
    sp.add_argument("--kernel", required=True)
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--R", type=float, default=2.0)
    sp.add_argument("--h", type=_float_list, default=[0.2, 0.1, 0.05])
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--R-grid", type=_float_list, default=[1.0, 2.0, 4.0])
    sp.add_argument("--replicas", type=int, default=500)
    common(sp)
    sp.set_defaults(func=_cmd_tightness)

    sp = sub.add_parser("probe", help="empirical distance exceedance over n")
    sp.add_argument("--kernel", required=True)
    sp.add_argument("--topology", required=True)
    sp.add_argument("--reference", required=True, help="recipe (markov|m1|j2|m2) or function file")
    sp.add_argument("--n", type=_int_list, default=[8, 16, 32])
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--replicas", type=int, default=100)
    common(sp)
    sp.set_defaults(func=_cmd_probe)

    sp = sub.add_parser("counterexamples", help="family distance/functional tables")
    sp.add_argument("--n-min", type=int, default=4)
    sp.add_argument("--n-max", type=int, default=64)
    common(sp)
    sp.set_defaults(func=_cmd_counterexamples)

    sp = sub.add_parser("inequality-sweep", help="oscillation inequality verification")
    sp.add_argument("--functions", type=int, default=200)
    sp.add_argument("--max-jumps", type=int, default=20)
    sp.add_argument("--dims", type=_int_list, default=[1, 2])
    sp.add_argument("--deltas", type=_float_list, default=[0.01, 0.05, 0.1, 0.25, 0.5])
    common(sp)
    sp.set_defaults(func=_cmd_sweep)

    sp = sub.add_parser("tightness-suite", help="trend tables for the builtin kernels")
    sp.add_argument("--n", type=_int_list, default=[16, 64])
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--R", type=float, default=2.0)
    sp.add_argument("--h", type=_float_list, default=[0.2, 0.1, 0.05])
    sp.add_argument("--replicas", type=int, default=300)
    common(sp)
    sp.set_defaults(func=_cmd_tightness_suite)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
