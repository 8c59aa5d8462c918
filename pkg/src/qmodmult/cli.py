"""Command-line front end: synthesize, verify, schedule and sweep.

`gen` writes one circuit, `verify` runs the simulation harness, and
`sweep` reproduces the resource-analysis datasets (one averaged row per
design/backend/model/width, eight random moduli per width by default).
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import random
import sys

from .adders import AdderBackend, BackendKind
from .angles import NO_TRUNCATION, TruncationPolicy, default_truncation
from .circuit import from_json, from_text, to_json, to_text
from .numtheory import sample_modulus, sample_multiplicand
from .schedule import cost_model, report, schedule
from .synth import Design, MultiplierSpec, synthesize
from .verify import VerifyPlan, verify

ALL_DESIGNS = [d.value for d in Design]
ALL_BACKENDS = [b.value for b in BackendKind]
ALL_MODELS = ["equal_latency", "fault_tolerant"]


def _spec_from_args(args, rng: random.Random) -> MultiplierSpec:
    n_mod = args.N if args.N else sample_modulus(args.n, rng)
    x = args.X if args.X else sample_multiplicand(n_mod, rng,
                                                  coprime=not args.out_of_place)
    policy = NO_TRUNCATION
    if args.truncate == "default":
        policy = default_truncation(args.n)
    elif args.truncate not in (None, "none"):
        policy = TruncationPolicy(int(args.truncate))
    return MultiplierSpec(
        design=Design(args.design),
        backend=AdderBackend(BackendKind(args.backend), policy),
        n=args.n, N=n_mod, X=x,
        in_place=not args.out_of_place,
        controlled=args.controlled,
        quantum_quantum=args.quantum_quantum,
    )


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--design", choices=ALL_DESIGNS, default="montgomery")
    p.add_argument("--backend", choices=ALL_BACKENDS, default="prefix_ripple")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--N", type=int, default=None, help="modulus (sampled if absent)")
    p.add_argument("--X", type=int, default=None, help="multiplicand (sampled if absent)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-of-place", action="store_true")
    p.add_argument("--controlled", action="store_true")
    p.add_argument("--quantum-quantum", action="store_true")
    p.add_argument("--truncate", default="none",
                   help="'none', 'default' (ceil(log2 n)+2), or a threshold k")


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    spec = _spec_from_args(args, rng)
    c = synthesize(spec)
    text = to_json(c) if args.format == "json" else to_text(c)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    if args.circuit:
        with open(args.circuit) as f:
            text = f.read()
        c = from_json(text) if text.lstrip().startswith("{") else from_text(text)
        meta = c.meta
        spec = MultiplierSpec(
            design=Design(meta["design"]),
            backend=AdderBackend(BackendKind(meta["backend"])),
            n=meta["n"], N=meta["N"], X=meta["X"],
            in_place=meta.get("in_place", False),
            controlled=meta.get("controlled", False),
            quantum_quantum=meta.get("quantum_quantum", False),
        )
    else:
        rng = random.Random(args.seed)
        spec = _spec_from_args(args, rng)
        c = None
    plan = VerifyPlan(spec, exhaustive=args.exhaustive, count=args.random,
                      seed=args.seed, probes=args.probes)
    result = verify(plan,c)
    out = result.to_json()
    if args.out:
        with open(args.out, "w") as f:
            f.write(out)
    else:
        print(out)
    return 0 if result.passed else 1


def _log_spaced(nmin: int, nmax: int) -> list[int]:
    ns = []
    v = nmin
    while v <= nmax:
        ns.append(v)
        v *= 2
    return ns


def _sweep_jobs(args):
    ns = [int(x) for x in args.n_list.split(",")] if args.n_list else \
        _log_spaced(args.nmin, args.nmax)
    designs = args.designs.split(",") if args.designs else ALL_DESIGNS
    backends = args.backends.split(",") if args.backends else ALL_BACKENDS
    models = args.models.split(",") if args.models else ALL_MODELS
    for n in ns:
        for d in designs:
            for b in backends:
                for s in range(args.samples):
                    yield n, d, b, models, s


def _run_sweep_job(job, args):
    n, d, b, models, sample = job
    seed = (args.seed * 1_000_003 + hash((n, d, b, sample))) % (1 << 30)
    rng = random.Random(seed)
    n_mod = sample_modulus(n, rng)
    x = sample_multiplicand(n_mod, rng, coprime=True)
    policy = default_truncation(n) if args.truncate == "default" else NO_TRUNCATION
    spec = MultiplierSpec(Design(d), AdderBackend(BackendKind(b), policy),
                          n, n_mod, x, in_place=True, controlled=True)
    try:
        c = synthesize(spec)
    except Exception as e:  # record the failure, keep sweeping
        return {"design": d, "backend": b, "n": n, "sample": sample,
                "error": str(e)}
    rows = []
    verified = ""
    if args.verify and n <= 32:
        plan = VerifyPlan(spec, exhaustive=n <= 6,
                          count=min(256, 1 << n), seed=seed, probes=False)
        verified = "pass" if verify(plan, c).passed else "FAIL"
    for mname in models:
        rep = report(c, cost_model(mname, n))
        row = rep.row()
        row.update({"sample": sample, "N": n_mod, "X": x, "verified": verified})
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    jobs = list(_sweep_jobs(args))
    rows = []
    failures = []
    for job in jobs:
        out = _run_sweep_job(job, args)
        if isinstance(out, dict):
            failures.append(out)
            continue
        rows.extend(out)
    # average samples per (design, backend, model, n); medians alongside
    import statistics
    keys = sorted({(r["design"], r["backend"], r["model"], r["n"]) for r in rows})
    numeric = [k for k in (rows[0] if rows else {})
               if isinstance(rows[0][k], (int, float)) and k not in ("n", "sample")]
    averaged = []
    for key in keys:
        grp = [r for r in rows if (r["design"], r["backend"], r["model"], r["n"]) == key]
        agg = {"design": key[0], "backend": key[1], "model": key[2], "n": key[3],
               "samples": len(grp)}
        for col in numeric:
            vals = [g[col] for g in grp]
            agg[col] = sum(vals) / len(vals)
            agg[f"{col}_median"] = statistics.median(vals)
        averaged.append(agg)
    payload = {"rows": averaged, "failures": failures,
               "config": {"seed": args.seed, "samples": args.samples}}
    if args.format == "json":
        text = json.dumps(payload, indent=1)
        if args.out:
            open(args.out, "w").write(text)
        else:
            print(text)
    else:
        cols: list[str] = []
        for r in averaged:
            for k in r:
                if k not in cols:
                    cols.append(k)
        out = open(args.out, "w", newline="") if args.out else sys.stdout
        w = csv.DictWriter(out, fieldnames=cols, restval="")
        w.writeheader()
        for r in averaged:
            w.writerow(r)
        if args.out:
            out.close()
    return 0 if not failures else 2


def _apply_config(args, parser) -> None:
    if not getattr(args, "config", None):
        return
    cp = configparser.ConfigParser()
    with open(args.config) as f:
        cp.read_string("[sweep]\n" + f.read())
    for key, value in cp.items("sweep"):
        key = key.replace("-", "_")
        if hasattr(args, key) and parser.get_default(key) == getattr(args, key):
            default = parser.get_default(key)
            cast = type(default) if default is not None else str
            setattr(args, key, cast(value) if cast is not bool
                    else value.lower() in ("1", "true", "yes"))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qmodmult",
        description="Reversible modular-multiplier synthesis, scheduling and "
                    "exact verification")
    sub = parser.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="synthesize one circuit to a file")
    _add_spec_args(g)
    g.add_argument("--out", default=None)
    g.add_argument("--format", choices=["text", "json"], default="text")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="simulate a circuit against the oracles")
    _add_spec_args(v)
    v.add_argument("--circuit", default=None, help="circuit file to verify")
    v.add_argument("--exhaustive", action="store_true")
    v.add_argument("--random", type=int, default=256)
    v.add_argument("--probes", action="store_true")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="resource sweep over widths and designs")
    s.add_argument("--nmin", type=int, default=8)
    s.add_argument("--nmax", type=int, default=64)
    s.add_argument("--n-list", default=None, help="comma-separated widths")
    s.add_argument("--designs", default=None)
    s.add_argument("--backends", default=None)
    s.add_argument("--models", default=None)
    s.add_argument("--samples", type=int, default=8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--truncate", default="default")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--config", default=None, help="key = value file mirroring flags")
    s.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    if args.cmd == "sweep":
        _apply_config(args, parser)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
