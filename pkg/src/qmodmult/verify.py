"""Verification harness: run synthesized multipliers against the
big-integer oracles, check control semantics and ancilla hygiene, and
assert the stage-boundary identities recorded during synthesis."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .numtheory import barrett_params, barrett_qhat_oracle, \
    barrett_approx_product, build_ctx, redc_estimate, redc_oracle
from .simulate import ancilla_clean, simulate_batch
from .synth import Design, MultiplierSpec, synthesize


@dataclass(frozen=True)
class VerifyPlan:
    spec: MultiplierSpec
    exhaustive: bool = True
    count: int = 256
    seed: int = 0
    probes: bool = True

    def __post_init__(self):
        if self.exhaustive and self.spec.n > 6:
            raise ValueError("exhaustive verification only for n <= 6")


@dataclass
class VerifyResult:
    passed: bool
    cases: int
    counterexample: dict | None = None
    probe_trace: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"passed": self.passed, "cases": self.cases,
                           "counterexample": self.counterexample,
                           "probes": self.probe_trace}, indent=1)


def _inputs_for(plan: VerifyPlan) -> dict[str, np.ndarray]:
    spec = plan.spec
    rng = random.Random(plan.seed)
    if plan.exhaustive:
        ys = np.arange(spec.N, dtype=np.int64)
    else:
        ys = np.array([rng.randrange(spec.N) for _ in range(plan.count)],
                      dtype=np.int64)
    inputs = {}
    if spec.quantum_quantum:
        if plan.exhaustive:
            grid = [(x, y) for x in range(spec.N) for y in range(spec.N)]
            inputs["x"] = np.array([g[0] for g in grid], dtype=np.int64)
            inputs["y"] = np.array([g[1] for g in grid], dtype=np.int64)
        else:
            inputs["x"] = np.array([rng.randrange(spec.N) for _ in range(plan.count)],
                                   dtype=np.int64)
            inputs["y"] = ys
    elif spec.controlled:
        inputs["y"] = np.concatenate([ys, ys])
        inputs["ctl"] = np.concatenate([np.zeros(len(ys), np.int64),
                                        np.ones(len(ys), np.int64)])
    else:
        inputs["y"] = ys
    return inputs


def _expected(spec: MultiplierSpec, inputs: dict) -> np.ndarray:
    if spec.quantum_quantum:
        return (inputs["x"] * inputs["y"]) % spec.N
    prod = (spec.X * inputs["y"]) % spec.N
    if spec.montgomery_raw and spec.design == Design.MONTGOMERY:
        inv = pow(2, -spec.m, spec.N)
        prod = (spec.X * inputs["y"] * inv) % spec.N
    if spec.controlled:
        return np.where(inputs["ctl"] == 1, prod, inputs["y"])
    return prod


def _check_probe(name: str, spec: MultiplierSpec, values: dict,
                 y: np.ndarray) -> np.ndarray:
    """Expected stage-boundary identities (quantum-classical, out-of-place)."""
    ctx = build_ctx(spec.N, spec_effective_x(spec))
    n, m, N = ctx.n, ctx.m, ctx.N
    t = np.array([sum(ctx.partials[k] for k in range(n) if int(v) >> k & 1)
                  for v in y], dtype=np.int64)
    if name == "after_mac" and "t" in values:
        ok = values["t"] == t
        if "approx" in values:
            bp = barrett_params(N)
            at = np.array([barrett_approx_product(ctx, bp, int(v)) for v in y])
            ok = ok & (values["approx"] == at)
        return ok
    if name == "after_mac" and "p" in values:  # baseline accumulates reduced
        return values["p"] == (spec.X * y) % N
    if name == "after_reduce" and spec.design == Design.DIVISION:
        return (values["r"] == t % N) & (values["q"] == t // N)
    if name == "after_estimate":
        est = np.array([redc_estimate(int(tt), N, m)[0] for tt in t])
        u = np.array([redc_estimate(int(tt), N, m)[1] for tt in t])
        return (values["est"] == est) & (values["u"] == u)
    if name == "after_redc":
        s = np.array([redc_oracle(int(tt), N, m)[0] for tt in t])
        ut = np.array([(int(tt) * ctx.N_inv_2m1) % (1 << (m + 1)) for tt in t])
        return (values["p"] == s) & (values["utilde"] == ut)
    if name == "after_qhat":
        bp = barrett_params(N)
        want = []
        for v in y:
            at = barrett_approx_product(ctx, bp, int(v))
            acc = 0
            for j in range(bp.qreg_width):
                if at >> j & 1:
                    acc = (acc + bp.qhat_addend(j)) % (1 << bp.qreg_width)
            want.append(acc)
        return values["qfix"] == np.array(want, dtype=np.int64)
    if name == "after_reduce" and spec.design == Design.BARRETT:
        bp = barrett_params(N)
        qhat = np.array([barrett_qhat_oracle(int(tt), bp,
                                             barrett_approx_product(ctx, bp, int(v)))
                         for tt, v in zip(t, y)])
        adj = (t // N) - qhat
        return (values["p"] == t % N) & (values["adj"] == adj)
    if name == "adj_cleared":
        return values["adj"] == 0
    return np.ones(len(y), dtype=bool)


def spec_effective_x(spec: MultiplierSpec) -> int:
    if spec.design == Design.MONTGOMERY and not spec.montgomery_raw:
        return (spec.X << spec.m) % spec.N
    return spec.X


def verify(plan: VerifyPlan, circuit: Circuit | None = None) -> VerifyResult:
    spec = plan.spec
    c = circuit if circuit is not None else synthesize(spec)
    inputs = _inputs_for(plan)
    probe_points = []
    if plan.probes and not spec.in_place and not spec.quantum_quantum:
        probe_points = [p["index"] for p in c.meta.get("probes", [])]
    outputs, probes, st = simulate_batch(c, inputs, probe_points)
    want = _expected(spec, inputs)
    out_name = "y" if spec.in_place else "product"
    got = outputs[out_name]
    ok = got == want
    for name, arr in inputs.items():
        if name in outputs:
            keep = outputs[name] == arr if name != "y" or not spec.in_place else True
            ok = ok & keep
    data = set()
    for v in c.meta["outputs"].values():
        data.update(v["qubits"])
    ok = ok & ancilla_clean(c, st, data)
    trace = []
    if plan.probes and probe_points:
        for p in c.meta.get("probes", []):
            snap = probes.get(p["index"])
            if snap is None:
                continue
            values = {nm: snap.decode_register(r["qubits"], r["basis"], r["twos"])
                      for nm, r in p["regs"].items()}
            pok = _check_probe(p["name"], spec, values, inputs["y"])
            trace.append({"probe": p["name"], "passed": bool(np.all(pok))})
            ok = ok & pok
    if bool(np.all(ok)):
        return VerifyResult(True, len(ok), None, trace)
    bad = int(np.argmax(~ok))
    ce = {name: int(arr[bad]) for name, arr in inputs.items()}
    ce["got"] = int(got[bad])
    ce["want"] = int(want[bad])
    return VerifyResult(False, len(ok), ce, trace)
