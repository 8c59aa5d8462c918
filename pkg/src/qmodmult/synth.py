"""Modular-multiplier synthesis: baseline, division, Montgomery, Barrett.

Every design shares the three-stage shape: a multiply-accumulate of
classically reduced partial products, a reduction stage acting only on
the accumulator, and an uncomputation stage clearing the log-width
quotient-like garbage.  An in-place multiplier chains the forward
multiplier with the reversed multiplier for X^-1 mod N; the controlled
form adds three Fredkin layers (two negatively controlled) instead of
controlling individual gates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .adders import BackendKind, AdderBackend, inplace_add, oop_add, \
    select_undo_add, trial_reduce
from .angles import NO_TRUNCATION
from .circuit import Circuit, CircuitError, new_circuit
from .frame import Frame, Pool, lits_of
from .numtheory import BarrettParams, ModulusCtx, barrett_params, build_ctx, \
    ceil_log2, mod_inverse


class Design(str, Enum):
    BASELINE = "baseline"
    DIVISION = "division"
    MONTGOMERY = "montgomery"
    BARRETT = "barrett"


@dataclass(frozen=True)
class MultiplierSpec:
    design: Design
    backend: AdderBackend
    n: int
    N: int
    X: int
    in_place: bool = False
    controlled: bool = False
    quantum_quantum: bool = False
    montgomery_raw: bool = False
    # Controlled Fourier multipliers insert an explicit QFT/IQFT pair on the
    # accumulator so the control=0 branch (input parked in the accumulator by
    # the Fredkin layers) stays a product state end to end.  Disabling it
    # recovers the paper's elided form, whose control=0 branch is correct by
    # the swap-cancellation argument but transiently entangles.
    fourier_ctl_qft: bool = True

    def __post_init__(self):
        if self.n < 4:
            raise CircuitError("n < 4 rejected (log-width registers degenerate)")
        if self.N % 2 == 0 or not ((1 << (self.n - 1)) < self.N < (1 << self.n)):
            raise CircuitError("modulus must be odd with 2^(n-1) < N < 2^n")
        if not 0 < self.X < self.N:
            raise CircuitError("multiplicand must lie in (0, N)")
        if self.in_place and math.gcd(self.X, self.N) != 1:
            raise CircuitError("in-place multiplication needs gcd(X, N) = 1")
        if self.controlled and not self.in_place:
            raise CircuitError("the controlled wrapper applies to in-place multipliers")
        if self.quantum_quantum and (self.in_place or self.controlled):
            raise CircuitError("quantum-quantum multipliers are out-of-place only")
        if self.quantum_quantum and self.design == Design.BASELINE:
            raise CircuitError("quantum-quantum form is defined for the reduction designs")

    @property
    def m(self) -> int:
        return ceil_log2(self.n)


def _uncompute_backend(backend: BackendKind) -> BackendKind:
    """Log-width uncompute accumulators use prefix-ripple under lookahead."""
    return BackendKind.PREFIX_RIPPLE if backend == BackendKind.LOOKAHEAD else backend


# -- parallelized controlled MAC over a narrow register ---------------------

def _parallel_ctl_mac(frame: Frame, backend: BackendKind, y_bits: list[int],
                      target: list[int], addends: list[int]) -> list[int]:
    """target -= sum_k y_k * addends[k] (mod 2^w), grouped over work qubits.

    Independent accumulators gather partial sums in parallel (each group
    owns its own adder workspace so the scheduler can overlap them), a
    binary tree combines them, the root hits the target once, and the
    scaffold is reversed.  Returns the possibly-relabeled target.
    """
    w = len(target)
    n = len(y_bits)
    groups = min(n, max(1, (len(frame.pool) - w) // (2 * w)))
    if groups <= 1:
        for k in range(n):
            select_undo_add(frame, backend, y_bits[k], target,
                            addends[k] % (1 << w), subtract=True)
        return target
    accs = [frame.pool.take(w) for _ in range(groups)]
    local = [Pool(frame.pool.take(w)) for _ in range(groups)]
    parts: list[list[int]] = [[] for _ in range(groups)]
    for k in range(n):
        parts[k % groups].append(k)
    acc_mark = frame.mark()
    for i in range(max(len(p) for p in parts)):  # round-robin: groups overlap
        for g in range(groups):
            if i < len(parts[g]):
                k = parts[g][i]
                with frame.use_pool(local[g]):
                    select_undo_add(frame, backend, y_bits[k], accs[g],
                                    addends[k] % (1 << w))
    # Combine pairwise into fresh buffers (children stay intact, so the
    # whole scaffold reverses cleanly and no register changes identity).
    combine_mark = frame.mark()
    live = [accs[g] for g in range(groups)]
    borrowed: list[tuple[int, list[int]]] = []
    donor = 0  # each group's block donates at most one combine buffer
    while len(live) > 1:
        nxt = []
        for i in range(0, len(live) - 1, 2):
            fresh = local[donor].take(w)
            borrowed.append((donor, fresh))
            donor += 1
            oop_add(frame, backend, lits_of(live[i]), lits_of(live[i + 1]), fresh)
            nxt.append(fresh)
        if len(live) % 2:
            nxt.append(live[-1])
        live = nxt
    combine_end = frame.mark()
    target = inplace_add(frame, backend, target, lits_of(live[0]),
                         subtract=True)
    frame.append_reversed(combine_mark, combine_end)
    frame.append_reversed(acc_mark, combine_mark)
    for donor, fresh in reversed(borrowed):
        local[donor].give(fresh)
    for g in range(groups):
        frame.pool.give(local[g].snapshot())
        frame.pool.give(accs[g])
    return target


# -- out-of-place design emitters -------------------------------------------

def _emit_division_oop(frame: Frame, backend: BackendKind, ctx: ModulusCtx,
                       geom: dict) -> dict:
    n, m = ctx.n, ctx.m
    y, acc, h = geom["y"], list(geom["acc"]), geom["h"]
    with frame.stage("multiplication"):
        for k in range(n):
            select_undo_add(frame, backend, y[k], acc, ctx.partials[k])
            frame.tally("full_width_adders")
    frame.probe("after_mac", {"t": (acc, "binary", False)})
    with frame.stage("reduction"):
        for k in reversed(range(m)):
            trial_reduce(frame, backend, acc[:n + k + 1], ctx.N << k, h)
            frame.x(h)  # deposit the true quotient bit
            acc[n + k], h = h, acc[n + k]
            frame.tally("full_width_adders")
    frame.probe("after_reduce", {"r": (acc[:n], "binary", False),
                                 "q": (acc[n:], "binary", False)})
    ub = _uncompute_backend(backend)
    with frame.stage("uncomputation"):
        q = acc[n:]
        for k in reversed(range(m - 1)):  # q -> qN mod 2^m (in-place multiply)
            window = q[k + 1:]
            select_undo_add(frame, ub, q[k], window,
                            ((ctx.N - 1) // 2) % (1 << len(window)))
            frame.tally("log_width_adders")
        q = inplace_add(frame, ub, q, lits_of(acc[:m]))  # qN + (t mod N) = t
        frame.tally("log_width_adders")
        q = _parallel_ctl_mac(frame, ub, y, q,
                              [p % (1 << m) for p in ctx.partials])
        acc[n:] = q
    return {"product": acc[:n], "acc": acc, "h": h}


def _emit_montgomery_oop(frame: Frame, backend: BackendKind, ctx: ModulusCtx,
                         geom: dict) -> dict:
    n, m = ctx.n, ctx.m
    y, acc = geom["y"], list(geom["acc"])
    with frame.stage("multiplication"):
        for k in range(n):
            select_undo_add(frame, backend, y[k], acc[:n + m], ctx.partials[k])
            frame.tally("full_width_adders")
    frame.probe("after_mac", {"t": (acc[:n + m], "binary", False)})
    with frame.stage("reduction"):
        half = (ctx.N - 1) // 2
        for k in range(m):  # estimation: LSB-controlled truncating subtractions
            window = acc[k + 1:]
            select_undo_add(frame, backend, acc[k], window,
                            half % (1 << len(window)), subtract=True)
            frame.tally("full_width_adders")
        frame.probe("after_estimate", {"est": (acc[m:], "binary", True),
                                       "u": (acc[:m], "binary", False)})
        select_undo_add(frame, backend, acc[n + m], acc[m:n + m], ctx.N)
        frame.tally("full_width_adders")
        frame.cx(acc[m], acc[n + m])  # single-CNOT sign fix-up
    utilde = acc[:m] + [acc[n + m]]
    frame.probe("after_redc", {"p": (acc[m:n + m], "binary", False),
                               "utilde": (utilde, "binary", False)})
    with frame.stage("uncomputation"):
        utilde = _parallel_ctl_mac(frame, _uncompute_backend(backend), y,
                                   utilde, list(ctx.uncompute_addends))
        acc[:m] = utilde[:m]
        acc[n + m] = utilde[m]
    return {"product": acc[m:n + m], "acc": acc}


def _modular_add(frame: Frame, backend: BackendKind, addend: int, n_mod: int,
                 t_reg: list[int], flag: int, ctl: int | None) -> None:
    """t := (t + g*addend) mod N on a reduced register: three in-place adders.

    Controlled add, trial reduction producing the comparison flag, then a
    complement-probe whose sign clears the flag on both control branches.
    """
    w = len(t_reg)
    if ctl is None:
        t_reg[:] = inplace_add(frame, backend, list(t_reg), addend)
    else:
        select_undo_add(frame, backend, ctl, t_reg, addend)
    frame.tally("full_width_adders")
    trial_reduce(frame, backend, t_reg, n_mod, flag)
    frame.tally("full_width_adders")
    out = frame.pool.take(w)
    start = frame.mark()
    oop_add(frame, backend, [(q, True) for q in t_reg], addend, out)
    end = frame.mark()
    frame.cx(out[w - 1], flag)            # flag ^= [t >= g*addend] (g = 1)
    if ctl is not None:
        frame.ccx(ctl, out[w - 1], flag, True, True)  # g = 0 branch: force 1
    frame.append_reversed(start, end)
    frame.pool.give(out)
    frame.tally("full_width_adders")


def _emit_baseline_oop(frame: Frame, backend: BackendKind, ctx: ModulusCtx,
                       geom: dict) -> dict:
    y, t_reg, flag = geom["y"], list(geom["t"]), geom["flag"]
    with frame.stage("multiplication"):
        for k in range(ctx.n):
            _modular_add(frame, backend, ctx.partials[k], ctx.N, t_reg, flag,
                         ctl=y[k])
    frame.probe("after_mac", {"p": (t_reg[:ctx.n], "binary", False)})
    return {"product": t_reg[:ctx.n], "t": t_reg, "flag": flag}


def _emit_barrett_oop(frame: Frame, backend: BackendKind, ctx: ModulusCtx,
                      geom: dict) -> dict:
    n = ctx.n
    bp = barrett_params(ctx.N)
    y, s = geom["y"], list(geom["s"])
    a, q, adj = geom["a"], geom["q"], geom["adj"]
    ub = _uncompute_backend(backend)
    approx = [bp.approx_partial(p) for p in ctx.partials]
    a_ranges = []
    with frame.stage("multiplication"):
        for k in range(n):
            select_undo_add(frame, backend, y[k], s, ctx.partials[k])
            frame.tally("full_width_adders")
            a_start = frame.mark()
            select_undo_add(frame, ub, y[k], a, approx[k])
            frame.tally("log_width_adders")
            a_ranges.append((a_start, frame.mark()))
    frame.probe("after_mac", {"t": (s, "binary", False),
                              "approx": (a, "binary", False)})
    with frame.stage("reduction"):
        qmac_start = frame.mark()
        for j in range(bp.qreg_width):  # fixed-point quotient-estimate MAC
            select_undo_add(frame, ub, a[j], q, bp.qhat_addend(j))
            frame.tally("log_width_adders")
        qmac_end = frame.mark()
        frame.probe("after_qhat", {"qfix": (q, "binary", False)})
        qint = q[bp.frac_bits:]
        for i, qb in enumerate(qint):  # S -= q~ N
            select_undo_add(frame, backend, qb, s, ctx.N << i, subtract=True)
            frame.tally("full_width_adders")
        trial_reduce(frame, backend, s[:n + 1], ctx.N, adj)
        frame.x(adj)  # adj = 1 iff the extra reduction fired
        frame.tally("full_width_adders")
        frame.probe("after_reduce", {"p": (s[:n], "binary", False),
                                     "adj": ([adj], "binary", False)})
        for i, qb in enumerate(qint):  # S += q~ N   (S = Xy - adj*N)
            select_undo_add(frame, backend, qb, s, ctx.N << i)
            frame.tally("full_width_adders")
        # MSB-window comparison against the approximate product clears adj.
        window = s[bp.n_t:]
        out = frame.pool.take(len(window))
        start = frame.mark()
        oop_add(frame, ub, lits_of(window), lits_of(a), out, subtract=True)
        end = frame.mark()
        frame.cx(out[-1], adj)
        frame.append_reversed(start, end)
        frame.pool.give(out)
        frame.tally("log_width_adders")
        frame.probe("adj_cleared", {"adj": ([adj], "binary", False)})
        for i, qb in enumerate(qint):  # S -= q~ N   (back to Xy mod N)
            select_undo_add(frame, backend, qb, s, ctx.N << i, subtract=True)
            frame.tally("full_width_adders")
    with frame.stage("uncomputation"):
        frame.append_reversed(qmac_start, qmac_end)  # clear q~
        for st, en in reversed(a_ranges):            # clear the approx product
            frame.append_reversed(st, en)
    return {"product": s[:n], "s": s, "a": a, "q": q, "adj": adj}


_EMITTERS = {
    Design.BASELINE: _emit_baseline_oop,
    Design.DIVISION: _emit_division_oop,
    Design.MONTGOMERY: _emit_montgomery_oop,
    Design.BARRETT: _emit_barrett_oop,
}


# -- layouts and circuit assembly --------------------------------------------

def _pool_size(kind: BackendKind, w_max: int) -> int:
    # Lookahead adds the carry tree with its fan-out copies; the same空
    # space doubles as the uncompute stage's parallel accumulators.
    return 3 * w_max if kind == BackendKind.LOOKAHEAD else w_max


def _effective_x(spec: MultiplierSpec, x: int | None = None) -> int:
    x = spec.X if x is None else x
    if spec.design == Design.MONTGOMERY and not spec.montgomery_raw:
        return (x << spec.m) % spec.N
    return x


def _layout(spec: MultiplierSpec) -> list[tuple]:
    n, m = spec.n, spec.m
    kind = spec.backend.kind
    if spec.design == Design.DIVISION:
        w = n + m
        return [("y", n, "input"), ("acc", w, "work"), ("h", 1, "flag"),
                ("pool", _pool_size(kind, w), "work")]
    if spec.design == Design.MONTGOMERY:
        w = n + m + 1
        return [("y", n, "input"), ("acc", w, "work"),
                ("pool", _pool_size(kind, w), "work")]
    if spec.design == Design.BASELINE:
        w = n + 1
        return [("y", n, "input"), ("t", w, "work"), ("flag", 1, "flag"),
                ("pool", _pool_size(kind, w), "work")]
    bp = barrett_params(spec.N)
    w = n + bp.m_b
    return [("y", n, "input"), ("s", w, "work"), ("a", bp.qreg_width, "work"),
            ("q", bp.qreg_width, "work"), ("adj", 1, "flag"),
            ("pool", _pool_size(kind, w), "work")]


def _initial_geom(c: Circuit) -> dict:
    geom = {}
    for r in c.registers:
        if r.name in ("pool", "ctl"):
            continue
        geom[r.name] = list(r.qubits) if r.width > 1 else r.qubits[0]
    return geom


def _emit_oop(frame: Frame, spec: MultiplierSpec, x_val: int, geom: dict) -> dict:
    ctx = build_ctx(spec.N, _effective_x(spec, x_val))
    return _EMITTERS[spec.design](frame, spec.backend.kind, ctx, geom)


def _meta(spec: MultiplierSpec, c: Circuit) -> None:
    c.meta.update({
        "design": spec.design.value,
        "backend": spec.backend.kind.value,
        "n": spec.n, "N": spec.N, "X": spec.X,
        "in_place": spec.in_place, "controlled": spec.controlled,
        "quantum_quantum": spec.quantum_quantum,
        "basis": "fourier" if spec.backend.kind == BackendKind.FOURIER else "binary",
    })
    if spec.design == Design.BARRETT:
        bp = barrett_params(spec.N)
        algo = [r.name for r in c.registers if r.name not in ("pool",)]
        c.meta["algorithm_qubits"] = sum(c.register(nm).width for nm in algo
                                         if nm != "ctl")
        c.meta["barrett_params"] = {"n_k": bp.n_k, "nu_bits": bp.nu_bits,
                                    "m_b": bp.m_b, "frac_bits": bp.frac_bits}


def synth_oop(spec: MultiplierSpec) -> Circuit:
    """Out-of-place multiplier |y>|0...> -> |y>|Xy mod N>|0...>."""
    if spec.backend.kind == BackendKind.FOURIER:
        from .synth_fourier import synth_oop_fourier
        return synth_oop_fourier(spec)
    c = new_circuit(_layout(spec))
    frame = Frame(c, pool_qubits=c.register("pool").qubits)
    geom = _initial_geom(c)
    y = geom["y"]
    out = _emit_oop(frame, spec, spec.X, geom)
    frame.set_io({"y": (y, "binary")},
                 {"y": (y, "binary"), "product": (out["product"], "binary")})
    _meta(spec, c)
    return c


def _product_slot(spec: MultiplierSpec, geom: dict) -> list[int]:
    if spec.design == Design.DIVISION:
        return geom["acc"][:spec.n]
    if spec.design == Design.MONTGOMERY:
        return geom["acc"][spec.m:spec.n + spec.m]
    if spec.design == Design.BASELINE:
        return geom["t"][:spec.n]
    return geom["s"][:spec.n]


def _reconcile_pool(frame: Frame, c: Circuit, rev_geom: dict, y: list[int],
                    ctl: int | None) -> None:
    """Reset the pool to the complement of the reversed-half geometry.

    The forward half relabels garbage registers through the pool, so
    binding identities churn; every qubit outside the live geometry is
    clean here and becomes work space (deterministic order).
    """
    used = set(y)
    if ctl is not None:
        used.add(ctl)
    for v in rev_geom.values():
        used.update(v if isinstance(v, list) else [v])
    frame.pool.restore([q for q in range(c.qubit_count) if q not in used])


def _mirror_geom(spec: MultiplierSpec, geom0: dict, out_fwd: dict,
                 y: list[int]) -> dict:
    """Reversed-half geometry for the uncontrolled in-place multiplier."""
    product = out_fwd["product"]
    g: dict = {"y": list(product)}
    if spec.design == Design.DIVISION:
        g["acc"] = list(y) + out_fwd["acc"][spec.n:]
        g["h"] = out_fwd["h"]
    elif spec.design == Design.MONTGOMERY:
        acc = out_fwd["acc"]
        g["acc"] = acc[:spec.m] + list(y) + [acc[spec.n + spec.m]]
    elif spec.design == Design.BASELINE:
        g["t"] = list(y) + [out_fwd["t"][spec.n]]
        g["flag"] = geom0["flag"]
    else:
        g["s"] = list(y) + out_fwd["s"][spec.n:]
        g["a"], g["q"], g["adj"] = geom0["a"], geom0["q"], geom0["adj"]
    return g


def synth_inplace(spec: MultiplierSpec) -> Circuit:
    """In-place (optionally controlled) multiplier |y> -> |Xy mod N>."""
    if spec.backend.kind == BackendKind.FOURIER:
        from .synth_fourier import synth_inplace_fourier
        return synth_inplace_fourier(spec)
    layout = _layout(spec)
    if spec.controlled:
        layout = [("ctl", 1, "input")] + layout
    c = new_circuit(layout)
    frame = Frame(c, pool_qubits=c.register("pool").qubits)
    geom0 = _initial_geom(c)
    y = list(geom0["y"])
    ctl = c.register("ctl").qubits[0] if spec.controlled else None
    x_inv = mod_inverse(spec.X, spec.N)
    slot = _product_slot(spec, geom0)
    if spec.controlled:
        with frame.stage("wrappers"):
            frame.cswap_layer(ctl, y, slot, neg=True)  # park y in the cache
    fwd_geom = {k: (list(v) if isinstance(v, list) else v) for k, v in geom0.items()}
    out_fwd = _emit_oop(frame, spec, spec.X, fwd_geom)
    product = out_fwd["product"]
    assert product == slot, "product must stay at its initial slot"
    if spec.controlled:
        with frame.stage("wrappers"):
            frame.cswap_layer(ctl, y, product, neg=False)
        rev_geom = {k: (list(v) if isinstance(v, list) else v)
                    for k, v in geom0.items()}
        _reconcile_pool(frame, c, rev_geom, y, ctl)
        mark = frame.mark()
        _emit_oop(frame, spec, x_inv, rev_geom)
        frame.reverse_in_place(mark)
        with frame.stage("wrappers"):
            frame.cswap_layer(ctl, y, product, neg=True, descending=True)
        final_y = y
    else:
        rev_geom = _mirror_geom(spec, geom0, out_fwd, y)
        _reconcile_pool(frame, c, rev_geom, y, ctl)
        mark = frame.mark()
        _emit_oop(frame, spec, x_inv, rev_geom)
        frame.reverse_in_place(mark)
        final_y = product
    inputs = {"y": (y, "binary")}
    outputs = {"y": (final_y, "binary")}
    if spec.controlled:
        inputs["ctl"] = ([ctl], "binary")
        outputs["ctl"] = ([ctl], "binary")
    frame.set_io(inputs, outputs)
    _meta(spec, c)
    return c


# -- quantum-quantum out-of-place multipliers --------------------------------

def _shift_reduce(frame: Frame, backend: BackendKind, xcur: list[int],
                  n_mod: int) -> list[int]:
    """x := 2x mod N via relabel-shift and one trial reduction (x < N).

    Callers that replay shift ranges in reverse must run this under a
    dedicated pool (use_pool) so nothing else claims its qubits.
    """
    fresh = frame.pool.take(1)
    reg = fresh + list(xcur)  # doubling by relabeling; fresh zero at the LSB
    hb = frame.pool.take(1)[0]
    trial_reduce(frame, backend, reg, n_mod, hb)
    frame.cx(reg[0], hb, neg=True)  # output odd iff reduced: clears the flag
    frame.pool.give([hb])
    top = reg.pop()  # reduced value < N: the headroom bit is clean again
    frame.pool.give([top])
    return reg


def synth_shift_reduce(n: int, n_mod: int,
                       backend: BackendKind = BackendKind.RIPPLE) -> Circuit:
    """Standalone shift-and-reduce |v> -> |2v mod N| for v < N."""
    c = new_circuit([("v", n, "input"), ("pool", 2 * n + 4, "work")])
    frame = Frame(c, pool_qubits=c.register("pool").qubits)
    v = list(c.register("v").qubits)
    v2 = _shift_reduce(frame, backend, v, n_mod)
    frame.set_io({"v": (v, "binary")}, {"v": (v2, "binary")})
    c.meta.update({"n": n, "N": n_mod})
    return c


def _qq_reverse_mac(frame: Frame, backend: BackendKind, y: list[int],
                    target: list[int], x0: list[int], width: int,
                    shift_ranges: list[tuple[int, int, list[int]]]) -> None:
    """Clear target -= sum y_k (2^k x mod N) with interleaved un-shifts."""
    bindings = [list(x0)] + [list(b) for _, _, b in shift_ranges]
    for k in reversed(range(len(y))):
        cur = bindings[k]
        select_undo_add(frame, backend, y[k], target, lits_of(cur[:width]),
                        subtract=True)
        if k > 0:
            st, en, _ = shift_ranges[k - 1]
            frame.append_reversed(st, en)


def synth_qq_oop(spec: MultiplierSpec) -> Circuit:
    """|0>|x>|y> -> |xy mod N>|x>|y> with shift-and-reduce partials (x < N)."""
    if spec.backend.kind == BackendKind.FOURIER:
        raise CircuitError("quantum-quantum synthesis is binary-basis only")
    n, m = spec.n, spec.m
    kind = spec.backend.kind
    ub = _uncompute_backend(kind)
    bp = barrett_params(spec.N) if spec.design == Design.BARRETT else None
    w = {Design.DIVISION: n + m, Design.MONTGOMERY: n + m + 1,
         Design.BARRETT: (n + bp.m_b) if bp else 0}[spec.design]
    layout = [("x", n, "input"), ("y", n, "input"), ("acc", w, "work")]
    if spec.design == Design.DIVISION:
        layout.append(("h", 1, "flag"))
    if spec.design == Design.BARRETT:
        layout += [("a", bp.qreg_width, "work"), ("q", bp.qreg_width, "work"),
                   ("adj", 1, "flag")]
    layout.append(("pool", _pool_size(kind, w) + n + 7, "work"))
    c = new_circuit(layout)
    frame = Frame(c, pool_qubits=c.register("pool").qubits)
    x = list(c.register("x").qubits)
    y = list(c.register("y").qubits)
    acc = list(c.register("acc").qubits)

    xcur = list(x)
    # Shifts run in a reserved pool: replayed un-shift ranges must only
    # touch qubits nothing else has claimed in the meantime.
    shift_pool = Pool(frame.pool.take(n + 3))
    pre_ranges: list[tuple[int, int]] = []
    shift_ranges: list[tuple[int, int, list[int]]] = []
    a_ranges: list[tuple[int, int]] = []
    a_reg = list(c.register("a").qubits) if bp else None
    if spec.design == Design.MONTGOMERY and not spec.montgomery_raw:
        # Pre-shift to x*2^m mod N so REDC returns the standard-representation
        # product (the quantum analogue of the classical X' precomputation).
        with frame.stage("multiplication"):
            for _ in range(m):
                st = frame.mark()
                with frame.use_pool(shift_pool):
                    xcur = _shift_reduce(frame, kind, xcur, spec.N)
                pre_ranges.append((st, frame.mark()))
    x_mac0 = list(xcur)
    with frame.stage("multiplication"):
        for k in range(n):
            if spec.design == Design.BARRETT:
                select_undo_add(frame, kind, y[k], acc, lits_of(xcur))
                st = frame.mark()
                select_undo_add(frame, ub, y[k], a_reg, lits_of(xcur[bp.n_t:]))
                a_ranges.append((st, frame.mark()))
            elif spec.design == Design.MONTGOMERY:
                select_undo_add(frame, kind, y[k], acc[:n + m], lits_of(xcur))
            else:
                select_undo_add(frame, kind, y[k], acc, lits_of(xcur))
            if k < n - 1:
                st = frame.mark()
                with frame.use_pool(shift_pool):
                    xcur = _shift_reduce(frame, kind, xcur, spec.N)
                shift_ranges.append((st, frame.mark(), list(xcur)))
    if spec.design == Design.DIVISION:
        h = c.register("h").qubits[0]
        with frame.stage("reduction"):
            for k in reversed(range(m)):
                trial_reduce(frame, kind, acc[:n + k + 1], spec.N << k, h)
                frame.x(h)
                acc[n + k], h = h, acc[n + k]
        with frame.stage("uncomputation"):
            q = acc[n:]
            for k in reversed(range(m - 1)):
                window = q[k + 1:]
                select_undo_add(frame, ub, q[k], window,
                                ((spec.N - 1) // 2) % (1 << len(window)))
            q = inplace_add(frame, ub, q, lits_of(acc[:m]))
            _qq_reverse_mac(frame, ub, y, q, x_mac0, m, shift_ranges)
            acc[n:] = q
        product = acc[:n]
    elif spec.design == Design.MONTGOMERY:
        half = (spec.N - 1) // 2
        with frame.stage("reduction"):
            for k in range(m):
                window = acc[k + 1:]
                select_undo_add(frame, kind, acc[k], window,
                                half % (1 << len(window)), subtract=True)
            select_undo_add(frame, kind, acc[n + m], acc[m:n + m], spec.N)
            frame.cx(acc[m], acc[n + m])
        utilde = acc[:m] + [acc[n + m]]
        with frame.stage("uncomputation"):
            for k in reversed(range(m)):  # utilde -> utilde*N mod 2^(m+1)
                window = utilde[k + 1:]
                select_undo_add(frame, ub, utilde[k], window,
                                ((spec.N - 1) // 2) % (1 << len(window)))
            _qq_reverse_mac(frame, ub, y, utilde, x_mac0, m + 1, shift_ranges)
            for st, en in reversed(pre_ranges):  # restore x from x*2^m mod N
                frame.append_reversed(st, en)
        product = acc[m:n + m]
    else:  # barrett
        q_reg = list(c.register("q").qubits)
        adj = c.register("adj").qubits[0]
        with frame.stage("reduction"):
            qmac_start = frame.mark()
            for j in range(bp.qreg_width):
                select_undo_add(frame, ub, a_reg[j], q_reg, bp.qhat_addend(j))
            qmac_end = frame.mark()
            qint = q_reg[bp.frac_bits:]
            for i, qb in enumerate(qint):
                select_undo_add(frame, kind, qb, acc, spec.N << i, subtract=True)
            trial_reduce(frame, kind, acc[:n + 1], spec.N, adj)
            frame.x(adj)
            for i, qb in enumerate(qint):
                select_undo_add(frame, kind, qb, acc, spec.N << i)
            window = acc[bp.n_t:]
            out = frame.pool.take(len(window))
            st = frame.mark()
            oop_add(frame, ub, lits_of(window), lits_of(a_reg), out, subtract=True)
            en = frame.mark()
            frame.cx(out[-1], adj)
            frame.append_reversed(st, en)
            frame.pool.give(out)
            for i, qb in enumerate(qint):
                select_undo_add(frame, kind, qb, acc, spec.N << i, subtract=True)
        with frame.stage("uncomputation"):
            frame.append_reversed(qmac_start, qmac_end)
            for idx in reversed(range(n)):
                st, en = a_ranges[idx]
                frame.append_reversed(st, en)
                if idx > 0:
                    sst, sen, _ = shift_ranges[idx - 1]
                    frame.append_reversed(sst, sen)
        product = acc[:n]
    frame.set_io({"x": (x, "binary"), "y": (y, "binary")},
                 {"x": (x, "binary"), "y": (y, "binary"),
                  "product": (product, "binary")})
    _meta(spec, c)
    return c


def synth_modular_adder(n: int, n_mod: int, addend: int,
                        backend: BackendKind = BackendKind.RIPPLE,
                        controlled: bool = True) -> Circuit:
    """Standalone controlled modular adder |t> -> |(t + g*addend) mod N>."""
    w = n + 1
    layout = [("t", w, "input"), ("flag", 1, "flag"),
              ("pool", _pool_size(backend, w), "work")]
    if controlled:
        layout = [("ctl", 1, "input")] + layout
    c = new_circuit(layout)
    frame = Frame(c, pool_qubits=c.register("pool").qubits)
    t = list(c.register("t").qubits)
    flag = c.register("flag").qubits[0]
    ctl = c.register("ctl").qubits[0] if controlled else None
    t_out = list(t)
    _modular_add(frame, backend, addend % n_mod, n_mod, t_out, flag, ctl)
    inputs = {"t": (t, "binary")}
    outputs = {"t": (t_out, "binary")}
    if controlled:
        inputs["ctl"] = ([ctl], "binary")
        outputs["ctl"] = ([ctl], "binary")
    frame.set_io(inputs, outputs)
    c.meta.update({"n": n, "N": n_mod, "addend": addend})
    return c


def synthesize(spec: MultiplierSpec) -> Circuit:
    if spec.quantum_quantum:
        return synth_qq_oop(spec)
    if spec.in_place:
        return synth_inplace(spec)
    return synth_oop(spec)
