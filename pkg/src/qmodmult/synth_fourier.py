"""Fourier-basis variants of the four multiplier designs.

The accumulator lives in the Fourier representation, so every addition
is a layer of (controlled) rotations and no adder workspace exists at
all.  Inverse transforms appear exactly where sign bits must be
extracted: 2m+1 full-register transforms for the division design, a
constant number for Montgomery and Barrett.  Rotation emission is
wave-ordered so the scheduler reproduces the published depths.
"""
from __future__ import annotations

from dataclasses import replace

from .adders import BackendKind
from .angles import dyadic
from .circuit import Circuit, CircuitError, new_circuit
from .fourier import angle_for, phi_mul_rotations, qft_gate_order
from .frame import Frame
from .numtheory import barrett_params, build_ctx, mod_inverse


def _wave_mac(frame: Frame, acc: list[int], y: list[int], addends: list[int],
              subtract: bool = False) -> None:
    w, n = len(acc), len(y)
    gates = [(k, j) for k in range(n) for j in range(w)]
    gates.sort(key=lambda kj: (kj[0] + kj[1], kj[0]))
    for k, j in gates:
        v = -addends[k] if subtract else addends[k]
        frame.rot(acc[j], angle_for(v, j), (y[k], False))


def _iqft(frame: Frame, qubits: list[int]) -> None:
    phi_mul_rotations(frame, qubits, 1, inverse=True)
    frame.note_transform(len(qubits), inverse=True)


def _qft(frame: Frame, qubits: list[int]) -> None:
    phi_mul_rotations(frame, qubits, 1)
    frame.note_transform(len(qubits), inverse=False)


def _ctl_phi_add(frame: Frame, qubits: list[int], value: int, ctl,
                 descending: bool = True) -> None:
    """Controlled Fourier add of a classical value (one CRY per qubit)."""
    order = reversed(range(len(qubits))) if descending else range(len(qubits))
    for j in order:
        frame.rot(qubits[j], angle_for(value, j), ctl)


def _phi_add(frame: Frame, qubits: list[int], value: int) -> None:
    for j in range(len(qubits)):
        frame.rot(qubits[j], angle_for(value, j))


def _emit_division_oop_f(frame: Frame, ctx, geom: dict) -> dict:
    n, m = ctx.n, ctx.m
    y, acc = geom["y"], list(geom["acc"])
    with frame.stage("multiplication"):
        _wave_mac(frame, acc, y, list(ctx.partials))
    frame.probe("after_mac", {"t": (acc, "fourier", False)})
    with frame.stage("reduction"):
        for k in reversed(range(m)):
            window = acc[:n + k + 1]
            _phi_add(frame, window, -(ctx.N << k))      # trial subtraction
            _iqft(frame, window)                        # extract the sign
            frame.x(acc[n + k])                         # sign -> true q_k
            _qft(frame, window[:-1])
            _ctl_phi_add(frame, window[:-1], ctx.N << k,
                         (acc[n + k], True))            # undo when q_k = 0
    frame.probe("after_reduce", {"r": (acc[:n], "fourier", False),
                                 "q": (acc[n:], "binary", False)})
    with frame.stage("uncomputation"):
        _iqft(frame, acc[:n])                           # output transform
        q = acc[n:]
        phi_mul_rotations(frame, q, ctx.N)              # q -> fourier(qN)
        frame.note_transform(m, inverse=False)
        gates = [(l, j) for l in range(m) for j in range(m)]
        gates.sort(key=lambda lj: (lj[0] + lj[1], lj[0]))
        for l, j in gates:                              # q += t mod 2^m
            frame.rot(q[j], angle_for(1 << l, j), (acc[l], False))
        _wave_mac(frame, q, y, [p % (1 << m) for p in ctx.partials],
                  subtract=True)
    return {"product": acc[:n], "acc": acc}


def _emit_montgomery_oop_f(frame: Frame, ctx, geom: dict) -> dict:
    n, m = ctx.n, ctx.m
    y, acc = geom["y"], list(geom["acc"])
    with frame.stage("multiplication"):
        # The multiply spans the estimate's MSB ancilla too: the whole
        # (n+m+1)-qubit register is one Fourier state.
        _wave_mac(frame, acc, y, list(ctx.partials))
    frame.probe("after_mac", {"t": (acc[:n + m], "fourier", False)})
    with frame.stage("reduction"):
        for k in range(m):  # estimation: LSB-controlled truncating subtractions
            for j in range(k + 1, n + m + 1):
                frame.rot(acc[j], dyadic(-ctx.N, j - k), (acc[k], False))
        _iqft(frame, acc[m:])  # merged with the estimation rotations
        frame.probe("after_estimate", {"est": (acc[m:], "binary", True),
                                       "u": (acc[:m], "binary", False)})
        _qft(frame, acc[m:n + m])
        _ctl_phi_add(frame, acc[m:n + m], ctx.N, (acc[n + m], False))
        # The result's LSB is a valid binary control in the Fourier basis
        # (its angle is 0 or pi), so the sign fix-up is a single CNOT.
        frame.cx(acc[m], acc[n + m])
    utilde = acc[:m] + [acc[n + m]]
    frame.probe("after_redc", {"p": (acc[m:n + m], "fourier", False),
                               "utilde": (utilde, "binary", False)})
    with frame.stage("uncomputation"):
        _iqft(frame, acc[m:n + m])                      # output transform
        phi_mul_rotations(frame, utilde, 1)             # utilde -> fourier
        frame.note_transform(m + 1, inverse=False)
        _wave_mac(frame, utilde, y, list(ctx.uncompute_addends), subtract=True)
    return {"product": acc[m:n + m], "acc": acc}


def _emit_baseline_oop_f(frame: Frame, ctx, geom: dict) -> dict:
    n = ctx.n
    y, t, flag = geom["y"], list(geom["t"]), geom["flag"]
    with frame.stage("multiplication"):
        for k in range(n):
            xk = ctx.partials[k]
            _ctl_phi_add(frame, t, xk, (y[k], False))
            _phi_add(frame, t, -ctx.N)
            _iqft(frame, t)
            frame.cx(t[n], flag)
            _qft(frame, t)
            _ctl_phi_add(frame, t, ctx.N, (flag, False))
            _ctl_phi_add(frame, t, -xk, (y[k], False))
            _iqft(frame, t)
            frame.cx(t[n], flag, neg=True)
            _qft(frame, t)
            _ctl_phi_add(frame, t, xk, (y[k], False))
    with frame.stage("reduction"):
        _iqft(frame, t)
    frame.probe("after_mac", {"p": (t[:n], "binary", False)})
    return {"product": t[:n], "t": t, "flag": flag}


def _emit_barrett_oop_f(frame: Frame, ctx, geom: dict) -> dict:
    n = ctx.n
    bp = barrett_params(ctx.N)
    y, s = geom["y"], list(geom["s"])
    a, q, adj = geom["a"], geom["q"], geom["adj"]
    approx = [bp.approx_partial(p) for p in ctx.partials]
    with frame.stage("multiplication"):
        _wave_mac(frame, s, y, list(ctx.partials))
        amac_start = frame.mark()
        _wave_mac(frame, a, y, approx)
        _iqft(frame, a)
        amac_end = frame.mark()
    frame.probe("after_mac", {"t": (s, "fourier", False),
                              "approx": (a, "binary", False)})
    with frame.stage("reduction"):
        qmac_start = frame.mark()
        gates = [(l, j) for l in range(bp.qreg_width) for j in range(bp.qreg_width)]
        gates.sort(key=lambda lj: (lj[0] + lj[1], lj[0]))
        for l, j in gates:
            frame.rot(q[j], angle_for(bp.qhat_addend(l), j), (a[l], False))
        _iqft(frame, q)
        qmac_end = frame.mark()
        frame.probe("after_qhat", {"qfix": (q, "binary", False)})
        qint = q[bp.frac_bits:]
        for i, qb in enumerate(qint):                   # S -= q~ N
            _ctl_phi_add(frame, s, -(ctx.N << i), (qb, False))
        _phi_add(frame, s, -ctx.N)                      # compare S >= N
        _iqft(frame, s)
        frame.cx(s[-1], adj, neg=True)                  # adj = [S >= N]
        _qft(frame, s)
        _ctl_phi_add(frame, s, ctx.N, (adj, True))      # undo when adj = 0
        frame.probe("after_reduce", {"p": (s, "fourier", False),
                                     "adj": ([adj], "binary", False)})
        for i, qb in enumerate(qint):                   # S += q~ N
            _ctl_phi_add(frame, s, ctx.N << i, (qb, False))
        # MSB-window comparison against the approximate product clears adj.
        for l in range(bp.qreg_width):
            for j in range(bp.n_t + l, len(s)):
                frame.rot(s[j], dyadic(-(1 << (bp.n_t + l)), j), (a[l], False))
        _iqft(frame, s)
        frame.cx(s[-1], adj)
        _qft(frame, s)
        for l in range(bp.qreg_width):
            for j in range(bp.n_t + l, len(s)):
                frame.rot(s[j], dyadic(1 << (bp.n_t + l), j), (a[l], False))
        frame.probe("adj_cleared", {"adj": ([adj], "binary", False)})
        for i, qb in enumerate(qint):                   # S -= q~ N
            _ctl_phi_add(frame, s, -(ctx.N << i), (qb, False))
    with frame.stage("uncomputation"):
        _iqft(frame, s)                                 # output transform
        frame.append_reversed(qmac_start, qmac_end)     # clear q~
        frame.append_reversed(amac_start, amac_end)     # clear the approx product
    return {"product": s[:n], "s": s, "a": a, "q": q, "adj": adj}


_EMITTERS_F = {
    "baseline": _emit_baseline_oop_f,
    "division": _emit_division_oop_f,
    "montgomery": _emit_montgomery_oop_f,
    "barrett": _emit_barrett_oop_f,
}


def _layout_f(spec) -> list[tuple]:
    n, m = spec.n, spec.m
    d = spec.design.value
    if d == "division":
        return [("y", n, "input"), ("acc", n + m, "work")]
    if d == "montgomery":
        return [("y", n, "input"), ("acc", n + m + 1, "work")]
    if d == "baseline":
        return [("y", n, "input"), ("t", n + 1, "work"), ("flag", 1, "flag")]
    bp = barrett_params(spec.N)
    return [("y", n, "input"), ("s", n + bp.m_b, "work"),
            ("a", bp.qreg_width, "work"), ("q", bp.qreg_width, "work"),
            ("adj", 1, "flag")]


def _initial_geom_f(c: Circuit) -> dict:
    geom = {}
    for r in c.registers:
        if r.name == "ctl":
            continue
        geom[r.name] = list(r.qubits) if r.width > 1 else r.qubits[0]
    return geom


def _effective_x_f(spec, x: int) -> int:
    if spec.design.value == "montgomery" and not spec.montgomery_raw:
        return (x << spec.m) % spec.N
    return x


def _emit_oop_f(frame: Frame, spec, x_val: int, geom: dict) -> dict:
    ctx = build_ctx(spec.N, _effective_x_f(spec, x_val))
    return _EMITTERS_F[spec.design.value](frame, ctx, geom)


def synth_oop_fourier(spec) -> Circuit:
    from .synth import _meta
    c = new_circuit(_layout_f(spec))
    frame = Frame(c, policy=spec.backend.truncation)
    geom = _initial_geom_f(c)
    y = geom["y"]
    out = _emit_oop_f(frame, spec, spec.X, geom)
    frame.set_io({"y": (y, "binary")},
                 {"y": (y, "binary"), "product": (out["product"], "binary")})
    _meta(spec, c)
    return c


def _product_slot_f(spec, geom: dict) -> list[int]:
    d = spec.design.value
    if d == "division":
        return geom["acc"][:spec.n]
    if d == "montgomery":
        return geom["acc"][spec.m:spec.n + spec.m]
    if d == "baseline":
        return geom["t"][:spec.n]
    return geom["s"][:spec.n]


def _mirror_geom_f(spec, geom0: dict, out_fwd: dict, y: list[int]) -> dict:
    d = spec.design.value
    product = out_fwd["product"]
    g: dict = {"y": list(product)}
    if d == "division":
        g["acc"] = list(y) + out_fwd["acc"][spec.n:]
    elif d == "montgomery":
        acc = out_fwd["acc"]
        g["acc"] = acc[:spec.m] + list(y) + [acc[spec.n + spec.m]]
    elif d == "baseline":
        g["t"] = list(y) + [out_fwd["t"][spec.n]]
        g["flag"] = geom0["flag"]
    else:
        g["s"] = list(y) + out_fwd["s"][spec.n:]
        g["a"], g["q"], g["adj"] = geom0["a"], geom0["q"], geom0["adj"]
    return g


def _acc_register_f(spec, geom: dict) -> list[int]:
    d = spec.design.value
    if d in ("division", "montgomery"):
        return list(geom["acc"])
    if d == "baseline":
        return list(geom["t"])
    return list(geom["s"])


def synth_inplace_fourier(spec) -> Circuit:
    from .synth import _meta
    layout = _layout_f(spec)
    if spec.controlled:
        layout = [("ctl", 1, "input")] + layout
    c = new_circuit(layout)
    frame = Frame(c, policy=spec.backend.truncation)
    geom0 = _initial_geom_f(c)
    y = list(geom0["y"])
    ctl = c.register("ctl").qubits[0] if spec.controlled else None
    x_inv = mod_inverse(spec.X, spec.N)
    slot = _product_slot_f(spec, geom0)
    guard_qft = spec.controlled and spec.fourier_ctl_qft
    if spec.controlled:
        with frame.stage("wrappers"):
            frame.cswap_layer(ctl, y, slot, neg=True)
    fwd_geom = {k: (list(v) if isinstance(v, list) else v) for k, v in geom0.items()}
    if guard_qft:
        # Make the parked input a valid Fourier state of the accumulator.
        _qft(frame, _acc_register_f(spec, fwd_geom))
    out_fwd = _emit_oop_f(frame, spec, spec.X, fwd_geom)
    product = out_fwd["product"]
    if spec.controlled:
        with frame.stage("wrappers"):
            frame.cswap_layer(ctl, y, product, neg=False)
        rev_geom = {k: (list(v) if isinstance(v, list) else v)
                    for k, v in geom0.items()}
        mark = frame.mark()
        if guard_qft:
            _qft(frame, _acc_register_f(spec, rev_geom))
        _emit_oop_f(frame, spec, x_inv, rev_geom)
        frame.reverse_in_place(mark)
        with frame.stage("wrappers"):
            frame.cswap_layer(ctl, y, product, neg=True, descending=True)
        final_y = y
    else:
        rev_geom = _mirror_geom_f(spec, geom0, out_fwd, y)
        mark = frame.mark()
        _emit_oop_f(frame, spec, x_inv, rev_geom)
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
