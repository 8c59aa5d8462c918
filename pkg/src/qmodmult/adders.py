"""Binary reversible adder library.

Three families over a shared literal-folding core:

* ripple: linear carry chain (the majority-ripple family; the
  quantum-quantum in-place form is the Cuccaro MAJ/UMA construction).
* prefix_ripple: two-bit pair segments with materialized pair
  propagates, so the carry ripples one Toffoli per pair (depth ~ W/2
  out-of-place, ~ W in-place).
* lookahead: Brent-Kung carry tree (logarithmic depth), P nodes
  allocated on demand and uncomputed in place.

Out-of-place adders write carries into the zeroed target and convert
them into the sum, so they need no erase pass.  In-place addition is an
out-of-place add, a register relabel, and the reverse of the
out-of-place subtraction.  The select-undo wrapper adds a global
control through one Fredkin layer and a control-conditioned
two's-complement negation on the undo side.  Classical addend bits fold
into gate polarities, so gates conditioned on zero bits are dropped at
synthesis time.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .angles import TruncationPolicy, NO_TRUNCATION
from .circuit import CircuitError
from .frame import Frame, const_lits, lit_neg, lits_of


class BackendKind(str, Enum):
    RIPPLE = "ripple"
    PREFIX_RIPPLE = "prefix_ripple"
    LOOKAHEAD = "lookahead"
    FOURIER = "fourier"


@dataclass(frozen=True)
class AdderBackend:
    kind: BackendKind
    truncation: TruncationPolicy = NO_TRUNCATION


@dataclass(frozen=True)
class AddSpec:
    """One addition request: classical or quantum addend onto a target."""

    width: int
    addend: int | str  # classical constant, or name of the addend register
    target: str = "y"
    control: bool = False
    in_place: bool = True
    subtract: bool = False


def _pad(src_lits: list, width: int) -> list:
    if len(src_lits) > width:
        raise CircuitError("source wider than target")
    return list(src_lits) + [0] * (width - len(src_lits))


def _p_lit(x, a):
    """Literal for x XOR a; at most one side may be quantum."""
    if isinstance(x, tuple) and isinstance(a, tuple):
        raise CircuitError("p-literal needs one classical side")
    if isinstance(x, tuple):
        return (x[0], bool(x[1] ^ a))
    if isinstance(a, tuple):
        return (a[0], bool(a[1] ^ x))
    return x ^ a


# -- out-of-place builders -------------------------------------------------

def ripple_oop(frame: Frame, src_lits: list, addend, out: list[int]) -> None:
    """out (zeroed) <- src + addend mod 2^len(out), linear carry chain."""
    w = len(out)
    xs = _pad(src_lits, w)
    if isinstance(addend, int):
        a = const_lits(addend % (1 << w), w)
        p = [_p_lit(xs[i], a[i]) for i in range(w)]
        for i in range(w - 1):
            frame.mcx([xs[i], a[i]], out[i + 1])
            if i > 0:
                frame.mcx([p[i], (out[i], False)], out[i + 1])
        for i in range(w):
            frame.mcx([p[i]], out[i])
        return
    bs = _pad(list(addend), w)
    transformed = []
    p = []
    for i in range(w):
        if isinstance(xs[i], tuple) and isinstance(bs[i], tuple):
            p.append((bs[i][0], bs[i][1]))  # b will hold p after CX(x -> b)
            transformed.append(i)
        else:
            p.append(_p_lit(xs[i], bs[i]))
    for i in range(w - 1):
        frame.mcx([xs[i], bs[i]], out[i + 1])
        if i in transformed:
            frame.cx(xs[i][0], bs[i][0], xs[i][1])
        if i > 0:
            frame.mcx([p[i], (out[i], False)], out[i + 1])
    if w - 1 in transformed:
        i = w - 1
        frame.cx(xs[i][0], bs[i][0], xs[i][1])
    for i in range(w):
        frame.mcx([p[i]], out[i])
    for i in transformed:
        frame.cx(xs[i][0], bs[i][0], xs[i][1])


def prefix_ripple_oop(frame: Frame, src_lits: list, addend, out: list[int]) -> None:
    """Pair-segmented carry network; classical addend (quantum falls back)."""
    w = len(out)
    if not isinstance(addend, int):
        ripple_oop(frame, src_lits, addend, out)
        return
    xs = _pad(src_lits, w)
    a = const_lits(addend % (1 << w), w)
    p = [_p_lit(xs[i], a[i]) for i in range(w)]
    g = [[xs[i], a[i]] for i in range(w)]
    pairs = [(2 * j, 2 * j + 1) for j in range(w // 2)]
    carry_pairs = [(lo, hi) for lo, hi in pairs if hi + 1 < w]
    for lo, hi in carry_pairs:  # preload G_j into out[hi+1], P_j into out[hi]
        frame.mcx(g[hi], out[hi + 1])
        frame.mcx(g[lo] + [p[hi]], out[hi + 1])
        frame.mcx([p[lo], p[hi]], out[hi])
    for lo, hi in carry_pairs:  # ripple even carries, one Toffoli per pair
        if lo > 0:
            frame.mcx([(out[hi], False), (out[lo], False)], out[hi + 1])
    for lo, hi in carry_pairs:  # clear pair propagates (sources intact)
        frame.mcx([p[lo], p[hi]], out[hi])
    for lo, hi in pairs:  # odd sums: s_hi = p_hi ^ g_lo ^ p_lo*c_lo
        frame.mcx([p[hi]], out[hi])
        frame.mcx(g[lo], out[hi])
        if lo > 0:
            frame.mcx([p[lo], (out[lo], False)], out[hi])
    for i in range(0, w, 2):  # even sums on top of stored carries
        frame.mcx([p[i]], out[i])


def _carry_tree(frame: Frame, p_lits: list, slots: list[int],
                g_controls: list[list] | None = None) -> None:
    """Brent-Kung prefix network: slots[i] ends as the carry into bit i+1.

    slots[i] must come in holding the generate g_i (or pass g_controls
    to have it emitted here).  P nodes come from the frame pool on
    demand (suffix blocks whose carry-out is unused get none), are
    emitted one level ahead of their consumers so the P chain pipelines
    with the G chain, and are uncomputed level by level behind the
    down-sweep.
    """
    m_pos = len(slots)
    if g_controls is not None:
        for i in range(m_pos):
            frame.mcx(g_controls[i], slots[i])

    # Dry pass: fold constant propagates and find which P nodes are needed
    # (suffix blocks whose carry-out is never used get none).
    value: dict[tuple[int, int], object] = {}

    def p_of(t: int, m: int):
        if t == 0:
            return p_lits[m] if m < len(p_lits) else 0
        key = (t, m)
        if key not in value:
            left, right = p_of(t - 1, 2 * m), p_of(t - 1, 2 * m + 1)
            if left == 0 or right == 0:
                value[key] = 0
            elif left == 1:
                value[key] = right
            elif right == 1:
                value[key] = left
            else:
                value[key] = ("P", t, m)
        return value[key]

    up_levels, down_levels = [], []
    t = 1
    while (1 << t) <= m_pos:
        ops = []
        for m in range(m_pos):
            r = (m + 1) * (1 << t) - 1
            if r >= m_pos:
                break
            l = m * (1 << t) + (1 << (t - 1)) - 1
            ops.append((p_of(t - 1, 2 * m + 1), l, r))
        up_levels.append((t, ops))
        t += 1
    t -= 1
    while t >= 1:
        ops = []
        for m in range(1, m_pos):
            x = m * (1 << t) + (1 << (t - 1)) - 1
            if x >= m_pos:
                break
            ops.append((p_of(t - 1, 2 * m), m * (1 << t) - 1, x))
        down_levels.append((t, ops))
        t -= 1
    needed = {v for v in value.values() if isinstance(v, tuple) and v[0] == "P"}
    down_used = {p for _, ops in down_levels for p, _, _ in ops
                 if isinstance(p, tuple) and p[0] == "P"}

    built: dict[tuple, int] = {}
    copies: dict[tuple, int] = {}

    def child_lit(t: int, m: int):
        v = p_of(t, m)
        if isinstance(v, tuple) and v[0] == "P":
            return (built[v], False)
        return v

    def build_level(t: int) -> None:
        for node in sorted(k for k in needed if k[1] == t):
            anc = frame.pool.take(1)[0]
            frame.mcx([child_lit(t - 1, 2 * node[2]),
                       child_lit(t - 1, 2 * node[2] + 1)], anc)
            built[node] = anc
            if node in down_used:
                # Fan the down-sweep's read out to a copy, decoupling the
                # uncompute chain from the down chain (the copy is a CNOT,
                # free in Toffoli depth).
                cp = frame.pool.take(1)[0]
                frame.cx(anc, cp)
                copies[node] = cp

    def unbuild_level(t: int) -> None:
        for node in sorted((k for k in built if k[1] == t), reverse=True):
            if node in copies:
                cp = copies.pop(node)
                frame.cx(built[node], cp)
                frame.pool.give([cp])
            anc = built[node]
            frame.mcx([child_lit(t - 1, 2 * node[2]),
                       child_lit(t - 1, 2 * node[2] + 1)], anc)
            del built[node]
            frame.pool.give([anc])

    def up_lit(p):
        return (built[p], False) if isinstance(p, tuple) and p[0] == "P" else p

    def down_lit(p):
        if isinstance(p, tuple) and p[0] == "P":
            return (copies.get(p, built[p]), False)
        return p

    for t, ops in up_levels:  # P(t) goes first so the P chain runs a slot ahead
        build_level(t)
        for p, l, r in ops:
            if p != 0:
                frame.mcx([up_lit(p), (slots[l], False)], slots[r])
    for t, ops in down_levels:
        for p, l, x in ops:
            if p != 0:
                frame.mcx([down_lit(p), (slots[l], False)], slots[x])
        unbuild_level(t - 1)  # originals are free once the up-sweep passed
    for t in sorted({k[1] for k in built}, reverse=True):
        unbuild_level(t)
    assert not built and not copies, "unreleased prefix nodes"


def lookahead_oop(frame: Frame, src_lits: list, addend, out: list[int]) -> None:
    """Carry-lookahead out-of-place add: tree carries into out, then sum."""
    w = len(out)
    if not isinstance(addend, int):
        ripple_oop(frame, src_lits, addend, out)
        return
    xs = _pad(src_lits, w)
    a = const_lits(addend % (1 << w), w)
    p = [_p_lit(xs[i], a[i]) for i in range(w)]
    g = [[xs[i], a[i]] for i in range(w)]
    _carry_tree(frame, p[:w - 1], [out[i + 1] for i in range(w - 1)],
                g_controls=g[:w - 1])
    for i in range(w):
        frame.mcx([p[i]], out[i])


_OOP = {
    BackendKind.RIPPLE: ripple_oop,
    BackendKind.PREFIX_RIPPLE: prefix_ripple_oop,
    BackendKind.LOOKAHEAD: lookahead_oop,
}


def oop_add(frame: Frame, backend: BackendKind, src_lits: list, addend,
            out: list[int], subtract: bool = False) -> None:
    """|x>|0> -> |x>|x +- a mod 2^len(out)>."""
    w = len(out)
    if isinstance(addend, int):
        folded = (-addend) % (1 << w) if subtract else addend % (1 << w)
        _OOP[backend](frame, src_lits, folded, out)
    elif subtract:
        # x - b = NOT(NOT(x) + b): polarity-negate the source, complement out.
        _OOP[backend](frame, [lit_neg(l) for l in src_lits], list(addend), out)
        for q in out:
            frame.x(q)
    else:
        _OOP[backend](frame, src_lits, list(addend), out)


def inplace_add(frame: Frame, backend: BackendKind, ys: list[int], addend,
                subtract: bool = False) -> list[int]:
    """y := y +- a in place; returns the relabeled qubit list holding y."""
    w = len(ys)
    out = frame.pool.take(w)
    oop_add(frame, backend, lits_of(ys), addend, out, subtract)
    mark = frame.mark()
    oop_add(frame, backend, lits_of(out), addend, ys, not subtract)
    frame.reverse_in_place(mark)
    frame.pool.give(ys)
    frame.tally("inplace_w%d" % w)
    return out


def select_undo_add(frame: Frame, backend: BackendKind, ctl: int, ys: list[int],
                    addend, subtract: bool = False, ctl_neg: bool = False) -> None:
    """y := y +- a when the control fires, unchanged otherwise; in place.

    Uncontrolled out-of-place adder, controlled-SWAP layer (one Toffoli
    and two CNOTs per bit), then the reversed out-of-place adder whose
    addend is negated on the branch that must undo an addition.
    """
    w = len(ys)
    out = frame.pool.take(w)
    oop_add(frame, backend, lits_of(ys), addend, out, subtract)
    frame.cswap_layer(ctl, ys, out, neg=ctl_neg)
    # The undo side subtracts exactly on the branch whose target kept the
    # sum: the complement fires there (on the swap branch for an add, on
    # the idle branch for a subtract).
    flip_neg = ctl_neg if not subtract else not ctl_neg
    mark = frame.mark()
    for q in ys:
        frame.cx(ctl, q, flip_neg)
    oop_add(frame, backend, lits_of(ys), addend, out, False)
    for q in out:
        frame.cx(ctl, q, flip_neg)
    for q in ys:
        frame.cx(ctl, q, flip_neg)
    frame.reverse_in_place(mark)
    frame.pool.give(out)
    frame.tally("select_undo_w%d" % w)


def trial_reduce(frame: Frame, backend: BackendKind, value: list[int], c_val: int,
                 hbit: int) -> None:
    """If value >= C: value -= C and hbit := 0, else value kept and hbit := 1.

    value spans its full two's-complement window (value < 2C <= 2^W);
    hbit comes in clean and receives the trial-subtraction sign.
    """
    w = len(value)
    if not 0 < c_val <= (1 << (w - 1)):
        raise CircuitError("constant out of range for trial window")
    out = frame.pool.take(w - 1)
    oop_add(frame, backend, lits_of(value), c_val, out + [hbit], subtract=True)
    frame.cswap_layer(hbit, value[:w - 1], out, neg=True)
    mark = frame.mark()
    for q in value[:w - 1]:
        frame.cx(hbit, q)
    oop_add(frame, backend, lits_of(value[:w - 1]), c_val, out + [value[w - 1]])
    for q in out + [value[w - 1]]:
        frame.cx(hbit, q)
    for q in value[:w - 1]:
        frame.cx(hbit, q)
    frame.reverse_in_place(mark)
    frame.pool.give(out)
    frame.tally("select_undo_w%d" % w)


def compare_via_subtract(frame: Frame, backend: BackendKind, value: list[int],
                         c_val: int, sign_out: int) -> None:
    """sign_out ^= [value < C]; value needs a two's-complement headroom bit."""
    w = len(value)
    out = frame.pool.take(w)
    start = frame.mark()
    oop_add(frame, backend, lits_of(value), c_val, out, subtract=True)
    end = frame.mark()
    frame.cx(out[w - 1], sign_out)
    frame.append_reversed(start, end)
    frame.pool.give(out)


# -- direct in-place adders (the standalone Table-7 structures) -------------

def cuccaro_inplace(frame: Frame, cin: int, ys: list[int], addend_reg: list[int]) -> None:
    """MAJ/UMA majority-ripple: y += a in place, one carry ancilla."""
    n = len(ys)
    carries = [cin] + addend_reg[:-1]
    for i in range(n):
        frame.cx(addend_reg[i], ys[i])
        frame.cx(addend_reg[i], carries[i])
        frame.ccx(carries[i], ys[i], addend_reg[i])
    for i in reversed(range(n)):
        frame.ccx(carries[i], ys[i], addend_reg[i])
        frame.cx(addend_reg[i], carries[i])
        frame.cx(carries[i], ys[i])


def prefix_ripple_inplace(frame: Frame, ys: list[int], addend: int,
                          kreg: list[int], cin: int) -> None:
    """Direct in-place prefix-ripple add of a classical constant.

    kreg's odd slots hold pair propagates, even slots even carries; the
    erase pass recomputes the same carries from the complemented sum
    (complements folded into control polarities).
    """
    w = len(ys)
    a = const_lits(addend % (1 << w), w)
    pairs = [(2 * j, 2 * j + 1) for j in range(w // 2)]
    carry_pairs = [(lo, hi) for lo, hi in pairs if hi + 1 < w]

    def carry_pass(p, g):
        for lo, hi in carry_pairs:
            frame.mcx(g[hi], kreg[hi + 1])
            frame.mcx(g[lo] + [p[hi]], kreg[hi + 1])
            frame.mcx([p[lo], p[hi]], kreg[hi])
        for lo, hi in carry_pairs:
            cl = (kreg[lo], False) if lo > 0 else (cin, False)
            frame.mcx([(kreg[hi], False), cl], kreg[hi + 1])
        for lo, hi in carry_pairs:
            frame.mcx([p[lo], p[hi]], kreg[hi])

    p_fwd = [(ys[i], bool(a[i])) for i in range(w)]
    g_fwd = [[(ys[i], False), a[i]] for i in range(w)]
    carry_pass(p_fwd, g_fwd)
    for lo, hi in pairs:  # odd sums (y_hi ^= a_hi ^ c_hi) before even bits mutate
        if a[hi]:
            frame.x(ys[hi])
        frame.mcx(g_fwd[lo], ys[hi])
        cl = (kreg[lo], False) if lo > 0 else (cin, False)
        frame.mcx([p_fwd[lo], cl], ys[hi])
    for i in range(0, w, 2):  # even sums read stored carries
        if a[i]:
            frame.x(ys[i])
        frame.cx(kreg[i] if i > 0 else cin, ys[i])
    p_bar = [(ys[i], not a[i]) for i in range(w)]
    g_bar = [[(ys[i], True), a[i]] for i in range(w)]
    mark = frame.mark()
    carry_pass(p_bar, g_bar)
    frame.reverse_in_place(mark)


def build_adder_circuit(kind: BackendKind, n: int, addend: int,
                        subtract: bool = False):
    """Standalone in-place classical-quantum adder with the published
    register complement (Table-7 shapes): majority-ripple 2n+1,
    prefix-ripple 2n+1, carry-lookahead 4n - floor(log2 n) - 1 qubits.
    """
    from .circuit import new_circuit  # local import to avoid a cycle
    a = addend % (1 << n)
    if kind == BackendKind.RIPPLE:
        c = new_circuit([("y", n, "input"), ("b", n, "work"), ("cin", 1, "work")])
        f = Frame(c)
        ys = list(c.register("y").qubits)
        bs = list(c.register("b").qubits)
        av = (-a) % (1 << n) if subtract else a
        for i in range(n):  # load the constant
            if av >> i & 1:
                f.x(bs[i])
        cuccaro_inplace(f, c.register("cin").qubits[0], ys, bs)
        for i in range(n):
            if av >> i & 1:
                f.x(bs[i])
    elif kind == BackendKind.PREFIX_RIPPLE:
        c = new_circuit([("y", n, "input"), ("k", n, "work"), ("cin", 1, "work")])
        f = Frame(c)
        ys = list(c.register("y").qubits)
        prefix_ripple_inplace(f, ys, (-a) % (1 << n) if subtract else a,
                              list(c.register("k").qubits),
                              c.register("cin").qubits[0])
    elif kind == BackendKind.LOOKAHEAD:
        # DKMS register complement: carries plus the prefix tree; the second
        # input register remains (the construction is a quantum-quantum adder)
        # but the constant's gates are folded per the evaluation methodology.
        tree = 2 * n - (n.bit_length() - 1) - 1
        c = new_circuit([("y", n, "input"), ("k", n, "work"),
                         ("tree", max(tree, 1), "work")])
        f = Frame(c, pool_qubits=c.register("tree").qubits)
        ys = list(c.register("y").qubits)
        av = (-a) % (1 << n) if subtract else a
        lookahead_inplace_cq(f, ys, av, list(c.register("k").qubits))
    else:  # fourier: qft, rotations, inverse qft on a lone register
        from .fourier import phi_add_const, iqft, qft
        c = new_circuit([("y", n, "input")])
        f = Frame(c)
        ys = list(c.register("y").qubits)
        qft(f, ys, with_markers=False)
        phi_add_const(f, ys, -a if subtract else a)
        iqft(f, ys, with_markers=False)
    f.set_io({"y": (ys, "binary")}, {"y": (ys, "binary")})
    c.meta.update({"n": n, "addend": addend, "backend": kind.value,
                   "subtract": subtract})
    return c


def lookahead_inplace_qq(frame: Frame, ys: list[int], bs: list[int],
                         kreg: list[int]) -> None:
    """Direct in-place carry-lookahead add of a quantum register."""
    n = len(ys)
    slots = [kreg[i] for i in range(n - 1)]
    for i in range(n - 1):
        frame.ccx(bs[i], ys[i], slots[i])  # g
    for i in range(n):
        frame.cx(bs[i], ys[i])             # y := p
    _carry_tree(frame, [(ys[i], False) for i in range(n - 1)], slots)
    for i in range(1, n):
        frame.cx(slots[i - 1], ys[i])      # y := p ^ c = s
    for i in range(n):
        frame.cx(bs[i], ys[i])             # y := s ^ b, so !y' = (s==b) helper
    mark = frame.mark()
    for i in range(n - 1):
        frame.ccx(bs[i], ys[i], slots[i])  # gbar = b AND NOT s
    _carry_tree(frame, [(ys[i], True) for i in range(n - 1)], slots)
    frame.reverse_in_place(mark)
    for i in range(n):
        frame.cx(bs[i], ys[i])             # y := s


def lookahead_inplace_cq(frame: Frame, ys: list[int], addend: int,
                         kreg: list[int]) -> None:
    """Direct in-place carry-lookahead add of a folded classical constant."""
    n = len(ys)
    a = const_lits(addend % (1 << n), n)
    slots = [kreg[i] for i in range(n - 1)]
    p_fwd = [(ys[i], bool(a[i])) for i in range(n)]
    g_fwd = [[(ys[i], False), a[i]] for i in range(n)]
    _carry_tree(frame, p_fwd[:n - 1], slots, g_controls=g_fwd[:n - 1])
    for i in range(n):                      # y := y ^ a ^ c = s
        if a[i]:
            frame.x(ys[i])
        if i > 0:
            frame.cx(slots[i - 1], ys[i])
    p_bar = [(ys[i], not a[i]) for i in range(n)]
    g_bar = [[(ys[i], True), a[i]] for i in range(n)]
    mark = frame.mark()
    _carry_tree(frame, p_bar[:n - 1], slots, g_controls=g_bar[:n - 1])
    frame.reverse_in_place(mark)
