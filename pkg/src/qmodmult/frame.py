"""Synthesis frame: gate emission with literal folding and a work pool.

Synthesizers drive a Frame: emit helpers fold classical constants into
gate polarities (a control literal is either a constant bit or a qubit
with optional negation), the pool checks work qubits in and out, and
recorded gate ranges can be appended or rewritten in reverse for
uncomputation.  Register relabeling (the paper's "just relabel instead
of swapping") is the synthesizer's business: builders return the qubit
lists where results physically live.
"""
from __future__ import annotations

from contextlib import contextmanager

from .angles import DyadicAngle, TruncationPolicy, NO_TRUNCATION, dyadic
from .circuit import Circuit, CircuitError, GateKind

# A literal is 0, 1, or (qubit_index, negated).
Lit = object


def lit(q: int, neg: bool = False) -> tuple[int, bool]:
    return (q, neg)


def lits_of(qubits, neg: bool = False) -> list:
    return [(q, neg) for q in qubits]


def lit_neg(l):
    if isinstance(l, tuple):
        return (l[0], not l[1])
    return 1 - l


def const_lits(value: int, width: int) -> list:
    return [(value >> i) & 1 for i in range(width)]


class Pool:
    """LIFO free-list of work qubits; takes must be matched by gives."""

    def __init__(self, qubits):
        self._free = list(qubits)

    def take(self, k: int) -> list[int]:
        if k > len(self._free):
            raise CircuitError(f"work pool exhausted (need {k}, have {len(self._free)})")
        out = self._free[-k:]
        del self._free[-k:]
        return out

    def give(self, qubits) -> None:
        self._free.extend(qubits)

    def __len__(self) -> int:
        return len(self._free)

    def snapshot(self) -> list[int]:
        return self._free[:]

    def restore(self, saved: list[int]) -> None:
        self._free[:] = saved


class Frame:
    """A Circuit under construction plus emission helpers and bookkeeping."""

    def __init__(self, circuit: Circuit, pool_qubits=(), policy: TruncationPolicy = NO_TRUNCATION):
        self.c = circuit
        self.pool = Pool(pool_qubits)
        self.policy = policy
        self.c.meta.setdefault("stages", [])
        self.c.meta.setdefault("probes", [])
        self.c.meta.setdefault("transforms", [])
        self.c.meta.setdefault("adder_tally", {})

    def __len__(self) -> int:
        return len(self.c)

    # -- raw emission -----------------------------------------------------

    def x(self, t: int) -> None:
        self.c._emit(GateKind.X, -1, -1, t, -1, 0, 0, 0)

    def cx(self, ctl: int, t: int, neg: bool = False) -> None:
        self.c._emit(GateKind.CX, ctl, -1, t, -1, int(neg), 0, 0)

    def ccx(self, c0: int, c1: int, t: int, neg0: bool = False, neg1: bool = False) -> None:
        self.c._emit(GateKind.CCX, c0, c1, t, -1, int(neg0) | (int(neg1) << 1), 0, 0)

    def swap(self, a: int, b: int) -> None:
        self.c._emit(GateKind.SWAP, -1, -1, a, b, 0, 0, 0)

    def cswap(self, ctl: int, a: int, b: int, neg: bool = False) -> None:
        self.c._emit(GateKind.CSWAP, ctl, -1, a, b, int(neg), 0, 0)

    def marker_ry(self, t: int) -> None:
        """Explicit RY(0) basis-bookkeeping gate (public qft/iqft only)."""
        self.c._emit(GateKind.RY, -1, -1, t, -1, 0, 0, 0)

    def rot(self, t: int, angle: DyadicAngle, ctl=None) -> None:
        """RY/CRY with constant folding and truncation; drops zero angles."""
        if angle.is_zero or not self.policy.keeps(angle):
            return
        if ctl is None or ctl == 1:
            self.c._emit(GateKind.RY, -1, -1, t, -1, 0, angle.numerator,
                         angle.log2_denominator)
        elif ctl == 0:
            return
        else:
            q, neg = ctl
            self.c._emit(GateKind.CRY, q, -1, t, -1, int(neg), angle.numerator,
                         angle.log2_denominator)

    def mcx(self, controls: list, t: int) -> None:
        """X on t under up to two literal controls, folding constants."""
        quantum = []
        for l in controls:
            if isinstance(l, tuple):
                quantum.append(l)
            elif l == 0:
                return
        if len(quantum) == 0:
            self.x(t)
        elif len(quantum) == 1:
            self.cx(quantum[0][0], t, quantum[0][1])
        elif len(quantum) == 2:
            self.ccx(quantum[0][0], quantum[1][0], t, quantum[0][1], quantum[1][1])
        else:
            raise CircuitError("more than two quantum controls")

    def cswap_layer(self, ctl: int, a_qubits, b_qubits, neg: bool = False,
                    descending: bool = False) -> None:
        """Fredkin layer decomposed as CX/CCX/CX per bit.

        The shared control serializes the layer, so bit order should
        follow the neighboring stage's release order (descending after a
        reversed accumulator, ascending before a forward one).
        """
        pairs = list(zip(a_qubits, b_qubits))
        if descending:
            pairs.reverse()
        for a, b in pairs:
            self.cx(b, a)
            self.ccx(ctl, a, b, neg, False)
            self.cx(b, a)

    # -- recording / reversal ----------------------------------------------

    def mark(self) -> int:
        return len(self.c)

    def append_reversed(self, start: int, end: int | None = None) -> None:
        self.c.append_reversed_rows(start, len(self.c) if end is None else end)

    @contextmanager
    def use_pool(self, pool: Pool):
        saved = self.pool
        self.pool = pool
        try:
            yield pool
        finally:
            self.pool = saved

    def reverse_in_place(self, start: int) -> None:
        """Rewrite rows [start:] as their own inverse (reverse order, negate angles).

        Stage and transform records inside the range are remapped to the
        reversed positions; probes there describe forward-only states and
        are dropped.
        """
        c = self.c
        end = len(c)
        for name in ("_kind", "_q0", "_q1", "_q2", "_q3", "_neg", "_den"):
            col = getattr(c, name)
            col[start:end] = col[start:end][::-1]
        c._num[start:end] = c._num[start:end][::-1]
        for i in range(start, end):
            if c._kind[i] in (GateKind.RY, GateKind.CRY) and c._num[i]:
                a = dyadic(-c._num[i], c._den[i])
                c._num[i], c._den[i] = a.numerator, a.log2_denominator

        def flip(pos: int) -> int:
            return start + (end - pos)

        for s in c.meta["stages"]:
            if s["start"] >= start:
                s["start"], s["end"] = flip(s["end"]), flip(s["start"])
                s["name"] = "rev_" + s["name"] if not s["name"].startswith("rev_") \
                    else s["name"][4:]
        c.meta["probes"] = [p for p in c.meta["probes"] if p["index"] <= start]
        for t in c.meta["transforms"]:
            if t["index"] >= start:
                t["index"] = flip(t["index"])
                t["inverse"] = not t["inverse"]

    # -- bookkeeping --------------------------------------------------------

    @contextmanager
    def stage(self, name: str):
        start = len(self.c)
        yield
        self.c.meta["stages"].append({"name": name, "start": start, "end": len(self.c)})

    def probe(self, name: str, regs: dict) -> None:
        """Record a stage-boundary checkpoint; regs: name -> (qubits, basis, twos)."""
        self.c.meta["probes"].append({
            "name": name,
            "index": len(self.c),
            "regs": {k: {"qubits": list(v[0]), "basis": v[1], "twos": v[2]}
                     for k, v in regs.items()},
        })

    def note_transform(self, width: int, inverse: bool) -> None:
        self.c.meta["transforms"].append({"width": width, "inverse": inverse,
                                          "index": len(self.c)})

    def tally(self, key: str, count: int = 1) -> None:
        t = self.c.meta["adder_tally"]
        t[key] = t.get(key, 0) + count

    def set_io(self, inputs: dict, outputs: dict) -> None:
        """inputs/outputs: name -> (qubits, basis) or (qubits, basis, twos)."""
        def conv(d):
            out = {}
            for name, v in d.items():
                qubits, basis = v[0], v[1]
                twos = v[2] if len(v) > 2 else False
                out[name] = {"qubits": list(qubits), "basis": basis, "twos": twos}
            return out
        self.c.meta["inputs"] = conv(inputs)
        self.c.meta["outputs"] = conv(outputs)
