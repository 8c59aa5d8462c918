"""Reversible-circuit intermediate representation.

A Circuit is a flat, ordered gate list over a fixed qubit table plus a
register map.  Gates are stored columnar (arrays per field) because
synthesized multipliers reach millions of gates; the `Gate` dataclass
is the per-gate view used by the public API, tests and serialization.
"""
from __future__ import annotations

import json
from array import array
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Iterator

from .angles import DyadicAngle, ZERO_ANGLE, dyadic


class GateKind(IntEnum):
    X = 0
    CX = 1
    CCX = 2
    SWAP = 3
    CSWAP = 4
    RY = 5
    CRY = 6


N_CONTROLS = {
    GateKind.X: 0,
    GateKind.CX: 1,
    GateKind.CCX: 2,
    GateKind.SWAP: 0,
    GateKind.CSWAP: 1,
    GateKind.RY: 0,
    GateKind.CRY: 1,
}

N_TARGETS = {
    GateKind.X: 1,
    GateKind.CX: 1,
    GateKind.CCX: 1,
    GateKind.SWAP: 2,
    GateKind.CSWAP: 2,
    GateKind.RY: 1,
    GateKind.CRY: 1,
}

ROTATION_KINDS = (GateKind.RY, GateKind.CRY)


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One reversible primitive with qubit references and an exact angle."""

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    negations: tuple[bool, ...] = ()
    angle: DyadicAngle | None = None

    def __post_init__(self):
        if len(self.controls) != N_CONTROLS[self.kind]:
            raise CircuitError(f"{self.kind.name}: wrong control count")
        if len(self.targets) != N_TARGETS[self.kind]:
            raise CircuitError(f"{self.kind.name}: wrong target count")
        if self.negations and len(self.negations) != len(self.controls):
            raise CircuitError("negations must align with controls")
        qubits = self.controls + self.targets
        if len(set(qubits)) != len(qubits):
            raise CircuitError("controls and targets must be pairwise distinct")
        if (self.angle is not None) != (self.kind in ROTATION_KINDS):
            raise CircuitError("angle present iff kind is RY/CRY")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def inverse(self) -> "Gate":
        if self.kind in ROTATION_KINDS:
            return Gate(self.kind, self.targets, self.controls, self.negations,
                        self.angle.negated())
        return self


class Role(IntEnum):
    INPUT = 0
    OUTPUT = 1
    ANCILLA = 2
    WORK = 3
    FLAG = 4


@dataclass(frozen=True)
class RegisterDesc:
    """Named qubit list, LSB first (qubits[k] carries weight 2**k)."""

    name: str
    qubits: tuple[int, ...]
    role: Role
    basis: str = "binary"  # decode convention: "binary" | "fourier"

    @property
    def width(self) -> int:
        return len(self.qubits)


class Circuit:
    """Ordered gate list + register map over a fixed qubit table."""

    def __init__(self, qubit_count: int, registers: Iterable[RegisterDesc] = (),
                 meta: dict | None = None):
        if qubit_count < 0:
            raise CircuitError("negative qubit count")
        self.qubit_count = qubit_count
        self.registers: list[RegisterDesc] = list(registers)
        self.meta: dict = meta if meta is not None else {}
        seen: set[int] = set()
        for r in self.registers:
            for q in r.qubits:
                if not 0 <= q < qubit_count:
                    raise CircuitError(f"register {r.name}: qubit {q} out of range")
                if q in seen:
                    raise CircuitError(f"register {r.name}: qubit {q} reused")
                seen.add(q)
        # Columnar gate storage: q0,q1 controls (-1 unused), q2,q3 targets.
        self._kind = array("b")
        self._q0 = array("i")
        self._q1 = array("i")
        self._q2 = array("i")
        self._q3 = array("i")
        self._neg = array("b")  # bit0: q0 negated, bit1: q1 negated
        self._num: list[int] = []
        self._den = array("i")

    def __len__(self) -> int:
        return len(self._kind)

    def register(self, name: str) -> RegisterDesc:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    # -- gate append ----------------------------------------------------

    def _emit(self, kind: int, c0: int, c1: int, t0: int, t1: int,
              neg: int, num: int, den: int) -> None:
        n = self.qubit_count
        for q in (c0, c1, t0, t1):
            if q >= n:
                raise CircuitError(f"qubit {q} out of range (< {n})")
        qs = [q for q in (c0, c1, t0, t1) if q >= 0]
        if len(set(qs)) != len(qs):
            raise CircuitError("control equals target (or duplicate qubit)")
        self._kind.append(kind)
        self._q0.append(c0)
        self._q1.append(c1)
        self._q2.append(t0)
        self._q3.append(t1)
        self._neg.append(neg)
        self._num.append(num)
        self._den.append(den)

    def append(self, g: Gate) -> None:
        c = g.controls
        t = g.targets
        neg = 0
        if g.negations:
            neg = int(g.negations[0]) | (int(g.negations[1]) << 1 if len(g.negations) > 1 else 0)
        c0 = c[0] if len(c) > 0 else -1
        c1 = c[1] if len(c) > 1 else -1
        t0 = t[0]
        t1 = t[1] if len(t) > 1 else -1
        if g.angle is not None:
            self._emit(int(g.kind), c0, c1, t0, t1, neg, g.angle.numerator,
                       g.angle.log2_denominator)
        else:
            self._emit(int(g.kind), c0, c1, t0, t1, neg, 0, 0)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    # -- gate access ----------------------------------------------------

    def row(self, i: int) -> tuple:
        """Raw row (kind, c0, c1, t0, t1, neg, num, den)."""
        return (self._kind[i], self._q0[i], self._q1[i], self._q2[i], self._q3[i],
                self._neg[i], self._num[i], self._den[i])

    def gate(self, i: int) -> Gate:
        kind, c0, c1, t0, t1, neg, num, den = self.row(i)
        kind = GateKind(kind)
        controls = tuple(q for q in (c0, c1) if q >= 0)
        negations = tuple(bool(neg >> j & 1) for j in range(len(controls)))
        targets = (t0,) if t1 < 0 else (t0, t1)
        angle = DyadicAngle(num, den) if kind in ROTATION_KINDS else None
        return Gate(kind, targets, controls, negations, angle)

    @property
    def gates(self) -> Iterator[Gate]:
        for i in range(len(self)):
            yield self.gate(i)

    def row_qubits(self, i: int) -> tuple[int, ...]:
        return tuple(q for q in (self._q0[i], self._q1[i], self._q2[i], self._q3[i])
                     if q >= 0)

    # -- whole-circuit operations ----------------------------------------

    def append_reversed_rows(self, start: int, end: int) -> None:
        """Append rows [start, end) in reverse order with angles negated."""
        for i in range(end - 1, start - 1, -1):
            kind, c0, c1, t0, t1, neg, num, den = self.row(i)
            if kind in (GateKind.RY, GateKind.CRY) and num:
                a = dyadic(-num, den)
                num, den = a.numerator, a.log2_denominator
            self._emit(kind, c0, c1, t0, t1, neg, num, den)

    def gate_histogram(self) -> dict[GateKind, int]:
        counts = {k: 0 for k in GateKind}
        for k in self._kind:
            counts[GateKind(k)] += 1
        return counts

    def max_log2_denominator(self) -> int:
        return max(self._den, default=0)

    def copy_structure(self) -> "Circuit":
        return Circuit(self.qubit_count, self.registers, dict(self.meta))


def new_circuit(register_specs: Iterable[tuple], meta: dict | None = None) -> Circuit:
    """Build an empty circuit from (name, width, role[, basis]) specs."""
    regs = []
    next_q = 0
    names = set()
    for spec in register_specs:
        name, width, role = spec[0], spec[1], spec[2]
        basis = spec[3] if len(spec) > 3 else "binary"
        if width < 1:
            raise CircuitError(f"register {name}: zero width")
        if name in names:
            raise CircuitError(f"duplicate register name {name!r}")
        names.add(name)
        regs.append(RegisterDesc(name, tuple(range(next_q, next_q + width)),
                                 Role[role.upper()] if isinstance(role, str) else role,
                                 basis))
        next_q += width
    return Circuit(next_q, regs)


def inverse(c: Circuit) -> Circuit:
    """Reverse gate order, negate rotation angles; c then inverse(c) is identity."""
    inv = c.copy_structure()
    inv.append_reversed_rows(0, len(c))
    io = inv.meta
    if "inputs" in io or "outputs" in io:
        io["inputs"], io["outputs"] = io.get("outputs"), io.get("inputs")
    return inv


def gate_histogram(c: Circuit) -> dict[GateKind, int]:
    return c.gate_histogram()


# -- serialization -------------------------------------------------------
#
# Line format:  KIND [!]ctrl... ; tgt... ; num/2^k
# Headers:      QUBITS n | REG name role basis q0 q1 ... | META json

def to_text(c: Circuit) -> str:
    lines = [f"QUBITS {c.qubit_count}"]
    for r in c.registers:
        lines.append(f"REG {r.name} {r.role.name.lower()} {r.basis} "
                     + " ".join(str(q) for q in r.qubits))
    if c.meta:
        lines.append("META " + json.dumps(_meta_jsonable(c.meta), sort_keys=True))
    for g in c.gates:
        ctrls = " ".join(("!" if n else "") + str(q)
                         for q, n in zip(g.controls, g.negations or (False,) * len(g.controls)))
        tgts = " ".join(str(q) for q in g.targets)
        if g.angle is not None:
            lines.append(f"{g.kind.name} {ctrls} ; {tgts} ; "
                         f"{g.angle.numerator}/2^{g.angle.log2_denominator}")
        else:
            lines.append(f"{g.kind.name} {ctrls} ; {tgts} ;")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    qubit_count = 0
    regs: list[RegisterDesc] = []
    meta: dict = {}
    gates: list[Gate] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("QUBITS "):
            qubit_count = int(line.split()[1])
            continue
        if line.startswith("REG "):
            parts = line.split()
            regs.append(RegisterDesc(parts[1], tuple(int(q) for q in parts[4:]),
                                     Role[parts[2].upper()], parts[3]))
            continue
        if line.startswith("META "):
            meta = json.loads(line[5:])
            continue
        head, tgt_part, angle_part = (p.strip() for p in line.split(";"))
        toks = head.split()
        kind = GateKind[toks[0]]
        controls, negations = [], []
        for tok in toks[1:]:
            negations.append(tok.startswith("!"))
            controls.append(int(tok.lstrip("!")))
        targets = tuple(int(t) for t in tgt_part.split())
        angle = None
        if angle_part:
            num_s, den_s = angle_part.split("/2^")
            angle = DyadicAngle(int(num_s), int(den_s))
        gates.append(Gate(kind, targets, tuple(controls), tuple(negations), angle))
    c = Circuit(qubit_count, regs, meta)
    c.extend(gates)
    return c


def _meta_jsonable(meta: dict):
    def conv(v):
        if isinstance(v, dict):
            return {str(k): conv(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [conv(x) for x in v]
        if isinstance(v, (Role, GateKind)):
            return v.name
        return v
    return conv(meta)


def to_json(c: Circuit) -> str:
    gates = []
    for g in c.gates:
        entry: dict = {"kind": g.kind.name, "targets": list(g.targets)}
        if g.controls:
            entry["controls"] = list(g.controls)
            if any(g.negations):
                entry["negations"] = [int(b) for b in g.negations]
        if g.angle is not None:
            entry["angle"] = [g.angle.numerator, g.angle.log2_denominator]
        gates.append(entry)
    doc = {
        "qubits": c.qubit_count,
        "registers": [{"name": r.name, "qubits": list(r.qubits),
                       "role": r.role.name.lower(), "basis": r.basis}
                      for r in c.registers],
        "meta": _meta_jsonable(c.meta),
        "gates": gates,
    }
    return json.dumps(doc, indent=1)


def from_json(text: str) -> Circuit:
    doc = json.loads(text)
    regs = [RegisterDesc(r["name"], tuple(r["qubits"]), Role[r["role"].upper()],
                         r.get("basis", "binary")) for r in doc["registers"]]
    c = Circuit(doc["qubits"], regs, doc.get("meta", {}))
    for e in doc["gates"]:
        kind = GateKind[e["kind"]]
        controls = tuple(e.get("controls", ()))
        negations = tuple(bool(b) for b in e.get("negations", ())) or (False,) * len(controls)
        angle = DyadicAngle(*e["angle"]) if "angle" in e else None
        c.append(Gate(kind, tuple(e["targets"]), controls, negations, angle))
    return c
