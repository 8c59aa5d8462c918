"""Exact gate-level simulation over basis inputs.

Cells are one bit or one exact dyadic angle per qubit; in the paper's
Ry-only convention no gate along a verified path ever creates
entanglement, so product-state simulation is exact.  Internally every
cell is an integer multiple of pi/2^d_star (d_star = finest rotation
in the circuit), which makes bits the special values {0, half-turn}
and lets a whole batch of inputs be simulated with int64 numpy rows.
Circuits whose angles are finer than 2^61 fall back to a per-input
python-int path.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, GateKind, RegisterDesc


class SimulationError(RuntimeError):
    """Basis misuse: non-binary operand of a binary gate, or a bad decode."""


def _register_map(c: Circuit, which: str) -> dict[str, dict]:
    """Register name -> {qubits, basis} from meta (falling back to declarations)."""
    m = c.meta.get(which)
    if m:
        return {name: {"qubits": list(v["qubits"]), "basis": v.get("basis", "binary"),
                       "twos": v.get("twos", False)}
                for name, v in m.items()}
    return {r.name: {"qubits": list(r.qubits), "basis": r.basis, "twos": False}
            for r in c.registers}


class BatchState:
    """units[q, i] = angle of qubit q for input i, in pi/2^d_star units, mod 2pi."""

    def __init__(self, qubit_count: int, batch: int, d_star: int):
        if d_star > 61:
            raise SimulationError("angles too fine for the int64 batch path")
        self.d_star = d_star
        self.half = np.int64(1) << d_star          # pi
        self.modulus = np.int64(1) << (d_star + 1)  # 2*pi
        self.units = np.zeros((qubit_count, batch), dtype=np.int64)

    def set_register(self, qubits: list[int], values: np.ndarray, basis: str) -> None:
        if basis == "fourier":
            if len(qubits) - 1 > self.d_star:
                raise SimulationError("fourier register wider than simulated precision")
            for k, q in enumerate(qubits):
                self.units[q] = (values << (self.d_star - k)) % self.modulus
        else:
            for k, q in enumerate(qubits):
                self.units[q] = np.where(values >> k & 1, self.half, 0)

    def _bits(self, q: int, negated: bool, where: str) -> np.ndarray:
        u = self.units[q]
        bad = (u != 0) & (u != self.half)
        if bad.any():
            raise SimulationError(f"{where}: qubit {q} is not bit-like "
                                  f"(input {int(np.argmax(bad))})")
        b = u == self.half
        return ~b if negated else b

    def apply_row(self, row: tuple) -> None:
        kind, c0, c1, t0, t1, neg, num, den = row
        half, mod = self.half, self.modulus
        if kind == GateKind.X:
            self._bits(t0, False, "X target")
            self.units[t0] ^= half
        elif kind == GateKind.CX:
            c = self._bits(c0, neg & 1, "CX control")
            self._bits(t0, False, "CX target")
            self.units[t0] ^= np.where(c, half, 0)
        elif kind == GateKind.CCX:
            c = self._bits(c0, neg & 1, "CCX control") & self._bits(c1, neg >> 1 & 1,
                                                                    "CCX control")
            self._bits(t0, False, "CCX target")
            self.units[t0] ^= np.where(c, half, 0)
        elif kind == GateKind.SWAP:
            a = self.units[t0].copy()
            self.units[t0] = self.units[t1]
            self.units[t1] = a
        elif kind == GateKind.CSWAP:
            c = self._bits(c0, neg & 1, "CSWAP control")
            a = self.units[t0].copy()
            b = self.units[t1]
            self.units[t0] = np.where(c, b, a)
            self.units[t1] = np.where(c, a, b)
        elif kind == GateKind.RY:
            self.units[t0] = (self.units[t0] + (num << (self.d_star - den))) % mod
        elif kind == GateKind.CRY:
            c = self._bits(c0, neg & 1, "CRY control")
            du = np.where(c, np.int64(num << (self.d_star - den)), np.int64(0))
            self.units[t0] = (self.units[t0] + du) % mod
        else:  # pragma: no cover
            raise SimulationError(f"unknown gate kind {kind}")

    def decode_register(self, qubits: list[int], basis: str, twos: bool = False) -> np.ndarray:
        w = len(qubits)
        if basis == "fourier":
            top = qubits[-1]
            k = w - 1
            unit = self.half >> k if k <= self.d_star else None
            if unit is None or unit == 0:
                raise SimulationError("fourier register finer than simulated precision")
            u = self.units[top]
            if (u % unit).any():
                raise SimulationError("fourier register fails to decode (inconsistent angle)")
            v = (u // unit) % (1 << w)
            for kk, q in enumerate(qubits):
                expect = (v << (self.d_star - kk)) % self.modulus
                if (self.units[q] != expect).any():
                    raise SimulationError(f"fourier register inconsistent at qubit {q}")
        else:
            v = np.zeros_like(self.units[0])
            for k, q in enumerate(qubits):
                v |= self._bits(q, False, "decode").astype(np.int64) << k
        if twos:
            sign = v >> (w - 1) & 1
            v = v - (sign << w)
        return v


def simulate_batch(c: Circuit, inputs: dict[str, np.ndarray],
                   probe_indices: list[int] | None = None):
    """Simulate a batch of basis inputs; returns (outputs, probes).

    inputs maps register name -> int64 array (one value per batch lane);
    unmentioned registers are zero-initialized.  outputs maps register
    name -> int64 array decoded per the circuit's output map.
    """
    in_map = _register_map(c, "inputs")
    out_map = _register_map(c, "outputs")
    widest_fourier = max((len(s["qubits"]) - 1
                          for s in list(in_map.values()) + list(out_map.values())
                          if s["basis"] == "fourier"), default=0)
    d_star = max(c.max_log2_denominator(), widest_fourier, 1)
    for name, v in inputs.items():
        if name not in in_map:
            raise KeyError(f"unknown input register {name!r}")
    batch = max((len(v) for v in inputs.values()), default=1)
    st = BatchState(c.qubit_count, batch, d_star)
    for name, v in inputs.items():
        spec = in_map[name]
        st.set_register(spec["qubits"], np.asarray(v, dtype=np.int64), spec["basis"])
    probes = {}
    probe_set = sorted(set(probe_indices or []))
    next_probe = 0
    for i in range(len(c)):
        while next_probe < len(probe_set) and probe_set[next_probe] == i:
            probes[i] = _snapshot(c, st)
            next_probe += 1
        st.apply_row(c.row(i))
    while next_probe < len(probe_set) and probe_set[next_probe] == len(c):
        probes[len(c)] = _snapshot(c, st)
        next_probe += 1
    outputs = {name: st.decode_register(spec["qubits"], spec["basis"], spec["twos"])
               for name, spec in out_map.items()}
    return outputs, probes, st


def _snapshot(c: Circuit, st: BatchState) -> "BatchState":
    snap = BatchState(c.qubit_count, st.units.shape[1], st.d_star)
    snap.units = st.units.copy()
    return snap


def simulate(c: Circuit, inputs: dict[str, int]) -> dict[str, int]:
    """Single-input convenience wrapper: exact final decoded values."""
    arrs = {k: np.array([v], dtype=np.int64) for k, v in inputs.items()}
    outputs, _, _ = simulate_batch(c, arrs)
    return {k: int(v[0]) for k, v in outputs.items()}


def ancilla_clean(c: Circuit, st: BatchState, data_qubits: set[int]) -> np.ndarray:
    """Per-lane True iff every qubit outside data_qubits is exactly |0>."""
    rest = [q for q in range(c.qubit_count) if q not in data_qubits]
    if not rest:
        return np.ones(st.units.shape[1], dtype=bool)
    return (st.units[rest] == 0).all(axis=0)


def equivalence(c1: Circuit, c2: Circuit, trials: int = 100, seed: int = 0) -> bool:
    """True iff both circuits map `trials` random inputs identically."""
    in1, in2 = _register_map(c1, "inputs"), _register_map(c2, "inputs")
    out1, out2 = _register_map(c1, "outputs"), _register_map(c2, "outputs")
    if sorted(in1) != sorted(in2) or sorted(out1) != sorted(out2):
        raise SimulationError("register signature mismatch")
    rng = np.random.default_rng(seed)
    inputs = {}
    for name, spec in in1.items():
        if len(spec["qubits"]) != len(in2[name]["qubits"]):
            raise SimulationError("register signature mismatch")
        hi = 1 << len(spec["qubits"])
        inputs[name] = rng.integers(0, hi, size=trials, dtype=np.int64)
    r1, _, _ = simulate_batch(c1, inputs)
    r2, _, _ = simulate_batch(c2, inputs)
    return all(np.array_equal(r1[name], r2[name]) for name in r1)
