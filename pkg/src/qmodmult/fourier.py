"""Fourier-basis number representation and arithmetic.

A Fourier register stores value v as per-qubit rotation angles
v*pi/2^k (Ry-product convention, Hadamards commuted away), so addition
is a layer of independent rotations and the QFT itself is the in-place
multiply by one.  Rotation emission is wave-ordered: gates are listed
in the time slots of the known-optimal schedule so the append-only
scheduler reproduces the published depths (QFT 2w-3, MAC max(w,n)).
"""
from __future__ import annotations

from .angles import DyadicAngle, TruncationPolicy, NO_TRUNCATION, dyadic
from .circuit import CircuitError
from .frame import Frame


def angle_for(value: int, k: int) -> DyadicAngle:
    """Angle added to Fourier qubit k when `value` is added to the register."""
    return dyadic(value, k)


def phi_add_const(frame: Frame, qubits: list[int], value: int, ctl=None) -> None:
    """value-add on a Fourier register: one rotation per qubit (Eq. angle pi*C/2^k)."""
    for k, q in enumerate(qubits):
        frame.rot(q, angle_for(value, k), ctl)


def qft_gate_order(width: int) -> list[tuple[int, int]]:
    """(control j, target k) pairs in wave order; slot of (j,k) is 2w-2-j-k."""
    gates = [(j, k) for j in range(width - 1) for k in range(j + 1, width)]
    gates.sort(key=lambda jk: (2 * width - 2 - jk[0] - jk[1], jk[0]))
    return gates


def phi_mul_rotations(frame: Frame, qubits: list[int], mult: int,
                      inverse: bool = False) -> None:
    """Rotation body of  |y> -> fourier(mult*y)  (descending controls).

    With mult=1 this is the QFT body; inverse emits the exact reverse.
    """
    if mult % 2 == 0:
        raise CircuitError("in-place Fourier multiply needs an odd multiplier")
    w = len(qubits)
    order = qft_gate_order(w)
    if inverse:
        order = list(reversed(order))
    for j, k in order:
        a = dyadic(mult, k - j)
        frame.rot(qubits[k], a.negated() if inverse else a, (qubits[j], False))


def qft(frame: Frame, qubits: list[int], with_markers: bool = True) -> None:
    """Binary -> Fourier basis; w(w-1)/2 CRY plus per-qubit bookkeeping RYs."""
    if with_markers:
        for q in qubits:
            frame.marker_ry(q)
    phi_mul_rotations(frame, qubits, 1)
    frame.note_transform(len(qubits), inverse=False)


def iqft(frame: Frame, qubits: list[int], with_markers: bool = True) -> None:
    """Fourier -> binary basis (exact reverse of qft)."""
    phi_mul_rotations(frame, qubits, 1, inverse=True)
    if with_markers:
        for q in qubits:
            frame.marker_ry(q)
    frame.note_transform(len(qubits), inverse=True)


def phi_mul_inplace(frame: Frame, qubits: list[int], mult: int) -> None:
    """|y> -> fourier(mult*y mod 2^w) in place, for odd mult (QFT when mult=1)."""
    phi_mul_rotations(frame, qubits, mult)
    frame.note_transform(len(qubits), inverse=False)


def phi_mac(frame: Frame, acc: list[int], y_bits: list[int], addends: list[int]) -> None:
    """acc += sum_k y_k * addends[k] (acc Fourier, y binary), wave-parallel.

    Gate (k, j) sits in slot k+j, so every slot touches each qubit once
    and the scheduled depth is max(len(acc), len(y)) + O(1).
    """
    if len(addends) != len(y_bits):
        raise CircuitError("one addend per multiplier bit")
    w, n = len(acc), len(y_bits)
    gates = [(k, j) for k in range(n) for j in range(w)]
    gates.sort(key=lambda kj: (kj[0] + kj[1], kj[0]))
    for k, j in gates:
        frame.rot(acc[j], angle_for(addends[k], j), (y_bits[k], False))


def phi_add_reg(frame: Frame, acc: list[int], y_bits: list[int],
                shift: int = 0, subtract: bool = False) -> None:
    """acc += (y << shift) with binary y: the MAC with multiplier one."""
    w = len(acc)
    gates = []
    for l, yq in enumerate(y_bits):
        for j in range(w):
            a = angle_for((1 << (l + shift)) if not subtract else -(1 << (l + shift)), j)
            if not a.is_zero:
                gates.append((l, j, a))
    gates.sort(key=lambda t: (t[0] + t[1], t[0]))
    for l, j, a in gates:
        frame.rot(acc[j], a, (y_bits[l], False))
