"""Classical big-integer oracles and precomputation.

Everything here is plain integer arithmetic: modular inverses, the
classical Montgomery reduction (the oracle the quantum stages are
checked against), Barrett parameters with the truncation widths used
by the circuits, and the reduced partial-product tables.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass


def ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError("ceil_log2 needs x >= 1")
    return (x - 1).bit_length()


def mod_inverse(a: int, modulus: int) -> int:
    """Inverse of a mod modulus; raises on non-coprime inputs."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(a, modulus) != 1:
        raise ValueError(f"{a} is not invertible mod {modulus}")
    return pow(a, -1, modulus)


def redc_estimate(t: int, n_mod: int, m: int) -> tuple[int, int]:
    """Montgomery estimate ((t - u*N)/2^m, u) with u = t*N^-1 mod 2^m."""
    if n_mod % 2 == 0:
        raise ValueError("modulus must be odd")
    if not 0 <= t < n_mod << m:
        raise ValueError("t out of range [0, N*2^m)")
    u = (t * mod_inverse(n_mod, 1 << m)) % (1 << m) if m else 0
    est = (t - u * n_mod) >> m
    return est, u


def redc_oracle(t: int, n_mod: int, m: int) -> tuple[int, int]:
    """Classical Montgomery reduction: (t*2^-m mod N, t*N^-1 mod 2^m)."""
    est, u = redc_estimate(t, n_mod, m)
    return est + n_mod if est < 0 else est, u


@dataclass(frozen=True)
class ModulusCtx:
    """Per-(N, X) precomputation shared by the multiplier designs."""

    N: int
    X: int
    n: int                       # bit width of N
    m: int                       # ceil(log2 n)
    N_inv_2m1: int               # N^-1 mod 2^(m+1)
    partials: tuple[int, ...]    # 2^k * X mod N
    uncompute_addends: tuple[int, ...]  # partials[k] * N^-1 mod 2^(m+1)


def build_ctx(n_mod: int, x: int) -> ModulusCtx:
    if n_mod % 2 == 0 or n_mod < 3:
        raise ValueError("modulus must be odd and >= 3")
    if not 0 < x < n_mod:
        raise ValueError("multiplicand must lie in (0, N)")
    n = ceil_log2(n_mod)
    m = ceil_log2(n)
    n_inv = mod_inverse(n_mod, 1 << (m + 1))
    partials = []
    p = x % n_mod
    for _ in range(n):
        partials.append(p)
        p = (2 * p) % n_mod
    addends = tuple((p * n_inv) % (1 << (m + 1)) for p in partials)
    return ModulusCtx(n_mod, x, n, m, n_inv, tuple(partials), addends)


# -- Barrett reduction -----------------------------------------------------

@dataclass(frozen=True)
class BarrettParams:
    """Truncation widths and fixed-point constants for Barrett reduction.

    k is the bit width of N, mu = floor(2^(2k)/N), and nu = mu/2^(k+1)
    lies in (1/2, 1).  nu_trunc keeps nu_bits fractional bits of nu.
    n_k most-significant bits of each reduced partial product enter the
    approximate product; the quotient estimate is accumulated in a
    2*m_b wide fixed-point register with frac_bits fractional bits.
    """

    k: int
    mu: int
    nu_bits: int
    nu_trunc: int      # floor(nu * 2^nu_bits)
    n_k: int
    m_b: int           # register-sizing parameter ceil(log2 n) + 1
    n_t: int           # truncated low bits per partial, k - n_k
    frac_bits: int     # fractional bits kept in the quotient register

    @property
    def qreg_width(self) -> int:
        return 2 * self.m_b

    def approx_partial(self, p: int) -> int:
        return p >> self.n_t

    def qhat_addend(self, j: int) -> int:
        """Fixed-point MAC addend for bit j of the approximate product."""
        shift = j + self.frac_bits - (self.n_k + self.nu_bits - 1)
        if shift >= 0:
            return (self.nu_trunc << shift) % (1 << self.qreg_width)
        return (self.nu_trunc >> -shift) % (1 << self.qreg_width)


def barrett_params(n_mod: int) -> BarrettParams:
    if n_mod % 2 == 0 or n_mod < 3:
        raise ValueError("modulus must be odd and >= 3")
    k = ceil_log2(n_mod)
    if k < 2:
        raise ValueError("modulus too small for Barrett widths")
    mu = (1 << (2 * k)) // n_mod
    log2n_ceil = ceil_log2(k)
    n_k = log2n_ceil + 1
    nu_bits = (k.bit_length() - 1) + 2  # floor(log2 n) + 2, strict nu bound
    nu_trunc = mu >> (k + 1 - nu_bits)
    m_b = log2n_ceil + 1
    frac_bits = 2 * m_b - log2n_ceil
    return BarrettParams(k, mu, nu_bits, nu_trunc, n_k, m_b, k - n_k, frac_bits)


def barrett_approx_product(ctx: ModulusCtx, p: BarrettParams, y: int) -> int:
    """Scaled approximate product: sum of y_k * (partials[k] >> n_t)."""
    s = 0
    for k in range(ctx.n):
        if y >> k & 1:
            s += p.approx_partial(ctx.partials[k])
    return s


def barrett_qhat_oracle(t: int, p: BarrettParams, approx_t: int) -> int:
    """Quotient estimate q~ as the circuit computes it.

    approx_t is the scaled approximate product (sum of n_k-MSB
    truncated partials); the estimate is the fixed-point MAC of
    approx_t's bits against nu_trunc, floored at frac_bits.
    t is accepted for interface symmetry with the classical formula
    and only bounds-checked.
    """
    if t < 0 or approx_t < 0:
        raise ValueError("negative inputs")
    if approx_t >> p.qreg_width:
        raise ValueError("approximate product exceeds register width")
    acc = 0
    for j in range(p.qreg_width):
        if approx_t >> j & 1:
            acc = (acc + p.qhat_addend(j)) % (1 << p.qreg_width)
    return acc >> p.frac_bits


def barrett_true_quotient(t: int, n_mod: int) -> int:
    return t // n_mod


# -- random sampling per the evaluation methodology ------------------------

def sample_modulus(n: int, rng: random.Random) -> int:
    """Uniform odd N with 2^(n-1) < N < 2^n."""
    if n < 2:
        raise ValueError("n must be >= 2")
    while True:
        n_mod = rng.randrange((1 << (n - 1)) + 1, 1 << n)
        if n_mod % 2:
            return n_mod


def sample_multiplicand(n_mod: int, rng: random.Random, coprime: bool = False) -> int:
    """Uniform X in (0, N), optionally restricted to gcd(X, N) = 1."""
    while True:
        x = rng.randrange(1, n_mod)
        if not coprime or math.gcd(x, n_mod) == 1:
            return x
