"""Arithmetic of the real quadratic field Q(sqrt(p)): Pell units with a
fixed sign normalization, prime splitting, and residue symbols modulo the
primes over a rational prime q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import is_prime, jacobi, sqrt_mod
from .errors import (
    IterationLimitExceeded,
    NoNegativeNormUnit,
    NotCoprime,
    PreconditionViolated,
)

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"

FIRST = "first"
CONJUGATE = "conjugate"

_PELL_ITERATION_CAP = 10**6


@dataclass(frozen=True)
class PellUnit:
    """Fundamental norm -1 unit u + v*sqrt(p), sign-normalized."""

    p: int
    u: int
    v: int

    def norm(self) -> int:
        return self.u * self.u - self.p * self.v * self.v


@dataclass(frozen=True)
class KpElement:
    """x + y*sqrt(p), or (x + y*sqrt(p))/2 when halved (x, y then both odd)."""

    x: int
    y: int
    p: int
    halved: bool = False

    def __post_init__(self):
        if self.halved and (self.x % 2 == 0 or self.y % 2 == 0):
            raise PreconditionViolated("halved elements need both coordinates odd")

    def conjugate(self) -> "KpElement":
        return KpElement(self.x, -self.y, self.p, self.halved)

    def norm(self) -> int:
        n = self.x * self.x - self.p * self.y * self.y
        if self.halved:
            if n % 4 != 0:
                raise PreconditionViolated(f"norm of {self} is not an integer")
            return n // 4
        return n

    def __str__(self) -> str:
        body = f"{self.x} + {self.y}*sqrt({self.p})"
        return f"({body})/2" if self.halved else body


def pell_negative_unit(p: int) -> PellUnit:
    """Fundamental solution of u^2 - p*v^2 = -1, with v - u = 1 (mod 4).

    Found on the continued-fraction convergents of sqrt(p).  Requires prime
    p = 1 (mod 4); such p always carry a norm -1 unit.
    """
    if not is_prime(p):
        raise PreconditionViolated(f"{p} is not prime")
    if p % 4 != 1:
        raise NoNegativeNormUnit(f"no norm -1 unit for p = {p}")
    a0 = math.isqrt(p)
    h_prev, h = 1, a0
    k_prev, k = 0, 1
    m, den = 0, 1
    for _ in range(_PELL_ITERATION_CAP):
        if h * h - p * k * k == -1:
            u, v = h, k
            if (v - u) % 4 != 1:
                v = -v
            unit = PellUnit(p, u, v)
            assert unit.norm() == -1
            assert (v - u) % 4 == 1
            expected = (0, 1) if p % 8 == 1 else (2, 3)
            assert (u % 4, v % 4) == expected
            return unit
        m = den * ((a0 + m) // den) - m
        den = (p - m * m) // den
        a = (a0 + m) // den
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    raise IterationLimitExceeded(f"no norm -1 convergent for {p} within cap")


def splitting(q: int, p: int) -> str:
    """Behavior of the rational prime q in Q(sqrt(p)), p an odd prime."""
    if q == p:
        raise PreconditionViolated("q = p is the ramified prime over p itself")
    if not is_prime(q) or not is_prime(p):
        raise PreconditionViolated(f"need distinct primes, got q={q}, p={p}")
    if q == 2:
        if p % 8 == 1:
            return SPLIT
        if p % 8 == 5:
            return INERT
        return RAMIFIED
    return SPLIT if jacobi(p, q) == 1 else INERT


def residue_symbol(alpha: KpElement, q: int, which: str = FIRST, flip_root: bool = False) -> int:
    """Quadratic residue symbol of alpha modulo a prime of Q(sqrt(p)) over q.

    Split q: the two primes are the kernels of x + y*sqrt(p) -> x + y*s and
    x - y*s, with s the canonical square root of p mod q; ``which`` picks
    one, and ``flip_root`` swaps the canonical root (relabeling the pair).
    Inert q: the symbol is jacobi(N(alpha), q), by the Euler criterion in
    the quadratic extension of F_q.
    """
    if q % 2 == 0:
        raise PreconditionViolated("residue symbols here need an odd prime q")
    if which not in (FIRST, CONJUGATE):
        raise PreconditionViolated(f"unknown prime selector {which!r}")
    kind = splitting(q, alpha.p)
    if kind == SPLIT:
        s = sqrt_mod(alpha.p, q)
        if flip_root:
            s = q - s
        val = (alpha.x + alpha.y * s) if which == FIRST else (alpha.x - alpha.y * s)
        if alpha.halved:
            val *= pow(2, -1, q)
        val %= q
        if val == 0:
            raise NotCoprime(f"{alpha} lies in the chosen prime over {q}")
        return jacobi(val, q)
    if kind == INERT:
        n = alpha.norm() % q
        if n == 0:
            raise NotCoprime(f"{alpha} lies in the prime over {q}")
        return jacobi(n, q)
    raise PreconditionViolated(f"{q} ramifies in Q(sqrt({alpha.p}))")
